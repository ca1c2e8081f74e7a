//! Dyadic weights adapted to line-porous planar sets, the X-ray transform
//! identities behind their plurisubharmonic extensions, and numerical
//! certificates for both.
//!
//! Modules, bottom-up:
//! - [`bumpcalc`]: smooth compactly supported fields with exact derivatives;
//! - [`porous`]: point-cloud porous sets, porosity estimators, separated nets;
//! - [`xray`]: the X-ray transform engine, its identities and the Hilbert bridge;
//! - [`weightgen`]: the dyadic weight `ω = Σ ω_k` and its conditions;
//! - [`pshcert`]: the modified weight, the extension operator and the
//!   plurisubharmonicity certificate;
//! - [`suites`]: seeded identity suites over random test fields.

pub mod bumpcalc;
pub mod error;
pub mod porous;
pub mod pshcert;
pub mod quad;
pub mod suites;
pub mod weightgen;
pub mod xray;

pub use error::{Error, Result};

//! X-ray (Radon) transform engine and the identities it must satisfy.

mod engine;
mod hilbert;
mod identities;

pub use engine::{
    line, line_integral, line_integral_with, radial_xray_zero, radial_xray_zero_jet, sinogram, uniform_grids, unit,
    xray, xray_hessian, xray_of, Integrand, LineQuadrature, Sinogram,
};
pub use hilbert::{
    abs_sin_rule, hilbert_deriv_zero, hilbert_fft, hilbert_pv, hilbert_xray_route, verify_cohen_extra, CohenCheck,
    HilbertSettings, LineProfile, LineRestriction,
};
pub use identities::{verify_directional_identity, verify_radial_identity, IdentityCheck, RADIAL_STENCIL_SAMPLES};

//! Exact-derivative calculus for compactly supported smooth test functions.
//!
//! A [`SmoothField`] is a sum of terms, each an amplitude times a product of
//! primitives (radial mollifiers, plateaus, annuli, and angular profiles). All
//! derivatives up to order three come from truncated Taylor arithmetic, so
//! nothing in here differentiates numerically.
//!
//! JSON schema of a field: `{"terms": [{"amplitude": a, "factors": [...]}], "support_radius": R}`
//! where each factor is either `{"kind": "radial", "center": [x, y], "shape": {...}}`
//! with `shape` one of `mollifier{radius}`, `plateau{inner, outer}`,
//! `annulus{r0, r1, r2, r3}`, or `{"kind": "angular", "profile": {...}, "phase": p}`
//! with `profile` either `trig{a0, cos, sin}` or `hermite{period, feature, coeffs}`.
//! `support_radius` is recomputed on load.

mod angular;
mod cutoffs;
mod field;
mod jet;
mod kn;
mod profile;

pub use angular::{AngularProfile, HermiteProfile, MAX_TRIG_DEGREE};
pub use cutoffs::{annulus_shape, ball_shape, radial_profile, standard_cutoffs, Cutoffs};
pub use field::{directional_second, eval, laplacian, line_annulus, Intervals, Primitive, SmoothField, Term};
pub use jet::{Hess2, Jet1, Jet2, MultiIndex};
pub use kn::{c3_norm_pullback, kn_norm, sup_derivatives, KnGrid};
pub use profile::{mollifier_u, smooth_step, smooth_step_jet, Profile1d, RadialShape};

/// A single radial bump of peak `amplitude` at `center`.
pub fn bump(center: [f64; 2], radius: f64, amplitude: f64) -> SmoothField {
    let t = Term::new(
        amplitude,
        vec![Primitive::Radial {
            center,
            shape: RadialShape::Mollifier { radius },
        }],
    )
    .expect("positive radius");
    SmoothField::new(vec![t])
}

/// `amplitude * annulus(|x|) * F(arg x + phase)` with the annulus scaled by `scale`.
pub fn annular_angular(scale: f64, amplitude: f64, profile: AngularProfile, phase: f64) -> crate::Result<SmoothField> {
    let t = Term::new(
        amplitude,
        vec![
            Primitive::Radial {
                center: [0.0, 0.0],
                shape: annulus_shape().scaled(scale),
            },
            Primitive::Angular { profile, phase },
        ],
    )?;
    Ok(SmoothField::new(vec![t]))
}

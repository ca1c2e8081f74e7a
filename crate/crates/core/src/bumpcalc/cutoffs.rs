use super::field::{Primitive, SmoothField, Term};
use super::profile::{Profile1d, RadialShape};
use crate::error::{Error, Result};
use crate::quad;

/// The three cutoffs of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Cutoffs {
    /// `χ`: 1 on `B(0,1)`, supported in `B(0,2)`; used as `χ(|x|)`.
    pub chi_ball: Profile1d,
    /// `ψ`: supported in `{1/2 < |x| < 2}`, 1 on `{1/√2 ≤ |x| ≤ √2}`.
    pub psi_annulus: SmoothField,
    /// Even, supported in `(-2,-1/2) ∪ (1/2,2)`, `∫ t^-2 χ(t) dt = 1`.
    pub chi_radial: Profile1d,
}

pub fn ball_shape() -> RadialShape {
    RadialShape::Plateau { inner: 1.0, outer: 2.0 }
}

pub fn annulus_shape() -> RadialShape {
    RadialShape::Annulus {
        r0: 0.5,
        r1: std::f64::consts::FRAC_1_SQRT_2,
        r2: std::f64::consts::SQRT_2,
        r3: 2.0,
    }
}

/// `∫ t^-2 shape(t²) dt` over the real line for an annular shape.
fn inverse_square_moment(shape: &RadialShape) -> f64 {
    let (a, b) = shape.support();
    let n = 4096;
    2.0 * quad::composite(quad::Rule::Trapezoid, a, b, n, |t| shape.value_u(t * t) / (t * t))
}

pub fn radial_profile(shape: RadialShape) -> Result<Profile1d> {
    let m = inverse_square_moment(&shape);
    if !(m >= 1e-12) {
        return Err(Error::DegenerateCutoff(m));
    }
    Ok(Profile1d {
        shape,
        amplitude: 1.0 / m,
    })
}

pub fn standard_cutoffs() -> Cutoffs {
    let psi = Term::new(
        1.0,
        vec![Primitive::Radial {
            center: [0.0, 0.0],
            shape: annulus_shape(),
        }],
    )
    .expect("static shape is valid");
    Cutoffs {
        chi_ball: Profile1d {
            shape: ball_shape(),
            amplitude: 1.0,
        },
        psi_annulus: SmoothField::new(vec![psi]),
        chi_radial: radial_profile(annulus_shape()).expect("standard annulus has positive moment"),
    }
}

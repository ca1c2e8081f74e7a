use serde::{Deserialize, Serialize};

use super::engine::{radial_xray_zero, xray_of, Integrand, LineQuadrature};
use crate::bumpcalc::SmoothField;
use crate::error::Result;

/// Two sides of an identity and whether they agree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl IdentityCheck {
    pub fn new(lhs: f64, rhs: f64, tol: f64) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            ok: (lhs - rhs).abs() <= tol * (1.0 + rhs.abs()),
        }
    }

    pub fn error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / (1.0 + self.rhs.abs())
    }
}

/// `T(V_γ² f)(s,θ)` against `sin²(θ−γ) T(Δf)(s,θ)`.
pub fn verify_directional_identity(
    f: &SmoothField,
    s: f64,
    theta: f64,
    gamma: f64,
    q: &LineQuadrature,
    tol: f64,
) -> Result<IdentityCheck> {
    let lhs = xray_of(f, s, theta, q, Integrand::Directional(gamma))?;
    let lap = xray_of(f, s, theta, q, Integrand::Laplacian)?;
    let sn = (theta - gamma).sin();
    Ok(IdentityCheck::new(lhs, sn * sn * lap, tol))
}

/// Number of angles of the periodic grid behind the `∂θ²` stencil.
pub const RADIAL_STENCIL_SAMPLES: usize = 2048;

/// `T(Δf)(0,θ)` against `(∂θ² + 1) T(|x|^{-2} f)(0,θ)`, the angular derivative
/// taken by the periodic five-point stencil on a grid of `n_theta` angles.
pub fn verify_radial_identity(
    f: &SmoothField,
    theta: f64,
    q: &LineQuadrature,
    n_theta: usize,
    tol: f64,
) -> Result<IdentityCheck> {
    let lhs = xray_of(f, 0.0, theta, q, Integrand::Laplacian)?;
    let h = std::f64::consts::TAU / n_theta as f64;
    let p = |k: f64| radial_xray_zero(f, theta + k * h, q);
    let (m2, m1, c, p1, p2) = (p(-2.0)?, p(-1.0)?, p(0.0)?, p(1.0)?, p(2.0)?);
    let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
    Ok(IdentityCheck::new(lhs, d2 + c, tol))
}

use serde::{Deserialize, Serialize};

use crate::bumpcalc::SmoothField;
use crate::error::{Error, Result};
use crate::xray::{xray_hessian, LineQuadrature};

pub type Mat2 = [[f64; 2]; 2];

/// `Eω(x + iy) = (1/π) ∫ ω(x + t y) / (1 + t²) dt`. In arc length `τ = t|y|`
/// the kernel is `r / (r² + τ²)`, `r = |y|`; the substitution `τ = r sinh u`
/// turns it into `1 / cosh u` and grades the step like `√(r² + τ²)`, so each
/// chord gets a uniform trapezoid grid in `u` resolving both the term and the kernel.
pub fn extension_eval(f: &SmoothField, x: [f64; 2], y: [f64; 2], q: &LineQuadrature) -> f64 {
    let r = y[0].hypot(y[1]);
    if r == 0.0 {
        return f.value(x);
    }
    let e = [y[0] / r, y[1] / r];
    let mut total = 0.0;
    for term in f.terms() {
        for &(a, b) in term.chord(x, e).as_slice() {
            let (ua, ub) = ((a / r).asinh(), (b / r).asinh());
            let m = a.abs().max(b.abs());
            let du = (term.feature() / r.hypot(m)).min(1.0) / q.points_per_feature;
            let n = (((ub - ua) / du).ceil() as usize).max(q.min_points);
            total += crate::quad::composite(q.rule, ua, ub, n, |u| {
                let t = r * u.sinh();
                term.value([x[0] + t * e[0], x[1] + t * e[1]]) / u.cosh()
            });
        }
    }
    total / std::f64::consts::PI
}

/// Independent evaluation of `Eω` on the original variable `t = τ/r`, by
/// adaptive quadrature on each chord.
pub fn extension_eval_raw(f: &SmoothField, x: [f64; 2], y: [f64; 2], tol: f64) -> f64 {
    let r = y[0].hypot(y[1]);
    if r == 0.0 {
        return f.value(x);
    }
    let e = [y[0] / r, y[1] / r];
    let mut total = 0.0;
    for term in f.terms() {
        for &(a, b) in term.chord(x, e).as_slice() {
            total += crate::quad::adaptive(a / r, b / r, &[], tol, tol, |t| {
                term.value([x[0] + t * y[0], x[1] + t * y[1]]) / (1.0 + t * t)
            });
        }
    }
    total / std::f64::consts::PI
}

/// `∂_{z̄z}|y| = A_θ / (4r)` with `A_θ = [[sin²θ, −sinθcosθ], [−sinθcosθ, cos²θ]]`.
pub fn y_abs_ddbar(y: [f64; 2]) -> Mat2 {
    let r = y[0].hypot(y[1]);
    let (s, c) = (y[1] / r, y[0] / r);
    let k = 0.25 / r;
    [[k * s * s, -k * s * c], [-k * s * c, k * c * c]]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdbarSettings {
    /// Finite-difference step in each of the four real directions.
    pub step: f64,
    pub tol: f64,
    /// Absolute floor for the relative comparison.
    pub abs_floor: f64,
}

impl Default for DdbarSettings {
    fn default() -> Self {
        DdbarSettings {
            step: 2.5e-3,
            tol: 1e-3,
            abs_floor: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DdbarCheck {
    /// Real part of the finite-difference `∂_{z̄z}u`.
    pub fd: Mat2,
    /// Largest imaginary entry of the finite-difference matrix (zero in theory).
    pub fd_imag: f64,
    /// `(1/4πr) T(∂²ω)(x₂cosθ − x₁sinθ, θ) + (σ/4r) A_θ`.
    pub formula: Mat2,
    pub rel_error: f64,
    pub ok: bool,
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Compares the complex Hessian of `u = Eω + σ|y|` by fourth-order central
/// differences (combined by the real-form identities) with the X-ray formula.
pub fn verify_e_ddbar(
    f: &SmoothField,
    sigma: f64,
    x: [f64; 2],
    y: [f64; 2],
    q: &LineQuadrature,
    s: &DdbarSettings,
) -> Result<DdbarCheck> {
    let r = y[0].hypot(y[1]);
    if r < 10.0 * s.step {
        return Err(Error::TooCloseToRealSlice { y: r, min: 10.0 * s.step });
    }
    let u = |p: [f64; 4]| extension_eval(f, [p[0], p[1]], [p[2], p[3]], q) + sigma * p[2].hypot(p[3]);
    let base = [x[0], x[1], y[0], y[1]];
    let h = s.step;
    let u0 = u(base);
    let d2 = |d: [f64; 4]| {
        let at = |m: f64| u(std::array::from_fn(|i| base[i] + m * h * d[i]));
        (-at(2.0) + 16.0 * at(1.0) - 30.0 * u0 + 16.0 * at(-1.0) - at(-2.0)) / (12.0 * h * h)
    };
    let unit = |i: usize| -> [f64; 4] { std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }) };
    let mixed = |i: usize, j: usize| {
        let p: [f64; 4] = std::array::from_fn(|l| unit(i)[l] + unit(j)[l]);
        let m: [f64; 4] = std::array::from_fn(|l| unit(i)[l] - unit(j)[l]);
        (d2(p) - d2(m)) / 4.0
    };
    // coordinates: 0 = x1, 1 = x2, 2 = y1, 3 = y2
    let m11 = 0.25 * (d2(unit(0)) + d2(unit(2)));
    let m22 = 0.25 * (d2(unit(1)) + d2(unit(3)));
    let m12 = 0.25 * (mixed(0, 1) + mixed(2, 3));
    let im12 = 0.25 * (mixed(2, 1) - mixed(0, 3));
    let fd = [[m11, m12], [m12, m22]];

    let theta = y[1].atan2(y[0]);
    let sl = x[1] * theta.cos() - x[0] * theta.sin();
    let hx = if f.is_zero() { [0.0; 3] } else { xray_hessian(f, sl, theta, q)? };
    let k = 1.0 / (4.0 * std::f64::consts::PI * r);
    let a = y_abs_ddbar(y);
    let formula = [
        [k * hx[0] + sigma * a[0][0], k * hx[1] + sigma * a[0][1]],
        [k * hx[1] + sigma * a[1][0], k * hx[2] + sigma * a[1][1]],
    ];
    let diff: Mat2 = std::array::from_fn(|i| std::array::from_fn(|j| fd[i][j] - formula[i][j]));
    let scale = max_abs(&formula).max(s.abs_floor);
    let rel_error = max_abs(&diff).max(im12.abs()) / scale;
    Ok(DdbarCheck {
        fd,
        fd_imag: im12.abs(),
        formula,
        rel_error,
        ok: rel_error <= s.tol,
    })
}

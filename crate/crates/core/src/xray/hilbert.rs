//! `(Hφ′)(0)` three ways: symmetrised principal value, Fourier multiplier on a
//! padded periodic grid, and the weighted X-ray integral over lines through a point.

use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use super::engine::{line, xray_of, Integrand, LineQuadrature};
use crate::bumpcalc::{Profile1d, SmoothField};
use crate::error::{Error, Result};
use crate::quad;

/// A compactly supported smooth function of one variable with two derivatives.
pub trait LineProfile: Sync {
    /// `[φ(t), φ′(t), φ″(t)]`.
    fn derivs(&self, t: f64) -> [f64; 3];
    /// Support lies in `[-half_width, half_width]`.
    fn half_width(&self) -> f64;
    /// Length scale of the finest structure.
    fn feature(&self) -> f64;
    /// Points `|t|` where the integrand may change character.
    fn breaks(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl LineProfile for Profile1d {
    fn derivs(&self, t: f64) -> [f64; 3] {
        let j = self.jet(t);
        [j.deriv(0), j.deriv(1), j.deriv(2)]
    }
    fn half_width(&self) -> f64 {
        Profile1d::half_width(self)
    }
    fn feature(&self) -> f64 {
        Profile1d::feature(self)
    }
}

/// `t ↦ ω(z₀ + t v₀)` for a planar field.
#[derive(Clone, Copy, Debug)]
pub struct LineRestriction<'a> {
    pub field: &'a SmoothField,
    pub z0: [f64; 2],
    pub v0: [f64; 2],
}

impl LineProfile for LineRestriction<'_> {
    fn derivs(&self, t: f64) -> [f64; 3] {
        let v = self.v0;
        let h = self.field.hess([self.z0[0] + t * v[0], self.z0[1] + t * v[1]]);
        [
            h.v,
            h.g[0] * v[0] + h.g[1] * v[1],
            h.h[0] * v[0] * v[0] + 2.0 * h.h[1] * v[0] * v[1] + h.h[2] * v[1] * v[1],
        ]
    }
    fn half_width(&self) -> f64 {
        (self.z0[0] * self.v0[0] + self.z0[1] * self.v0[1]).abs() + self.field.support_radius()
    }
    fn feature(&self) -> f64 {
        self.field.feature().min(self.half_width())
    }
    fn breaks(&self) -> Vec<f64> {
        let mut b = Vec::new();
        for t in self.field.terms() {
            for &(lo, hi) in t.chord(self.z0, self.v0).as_slice() {
                b.push(lo.abs());
                b.push(hi.abs());
            }
        }
        b
    }
}

/// Settings for the Hilbert routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertSettings {
    /// Relative tolerance of the adaptive principal-value quadrature.
    pub pv_rel_tol: f64,
    /// Periodic box length as a multiple of the support diameter.
    pub fft_pad: f64,
    /// FFT grid nodes per feature length.
    pub fft_points_per_feature: f64,
    /// Largest FFT size (power of two).
    pub fft_max_len: usize,
    /// Agreement tolerance between the two routes, relative to the integral's scale.
    pub tol: f64,
}

impl Default for HilbertSettings {
    fn default() -> Self {
        HilbertSettings {
            pv_rel_tol: 1e-11,
            fft_pad: 4.0,
            fft_points_per_feature: 16.0,
            fft_max_len: 1 << 21,
            tol: 1e-4,
        }
    }
}

/// Principal-value route: `(Hφ′)(0) = −(1/π) ∫₀^∞ (φ′(y) − φ′(−y)) / y dy`.
/// Returns the value and the integral of the absolute integrand (its natural scale).
pub fn hilbert_pv(phi: &dyn LineProfile, s: &HilbertSettings) -> (f64, f64) {
    let w = phi.half_width();
    if w <= 0.0 {
        return (0.0, 0.0);
    }
    let g = |y: f64| {
        if y < 1e-9 * w {
            2.0 * phi.derivs(0.0)[2]
        } else {
            (phi.derivs(y)[1] - phi.derivs(-y)[1]) / y
        }
    };
    let mut breaks = phi.breaks();
    let f = phi.feature();
    let mut x = f;
    while x < w {
        breaks.push(x);
        x += f;
    }
    let v = quad::adaptive(0.0, w, &breaks, 1e-300, s.pv_rel_tol, g);
    let scale = quad::adaptive(0.0, w, &breaks, 1e-300, 1e-6, |y| g(y).abs());
    (-v / std::f64::consts::PI, scale / std::f64::consts::PI)
}

/// Fourier route: `(1/2π) ∫ |ξ| φ̂(ξ) dξ` on a padded periodic grid, with the
/// periodisation error removed through the smooth kernel difference
/// `(π/L)²/sin²(πy/L) − 1/y²`.
pub fn hilbert_fft(phi: &dyn LineProfile, s: &HilbertSettings) -> f64 {
    let w = phi.half_width();
    if w <= 0.0 {
        return 0.0;
    }
    let len = s.fft_pad * 2.0 * w;
    let want = (len * s.fft_points_per_feature / phi.feature()).ceil() as usize;
    let n = want.next_power_of_two().clamp(1 << 10, s.fft_max_len);
    let h = len / n as f64;
    let x0 = -0.5 * len;
    let samples: Vec<f64> = (0..n).map(|j| phi.derivs(x0 + j as f64 * h)[0]).collect();
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut acc = 0.0;
    for (m, c) in buf.iter().enumerate() {
        let k = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
        let xi = std::f64::consts::TAU * k / len;
        let wgt = if m == n / 2 { 0.5 } else { 1.0 };
        let phase = Complex::from_polar(1.0, -xi * x0);
        acc += wgt * xi.abs() * (phase * c).re * h;
    }
    let periodic = acc / len;
    let pil = std::f64::consts::PI / len;
    let corr: f64 = samples
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let y = x0 + j as f64 * h;
            let k = if y.abs() < 1e-6 * len {
                pil * pil / 3.0
            } else {
                let sn = (pil * y).sin();
                pil * pil / (sn * sn) - 1.0 / (y * y)
            };
            v * k
        })
        .sum::<f64>()
        * h;
    periodic + corr / std::f64::consts::PI
}

/// `(Hφ′)(0)` by the principal-value route, cross-checked against the Fourier route.
pub fn hilbert_deriv_zero(phi: &dyn LineProfile, s: &HilbertSettings) -> Result<f64> {
    let (a, scale) = hilbert_pv(phi, s);
    let b = hilbert_fft(phi, s);
    // roundoff floor for profiles whose integrand cancels identically
    let w = phi.half_width();
    let size = (0..=64)
        .map(|i| phi.derivs(-w + 2.0 * w * i as f64 / 64.0)[0].abs())
        .fold(0.0, f64::max)
        / phi.feature();
    let tol = s.tol * (a.abs().max(scale).max(1e-9 * size) + f64::MIN_POSITIVE);
    if (a - b).abs() > tol {
        return Err(Error::QuadratureInconsistency { a, b, tol });
    }
    Ok(a)
}

/// Product-integration rule for `∫₀^{2π} |sin θ| g(θ) dθ` on `n` uniform angles
/// (`n` rounded up to even), exact for trigonometric `g` of degree below `n/2`:
/// `w_j = (1/n) Σ_m a_m cos(m θ_j)` with `a_m = ∫|sin θ| cos mθ dθ = 4/(1 − m²)`
/// for even `m` and `0` for odd `m`. Returns `(angles, weights)`.
pub fn abs_sin_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let n = (n + (n & 1)).max(2);
    let th: Vec<f64> = (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect();
    let half = n / 2;
    let wt = th
        .iter()
        .map(|&t| {
            let mut acc = 4.0;
            for m in (2..=half).step_by(2) {
                let a = 4.0 / (1.0 - (m * m) as f64);
                // the Nyquist mode is shared between ±n/2
                let f = if m == half { 1.0 } else { 2.0 };
                acc += f * a * (m as f64 * t).cos();
            }
            acc / n as f64
        })
        .collect();
    (th, wt)
}

/// X-ray route: `−(1/4π) ∫ |sin θ| T(Δω)(·) dθ` over lines through `z₀`, angles
/// measured from `v₀`, with the [`abs_sin_rule`] on `n` angles.
pub fn hilbert_xray_route(
    f: &SmoothField,
    z0: [f64; 2],
    v0: [f64; 2],
    n: usize,
    q: &LineQuadrature,
) -> Result<f64> {
    let beta = v0[1].atan2(v0[0]);
    let (th, wt) = abs_sin_rule(n);
    let mut acc = 0.0;
    for (t, w) in th.iter().zip(&wt) {
        if *w == 0.0 {
            continue;
        }
        let phi = t + beta;
        // offset of the line through z0 with direction e(phi)
        let (perp, _) = line(1.0, phi);
        let s = z0[0] * perp[0] + z0[1] * perp[1];
        acc += w * xray_of(f, s, phi, q, Integrand::Laplacian)?;
    }
    Ok(-acc / (4.0 * std::f64::consts::PI))
}

/// Result of the one-dimensional sub-harmonicity condition `(Hω₀′)(0) ≤ σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CohenCheck {
    pub value: f64,
    pub sigma: f64,
    pub ok: bool,
}

pub fn verify_cohen_extra(
    w: &SmoothField,
    sigma: f64,
    z0: [f64; 2],
    v0: [f64; 2],
    s: &HilbertSettings,
    tol: f64,
) -> Result<CohenCheck> {
    let n = v0[0].hypot(v0[1]);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("direction must be a unit vector, |v0| = {n}")));
    }
    let value = hilbert_deriv_zero(&LineRestriction { field: w, z0, v0 }, s)?;
    Ok(CohenCheck {
        value,
        sigma,
        ok: value <= sigma + tol,
    })
}

//! Seeded identity suites over random test fields: the X-ray identities, the
//! Hilbert bridge and the complex Hessian of the extension. Shared by the
//! command line and the acceptance tests.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bumpcalc::{annular_angular, bump, AngularProfile, SmoothField};
use crate::error::Result;
use crate::pshcert::{verify_e_ddbar, y_abs_ddbar, DdbarSettings};
use crate::xray::{
    hilbert_fft, hilbert_pv, hilbert_xray_route, uniform_grids, verify_directional_identity, verify_radial_identity,
    xray, HilbertSettings, Integrand, LineQuadrature, LineRestriction, sinogram, RADIAL_STENCIL_SAMPLES,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub total: usize,
    pub passed: usize,
    /// Largest relative error seen.
    pub worst_error: f64,
    pub tol: f64,
}

impl SuiteReport {
    fn new(name: &str, tol: f64) -> Self {
        SuiteReport {
            name: name.into(),
            total: 0,
            passed: 0,
            worst_error: 0.0,
            tol,
        }
    }

    fn record(&mut self, err: f64) {
        self.total += 1;
        if err <= self.tol {
            self.passed += 1;
        }
        self.worst_error = self.worst_error.max(err);
    }

    pub fn pass(&self) -> bool {
        self.total > 0 && self.passed == self.total
    }
}

/// Three bumps near the origin plus an annulus with a trigonometric angular profile.
pub fn random_test_field(rng: &mut ChaCha8Rng) -> SmoothField {
    let mut f = SmoothField::zero();
    for _ in 0..3 {
        let c = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        f = f.plus(&bump(c, rng.gen_range(0.6..1.5), rng.gen_range(-2.0..2.0)));
    }
    f.plus(&random_annular_field(rng, 1.5))
}

/// `a · χ(|x|/scale) · F(arg x)` with a random degree-2 trigonometric `F`; zero near the origin.
pub fn random_annular_field(rng: &mut ChaCha8Rng, scale: f64) -> SmoothField {
    let prof = AngularProfile::trig(
        rng.gen_range(-0.5..0.5),
        vec![rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)],
        vec![rng.gen_range(-0.5..0.5)],
    )
    .expect("degree 2 is supported");
    annular_angular(scale, rng.gen_range(0.5..1.5), prof, rng.gen_range(0.0..TAU)).expect("positive scale")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// `T(V_γ² f)(s, θ) = sin²(θ − γ) T(Δf)(s, θ)` on `n` random `(field, s, θ, γ)`.
pub fn directional_suite(seed: u64, n: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("directional", tol);
    for _ in 0..n {
        let f = random_test_field(&mut rng);
        let q = LineQuadrature::for_field(&f);
        let (s, th, g) = (rng.gen_range(-2.5..2.5), rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
        rep.record(verify_directional_identity(&f, s, th, g, &q, tol)?.error());
    }
    Ok(rep)
}

/// `T(Δf)(0, θ) = (∂θ² + 1) T(|x|^{-2} f)(0, θ)` for annular fields, `∂θ²` by differences.
pub fn radial_suite(seed: u64, n: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("radial", tol);
    for _ in 0..n {
        let scale = rng.gen_range(0.8..3.0);
        let f = random_annular_field(&mut rng, scale);
        let q = LineQuadrature::for_field(&f);
        let th = rng.gen_range(0.0..TAU);
        rep.record(verify_radial_identity(&f, th, &q, RADIAL_STENCIL_SAMPLES, tol)?.error());
    }
    Ok(rep)
}

/// `T(−s, θ + π) = T(s, θ)` on a sinogram and `T(f∘R_γ)(s, θ) = Tf(s, θ + γ)`.
pub fn symmetry_suite(seed: u64, n: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("symmetry", tol);
    for _ in 0..n {
        let f = random_test_field(&mut rng);
        let q = LineQuadrature::for_field(&f);
        let (sg, tg) = uniform_grids(21, 32, f.support_radius());
        let sino = sinogram(&f, &sg, &tg, &q, Integrand::Value)?;
        rep.record(sino.symmetry_defect().unwrap_or(f64::INFINITY));
        let g = rng.gen_range(0.0..TAU);
        let (s, th) = (rng.gen_range(-2.5..2.5), rng.gen_range(0.0..TAU));
        rep.record(rel(xray(&f.rotated(g), s, th, &q)?, xray(&f, s, th + g, &q)?));
    }
    Ok(rep)
}

/// Angles of the `|sin θ|` rule in the X-ray route; 256 leaves errors near `1e-2`.
pub const HILBERT_ANGLES: usize = 1024;

/// `(Hφ′)(0)` along random lines of random fields by the principal-value
/// quadrature, the Fourier multiplier and the weighted X-ray integral; the
/// error is the largest pairwise difference relative to the largest value.
pub fn hilbert_suite(seed: u64, n: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("hilbert", tol);
    let hs = HilbertSettings::default();
    for _ in 0..n {
        let f = random_test_field(&mut rng);
        let q = LineQuadrature::for_field(&f);
        let z0 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let b: f64 = rng.gen_range(0.0..TAU);
        let v0 = [b.cos(), b.sin()];
        let phi = LineRestriction { field: &f, z0, v0 };
        let (pv, scale) = hilbert_pv(&phi, &hs);
        let ft = hilbert_fft(&phi, &hs);
        let xr = hilbert_xray_route(&f, z0, v0, HILBERT_ANGLES, &q)?;
        let big = pv.abs().max(ft.abs()).max(xr.abs()).max(1e-9 * scale);
        let spread = (pv - ft).abs().max((pv - xr).abs()).max((ft - xr).abs());
        rep.record(spread / big);
    }
    Ok(rep)
}

/// Finite-difference complex Hessian of `σ|y|` against `(σ/4r) A_θ`.
pub fn y_abs_suite(seed: u64, n: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("y_abs", tol);
    let zero = SmoothField::zero();
    let q = LineQuadrature::for_field(&bump([0.0, 0.0], 1.0, 1.0));
    for _ in 0..n {
        let r = rng.gen_range(0.3..3.0);
        let t = rng.gen_range(0.0..TAU);
        let y = [r * t.cos(), r * t.sin()];
        let sigma = rng.gen_range(0.1..10.0);
        let d = verify_e_ddbar(&zero, sigma, [0.0, 0.0], y, &q, &DdbarSettings::default())?;
        let a = y_abs_ddbar(y);
        let closed = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| (d.formula[i][j] - sigma * a[i][j]).abs())
            .fold(0.0, f64::max);
        rep.record(d.rel_error.max(closed / sigma));
    }
    Ok(rep)
}

/// Finite-difference complex Hessian of `Ef + σ|y|` against the X-ray formula, at
/// random off-real points for random annular fields.
pub fn e_ddbar_suite(seed: u64, n: usize, tol: f64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("e_ddbar", tol);
    let s = DdbarSettings { tol, ..Default::default() };
    for _ in 0..n {
        let scale = rng.gen_range(0.8..2.0);
        let f = random_annular_field(&mut rng, scale).plus(&bump(
            [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)],
            rng.gen_range(0.6..1.5),
            rng.gen_range(-2.0..2.0),
        ));
        let q = LineQuadrature::for_field(&f);
        let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let r = rng.gen_range(0.3..2.0);
        let t = rng.gen_range(0.0..PI);
        let sigma = rng.gen_range(0.0..5.0);
        rep.record(verify_e_ddbar(&f, sigma, x, [r * t.cos(), r * t.sin()], &q, &s)?.rel_error);
    }
    Ok(rep)
}

/// Every suite at its default size and tolerance.
pub fn identity_suites(seed: u64) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        directional_suite(seed, 100, 1e-6)?,
        radial_suite(seed.wrapping_add(1), 20, 1e-4)?,
        symmetry_suite(seed.wrapping_add(2), 10, 1e-8)?,
        hilbert_suite(seed.wrapping_add(3), 20, 1e-3)?,
        y_abs_suite(seed.wrapping_add(4), 20, 1e-6)?,
        e_ddbar_suite(seed.wrapping_add(5), 20, 1e-3)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_counts() {
        let mut r = SuiteReport::new("x", 1e-3);
        assert!(!r.pass());
        r.record(1e-4);
        r.record(2e-3);
        assert_eq!((r.total, r.passed), (2, 1));
        assert_eq!(r.worst_error, 2e-3);
        assert!(!r.pass());
    }
}

//! The dyadic weight `ω = Σ_k ω_k` adapted to a line-porous set `Y ⊂ B(0, h⁻¹)`:
//!
//! `ω_k(x) = −10 ψ(2^{−k}x) Σ_{y∈S_k} (2^k/k^α) χ((x − y)/r_k)`, `r_k = 2^k/k^η`,
//!
//! with `S_k` a maximal `r_k`-separated subset of `Y ∩ {2^{k−1} ≤ |x| ≤ 2^{k+1}}`.

mod conditions;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bumpcalc::{
    annulus_shape, ball_shape, kn_norm, sup_derivatives, KnGrid, Primitive, SmoothField, Term,
};
use crate::error::{Error, Result};
use crate::porous::{delta_exponent, separated_net, PointCloud2};
use crate::xray::{radial_xray_zero, radial_xray_zero_jet, LineQuadrature};

pub use conditions::{
    explicit_q_bound, single_bump_kn, verify_conditions, verify_lower_bound, ConditionReport, LowerBoundReport,
};

/// Exponents of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentChoice {
    pub eta: f64,
    pub alpha: f64,
    pub delta: f64,
    pub nu: f64,
}

pub const ETA: f64 = 0.3;

impl ExponentChoice {
    /// `0 < η < 1/3`, `3η ≤ α < 1`, `α > 1 − η(1 − δ)`.
    pub fn constraints_hold(&self) -> bool {
        let (e, a, d) = (self.eta, self.alpha, self.delta);
        0.0 < e && e < 1.0 / 3.0 && 3.0 * e <= a && a < 1.0 && a > 1.0 - e * (1.0 - d)
    }

    /// Decay exponent `(δ − 1)η − α` of the `q_k`; below `−1` makes `Σ q_k` converge.
    pub fn decay_exponent(&self) -> f64 {
        (self.delta - 1.0) * self.eta - self.alpha
    }
}

/// `δ = δ(ν/2)`, `η = 0.3`, `α = max(3η, 1 − η(1 − δ)/2)`.
pub fn choose_exponents(nu: f64) -> Result<ExponentChoice> {
    if !(nu > 0.0 && nu < 0.1) {
        return Err(Error::InvalidParameter(format!("porosity {nu} outside (0, 1/10)")));
    }
    let delta = delta_exponent(0.5 * nu)?;
    let eta = ETA;
    let alpha = (3.0 * eta).max(1.0 - eta * (1.0 - delta) / 2.0);
    let e = ExponentChoice { eta, alpha, delta, nu };
    assert!(e.constraints_hold(), "exponent constraints fail for {e:?}");
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildSettings {
    /// Grid behind the sup norms.
    pub kn_grid: KnGrid,
    /// Angles in `[0, π)` scanned for the infimum defining `q_k`.
    pub q_theta: usize,
    /// Line quadrature density (nodes per feature length).
    pub points_per_feature: f64,
}

impl Default for BuildSettings {
    fn default() -> Self {
        BuildSettings {
            kn_grid: KnGrid::default(),
            q_theta: 1024,
            points_per_feature: LineQuadrature::DEFAULT_POINTS_PER_FEATURE,
        }
    }
}

impl BuildSettings {
    pub fn quadrature(&self, f: &SmoothField) -> LineQuadrature {
        LineQuadrature {
            points_per_feature: self.points_per_feature,
            ..LineQuadrature::for_field(f)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnularPiece {
    pub k: u32,
    /// `S_k`.
    pub net: PointCloud2,
    pub r_k: f64,
    /// `10·2^k/k^α`.
    pub amplitude: f64,
    /// `ω_k`.
    pub field: SmoothField,
    pub kn_norm: f64,
    /// `sup |∂^γ ω_k|` by order `|γ| = 0..3`.
    pub sup_derivs: [f64; 4],
    pub q_k: f64,
    /// Angle attaining the infimum in `q_k`.
    pub q_theta: f64,
}

impl AnnularPiece {
    pub fn inner(&self) -> f64 {
        2f64.powi(self.k as i32 - 1)
    }

    pub fn outer(&self) -> f64 {
        2f64.powi(self.k as i32 + 1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DyadicWeight {
    pub pieces: Vec<AnnularPiece>,
    /// Largest measured `kn_norm(ω_k)`.
    pub c_reg: f64,
    pub q: Vec<f64>,
    /// `Σ q_k`.
    pub c_gr: f64,
    pub exponents: ExponentChoice,
    pub h: f64,
    pub settings: BuildSettings,
}

/// `r_k = 2^k / k^η`.
pub fn r_k(k: u32, eta: f64) -> f64 {
    2f64.powi(k as i32) / (k as f64).powf(eta)
}

/// Largest `k` with `2^{k−1} ≤ h⁻¹`.
pub fn k_max(h: f64) -> u32 {
    let mut k = 1;
    while 2f64.powi(k as i32) <= 1.0 / h * (1.0 + 1e-12) {
        k += 1;
    }
    k
}

/// `−inf_θ T(|x|^{-2} f)(0, θ)` and the angle attaining it: a uniform scan of
/// `n` angles on `[0, π)` (the quantity is π-periodic), polished by Newton steps
/// on the exact angular jet.
pub fn radial_infimum(f: &SmoothField, n: usize, q: &LineQuadrature) -> Result<(f64, f64)> {
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let n = n.max(4);
    let h = std::f64::consts::PI / n as f64;
    let vals: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| radial_xray_zero(f, i as f64 * h, q))
        .collect::<Result<_>>()?;
    let (i0, &v0) = vals
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("n >= 4");
    let (mut best_t, mut best_v) = (i0 as f64 * h, v0);
    let mut t = best_t;
    for _ in 0..8 {
        let j = radial_xray_zero_jet(f, t, q)?;
        if j.deriv(2) <= 0.0 {
            break;
        }
        let step = -j.deriv(1) / j.deriv(2);
        let nt = (t + step).clamp(i0 as f64 * h - h, i0 as f64 * h + h);
        let v = radial_xray_zero(f, nt, q)?;
        if v < best_v {
            best_v = v;
            best_t = nt;
        }
        if (nt - t).abs() < 1e-13 {
            break;
        }
        t = nt;
    }
    Ok(((-best_v).max(0.0), best_t.rem_euclid(std::f64::consts::PI)))
}

/// Assembles `ω_k` from a net.
pub fn piece_field(k: u32, net: &[[f64; 2]], rk: f64, amplitude: f64) -> SmoothField {
    let scale = 2f64.powi(k as i32);
    let terms = net
        .iter()
        .map(|&y| {
            Term::new(
                -amplitude,
                vec![
                    Primitive::Radial {
                        center: [0.0, 0.0],
                        shape: annulus_shape().scaled(scale),
                    },
                    Primitive::Radial {
                        center: y,
                        shape: ball_shape().scaled(rk),
                    },
                ],
            )
            .expect("valid cutoff shapes")
        })
        .collect();
    SmoothField::new(terms)
}

fn build_piece(y: &PointCloud2, k: u32, e: &ExponentChoice, s: &BuildSettings) -> Result<AnnularPiece> {
    let scale = 2f64.powi(k as i32);
    let rk = r_k(k, e.eta);
    let amplitude = 10.0 * scale / (k as f64).powf(e.alpha);
    let local = y.annulus(0.5 * scale, 2.0 * scale);
    let net = separated_net(&local, rk)?;
    let field = piece_field(k, net.points(), rk, amplitude);
    let (q_k, q_theta) = radial_infimum(&field, s.q_theta, &s.quadrature(&field))?;
    Ok(AnnularPiece {
        k,
        r_k: rk,
        amplitude,
        kn_norm: kn_norm(&field, &s.kn_grid),
        sup_derivs: sup_derivatives(&field, &s.kn_grid),
        q_k,
        q_theta,
        net,
        field,
    })
}

/// Builds all pieces `k = 1, …` with `2^{k−1} ≤ h⁻¹`.
pub fn build(y: &PointCloud2, h: f64, nu: f64) -> Result<DyadicWeight> {
    build_with(y, h, nu, &BuildSettings::default())
}

pub fn build_with(y: &PointCloud2, h: f64, nu: f64, s: &BuildSettings) -> Result<DyadicWeight> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(Error::InvalidParameter(format!("scale h = {h} outside (0, 1]")));
    }
    let bound = 1.0 / h;
    for p in y.points() {
        if p[0].hypot(p[1]) > bound * (1.0 + 1e-12) {
            return Err(Error::Domain { x: p[0], y: p[1], bound });
        }
    }
    let exponents = choose_exponents(nu)?;
    let pieces: Vec<AnnularPiece> = (1..=k_max(h))
        .into_par_iter()
        .map(|k| build_piece(y, k, &exponents, s))
        .collect::<Result<_>>()?;
    let c_reg = pieces.iter().map(|p| p.kn_norm).fold(0.0, f64::max);
    let q: Vec<f64> = pieces.iter().map(|p| p.q_k).collect();
    let c_gr = q.iter().sum();
    Ok(DyadicWeight {
        pieces,
        c_reg,
        q,
        c_gr,
        exponents,
        h,
        settings: *s,
    })
}

impl DyadicWeight {
    /// The whole weight as one field (all terms of all pieces).
    pub fn field(&self) -> SmoothField {
        self.pieces
            .iter()
            .fold(SmoothField::zero(), |acc, p| acc.plus(&p.field))
    }
}

/// `ω(x) = Σ_k ω_k(x)`, skipping pieces whose annulus excludes `x`.
pub fn eval_weight(w: &DyadicWeight, x: [f64; 2]) -> f64 {
    let r = x[0].hypot(x[1]);
    w.pieces
        .iter()
        .filter(|p| p.inner() < r && r < p.outer())
        .map(|p| p.field.value(x))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_satisfy_constraints() {
        for i in 1..10 {
            let e = choose_exponents(0.01 * i as f64).unwrap();
            assert!(e.constraints_hold());
            assert!(e.decay_exponent() < -1.0);
        }
        assert!(choose_exponents(0.1).is_err());
    }

    #[test]
    fn k_range() {
        assert_eq!(k_max(1.0 / 1024.0), 11);
        assert_eq!(k_max(1.0), 1);
        assert_eq!(k_max(0.3), 2);
    }
}

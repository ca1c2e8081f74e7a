use serde::{Deserialize, Serialize};

use rayon::prelude::*;

use super::{eval_weight, piece_field, r_k, DyadicWeight, ExponentChoice};
use crate::bumpcalc::{kn_norm, KnGrid, Primitive, Term};
use crate::error::{Error, Result};
use crate::porous::{separation_defect, PointCloud2};

/// A ball of radius `2r_k` holds at most this many points of an `r_k`-separated set.
pub const MAX_OVERLAP: f64 = 100.0;

/// Radii (as fractions of the annulus `[2^{k−1}, 2^{k+1}]` in log scale) at which
/// single bumps are sampled for [`single_bump_kn`].
const REFERENCE_POSITIONS: usize = 17;

/// Largest `kn_norm` of one term of `ω_k` over bump centres across the annulus.
/// Depends on `k` and the exponents only; `MAX_OVERLAP` times it bounds `ω_k` for
/// every separated net, and its decay in `k` is the uniform regularity bound.
pub fn single_bump_kn(k: u32, e: &ExponentChoice, grid: &KnGrid) -> f64 {
    let rk = r_k(k, e.eta);
    let amp = 10.0 * 2f64.powi(k as i32) / (k as f64).powf(e.alpha);
    (0..REFERENCE_POSITIONS)
        .map(|i| {
            let r = 2f64.powf(k as f64 - 1.0 + 2.0 * i as f64 / (REFERENCE_POSITIONS - 1) as f64);
            kn_norm(&piece_field(k, &[[r, 0.0]], rk, amp), grid)
        })
        .fold(0.0, f64::max)
}

/// At most this many `k` may escape the explicit `q_k` bound.
pub const Q_EXCEPTIONS: usize = 3;

/// `q_k ≤ 160·(600/ν)·4^δ·k^{(δ−1)η−α}`: a line meets at most `(600/ν)(4k^η)^δ`
/// of the `r_k`-bumps, each contributing `≤ 4·2^{−2k}·(10·2^k/k^α)·4r_k`.
/// Valid when `2^{k+2} ≤ h⁻¹`.
pub fn explicit_q_bound(e: &ExponentChoice, k: u32) -> f64 {
    160.0 * (600.0 / e.nu) * 4f64.powf(e.delta) * (k as f64).powf(e.decay_exponent())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub finite: bool,
    pub support: bool,
    pub separated: bool,
    /// `max_k kn_norm(ω_k)`.
    pub c_reg: f64,
    /// `max_{k,|γ|} 2^{(|γ|−1)k} sup|∂^γ ω_k|`.
    pub c_reg_tilde: f64,
    pub kn_norms: Vec<f64>,
    /// [`single_bump_kn`] per piece.
    pub kn_reference: Vec<f64>,
    /// Least-squares slope of `ln kn_norm(ω_k)` against `ln k` (informational).
    pub kn_slope: Option<f64>,
    pub q: Vec<f64>,
    pub c_gr: f64,
    pub q_apriori: bool,
    /// `k` where `q_k` exceeds [`explicit_q_bound`].
    pub q_exceptions: Vec<u32>,
    /// `(δ − 1)η − α`.
    pub decay_exponent: f64,
    /// Least-squares slope of `ln q_k` against `ln k` (informational).
    pub fitted_decay: Option<f64>,
    pub pass: bool,
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn violation(condition: &str, detail: String) -> Error {
    Error::ConditionViolation {
        condition: condition.into(),
        detail,
    }
}

/// Measures the regularity and growth constants of a built weight and checks
/// every hard condition; the first failure is returned as an error.
pub fn verify_conditions(w: &DyadicWeight) -> Result<ConditionReport> {
    let e = &w.exponents;
    let finite = w.pieces.iter().all(|p| {
        p.kn_norm.is_finite() && p.q_k.is_finite() && p.sup_derivs.iter().all(|v| v.is_finite())
    }) && w.c_gr.is_finite();
    if !finite {
        return Err(violation("finite", "non-finite norm or q_k".into()));
    }

    let h_inv = 1.0 / w.h;
    for p in &w.pieces {
        if 2f64.powi(p.k as i32 - 1) > h_inv * (1.0 + 1e-12) {
            return Err(violation("support", format!("piece k = {} beyond 2^(k-1) <= 1/h", p.k)));
        }
        let (lo, hi) = (p.inner(), p.outer());
        // every term carries an origin-centred radial factor supported in the annulus
        let inside = |t: &Term| {
            t.factors().iter().any(|f| match f {
                Primitive::Radial { center, shape } if *center == [0.0, 0.0] => {
                    let (a, b) = shape.support();
                    a >= lo * (1.0 - 1e-12) && b <= hi * (1.0 + 1e-12)
                }
                _ => false,
            })
        };
        if let Some(bad) = p.field.terms().iter().position(|t| !inside(t)) {
            return Err(violation("support", format!("term {bad} of piece k = {} leaves its annulus", p.k)));
        }
    }

    for p in &w.pieces {
        if let Some(d) = separation_defect(p.net.points(), p.r_k) {
            return Err(violation("separation", format!("net k = {} has a pair at distance {d}", p.k)));
        }
    }

    let c_reg = w.pieces.iter().map(|p| p.kn_norm).fold(0.0, f64::max);
    let c_reg_tilde = w
        .pieces
        .iter()
        .flat_map(|p| (0..4).map(move |m| p.sup_derivs[m] * 2f64.powi((m as i32 - 1) * p.k as i32)))
        .fold(0.0, f64::max);
    let kn_norms: Vec<f64> = w.pieces.iter().map(|p| p.kn_norm).collect();
    let kn_pts: Vec<(f64, f64)> = w
        .pieces
        .iter()
        .filter(|p| p.kn_norm > 0.0)
        .map(|p| ((p.k as f64).ln(), p.kn_norm.ln()))
        .collect();
    let kn_slope = slope(&kn_pts);
    let kn_reference: Vec<f64> = w
        .pieces
        .par_iter()
        .map(|p| if p.field.is_zero() { 0.0 } else { single_bump_kn(p.k, e, &w.settings.kn_grid) })
        .collect();
    for (p, r) in w.pieces.iter().zip(&kn_reference) {
        if p.kn_norm > MAX_OVERLAP * r * (1.0 + 1e-9) {
            return Err(violation(
                "regularity",
                format!("kn_norm(omega_{}) = {} exceeds {MAX_OVERLAP} x single bump {r}", p.k, p.kn_norm),
            ));
        }
    }

    let q_apriori = w.q.iter().all(|&q| (0.0..=10.0 * c_reg * (1.0 + 1e-12)).contains(&q));
    if !q_apriori {
        return Err(violation("q-apriori", format!("some q_k outside [0, 10 C_reg = {}]", 10.0 * c_reg)));
    }
    let c_gr: f64 = w.q.iter().sum();
    if !(c_gr <= w.c_gr * (1.0 + 1e-12) + 1e-300) {
        return Err(violation("growth", format!("sum q_k = {c_gr} exceeds C_gr = {}", w.c_gr)));
    }

    let decay_exponent = e.decay_exponent();
    if !(decay_exponent < -1.0) {
        return Err(violation("decay", format!("(delta-1)eta-alpha = {decay_exponent} >= -1")));
    }
    let mut q_exceptions = Vec::new();
    for p in &w.pieces {
        if p.q_k > explicit_q_bound(e, p.k) {
            let near_top = 2f64.powi(p.k as i32 + 2) > h_inv;
            if !near_top {
                return Err(violation(
                    "q-decay",
                    format!("q_{} = {} exceeds {}", p.k, p.q_k, explicit_q_bound(e, p.k)),
                ));
            }
            q_exceptions.push(p.k);
        }
    }
    if q_exceptions.len() > Q_EXCEPTIONS {
        return Err(violation("q-decay", format!("{} exceptional k", q_exceptions.len())));
    }
    let q_pts: Vec<(f64, f64)> = w
        .pieces
        .iter()
        .filter(|p| p.q_k > 0.0 && 2f64.powi(p.k as i32 + 2) <= h_inv)
        .map(|p| ((p.k as f64).ln(), p.q_k.ln()))
        .collect();

    Ok(ConditionReport {
        finite,
        support: true,
        separated: true,
        c_reg,
        c_reg_tilde,
        kn_norms,
        kn_reference,
        kn_slope,
        q: w.q.clone(),
        c_gr: w.c_gr,
        q_apriori,
        q_exceptions,
        decay_exponent,
        fitted_decay: slope(&q_pts),
        pass: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub checked: usize,
    /// `min (bound − ω(x))`; nonnegative when the bound holds everywhere.
    pub worst_margin: Option<f64>,
    pub worst_point: Option<[f64; 2]>,
}

/// `ω(x) ≤ −|x| / (ln|x|)^α` at every cloud point with `|x| > 10`.
pub fn verify_lower_bound(w: &DyadicWeight, y: &PointCloud2) -> Result<LowerBoundReport> {
    let alpha = w.exponents.alpha;
    let mut rep = LowerBoundReport {
        checked: 0,
        worst_margin: None,
        worst_point: None,
    };
    for &x in y.points() {
        let r = x[0].hypot(x[1]);
        if r <= 10.0 {
            continue;
        }
        let bound = -r / r.ln().powf(alpha);
        let value = eval_weight(w, x);
        rep.checked += 1;
        let margin = bound - value;
        if rep.worst_margin.map_or(true, |m| margin < m) {
            rep.worst_margin = Some(margin);
            rep.worst_point = Some(x);
        }
        if margin < 0.0 {
            return Err(Error::LowerBoundViolation {
                x: x[0],
                y: x[1],
                value,
                bound,
            });
        }
    }
    Ok(rep)
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::SmoothField;
use super::jet::MultiIndex;

/// Polar sample grid used for sup-norms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnGrid {
    pub n_angles: usize,
    pub n_radii: usize,
    /// Innermost radius as a fraction of the support radius.
    pub r_min_frac: f64,
}

impl Default for KnGrid {
    fn default() -> Self {
        KnGrid {
            n_angles: 512,
            n_radii: 256,
            r_min_frac: 1e-3,
        }
    }
}

impl KnGrid {
    pub fn points(&self, support: f64) -> Vec<[f64; 2]> {
        let mut pts = vec![[0.0, 0.0]];
        if support <= 0.0 {
            return pts;
        }
        let r0 = support * self.r_min_frac;
        let ratio = (1.0 / self.r_min_frac).powf(1.0 / (self.n_radii.max(2) - 1) as f64);
        for i in 0..self.n_radii {
            let r = r0 * ratio.powi(i as i32);
            for j in 0..self.n_angles {
                let a = std::f64::consts::TAU * j as f64 / self.n_angles as f64;
                pts.push([r * a.cos(), r * a.sin()]);
            }
        }
        pts
    }
}

/// Sup over the grid of `|∂^γ f|`, maximised over `|γ| = m`, for `m = 0..=3`.
pub fn sup_derivatives(f: &SmoothField, grid: &KnGrid) -> [f64; 4] {
    if f.is_zero() {
        return [0.0; 4];
    }
    grid.points(f.support_radius())
        .par_iter()
        .map(|&x| {
            let j = f.jet(x);
            let mut s = [0.0f64; 4];
            for g in MultiIndex::all() {
                s[g.order()] = s[g.order()].max(j.partial(g).abs());
            }
            s
        })
        .reduce(|| [0.0; 4], |a, b| [a[0].max(b[0]), a[1].max(b[1]), a[2].max(b[2]), a[3].max(b[3])])
}

/// Kohn–Nirenberg order-one norm `max_{|γ|≤3} sup ⟨x⟩^{|γ|-1} |∂^γ f|` on the grid.
///
/// A lower bound for the true norm that converges as the grid is refined.
pub fn kn_norm(f: &SmoothField, grid: &KnGrid) -> f64 {
    if f.is_zero() {
        return 0.0;
    }
    grid.points(f.support_radius())
        .par_iter()
        .map(|&x| {
            let j = f.jet(x);
            let bracket = (1.0 + x[0] * x[0] + x[1] * x[1]).sqrt();
            MultiIndex::all()
                .map(|g| bracket.powi(g.order() as i32 - 1) * j.partial(g).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `C³` norm of the pullback `x ↦ f(2^k x)`: `max_γ 2^{k|γ|} sup |∂^γ f|`.
pub fn c3_norm_pullback(f: &SmoothField, k: i32, grid: &KnGrid) -> f64 {
    let s = sup_derivatives(f, grid);
    (0..4).map(|m| 2f64.powi(k * m as i32) * s[m]).fold(0.0, f64::max)
}

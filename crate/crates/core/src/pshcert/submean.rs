use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{extension_eval, ModifiedWeight, PshCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmeanSettings {
    /// Trapezoid nodes on each circle.
    pub n_circle: usize,
    /// A sample violates the property when `ũ(z) − mean > tol`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SubmeanSettings {
    fn default() -> Self {
        SubmeanSettings {
            n_circle: 32,
            tol: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubmeanReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `ũ(z) − mean` seen.
    pub worst_excess: f64,
    /// `(x, y)` of the worst sample.
    pub worst_point: Option<([f64; 2], [f64; 2])>,
}

/// `z = x + iy`, `v = a + ib`, all in `R²`.
#[derive(Clone, Copy, Debug)]
struct Sample {
    x: [f64; 2],
    y: [f64; 2],
    a: [f64; 2],
    b: [f64; 2],
}

fn polar(r: f64, t: f64) -> [f64; 2] {
    [r * t.cos(), r * t.sin()]
}

/// Checks `ũ(z) ≤ (1/2π)∮ ũ(z + e^{iφ}v) dφ + tol` for `ũ = Eω̃ + σ|y|` at
/// `n_samples` random `(z, v)`. With a certificate as hint, half of the samples
/// are aimed at its most negative cells: `z` on the line `(s, θ)`, `y ∥ e(θ)`,
/// `v` real and orthogonal to `y` — the complex directions where a failure
/// of `T(Δω̃) + πσ ≥ 0` shows first.
pub fn submean_crosscheck(
    m: &ModifiedWeight,
    sigma: f64,
    n_samples: usize,
    s: &SubmeanSettings,
    hint: Option<&PshCertificate>,
) -> SubmeanReport {
    let f = m.field();
    let big = if f.is_zero() { 8.0 } else { f.support_radius() };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut samples = Vec::with_capacity(n_samples);

    let n_aimed = if hint.is_some() { n_samples / 2 } else { 0 };
    if let Some(c) = hint {
        // refined minima first, then the grid cells in increasing order
        let g = &c.grid;
        let ns = g.s_grid.len().max(1);
        let mut order: Vec<usize> = (0..g.values.len()).collect();
        order.sort_by(|&i, &j| g.values[i].total_cmp(&g.values[j]));
        let mut refined = c.refined.clone();
        refined.sort_by(|a, b| a.2.total_cmp(&b.2));
        let targets: Vec<(f64, f64)> = refined
            .iter()
            .map(|r| (r.0, r.1))
            .chain(order.iter().map(|&idx| (g.s_grid[idx % ns], g.theta_grid[idx / ns])))
            .collect();
        for n in 0..n_aimed.min(targets.len()) {
            let (sl, th) = targets[n];
            let e = [th.cos(), th.sin()];
            let t = rng.gen_range(-0.5..0.5) * big;
            let x = [-sl * e[1] + t * e[0], sl * e[0] + t * e[1]];
            let r = rng.gen_range(0.5..2.0);
            let rho = rng.gen_range(0.02..0.08) * r;
            samples.push(Sample {
                x,
                y: [r * e[0], r * e[1]],
                a: [-rho * e[1], rho * e[0]],
                b: [0.0, 0.0],
            });
        }
    }
    while samples.len() < n_samples {
        let x = polar(big * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
        let r = rng.gen_range(0.25..4.0);
        let y = polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let rho = rng.gen_range(0.02..0.2) * r;
        // random unit vector of C² scaled by ρ
        let w: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let nw = w.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        samples.push(Sample {
            x,
            y,
            a: [rho * w[0] / nw, rho * w[1] / nw],
            b: [rho * w[2] / nw, rho * w[3] / nw],
        });
    }

    let u = |x: [f64; 2], y: [f64; 2]| extension_eval(&f, x, y, &m.quadrature(&f)) + sigma * y[0].hypot(y[1]);
    let n = s.n_circle.max(8);
    let excess: Vec<f64> = samples
        .par_iter()
        .map(|p| {
            let mut mean = 0.0;
            for i in 0..n {
                let (sn, c) = (std::f64::consts::TAU * i as f64 / n as f64).sin_cos();
                // e^{iφ}(a + ib) = (c a − s b) + i(s a + c b)
                let x = [p.x[0] + c * p.a[0] - sn * p.b[0], p.x[1] + c * p.a[1] - sn * p.b[1]];
                let y = [p.y[0] + sn * p.a[0] + c * p.b[0], p.y[1] + sn * p.a[1] + c * p.b[1]];
                mean += u(x, y);
            }
            u(p.x, p.y) - mean / n as f64
        })
        .collect();

    let mut rep = SubmeanReport {
        samples: samples.len(),
        violations: excess.iter().filter(|&&e| e > s.tol).count(),
        worst_excess: f64::NEG_INFINITY,
        worst_point: None,
    };
    for (p, &e) in samples.iter().zip(&excess) {
        if e > rep.worst_excess {
            rep.worst_excess = e;
            rep.worst_point = Some((p.x, p.y));
        }
    }
    rep
}

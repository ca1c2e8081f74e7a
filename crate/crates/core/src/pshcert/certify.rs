use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ModifiedWeight;
use crate::error::{Error, Result};
use crate::xray::{sinogram, xray_of, Integrand, Sinogram};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertSettings {
    pub n_s: usize,
    pub n_theta: usize,
    /// Certificate passes when `min T(Δω̃) + πσ ≥ −tol`.
    pub tol: f64,
    /// Lowest grid-local minima refined off the grid.
    pub refine_seeds: usize,
}

impl Default for CertSettings {
    fn default() -> Self {
        CertSettings {
            n_s: 512,
            n_theta: 512,
            tol: 1e-6,
            refine_seeds: 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PshCertificate {
    pub sigma: f64,
    /// `T(Δω̃)` without the `πσ` shift.
    pub grid: Sinogram,
    /// `min(grid ∪ refined) + πσ`.
    pub min_value: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Grid minima polished by a local pattern search in `(s, θ)`: `(s, θ, T(Δω̃))`.
    pub refined: Vec<(f64, f64, f64)>,
    /// `(s, θ)` of the smallest sample, grid or refined.
    pub argmin: (f64, f64),
    /// Largest change of `T(Δω̃)/π` between the minimising sample and its grid
    /// neighbours: how far `σ` may move when the grid is refined.
    pub grid_tolerance: f64,
}

/// Offsets `s_i = s₀ sinh(β u_i)`, `u_i = −1 + 2i/n_s`, `i = 0..=n_s`, with `s₀` the
/// smallest term feature and `s₀ sinh β = S` the support radius: the spacing grows
/// like `√(s₀² + s²)`, following the feature size of the smallest piece reaching
/// `|s|`. Row `i` mirrors row `n_s − i`; `s = 0` and the boundary rows `±S`, where
/// `T ≡ 0`, are included. Angles are `πj/n_θ`; with `T(−s, θ) = T(s, θ + π)` the
/// grid covers every line.
pub fn certification_grid(m: &ModifiedWeight, s: &CertSettings) -> (Vec<f64>, Vec<f64>) {
    let f = m.field();
    let (big, s0) = if f.is_zero() { (1.0, 1.0) } else { (f.support_radius(), f.feature().min(f.support_radius())) };
    let beta = (big / s0).asinh();
    let ns = 2 * (s.n_s / 2).max(1);
    let nt = s.n_theta.max(1);
    let sg = (0..=ns)
        .map(|i| match i {
            0 => -big,
            i if i == ns => big,
            i if 2 * i == ns => 0.0,
            i => s0 * (beta * (-1.0 + 2.0 * i as f64 / ns as f64)).sinh(),
        })
        .collect();
    let tg = (0..nt).map(|j| std::f64::consts::PI * j as f64 / nt as f64).collect();
    (sg, tg)
}

/// Flat index of the neighbour `(i + di, j + dj)`; stepping across `θ = π` mirrors `s`.
fn neighbour(g: &Sinogram, i: usize, j: usize, di: i64, dj: i64) -> Option<usize> {
    let (ns, nt) = (g.s_grid.len() as i64, g.theta_grid.len() as i64);
    let (mut a, mut b) = (i as i64 + di, j as i64 + dj);
    if b < 0 || b >= nt {
        a = ns - 1 - a;
        b = b.rem_euclid(nt);
    }
    (0..ns).contains(&a).then(|| (b * ns + a) as usize)
}

/// The sinogram of `T(Δω̃)` and its refined minima.
fn sampled(m: &ModifiedWeight, s: &CertSettings) -> Result<(Sinogram, Vec<(f64, f64, f64)>)> {
    let grid = laplacian_sinogram(m, s)?;
    let f = m.field();
    if f.is_zero() {
        return Ok((grid, Vec::new()));
    }
    let q = m.quadrature(&f);
    let refined = refine_minima(&grid, &grid.values, s.refine_seeds, |s, th| {
        xray_of(&f, s, th, &q, Integrand::Laplacian)
    })?;
    Ok((grid, refined))
}

fn laplacian_sinogram(m: &ModifiedWeight, s: &CertSettings) -> Result<Sinogram> {
    let f = m.field();
    let (sg, tg) = certification_grid(m, s);
    if f.is_zero() {
        return Ok(Sinogram {
            values: vec![0.0; sg.len() * tg.len()],
            s_grid: sg,
            theta_grid: tg,
            quadrature_step: 0.0,
        });
    }
    sinogram(&f, &sg, &tg, &m.quadrature(&f), Integrand::Laplacian)
}

/// Grid-local minima of `values` on the geometry of `g` (no smaller neighbour), lowest first.
fn local_minima(g: &Sinogram, values: &[f64]) -> Vec<usize> {
    let ns = g.s_grid.len();
    let mut out: Vec<usize> = (0..values.len())
        .filter(|&idx| {
            let v = values[idx];
            (-1..=1).all(|di| {
                (-1..=1).all(|dj| neighbour(g, idx % ns, idx / ns, di, dj).map_or(true, |n| values[n] >= v))
            })
        })
        .collect();
    out.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    out
}

/// Compass search for minima of `eval` from the `seeds` lowest grid-local minima
/// of `values`, halving the step until it is `1e-6` of a grid cell.
fn refine_minima<F>(g: &Sinogram, values: &[f64], seeds: usize, eval: F) -> Result<Vec<(f64, f64, f64)>>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    if g.s_grid.len() < 2 || g.theta_grid.len() < 2 {
        return Ok(Vec::new());
    }
    let ns = g.s_grid.len();
    let dt = g.theta_grid[1] - g.theta_grid[0];
    let starts: Vec<usize> = local_minima(g, values).into_iter().take(seeds).collect();
    starts
        .par_iter()
        .map(|&idx| {
            let i = idx % ns;
            // local s spacing of the graded grid
            let ds = g.s_grid[(i + 1).min(ns - 1)] - g.s_grid[i.max(1) - 1];
            let (mut s, mut th) = (g.s_grid[i], g.theta_grid[idx / ns]);
            let mut v = values[idx];
            let mut step = 0.5;
            while step > 1e-6 {
                let mut moved = false;
                for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                    let (s2, th2) = (s + a * step * ds, th + b * step * dt);
                    let v2 = eval(s2, th2)?;
                    if v2 < v {
                        (s, th, v) = (s2, th2, v2);
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            Ok((s, th.rem_euclid(std::f64::consts::TAU), v))
        })
        .collect()
}

/// Re-evaluates a certificate of an already sampled `T(Δω̃)` at a new `σ`.
pub fn certify_sinogram(grid: Sinogram, refined: Vec<(f64, f64, f64)>, sigma: f64, tol: f64) -> PshCertificate {
    let ns = grid.s_grid.len();
    let (imin, vmin) = grid
        .values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, 0.0));
    let (i_s, i_t) = (imin % ns.max(1), imin / ns.max(1));
    let mut jump = 0.0f64;
    if !grid.values.is_empty() {
        for di in [-1i64, 0, 1] {
            for dj in [-1i64, 0, 1] {
                if let Some(n) = neighbour(&grid, i_s, i_t, di, dj) {
                    jump = jump.max((grid.values[n] - vmin).abs());
                }
            }
        }
    }
    let mut argmin = if grid.values.is_empty() {
        (0.0, 0.0)
    } else {
        (grid.s_grid[i_s], grid.theta_grid[i_t])
    };
    let mut lowest = vmin;
    for &(s, th, v) in &refined {
        if v < lowest {
            lowest = v;
            argmin = (s, th);
        }
    }
    let min_value = lowest + std::f64::consts::PI * sigma;
    PshCertificate {
        sigma,
        min_value,
        tolerance: tol,
        pass: min_value >= -tol,
        argmin,
        grid_tolerance: jump / std::f64::consts::PI,
        refined,
        grid,
    }
}

/// Fills the `T(Δω̃)` sinogram and certifies `T(Δω̃)(s, θ) + πσ ≥ −tol` on it.
pub fn certify(m: &ModifiedWeight, sigma: f64, s: &CertSettings) -> Result<PshCertificate> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma} must be nonnegative")));
    }
    let (grid, refined) = sampled(m, s)?;
    Ok(certify_sinogram(grid, refined, sigma, s.tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `max |T(Δω̃)(s, θ) − Σ_{2^{k+1} ≥ |s|} T(Δω̃_k)(0, θ)|`, over the grid and
    /// the refined local maxima.
    pub max_residual: f64,
    /// `max_residual / C_reg`.
    pub k_hat: f64,
    /// `(s, θ)` of the largest residual.
    pub argmax: (f64, f64),
    /// `(s, max over θ of the grid residual)`.
    pub per_s: Vec<(f64, f64)>,
}

/// Local maxima of the residual polished off the grid.
pub const RESIDUAL_SEEDS: usize = 16;

/// Compares each sample of `T(Δω̃)` with the sum of the `s = 0` values of the
/// pieces whose outer radius reaches `|s|`, then refines the largest local
/// maxima of the difference off the grid.
pub fn residual_bound_check(m: &ModifiedWeight, grid: &Sinogram) -> Result<ResidualReport> {
    let tg = &grid.theta_grid;
    let rows: Vec<Vec<f64>> = m
        .pieces
        .par_iter()
        .map(|f| {
            if f.is_zero() {
                return Ok(vec![0.0; tg.len()]);
            }
            Ok(sinogram(f, &[0.0], tg, &m.quadrature(f), Integrand::Laplacian)?.values)
        })
        .collect::<Result<_>>()?;
    let outer: Vec<f64> = m.base.pieces.iter().map(|p| p.outer()).collect();
    let ns = grid.s_grid.len();
    let mut neg = vec![0.0; grid.values.len()];
    let mut per_s = Vec::with_capacity(ns);
    for (i, &s) in grid.s_grid.iter().enumerate() {
        let mut worst = 0.0f64;
        for j in 0..tg.len() {
            let sum: f64 = rows
                .iter()
                .zip(&outer)
                .filter(|(_, &o)| o >= s.abs())
                .map(|(r, _)| r[j])
                .sum();
            let r = (grid.get(i, j) - sum).abs();
            neg[j * ns + i] = -r;
            worst = worst.max(r);
        }
        per_s.push((s, worst));
    }
    let (mut max_residual, mut argmax) = (0.0, (0.0, 0.0));
    for (idx, &v) in neg.iter().enumerate() {
        if -v > max_residual {
            max_residual = -v;
            argmax = (grid.s_grid[idx % ns], tg[idx / ns]);
        }
    }

    let f = m.field();
    if !f.is_zero() {
        let q = m.quadrature(&f);
        let qs: Vec<_> = m.pieces.iter().map(|p| m.quadrature(p)).collect();
        let refined = refine_minima(grid, &neg, RESIDUAL_SEEDS, |s, th| {
            let mut sum = 0.0;
            for ((p, o), qp) in m.pieces.iter().zip(&outer).zip(&qs) {
                if *o >= s.abs() && !p.is_zero() {
                    sum += xray_of(p, 0.0, th, qp, Integrand::Laplacian)?;
                }
            }
            Ok(-(xray_of(&f, s, th, &q, Integrand::Laplacian)? - sum).abs())
        })?;
        for (s, th, v) in refined {
            if -v > max_residual {
                max_residual = -v;
                argmax = (s, th);
            }
        }
    }
    Ok(ResidualReport {
        max_residual,
        k_hat: if m.c_reg > 0.0 { max_residual / m.c_reg } else { 0.0 },
        argmax,
        per_s,
    })
}

/// Maximum number of bracket doublings before giving up.
pub const MAX_DOUBLINGS: u32 = 10;

/// Smallest grid-passing `σ`, by bisection on `[0, 2(C_gr + K̂ C_reg)/π]`
/// with `K̂` the measured residual constant. Returns the certificate at that `σ`.
pub fn min_sigma(m: &ModifiedWeight, s: &CertSettings) -> Result<PshCertificate> {
    let (grid, refined) = sampled(m, s)?;
    let lowest = refined.iter().map(|r| r.2).fold(grid.min(), f64::min);
    let passes = |sigma: f64| lowest + std::f64::consts::PI * sigma >= -s.tol;
    if passes(0.0) {
        return Ok(certify_sinogram(grid, refined, 0.0, s.tol));
    }
    let k_hat = residual_bound_check(m, &grid)?.k_hat;
    let mut hi = 2.0 * (m.c_gr + k_hat * m.c_reg) / std::f64::consts::PI;
    let mut doublings = 0;
    while !passes(hi) {
        if doublings == MAX_DOUBLINGS {
            return Err(Error::BracketExpansion { doublings, upper: hi });
        }
        hi = 2.0 * hi.max(f64::MIN_POSITIVE);
        doublings += 1;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * (1.0 + hi) {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(certify_sinogram(grid, refined, hi, s.tol))
}

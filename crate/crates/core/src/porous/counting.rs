//! Counting bounds for porous sets: the one-dimensional measure bound, maximal
//! separated nets and the count of net points near a segment.

use serde::{Deserialize, Serialize};

use super::cloud::{lex, Grid, PointCloud2};
use crate::error::{Error, Result};

/// `δ(ν) = log 2 / (log 2 − log(1 − ν))`, the dimension exponent of a `ν`-porous set.
pub fn delta_exponent(nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter(format!("porosity {nu} outside (0, 1)")));
    }
    let l2 = std::f64::consts::LN_2;
    Ok(l2 / (l2 - (1.0 - nu).ln()))
}

/// Union of the closed intervals `[y − δ/2, y + δ/2]`, merged and sorted.
pub fn resolve_1d(points: &[f64], resolution: f64) -> Vec<(f64, f64)> {
    let mut p: Vec<f64> = points.to_vec();
    p.sort_by(f64::total_cmp);
    let h = 0.5 * resolution;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for y in p {
        match out.last_mut() {
            Some(last) if y - h <= last.1 => last.1 = last.1.max(y + h),
            _ => out.push((y - h, y + h)),
        }
    }
    out
}

fn measure_in(ivs: &[(f64, f64)], a: f64, b: f64) -> f64 {
    ivs.iter().map(|&(lo, hi)| (hi.min(b) - lo.max(a)).max(0.0)).sum()
}

/// `min` over windows `[a, a+R]` of the longest stretch of the complement inside
/// the window. Computed by bisection on the value: windows whose every gap clip
/// is `≤ v` exist iff the forbidden sets `(lo + v − R, hi − v)` of the longer
/// gaps leave a point of the line uncovered.
pub fn min_largest_gap(ivs: &[(f64, f64)], r: f64) -> f64 {
    if ivs.is_empty() {
        return r;
    }
    let mut gaps: Vec<(f64, f64)> = vec![(f64::NEG_INFINITY, ivs[0].0)];
    gaps.extend(ivs.windows(2).map(|w| (w[0].1, w[1].0)));
    gaps.push((ivs[ivs.len() - 1].1, f64::INFINITY));
    let feasible = |v: f64| -> bool {
        let mut forb: Vec<(f64, f64)> = gaps
            .iter()
            .filter(|g| g.1 - g.0 > v)
            .map(|g| (g.0 + v - r, g.1 - v))
            .filter(|f| f.0 < f.1)
            .collect();
        forb.sort_by(|a, b| a.0.total_cmp(&b.0));
        // open intervals: the sweep looks for a point not strictly inside any
        let mut reach = f64::NEG_INFINITY;
        for (lo, hi) in forb {
            if lo >= reach && reach > f64::NEG_INFINITY {
                return true;
            }
            reach = reach.max(hi);
        }
        reach < f64::INFINITY
    };
    let (mut lo, mut hi) = (0.0, r);
    if feasible(0.0) {
        return 0.0;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Porosity on intervals of a resolved one-dimensional set, minimised over a
/// geometric ladder of lengths in `[rho0, rho1]` with `steps` points.
pub fn porosity_1d(ivs: &[(f64, f64)], rho0: f64, rho1: f64, steps: usize) -> f64 {
    let steps = steps.max(2);
    (0..steps)
        .map(|i| {
            let r = rho0 * (rho1 / rho0).powf(i as f64 / (steps - 1) as f64);
            min_largest_gap(ivs, r) / r
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureBound {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub ok: bool,
}

/// Measure of the `δ`-resolved set inside `I = [a, b]` against `|I|^δ ρ₀^{1−δ}`,
/// allowing `2·resolution` at each endpoint of `I`.
pub fn measure_bound_check(
    points: &[f64],
    resolution: f64,
    interval: (f64, f64),
    nu: f64,
    rho0: f64,
) -> Result<MeasureBound> {
    let (a, b) = interval;
    if !(b >= a) {
        return Err(Error::InvalidParameter(format!("interval [{a}, {b}]")));
    }
    let d = delta_exponent(nu)?;
    let ivs = resolve_1d(points, resolution);
    let lhs = measure_in(&ivs, a, b);
    let len = b - a;
    let rhs = len.powf(d) * rho0.powf(1.0 - d);
    let slack = 4.0 * resolution;
    Ok(MeasureBound {
        lhs,
        rhs,
        slack,
        ok: lhs <= rhs + slack,
    })
}

/// Greedy maximal `r`-separated subset, scanning in lexicographic order.
pub fn separated_net(points: &PointCloud2, r: f64) -> Result<PointCloud2> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("net radius {r}")));
    }
    let mut grid = Grid::new(r);
    let mut net = Vec::new();
    // the cloud is stored in lexicographic order already
    for &p in points.points() {
        if grid.near_d2(p) > r * r {
            grid.insert(p);
            net.push(p);
        }
    }
    Ok(points.with_points(net))
}

/// Closest pair distance if some pair is within `r`, checked on a hash grid.
pub fn separation_defect(points: &[[f64; 2]], r: f64) -> Option<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(lex);
    let mut grid = Grid::new(r);
    let mut worst: Option<f64> = None;
    for p in sorted {
        let d2 = grid.near_d2(p);
        if d2 <= r * r {
            let d = d2.sqrt();
            worst = Some(worst.map_or(d, |w: f64| w.min(d)));
        }
        grid.insert(p);
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Segment {
    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }

    pub fn distance(&self, p: [f64; 2]) -> f64 {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        let w = [p[0] - self.a[0], p[1] - self.a[1]];
        let l2 = d[0] * d[0] + d[1] * d[1];
        let t = if l2 > 0.0 {
            ((w[0] * d[0] + w[1] * d[1]) / l2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (w[0] - t * d[0]).hypot(w[1] - t * d[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeCount {
    pub count: usize,
    pub bound: f64,
    pub ok: bool,
}

/// Number of points of an `r₀`-separated set within `2r₀` of `τ`, against
/// `(600/ν)(|τ|/r₀)^δ` with `δ = δ(ν/2)`.
pub fn tube_count_check(s: &PointCloud2, tau: &Segment, r0: f64, nu: f64) -> Result<TubeCount> {
    if let Some(dist) = separation_defect(s.points(), r0) {
        return Err(Error::NotSeparated { r: r0, dist });
    }
    let r1 = tau.length();
    if r1 < r0 {
        return Err(Error::InvalidParameter(format!("segment length {r1} below r0 = {r0}")));
    }
    let d = delta_exponent(0.5 * nu)?;
    let count = s.points().iter().filter(|&&p| tau.distance(p) < 2.0 * r0).count();
    let bound = 600.0 / nu * (r1 / r0).powf(d);
    Ok(TubeCount {
        count,
        bound,
        ok: count as f64 <= bound,
    })
}

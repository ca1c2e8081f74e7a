//! Sampling estimators for porosity on lines and on balls.
//!
//! A segment `τ` of length `R` scores `max_{x∈τ} (dist(x, Y) − δ) / R`, the cloud
//! being read as its `δ`-neighbourhood; a ball of diameter `R` scores the maximum
//! over its sampled diameters. Reported porosities are minima over the samples,
//! clamped to `[0, 1/10]`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cloud::{PointCloud2, ScaleRange};
use super::kdtree::KdTree;
use crate::error::{Error, Result};

/// Porosity values are reported up to this cap.
pub const NU_CAP: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorositySettings {
    /// Directions, uniform on `[0, π)`.
    pub n_dirs: usize,
    /// Segment/ball centres per scale, spread evenly through the ordered cloud.
    pub n_offsets: usize,
    /// Sample points along each segment.
    pub samples_per_segment: usize,
    /// Ratio of the geometric scale ladder.
    pub ladder_ratio: f64,
}

impl Default for PorositySettings {
    fn default() -> Self {
        PorositySettings {
            n_dirs: 64,
            n_offsets: 32,
            samples_per_segment: 129,
            ladder_ratio: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Segment,
    Ball,
}

/// A sampled segment or ball together with its best hole fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub center: [f64; 2],
    /// Segment angle; for balls the direction of the best diameter.
    pub angle: f64,
    /// Segment length or ball diameter.
    pub length: f64,
    pub hole: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PorosityReport {
    pub nu_line: f64,
    pub nu_ball: f64,
    /// The worst-scoring segments and balls, ascending.
    pub witness_failures: Vec<Witness>,
}

const N_WITNESSES: usize = 8;

/// `n` centres spread evenly through the lexicographically ordered cloud. The
/// choice is nested: the anchors for `n` are among those for `2n`.
pub fn anchors(y: &PointCloud2, n: usize) -> Vec<[f64; 2]> {
    let pts = y.points();
    if pts.len() <= n {
        return pts.to_vec();
    }
    (0..n).map(|i| pts[i * pts.len() / n]).collect()
}

/// Hole fraction of the segment of length `r` centred at `c` with direction `e`.
fn segment_hole(tree: &KdTree, delta: f64, c: [f64; 2], e: [f64; 2], r: f64, m: usize) -> f64 {
    let reach = NU_CAP * r + delta;
    let cap2 = reach * reach;
    let mut best2 = 0.0f64;
    let m = m.max(2);
    // coarse-to-fine order so that large holes end the scan early
    let mut stride = (m - 1).next_power_of_two();
    let mut seen = vec![false; m];
    while stride >= 1 {
        let mut i = 0;
        while i < m {
            if !seen[i] {
                seen[i] = true;
                let t = r * (i as f64 / (m - 1) as f64 - 0.5);
                let d2 = tree.nearest_d2([c[0] + t * e[0], c[1] + t * e[1]], cap2);
                best2 = best2.max(d2);
                if best2 >= cap2 {
                    return NU_CAP;
                }
            }
            i += stride;
        }
        stride /= 2;
    }
    ((best2.sqrt() - delta) / r).clamp(0.0, NU_CAP)
}

fn check_scales(y: &PointCloud2, scales: &ScaleRange) -> Result<()> {
    let limit = 4.0 * y.resolution();
    if scales.rho0 < limit {
        return Err(Error::ResolutionTooCoarse {
            rho0: scales.rho0,
            limit,
        });
    }
    Ok(())
}

/// Both estimators over one shared set of segments, so `ν_line ≤ ν_ball` by construction.
pub fn estimate_porosity(y: &PointCloud2, scales: &ScaleRange, s: &PorositySettings) -> Result<PorosityReport> {
    if s.n_offsets == 0 {
        return Err(Error::InvalidParameter("n_offsets must be positive".into()));
    }
    estimate_porosity_at(y, scales, s, &anchors(y, s.n_offsets))
}

/// [`estimate_porosity`] with explicit segment/ball centres, e.g. to compare a
/// set with its neighbourhood on the same samples.
pub fn estimate_porosity_at(
    y: &PointCloud2,
    scales: &ScaleRange,
    s: &PorositySettings,
    centres: &[[f64; 2]],
) -> Result<PorosityReport> {
    check_scales(y, scales)?;
    if s.n_dirs == 0 {
        return Err(Error::InvalidParameter("n_dirs must be positive".into()));
    }
    let tree = KdTree::new(y.points());
    let dirs: Vec<(f64, [f64; 2])> = (0..s.n_dirs)
        .map(|i| {
            let a = std::f64::consts::PI * i as f64 / s.n_dirs as f64;
            (a, [a.cos(), a.sin()])
        })
        .collect();
    let cells: Vec<(f64, [f64; 2])> = scales
        .ladder(s.ladder_ratio)
        .into_iter()
        .flat_map(|r| centres.iter().map(move |&c| (r, c)))
        .collect();

    // per cell: worst segment, best diameter
    let per_cell: Vec<(Witness, Witness)> = cells
        .par_iter()
        .map(|&(r, c)| {
            let mut worst = (f64::INFINITY, 0.0);
            let mut best = (f64::NEG_INFINITY, 0.0);
            for &(a, e) in &dirs {
                let h = segment_hole(&tree, y.resolution(), c, e, r, s.samples_per_segment);
                if h < worst.0 {
                    worst = (h, a);
                }
                if h > best.0 {
                    best = (h, a);
                }
            }
            let mk = |kind, (hole, angle): (f64, f64)| Witness {
                kind,
                center: c,
                angle,
                length: r,
                hole,
            };
            (mk(WitnessKind::Segment, worst), mk(WitnessKind::Ball, best))
        })
        .collect();

    let nu_line = per_cell.iter().map(|w| w.0.hole).fold(NU_CAP, f64::min);
    let nu_ball = per_cell.iter().map(|w| w.1.hole).fold(NU_CAP, f64::min);
    let mut wit: Vec<Witness> = per_cell
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .filter(|w| w.hole < NU_CAP)
        .collect();
    wit.sort_by(|a, b| a.hole.total_cmp(&b.hole));
    wit.truncate(N_WITNESSES);
    Ok(PorosityReport {
        nu_line,
        nu_ball,
        witness_failures: wit,
    })
}

/// Porosity on lines with `n_dirs` directions and `n_offsets` positions per scale.
pub fn estimate_line_porosity(
    y: &PointCloud2,
    scales: &ScaleRange,
    n_dirs: usize,
    n_offsets: usize,
) -> Result<PorosityReport> {
    let s = PorositySettings {
        n_dirs,
        n_offsets,
        ..Default::default()
    };
    estimate_porosity(y, scales, &s)
}

/// Porosity on balls with `n_centers` centres per scale.
pub fn estimate_ball_porosity(y: &PointCloud2, scales: &ScaleRange, n_centers: usize) -> Result<PorosityReport> {
    let s = PorositySettings {
        n_offsets: n_centers,
        ..Default::default()
    };
    estimate_porosity(y, scales, &s)
}

/// Largest number of points [`inflate`] will emit.
pub const MAX_INFLATED_POINTS: usize = 20_000_000;

/// `Y + B(0, ρ)` sampled on the lattice of pitch `δ` around every point. `nu` and
/// `rho0` are the certified porosity and lower scale of `Y`.
pub fn inflate(y: &PointCloud2, rho: f64, nu: f64, rho0: f64) -> Result<PointCloud2> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter(format!("inflation radius {rho}")));
    }
    if rho >= nu * rho0 {
        return Err(Error::PorosityDestroyed { rho, limit: nu * rho0 });
    }
    let h = y.resolution();
    let n = (rho / h).floor() as i64;
    let offs: Vec<[f64; 2]> = (-n..=n)
        .flat_map(|i| (-n..=n).map(move |j| [i as f64 * h, j as f64 * h]))
        .filter(|o| o[0].hypot(o[1]) <= rho)
        .collect();
    if offs.len().saturating_mul(y.len()) > MAX_INFLATED_POINTS {
        return Err(Error::InvalidParameter(format!(
            "inflation would emit {} x {} points",
            offs.len(),
            y.len()
        )));
    }
    let pts = y
        .points()
        .iter()
        .flat_map(|p| offs.iter().map(move |o| [p[0] + o[0], p[1] + o[1]]))
        .collect();
    PointCloud2::new(pts, h, y.bound() + rho)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_hole(pts: &[[f64; 2]], delta: f64, c: [f64; 2], e: [f64; 2], r: f64, m: usize) -> f64 {
        (0..m)
            .map(|i| {
                let t = r * (i as f64 / (m - 1) as f64 - 0.5);
                let x = [c[0] + t * e[0], c[1] + t * e[1]];
                let d = pts.iter().map(|p| (p[0] - x[0]).hypot(p[1] - x[1])).fold(f64::INFINITY, f64::min);
                ((d - delta) / r).clamp(0.0, NU_CAP)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn segment_hole_matches_brute_force() {
        let pts: Vec<[f64; 2]> = (0..40).map(|i| [(i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()]).collect();
        let tree = KdTree::new(&pts);
        for k in 0..20 {
            let a = k as f64 * 0.3;
            let e = [a.cos(), a.sin()];
            let c = [0.1 * k as f64 - 1.0, 0.05 * k as f64 - 0.5];
            for &r in &[0.3, 1.0, 2.5] {
                let got = segment_hole(&tree, 0.01, c, e, r, 65);
                let want = brute_hole(&pts, 0.01, c, e, r, 65);
                assert!((got - want).abs() < 1e-14, "{got} vs {want}");
            }
        }
    }

    #[test]
    fn coarse_scales_rejected() {
        let y = PointCloud2::new(vec![[0.0, 0.0]], 0.1, 1.0).unwrap();
        let r = estimate_line_porosity(&y, &ScaleRange::new(0.3, 1.0).unwrap(), 8, 8);
        assert!(matches!(r, Err(Error::ResolutionTooCoarse { .. })));
    }

    #[test]
    fn inflate_zero_is_identity() {
        let y = PointCloud2::new(vec![[0.0, 0.0], [0.5, 0.5]], 0.1, 1.0).unwrap();
        assert_eq!(inflate(&y, 0.0, 0.1, 1.0).unwrap().points(), y.points());
        assert!(matches!(inflate(&y, 0.1, 0.1, 1.0), Err(Error::PorosityDestroyed { .. })));
    }
}

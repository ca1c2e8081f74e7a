//! Test corpora: Cantor products, random hierarchical sets, lines and grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cloud::PointCloud2;
use crate::error::{Error, Result};

/// Generators refuse to emit more points than this.
pub const MAX_POINTS: usize = 1 << 24;

fn check_pitch(pitch: f64, scale: f64) -> Result<()> {
    if !(pitch > 1e-12 * scale) {
        return Err(Error::ResolutionUnderflow(pitch));
    }
    Ok(())
}

fn check_count(n: usize) -> Result<()> {
    if n > MAX_POINTS {
        return Err(Error::InvalidParameter(format!("{n} points exceeds the generator limit {MAX_POINTS}")));
    }
    Ok(())
}

/// Left endpoints of the `2^depth` intervals of the Cantor set on `[0, len]`
/// keeping the two outer pieces of relative length `ratio` at each level.
pub fn cantor_1d(ratio: f64, depth: u32, len: f64) -> Vec<f64> {
    let mut lo = vec![0.0];
    let mut l = len;
    for _ in 0..depth {
        let nl = l * ratio;
        lo = lo.iter().flat_map(|&a| [a, a + l - nl]).collect();
        l = nl;
    }
    lo
}

/// Product of two Cantor sets on `[0, side]`; each of the `4^depth` leaf squares
/// is sampled on a `fill × fill` grid of cell centres.
pub fn cantor_product(ratio: f64, depth: u32, side: f64, fill: usize) -> Result<PointCloud2> {
    if !(ratio > 0.0 && ratio < 0.5) || !(side > 0.0) || fill == 0 {
        return Err(Error::InvalidParameter(format!(
            "cantor_product(ratio = {ratio}, side = {side}, fill = {fill})"
        )));
    }
    let leaf = side * ratio.powi(depth as i32);
    let pitch = leaf / fill as f64;
    check_pitch(pitch, side)?;
    let per_axis = (1usize << depth.min(40)).saturating_mul(fill);
    check_count(per_axis.saturating_mul(per_axis))?;
    let axis: Vec<f64> = cantor_1d(ratio, depth, side)
        .into_iter()
        .flat_map(|a| (0..fill).map(move |j| a + (j as f64 + 0.5) * pitch))
        .collect();
    let pts = axis.iter().flat_map(|&x| axis.iter().map(move |&y| [x, y])).collect();
    PointCloud2::new(pts, pitch, side * std::f64::consts::SQRT_2)
}

/// Random hierarchical set in `[0, 1]²`: every square keeps a random non-empty
/// subset of its four corner subsquares of relative side `(1 − 4ν)/2`, leaving a
/// cross-shaped hole of width `4ν`. Leaves are represented by their centres.
pub fn hierarchical_random(nu: f64, seed: u64, depth: u32) -> Result<PointCloud2> {
    if !(nu > 0.0 && nu < 0.25) {
        return Err(Error::InvalidParameter(format!("hierarchical_random needs 0 < nu < 1/4, got {nu}")));
    }
    let c = 0.5 * (1.0 - 4.0 * nu);
    let leaf = c.powi(depth as i32);
    check_pitch(leaf, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut squares = vec![[0.0f64, 0.0]];
    let mut l = 1.0;
    for _ in 0..depth {
        let nl = l * c;
        let mut next = Vec::with_capacity(squares.len() * 4);
        for &[x, y] in &squares {
            let mut mask: u8 = rng.gen_range(1..16);
            // bias towards denser sets: a second draw may add corners back
            mask |= rng.gen_range(0..16u8) & rng.gen_range(0..16u8);
            for k in 0..4 {
                if mask >> k & 1 == 1 {
                    let ox = if k & 1 == 0 { 0.0 } else { l - nl };
                    let oy = if k & 2 == 0 { 0.0 } else { l - nl };
                    next.push([x + ox, y + oy]);
                }
            }
        }
        check_count(next.len())?;
        squares = next;
        l = nl;
    }
    let pts = squares.iter().map(|s| [s[0] + 0.5 * l, s[1] + 0.5 * l]).collect();
    PointCloud2::new(pts, leaf, std::f64::consts::SQRT_2)
}

/// Points at pitch `pitch` along the segment of length `length` through the
/// origin with direction angle `angle`.
pub fn line_set(angle: f64, length: f64, pitch: f64) -> Result<PointCloud2> {
    if !(length > 0.0) || !(pitch > 0.0) {
        return Err(Error::InvalidParameter(format!("line_set(length = {length}, pitch = {pitch})")));
    }
    check_pitch(pitch, length)?;
    let n = (length / pitch).floor() as usize;
    check_count(n + 1)?;
    let e = [angle.cos(), angle.sin()];
    let pts = (0..=n)
        .map(|i| {
            let t = -0.5 * length + i as f64 * pitch;
            [t * e[0], t * e[1]]
        })
        .collect();
    PointCloud2::new(pts, pitch, 0.5 * length)
}

/// Square lattice of pitch `pitch` inside the closed disc of radius `radius`.
pub fn grid_fill(pitch: f64, radius: f64) -> Result<PointCloud2> {
    if !(pitch > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidParameter(format!("grid_fill(pitch = {pitch}, radius = {radius})")));
    }
    check_pitch(pitch, radius)?;
    let n = (radius / pitch).floor() as i64;
    check_count(((2 * n + 1) * (2 * n + 1)) as usize)?;
    let pts = (-n..=n)
        .flat_map(|i| (-n..=n).map(move |j| [i as f64 * pitch, j as f64 * pitch]))
        .filter(|p| p[0].hypot(p[1]) <= radius)
        .collect();
    PointCloud2::new(pts, pitch, radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cantor_counts() {
        assert_eq!(cantor_1d(1.0 / 3.0, 3, 1.0).len(), 8);
        let c = cantor_product(1.0 / 3.0, 1, 1.0, 1).unwrap();
        assert_eq!(c.len(), 4);
        assert!((c.resolution() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(cantor_product(0.3, 40, 1.0, 1), Err(Error::ResolutionUnderflow(_))));
    }

    #[test]
    fn hierarchical_is_reproducible() {
        let a = hierarchical_random(0.05, 9, 5).unwrap();
        let b = hierarchical_random(0.05, 9, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, hierarchical_random(0.05, 10, 5).unwrap());
    }

    #[test]
    fn line_is_collinear() {
        let l = line_set(0.4, 2.0, 0.01).unwrap();
        let n = [-(0.4f64).sin(), 0.4f64.cos()];
        assert!(l.points().iter().all(|p| (p[0] * n[0] + p[1] * n[1]).abs() < 1e-12));
        assert_eq!(l.len(), 201);
    }
}

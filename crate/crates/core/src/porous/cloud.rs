use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lengths `ρ₀ ≤ ρ₁` between which porosity is asserted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub rho0: f64,
    pub rho1: f64,
}

impl ScaleRange {
    pub fn new(rho0: f64, rho1: f64) -> Result<Self> {
        if !(rho0 > 0.0 && rho0 <= rho1 && rho1.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale range [{rho0}, {rho1}]")));
        }
        Ok(ScaleRange { rho0, rho1 })
    }

    /// `ρ₀, 2ρ₀, 4ρ₀, …` up to `ρ₁`, with `ρ₁` appended when the ladder misses it.
    pub fn ladder(&self, ratio: f64) -> Vec<f64> {
        let mut out = vec![self.rho0];
        let mut r = self.rho0;
        while r * ratio <= self.rho1 * (1.0 + 1e-12) {
            r *= ratio;
            out.push(r.min(self.rho1));
        }
        if *out.last().unwrap() < self.rho1 * (1.0 - 1e-12) {
            out.push(self.rho1);
        }
        out
    }
}

/// A planar set sampled at pitch `resolution`; every point lies in `B(0, bound)`.
/// Points are kept in lexicographic order, no two closer than `resolution / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloudRepr")]
pub struct PointCloud2 {
    points: Vec<[f64; 2]>,
    resolution: f64,
    bound: f64,
}

#[derive(Deserialize)]
struct CloudRepr {
    points: Vec<[f64; 2]>,
    resolution: f64,
    bound: f64,
}

impl TryFrom<CloudRepr> for PointCloud2 {
    type Error = Error;
    fn try_from(r: CloudRepr) -> Result<Self> {
        PointCloud2::new(r.points, r.resolution, r.bound)
    }
}

pub(crate) fn lex(a: &[f64; 2], b: &[f64; 2]) -> std::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Spatial hash with square cells of side `cell`.
pub(crate) struct Grid {
    cell: f64,
    map: HashMap<(i64, i64), Vec<[f64; 2]>>,
}

impl Grid {
    pub fn new(cell: f64) -> Self {
        Grid {
            cell,
            map: HashMap::new(),
        }
    }

    fn key(&self, p: [f64; 2]) -> (i64, i64) {
        ((p[0] / self.cell).floor() as i64, (p[1] / self.cell).floor() as i64)
    }

    pub fn insert(&mut self, p: [f64; 2]) {
        let k = self.key(p);
        self.map.entry(k).or_default().push(p);
    }

    /// Smallest squared distance from `p` to a stored point within one cell.
    pub fn near_d2(&self, p: [f64; 2]) -> f64 {
        let (i, j) = self.key(p);
        let mut best = f64::INFINITY;
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(v) = self.map.get(&(i + di, j + dj)) {
                    for q in v {
                        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
                        best = best.min(dx * dx + dy * dy);
                    }
                }
            }
        }
        best
    }
}

impl PointCloud2 {
    pub fn new(mut points: Vec<[f64; 2]>, resolution: f64, bound: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(Error::InvalidParameter(format!("resolution {resolution}")));
        }
        if !(bound > 0.0 && bound.is_finite()) {
            return Err(Error::InvalidParameter(format!("bound {bound}")));
        }
        for p in &points {
            if !(p[0].is_finite() && p[1].is_finite()) || p[0].hypot(p[1]) > bound * (1.0 + 1e-12) {
                return Err(Error::Domain { x: p[0], y: p[1], bound });
            }
        }
        points.sort_by(lex);
        let half = 0.5 * resolution;
        let mut grid = Grid::new(half);
        let mut kept = Vec::with_capacity(points.len());
        for p in points {
            if grid.near_d2(p) < half * half {
                continue;
            }
            grid.insert(p);
            kept.push(p);
        }
        Ok(PointCloud2 {
            points: kept,
            resolution,
            bound,
        })
    }

    pub fn empty(resolution: f64, bound: f64) -> Result<Self> {
        Self::new(Vec::new(), resolution, bound)
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dilation by `factor > 0` (points, pitch and bound).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let pts = self.points.iter().map(|p| [p[0] * factor, p[1] * factor]).collect();
        Self::new(pts, self.resolution * factor, self.bound * factor)
    }

    /// Points with `inner <= |x| <= outer`, same metadata.
    pub fn annulus(&self, inner: f64, outer: f64) -> PointCloud2 {
        let points = self
            .points
            .iter()
            .copied()
            .filter(|p| {
                let r = p[0].hypot(p[1]);
                inner <= r && r <= outer
            })
            .collect();
        PointCloud2 { points, ..*self }
    }

    /// Subset of the points, already ordered and separated.
    pub(crate) fn with_points(&self, points: Vec<[f64; 2]>) -> PointCloud2 {
        PointCloud2 { points, ..*self }
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x1", "x2"]).map_err(csv_err)?;
        for p in &self.points {
            w.serialize((p[0], p[1])).map_err(csv_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.to_string()))?)
            .map_err(|e| Error::Parse(e.to_string()))?;
        Ok(format!("# resolution={:e},bound={:e}\n{body}", self.resolution, self.bound))
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        let (head, body) = s.split_once('\n').unwrap_or((s, ""));
        let meta = head
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing '# resolution=…,bound=…' header".into()))?;
        let (mut res, mut bound) = (None, None);
        for kv in meta.split(',') {
            let (k, v) = kv
                .trim()
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {kv:?}")))?;
            let v: f64 = v.trim().parse().map_err(|_| Error::Parse(format!("bad number {v:?}")))?;
            match k.trim() {
                "resolution" => res = Some(v),
                "bound" => bound = Some(v),
                _ => {}
            }
        }
        let (res, bound) = match (res, bound) {
            (Some(r), Some(b)) => (r, b),
            _ => return Err(Error::Parse("header needs resolution and bound".into())),
        };
        let mut rd = csv::Reader::from_reader(body.as_bytes());
        let mut pts = Vec::new();
        for rec in rd.deserialize() {
            let (x, y): (f64, f64) = rec.map_err(csv_err)?;
            pts.push([x, y]);
        }
        Self::new(pts, res, bound)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

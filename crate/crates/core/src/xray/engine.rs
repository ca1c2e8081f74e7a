use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bumpcalc::{Jet1, SmoothField, Term};
use crate::error::{Error, Result};
use crate::quad::{self, Rule};

/// Line quadrature settings. Each term is integrated over its own chord with
/// a composite rule whose step resolves the term's feature scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineQuadrature {
    /// Nodes per feature length of a term.
    pub points_per_feature: f64,
    /// Minimum panel count per chord.
    pub min_points: usize,
    /// Integration half-width; must cover the field's support radius.
    pub extent: f64,
    pub rule: Rule,
}

impl LineQuadrature {
    pub const DEFAULT_POINTS_PER_FEATURE: f64 = 96.0;

    pub fn for_field(f: &SmoothField) -> Self {
        LineQuadrature {
            points_per_feature: Self::DEFAULT_POINTS_PER_FEATURE,
            min_points: 16,
            extent: f.support_radius(),
            rule: Rule::Trapezoid,
        }
    }

    /// Same settings with `factor` times as many nodes.
    pub fn refined(&self, factor: f64) -> Self {
        LineQuadrature {
            points_per_feature: self.points_per_feature * factor,
            min_points: (self.min_points as f64 * factor).ceil() as usize,
            ..*self
        }
    }

    /// Step used for the finest term of `f`.
    pub fn step(&self, f: &SmoothField) -> f64 {
        let feat = f.feature();
        if feat.is_finite() {
            feat / self.points_per_feature
        } else {
            0.0
        }
    }

    fn panels(&self, len: f64, feature: f64) -> usize {
        let n = (len * self.points_per_feature / feature).ceil() as usize;
        n.max(self.min_points)
    }

    fn check(&self, f: &SmoothField) -> Result<()> {
        if self.extent < f.support_radius() {
            return Err(Error::TruncatedSupport {
                extent: self.extent,
                support: f.support_radius(),
            });
        }
        Ok(())
    }
}

/// Quantity integrated along lines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "arg", rename_all = "snake_case")]
pub enum Integrand {
    Value,
    Laplacian,
    /// `V_γ²` with the given angle.
    Directional(f64),
    /// Hessian entry 0 = xx, 1 = xy, 2 = yy.
    Hessian(usize),
}

impl Integrand {
    #[inline]
    fn eval(&self, t: &Term, x: [f64; 2]) -> f64 {
        match *self {
            Integrand::Value => t.value(x),
            Integrand::Laplacian => t.hess(x).laplacian(),
            Integrand::Directional(g) => t.hess(x).directional(g),
            Integrand::Hessian(i) => t.hess(x).h[i],
        }
    }
}

#[inline]
pub fn unit(theta: f64) -> [f64; 2] {
    let (s, c) = theta.sin_cos();
    [c, s]
}

/// Foot point and direction of the line `{t e(θ) + s e(θ)^⊥}`.
#[inline]
pub fn line(s: f64, theta: f64) -> ([f64; 2], [f64; 2]) {
    let (sn, c) = theta.sin_cos();
    ([-s * sn, s * c], [c, sn])
}

#[inline]
fn misses(t: &Term, p: [f64; 2], e: [f64; 2]) -> bool {
    let (c, r) = t.bound();
    let perp = (c[0] - p[0]) * -e[1] + (c[1] - p[1]) * e[0];
    perp.abs() >= r
}

/// Integral of `w(t) · g(term, p + t e)` summed over the terms of `f`, each on its own chord.
pub fn line_integral_with<T>(
    f: &SmoothField,
    p: [f64; 2],
    e: [f64; 2],
    q: &LineQuadrature,
    mut g: impl FnMut(&Term, f64, [f64; 2]) -> T,
) -> T
where
    T: Copy + Default + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
{
    let mut total = T::default();
    for term in f.terms() {
        if misses(term, p, e) {
            continue;
        }
        for &(a, b) in term.chord(p, e).as_slice() {
            let n = q.panels(b - a, term.feature());
            total += quad::composite_gen(q.rule, a, b, n, |t| g(term, t, [p[0] + t * e[0], p[1] + t * e[1]]));
        }
    }
    total
}

/// `∫ I[f](p + t e) dt` for a general line through `p` with unit direction `e`.
pub fn line_integral(f: &SmoothField, p: [f64; 2], e: [f64; 2], q: &LineQuadrature, what: Integrand) -> Result<f64> {
    q.check(f)?;
    Ok(line_integral_with(f, p, e, q, |term, _, x| what.eval(term, x)))
}

/// X-ray transform `Tf(s, θ) = ∫ f(t cosθ − s sinθ, t sinθ + s cosθ) dt`.
pub fn xray(f: &SmoothField, s: f64, theta: f64, q: &LineQuadrature) -> Result<f64> {
    xray_of(f, s, theta, q, Integrand::Value)
}

/// X-ray transform of a derived quantity of `f`.
pub fn xray_of(f: &SmoothField, s: f64, theta: f64, q: &LineQuadrature, what: Integrand) -> Result<f64> {
    let (p, e) = line(s, theta);
    line_integral(f, p, e, q, what)
}

/// X-ray transforms of the three Hessian entries `[xx, xy, yy]` in one sweep.
pub fn xray_hessian(f: &SmoothField, s: f64, theta: f64, q: &LineQuadrature) -> Result<[f64; 3]> {
    q.check(f)?;
    let (p, e) = line(s, theta);
    let v = line_integral_with(f, p, e, q, |term, _, x| {
        let h = term.hess(x);
        Jet1([h.h[0], h.h[1], h.h[2], 0.0])
    });
    Ok([v.0[0], v.0[1], v.0[2]])
}

fn check_origin(f: &SmoothField, theta: f64) -> Result<()> {
    let e = unit(theta);
    for term in f.terms() {
        for &(a, b) in term.chord([0.0, 0.0], e).as_slice() {
            if a < 0.0 && b > 0.0 {
                return Err(Error::SingularIntegrand { theta });
            }
        }
    }
    Ok(())
}

#[inline]
fn over_t2(v: f64, t: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v / (t * t)
    }
}

/// `T(|x|^{-2} f)(0, θ) = ∫ t^{-2} f(t cosθ, t sinθ) dt` for fields vanishing near the origin.
pub fn radial_xray_zero(f: &SmoothField, theta: f64, q: &LineQuadrature) -> Result<f64> {
    q.check(f)?;
    check_origin(f, theta)?;
    let e = unit(theta);
    Ok(line_integral_with(f, [0.0, 0.0], e, q, |term, t, x| over_t2(term.value(x), t)))
}

/// Jet in `θ` of [`radial_xray_zero`]: value and the first three angular derivatives,
/// obtained by differentiating under the integral along the rotating ray.
pub fn radial_xray_zero_jet(f: &SmoothField, theta: f64, q: &LineQuadrature) -> Result<Jet1> {
    q.check(f)?;
    check_origin(f, theta)?;
    let (sn, c) = theta.sin_cos();
    // e(θ+ε) − e(θ) up to ε³
    let d1 = Jet1([0.0, -sn, -0.5 * c, sn / 6.0]);
    let d2 = Jet1([0.0, c, -0.5 * sn, -c / 6.0]);
    Ok(line_integral_with(f, [0.0, 0.0], [c, sn], q, |term, t, x| {
        let j = term.jet(x);
        if j.is_zero() {
            return Jet1::ZERO;
        }
        j.along(d1.scale(t), d2.scale(t)).scale(1.0 / (t * t))
    }))
}

/// Sampled X-ray transform. `values[i_theta * s_grid.len() + i_s]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sinogram {
    pub s_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub quadrature_step: f64,
}

/// Symmetric uniform offsets in `[-s_max, s_max]` and uniform angles on `[0, 2π)`.
pub fn uniform_grids(n_s: usize, n_theta: usize, s_max: f64) -> (Vec<f64>, Vec<f64>) {
    let s = (0..n_s)
        .map(|i| if n_s == 1 { 0.0 } else { -s_max + 2.0 * s_max * i as f64 / (n_s - 1) as f64 })
        .collect();
    let t = (0..n_theta)
        .map(|j| std::f64::consts::TAU * j as f64 / n_theta as f64)
        .collect();
    (s, t)
}

impl Sinogram {
    pub fn get(&self, i_s: usize, i_theta: usize) -> f64 {
        self.values[i_theta * self.s_grid.len() + i_s]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Location `(s, θ, value)` of the smallest entry.
    pub fn argmin(&self) -> Option<(f64, f64, f64)> {
        let ns = self.s_grid.len();
        self.values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &v)| (self.s_grid[i % ns], self.theta_grid[i / ns], v))
    }

    /// Largest `|T(−s, θ) − T(s, θ+π)|` over the grid, when the grid is symmetric
    /// in `s` and has an even number of uniform angles.
    pub fn symmetry_defect(&self) -> Option<f64> {
        let (ns, nt) = (self.s_grid.len(), self.theta_grid.len());
        if nt % 2 != 0 {
            return None;
        }
        for i in 0..ns {
            if (self.s_grid[i] + self.s_grid[ns - 1 - i]).abs() > 1e-12 * (1.0 + self.s_grid[i].abs()) {
                return None;
            }
        }
        let mut worst = 0.0f64;
        for j in 0..nt {
            let jp = (j + nt / 2) % nt;
            for i in 0..ns {
                worst = worst.max((self.get(ns - 1 - i, j) - self.get(i, jp)).abs());
            }
        }
        Some(worst)
    }

    /// CSV matrix: one row per angle, one column per offset.
    pub fn to_csv(&self) -> String {
        let ns = self.s_grid.len();
        let mut out = String::new();
        for row in self.values.chunks(ns) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// JSON header with the grids and quadrature step.
    pub fn header_json(&self) -> serde_json::Value {
        serde_json::json!({
            "s_grid": self.s_grid,
            "theta_grid": self.theta_grid,
            "quadrature_step": self.quadrature_step,
            "layout": "rows = theta, columns = s",
        })
    }
}

/// Fills a sinogram of `what` over the given grids, in parallel over angles.
pub fn sinogram(
    f: &SmoothField,
    s_grid: &[f64],
    theta_grid: &[f64],
    q: &LineQuadrature,
    what: Integrand,
) -> Result<Sinogram> {
    q.check(f)?;
    let rows: Vec<Vec<f64>> = theta_grid
        .par_iter()
        .map(|&th| {
            s_grid
                .iter()
                .map(|&s| {
                    let (p, e) = line(s, th);
                    line_integral_with(f, p, e, q, |term, _, x| what.eval(term, x))
                })
                .collect()
        })
        .collect();
    Ok(Sinogram {
        s_grid: s_grid.to_vec(),
        theta_grid: theta_grid.to_vec(),
        values: rows.concat(),
        quadrature_step: q.step(f),
    })
}

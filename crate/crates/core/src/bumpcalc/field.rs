//! Compactly supported planar fields built from products of primitives.

use serde::{Deserialize, Serialize};

use super::angular::AngularProfile;
use super::jet::{Hess2, Jet1, Jet2, MultiIndex};
use super::profile::RadialShape;
use crate::error::{Error, Result};

/// A factor of a term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Primitive {
    /// `shape(|x - center|^2)`.
    Radial { center: [f64; 2], shape: RadialShape },
    /// `profile(arg(x) + phase)`; must be paired with a radial factor centred at the
    /// origin whose support excludes a neighbourhood of the origin.
    Angular { profile: AngularProfile, phase: f64 },
}

/// Up to four disjoint open intervals on a line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intervals {
    len: usize,
    items: [(f64, f64); 4],
}

impl Intervals {
    pub const EMPTY: Intervals = Intervals {
        len: 0,
        items: [(0.0, 0.0); 4],
    };

    pub fn whole() -> Self {
        let mut r = Intervals::EMPTY;
        r.push(f64::NEG_INFINITY, f64::INFINITY);
        r
    }

    fn push(&mut self, a: f64, b: f64) {
        if b > a {
            assert!(self.len < 4, "interval set overflow");
            self.items[self.len] = (a, b);
            self.len += 1;
        }
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.items[..self.len]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn intersect(&self, other: &Intervals) -> Intervals {
        let mut r = Intervals::EMPTY;
        for &(a, b) in self.as_slice() {
            for &(c, d) in other.as_slice() {
                r.push(a.max(c), b.min(d));
            }
        }
        r
    }
}

/// Parameter interval of the line `p + t e` (with `|e| = 1`) inside the open annulus
/// `inner < |x - c| < outer`.
pub fn line_annulus(p: [f64; 2], e: [f64; 2], c: [f64; 2], inner: f64, outer: f64) -> Intervals {
    let d = [p[0] - c[0], p[1] - c[1]];
    let tc = -(d[0] * e[0] + d[1] * e[1]);
    let dist2 = (d[0] * d[0] + d[1] * d[1] - tc * tc).max(0.0);
    let mut r = Intervals::EMPTY;
    let ho2 = outer * outer - dist2;
    if ho2 <= 0.0 {
        return r;
    }
    let ho = ho2.sqrt();
    let hi2 = inner * inner - dist2;
    if inner <= 0.0 || hi2 <= 0.0 {
        r.push(tc - ho, tc + ho);
    } else {
        let hi = hi2.sqrt();
        r.push(tc - ho, tc - hi);
        r.push(tc + hi, tc + ho);
    }
    r
}

/// `amplitude × Π factors`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TermRepr", into = "TermRepr")]
pub struct Term {
    amplitude: f64,
    factors: Vec<Primitive>,
    // bounding disc of the support and quadrature scale, derived
    bound_center: [f64; 2],
    bound_radius: f64,
    feature: f64,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    amplitude: f64,
    factors: Vec<Primitive>,
}

impl TryFrom<TermRepr> for Term {
    type Error = Error;
    fn try_from(r: TermRepr) -> Result<Term> {
        Term::new(r.amplitude, r.factors)
    }
}

impl From<Term> for TermRepr {
    fn from(t: Term) -> TermRepr {
        TermRepr {
            amplitude: t.amplitude,
            factors: t.factors,
        }
    }
}

impl Term {
    pub fn new(amplitude: f64, factors: Vec<Primitive>) -> Result<Term> {
        if !amplitude.is_finite() {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        let mut bound: Option<([f64; 2], f64)> = None;
        let mut feature = f64::INFINITY;
        let mut guard = 0.0f64;
        let mut angular = None;
        for f in &factors {
            match f {
                Primitive::Radial { center, shape } => {
                    if !shape.validate() {
                        return Err(Error::InvalidParameter(format!("invalid radial shape {shape:?}")));
                    }
                    let (inner, outer) = shape.support();
                    if bound.map_or(true, |(_, r)| outer < r) {
                        bound = Some((*center, outer));
                    }
                    feature = feature.min(shape.feature());
                    if *center == [0.0, 0.0] {
                        guard = guard.max(inner);
                    }
                }
                Primitive::Angular { profile, .. } => {
                    if !profile.validate() {
                        return Err(Error::InvalidParameter("invalid angular profile".into()));
                    }
                    angular = Some(angular.map_or(profile.feature(), |a: f64| a.min(profile.feature())));
                }
            }
        }
        let (bound_center, bound_radius) =
            bound.ok_or_else(|| Error::InvalidParameter("term without a radial factor is not compactly supported".into()))?;
        if let Some(a) = angular {
            if guard <= 0.0 {
                return Err(Error::InvalidParameter(
                    "angular factor needs an origin-centred annular factor".into(),
                ));
            }
            feature = feature.min(a * guard);
        }
        Ok(Term {
            amplitude,
            factors,
            bound_center,
            bound_radius,
            feature,
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn factors(&self) -> &[Primitive] {
        &self.factors
    }

    /// Disc `(center, radius)` containing the support.
    pub fn bound(&self) -> ([f64; 2], f64) {
        (self.bound_center, self.bound_radius)
    }

    /// Length scale on which the term varies.
    pub fn feature(&self) -> f64 {
        self.feature
    }

    pub fn scaled(&self, a: f64) -> Term {
        let mut t = self.clone();
        t.amplitude *= a;
        t
    }

    #[inline]
    fn outside(&self, x: [f64; 2]) -> bool {
        let d0 = x[0] - self.bound_center[0];
        let d1 = x[1] - self.bound_center[1];
        d0 * d0 + d1 * d1 >= self.bound_radius * self.bound_radius
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        if self.outside(x) {
            return 0.0;
        }
        let mut v = self.amplitude;
        for f in &self.factors {
            v *= match f {
                Primitive::Radial { center, shape } => {
                    let d = [x[0] - center[0], x[1] - center[1]];
                    shape.value_u(d[0] * d[0] + d[1] * d[1])
                }
                Primitive::Angular { profile, phase } => profile.value(x[1].atan2(x[0]) + phase),
            };
            if v == 0.0 {
                return 0.0;
            }
        }
        v
    }

    pub fn hess(&self, x: [f64; 2]) -> Hess2 {
        if self.outside(x) {
            return Hess2::ZERO;
        }
        let mut acc: Option<Hess2> = None;
        for f in &self.factors {
            let h = match f {
                Primitive::Radial { center, shape } => {
                    let u = Hess2::dist2(x, *center);
                    let j = shape.jet_u(u.v);
                    if j == Jet1::ZERO {
                        return Hess2::ZERO;
                    }
                    u.then(j)
                }
                Primitive::Angular { profile, phase } => angle_hess(x).then(profile.jet(x[1].atan2(x[0]) + phase)),
            };
            acc = Some(match acc {
                None => h,
                Some(a) => a * h,
            });
        }
        acc.map_or(Hess2::ZERO, |a| a.scale(self.amplitude))
    }

    pub fn jet(&self, x: [f64; 2]) -> Jet2 {
        if self.outside(x) {
            return Jet2::ZERO;
        }
        let mut acc: Option<Jet2> = None;
        for f in &self.factors {
            let j = match f {
                Primitive::Radial { center, shape } => {
                    let u = Jet2::dist2(x, *center);
                    let j = shape.jet_u(u.value());
                    if j == Jet1::ZERO {
                        return Jet2::ZERO;
                    }
                    u.then(j)
                }
                Primitive::Angular { profile, phase } => angle_jet(x).then(profile.jet(x[1].atan2(x[0]) + phase)),
            };
            acc = Some(match acc {
                None => j,
                Some(a) => a * j,
            });
        }
        acc.map_or(Jet2::ZERO, |a| a.scale(self.amplitude))
    }

    /// Parameter intervals of `p + t e` on which the term may be nonzero.
    pub fn chord(&self, p: [f64; 2], e: [f64; 2]) -> Intervals {
        let mut r = Intervals::whole();
        for f in &self.factors {
            if let Primitive::Radial { center, shape } = f {
                let (inner, outer) = shape.support();
                r = r.intersect(&line_annulus(p, e, *center, inner, outer));
                if r.is_empty() {
                    break;
                }
            }
        }
        r
    }
}

/// Jet of `atan2(x2, x1)` (minus its value) at `x`.
fn angle_jet(x: [f64; 2]) -> Jet2 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    // w = h / z0 as a complex jet, θ - θ0 = Im log(1 + w)
    let mut wr = Jet2::ZERO;
    wr.0[1] = x[0] / r2;
    wr.0[2] = x[1] / r2;
    let mut wi = Jet2::ZERO;
    wi.0[1] = -x[1] / r2;
    wi.0[2] = x[0] / r2;
    let wrwi = wr * wi;
    let mut t = wi - wrwi + wr * wrwi - (wi * wi * wi).scale(1.0 / 3.0);
    t.0[0] = x[1].atan2(x[0]);
    t
}

fn angle_hess(x: [f64; 2]) -> Hess2 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    let r4 = r2 * r2;
    Hess2 {
        v: x[1].atan2(x[0]),
        g: [-x[1] / r2, x[0] / r2],
        h: [
            2.0 * x[0] * x[1] / r4,
            (x[1] * x[1] - x[0] * x[0]) / r4,
            -2.0 * x[0] * x[1] / r4,
        ],
    }
}

/// A finite sum of terms. Evaluates to exactly zero outside `support_radius`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct SmoothField {
    terms: Vec<Term>,
    support_radius: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    terms: Vec<Term>,
    #[serde(default)]
    support_radius: f64,
}

impl TryFrom<FieldRepr> for SmoothField {
    type Error = Error;
    fn try_from(r: FieldRepr) -> Result<SmoothField> {
        Ok(SmoothField::new(r.terms))
    }
}

impl From<SmoothField> for FieldRepr {
    fn from(f: SmoothField) -> FieldRepr {
        FieldRepr {
            terms: f.terms,
            support_radius: f.support_radius,
        }
    }
}

impl SmoothField {
    pub fn new(terms: Vec<Term>) -> SmoothField {
        let support_radius = terms
            .iter()
            .map(|t| {
                let (c, r) = t.bound();
                c[0].hypot(c[1]) + r
            })
            .fold(0.0, f64::max);
        SmoothField {
            terms,
            support_radius,
        }
    }

    pub fn zero() -> SmoothField {
        SmoothField::default()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Concatenates the terms of two fields.
    pub fn plus(&self, other: &SmoothField) -> SmoothField {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        SmoothField::new(t)
    }

    pub fn scaled(&self, a: f64) -> SmoothField {
        SmoothField::new(self.terms.iter().map(|t| t.scaled(a)).collect())
    }

    /// Smallest feature scale over all terms (infinite for the zero field).
    pub fn feature(&self) -> f64 {
        self.terms.iter().map(Term::feature).fold(f64::INFINITY, f64::min)
    }

    fn inside(&self, x: [f64; 2]) -> bool {
        x[0] * x[0] + x[1] * x[1] < self.support_radius * self.support_radius
    }

    pub fn value(&self, x: [f64; 2]) -> f64 {
        if !self.inside(x) {
            return 0.0;
        }
        self.terms.iter().map(|t| t.value(x)).sum()
    }

    pub fn hess(&self, x: [f64; 2]) -> Hess2 {
        if !self.inside(x) {
            return Hess2::ZERO;
        }
        self.terms.iter().fold(Hess2::ZERO, |a, t| a + t.hess(x))
    }

    pub fn jet(&self, x: [f64; 2]) -> Jet2 {
        if !self.inside(x) {
            return Jet2::ZERO;
        }
        self.terms.iter().fold(Jet2::ZERO, |a, t| a + t.jet(x))
    }

    /// Rotated copy `x ↦ f(R_γ x)`.
    pub fn rotated(&self, gamma: f64) -> SmoothField {
        // f(R_γ x) has centres R_{-γ} c and angular phase shifted by γ
        let (s, c) = gamma.sin_cos();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let factors = t
                    .factors
                    .iter()
                    .map(|f| match f {
                        Primitive::Radial { center, shape } => Primitive::Radial {
                            center: [c * center[0] + s * center[1], -s * center[0] + c * center[1]],
                            shape: shape.clone(),
                        },
                        Primitive::Angular { profile, phase } => Primitive::Angular {
                            profile: profile.clone(),
                            phase: phase + gamma,
                        },
                    })
                    .collect();
                Term::new(t.amplitude, factors).expect("rotation preserves validity")
            })
            .collect();
        SmoothField::new(terms)
    }
}

/// `∂^γ f(x)` from closed forms.
pub fn eval(f: &SmoothField, x: [f64; 2], g: MultiIndex) -> Result<f64> {
    if g.order() > 3 {
        return Err(Error::UnsupportedOrder(g.order()));
    }
    Ok(match g.order() {
        0 => f.value(x),
        1 | 2 => {
            let h = f.hess(x);
            match (g.0, g.1) {
                (1, 0) => h.g[0],
                (0, 1) => h.g[1],
                (2, 0) => h.h[0],
                (1, 1) => h.h[1],
                _ => h.h[2],
            }
        }
        _ => f.jet(x).partial(g),
    })
}

pub fn laplacian(f: &SmoothField, x: [f64; 2]) -> f64 {
    f.hess(x).laplacian()
}

/// `V_γ² f(x)` with `V_γ = cos γ ∂₁ + sin γ ∂₂`.
pub fn directional_second(f: &SmoothField, x: [f64; 2], gamma: f64) -> f64 {
    f.hess(x).directional(gamma)
}

//! One-dimensional building blocks: the flat step, the mollifier and the
//! radial shapes built from them.

use serde::{Deserialize, Serialize};

use super::jet::Jet1;

// below this exp(-1/t) is < 1e-300 and all its derivatives are negligible
const FLAT_EPS: f64 = 1.0 / 690.0;

fn flat_jet(t: f64) -> Jet1 {
    if t <= FLAT_EPS {
        return Jet1::ZERO;
    }
    (-Jet1::var(t).recip()).exp()
}

fn flat(t: f64) -> f64 {
    if t <= FLAT_EPS {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// `S(t) = g(t) / (g(t) + g(1-t))` with `g(t) = exp(-1/t)`: zero for `t <= 0`,
/// one for `t >= 1`, smooth in between.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = flat(t);
    a / (a + flat(1.0 - t))
}

/// Jet of [`smooth_step`] at `t`.
pub fn smooth_step_jet(t: f64) -> Jet1 {
    if t <= 0.0 {
        return Jet1::ZERO;
    }
    if t >= 1.0 {
        return Jet1::constant(1.0);
    }
    let a = flat_jet(t);
    let b = flat_jet(1.0 - t).chain_linear(-1.0);
    a * (a + b).recip()
}

/// Standard mollifier `e * exp(-1/(1-u))` in the squared radius `u`, peak 1 at `u = 0`.
pub fn mollifier_u(u: f64) -> f64 {
    if u >= 1.0 {
        return 0.0;
    }
    std::f64::consts::E * flat(1.0 - u)
}

pub fn mollifier_u_jet(u: f64) -> Jet1 {
    if u >= 1.0 {
        return Jet1::ZERO;
    }
    flat_jet(1.0 - u).chain_linear(-1.0).scale(std::f64::consts::E)
}

/// Radial profile as a function of the squared distance `u = |x - c|^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RadialShape {
    /// `e * exp(-1/(1 - |x|^2/R^2))`, support the open ball of radius `radius`.
    Mollifier { radius: f64 },
    /// Equal to 1 on the ball of radius `inner`, 0 outside `outer`.
    Plateau { inner: f64, outer: f64 },
    /// Rises on `[r0, r1]`, equals 1 on `[r1, r2]`, falls on `[r2, r3]`.
    Annulus { r0: f64, r1: f64, r2: f64, r3: f64 },
}

impl RadialShape {
    pub fn validate(&self) -> bool {
        match *self {
            RadialShape::Mollifier { radius } => radius > 0.0 && radius.is_finite(),
            RadialShape::Plateau { inner, outer } => 0.0 <= inner && inner < outer && outer.is_finite(),
            RadialShape::Annulus { r0, r1, r2, r3 } => {
                0.0 <= r0 && r0 < r1 && r1 <= r2 && r2 < r3 && r3.is_finite()
            }
        }
    }

    /// Open support as radii `(inner, outer)`; the shape vanishes for `r <= inner` and `r >= outer`.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            RadialShape::Mollifier { radius } => (0.0, radius),
            RadialShape::Plateau { outer, .. } => (0.0, outer),
            RadialShape::Annulus { r0, r3, .. } => (r0, r3),
        }
    }

    /// Length scale on which the profile varies.
    pub fn feature(&self) -> f64 {
        match *self {
            RadialShape::Mollifier { radius } => 0.5 * radius,
            RadialShape::Plateau { inner, outer } => outer - inner,
            RadialShape::Annulus { r0, r1, r2, r3 } => (r1 - r0).min(r3 - r2),
        }
    }

    pub fn value_u(&self, u: f64) -> f64 {
        match *self {
            RadialShape::Mollifier { radius } => mollifier_u(u / (radius * radius)),
            RadialShape::Plateau { inner, outer } => {
                let (a2, b2) = (inner * inner, outer * outer);
                smooth_step((b2 - u) / (b2 - a2))
            }
            RadialShape::Annulus { r0, r1, r2, r3 } => {
                let up = smooth_step((u - r0 * r0) / (r1 * r1 - r0 * r0));
                if up == 0.0 {
                    return 0.0;
                }
                up * smooth_step((r3 * r3 - u) / (r3 * r3 - r2 * r2))
            }
        }
    }

    /// Taylor jet in `u`.
    pub fn jet_u(&self, u: f64) -> Jet1 {
        match *self {
            RadialShape::Mollifier { radius } => {
                let s = 1.0 / (radius * radius);
                mollifier_u_jet(u * s).chain_linear(s)
            }
            RadialShape::Plateau { inner, outer } => {
                let (a2, b2) = (inner * inner, outer * outer);
                let d = b2 - a2;
                smooth_step_jet((b2 - u) / d).chain_linear(-1.0 / d)
            }
            RadialShape::Annulus { r0, r1, r2, r3 } => {
                let d0 = r1 * r1 - r0 * r0;
                let d1 = r3 * r3 - r2 * r2;
                let up = smooth_step_jet((u - r0 * r0) / d0).chain_linear(1.0 / d0);
                let down = smooth_step_jet((r3 * r3 - u) / d1).chain_linear(-1.0 / d1);
                up * down
            }
        }
    }

    pub fn scaled(&self, s: f64) -> RadialShape {
        match *self {
            RadialShape::Mollifier { radius } => RadialShape::Mollifier { radius: radius * s },
            RadialShape::Plateau { inner, outer } => RadialShape::Plateau {
                inner: inner * s,
                outer: outer * s,
            },
            RadialShape::Annulus { r0, r1, r2, r3 } => RadialShape::Annulus {
                r0: r0 * s,
                r1: r1 * s,
                r2: r2 * s,
                r3: r3 * s,
            },
        }
    }
}

/// An even function of one real variable, `amplitude * shape(|t|)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile1d {
    pub shape: RadialShape,
    pub amplitude: f64,
}

impl Profile1d {
    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * self.shape.value_u(t * t)
    }

    pub fn jet(&self, t: f64) -> Jet1 {
        let u = Jet1::var(t) * Jet1::var(t);
        u.then(self.shape.jet_u(t * t)).scale(self.amplitude)
    }

    /// Support is contained in `[-half_width, half_width]`.
    pub fn half_width(&self) -> f64 {
        self.shape.support().1
    }

    pub fn feature(&self) -> f64 {
        self.shape.feature()
    }
}

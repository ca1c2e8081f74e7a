//! Truncated Taylor arithmetic.
//!
//! [`Jet1`] carries the Taylor coefficients of a scalar function of one
//! variable up to order 3, [`Jet2`] those of a function of two variables up to
//! total order 3, and [`Hess2`] the value, gradient and Hessian of a planar
//! function (the order-2 truncation, kept separate because the Laplacian fast
//! path only needs it).

use std::ops::{Add, Mul, Neg, Sub};

/// Taylor coefficients `c[n] = f^(n)(x0) / n!` for `n <= 3`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet1(pub [f64; 4]);

impl Jet1 {
    pub const ZERO: Jet1 = Jet1([0.0; 4]);

    pub fn constant(c: f64) -> Self {
        Jet1([c, 0.0, 0.0, 0.0])
    }

    /// The identity function expanded at `x0`.
    pub fn var(x0: f64) -> Self {
        Jet1([x0, 1.0, 0.0, 0.0])
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `n`-th derivative at the expansion point.
    pub fn deriv(&self, n: usize) -> f64 {
        const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];
        self.0[n] * FACT[n]
    }

    /// Builds a jet from derivatives `[f, f', f'', f''']`.
    pub fn from_derivs(d: [f64; 4]) -> Self {
        Jet1([d[0], d[1], d[2] / 2.0, d[3] / 6.0])
    }

    pub fn scale(self, a: f64) -> Self {
        Jet1(self.0.map(|c| c * a))
    }

    /// Rescales the independent variable: if `self` expands `g(t)` then the
    /// result expands `u -> g(a*u + b)` around the matching point.
    pub fn chain_linear(self, a: f64) -> Self {
        let c = self.0;
        Jet1([c[0], c[1] * a, c[2] * a * a, c[3] * a * a * a])
    }

    pub fn exp(self) -> Self {
        let [a0, a1, a2, a3] = self.0;
        let e = a0.exp();
        Jet1([
            e,
            e * a1,
            e * (a2 + 0.5 * a1 * a1),
            e * (a3 + a1 * a2 + a1 * a1 * a1 / 6.0),
        ])
    }

    pub fn recip(self) -> Self {
        let a = self.0;
        let b0 = 1.0 / a[0];
        let b1 = -b0 * (a[1] * b0);
        let b2 = -b0 * (a[1] * b1 + a[2] * b0);
        let b3 = -b0 * (a[1] * b2 + a[2] * b1 + a[3] * b0);
        Jet1([b0, b1, b2, b3])
    }

    pub fn sqrt(self) -> Self {
        let a = self.0;
        let s0 = a[0].sqrt();
        let s1 = a[1] / (2.0 * s0);
        let s2 = (a[2] - s1 * s1) / (2.0 * s0);
        let s3 = (a[3] - 2.0 * s1 * s2) / (2.0 * s0);
        Jet1([s0, s1, s2, s3])
    }

    /// Composes `outer` (expanded at `self.value()`) with `self`.
    pub fn then(self, outer: Jet1) -> Jet1 {
        let mut h = self;
        h.0[0] = 0.0;
        let h2 = h * h;
        let h3 = h2 * h;
        let f = outer.0;
        Jet1([
            f[0],
            f[1] * h.0[1],
            f[1] * h.0[2] + f[2] * h2.0[2],
            f[1] * h.0[3] + f[2] * h2.0[3] + f[3] * h3.0[3],
        ])
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, o: Jet1) -> Jet1 {
        Jet1([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, o: Jet1) -> Jet1 {
        self + (-o)
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1(self.0.map(|c| -c))
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        let (a, b) = (self.0, o.0);
        Jet1([
            a[0] * b[0],
            a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
            a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0],
        ])
    }
}

/// Multi-index `(g1, g2)` with `g1 + g2 <= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub u8, pub u8);

impl MultiIndex {
    pub fn order(&self) -> usize {
        (self.0 + self.1) as usize
    }

    /// All multi-indices of order at most 3, in graded order.
    pub fn all() -> impl Iterator<Item = MultiIndex> {
        (0..=3u8).flat_map(|d| (0..=d).map(move |b| MultiIndex(d - b, b)))
    }

    fn slot(&self) -> usize {
        let d = self.order();
        d * (d + 1) / 2 + self.1 as usize
    }
}

const fn degree_of(slot: usize) -> (usize, usize) {
    // inverse of MultiIndex::slot
    let d = if slot == 0 {
        0
    } else if slot < 3 {
        1
    } else if slot < 6 {
        2
    } else {
        3
    };
    let b = slot - d * (d + 1) / 2;
    (d - b, b)
}

const fn slot_of(a: usize, b: usize) -> usize {
    let d = a + b;
    d * (d + 1) / 2 + b
}

const MUL_TABLE: [(u8, u8, u8); 35] = {
    let mut t = [(0u8, 0u8, 0u8); 35];
    let mut n = 0;
    let mut i = 0;
    while i < 10 {
        let (ai, bi) = degree_of(i);
        let mut j = 0;
        while j < 10 {
            let (aj, bj) = degree_of(j);
            if ai + bi + aj + bj <= 3 {
                t[n] = (i as u8, j as u8, slot_of(ai + aj, bi + bj) as u8);
                n += 1;
            }
            j += 1;
        }
        i += 1;
    }
    t
};

/// Taylor polynomial of a planar function truncated at total order 3.
///
/// Coefficient layout is graded: `1, h1, h2, h1², h1h2, h2², h1³, h1²h2, h1h2², h2³`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2(pub [f64; 10]);

impl Jet2 {
    pub const ZERO: Jet2 = Jet2([0.0; 10]);

    pub fn constant(c: f64) -> Self {
        let mut j = Jet2::ZERO;
        j.0[0] = c;
        j
    }

    /// Coordinate functions `x1`, `x2` expanded at `x`.
    pub fn coords(x: [f64; 2]) -> (Jet2, Jet2) {
        let mut a = Jet2::constant(x[0]);
        a.0[1] = 1.0;
        let mut b = Jet2::constant(x[1]);
        b.0[2] = 1.0;
        (a, b)
    }

    /// `|x - c|^2` expanded at `x`.
    pub fn dist2(x: [f64; 2], c: [f64; 2]) -> Jet2 {
        let d = [x[0] - c[0], x[1] - c[1]];
        let mut j = Jet2::ZERO;
        j.0[0] = d[0] * d[0] + d[1] * d[1];
        j.0[1] = 2.0 * d[0];
        j.0[2] = 2.0 * d[1];
        j.0[3] = 1.0;
        j.0[5] = 1.0;
        j
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// The partial derivative `∂^γ` at the expansion point.
    pub fn partial(&self, g: MultiIndex) -> f64 {
        const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];
        self.0[g.slot()] * FACT[g.0 as usize] * FACT[g.1 as usize]
    }

    pub fn scale(self, a: f64) -> Self {
        Jet2(self.0.map(|c| c * a))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// Applies `outer`, expanded at `self.value()`, to this jet.
    pub fn then(self, outer: Jet1) -> Jet2 {
        let mut h = self;
        h.0[0] = 0.0;
        let h2 = h * h;
        let h3 = h2 * h;
        let f = outer.0;
        let mut r = Jet2::ZERO;
        r.0[0] = f[0];
        for k in 1..10 {
            r.0[k] = f[1] * h.0[k] + f[2] * h2.0[k] + f[3] * h3.0[k];
        }
        r
    }

    /// Restricts the jet to a curve `x0 + (h1(e), h2(e))` where `h1`, `h2`
    /// vanish at `e = 0`, returning the Taylor expansion in `e`.
    pub fn along(&self, h1: Jet1, h2: Jet1) -> Jet1 {
        let p1 = [Jet1::constant(1.0), h1, h1 * h1, h1 * h1 * h1];
        let p2 = [Jet1::constant(1.0), h2, h2 * h2, h2 * h2 * h2];
        let mut r = Jet1::ZERO;
        for slot in 0..10 {
            let c = self.0[slot];
            if c == 0.0 {
                continue;
            }
            let (a, b) = degree_of(slot);
            r = r + (p1[a] * p2[b]).scale(c);
        }
        r
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, o: Jet2) -> Jet2 {
        for k in 0..10 {
            self.0[k] += o.0[k];
        }
        self
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, o: Jet2) -> Jet2 {
        for k in 0..10 {
            self.0[k] -= o.0[k];
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2(self.0.map(|c| -c))
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        let mut r = [0.0; 10];
        for &(i, j, k) in MUL_TABLE.iter() {
            r[k as usize] += self.0[i as usize] * o.0[j as usize];
        }
        Jet2(r)
    }
}

/// Value, gradient and Hessian `[xx, xy, yy]` of a planar function.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Hess2 {
    pub v: f64,
    pub g: [f64; 2],
    pub h: [f64; 3],
}

impl Hess2 {
    pub const ZERO: Hess2 = Hess2 {
        v: 0.0,
        g: [0.0; 2],
        h: [0.0; 3],
    };

    pub fn dist2(x: [f64; 2], c: [f64; 2]) -> Hess2 {
        let d = [x[0] - c[0], x[1] - c[1]];
        Hess2 {
            v: d[0] * d[0] + d[1] * d[1],
            g: [2.0 * d[0], 2.0 * d[1]],
            h: [2.0, 0.0, 2.0],
        }
    }

    pub fn laplacian(&self) -> f64 {
        self.h[0] + self.h[2]
    }

    /// Second derivative along the unit vector `(cos γ, sin γ)`.
    pub fn directional(&self, gamma: f64) -> f64 {
        let (s, c) = gamma.sin_cos();
        c * c * self.h[0] + 2.0 * s * c * self.h[1] + s * s * self.h[2]
    }

    pub fn scale(self, a: f64) -> Self {
        Hess2 {
            v: self.v * a,
            g: self.g.map(|x| x * a),
            h: self.h.map(|x| x * a),
        }
    }

    /// Applies `outer`, expanded at `self.v`.
    pub fn then(self, outer: Jet1) -> Hess2 {
        let f1 = outer.0[1];
        let f2 = 2.0 * outer.0[2];
        let g = self.g;
        Hess2 {
            v: outer.0[0],
            g: [f1 * g[0], f1 * g[1]],
            h: [
                f2 * g[0] * g[0] + f1 * self.h[0],
                f2 * g[0] * g[1] + f1 * self.h[1],
                f2 * g[1] * g[1] + f1 * self.h[2],
            ],
        }
    }

    pub fn from_jet(j: &Jet2) -> Hess2 {
        Hess2 {
            v: j.0[0],
            g: [j.0[1], j.0[2]],
            h: [2.0 * j.0[3], j.0[4], 2.0 * j.0[5]],
        }
    }
}

impl Add for Hess2 {
    type Output = Hess2;
    fn add(self, o: Hess2) -> Hess2 {
        Hess2 {
            v: self.v + o.v,
            g: [self.g[0] + o.g[0], self.g[1] + o.g[1]],
            h: [self.h[0] + o.h[0], self.h[1] + o.h[1], self.h[2] + o.h[2]],
        }
    }
}

impl Mul for Hess2 {
    type Output = Hess2;
    fn mul(self, o: Hess2) -> Hess2 {
        let (f, g) = (self, o);
        Hess2 {
            v: f.v * g.v,
            g: [f.v * g.g[0] + g.v * f.g[0], f.v * g.g[1] + g.v * f.g[1]],
            h: [
                f.v * g.h[0] + g.v * f.h[0] + 2.0 * f.g[0] * g.g[0],
                f.v * g.h[1] + g.v * f.h[1] + f.g[0] * g.g[1] + f.g[1] * g.g[0],
                f.v * g.h[2] + g.v * f.h[2] + 2.0 * f.g[1] * g.g[1],
            ],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet1_exp_recip_match_known_series() {
        // exp(sin-free polynomial) checked against hand expansion of 1/(1-x) at 0
        let r = (Jet1::constant(1.0) - Jet1::var(0.0)).recip();
        assert_eq!(r.0, [1.0, 1.0, 1.0, 1.0]);
        let e = Jet1::var(0.0).exp();
        assert!((e.0[3] - 1.0 / 6.0).abs() < 1e-15);
        let s = Jet1::var(4.0).sqrt();
        assert!((s.deriv(1) - 0.25).abs() < 1e-15);
        assert!((s.deriv(2) + 0.25 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn jet2_product_is_polynomial_product() {
        let (x, y) = Jet2::coords([0.5, -1.0]);
        let p = x * x * y; // x^2 y
        assert!((p.value() - (-0.25)).abs() < 1e-15);
        assert!((p.partial(MultiIndex(2, 1)) - 2.0).abs() < 1e-15);
        assert!((p.partial(MultiIndex(1, 1)) - 1.0).abs() < 1e-15);
        assert!((p.partial(MultiIndex(2, 0)) + 2.0).abs() < 1e-15);
        assert_eq!(p.partial(MultiIndex(0, 3)), 0.0);
    }

    #[test]
    fn hess_compose_matches_jet_compose() {
        let x = [0.3, 0.7];
        let u = Jet2::dist2(x, [0.1, -0.2]);
        let outer = Jet1::var(u.value()).exp();
        let j = u.then(outer);
        let h = Hess2::dist2(x, [0.1, -0.2]).then(outer);
        let hj = Hess2::from_jet(&j);
        for k in 0..3 {
            assert!((h.h[k] - hj.h[k]).abs() < 1e-12);
        }
        assert!((h.g[0] - hj.g[0]).abs() < 1e-12);
    }

    #[test]
    fn multi_index_enumeration() {
        let all: Vec<_> = MultiIndex::all().collect();
        assert_eq!(all.len(), 10);
        for (k, g) in all.iter().enumerate() {
            assert_eq!(g.slot(), k);
        }
    }
}

impl std::ops::AddAssign for Jet1 {
    fn add_assign(&mut self, o: Jet1) {
        *self = *self + o;
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(self, a: f64) -> Jet1 {
        self.scale(a)
    }
}

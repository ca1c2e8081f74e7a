//! Periodic angular profiles `F(θ)`.

use serde::{Deserialize, Serialize};

use super::jet::Jet1;
use crate::error::{Error, Result};

/// Maximum degree accepted for trigonometric profiles.
pub const MAX_TRIG_DEGREE: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum AngularProfile {
    /// `a0 + Σ_j cos[j-1]·cos(jθ) + sin[j-1]·sin(jθ)`.
    Trig { a0: f64, cos: Vec<f64>, sin: Vec<f64> },
    Hermite(HermiteProfile),
}

impl AngularProfile {
    pub fn trig(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if cos.len() > MAX_TRIG_DEGREE || sin.len() > MAX_TRIG_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "trig profile degree {} exceeds {MAX_TRIG_DEGREE}",
                cos.len().max(sin.len())
            )));
        }
        Ok(AngularProfile::Trig { a0, cos, sin })
    }

    pub fn validate(&self) -> bool {
        match self {
            AngularProfile::Trig { cos, sin, .. } => {
                cos.len() <= MAX_TRIG_DEGREE && sin.len() <= MAX_TRIG_DEGREE
            }
            AngularProfile::Hermite(h) => h.validate(),
        }
    }

    pub fn value(&self, theta: f64) -> f64 {
        match self {
            AngularProfile::Trig { .. } => self.jet(theta).value(),
            AngularProfile::Hermite(h) => h.value(theta),
        }
    }

    pub fn jet(&self, theta: f64) -> Jet1 {
        match self {
            AngularProfile::Trig { a0, cos, sin } => {
                let mut d = [*a0, 0.0, 0.0, 0.0];
                let n = cos.len().max(sin.len());
                for j in 1..=n {
                    let a = cos.get(j - 1).copied().unwrap_or(0.0);
                    let b = sin.get(j - 1).copied().unwrap_or(0.0);
                    let jf = j as f64;
                    let (s, c) = (jf * theta).sin_cos();
                    d[0] += a * c + b * s;
                    d[1] += jf * (b * c - a * s);
                    d[2] -= jf * jf * (a * c + b * s);
                    d[3] += jf * jf * jf * (a * s - b * c);
                }
                Jet1::from_derivs(d)
            }
            AngularProfile::Hermite(h) => h.jet(theta),
        }
    }

    /// Angular scale (radians) on which the profile varies.
    pub fn feature(&self) -> f64 {
        match self {
            AngularProfile::Trig { cos, sin, .. } => {
                let n = cos.len().max(sin.len()).max(1);
                1.0 / n as f64
            }
            AngularProfile::Hermite(h) => h.feature,
        }
    }
}

/// Piecewise septic Hermite interpolant matching `F, F', F'', F'''` at
/// uniformly spaced nodes of one period. The result is `C³` and periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteProfile {
    pub period: f64,
    /// Angular scale of the interpolated data, used to size quadratures.
    pub feature: f64,
    /// Monomial coefficients in the local variable `s ∈ [0, 1)` per cell.
    pub coeffs: Vec<[f64; 8]>,
}

// Inverse of M[m][j] = (j+4)! / (j+4-m)!, m, j = 0..3.
fn septic_inverse() -> [[f64; 4]; 4] {
    let mut a = [[0.0; 8]; 4];
    for m in 0..4 {
        for j in 0..4 {
            let p = j + 4;
            let mut v = 1.0;
            for q in 0..m {
                v *= (p - q) as f64;
            }
            a[m][j] = v;
        }
        a[m][4 + m] = 1.0;
    }
    // Gauss-Jordan with partial pivoting
    for col in 0..4 {
        let piv = (col..4)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                for c in 0..8 {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut inv = [[0.0; 4]; 4];
    for r in 0..4 {
        inv[r].copy_from_slice(&a[r][4..]);
    }
    inv
}

impl HermiteProfile {
    /// Builds the interpolant from derivative data `[F, F', F'', F''']` at
    /// nodes `i * period / n`, `i = 0..n`.
    pub fn from_nodes(period: f64, feature: f64, data: &[[f64; 4]]) -> Result<Self> {
        let n = data.len();
        if n < 2 || !(period > 0.0) {
            return Err(Error::InvalidParameter(
                "hermite profile needs at least two nodes and a positive period".into(),
            ));
        }
        let h = period / n as f64;
        let inv = septic_inverse();
        let fact = [1.0, 1.0, 2.0, 6.0];
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let l = data[i];
            let r = data[(i + 1) % n];
            let mut c = [0.0; 8];
            let mut hp = 1.0;
            for j in 0..4 {
                c[j] = l[j] * hp / fact[j];
                hp *= h;
            }
            // residual right-hand side for the upper four coefficients
            let mut rhs = [0.0; 4];
            let mut hm = 1.0;
            for m in 0..4 {
                let mut acc = r[m] * hm;
                for j in m..4 {
                    let mut fall = 1.0;
                    for q in 0..m {
                        fall *= (j - q) as f64;
                    }
                    acc -= c[j] * fall;
                }
                rhs[m] = acc;
                hm *= h;
            }
            for j in 0..4 {
                c[4 + j] = (0..4).map(|m| inv[j][m] * rhs[m]).sum();
            }
            coeffs.push(c);
        }
        Ok(HermiteProfile {
            period,
            feature,
            coeffs,
        })
    }

    fn validate(&self) -> bool {
        self.period > 0.0 && !self.coeffs.is_empty() && self.feature > 0.0
    }

    fn locate(&self, theta: f64) -> (usize, f64, f64) {
        let n = self.coeffs.len();
        let h = self.period / n as f64;
        let x = theta.rem_euclid(self.period) / h;
        let i = (x.floor() as usize).min(n - 1);
        (i, x - i as f64, h)
    }

    pub fn value(&self, theta: f64) -> f64 {
        let (i, s, _) = self.locate(theta);
        let c = &self.coeffs[i];
        c.iter().rev().fold(0.0, |acc, &a| acc * s + a)
    }

    pub fn jet(&self, theta: f64) -> Jet1 {
        let (i, s, h) = self.locate(theta);
        let c = &self.coeffs[i];
        // Taylor shift: coefficients of p(s + e) up to e^3
        let mut t = [0.0; 4];
        for &a in c.iter().rev() {
            t[3] = t[3] * s + t[2];
            t[2] = t[2] * s + t[1];
            t[1] = t[1] * s + t[0];
            t[0] = t[0] * s + a;
        }
        let ih = 1.0 / h;
        Jet1([t[0], t[1] * ih, t[2] * ih * ih, t[3] * ih * ih * ih])
    }

    pub fn nodes(&self) -> usize {
        self.coeffs.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_rejects_high_degree() {
        assert!(AngularProfile::trig(0.0, vec![0.0; 9], vec![]).is_err());
    }

    #[test]
    fn trig_jet_matches_closed_form() {
        let p = AngularProfile::trig(1.0, vec![0.0, 0.5], vec![0.25]).unwrap();
        let th = 0.37f64;
        let j = p.jet(th);
        let f = 1.0 + 0.5 * (2.0 * th).cos() + 0.25 * th.sin();
        let f3 = 0.5 * 8.0 * (2.0 * th).sin() - 0.25 * th.cos();
        assert!((j.value() - f).abs() < 1e-15);
        assert!((j.deriv(3) - f3).abs() < 1e-14);
    }

    #[test]
    fn hermite_reproduces_smooth_periodic_data() {
        // F(θ) = exp(cos 2θ), period π
        let f = |t: f64| -> [f64; 4] {
            let (s, c) = (2.0 * t).sin_cos();
            let e = c.exp();
            let d1 = -2.0 * s * e;
            let d2 = (-4.0 * c + 4.0 * s * s) * e;
            let d3 = (8.0 * s + 16.0 * s * c + 8.0 * s * c - 8.0 * s * s * s) * e;
            [e, d1, d2, d3]
        };
        let n = 64;
        let pi = std::f64::consts::PI;
        let data: Vec<_> = (0..n).map(|i| f(i as f64 * pi / n as f64)).collect();
        let h = HermiteProfile::from_nodes(pi, 0.5, &data).unwrap();
        for k in 0..500 {
            let t = -3.0 + k as f64 * 0.0137;
            let exact = f(t);
            let j = h.jet(t);
            assert!((j.value() - exact[0]).abs() < 1e-10, "t={t}");
            assert!((j.deriv(1) - exact[1]).abs() < 1e-8);
            assert!((j.deriv(3) - exact[3]).abs() < 1e-4);
            assert!((h.value(t) - j.value()).abs() < 1e-15);
        }
        // nodes are interpolated exactly
        let j = h.jet(pi / n as f64 * 5.0);
        assert!((j.deriv(2) - data[5][2]).abs() < 1e-9);
    }
}

//! Small quadrature toolbox shared by the integral engines.

use serde::{Deserialize, Serialize};

/// Composite rule used on compactly supported chords.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// Endpoint-free trapezoid; spectrally accurate when the integrand is flat at both ends.
    #[default]
    Trapezoid,
    Simpson,
}

/// Integrates `f` over `[a, b]` with `n` panels.
pub fn composite(rule: Rule, a: f64, b: f64, n: usize, f: impl FnMut(f64) -> f64) -> f64 {
    composite_gen(rule, a, b, n, f)
}

/// [`composite`] for any value type closed under addition and real scaling.
pub fn composite_gen<T>(rule: Rule, a: f64, b: f64, n: usize, mut f: impl FnMut(f64) -> T) -> T
where
    T: Copy + std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
{
    let n = n.max(2);
    match rule {
        Rule::Trapezoid => {
            let h = (b - a) / n as f64;
            let mut s = f(a) * 0.5;
            s += f(b) * 0.5;
            for i in 1..n {
                s += f(a + i as f64 * h);
            }
            s * h
        }
        Rule::Simpson => {
            let n = n + (n & 1);
            let h = (b - a) / n as f64;
            let mut s = f(a);
            s += f(b);
            for i in 1..n {
                let w = if i & 1 == 1 { 4.0 } else { 2.0 };
                s += f(a + i as f64 * h) * w;
            }
            s * (h / 3.0)
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15(a: f64, b: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) on `[a, b]` with the given interior breakpoints.
pub fn adaptive(
    a: f64,
    b: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut segs: Vec<(f64, f64, f64, f64)> = pts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(w[0], w[1], &mut f);
            (w[0], w[1], v, e)
        })
        .collect();
    for _ in 0..2000 {
        let total: f64 = segs.iter().map(|s| s.2).sum();
        let err: f64 = segs.iter().map(|s| s.3).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let (i, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (lo, hi, _, _) = segs.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (v1, e1) = gk15(lo, mid, &mut f);
        let (v2, e2) = gk15(mid, hi, &mut f);
        segs.push((lo, mid, v1, e1));
        segs.push((mid, hi, v2, e2));
    }
    // fixed summation order for reproducibility
    segs.sort_by(|x, y| x.0.total_cmp(&y.0));
    segs.iter().map(|s| s.2).sum()
}

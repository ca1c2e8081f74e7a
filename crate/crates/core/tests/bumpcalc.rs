use lineporous::bumpcalc::*;
use lineporous::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(rng: &mut ChaCha8Rng) -> SmoothField {
    let mut terms = Vec::new();
    for _ in 0..3 {
        let c = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        terms.push(
            Term::new(
                rng.gen_range(-2.0..2.0),
                vec![Primitive::Radial {
                    center: c,
                    shape: RadialShape::Mollifier { radius: rng.gen_range(0.8..2.0) },
                }],
            )
            .unwrap(),
        );
    }
    let prof = AngularProfile::trig(1.0, vec![rng.gen_range(-0.5..0.5), 0.3], vec![rng.gen_range(-0.5..0.5)]).unwrap();
    let ang = annular_angular(2.0, rng.gen_range(0.5..1.5), prof, rng.gen_range(0.0..6.0)).unwrap();
    terms.extend(ang.terms().iter().cloned());
    terms.push(
        Term::new(
            0.7,
            vec![
                Primitive::Radial { center: [0.0, 0.0], shape: annulus_shape().scaled(3.0) },
                Primitive::Radial { center: [2.0, 1.0], shape: ball_shape().scaled(1.5) },
            ],
        )
        .unwrap(),
    );
    SmoothField::new(terms)
}

fn point_in(rng: &mut ChaCha8Rng, r: f64) -> [f64; 2] {
    [rng.gen_range(-r..r), rng.gen_range(-r..r)]
}

#[test]
fn zero_field_everything_zero() {
    let f = SmoothField::zero();
    for g in MultiIndex::all() {
        assert_eq!(eval(&f, [0.3, -1.0], g).unwrap(), 0.0);
    }
    assert_eq!(laplacian(&f, [1.0, 1.0]), 0.0);
    assert_eq!(kn_norm(&f, &KnGrid::default()), 0.0);
}

#[test]
fn order_above_three_rejected() {
    let f = bump([0.0, 0.0], 1.0, 1.0);
    assert_eq!(eval(&f, [0.0, 0.0], MultiIndex(2, 2)), Err(Error::UnsupportedOrder(4)));
}

#[test]
fn support_exactness() {
    let f = bump([0.0, 0.0], 1.5, 1.0);
    for g in MultiIndex::all() {
        assert_eq!(eval(&f, [4.5, 0.0], g).unwrap(), 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f = random_field(&mut rng);
    let r = f.support_radius();
    for k in 0..100 {
        let a = k as f64 * 0.1;
        let x = [r * 1.0001 * a.cos(), r * 1.0001 * a.sin()];
        assert_eq!(f.value(x), 0.0);
        assert_eq!(f.jet(x), Jet2::ZERO);
    }
}

#[test]
fn first_derivative_matches_central_difference() {
    let f = bump([0.2, -0.1], 1.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let x = point_in(&mut rng, 0.6);
        let h = 1e-5;
        let fd = (f.value([x[0] + h, x[1]]) - f.value([x[0] - h, x[1]])) / (2.0 * h);
        let d = eval(&f, x, MultiIndex(1, 0)).unwrap();
        assert!((fd - d).abs() < 1e-8, "{fd} {d}");
    }
}

#[test]
fn derivative_consistency_on_random_points() {
    // finite difference of ∂^γ against ∂^{γ+e_i}, error must shrink like step²
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = random_field(&mut rng);
    let mut checked = 0;
    while checked < 100 {
        let x = point_in(&mut rng, 4.0);
        if x[0].hypot(x[1]) < 1.2 {
            continue;
        }
        checked += 1;
        for g in MultiIndex::all().filter(|g| g.order() <= 2) {
            for (i, up) in [MultiIndex(g.0 + 1, g.1), MultiIndex(g.0, g.1 + 1)].into_iter().enumerate() {
                let exact = eval(&f, x, up).unwrap();
                let err = |h: f64| {
                    let mut xp = x;
                    let mut xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    ((eval(&f, xp, g).unwrap() - eval(&f, xm, g).unwrap()) / (2.0 * h) - exact).abs()
                };
                let (e1, e2) = (err(1e-4), err(5e-5));
                let scale = 1.0 + exact.abs();
                assert!(e1 < 1e-3 * scale, "γ={g:?} i={i} x={x:?} e1={e1}");
                // quadratic rate, unless both are at rounding level
                assert!(e2 < 0.3 * e1 + 1e-6 * scale, "rate γ={g:?} e1={e1} e2={e2}");
            }
        }
    }
}

#[test]
fn hess_and_jet_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_field(&mut rng);
    for _ in 0..200 {
        let x = point_in(&mut rng, 4.0);
        let h = f.hess(x);
        let j = Hess2::from_jet(&f.jet(x));
        assert!((h.v - j.v).abs() < 1e-12);
        for k in 0..3 {
            assert!((h.h[k] - j.h[k]).abs() < 1e-10 * (1.0 + h.h[k].abs()));
        }
    }
}

#[test]
fn radial_laplacian_is_rotation_invariant() {
    let f = bump([0.0, 0.0], 2.0, 1.3);
    for &r in &[0.3, 0.9, 1.7] {
        let l0 = laplacian(&f, [r, 0.0]);
        for k in 1..12 {
            let a = k as f64 * 0.5;
            let l = laplacian(&f, [r * a.cos(), r * a.sin()]);
            assert!((l - l0).abs() < 1e-12 * (1.0 + l0.abs()));
            assert!((f.value([r * a.cos(), r * a.sin()]) - f.value([r, 0.0])).abs() < 1e-12);
        }
    }
}

#[test]
fn laplacian_integrates_to_zero() {
    // divergence theorem oracle: polar trapezoid on a disk containing the support
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = random_field(&mut rng);
    let big = f.support_radius() + 0.5;
    let (nr, na) = (800, 400);
    let mut s = 0.0;
    let mut scale = 0.0;
    for i in 0..nr {
        let r = (i as f64 + 0.5) * big / nr as f64;
        for j in 0..na {
            let a = std::f64::consts::TAU * j as f64 / na as f64;
            let l = laplacian(&f, [r * a.cos(), r * a.sin()]);
            s += l * r;
            scale += l.abs() * r;
        }
    }
    assert!(s.abs() < 1e-6 * scale, "{s} vs {scale}");
}

#[test]
fn directional_second_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = random_field(&mut rng);
    for _ in 0..20 {
        let x = point_in(&mut rng, 3.0);
        assert!((directional_second(&f, x, 0.0) - eval(&f, x, MultiIndex(2, 0)).unwrap()).abs() < 1e-12);
        let sum = directional_second(&f, x, 0.0) + directional_second(&f, x, std::f64::consts::FRAC_PI_2);
        assert!((sum - laplacian(&f, x)).abs() < 1e-10 * (1.0 + sum.abs()));
        let g: f64 = rng.gen_range(0.0..6.28);
        let e = [g.cos(), g.sin()];
        let h = 1e-4;
        let v = |t: f64| f.value([x[0] + t * e[0], x[1] + t * e[1]]);
        let fd = (v(h) - 2.0 * v(0.0) + v(-h)) / (h * h);
        let d = directional_second(&f, x, g);
        assert!((fd - d).abs() < 1e-5 * (1.0 + d.abs()), "{fd} {d}");
    }
}

#[test]
fn rotated_field_is_composition() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = random_field(&mut rng);
    let gamma = 0.83f64;
    let g = f.rotated(gamma);
    let (s, c) = gamma.sin_cos();
    for _ in 0..50 {
        let x = point_in(&mut rng, 4.0);
        let rx = [c * x[0] - s * x[1], s * x[0] + c * x[1]];
        assert!((g.value(x) - f.value(rx)).abs() < 1e-12);
    }
}

#[test]
fn kn_norm_dilation_bound() {
    // pullback C³ norm vs 2^k ‖f‖ for f supported in the k-th dyadic annulus
    let grid = KnGrid { n_angles: 256, n_radii: 128, r_min_frac: 1e-2 };
    let mut ratios = Vec::new();
    for k in 2..8 {
        let s = 2f64.powi(k);
        let prof = AngularProfile::trig(1.0, vec![0.4], vec![0.2]).unwrap();
        let f = annular_angular(s, s, prof, 0.0).unwrap();
        let kn = kn_norm(&f, &grid);
        let pull = c3_norm_pullback(&f, k, &grid);
        ratios.push(pull / (s * kn));
        assert!(pull > 0.0);
    }
    let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    // K^{-1} ≤ ratio ≤ K with one K for all k
    assert!(hi / lo < 4.0, "{ratios:?}");
}

#[test]
fn kn_norm_grid_refinement() {
    // unit bump at distance 2^3; successive refinements contract (Richardson-consistent)
    let f = bump([8.0, 0.0], 1.0, 1.0);
    let at = |n: usize| kn_norm(&f, &KnGrid { n_angles: 512 * n, n_radii: 256 * n, r_min_frac: 0.5 });
    let (a, b, c) = (at(1), at(2), at(4));
    assert!((c - b).abs() < 0.5 * (b - a).abs() + 1e-9 * c, "{a} {b} {c}");
    assert!((c - b).abs() < 0.02 * c);
}

#[test]
fn serde_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let f = random_field(&mut rng);
    let s = serde_json::to_string(&f).unwrap();
    let g: SmoothField = serde_json::from_str(&s).unwrap();
    assert_eq!(f, g);
    assert!(s.contains("\"kind\":\"radial\""));
}

proptest! {
    #[test]
    fn radial_bump_rotation_covariance(r in 0.0f64..2.0, a in 0.0f64..6.3, rad in 0.5f64..3.0) {
        let f = bump([0.0, 0.0], rad, 1.0);
        let v0 = f.value([r, 0.0]);
        let v = f.value([r * a.cos(), r * a.sin()]);
        prop_assert!((v - v0).abs() < 1e-12);
    }

    #[test]
    fn bumps_are_bounded_by_peak(x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let f = bump([0.5, 0.5], 2.0, 1.0);
        let v = f.value([x, y]);
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn step_is_monotone(a in -0.5f64..1.5, b in -0.5f64..1.5) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(smooth_step(lo) <= smooth_step(hi));
    }
}

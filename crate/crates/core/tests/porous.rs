use lineporous::porous::*;
use lineporous::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scales(a: f64, b: f64) -> ScaleRange {
    ScaleRange::new(a, b).unwrap()
}

#[test]
fn dense_grid_has_no_holes() {
    let g = grid_fill(0.01, 1.0).unwrap();
    let sc = scales(0.1, 1.0);
    let r = estimate_line_porosity(&g, &sc, 64, 32).unwrap();
    assert!(r.nu_line <= 2.0 * g.resolution() / sc.rho0);
    let b = estimate_ball_porosity(&g, &sc, 32).unwrap();
    assert!(b.nu_ball <= 2.0 * g.resolution() / sc.rho0);
    assert!(!b.witness_failures.is_empty());
}

#[test]
fn line_is_porous_on_balls_only() {
    for &angle in &[0.0, 0.3, 1.2] {
        let l = line_set(angle, 4.0, 0.01).unwrap();
        let sc = scales(0.1, 1.0);
        let r = estimate_line_porosity(&l, &sc, 64, 32).unwrap();
        assert!(r.nu_line <= 2.0 * l.resolution() / sc.rho0, "angle {angle}: {}", r.nu_line);
        assert!(r.nu_ball >= 0.09, "angle {angle}: {}", r.nu_ball);
    }
}

#[test]
fn empty_cloud_is_vacuously_porous() {
    let e = PointCloud2::empty(0.01, 1.0).unwrap();
    let r = estimate_ball_porosity(&e, &scales(0.1, 1.0), 16).unwrap();
    assert_eq!(r.nu_ball, NU_CAP);
    assert_eq!(r.nu_line, NU_CAP);
}

#[test]
fn resolution_guard() {
    let c = cantor_product(0.4, 3, 1.0, 1).unwrap();
    let bad = scales(3.0 * c.resolution(), 1.0);
    assert!(matches!(
        estimate_line_porosity(&c, &bad, 8, 8),
        Err(Error::ResolutionTooCoarse { .. })
    ));
}

#[test]
fn cantor_depth_one_is_porous() {
    let c = cantor_product(1.0 / 3.0, 1, 1.0, 8).unwrap();
    assert_eq!(c.len(), 4 * 64);
    let r = estimate_line_porosity(&c, &scales(0.5, 1.0), 64, 32).unwrap();
    assert!(r.nu_line > 0.0);
}

/// Porosity by exhaustive sweep: every cloud point as a centre, twice the
/// directions and samples, brute-force distances.
fn exhaustive_line_porosity(y: &PointCloud2, sc: &ScaleRange, n_dirs: usize, m: usize) -> f64 {
    let d = y.resolution();
    let mut nu = NU_CAP;
    for r in sc.ladder(2.0) {
        for &c in y.points() {
            for k in 0..n_dirs {
                let a = std::f64::consts::PI * k as f64 / n_dirs as f64;
                let mut hole = 0.0f64;
                for i in 0..m {
                    let t = r * (i as f64 / (m - 1) as f64 - 0.5);
                    let x = [c[0] + t * a.cos(), c[1] + t * a.sin()];
                    let dist = y
                        .points()
                        .iter()
                        .map(|p| (p[0] - x[0]).hypot(p[1] - x[1]))
                        .fold(f64::INFINITY, f64::min);
                    hole = hole.max(((dist - d) / r).clamp(0.0, NU_CAP));
                }
                nu = nu.min(hole);
            }
        }
    }
    nu
}

#[test]
fn estimator_agrees_with_exhaustive_sweep() {
    for &ratio in &[0.4, 0.42] {
        let c = cantor_product(ratio, 2, 1.0, 2).unwrap();
        let sc = scales(8.0 * c.resolution(), 1.0);
        let est = estimate_line_porosity(&c, &sc, 64, 32).unwrap().nu_line;
        let oracle = exhaustive_line_porosity(&c, &sc, 128, 257);
        assert!(oracle > 0.0);
        // more centres lower the minimum, denser samples raise each segment's score
        assert!((est - oracle).abs() <= 0.1 * oracle, "ratio {ratio}: {est} vs exhaustive {oracle}");
    }
}

#[test]
fn neighbourhood_keeps_porosity() {
    for &(ratio, depth) in &[(0.4, 4), (0.42, 4), (0.45, 5)] {
        let c = cantor_product(ratio, depth, 1.0, 2).unwrap();
        let sc = scales(32.0 * c.resolution(), 1.0);
        let s = PorositySettings::default();
        let a = anchors(&c, s.n_offsets);
        let nu = estimate_porosity_at(&c, &sc, &s, &a).unwrap().nu_line;
        assert!(nu > 0.0);
        let rho = 0.5 * nu * sc.rho0;
        let big = inflate(&c, rho, nu, sc.rho0).unwrap();
        assert_eq!(big.len() > c.len(), rho >= c.resolution());
        let nu2 = estimate_porosity_at(&big, &sc, &s, &a).unwrap().nu_line;
        // ν′ = ν − ρ/ρ₀ = ν/2, exact on shared samples
        assert!(nu2 >= 0.5 * nu - 1e-12, "ratio {ratio}: {nu2} < {}", 0.5 * nu);
        assert!(nu2 <= nu + 1e-12);
    }
}

#[test]
fn inflate_rejects_large_radius() {
    let c = cantor_product(0.4, 3, 1.0, 1).unwrap();
    assert!(matches!(inflate(&c, 0.2, 0.1, 1.0), Err(Error::PorosityDestroyed { .. })));
}

#[test]
fn middle_third_cantor_measure_bound() {
    let depth = 8;
    let leaf = 3f64.powi(-depth);
    let pts: Vec<f64> = cantor_1d(1.0 / 3.0, depth as u32, 1.0).iter().map(|a| a + 0.5 * leaf).collect();
    let m = measure_bound_check(&pts, leaf, (0.0, 1.0), 1.0 / 3.0, leaf).unwrap();
    let exact = (2.0f64 / 3.0).powi(depth);
    assert!((m.lhs - exact).abs() < 1e-12);
    // δ(1/3) = log 2 / log 3 makes the bound an identity here
    assert!((m.rhs - exact).abs() < 1e-12);
    assert!(m.ok);
}

fn random_cantor(rng: &mut ChaCha8Rng, depth: u32) -> (Vec<f64>, f64, f64) {
    let mut lo = vec![0.0f64];
    let mut l = 1.0f64;
    let mut parent = 1.0;
    for _ in 0..depth {
        let r: f64 = rng.gen_range(0.25..0.45);
        parent = l;
        lo = lo.iter().flat_map(|&a| [a, a + l - l * r]).collect();
        l *= r;
    }
    (lo.iter().map(|a| a + 0.5 * l).collect(), l, parent)
}

#[test]
fn one_dimensional_measure_bound_on_random_cantor_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..50 {
        let depth = rng.gen_range(4..9);
        let (pts, leaf, parent) = random_cantor(&mut rng, depth);
        let ivs = resolve_1d(&pts, leaf);
        let rho0 = parent;
        let nu = porosity_1d(&ivs, rho0, 1.0, 200);
        assert!(nu > 0.0, "case {case}: porosity {nu}");
        let a: f64 = rng.gen_range(0.0..0.9);
        let b: f64 = rng.gen_range(a + 0.01..1.0);
        let m = measure_bound_check(&pts, leaf, (a, b), nu, rho0).unwrap();
        assert!(m.ok, "case {case}: {} > {} + {}", m.lhs, m.rhs, m.slack);
    }
}

fn brute_pairs_ok(net: &[[f64; 2]], all: &[[f64; 2]], r: f64) -> bool {
    for (i, p) in net.iter().enumerate() {
        for q in &net[i + 1..] {
            if (p[0] - q[0]).hypot(p[1] - q[1]) <= r {
                return false;
            }
        }
    }
    all.iter()
        .all(|p| net.iter().any(|q| (p[0] - q[0]).hypot(p[1] - q[1]) <= r))
}

#[test]
fn net_is_separated_and_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<[f64; 2]> = (0..500).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let c = PointCloud2::new(pts, 1e-6, 2.0).unwrap();
    for &r in &[0.01, 0.07, 0.3] {
        let net = separated_net(&c, r).unwrap();
        assert!(brute_pairs_ok(net.points(), c.points(), r), "r = {r}");
    }
    assert!(separated_net(&PointCloud2::empty(0.1, 1.0).unwrap(), 0.5).unwrap().is_empty());
}

#[test]
fn tube_counts_on_porous_nets() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let sets = [
        cantor_product(1.0 / 3.0, 6, 1.0, 1).unwrap(),
        cantor_product(0.4, 5, 1.0, 2).unwrap(),
        hierarchical_random(0.05, 3, 6).unwrap(),
    ];
    let mut n = 0;
    while n < 50 {
        let y = &sets[n % sets.len()];
        let sc = scales(8.0 * y.resolution(), 1.0);
        let nu = estimate_line_porosity(y, &sc, 32, 16).unwrap().nu_line;
        assert!(nu > 0.0);
        let r0 = rng.gen_range(sc.rho0..0.2);
        let net = separated_net(y, r0).unwrap();
        let a = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
        let ang: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let len = rng.gen_range(r0..1.0);
        let tau = Segment {
            a,
            b: [a[0] + len * ang.cos(), a[1] + len * ang.sin()],
        };
        let t = tube_count_check(&net, &tau, r0, nu).unwrap();
        assert!(t.ok, "count {} bound {}", t.count, t.bound);
        // independent point-to-segment distance
        let brute = net
            .points()
            .iter()
            .filter(|p| {
                let d = [tau.b[0] - tau.a[0], tau.b[1] - tau.a[1]];
                let s = ((p[0] - tau.a[0]) * d[0] + (p[1] - tau.a[1]) * d[1]) / (len * len);
                let best = (0..=2000)
                    .map(|k| {
                        let u = k as f64 / 2000.0;
                        (p[0] - tau.a[0] - u * d[0]).hypot(p[1] - tau.a[1] - u * d[1])
                    })
                    .fold(f64::INFINITY, f64::min);
                let exact = if (0.0..=1.0).contains(&s) {
                    (p[0] - tau.a[0] - s * d[0]).hypot(p[1] - tau.a[1] - s * d[1])
                } else {
                    best
                };
                exact.min(best) < 2.0 * r0
            })
            .count();
        assert_eq!(brute, t.count);
        n += 1;
    }
}

#[test]
fn diameter_of_cantor_net() {
    let y = cantor_product(1.0 / 3.0, 6, 1.0, 1).unwrap();
    let sc = scales(9.0 * y.resolution(), 1.0);
    let nu = estimate_line_porosity(&y, &sc, 64, 32).unwrap().nu_line;
    let r0 = sc.rho0;
    let net = separated_net(&y, r0).unwrap();
    let tau = Segment { a: [0.0, 0.0], b: [1.0, 1.0] };
    let t = tube_count_check(&net, &tau, r0, nu).unwrap();
    assert!(t.ok && t.count > 0);
}

#[test]
fn csv_file_roundtrip() {
    let y = hierarchical_random(0.08, 11, 4).unwrap();
    let path = std::env::temp_dir().join(format!("lineporous-cloud-{}.csv", std::process::id()));
    y.write_csv(&path).unwrap();
    let back = PointCloud2::read_csv(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(back, y);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ball_porosity_dominates_line_porosity(seed in 0u64..1000, nu in 0.02f64..0.2) {
        let y = hierarchical_random(nu, seed, 4).unwrap();
        let sc = scales(4.0 * y.resolution(), 1.0);
        let r = estimate_porosity(&y, &sc, &PorositySettings { n_dirs: 16, n_offsets: 8, ..Default::default() }).unwrap();
        prop_assert!(r.nu_line <= r.nu_ball);
        prop_assert!((0.0..=NU_CAP).contains(&r.nu_line));
    }

    #[test]
    fn net_ignores_input_order(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts: Vec<[f64; 2]> = (0..120).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        let a = separated_net(&PointCloud2::new(pts.clone(), 1e-6, 2.0).unwrap(), 0.2).unwrap();
        pts.reverse();
        let b = separated_net(&PointCloud2::new(pts, 1e-6, 2.0).unwrap(), 0.2).unwrap();
        prop_assert_eq!(a, b);
    }
}

use gifs_core::collage::{collage_fit, FitConfig, FitFamily, MapFamily, ParamRange};
use gifs_core::gifs::standard::{dislocated_pair, sierpinski_system};
use gifs_core::gifs::{check_pair_contraction, check_rational_contraction, iterate_to_attractor, LiftCheck};
use gifs_core::hausdorff::{hausdorff_distance, hausdorff_with};
use gifs_core::io::{cloud_from_raster, parse_cloud, parse_pgm, render, write_cloud};
use gifs_core::{DislocatedMetric, DistanceTable, FiniteCompact, IterationConfig, Operator, Point, Strategy};

fn scalars(xs: &[f64]) -> FiniteCompact {
    FiniteCompact::from_scalars(xs).unwrap()
}

#[test]
fn distinct_map_pair_shares_the_origin() {
    let sys = dislocated_pair().unwrap();
    let xs: Vec<Point> = (0..16).map(|i| Point::from(i as f64 * 0.5)).collect();
    let pairs: Vec<(Point, Point)> = xs
        .iter()
        .flat_map(|x| xs.iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let lift = LiftCheck {
        trials: 100,
        max_set_size: 8,
        seed: 5,
    };
    let report = check_pair_contraction(&sys, &pairs, 1e-12, Some(lift)).unwrap();
    assert!(report.passed, "{report:?}");
    // delta(x/2, x/4) / delta(x, x) = 2.5 / 4.
    assert!((report.pairs[0].max_ratio - 0.625).abs() < 1e-12);

    let cfg = IterationConfig::new(1e-6, 500, 1e-8);
    let trace = iterate_to_attractor(&sys, &scalars(&[3.0, 7.0]), &cfg).unwrap();
    assert!(trace.converged && trace.fixed_set_ok);
    let to_origin = hausdorff_distance(sys.metric(), &trace.attractor, &scalars(&[0.0])).unwrap();
    assert!(to_origin <= 1e-5, "{to_origin}");
}

#[test]
fn rational_contraction_holds_for_distinct_pair() {
    let sys = dislocated_pair().unwrap();
    let sets = [
        scalars(&[0.0, 1.0]),
        scalars(&[0.5]),
        scalars(&[2.0, 3.0, 8.0]),
        scalars(&[0.25, 4.0]),
    ];
    let pairs: Vec<_> = sets
        .iter()
        .flat_map(|u| sets.iter().map(move |v| (u.clone(), v.clone())))
        .collect();
    let r = check_rational_contraction(&sys, &pairs, 1e-9, 1e-9, Strategy::Exhaustive).unwrap();
    assert!(r.passed, "{r:?}");
    assert!(r.max_ratio <= sys.alpha_star());
}

#[test]
fn table_metric_hausdorff() {
    let table = DistanceTable::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec![vec![0.0, 0.9, 0.7], vec![0.9, 1.0, 0.8], vec![0.7, 0.8, 2.0 / 3.0]],
    )
    .unwrap();
    let m = DislocatedMetric::table(table);
    let b = scalars(&[1.0]);
    // A singleton's self-distance is its diagonal entry.
    assert_eq!(hausdorff_distance(&m, &b, &b).unwrap(), 1.0);
    assert_eq!(
        hausdorff_distance(&m, &scalars(&[0.0]), &scalars(&[0.0, 2.0])).unwrap(),
        0.7
    );
    assert_eq!(
        hausdorff_with(&m, &scalars(&[0.0, 1.0]), &scalars(&[2.0]), Strategy::Accelerated).unwrap(),
        0.8
    );
}

#[test]
fn attractor_survives_text_and_raster_round_trips() {
    let sys = sierpinski_system().unwrap();
    let cfg = IterationConfig::new(1.0 / 64.0, 100, 1.0 / 128.0);
    let a = iterate_to_attractor(&sys, &FiniteCompact::from_flat(2, vec![0.0, 0.0]).unwrap(), &cfg)
        .unwrap()
        .attractor;
    assert_eq!(parse_cloud(&write_cloud(&a)).unwrap(), a);

    let img = parse_pgm(&render(&a, 129, 129).unwrap().to_pgm()).unwrap();
    let back = cloud_from_raster(&img).unwrap();
    // The raster lattice (1/128) matches the snap and the triangle fills the
    // width, so points come back shifted by the vertical centering.
    let shift = (1.0 - 60f64.to_radians().sin()) / 2.0;
    let shifted: Vec<f64> = a.coords().chunks(2).flat_map(|p| [p[0], p[1] + shift]).collect();
    let expect = FiniteCompact::from_flat(2, shifted).unwrap();
    let h = hausdorff_distance(sys.metric(), &back, &expect).unwrap();
    assert!(h <= 3.0 / 128.0, "{h}");
}

#[test]
fn sierpinski_translations_recovered_by_fit() {
    let sys = sierpinski_system().unwrap();
    let cfg = IterationConfig::new(1.0 / 32.0, 100, 1.0 / 64.0);
    let target = iterate_to_attractor(&sys, &FiniteCompact::from_flat(2, vec![0.0, 0.0]).unwrap(), &cfg)
        .unwrap()
        .attractor;
    let unit = vec![ParamRange::new(0.0, 0.6); 2];
    let family = FitFamily {
        metric: sys.metric().clone(),
        maps: vec![MapFamily::fixed_ratio(0.5, unit); 3],
        alpha_max: 0.6,
    };
    let fit = collage_fit(
        &target,
        &family,
        &FitConfig {
            budget: 3000,
            starts: 6,
            seed: 11,
            iteration: cfg,
        },
    )
    .unwrap();
    let got: Vec<&[f64]> = fit.system.f_maps().iter().map(|m| m.translation()).collect();
    let want = [[0.0, 0.0], [0.25, 0.5 * 60f64.to_radians().sin()], [0.5, 0.0]];
    for (g, w) in got.iter().zip(want) {
        assert!((g[0] - w[0]).abs() < 0.02 && (g[1] - w[1]).abs() < 0.02, "{got:?}");
    }
    assert!(fit.certificate.holds);
    assert!(fit.epsilon <= 2.0 * cfg.snap, "{}", fit.epsilon);
    let image = fit.system.apply_exact(Operator::T, &target).unwrap();
    assert_eq!(hausdorff_distance(sys.metric(), &target, &image).unwrap(), fit.epsilon);
}

/// Scalings `c_n x` against `d_n y` under abs-max metrics, with `N` up to 8. The
/// declared factors come from a fine scan of the pointwise ratio, which is
/// homogeneous and so determined on `x + y = 1`.
#[test]
fn lift_inequality_for_up_to_eight_pairs() {
    use gifs_core::{AffineMap, GifsSystem};
    use rand::{Rng, SeedableRng};

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
    let mut violations = 0;
    for n in 1..=8 {
        let metric = DislocatedMetric::abs_max(rng.random_range(0.5..3.0), rng.random_range(0.5..3.0)).unwrap();
        let mut f = Vec::new();
        let mut g = Vec::new();
        let mut alphas = Vec::new();
        for _ in 0..n {
            let (c, d) = (rng.random_range(0.0..0.4), rng.random_range(0.0..0.4));
            let ratio = (0..=10_000)
                .map(|k| {
                    let t = k as f64 / 10_000.0;
                    let (x, y) = (t, 1.0 - t);
                    metric.eval(&[c * x], &[d * y]) / metric.eval(&[x], &[y])
                })
                .fold(0.0, f64::max);
            f.push(AffineMap::similarity(c, vec![0.0]).unwrap());
            g.push(AffineMap::similarity(d, vec![0.0]).unwrap());
            alphas.push((ratio + 1e-3).min(0.99));
        }
        let sys = GifsSystem::new(metric, f, g, alphas).unwrap();
        for _ in 0..50 {
            let mut set = |rng: &mut rand_chacha::ChaCha8Rng| {
                let k = rng.random_range(1..=12);
                scalars(&(0..k).map(|_| rng.random_range(0.0..5.0)).collect::<Vec<_>>())
            };
            let (u, v) = (set(&mut rng), set(&mut rng));
            let tu = sys.apply_exact(Operator::T, &u).unwrap();
            let sv = sys.apply_exact(Operator::S, &v).unwrap();
            let lhs = hausdorff_distance(sys.metric(), &tu, &sv).unwrap();
            let rhs = sys.alpha_star() * hausdorff_distance(sys.metric(), &u, &v).unwrap();
            if lhs > rhs + 1e-9 {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0);
}

use bifree::convolution::series_engine::sigma_self_consistency;
use bifree::convolution::{moment_table, DEFAULT_GRID, DEFAULT_RADIUS};
use bifree::io::{measure_2d_to_json, parse_measure_2d};
use bifree::limits::{accompany, h_function, id_law, id_root, ArrayRow, LevyData, DEFAULT_CUTOFF};
use bifree::measure::{product_measure, MomentTable2D};
use bifree::sampling::MeasureSampler;
use bifree::transforms::{
    eta, eta_inv_pointwise, h2, psi1, psi2, reflect_point, sigma_pointwise, sigma_series, DomainWindow,
};
use bifree::{bifree_convolve, AtomicMeasure2D, Complex64, Series1};
use proptest::prelude::*;

fn gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

fn point_pair(s: &mut MeasureSampler, radius: f64) -> (Complex64, Complex64) {
    let pick = |s: &mut MeasureSampler| {
        let z = s.disk_point(radius);
        if s.uniform(0.0, 1.0) < 0.5 {
            z
        } else {
            reflect_point(z)
        }
    };
    let z = pick(s);
    (z, pick(s))
}

fn table(law: &bifree::TransformLaw, order: usize) -> MomentTable2D {
    moment_table(law, order, DEFAULT_GRID, DEFAULT_RADIUS).unwrap().table
}

fn light_cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(light_cases(48))]

    #[test]
    fn marginals_keep_mass(seed in any::<u64>(), atoms in 1usize..8, scale in 0.1f64..5.0) {
        let mu = MeasureSampler::new(seed).measure_2d(atoms).scaled(scale);
        for j in [1, 2] {
            prop_assert!((mu.marginal(j).total_mass() - mu.total_mass()).abs() < 1e-12);
        }
        prop_assert_eq!(mu.reflect().marginal(1), mu.marginal(1));
    }

    #[test]
    fn product_moments_factor(seed in any::<u64>(), p in -8i32..=8, q in -8i32..=8) {
        let mut s = MeasureSampler::new(seed);
        let (alpha, beta) = (s.measure_1d(3), s.measure_1d(4));
        let joint = product_measure(&alpha, &beta).moment(p, q);
        prop_assert!((joint - alpha.moment(p) * beta.moment(q)).norm() < 1e-12);
    }

    #[test]
    fn moment_tables_are_positive(seed in any::<u64>(), atoms in 1usize..7) {
        let t = MomentTable2D::from_measure(&MeasureSampler::new(seed).measure_2d(atoms), 4);
        prop_assert!(t.hermitian_residual() < 1e-14);
        prop_assert!(t.max_modulus() <= 1.0 + 1e-12);
        prop_assert!(t.min_moment_matrix_eigenvalue() >= -1e-8);
    }

    #[test]
    fn series_revert_round_trips(re in proptest::collection::vec(-1.0f64..1.0, 8), im in proptest::collection::vec(-1.0f64..1.0, 8)) {
        let order = 8;
        let f = Series1::from_fn(order, |k| match k {
            0 => Complex64::new(0.0, 0.0),
            1 => Complex64::new(1.0 + re[0].abs(), im[0]),
            _ => Complex64::new(re[k - 1], im[k - 1]),
        });
        let g = f.revert().unwrap();
        let id = Series1::var(order);
        prop_assert!(f.compose(&g).unwrap().max_abs_diff(&id) < 1e-10);
        prop_assert!(g.compose(&f).unwrap().max_abs_diff(&id) < 1e-10);
        let h = Series1::from_fn(order, |k| Complex64::new(im[k.min(7)], re[k.min(7)]));
        prop_assert!(f.mul(&h).max_abs_diff(&h.mul(&f)) < 1e-14);
    }

    #[test]
    fn psi_splits_h(seed in any::<u64>(), atoms in 1usize..6) {
        let mut s = MeasureSampler::new(seed);
        let mu = s.measure_2d(atoms);
        for _ in 0..5 {
            let (z, w) = (s.off_torus_point(), s.off_torus_point());
            let split = psi2(&mu, z, w).unwrap()
                + psi1(&mu.marginal(1), z).unwrap()
                + psi1(&mu.marginal(2), w).unwrap()
                + 1.0;
            let h = h2(&mu, z, w).unwrap();
            prop_assert!((h - split).norm() <= 1e-12 * (1.0 + h.norm()));
        }
    }

    #[test]
    fn psi_and_eta_reflect(seed in any::<u64>(), atoms in 1usize..6) {
        let mut s = MeasureSampler::new(seed);
        let nu = s.measure_1d(atoms);
        for _ in 0..5 {
            let z = s.off_torus_point();
            let lhs = psi1(&nu, reflect_point(z)).unwrap();
            let rhs = -1.0 - psi1(&nu, z).unwrap().conj();
            prop_assert!(gap(lhs, rhs) < 1e-10);
            if let (Ok(a), Ok(b)) = (eta(&nu, z), eta(&nu, reflect_point(z))) {
                prop_assert!((a * b.conj() - 1.0).norm() < 1e-10);
                if z.norm() < 1.0 {
                    prop_assert!(a.norm() <= z.norm() * (1.0 + 1e-12));
                } else {
                    prop_assert!(a.norm() >= z.norm() * (1.0 - 1e-12));
                }
            }
        }
    }

    #[test]
    fn measure_json_round_trips(seed in any::<u64>(), atoms in 1usize..8) {
        let mu = MeasureSampler::new(seed).measure_2d(atoms);
        let text = measure_2d_to_json(&mu);
        let back = parse_measure_2d(&text).unwrap();
        prop_assert_eq!(measure_2d_to_json(&back), text);
    }
}

proptest! {
    #![proptest_config(light_cases(24))]

    #[test]
    fn sigma_reflects(seed in any::<u64>(), atoms in 1usize..5) {
        let mut s = MeasureSampler::new(seed);
        let mu = s.px_measure_2d(atoms);
        let window = DomainWindow::default();
        for _ in 0..5 {
            let (z, w) = point_pair(&mut s, 0.25);
            let a = sigma_pointwise(&mu, z, w, &window);
            let b = sigma_pointwise(&mu, reflect_point(z), reflect_point(w), &window);
            if let (Ok(a), Ok(b)) = (a, b) {
                prop_assert!((a * b.conj() - 1.0).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eta_inverse_reflects(seed in any::<u64>(), atoms in 1usize..5) {
        let mut s = MeasureSampler::new(seed);
        let nu = s.px_measure_1d(atoms);
        let window = DomainWindow::default();
        for _ in 0..5 {
            let z = s.disk_point(0.25);
            if let (Ok(a), Ok(b)) = (
                eta_inv_pointwise(&nu, z, &window),
                eta_inv_pointwise(&nu, reflect_point(z), &window),
            ) {
                prop_assert!(gap(b, reflect_point(a)) < 1e-10);
                prop_assert!(gap(eta(&nu, a).unwrap(), z) < 1e-12);
            }
        }
    }

    #[test]
    fn sigma_matches_its_series(seed in any::<u64>(), atoms in 1usize..4) {
        let mut s = MeasureSampler::new(seed);
        let mu = s.px_measure_2d(atoms);
        let series = sigma_series(&mu, 40).unwrap();
        let window = DomainWindow::default();
        for _ in 0..4 {
            let (z, w) = (s.disk_point(0.05), s.disk_point(0.05));
            if let Ok(v) = sigma_pointwise(&mu, z, w, &window) {
                prop_assert!((v - series.eval(z, w)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn sigma_ignores_rotation(seed in any::<u64>(), atoms in 1usize..5) {
        let mut s = MeasureSampler::new(seed);
        let mu = s.measure_2d_in_arc(atoms, 0.8);
        let row = ArrayRow::new(1, vec![(mu.clone(), 1)]);
        let nu = accompany(&row, DEFAULT_CUTOFF).factors[0].0.clone();
        let window = DomainWindow::default();
        for _ in 0..5 {
            let (z, w) = point_pair(&mut s, 0.25);
            if let Ok(a) = sigma_pointwise(&mu, z, w, &window) {
                let b = sigma_pointwise(&nu, z, w, &window).unwrap();
                prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()));
            }
        }
    }

    #[test]
    fn h_has_positive_real_part(seed in any::<u64>(), atoms in 1usize..6) {
        let mut s = MeasureSampler::new(seed);
        let nu = s.measure_1d(atoms);
        for _ in 0..5 {
            let z = s.disk_point(0.98);
            let h = h_function(&nu, z);
            prop_assert!(h.re >= 0.0);
            prop_assert!((h + h_function(&nu, reflect_point(z)).conj()).norm() < 1e-10 * (1.0 + h.norm()));
        }
    }

    #[test]
    fn levy_sigma_reflects(seed in any::<u64>(), atoms in 1usize..5, rate in 0.1f64..3.0, a in 0.0f64..2.0) {
        let mut s = MeasureSampler::new(seed);
        let jumps = s.measure_2d(atoms);
        let ld = LevyData::poisson(rate, &jumps).unwrap();
        let normal = LevyData::normal(a);
        for data in [&ld, &normal] {
            for _ in 0..5 {
                let (z, w) = point_pair(&mut s, 0.9);
                let (Ok(x), Ok(y)) = (data.sigma(z, w), data.sigma(reflect_point(z), reflect_point(w))) else {
                    continue;
                };
                prop_assert!((x * y.conj() - 1.0).norm() < 1e-10 * (1.0 + x.norm() * y.norm()));
            }
        }
    }

    #[test]
    fn distinct_levy_data_separate(seed in any::<u64>(), rate in 0.2f64..2.0, bump in 1e-5f64..1e-2) {
        let mut s = MeasureSampler::new(seed);
        let jumps = s.measure_2d(3);
        let first = LevyData::poisson(rate, &jumps).unwrap();
        let second = LevyData::poisson(rate + bump, &jumps).unwrap();
        let probe = [0.2, 0.5, 0.8];
        let spread = probe
            .iter()
            .flat_map(|&r| probe.iter().map(move |&q| (Complex64::new(r, 0.1), Complex64::new(0.1, q))))
            .filter_map(|(z, w)| Some((first.sigma(z, w).ok()? - second.sigma(z, w).ok()?).norm()))
            .fold(0.0, f64::max);
        prop_assert!(spread > 1e-12);
    }
}

proptest! {
    #![proptest_config(light_cases(4))]

    #[test]
    fn convolution_is_associative(seed in any::<u64>()) {
        let mut s = MeasureSampler::new(seed);
        let (a, b, c) = (s.px_measure_2d(2), s.px_measure_2d(3), s.px_measure_2d(2));
        let left = bifree_convolve(&bifree_convolve(&a, &b).unwrap(), &c).unwrap();
        let right = bifree_convolve(&a, &bifree_convolve(&b, &c).unwrap()).unwrap();
        let (tl, tr) = (table(&left, 4), table(&right, 4));
        prop_assert!(tl.max_abs_diff(&tr, 4) < 1e-8);
        let check = tl.check();
        prop_assert!(check.passes(1e-7, 1e-7, 1e-7), "{:?}", check);
    }

    #[test]
    fn convolution_marginals_are_free(seed in any::<u64>()) {
        let mut s = MeasureSampler::new(seed);
        let law = bifree_convolve(&s.px_measure_2d(3), &s.px_measure_2d(3)).unwrap();
        let extraction = moment_table(&law, 4, DEFAULT_GRID, DEFAULT_RADIUS).unwrap();
        prop_assert!(extraction.diagnostics.marginal_gap < 1e-8);
    }

    #[test]
    fn sigma_rebuilds_from_table(seed in any::<u64>()) {
        let mut s = MeasureSampler::new(seed);
        let factors: Vec<(AtomicMeasure2D, u32)> = vec![(s.px_measure_2d(2), 1), (s.px_measure_2d(3), 1)];
        let law = bifree_convolve(&factors[0].0, &factors[1].0).unwrap();
        let t = table(&law, 13);
        let points: Vec<_> = (0..4).map(|_| (s.disk_point(0.05), s.disk_point(0.05))).collect();
        prop_assert!(sigma_self_consistency(&t, &factors, 12, &points).unwrap() < 1e-6);
    }

    #[test]
    fn weights_move_moments_continuously(seed in any::<u64>()) {
        let mut s = MeasureSampler::new(seed);
        let (a, b) = (s.px_measure_2d(3), s.px_measure_2d(2));
        let base = table(&bifree_convolve(&a, &b).unwrap(), 3);
        for eps in [1e-3, 1e-4] {
            let bent = a.with_density(|s, _| 1.0 + eps * s.re);
            let bent = bent.scaled(1.0 / bent.total_mass());
            let moved = table(&bifree_convolve(&bent, &b).unwrap(), 3);
            prop_assert!(moved.max_abs_diff(&base, 3) / eps < 10.0);
        }
    }

    #[test]
    fn roots_reconvolve(rate in 0.2f64..1.5, n in 2u32..=3) {
        let mut s = MeasureSampler::new(7);
        let ld = LevyData::poisson(rate, &s.px_measure_2d(2)).unwrap();
        let whole = table(&id_law(&ld).unwrap(), 4);
        let root = id_law(&id_root(&ld, n).unwrap()).unwrap();
        let again = table(&root.power(n).revalidated().unwrap(), 4);
        prop_assert!(again.max_abs_diff(&whole, 4) < 1e-8);
    }
}

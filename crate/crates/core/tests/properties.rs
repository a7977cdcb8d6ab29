use proptest::prelude::*;

use patchdyn::analysis::{extract_coefficients, extract_coefficients_with, slow_eigenvalue_series, ExtractionMethod, SweepCell};
use patchdyn::config::RunConfig;
use patchdyn::lattice::{
    bloch_eigenvalues, char_poly_bruteforce, make_ensemble, micro_rhs, DiffusivityProfile, MicroField,
};
use patchdyn::patch::{coupling_targets_all, slow_eigenvalue, CouplingSpec, MacroField, PatchGeometry, PatchScheme};
use patchdyn::theory::{char_coeff, lambda0_quadratic, lambda0_series, SymbolValue};

fn profile_strategy(kmin: usize, kmax: usize) -> impl Strategy<Value = DiffusivityProfile> {
    prop::collection::vec(0.3f64..4.0, kmin..=kmax).prop_map(|v| DiffusivityProfile::new(v).unwrap())
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * y.abs().max(1.0))
}

fn mf(values: Vec<f64>, geom: &PatchGeometry) -> MacroField {
    MacroField { values, spacing: geom.macro_spacing(), time: 0.0 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn micro_rhs_is_linear_and_conservative(
        p in profile_strategy(2, 5),
        reps in 1usize..4,
        seed in prop::collection::vec(-1.0f64..1.0, 40),
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
    ) {
        let len = p.period() * reps * 2;
        let u: Vec<f64> = (0..len).map(|i| seed[i % 40]).collect();
        let v: Vec<f64> = (0..len).map(|i| seed[(7 * i + 3) % 40]).collect();
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| alpha * a + beta * b).collect();
        let ru = micro_rhs(&MicroField::new(u, 1.0).unwrap(), &p).unwrap();
        let rv = micro_rhs(&MicroField::new(v, 1.0).unwrap(), &p).unwrap();
        let rw = micro_rhs(&MicroField::new(w, 1.0).unwrap(), &p).unwrap();
        for i in 0..len {
            prop_assert!((rw[i] - alpha * ru[i] - beta * rv[i]).abs() < 1e-12);
        }
        prop_assert!(ru.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn bloch_spectrum_is_shift_and_reflection_invariant(p in profile_strategy(2, 7), phase in 0.0f64..std::f64::consts::PI, s in 0usize..7) {
        let base = bloch_eigenvalues(&p, phase);
        prop_assert!(close(&bloch_eigenvalues(&p.shifted(s % p.period()), phase), &base, 1e-10));
        prop_assert!(close(&bloch_eigenvalues(&p.reversed(), phase), &base, 1e-10));
    }

    #[test]
    fn bruteforce_ignores_cyclic_shift(p in profile_strategy(2, 6), phase in 0.0f64..std::f64::consts::PI, s in 1usize..6) {
        let a = char_poly_bruteforce(&p, phase).unwrap();
        let b = char_poly_bruteforce(&p.shifted(s % p.period()), phase).unwrap();
        prop_assert!(close(&a, &b, 1e-10));
    }

    #[test]
    fn char_coeff_matches_bruteforce(p in profile_strategy(2, 5), phase in 0.0f64..std::f64::consts::FRAC_PI_2) {
        let b = char_poly_bruteforce(&p, phase).unwrap();
        for (q, bq) in b.iter().enumerate() {
            let c = char_coeff(q, &p, SymbolValue::from_phase(phase)).unwrap();
            prop_assert!((c - bq).abs() <= 1e-9 * bq.abs().max(1e-300), "q={} {} vs {}", q, c, bq);
        }
    }

    #[test]
    fn lambda0_is_shift_and_reflection_invariant(p in profile_strategy(2, 8), phase in 0.0f64..1.0, s in 1usize..8) {
        let sym = SymbolValue::from_phase(phase);
        let a = lambda0_quadratic(&p, sym);
        prop_assume!(a.is_ok());
        let a = a.unwrap();
        for q in [p.shifted(s % p.period()), p.reversed()] {
            prop_assert!((lambda0_quadratic(&q, sym).unwrap() - a).abs() <= 1e-12 * a.abs().max(1e-300));
        }
    }

    #[test]
    fn harmonic_mean_below_geometric(p in profile_strategy(2, 10)) {
        prop_assert!(p.harmonic_mean() <= p.geometric_mean() * (1.0 + 1e-14));
    }

    #[test]
    fn ensemble_weight_is_twice_period(p in profile_strategy(2, 10)) {
        let e = make_ensemble(&p);
        prop_assert_eq!(e.total_weight(), 2 * p.period());
        prop_assert!(e.multiplicities().iter().all(|m| *m > 0));
    }

    #[test]
    fn symbol_in_range(phase in -10.0f64..10.0) {
        let s = SymbolValue::from_phase(phase).s2();
        prop_assert!((-4.0..=0.0).contains(&s));
    }

    #[test]
    fn geometry_buffers_sit_one_shift_from_core(n in 1usize..12, b_frac in 0.0f64..1.0, extra in 1usize..6) {
        let b = ((n as f64) * b_frac) as usize % n;
        let geom = PatchGeometry::new(n, b, 1.0, 2 * n + extra).unwrap();
        let shift = (n - b) as i64;
        prop_assert!((geom.r() * geom.macro_spacing() - shift as f64).abs() < 1e-12);
        let core: Vec<i64> = geom.core().collect();
        let right: Vec<i64> = geom.right_buffer().collect();
        let left: Vec<i64> = geom.left_buffer().collect();
        prop_assert_eq!(right, core.iter().map(|i| i + shift).collect::<Vec<_>>());
        prop_assert_eq!(left, core.iter().map(|i| i - shift).collect::<Vec<_>>());
        prop_assert_eq!(*geom.right_buffer().end(), n as i64);
    }

    #[test]
    fn sweep_flags_are_integer_exact(k in 2usize..13, n in 2usize..13, b in 0usize..12) {
        prop_assume!(b < n);
        let c = SweepCell { period: k, n, b };
        prop_assert_eq!(c.ideal_nb(), (n - b) % k == 0);
        prop_assert_eq!(c.ideal_2b1(), (2 * b + 1) % k == 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn patch_step_fixes_constants(p in profile_strategy(2, 4), c in -3.0f64..3.0) {
        let geom = PatchGeometry::new(3, 1, 1.0, 8).unwrap();
        let scheme = PatchScheme::new(&p, &geom, &CouplingSpec::default(), 0.05 / p.max(), true).unwrap();
        let mut state = scheme.seed(&mf(vec![c; 8], &geom)).unwrap();
        for _ in 0..5 {
            let before = state.clone();
            scheme.step(&mut state).unwrap();
            for (a, b) in state.fields.iter().flatten().flatten().zip(before.fields.iter().flatten().flatten()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn patch_step_is_linear(
        p in profile_strategy(2, 4),
        u in prop::collection::vec(-1.0f64..1.0, 8),
        v in prop::collection::vec(-1.0f64..1.0, 8),
        alpha in -2.0f64..2.0,
    ) {
        let geom = PatchGeometry::new(3, 1, 1.0, 8).unwrap();
        let scheme = PatchScheme::new(&p, &geom, &CouplingSpec::default(), 0.05 / p.max(), true).unwrap();
        let run = |x: &[f64]| {
            let mut s = scheme.seed(&mf(x.to_vec(), &geom)).unwrap();
            scheme.step(&mut s).unwrap();
            scheme.step(&mut s).unwrap();
            scheme.amplitude(&s).values
        };
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + alpha * b).collect();
        let (ru, rv, rw) = (run(&u), run(&v), run(&w));
        for j in 0..8 {
            prop_assert!((rw[j] - ru[j] - alpha * rv[j]).abs() < 1e-10);
        }
    }

    #[test]
    fn patch_step_commutes_with_reflection(p in profile_strategy(2, 5), u in prop::collection::vec(-1.0f64..1.0, 8)) {
        let geom = PatchGeometry::new(4, 2, 1.0, 10).unwrap();
        let scheme = PatchScheme::new(&p, &geom, &CouplingSpec::default(), 0.05 / p.max(), true).unwrap();
        let reflect = |x: &[f64]| (0..x.len()).map(|j| x[(x.len() - j) % x.len()]).collect::<Vec<_>>();
        let run = |x: Vec<f64>| {
            let mut s = scheme.seed(&mf(x, &geom)).unwrap();
            for _ in 0..3 {
                scheme.step(&mut s).unwrap();
            }
            scheme.amplitude(&s).values
        };
        let a = reflect(&run(u.clone()));
        let b = run(reflect(&u));
        prop_assert!(close(&a, &b, 1e-12));
    }

    #[test]
    fn buffer_averages_hit_targets(p in profile_strategy(2, 4), u in prop::collection::vec(-1.0f64..1.0, 8)) {
        let geom = PatchGeometry::new(4, 1, 1.0, 10).unwrap();
        let spec = CouplingSpec::default();
        let scheme = PatchScheme::new(&p, &geom, &spec, 0.05 / p.max(), true).unwrap();
        let mut state = scheme.seed(&mf(u, &geom)).unwrap();
        let width = (2 * geom.b() + 1) as f64;
        for _ in 0..4 {
            let targets = coupling_targets_all(&scheme.amplitude(&state), &geom, &spec).unwrap();
            scheme.step(&mut state).unwrap();
            for (patch, t) in state.fields.iter().zip(&targets) {
                for f in patch {
                    let left: f64 = geom.left_buffer().map(|i| f[geom.index(i)]).sum::<f64>() / width;
                    let right: f64 = geom.right_buffer().map(|i| f[geom.index(i)]).sum::<f64>() / width;
                    prop_assert!((left - t.0).abs() < 1e-10 && (right - t.1).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn slow_eigenvalue_symmetries(p in profile_strategy(2, 4), s in 1usize..4, theta in 0.05f64..1.0) {
        let geom = PatchGeometry::new(4, 1, 1.0, 10).unwrap();
        let spec = CouplingSpec::default();
        let base = slow_eigenvalue(&p, &geom, &spec, theta, true).unwrap();
        prop_assert!(base.lambda.im.abs() < 1e-10);
        prop_assert!((base.amplitude(&geom) - 1.0).norm() < 1e-12);
        for q in [p.shifted(s % p.period()), p.reversed()] {
            let other = slow_eigenvalue(&q, &geom, &spec, theta, true).unwrap();
            prop_assert!((other.lambda.re - base.lambda.re).abs() < 1e-10 * base.lambda.re.abs().max(1e-3));
        }
    }

    #[test]
    fn single_configuration_is_real_on_ideal_cells(p in profile_strategy(2, 3), theta in 0.05f64..1.0) {
        let k = p.period();
        let geom = PatchGeometry::new(2 * k, k, 1.0, 4 * k + 2).unwrap();
        let mode = slow_eigenvalue(&p, &geom, &CouplingSpec::default(), theta, false).unwrap();
        prop_assert!(mode.lambda.im.abs() < 1e-10);
    }
}

#[test]
fn quadratic_coefficient_depends_on_ordering_not_symmetry() {
    let c2 = |v: &[f64]| char_coeff(2, &DiffusivityProfile::new(v.to_vec()).unwrap(), SymbolValue::from_phase(0.3)).unwrap();
    let base = c2(&[1.0, 2.0, 3.0, 4.0]);
    assert!((c2(&[1.0, 3.0, 2.0, 4.0]) - base).abs() > 1e-3);
    assert!((c2(&[2.0, 3.0, 4.0, 1.0]) - base).abs() < 1e-12);
    assert!((c2(&[4.0, 3.0, 2.0, 1.0]) - base).abs() < 1e-12);
}

#[test]
fn series_converges_at_sixth_order_for_period_two() {
    for v in [[1.0, 10.0], [0.5, 2.0], [3.0, 1.2]] {
        let p = DiffusivityProfile::new(v.to_vec()).unwrap();
        let gap = |phase: f64| {
            let s = SymbolValue::from_phase(phase);
            (lambda0_quadratic(&p, s).unwrap() - lambda0_series(&p).eval(s)).abs()
        };
        let order = (gap(0.1) / gap(0.05)).log2();
        assert!(order >= 5.5, "{v:?}: order {order}");
    }
}

#[test]
fn period_two_ensemble_has_two_doubled_configurations() {
    let e = make_ensemble(&DiffusivityProfile::new(vec![1.0, 3.0]).unwrap());
    assert_eq!(e.len(), 2);
    assert_eq!(e.multiplicities(), &[2, 2]);
}

#[test]
fn extraction_is_reflection_consistent() {
    let spec = CouplingSpec::default();
    for (n, b) in [(5usize, 3usize), (5, 1), (6, 2)] {
        let geom = PatchGeometry::for_sweep(n, b).unwrap();
        for eta in [vec![0.3, -0.1, 0.2], vec![0.1, 0.0, -0.2, 0.05], vec![0.2, 0.1, 0.0, -0.1, 0.3]] {
            let mut rev = eta.clone();
            rev.reverse();
            let a = slow_eigenvalue_series(&eta, &geom, &spec, true).unwrap();
            let r = slow_eigenvalue_series(&rev, &geom, &spec, true).unwrap();
            for (x, y) in a.iter().flatten().zip(r.iter().flatten()) {
                assert!((x - y).norm() < 1e-10, "{eta:?}: {x} vs {y}");
            }
        }
        let e = extract_coefficients(4, &geom, &spec, true).unwrap();
        assert!(e.drift < 1e-10, "drift {}", e.drift);
    }
}

fn fd_d_list(eta_step: f64, theta0: f64) -> Vec<f64> {
    let geom = PatchGeometry::for_sweep(4, 1).unwrap();
    let method = ExtractionMethod::FiniteDifference { eta_step, theta0 };
    extract_coefficients_with(3, &geom, &CouplingSpec::default(), true, method).unwrap().d_list()
}

#[test]
fn finite_difference_error_is_second_order_in_eta() {
    let geom = PatchGeometry::for_sweep(4, 1).unwrap();
    let exact = extract_coefficients(3, &geom, &CouplingSpec::default(), true).unwrap().d_list();
    let theta0 = std::f64::consts::PI / 32.0;
    let err = |e: f64| fd_d_list(e, theta0).iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ratio = err(2e-2) / err(1e-2);
    assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
}

#[test]
#[ignore = "halving eta_step from 1e-2 moves d_k by ~3e-5 relative: quartic terms in eta"]
fn finite_difference_eta_step_robustness() {
    let theta0 = std::f64::consts::PI / 8.0;
    let (a, b) = (fd_d_list(1e-2, theta0), fd_d_list(5e-3, theta0));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-7 * y.abs(), "{x} vs {y}");
    }
}

#[test]
fn same_config_gives_identical_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        "output_dir = {:?}\nseed = 4\n[profile]\nvalues = [1.0, 2.5, 0.7]\n[geometry]\nn = 3\nb = 1\npatches = 9\n[simulate]\nduration = 4.0\nsamples = 2\n",
        dir.path().to_str().unwrap()
    );
    let outputs: Vec<Vec<Vec<u8>>> = (0..2)
        .map(|_| {
            let cfg = RunConfig::from_toml(&text, &[]).unwrap();
            patchdyn::commands::cmd_coeffs(&cfg).unwrap();
            patchdyn::commands::cmd_eigen(&cfg).unwrap();
            patchdyn::commands::cmd_simulate(&cfg).unwrap();
            ["coeffs.csv", "eigen.csv", "trajectory_patch.csv", "divergence.csv"]
                .iter()
                .map(|f| std::fs::read(dir.path().join(f)).unwrap())
                .collect()
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(
        patchdyn::selftest::selftest(9, patchdyn::selftest::Mutation::None).render(),
        patchdyn::selftest::selftest(9, patchdyn::selftest::Mutation::None).render()
    );
}

#[test]
fn invalid_config_names_the_key() {
    let err = RunConfig::from_toml("[geometry]\nn = 4\nb = 4\n", &[]).unwrap_err().to_string();
    assert!(err.contains("geometry"), "{err}");
    let err = RunConfig::from_toml("[coupling]\ngama = 1.0\n", &[]).unwrap_err().to_string();
    assert!(err.contains("gama"), "{err}");
}

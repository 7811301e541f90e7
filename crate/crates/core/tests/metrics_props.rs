use proptest::prelude::*;
use qinstrument::channels::{maximally_entangled, random_stochastic_channel, ChoiMatrix, StochasticChannel};
use qinstrument::instruments::{
    ideal_instrument, random_general_implementation, random_nonuniform_model, random_uniform_model, ErrorModel,
    NonUniformStochasticModel, UniformStochasticModel,
};
use qinstrument::metrics::{
    build_report, diamond_identity_stochastic, fidelity_nonuniform_closed, fidelity_uniform_closed, fvg_bounds,
    instrument_diamond_lower, instrument_diamond_lower_max, instrument_diamond_upper, instrument_fidelity_branchwise,
    process_fidelity, saturating_probe, uniform_diamond_exact, ReportOptions,
};
use qinstrument::random::{density, seeded};

fn sc(dim: usize, entries: &[(usize, usize, f64)]) -> StochasticChannel<f64> {
    StochasticChannel::from_entries(dim, entries).unwrap()
}

fn uniform(d: usize, e: usize, entries: Vec<(usize, usize, StochasticChannel<f64>)>) -> UniformStochasticModel<f64> {
    UniformStochasticModel::from_entries(d, e, entries).unwrap()
}

#[test]
fn worked_uniform_example() {
    let m = uniform(2, 2, vec![(0, 0, sc(2, &[(0, 0, 0.72), (0, 1, 0.08)])), (1, 1, sc(2, &[(0, 0, 0.2)]))]);
    assert!((fidelity_uniform_closed(&m) - 0.72).abs() < 1e-15);
    assert!((2.0 * uniform_diamond_exact(&m) - 0.56).abs() < 1e-15);
    let ideal = ideal_instrument::<f64>(2, 2).unwrap();
    assert!((instrument_fidelity_branchwise(&ideal, &m.expand()).unwrap() - 0.72).abs() < 1e-12);
}

#[test]
fn readout_flip_example() {
    let m = uniform(2, 1, vec![(0, 0, sc(1, &[(0, 0, 0.8)])), (1, 1, sc(1, &[(0, 0, 0.2)]))]);
    assert!((uniform_diamond_exact(&m) - 0.2).abs() < 1e-15);
    let imp = m.expand();
    let lower = instrument_diamond_lower_max(&imp, 0, 0).unwrap();
    assert!((lower - 0.4).abs() < 1e-12);
    assert!(instrument_diamond_upper(&imp) >= 0.4 - 1e-12);
}

#[test]
fn saturating_probe_example() {
    // nu00 lambda00 = 0.9 with the rest of T_00 on X
    let m = uniform(2, 2, vec![(0, 0, sc(2, &[(0, 0, 0.9), (1, 0, 0.1)]))]);
    let imp = m.expand();
    let v = instrument_diamond_lower(&imp, &saturating_probe(2), 0).unwrap();
    assert!((v - 0.2).abs() < 1e-12, "{v}");
    assert!((2.0 * uniform_diamond_exact(&m) - 0.2).abs() < 1e-15);
}

#[test]
fn stochastic_identity_examples() {
    assert_eq!(diamond_identity_stochastic(&StochasticChannel::<f64>::identity(3).unwrap()), 0.0);
    assert!((diamond_identity_stochastic(&sc(2, &[(1, 0, 1.0)])) - 1.0).abs() < 1e-15);
    // trace decreasing: nu = 0.5, lambda = 1
    assert!((diamond_identity_stochastic(&sc(2, &[(0, 0, 0.5)])) - 0.25).abs() < 1e-15);
}

#[test]
fn report_invariants_on_random_models() {
    for seed in 0..100u64 {
        let (d, e) = (2 + (seed % 2) as usize, 1 + (seed / 2 % 2) as usize);
        let model = match seed % 3 {
            0 => ErrorModel::Uniform(random_uniform_model::<f64>(d, e, seed).unwrap()),
            1 => ErrorModel::NonUniform(random_nonuniform_model::<f64>(d, e, seed).unwrap()),
            _ => ErrorModel::General(random_general_implementation::<f64>(d, e, 2, seed).unwrap()),
        };
        let r = build_report(&model, &ReportOptions { restarts: 2, seed }).unwrap();
        assert!((-1e-12..=1.0 + 1e-12).contains(&r.fidelity), "seed {seed}: {}", r.fidelity);
        assert!(r.diamond_lower >= -1e-12 && r.diamond_lower <= r.diamond_upper + 1e-9, "seed {seed}");
        assert!(r.diamond_lower <= 2.0 + 1e-12);
        if let Some(x) = r.diamond_exact {
            assert!(r.diamond_lower <= x + 1e-9 && x <= r.diamond_upper + 1e-9, "seed {seed}");
        }
        assert_eq!(r.per_branch_trace_distances.len(), d);
        assert!(r.per_branch_trace_distances.iter().all(|&t| (-1e-12..=1.0 + 1e-12).contains(&t)));
        assert_eq!(r.nu00.is_some(), seed % 3 != 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stochastic_process_fidelity_is_identity_weight(seed in any::<u64>(), dim in 1usize..=4, nu in 0.0f64..=1.0) {
        let t = random_stochastic_channel::<f64>(dim, nu, seed, 1.0).unwrap();
        let id = ChoiMatrix::new(dim, dim, maximally_entangled(dim)).unwrap();
        let f = process_fidelity(&t.kraus().choi(), &id).unwrap();
        prop_assert!((f - t.nu() * t.lambda()).abs() <= 1e-10);
    }

    #[test]
    fn uniform_fidelity_closed_form(seed in any::<u64>(), d in 2usize..=3, e in 1usize..=2) {
        let m = random_uniform_model::<f64>(d, e, seed).unwrap();
        let ideal = ideal_instrument::<f64>(d, e).unwrap();
        let direct = instrument_fidelity_branchwise(&ideal, &m.expand()).unwrap();
        prop_assert!((direct - fidelity_uniform_closed(&m)).abs() <= 1e-10);
        prop_assert!((fidelity_uniform_closed(&m) - m.nu00() * m.lambda00()).abs() <= 1e-14);
    }

    #[test]
    fn nonuniform_fidelity_closed_form(seed in any::<u64>(), d in 2usize..=3, e in 1usize..=2) {
        let m: NonUniformStochasticModel<f64> = random_nonuniform_model(d, e, seed).unwrap();
        let ideal = ideal_instrument::<f64>(d, e).unwrap();
        let direct = instrument_fidelity_branchwise(&ideal, &m.expand()).unwrap();
        prop_assert!((direct - fidelity_nonuniform_closed(&m)).abs() <= 1e-10);
    }

    #[test]
    fn saturating_probe_hits_the_exact_value(seed in any::<u64>(), d in 2usize..=3, e in 1usize..=3) {
        let m = random_uniform_model::<f64>(d, e, seed).unwrap();
        let imp = m.expand();
        let exact = 2.0 * uniform_diamond_exact(&m);
        let best = (0..d).map(|j| instrument_diamond_lower(&imp, &saturating_probe(e), j).unwrap()).fold(0.0, f64::max);
        prop_assert!((best - exact).abs() <= 1e-10);
        prop_assert!(exact <= instrument_diamond_upper(&imp) + 1e-10);
    }

    #[test]
    fn lower_bound_is_below_upper(seed in any::<u64>(), d in 2usize..=3, e in 1usize..=2, restarts in 0usize..4) {
        let imp = random_general_implementation::<f64>(d, e, 2, seed).unwrap();
        let lo = instrument_diamond_lower_max(&imp, restarts, seed).unwrap();
        prop_assert!(lo >= 0.0 && lo <= instrument_diamond_upper(&imp) + 1e-10);
        prop_assert!(lo <= 2.0 + 1e-12);
    }

    #[test]
    fn fvg_bracket(seed in any::<u64>(), dim in 1usize..=4, rank in 1usize..=4) {
        let mut rng = seeded(seed, 0);
        let rho = density::<f64, _>(dim, rank.min(dim), &mut rng);
        let sigma = density::<f64, _>(dim, dim, &mut rng);
        let b = fvg_bounds(&rho, &sigma, None).unwrap();
        prop_assert!(b.lower <= b.middle + 1e-10 && b.middle <= b.upper + 1e-10);
    }
}

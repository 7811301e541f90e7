use num_complex::Complex64;
use proptest::prelude::*;
use qinstrument::channels::{maximally_entangled, random_stochastic_channel, ChoiMatrix, KrausChannel};
use qinstrument::linalg::ComplexMatrix;
use qinstrument::metrics::diamond_identity_stochastic;
use qinstrument::oracle::{diamond_lower_hillclimb, diamond_norm, DEFAULT_TOLERANCE};
use qinstrument::random::{complex_gaussian, seeded, uniform};

type M = ComplexMatrix<f64>;

const TOL: f64 = DEFAULT_TOLERANCE;

/// Difference of two random CP maps, trace preserving or not.
fn random_difference(din: usize, dout: usize, seed: u64) -> ChoiMatrix<f64> {
    let mut rng = seeded(seed, 0);
    let mut choi = || {
        let ops: Vec<M> = (0..2).map(|_| complex_gaussian(dout, din, &mut rng).scale(0.5)).collect();
        KrausChannel::new(din, dout, ops).unwrap().choi()
    };
    let (a, b) = (choi(), choi());
    a.difference(&b).unwrap()
}

fn identity_choi(dim: usize) -> ChoiMatrix<f64> {
    ChoiMatrix::new(dim, dim, maximally_entangled(dim)).unwrap()
}

/// `2 sin(w/2)` for phases within an arc of width `w < pi`, else 2.
fn unitary_distance(phases: &[f64]) -> f64 {
    let mut p: Vec<f64> = phases.iter().map(|x| x.rem_euclid(std::f64::consts::TAU)).collect();
    p.sort_by(f64::total_cmp);
    let n = p.len();
    let largest_gap = (0..n)
        .map(|k| if k + 1 < n { p[k + 1] - p[k] } else { p[0] + std::f64::consts::TAU - p[n - 1] })
        .fold(0.0, f64::max);
    let width = std::f64::consts::TAU - largest_gap;
    if width >= std::f64::consts::PI {
        2.0
    } else {
        2.0 * (width / 2.0).sin()
    }
}

#[test]
fn stochastic_agreement() {
    for seed in 0..200u64 {
        let dim = 1 + (seed % 3) as usize;
        let nu = 0.2 + 0.8 * (seed % 5) as f64 / 4.0;
        let t = random_stochastic_channel::<f64>(dim, nu, seed, 1.0).unwrap();
        let delta = t.kraus().choi().difference(&identity_choi(dim)).unwrap();
        let r = diamond_norm(&delta, TOL).unwrap();
        let closed = 2.0 * diamond_identity_stochastic(&t);
        assert!((r.value - closed).abs() <= 1e-5, "seed {seed}: {} vs {closed}", r.value);
        assert!(r.gap <= TOL);
    }
}

#[test]
fn hillclimb_is_monotone_in_restarts() {
    let delta = random_difference(2, 2, 17);
    let mut last = 0.0;
    for restarts in [1, 2, 4, 8, 16] {
        let v = diamond_lower_hillclimb(&delta, restarts, 5);
        assert!(v >= last, "{restarts}: {v} < {last}");
        last = v;
    }
}

#[test]
fn unitary_against_identity() {
    for seed in 0..20u64 {
        let mut rng = seeded(seed, 1);
        let dim = 2 + (seed % 2) as usize;
        let spread = uniform(&mut rng, 0.1, 4.0);
        let phases: Vec<f64> = (0..dim).map(|_| uniform(&mut rng, 0.0, spread)).collect();
        let u = M::diagonal(&phases.iter().map(|&t| Complex64::from_polar(1.0, t)).collect::<Vec<_>>());
        let delta = KrausChannel::unitary(u).choi().difference(&identity_choi(dim)).unwrap();
        let r = diamond_norm(&delta, TOL).unwrap();
        let want = unitary_distance(&phases);
        assert!((r.value - want).abs() <= 1e-5, "seed {seed}: {} vs {want}", r.value);
        let climbed = diamond_lower_hillclimb(&delta, 50, seed);
        assert!((climbed - r.value).abs() <= 1e-3, "seed {seed}: {climbed} vs {}", r.value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certified_and_above_hillclimb(seed in any::<u64>(), din in 1usize..=3, dout in 1usize..=3) {
        let delta = random_difference(din, dout, seed);
        let r = diamond_norm(&delta, TOL).unwrap();
        prop_assert!(r.gap <= TOL);
        prop_assert!(r.primal_bound <= r.value + 1e-12 && r.value <= r.dual_bound + 1e-12);
        let climbed = diamond_lower_hillclimb(&delta, 4, seed);
        prop_assert!(climbed <= r.dual_bound + 1e-9, "{} > {}", climbed, r.dual_bound);
    }

    #[test]
    fn homogeneous(seed in any::<u64>(), din in 1usize..=2, dout in 1usize..=3) {
        let delta = random_difference(din, dout, seed);
        let base = diamond_norm(&delta, TOL).unwrap().value;
        for c in [0.5, 2.0] {
            let v = diamond_norm(&delta.scaled(c), TOL).unwrap().value;
            prop_assert!((v - c * base).abs() <= 2.0 * TOL * c.max(1.0), "c = {}: {} vs {}", c, v, c * base);
        }
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>(), din in 1usize..=2, dout in 1usize..=3) {
        let a = random_difference(din, dout, seed);
        let b = random_difference(din, dout, seed.wrapping_add(1));
        let sum = a.difference(&b.scaled(-1.0)).unwrap();
        let na = diamond_norm(&a, TOL).unwrap().value;
        let nb = diamond_norm(&b, TOL).unwrap().value;
        let ns = diamond_norm(&sum, TOL).unwrap().value;
        prop_assert!(ns <= na + nb + 2.0 * TOL);
    }
}

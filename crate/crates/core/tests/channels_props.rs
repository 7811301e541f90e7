use num_complex::Complex64;
use proptest::prelude::*;
use qinstrument::channels::{choi_nu_lambda, random_stochastic_channel, ChoiMatrix, KrausChannel, StochasticChannel};
use qinstrument::linalg::{col_vec, eigvalsh, ComplexMatrix, DensityMatrix};
use qinstrument::random::{complex_gaussian, density, seeded};
use qinstrument::Tolerances;

type M = ComplexMatrix<f64>;

fn pauli(k: usize) -> M {
    let rows: [[(f64, f64); 4]; 4] = [
        [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)],
        [(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
        [(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)],
        [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)],
    ];
    let r = rows[k];
    M::from_fn(2, 2, |i, j| Complex64::new(r[2 * i + j].0, r[2 * i + j].1))
}

/// Trace-preserving channel with `r` random Kraus operators.
fn random_channel(din: usize, dout: usize, r: usize, seed: u64) -> KrausChannel<f64> {
    let mut rng = seeded(seed, 0);
    let raw: Vec<M> = (0..r).map(|_| complex_gaussian(dout, din, &mut rng)).collect();
    let s = raw.iter().fold(M::zeros(din, din), |acc, g| acc + g.adjoint().matmul(g));
    let inv = qinstrument::linalg::eigh(&s.hermitian_part()).reconstruct_with(|x| 1.0 / x.sqrt());
    KrausChannel::new(din, dout, raw.iter().map(|g| g.matmul(&inv)).collect()).unwrap()
}

#[test]
fn choi_matches_term_summation() {
    let ch = KrausChannel::new(2, 2, vec![pauli(0).scale(0.75f64.sqrt()), pauli(1).scale(0.5)]).unwrap();
    let j = ch.choi();
    // (1/2) sum_{ij} |i><j| ⊗ C(|i><j|)
    let mut want = M::zeros(4, 4);
    for i in 0..2 {
        for k in 0..2 {
            let mut e = M::zeros(2, 2);
            e[(i, k)] = Complex64::new(1.0, 0.0);
            let out = ch.apply(&e).unwrap();
            for r in 0..2 {
                for s in 0..2 {
                    want[(i * 2 + r, k * 2 + s)] = out[(r, s)] * 0.5;
                }
            }
        }
    }
    assert!(j.matrix().max_abs_diff(&want) < 1e-15);
    assert!((j.trace() - 1.0).abs() < 1e-15);
    assert!(eigvalsh(j.matrix())[0] > -1e-15);
}

#[test]
fn depolarizing_choi_round_trip() {
    let j = ChoiMatrix::new(2, 2, M::identity(4).scale(0.25)).unwrap();
    let k = j.to_kraus().unwrap();
    assert_eq!(k.kraus_ops().len(), 4);
    assert!(k.choi().matrix().max_abs_diff(j.matrix()) < 1e-14);
}

#[test]
fn kraus_rank_examples() {
    let ops = vec![
        pauli(0).scale(0.7f64.sqrt()),
        pauli(1).scale(0.1f64.sqrt()),
        pauli(2).scale(0.1f64.sqrt()),
        pauli(3).scale(0.1f64.sqrt()),
    ];
    assert_eq!(KrausChannel::new(2, 2, ops).unwrap().kraus_rank(), 4);
    let dephase = KrausChannel::new(2, 2, vec![M::basis_projector(2, 0), M::basis_projector(2, 1)]).unwrap();
    assert_eq!(dephase.kraus_rank(), 2);
}

#[test]
fn nu_lambda_from_choi() {
    let t = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.9), (1, 0, 0.1)]).unwrap();
    let (nu, lambda) = choi_nu_lambda(&t.kraus().choi());
    assert!((nu - 1.0).abs() < 1e-14 && (lambda - 0.9).abs() < 1e-14);
}

#[test]
fn sampler_respects_invariants() {
    for seed in 0..1000u64 {
        let dim = 1 + (seed % 4) as usize;
        let nu = (seed % 10) as f64 / 9.0;
        let t = random_stochastic_channel::<f64>(dim, nu, seed, 1.0).unwrap();
        assert!((t.nu() - nu).abs() < 1e-12);
        assert!(t.weights().iter().all(|&w| w >= 0.0));
        let k = t.kraus();
        let back = StochasticChannel::from_kraus(&k, &Tolerances::default()).unwrap();
        assert!(back.weights().iter().zip(t.weights()).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

proptest! {
    #[test]
    fn kraus_rank_is_choi_rank(seed in any::<u64>(), din in 1usize..=3, dout in 1usize..=3, extra in 0usize..9) {
        let r = (din.div_ceil(dout) + extra).min(din * dout);
        let ch = random_channel(din, dout, r, seed);
        prop_assert_eq!(ch.kraus_rank(), r);
        prop_assert_eq!(ch.choi().to_kraus().unwrap().kraus_ops().len(), r);
    }

    #[test]
    fn kraus_choi_round_trip(seed in any::<u64>(), din in 1usize..=3, dout in 1usize..=3, r in 1usize..=4) {
        // CP but not necessarily TP
        let mut rng = seeded(seed, 1);
        let ops: Vec<M> = (0..r).map(|_| complex_gaussian(dout, din, &mut rng)).collect();
        let j = KrausChannel::new(din, dout, ops).unwrap().choi();
        let back = j.to_kraus().unwrap().choi();
        prop_assert!(back.matrix().max_abs_diff(j.matrix()) <= 1e-8 * j.matrix().max_abs().max(1.0));
    }

    #[test]
    fn identity_vector_is_an_eigenvector(seed in any::<u64>(), dim in 1usize..=4, nu in 0.05f64..=1.0) {
        let t = random_stochastic_channel::<f64>(dim, nu, seed, 0.7).unwrap();
        let j = t.normalized().choi();
        let v = col_vec(&M::identity(dim));
        let jv: Vec<Complex64> = (0..v.len()).map(|r| (0..v.len()).map(|c| j.matrix()[(r, c)] * v[c]).sum()).collect();
        for (x, y) in jv.iter().zip(&v) {
            prop_assert!((x - y * t.lambda()).norm() <= 1e-10);
        }
    }

    #[test]
    fn stochastic_kraus_are_orthogonal(seed in any::<u64>(), dim in 1usize..=4) {
        let t = random_stochastic_channel::<f64>(dim, 1.0, seed, 1.0).unwrap();
        let ops = t.kraus().into_kraus_ops();
        for (i, a) in ops.iter().enumerate() {
            for (k, b) in ops.iter().enumerate() {
                let ip = a.adjoint().matmul(b).trace();
                let want = if i == k { a.adjoint().matmul(a).trace() } else { Complex64::new(0.0, 0.0) };
                prop_assert!((ip - want).norm() <= 1e-10);
            }
        }
        // the identity-proportional operator carries weight nu * lambda
        prop_assert!((t.weight(0, 0) - t.nu() * t.lambda()).abs() <= 1e-12);
    }

    #[test]
    fn apply_agrees_with_superoperator(seed in any::<u64>(), din in 1usize..=3, dout in 1usize..=3, r in 1usize..=3) {
        let ch = random_channel(din, dout, r.max(din.div_ceil(dout)), seed);
        let rho: DensityMatrix<f64> = density(din, din, &mut seeded(seed, 2));
        let direct = ch.apply(rho.matrix()).unwrap();
        let s = ch.superoperator();
        let v = col_vec(rho.matrix());
        let out: Vec<Complex64> = (0..s.rows()).map(|i| (0..s.cols()).map(|k| s[(i, k)] * v[k]).sum()).collect();
        prop_assert!(col_vec(&direct).iter().zip(&out).all(|(a, b)| (a - b).norm() <= 1e-11));
        let via_choi = ch.choi().apply(rho.matrix()).unwrap();
        prop_assert!(via_choi.max_abs_diff(&direct) <= 1e-11);
    }
}

//! Channel representations (Kraus, superoperator, Choi), conversions, and
//! stochastic channels over the Weyl–Heisenberg basis.

mod choi;
pub mod json;
mod kraus;
mod stochastic;

pub use choi::ChoiMatrix;
pub use kraus::KrausChannel;
pub use stochastic::{
    choi_nu_lambda, nu_lambda, random_stochastic_channel, stochastic_parameters, weyl_index, weyl_operator,
    StochasticChannel, MAX_WEYL_DIM,
};
pub(crate) use stochastic::{sample_stochastic, sample_stochastic_with_lambda};

use crate::linalg::{col_vec, ComplexMatrix};
use crate::scalar::Real;

/// `Φ = col(I_D) col(I_D)^dagger / D`.
pub fn maximally_entangled<T: Real>(dim: usize) -> ComplexMatrix<T> {
    let v = col_vec(&ComplexMatrix::<T>::identity(dim));
    ComplexMatrix::outer(&v, &v).scale(T::one() / T::lit(dim as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{partial_trace, trace_norm};
    use crate::scalar::cr;
    use crate::tolerance::Tolerances;

    #[test]
    fn phi_examples() {
        assert_eq!(maximally_entangled::<f64>(1), ComplexMatrix::identity(1));
        let phi = maximally_entangled::<f64>(2);
        let mut expect = ComplexMatrix::zeros(4, 4);
        for j in [0, 3] {
            for k in [0, 3] {
                expect[(j, k)] = cr(0.5);
            }
        }
        assert_eq!(phi, expect);
        for keep in [0, 1] {
            let m = partial_trace(&phi, &[2, 2], &[keep]).unwrap();
            assert!(m.max_abs_diff(&ComplexMatrix::identity(2).scale(0.5)) < 1e-15);
        }
        assert!((trace_norm(&maximally_entangled::<f64>(3)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn choi_of_identity_is_phi() {
        let j = KrausChannel::<f64>::identity(2).choi();
        assert!(j.matrix().max_abs_diff(&maximally_entangled(2)) < 1e-15);
        assert_eq!(j.rank(&Tolerances::default()), 1);
        assert!((j.trace() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn choi_of_x_conjugation() {
        let x = weyl_operator::<f64>(2, 1, 0);
        let j = KrausChannel::unitary(x.clone()).choi();
        let v = col_vec(&x);
        let expect = ComplexMatrix::outer(&v, &v).scale(0.5);
        assert!(j.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn apply_examples() {
        let rho = ComplexMatrix::<f64>::from_real_rows(&[&[0.7, 0.1], &[0.1, 0.3]]).unwrap();
        assert_eq!(KrausChannel::identity(2).apply(&rho).unwrap(), rho);
        let x = KrausChannel::unitary(weyl_operator::<f64>(2, 1, 0));
        let out = x.apply(&ComplexMatrix::basis_projector(2, 0)).unwrap();
        assert_eq!(out, ComplexMatrix::basis_projector(2, 1));
        assert!(x.apply(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn kraus_rank_examples() {
        let u = weyl_operator::<f64>(3, 1, 2);
        assert_eq!(KrausChannel::unitary(u).kraus_rank(), 1);
        let pauli = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.7), (1, 0, 0.1), (1, 1, 0.1), (0, 1, 0.1)])
            .unwrap();
        assert_eq!(pauli.kraus().kraus_rank(), 4);
        let dephase = KrausChannel::new(
            2,
            2,
            vec![ComplexMatrix::<f64>::basis_projector(2, 0), ComplexMatrix::basis_projector(2, 1)],
        )
        .unwrap();
        assert_eq!(dephase.kraus_rank(), 2);
    }

    #[test]
    fn kraus_from_choi_examples() {
        let phi = ChoiMatrix::new(2, 2, maximally_entangled::<f64>(2)).unwrap();
        let k = phi.to_kraus().unwrap();
        assert_eq!(k.kraus_ops().len(), 1);
        let op = &k.kraus_ops()[0];
        // proportional to the identity with unit modulus
        let ratio = op[(0, 0)];
        assert!((ratio.norm() - 1.0).abs() < 1e-14);
        assert!(op.max_abs_diff(&ComplexMatrix::identity(2).scale_complex(ratio)) < 1e-14);

        let depol = ChoiMatrix::new(2, 2, ComplexMatrix::<f64>::identity(4).scale(0.25)).unwrap();
        let k = depol.to_kraus().unwrap();
        assert_eq!(k.kraus_ops().len(), 4);
        assert!(k.choi().matrix().max_abs_diff(depol.matrix()) < 1e-14);

        let not_psd = ChoiMatrix::new(2, 2, ComplexMatrix::<f64>::real_diagonal(&[1.0, -0.5, 0.25, 0.25])).unwrap();
        assert!(not_psd.to_kraus().is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::channels::ChoiMatrix;
use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, partial_trace, psd_part};
use crate::scalar::{c, cr, Real};

use super::dense::Dense;
use super::hillclimb::{seesaw, CMat};
use super::sdp::{self, Entry, Problem, Settings};
use super::to_f64_matrix;

/// Largest Choi side dimension `dim_in * dim_out` accepted by the oracle.
pub const MAX_CHOI_SIDE: usize = 144;

/// Largest number of SDP variables (after the exact reductions) accepted.
pub const MAX_SDP_VARIABLES: usize = 4096;

/// Default certified accuracy of [`diamond_norm`].
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// A diamond norm bracketed by an explicit input state (`primal_bound`) and
/// an explicit dual certificate (`dual_bound`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiamondNormResult {
    pub value: f64,
    pub primal_bound: f64,
    pub dual_bound: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// The reduced SDP: output indices split into classes that `C` never
/// couples, and whether `C` (hence an optimal dual) is real.
struct Layout {
    n: usize,
    m: usize,
    classes: Vec<Vec<usize>>,
    real: bool,
}

#[derive(Debug, Clone, Copy)]
struct Var {
    class: usize,
    p: usize,
    q: usize,
    imag: bool,
}

impl Layout {
    fn new(cm: &CMat, n: usize, m: usize) -> Self {
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let side = n * m;
        for row in 0..side {
            for col in 0..side {
                let z = cm[(row, col)];
                if z.re != 0.0 || z.im != 0.0 {
                    let (a, b) = (find(&mut parent, row % m), find(&mut parent, col % m));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut root_class = vec![usize::MAX; m];
        for r in 0..m {
            let root = find(&mut parent, r);
            if root_class[root] == usize::MAX {
                root_class[root] = classes.len();
                classes.push(Vec::new());
            }
            classes[root_class[root]].push(r);
        }
        let real = cm.as_slice().iter().all(|z| z.im == 0.0);
        Self { n, m, classes, real }
    }

    fn class_dim(&self, class: usize) -> usize {
        self.n * self.classes[class].len()
    }

    /// Global Choi index of local index `p` in `class`.
    fn global(&self, class: usize, p: usize) -> usize {
        let s = self.classes[class].len();
        (p / s) * self.m + self.classes[class][p % s]
    }

    fn variables(&self) -> Vec<Var> {
        let mut vars = Vec::new();
        for class in 0..self.classes.len() {
            let q = self.class_dim(class);
            for p in 0..q {
                for r in p..q {
                    vars.push(Var { class, p, q: r, imag: false });
                    if !self.real && r > p {
                        vars.push(Var { class, p, q: r, imag: true });
                    }
                }
            }
        }
        vars
    }

    fn realified(&self, size: usize) -> usize {
        if self.real {
            size
        } else {
            2 * size
        }
    }

    /// Appends the (realified) entries of the Hermitian basis element
    /// `E_pq + E_qp` or `i (E_pq - E_qp)` of a `size`-dimensional block.
    fn push_basis(&self, out: &mut Vec<Entry>, block: usize, size: usize, p: usize, q: usize, imag: bool, v: f64) {
        let mut push = |i, j, v| out.push(Entry { block, i, j, v });
        if imag {
            // imaginary part: +1 at (p, q), -1 at (q, p); realified as [[0, -Im], [Im, 0]]
            for (a, b, w) in [(p, q, v), (q, p, -v)] {
                push(a, b + size, -w);
                push(a + size, b, w);
            }
            return;
        }
        let pairs: &[(usize, usize)] = if p == q { &[(p, p)] } else { &[(p, q), (q, p)] };
        for &(a, b) in pairs {
            push(a, b, v);
            if !self.real {
                push(a + size, b + size, v);
            }
        }
    }

    fn realify(&self, h: &CMat) -> Dense {
        let k = h.rows();
        let size = self.realified(k);
        let mut out = Dense::zeros(size);
        for i in 0..k {
            for j in 0..k {
                let z = h[(i, j)];
                *out.at_mut(i, j) = z.re;
                if !self.real {
                    *out.at_mut(i + k, j + k) = z.re;
                    *out.at_mut(i, j + k) = -z.im;
                    *out.at_mut(i + k, j) = z.im;
                }
            }
        }
        out
    }

    fn problem(&self, cm: &CMat, vars: &[Var]) -> Problem {
        let nc = self.classes.len();
        let trace_block = 2 * nc;
        let mut blocks = Vec::with_capacity(2 * nc + 1);
        let mut c0 = Vec::with_capacity(2 * nc + 1);
        for class in 0..nc {
            let q = self.class_dim(class);
            let cc = CMat::from_fn(q, q, |i, j| cm[(self.global(class, i), self.global(class, j))]);
            let r = self.realify(&cc);
            let mut neg = r.clone();
            neg.d.iter_mut().for_each(|v| *v = -*v);
            blocks.push(self.realified(q));
            blocks.push(self.realified(q));
            c0.push(neg);
            c0.push(r);
        }
        blocks.push(self.realified(self.n));
        c0.push(Dense::zeros(self.realified(self.n)));

        let mut a = Vec::with_capacity(vars.len() + 1);
        let mut b = Vec::with_capacity(vars.len() + 1);
        // t: S_trace = t I - ...
        let mut t_entries = Vec::new();
        for i in 0..self.realified(self.n) {
            t_entries.push(Entry { block: trace_block, i, j: i, v: -1.0 });
        }
        a.push(t_entries);
        b.push(-1.0);
        for var in vars {
            let q = self.class_dim(var.class);
            let mut ent = Vec::new();
            for blk in [2 * var.class, 2 * var.class + 1] {
                self.push_basis(&mut ent, blk, q, var.p, var.q, var.imag, -1.0);
            }
            let s = self.classes[var.class].len();
            if var.p % s == var.q % s {
                self.push_basis(&mut ent, trace_block, self.n, var.p / s, var.q / s, var.imag, 1.0);
            }
            a.push(ent);
            b.push(0.0);
        }
        Problem { blocks, c: c0, a, b }
    }

    /// `Z` on the full Choi space from the solver's `y` (index 0 is `t`).
    fn dual_operator(&self, vars: &[Var], y: &[f64]) -> CMat {
        let side = self.n * self.m;
        let mut z = CMat::zeros(side, side);
        for (var, &v) in vars.iter().zip(&y[1..]) {
            let (gp, gq) = (self.global(var.class, var.p), self.global(var.class, var.q));
            if var.imag {
                z[(gp, gq)] += c(0.0, v);
                z[(gq, gp)] += c(0.0, -v);
            } else if gp == gq {
                z[(gp, gp)] += cr(v);
            } else {
                z[(gp, gq)] += cr(v);
                z[(gq, gp)] += cr(v);
            }
        }
        z
    }

    /// Input state from the trace-block multiplier, normalized and clamped.
    fn input_state(&self, x_trace: &Dense) -> CMat {
        let n = self.n;
        let rho = if self.real {
            CMat::from_fn(n, n, |i, j| cr(x_trace.at(i, j)))
        } else {
            CMat::from_fn(n, n, |i, j| {
                c(
                    0.5 * (x_trace.at(i, j) + x_trace.at(i + n, j + n)),
                    0.5 * (x_trace.at(i + n, j) - x_trace.at(i, j + n)),
                )
            })
        };
        let rho = psd_part(&rho.hermitian_part());
        let tr = rho.trace_re();
        if tr > 0.0 && tr.is_finite() {
            rho.scale(1.0 / tr)
        } else {
            CMat::identity(n).scale(1.0 / n as f64)
        }
    }
}

/// `||Δ||_◊` (full norm) of the Hermiticity-preserving map with Choi matrix
/// `delta`, certified to within `tol` by a feasible input state and a
/// feasible dual operator.
///
/// The SDP is `min t` over Hermitian `Z` with `Z ⪰ ±C` and
/// `t I ⪰ tr_out Z`, where `C = dim_in * J`; its dual maximizes
/// `<C, P0 - P1>` over `P0 + P1 = rho ⊗ I`. This is the standard two-block
/// diamond-norm SDP specialized to Hermitian `C` (`Y0 = Y1 = Z`). Output
/// indices that `C` never couples are split into separate blocks, and a
/// real `C` uses real symmetric variables; both reductions are exact.
pub fn diamond_norm<T: Real>(delta: &ChoiMatrix<T>, tol: f64) -> Result<DiamondNormResult> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (n, m) = (delta.dim_in(), delta.dim_out());
    let side = n * m;
    if side > MAX_CHOI_SIDE {
        return Err(Error::DimensionTooLarge { side, variables: None });
    }
    let cm = to_f64_matrix(delta.matrix()).hermitian_part().scale(n as f64);
    if cm.max_abs() == 0.0 {
        return Ok(DiamondNormResult {
            value: 0.0,
            primal_bound: 0.0,
            dual_bound: 0.0,
            gap: 0.0,
            iterations: 0,
        });
    }
    let layout = Layout::new(&cm, n, m);
    let vars = layout.variables();
    if vars.len() + 1 > MAX_SDP_VARIABLES {
        return Err(Error::DimensionTooLarge {
            side,
            variables: Some(vars.len() + 1),
        });
    }
    let problem = layout.problem(&cm, &vars);
    let sol = sdp::solve(&problem, &Settings::default());

    // dual certificate: shift Z until Z ± C ⪰ 0 on the full space
    let z = layout.dual_operator(&vars, &sol.y);
    let lo_minus = eigvalsh(&(&z - &cm)).first().copied().unwrap_or(0.0);
    let lo_plus = eigvalsh(&(&z + &cm)).first().copied().unwrap_or(0.0);
    let shift = (-lo_minus).max(-lo_plus).max(0.0);
    let reduced = partial_trace(&z, &[n, m], &[0])?;
    let top = eigvalsh(&reduced).last().copied().unwrap_or(0.0);
    let dual = top + shift * m as f64;

    // primal certificate: the input state, polished by alternating maximization
    let rho = layout.input_state(&sol.x[2 * layout.classes.len()]);
    let b0 = eigh(&rho).reconstruct_with(|x| x.max(0.0).sqrt());
    let (primal, _) = seesaw(&cm, n, m, b0, 500);

    let dual = dual.max(primal);
    let gap = dual - primal;
    if gap > tol {
        return Err(Error::Unconverged {
            primal_bound: primal,
            dual_bound: dual,
            iterations: sol.iterations,
        });
    }
    Ok(DiamondNormResult {
        value: 0.5 * (primal + dual),
        primal_bound: primal,
        dual_bound: dual,
        gap,
        iterations: sol.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{KrausChannel, StochasticChannel};
    use crate::instruments::UniformStochasticModel;
    use crate::linalg::ComplexMatrix;

    fn unitary_diff(u: ComplexMatrix<f64>) -> ChoiMatrix<f64> {
        let id = KrausChannel::identity(u.rows()).choi();
        KrausChannel::unitary(u).choi().difference(&id).unwrap()
    }

    #[test]
    fn zero_map() {
        let z = ChoiMatrix::new(2, 3, ComplexMatrix::<f64>::zeros(6, 6)).unwrap();
        let r = diamond_norm(&z, 1e-6).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.gap, 0.0);
    }

    #[test]
    fn orthogonal_unitaries_reach_two() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let r = diamond_norm(&unitary_diff(x), 1e-6).unwrap();
        assert!((r.value - 2.0).abs() < 1e-6, "{r:?}");
        assert!(r.primal_bound <= r.dual_bound);
    }

    #[test]
    fn phase_rotation_matches_numerical_range() {
        for theta in [0.3f64, 1.1, 2.5] {
            let u = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
                (0, 0) => cr(1.0),
                (1, 1) => c(theta.cos(), theta.sin()),
                _ => cr(0.0),
            });
            let r = diamond_norm(&unitary_diff(u), 1e-7).unwrap();
            let expected = 2.0 * (theta / 2.0).sin();
            assert!((r.value - expected).abs() < 1e-6, "theta {theta}: {r:?}");
        }
    }

    #[test]
    fn stochastic_against_identity() {
        let t = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.9), (1, 0, 0.1)]).unwrap();
        let id = StochasticChannel::<f64>::identity(2).unwrap();
        let delta = t.choi().difference(&id.choi()).unwrap();
        let r = diamond_norm(&delta, 1e-7).unwrap();
        assert!((r.value - 0.2).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn uniform_instrument_full_channel() {
        let t = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.8), (0, 1, 0.1), (1, 1, 0.1)]).unwrap();
        let model = UniformStochasticModel::from_entries(2, 2, vec![(0, 0, t)]).unwrap();
        let ideal = UniformStochasticModel::<f64>::perfect(2, 2).unwrap().expand().full_channel().choi();
        let actual = model.expand().full_channel().choi();
        let delta = actual.difference(&ideal).unwrap();
        let r = diamond_norm(&delta, 1e-6).unwrap();
        assert!((r.value - 2.0 * (1.0 - 0.8)).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn homogeneous_and_subadditive() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let h = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]])
            .unwrap()
            .scale(0.5f64.sqrt());
        let a = unitary_diff(x);
        let b = unitary_diff(h);
        let na = diamond_norm(&a, 1e-7).unwrap().value;
        let nb = diamond_norm(&b, 1e-7).unwrap().value;
        let scaled = diamond_norm(&a.scaled(0.3), 1e-7).unwrap().value;
        assert!((scaled - 0.3 * na).abs() < 1e-6);
        let sum = ChoiMatrix::new(2, 2, a.matrix() + b.matrix()).unwrap();
        let ns = diamond_norm(&sum, 1e-7).unwrap().value;
        assert!(ns <= na + nb + 1e-6);
    }

    #[test]
    fn rejects_large_and_bad_tolerance() {
        let big = ChoiMatrix::new(13, 12, ComplexMatrix::<f64>::zeros(156, 156)).unwrap();
        assert!(matches!(
            diamond_norm(&big, 1e-6),
            Err(Error::DimensionTooLarge { side: 156, .. })
        ));
        let z = ChoiMatrix::new(1, 1, ComplexMatrix::<f64>::zeros(1, 1)).unwrap();
        assert!(matches!(diamond_norm(&z, 0.0), Err(Error::InvalidArgument(_))));
    }
}

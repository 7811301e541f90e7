//! Primal-dual interior-point method for block-diagonal real symmetric SDPs
//! in the pair
//!
//! ```text
//! (P)  min <C, X>   s.t. <A_k, X> = b_k,  X ⪰ 0
//! (D)  max b^T y    s.t. S = C - sum_k y_k A_k ⪰ 0
//! ```
//!
//! HKM search direction with Mehrotra predictor-corrector steps from an
//! infeasible scaled-identity start.

use super::dense::{cholesky_solve, Dense};

/// One nonzero of a constraint matrix. Both `(i, j)` and `(j, i)` must be
/// listed for off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Entry {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub v: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Problem {
    pub blocks: Vec<usize>,
    pub c: Vec<Dense>,
    pub a: Vec<Vec<Entry>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Settings {
    pub max_iterations: usize,
    /// Relative primal and dual infeasibility targets.
    pub feasibility: f64,
    /// Relative duality gap target.
    pub gap: f64,
    pub step_fraction: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            max_iterations: 120,
            feasibility: 1e-9,
            gap: 1e-9,
            step_fraction: 0.95,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub x: Vec<Dense>,
    pub y: Vec<f64>,
    pub iterations: usize,
    #[cfg_attr(not(test), allow(dead_code))]
    pub converged: bool,
}

type Blocks = Vec<Dense>;

impl Problem {
    fn a_of(&self, m: &[Dense]) -> Vec<f64> {
        self.a
            .iter()
            .map(|ent| ent.iter().map(|e| e.v * m[e.block].at(e.i, e.j)).sum())
            .collect()
    }

    fn a_adjoint(&self, y: &[f64]) -> Blocks {
        let mut out: Blocks = self.blocks.iter().map(|&n| Dense::zeros(n)).collect();
        for (ent, &yk) in self.a.iter().zip(y) {
            if yk == 0.0 {
                continue;
            }
            for e in ent {
                *out[e.block].at_mut(e.i, e.j) += yk * e.v;
            }
        }
        out
    }

    /// Schur complement `M_kl = tr(A_k X A_l S^{-1})`.
    fn schur(&self, x: &[Dense], sinv: &[Dense]) -> Dense {
        let m = self.a.len();
        let mut out = Dense::zeros(m);
        // constraints touching each block, with their entries there
        let mut per_block: Vec<Vec<(usize, Vec<Entry>)>> = vec![Vec::new(); self.blocks.len()];
        for (k, ent) in self.a.iter().enumerate() {
            let mut by_block: Vec<Vec<Entry>> = Vec::new();
            let mut ids: Vec<usize> = Vec::new();
            for e in ent {
                match ids.iter().position(|&bk| bk == e.block) {
                    Some(p) => by_block[p].push(*e),
                    None => {
                        ids.push(e.block);
                        by_block.push(vec![*e]);
                    }
                }
            }
            for (bk, list) in ids.into_iter().zip(by_block) {
                per_block[bk].push((k, list));
            }
        }
        for (bk, members) in per_block.iter().enumerate() {
            let n = self.blocks[bk];
            let (xb, sb) = (&x[bk], &sinv[bk]);
            let mut t = vec![0.0; n * n];
            for (idx, (k, ek)) in members.iter().enumerate() {
                // T[r][s] = sum_{(p,q,v) in A_k} v X[q][r] Sinv[s][p]
                t.iter_mut().for_each(|z| *z = 0.0);
                for e in ek {
                    let xr = &xb.d[e.j * n..(e.j + 1) * n];
                    for s in 0..n {
                        let f = e.v * sb.d[s * n + e.i];
                        if f == 0.0 {
                            continue;
                        }
                        for r in 0..n {
                            t[r * n + s] += f * xr[r];
                        }
                    }
                }
                for (l, el) in &members[idx..] {
                    let v: f64 = el.iter().map(|e| e.v * t[e.i * n + e.j]).sum();
                    *out.at_mut(*k, *l) += v;
                    if l != k {
                        *out.at_mut(*l, *k) += v;
                    }
                }
            }
        }
        out
    }
}

fn dot_blocks(a: &[Dense], b: &[Dense]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn norm_blocks(a: &[Dense]) -> f64 {
    a.iter().map(Dense::frobenius_sq).sum::<f64>().sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest `alpha` with `M + alpha dM ⪰ 0` given the Cholesky factor of `M`.
fn max_step(l: &[Dense], dm: &[Dense]) -> f64 {
    let mut alpha = f64::INFINITY;
    for (lb, db) in l.iter().zip(dm) {
        let y = lb.lower_solve(db);
        let mut yt = Dense::zeros(y.n);
        for i in 0..y.n {
            for j in 0..y.n {
                *yt.at_mut(i, j) = y.at(j, i);
            }
        }
        let mut w = lb.lower_solve(&yt);
        w.symmetrize();
        let lmin = w.min_eigenvalue();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}

struct Direction {
    dx: Blocks,
    dy: Vec<f64>,
    ds: Blocks,
}

pub(crate) fn solve(p: &Problem, settings: &Settings) -> Solution {
    let m = p.a.len();
    let n_tot: usize = p.blocks.iter().sum();
    let c_norm = norm_blocks(&p.c);
    let b_norm = norm(&p.b);

    // CSDP-style initial point
    let a_norms: Vec<f64> = p.a.iter().map(|e| e.iter().map(|x| x.v * x.v).sum::<f64>().sqrt()).collect();
    let mut alpha0: f64 = 1.0;
    for (k, &an) in a_norms.iter().enumerate() {
        alpha0 = alpha0.max((1.0 + p.b[k].abs()) / (1.0 + an));
    }
    let max_a = a_norms.iter().copied().fold(0.0, f64::max);
    let beta0 = (1.0 + max_a.max(c_norm)) / (n_tot as f64).sqrt();
    let mut x: Blocks = p.blocks.iter().map(|&n| Dense::scaled_identity(n, 10.0 * alpha0 * n as f64)).collect();
    let mut s: Blocks = p.blocks.iter().map(|&n| Dense::scaled_identity(n, 10.0 * beta0)).collect();
    let mut y = vec![0.0; m];

    let mut converged = false;
    let mut iterations = 0;
    for it in 0..settings.max_iterations {
        iterations = it;
        let ax = p.a_of(&x);
        let rp: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = p.a_adjoint(&y);
        let rd: Blocks = p
            .c
            .iter()
            .zip(&aty)
            .zip(&s)
            .map(|((c, a), sb)| {
                let mut r = c.clone();
                r.add_scaled(-1.0, a);
                r.add_scaled(-1.0, sb);
                r
            })
            .collect();
        let pobj = dot_blocks(&p.c, &x);
        let dobj: f64 = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let pinf = norm(&rp) / (1.0 + b_norm);
        let dinf = norm_blocks(&rd) / (1.0 + c_norm);
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= settings.feasibility && dinf <= settings.feasibility && rel_gap <= settings.gap {
            converged = true;
            break;
        }

        let Some(ls): Option<Vec<Dense>> = s.iter().map(Dense::cholesky).collect() else { break };
        let Some(lx): Option<Vec<Dense>> = x.iter().map(Dense::cholesky).collect() else { break };
        let sinv: Blocks = ls.iter().map(Dense::cholesky_inverse).collect();
        let mu = dot_blocks(&x, &s) / n_tot as f64;

        let mut schur = p.schur(&x, &sinv);
        let mut lm = schur.cholesky();
        if lm.is_none() {
            let reg = 1e-14 * (0..m).map(|k| schur.at(k, k)).fold(0.0, f64::max).max(1e-300);
            for k in 0..m {
                *schur.at_mut(k, k) += reg;
            }
            lm = schur.cholesky();
        }
        let Some(lm) = lm else { break };

        // X Rd S^{-1}
        let x_rd_sinv: Blocks = x.iter().zip(&rd).zip(&sinv).map(|((xb, r), si)| xb.matmul(r).matmul(si)).collect();
        let a_x_rd_sinv = p.a_of(&x_rd_sinv);
        let a_sinv = p.a_of(&sinv);

        let direction = |sigma_mu: f64, corr: Option<&Blocks>| -> Direction {
            let a_corr = corr.map(|c| p.a_of(c));
            let mut rhs: Vec<f64> = (0..m)
                .map(|k| p.b[k] - sigma_mu * a_sinv[k] + a_x_rd_sinv[k])
                .collect();
            if let Some(ac) = &a_corr {
                for (r, v) in rhs.iter_mut().zip(ac) {
                    *r += v;
                }
            }
            cholesky_solve(&lm, &mut rhs);
            let dy = rhs;
            let at_dy = p.a_adjoint(&dy);
            let ds: Blocks = rd
                .iter()
                .zip(&at_dy)
                .map(|(r, a)| {
                    let mut d = r.clone();
                    d.add_scaled(-1.0, a);
                    d
                })
                .collect();
            let dx: Blocks = (0..p.blocks.len())
                .map(|bk| {
                    // sigma mu S^{-1} - X - X dS S^{-1} - corr
                    let mut d = sinv[bk].clone();
                    d.d.iter_mut().for_each(|v| *v *= sigma_mu);
                    d.add_scaled(-1.0, &x[bk]);
                    d.add_scaled(-1.0, &x[bk].matmul(&ds[bk]).matmul(&sinv[bk]));
                    if let Some(c) = corr {
                        d.add_scaled(-1.0, &c[bk]);
                    }
                    d.symmetrize();
                    d
                })
                .collect();
            Direction { dx, dy, ds }
        };

        // predictor
        let pred = direction(0.0, None);
        let ap = (settings.step_fraction * max_step(&lx, &pred.dx)).min(1.0);
        let ad = (settings.step_fraction * max_step(&ls, &pred.ds)).min(1.0);
        let mut mu_aff = 0.0;
        for bk in 0..p.blocks.len() {
            let mut xa = x[bk].clone();
            xa.add_scaled(ap, &pred.dx[bk]);
            let mut sa = s[bk].clone();
            sa.add_scaled(ad, &pred.ds[bk]);
            mu_aff += xa.dot(&sa);
        }
        mu_aff /= n_tot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector: second-order term dXa dSa S^{-1}
        let corr: Blocks = (0..p.blocks.len())
            .map(|bk| pred.dx[bk].matmul(&pred.ds[bk]).matmul(&sinv[bk]))
            .collect();
        let dir = direction(sigma * mu, Some(&corr));
        let ap = (settings.step_fraction * max_step(&lx, &dir.dx)).min(1.0);
        let ad = (settings.step_fraction * max_step(&ls, &dir.ds)).min(1.0);
        for bk in 0..p.blocks.len() {
            x[bk].add_scaled(ap, &dir.dx[bk]);
            s[bk].add_scaled(ad, &dir.ds[bk]);
        }
        for (yk, d) in y.iter_mut().zip(&dir.dy) {
            *yk += ad * d;
        }
        iterations = it + 1;
    }
    Solution {
        x,
        y,
        iterations,
        converged,
    }
}

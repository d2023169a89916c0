//! Dense primal-dual interior-point solver for small Hermitian SDPs.
//!
//! Problems are stated over a list of Hermitian PSD blocks `X_k`:
//!
//! ```text
//! maximize   sum_k Re Tr(C_k X_k)
//! subject to sum_k Re Tr(A_ik X_k) =  b_i
//!            sum_k Re Tr(G_jk X_k) <= h_j
//!            X_k >= 0
//! ```
//!
//! Each Hermitian block is embedded as the real symmetric matrix
//! `[[Re X, -Im X], [Im X, Re X]]`, and each inequality gets a nonnegative
//! slack stored as a 1x1 block, giving a real standard-form SDP. That is solved
//! by an infeasible path-following method with the HKM search direction and
//! Mehrotra's predictor-corrector. The dual iterate doubles as a certificate:
//! a solution is only returned when the duality gap and the residuals meet the
//! acceptance thresholds.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::real::RealMatrix;
use crate::linalg::{eigh, ComplexMatrix, C64, HERMITIAN_TOL};

/// Largest block side accepted.
pub const MAX_BLOCK_DIM: usize = 16;
/// Maximum constraint violation accepted in a returned solution.
pub const MAX_VIOLATION: f64 = 1e-8;
/// Maximum duality gap accepted in a returned solution.
pub const MAX_GAP: f64 = 1e-7;

const STEP_FRACTION: f64 = 0.98;
const STOP_TOL: f64 = 1e-10;
const DEFAULT_MAX_ITERS: usize = 120;

/// Sparse-over-blocks linear form `sum_k Re Tr(A_k X_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearForm {
    terms: Vec<(usize, ComplexMatrix)>,
}

impl LinearForm {
    pub fn new(terms: Vec<(usize, ComplexMatrix)>) -> Self {
        Self { terms }
    }

    pub fn single(block: usize, a: ComplexMatrix) -> Self {
        Self {
            terms: vec![(block, a)],
        }
    }

    pub fn terms(&self) -> &[(usize, ComplexMatrix)] {
        &self.terms
    }

    /// Evaluate on a set of block values.
    pub fn eval(&self, blocks: &[ComplexMatrix]) -> f64 {
        self.terms
            .iter()
            .map(|(k, a)| a.re_trace_product(&blocks[*k]))
            .sum()
    }
}

/// Hermitian semidefinite program over one or more PSD blocks (maximization).
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    block_dims: Vec<usize>,
    objective: LinearForm,
    equalities: Vec<(LinearForm, f64)>,
    inequalities: Vec<(LinearForm, f64)>,
    max_iters: usize,
}

impl SdpProblem {
    /// Empty problem over PSD blocks of the given sides.
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::InvalidInput(
                "an SDP needs at least one variable block".into(),
            ));
        }
        if let Some(&d) = block_dims.iter().find(|&&d| d == 0 || d > MAX_BLOCK_DIM) {
            return Err(Error::InvalidInput(format!(
                "block dimension {d} outside 1..={MAX_BLOCK_DIM}"
            )));
        }
        Ok(Self {
            block_dims,
            objective: LinearForm::new(Vec::new()),
            equalities: Vec::new(),
            inequalities: Vec::new(),
            max_iters: DEFAULT_MAX_ITERS,
        })
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_equalities(&self) -> usize {
        self.equalities.len()
    }

    pub fn num_inequalities(&self) -> usize {
        self.inequalities.len()
    }

    pub fn set_max_iters(&mut self, n: usize) {
        self.max_iters = n.max(1);
    }

    fn check_form(&self, form: &LinearForm) -> Result<()> {
        for (k, a) in form.terms() {
            let d = *self
                .block_dims
                .get(*k)
                .ok_or_else(|| Error::DimMismatch(format!("block {k} does not exist")))?;
            if a.rows() != d || a.cols() != d {
                return Err(Error::DimMismatch(format!(
                    "coefficient for block {k} is {}x{}, expected {d}x{d}",
                    a.rows(),
                    a.cols()
                )));
            }
            a.check_hermitian(HERMITIAN_TOL)?;
        }
        Ok(())
    }

    /// Maximize `form`.
    pub fn set_objective(&mut self, form: LinearForm) -> Result<()> {
        self.check_form(&form)?;
        self.objective = form;
        Ok(())
    }

    /// `form = rhs`.
    pub fn add_equality(&mut self, form: LinearForm, rhs: f64) -> Result<()> {
        self.check_form(&form)?;
        self.equalities.push((form, rhs));
        Ok(())
    }

    /// `form <= rhs`.
    pub fn add_le(&mut self, form: LinearForm, rhs: f64) -> Result<()> {
        self.check_form(&form)?;
        self.inequalities.push((form, rhs));
        Ok(())
    }

    /// `form >= rhs`.
    pub fn add_ge(&mut self, form: LinearForm, rhs: f64) -> Result<()> {
        let neg = LinearForm::new(form.terms.into_iter().map(|(k, a)| (k, -&a)).collect());
        self.add_le(neg, -rhs)
    }

    /// Largest violation of the constraints (PSD included) at `blocks`.
    pub fn violation(&self, blocks: &[ComplexMatrix]) -> f64 {
        let mut v: f64 = 0.0;
        for (f, b) in &self.equalities {
            v = v.max((f.eval(blocks) - b).abs());
        }
        for (f, h) in &self.inequalities {
            v = v.max(f.eval(blocks) - h);
        }
        for x in blocks {
            let (vals, _) = eigh(x);
            v = v.max(-vals[0]);
        }
        v
    }
}

/// Per-iteration record of the interior-point path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterTrace {
    pub iter: usize,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub gap: f64,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
}

/// Optimal blocks plus the certificate data.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    /// Objective of the primal point.
    pub value: f64,
    /// Objective of the dual point (an upper bound on the optimum up to the dual residual).
    pub dual_value: f64,
    pub blocks: Vec<ComplexMatrix>,
    pub iterations: usize,
    pub violation: f64,
    pub trace: Vec<IterTrace>,
}

impl SdpSolution {
    /// First block, for single-variable problems.
    pub fn optimizer(&self) -> &ComplexMatrix {
        &self.blocks[0]
    }
}

/// Real standard form: min <C, X> s.t. <A_i, X> = b_i over symmetric blocks.
struct StandardForm {
    dims: Vec<usize>,
    c: Vec<RealMatrix>,
    /// `a[i]` lists (block, coefficient) pairs.
    a: Vec<Vec<(usize, RealMatrix)>>,
    b: Vec<f64>,
}

/// `1/2 [[Re H, -Im H], [Im H, Re H]]`, so that `<embed(H), embed_x(X)> = Re Tr(H X)`.
fn embed_coefficient(h: &ComplexMatrix) -> RealMatrix {
    let n = h.rows();
    RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n, j / n);
        let v = h[(i % n, j % n)];
        // <A, Y> = sum A_ij Y_ij with symmetric Y; the blocks of H^T pair with Y.
        let val = match (bi, bj) {
            (0, 0) | (1, 1) => v.re,
            (0, 1) => -v.im,
            _ => v.im,
        };
        0.5 * val
    })
}

/// `X = 1/2 [(Y11 + Y22) + i (Y21 - Y12)]`.
fn extract_hermitian(y: &RealMatrix) -> ComplexMatrix {
    let n = y.rows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        C64::new(
            0.5 * (y[(i, j)] + y[(i + n, j + n)]),
            0.5 * (y[(i + n, j)] - y[(i, j + n)]),
        )
    })
}

impl StandardForm {
    fn build(p: &SdpProblem) -> Self {
        let n_herm = p.block_dims.len();
        let mut dims: Vec<usize> = p.block_dims.iter().map(|d| 2 * d).collect();
        dims.extend(std::iter::repeat_n(1, p.inequalities.len()));

        let mut c: Vec<RealMatrix> = dims.iter().map(|&d| RealMatrix::zeros(d, d)).collect();
        // Objective is maximized: minimize its negation.
        for (k, h) in p.objective.terms() {
            c[*k].add_scaled(-1.0, &embed_coefficient(h));
        }

        let embed_form = |f: &LinearForm| -> Vec<(usize, RealMatrix)> {
            let mut acc: Vec<(usize, RealMatrix)> = Vec::new();
            for (k, h) in f.terms() {
                let e = embed_coefficient(h);
                if let Some(slot) = acc.iter_mut().find(|(kk, _)| kk == k) {
                    slot.1.add_scaled(1.0, &e);
                } else {
                    acc.push((*k, e));
                }
            }
            acc
        };
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (f, rhs) in &p.equalities {
            a.push(embed_form(f));
            b.push(*rhs);
        }
        for (j, (f, rhs)) in p.inequalities.iter().enumerate() {
            let mut row = embed_form(f);
            row.push((n_herm + j, RealMatrix::identity(1)));
            a.push(row);
            b.push(*rhs);
        }
        Self { dims, c, a, b }
    }

    fn apply_a(&self, x: &[RealMatrix]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().map(|(k, m)| m.dot(&x[*k])).sum())
            .collect()
    }

    fn apply_at(&self, y: &[f64]) -> Vec<RealMatrix> {
        let mut out: Vec<RealMatrix> = self.dims.iter().map(|&d| RealMatrix::zeros(d, d)).collect();
        for (row, &yi) in self.a.iter().zip(y) {
            for (k, m) in row {
                out[*k].add_scaled(yi, m);
            }
        }
        out
    }

    fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

fn dot_blocks(a: &[RealMatrix], b: &[RealMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn norm_blocks(a: &[RealMatrix]) -> f64 {
    dot_blocks(a, a).sqrt()
}

fn norm_vec(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Inverse of a symmetric positive definite block via its Cholesky factor.
fn spd_inverse(m: &RealMatrix) -> Option<RealMatrix> {
    let l = m.cholesky()?;
    let li = l.lower_inverse();
    Some(li.transpose().matmul(&li))
}

/// Largest step `alpha` keeping `x + alpha dx` positive definite (infinite if unbounded).
fn max_step(x: &[RealMatrix], dx: &[RealMatrix]) -> Option<f64> {
    let mut alpha = f64::INFINITY;
    for (xk, dk) in x.iter().zip(dx) {
        let l = xk.cholesky()?;
        let li = l.lower_inverse();
        let mut s = li.matmul(dk).matmul(&li.transpose());
        s.symmetrize();
        let min = s.sym_eigenvalues()[0];
        if min < 0.0 {
            alpha = alpha.min(-1.0 / min);
        }
    }
    Some(alpha)
}

struct Direction {
    dx: Vec<RealMatrix>,
    dy: Vec<f64>,
    dz: Vec<RealMatrix>,
}

/// Solve `M dy = r` with `M` symmetric positive (semi)definite.
fn solve_schur(m: &RealMatrix, r: &[f64]) -> Option<Vec<f64>> {
    if let Some(l) = m.cholesky() {
        let sol = RealMatrix::cholesky_solve(&l, r);
        if sol.iter().all(|v| v.is_finite()) {
            return Some(sol);
        }
    }
    // Near-singular Schur complements: regularize lightly and retry.
    let scale = (0..m.rows())
        .map(|i| m[(i, i)].abs())
        .fold(0.0, f64::max)
        .max(1e-300);
    let mut reg = m.clone();
    for i in 0..m.rows() {
        reg[(i, i)] += 1e-13 * scale;
    }
    if let Some(l) = reg.cholesky() {
        return Some(RealMatrix::cholesky_solve(&l, r));
    }
    m.lu_solve(r)
}

/// HKM direction for complementarity target `rc` (the matrix `sigma mu I - XZ [- dXa dZa]`).
fn hkm_direction(
    sf: &StandardForm,
    x: &[RealMatrix],
    zinv: &[RealMatrix],
    schur: &RealMatrix,
    rp: &[f64],
    rd: &[RealMatrix],
    rc: &[RealMatrix],
) -> Option<Direction> {
    // rhs_i = rp_i - <A_i, rc Z^-1> + <A_i, X rd Z^-1>
    let mut w: Vec<RealMatrix> = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let mut t = rc[k].matmul(&zinv[k]);
        t.add_scaled(-1.0, &x[k].matmul(&rd[k]).matmul(&zinv[k]));
        t.symmetrize();
        w.push(t);
    }
    let aw = sf.apply_a(&w);
    let rhs: Vec<f64> = rp.iter().zip(&aw).map(|(r, a)| r - a).collect();
    let dy = solve_schur(schur, &rhs)?;
    let aty = sf.apply_at(&dy);
    let dz: Vec<RealMatrix> = rd
        .iter()
        .zip(&aty)
        .map(|(r, a)| {
            let mut t = r.clone();
            t.add_scaled(-1.0, a);
            t
        })
        .collect();
    let dx: Vec<RealMatrix> = (0..x.len())
        .map(|k| {
            let mut t = rc[k].clone();
            t.add_scaled(-1.0, &x[k].matmul(&dz[k]));
            let mut t = t.matmul(&zinv[k]);
            t.symmetrize();
            t
        })
        .collect();
    Some(Direction { dx, dy, dz })
}

/// Solve `p` to the acceptance tolerances.
pub fn sdp_solve(p: &SdpProblem) -> Result<SdpSolution> {
    let sf = StandardForm::build(p);
    let m = sf.b.len();
    let n_total = sf.total_dim() as f64;
    let n_blocks = sf.dims.len();

    // Starting point scaled to the data, as in common dense solvers.
    let norm_c = norm_blocks(&sf.c);
    let mut xi: f64 = 10.0f64.max(n_total.sqrt());
    let mut eta: f64 = 10.0f64.max(n_total.sqrt()).max(norm_c);
    for (row, bi) in sf.a.iter().zip(&sf.b) {
        let na: f64 = row.iter().map(|(_, a)| a.dot(a)).sum::<f64>().sqrt();
        xi = xi.max((1.0 + bi.abs()) / (1.0 + na));
        eta = eta.max(na);
    }
    let mut x: Vec<RealMatrix> = sf
        .dims
        .iter()
        .map(|&d| RealMatrix::identity(d).scaled(xi))
        .collect();
    let mut z: Vec<RealMatrix> = sf
        .dims
        .iter()
        .map(|&d| RealMatrix::identity(d).scaled(eta))
        .collect();
    let mut y = vec![0.0; m];

    let norm_b = norm_vec(&sf.b);
    let mut trace = Vec::new();
    let mut best_pinf_history: Vec<f64> = Vec::new();

    for iter in 0..p.max_iters {
        let ax = sf.apply_a(&x);
        let rp: Vec<f64> = sf.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = sf.apply_at(&y);
        let rd: Vec<RealMatrix> = (0..n_blocks)
            .map(|k| {
                let mut t = sf.c[k].clone();
                t.add_scaled(-1.0, &z[k]);
                t.add_scaled(-1.0, &aty[k]);
                t
            })
            .collect();
        let pobj = dot_blocks(&sf.c, &x);
        let dobj: f64 = sf.b.iter().zip(&y).map(|(b, yi)| b * yi).sum();
        let xz = dot_blocks(&x, &z);
        let mu = xz / n_total;
        let pinf = norm_vec(&rp) / (1.0 + norm_b);
        let dinf = norm_blocks(&rd) / (1.0 + norm_c);
        let relgap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        let rec = IterTrace {
            iter,
            primal_obj: -pobj,
            dual_obj: -dobj,
            gap: pobj - dobj,
            primal_infeas: pinf,
            dual_infeas: dinf,
        };
        log::debug!(
            "{{\"iter\":{},\"primal_obj\":{:e},\"dual_obj\":{:e},\"gap\":{:e},\"primal_infeas\":{:e},\"dual_infeas\":{:e}}}",
            rec.iter,
            rec.primal_obj,
            rec.dual_obj,
            rec.gap,
            rec.primal_infeas,
            rec.dual_infeas
        );
        trace.push(rec);

        if pinf < STOP_TOL && dinf < STOP_TOL && relgap < STOP_TOL && xz.abs() < 1e-9 {
            return finish(p, &x, -pobj, -dobj, iter, trace);
        }

        // Heuristic infeasibility detection: primal residual stalls while the
        // dual multipliers run away.
        best_pinf_history.push(pinf);
        let ynorm = norm_vec(&y);
        if iter >= 30 && ynorm > 1e8 * (1.0 + norm_c) {
            let old = best_pinf_history[iter - 15];
            if pinf > 0.5 * old && pinf > 1e-6 {
                return Err(Error::Infeasible(format!(
                    "primal residual stalled at {pinf:.3e} with |y| = {ynorm:.3e}"
                )));
            }
        }

        let zinv: Vec<RealMatrix> = match z.iter().map(spd_inverse).collect::<Option<Vec<_>>>() {
            Some(v) => v,
            None => break,
        };

        // Schur complement M_ij = <A_i, X A_j Z^-1>.
        let mut schur = RealMatrix::zeros(m, m);
        for j in 0..m {
            for (k, aj) in &sf.a[j] {
                let g = x[*k].matmul(aj).matmul(&zinv[*k]);
                for i in 0..m {
                    for (kk, ai) in &sf.a[i] {
                        if kk == k {
                            schur[(i, j)] += ai.dot(&g);
                        }
                    }
                }
            }
        }
        schur.symmetrize();

        // Predictor.
        let xz_prod: Vec<RealMatrix> = (0..n_blocks).map(|k| x[k].matmul(&z[k])).collect();
        let rc_aff: Vec<RealMatrix> = xz_prod.iter().map(|t| t.scaled(-1.0)).collect();
        let Some(aff) = hkm_direction(&sf, &x, &zinv, &schur, &rp, &rd, &rc_aff) else {
            break;
        };
        let (Some(ap), Some(ad)) = (max_step(&x, &aff.dx), max_step(&z, &aff.dz)) else {
            break;
        };
        let ap = ap.min(1.0);
        let ad = ad.min(1.0);
        let mut mu_aff = 0.0;
        for k in 0..n_blocks {
            let mut xa = x[k].clone();
            xa.add_scaled(ap, &aff.dx[k]);
            let mut za = z[k].clone();
            za.add_scaled(ad, &aff.dz[k]);
            mu_aff += xa.dot(&za);
        }
        mu_aff /= n_total;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let rc: Vec<RealMatrix> = (0..n_blocks)
            .map(|k| {
                let mut t = RealMatrix::identity(sf.dims[k]).scaled(sigma * mu);
                t.add_scaled(-1.0, &xz_prod[k]);
                t.add_scaled(-1.0, &aff.dx[k].matmul(&aff.dz[k]));
                t
            })
            .collect();
        let Some(dir) = hkm_direction(&sf, &x, &zinv, &schur, &rp, &rd, &rc) else {
            break;
        };
        let (Some(ap), Some(ad)) = (max_step(&x, &dir.dx), max_step(&z, &dir.dz)) else {
            break;
        };
        let ap = (STEP_FRACTION * ap).min(1.0);
        let ad = (STEP_FRACTION * ad).min(1.0);
        for k in 0..n_blocks {
            x[k].add_scaled(ap, &dir.dx[k]);
            x[k].symmetrize();
            z[k].add_scaled(ad, &dir.dz[k]);
            z[k].symmetrize();
        }
        for (yi, d) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * d;
        }
    }

    // Out of iterations (or lost positive definiteness): accept only if the
    // certificate still meets the acceptance thresholds.
    let pobj = dot_blocks(&sf.c, &x);
    let dobj: f64 = sf.b.iter().zip(&y).map(|(b, yi)| b * yi).sum();
    let iters = trace.len();
    finish(p, &x, -pobj, -dobj, iters, trace)
}

fn finish(
    p: &SdpProblem,
    x: &[RealMatrix],
    value: f64,
    dual_value: f64,
    iterations: usize,
    trace: Vec<IterTrace>,
) -> Result<SdpSolution> {
    let n_herm = p.block_dims.len();
    let blocks: Vec<ComplexMatrix> = x[..n_herm].iter().map(extract_hermitian).collect();
    let violation = p.violation(&blocks);
    let gap = (value - dual_value).abs();
    let dual_ok = trace.last().is_some_and(|t| t.dual_infeas < 1e-8);
    if violation > MAX_VIOLATION || gap > MAX_GAP || !dual_ok {
        return Err(Error::NumericalFailure(format!(
            "interior point stopped after {iterations} iterations with violation {violation:.3e}, gap {gap:.3e}"
        )));
    }
    let value = p.objective.eval(&blocks);
    Ok(SdpSolution {
        value,
        dual_value,
        blocks,
        iterations,
        violation,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};

    fn density_problem(d: usize, c: ComplexMatrix) -> SdpProblem {
        let mut p = SdpProblem::new(vec![d]).unwrap();
        p.set_objective(LinearForm::single(0, c)).unwrap();
        p.add_equality(LinearForm::single(0, ComplexMatrix::identity(d)), 1.0)
            .unwrap();
        p
    }

    #[test]
    fn linear_objective_on_states() {
        let s = sdp_solve(&density_problem(2, ComplexMatrix::diag(&[1.0, 0.0]))).unwrap();
        assert!((s.value - 1.0).abs() < 1e-7);
        assert!(
            s.optimizer()
                .max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0]))
                < 1e-6
        );
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let s = sdp_solve(&density_problem(2, x)).unwrap();
        assert!((s.value - 1.0).abs() < 1e-7);
        assert!(
            s.optimizer()
                .max_abs_diff(&ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap())
                < 1e-6
        );
    }

    #[test]
    fn complex_objective_uses_imaginary_parts() {
        let sy = ComplexMatrix::from_vec(
            2,
            2,
            vec![ZERO, C64::new(0.0, -1.0), C64::new(0.0, 1.0), ZERO],
        )
        .unwrap();
        let s = sdp_solve(&density_problem(2, sy)).unwrap();
        assert!((s.value - 1.0).abs() < 1e-7);
        assert!((s.optimizer()[(1, 0)] - C64::new(0.0, 0.5)).norm() < 1e-6);
    }

    #[test]
    fn inequality_constraints_bind() {
        // maximize <1|rho|1> subject to <0|rho|0> >= 0.7
        let mut p = density_problem(2, ComplexMatrix::diag(&[0.0, 1.0]));
        p.add_ge(LinearForm::single(0, ComplexMatrix::diag(&[1.0, 0.0])), 0.7)
            .unwrap();
        let s = sdp_solve(&p).unwrap();
        assert!((s.value - 0.3).abs() < 1e-7);
        assert!(s.violation <= MAX_VIOLATION);
        assert!((s.value - s.dual_value).abs() <= MAX_GAP);
    }

    #[test]
    fn helstrom_as_sdp() {
        let t0 = ComplexMatrix::from_real(2, 2, &[0.8, 0.3, 0.3, 0.2]).unwrap();
        let t1 = ComplexMatrix::diag(&[0.1, 0.9]);
        let diff = &t0 - &t1;
        let mut p = SdpProblem::new(vec![2, 2]).unwrap();
        p.set_objective(LinearForm::single(0, diff.clone()))
            .unwrap();
        // M + S = 1 entrywise over a Hermitian basis
        for (i, j) in [(0, 0), (1, 1), (0, 1)] {
            for imag in [false, true] {
                if i == j && imag {
                    continue;
                }
                let mut e = ComplexMatrix::zeros(2, 2);
                if i == j {
                    e[(i, i)] = ONE;
                } else if imag {
                    e[(i, j)] = C64::new(0.0, 1.0);
                    e[(j, i)] = C64::new(0.0, -1.0);
                } else {
                    e[(i, j)] = ONE;
                    e[(j, i)] = ONE;
                }
                let target = ComplexMatrix::identity(2).re_trace_product(&e);
                p.add_equality(LinearForm::new(vec![(0, e.clone()), (1, e)]), target)
                    .unwrap();
            }
        }
        let s = sdp_solve(&p).unwrap();
        let (vals, _) = eigh(&diff);
        let lam_plus: f64 = vals.iter().filter(|v| **v > 0.0).sum();
        assert!(
            (s.value - lam_plus).abs() < 1e-7,
            "{} vs {}",
            s.value,
            lam_plus
        );
    }

    #[test]
    fn deterministic() {
        let p = density_problem(3, ComplexMatrix::diag(&[0.3, 1.0, -0.2]));
        let a = sdp_solve(&p).unwrap();
        let b = sdp_solve(&p).unwrap();
        assert_eq!(a.blocks, b.blocks);
        assert_eq!(a.trace, b.trace);
    }

    #[test]
    fn infeasible_problem_is_reported() {
        let mut p = density_problem(2, ComplexMatrix::diag(&[1.0, 0.0]));
        p.add_ge(LinearForm::single(0, ComplexMatrix::diag(&[1.0, 0.0])), 1.5)
            .unwrap();
        let e = sdp_solve(&p).unwrap_err();
        assert!(
            matches!(e, Error::Infeasible(_) | Error::NumericalFailure(_)),
            "{e:?}"
        );
    }

    #[test]
    fn rejects_malformed_data() {
        assert!(SdpProblem::new(vec![17]).is_err());
        let mut p = SdpProblem::new(vec![2]).unwrap();
        assert!(p
            .add_equality(LinearForm::single(0, ComplexMatrix::identity(3)), 1.0)
            .is_err());
        let nh = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(p.add_equality(LinearForm::single(0, nh), 1.0).is_err());
        assert!(p
            .add_equality(LinearForm::single(1, ComplexMatrix::identity(2)), 1.0)
            .is_err());
    }
}

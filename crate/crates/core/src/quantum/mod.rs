//! States, channels and measurements of the prepare-and-measure scenario,
//! together with the evaluators built on them: the vacuum-weight energy
//! constraint, Helstrom discrimination, outcome statistics and the
//! entanglement witnesses.

pub mod random;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    eigh, kron_all, partial_transpose, realign, trace_norm, ComplexMatrix, DimList, C64,
};

/// Hermiticity tolerance for states.
pub const STATE_HERMITIAN_TOL: f64 = 1e-10;
/// Trace tolerance for states.
pub const STATE_TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue accepted (and clipped to zero) for a state.
pub const STATE_PSD_TOL: f64 = 1e-9;
/// Completeness tolerance for Kraus channels and POVMs.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Eigenvalues of `tau0 - tau1` at or below this are left out of the Helstrom projector.
pub const HELSTROM_ZERO_TOL: f64 = 1e-12;

/// Unit-trace positive semidefinite matrix with subsystem labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: DimList,
}

impl DensityMatrix {
    /// Validate and wrap `matrix`.
    ///
    /// Eigenvalues in `[-1e-9, 0)` are clipped to zero and the result is
    /// renormalized; anything more negative is rejected.
    pub fn new(matrix: ComplexMatrix, dims: DimList) -> Result<Self> {
        dims.check(&matrix)?;
        matrix.check_hermitian(STATE_HERMITIAN_TOL)?;
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TRACE_TOL || tr.im.abs() > STATE_TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let (vals, vecs) = eigh(&matrix);
        let min = vals.first().copied().unwrap_or(0.0);
        if min < -STATE_PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        let matrix = if min < 0.0 {
            let n = matrix.rows();
            let mut out = ComplexMatrix::zeros(n, n);
            let total: f64 = vals.iter().map(|v| v.max(0.0)).sum();
            for (k, &v) in vals.iter().enumerate() {
                if v <= 0.0 {
                    continue;
                }
                for i in 0..n {
                    for j in 0..n {
                        out[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj() * (v / total);
                    }
                }
            }
            out
        } else {
            matrix.hermitian_part()
        };
        Ok(Self { matrix, dims })
    }

    /// Normalize a positive semidefinite matrix by its trace and validate.
    pub fn from_unnormalized(matrix: ComplexMatrix, dims: DimList) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(matrix.scale(1.0 / tr), dims)
    }

    /// Projector onto a normalized pure state.
    pub fn pure(amplitudes: &[C64], dims: DimList) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState(format!("state vector has norm {norm}")));
        }
        let v = ComplexMatrix::column(amplitudes);
        Self::new(ComplexMatrix::projector(&v), dims)
    }

    /// Basis projector `|index><index|`.
    pub fn basis(dims: DimList, index: usize) -> Result<Self> {
        let d = dims.total();
        if index >= d {
            return Err(Error::DimMismatch(format!("basis index {index} >= {d}")));
        }
        let v = ComplexMatrix::ket(d, index);
        Self::new(ComplexMatrix::projector(&v), dims)
    }

    pub fn maximally_mixed(dims: DimList) -> Self {
        let d = dims.total();
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &DimList {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Reduced state on the subsystems in `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let m = crate::linalg::partial_trace(&self.matrix, &self.dims, keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let dims = DimList::new(kept.iter().map(|&k| self.dims.dims()[k]).collect())?;
        Self::new(m, dims)
    }

    /// Convex combination `p self + (1 - p) other`.
    pub fn mix(&self, p: f64, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimMismatch(
                "mixing states with different dims".into(),
            ));
        }
        Self::new(
            &self.matrix.scale(p) + &other.matrix.scale(1.0 - p),
            self.dims.clone(),
        )
    }
}

/// Completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    kraus_ops: Vec<ComplexMatrix>,
    in_dim: usize,
    out_dim: usize,
}

impl KrausChannel {
    /// Build a channel, checking shapes and `sum_i K_i^dagger K_i = 1`.
    pub fn new(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(kraus_ops)?;
        ch.check_completeness()?;
        Ok(ch)
    }

    /// Build a channel checking only shapes. [`apply_channel`] still
    /// rejects it if completeness fails.
    pub fn new_unchecked(kraus_ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus_ops.first().ok_or_else(|| {
            Error::InvalidInput("channel needs at least one Kraus operator".into())
        })?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if kraus_ops
            .iter()
            .any(|k| k.rows() != out_dim || k.cols() != in_dim)
        {
            return Err(Error::DimMismatch(
                "Kraus operators have differing shapes".into(),
            ));
        }
        Ok(Self {
            kraus_ops,
            in_dim,
            out_dim,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus_ops: vec![ComplexMatrix::identity(d)],
            in_dim: d,
            out_dim: d,
        }
    }

    /// Channel `rho -> Tr_E(V rho V^dagger)` for an isometry `V` into
    /// `out_dim x env_dim` (output is the most significant factor).
    pub fn from_isometry(v: &ComplexMatrix, out_dim: usize) -> Result<Self> {
        if out_dim == 0 || !v.rows().is_multiple_of(out_dim) {
            return Err(Error::DimMismatch(format!(
                "isometry with {} rows cannot split off an output of dimension {out_dim}",
                v.rows()
            )));
        }
        let env = v.rows() / out_dim;
        let ops = (0..env)
            .map(|e| ComplexMatrix::from_fn(out_dim, v.cols(), |i, j| v[(i * env + e, j)]))
            .filter(|k| k.max_abs() > 0.0)
            .collect();
        Self::new(ops)
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `max |sum_i K_i^dagger K_i - 1|`.
    pub fn completeness_deviation(&self) -> f64 {
        let mut acc = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus_ops {
            acc += &(&k.adjoint() * k);
        }
        acc.max_abs_diff(&ComplexMatrix::identity(self.in_dim))
    }

    pub fn check_completeness(&self) -> Result<()> {
        let deviation = self.completeness_deviation();
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompleteChannel { deviation });
        }
        Ok(())
    }
}

/// Positive operator-valued measure, one element per outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (b, e) in elements.iter().enumerate() {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimMismatch(format!(
                    "POVM element {b} has the wrong shape"
                )));
            }
            if e.hermitian_deviation() > COMPLETENESS_TOL {
                return Err(Error::InvalidPovm(format!("element {b} is not Hermitian")));
            }
            let (vals, _) = eigh(e);
            if vals[0] < -COMPLETENESS_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {b} has negative eigenvalue {:.3e}",
                    vals[0]
                )));
            }
            sum += e;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {dev:.3e}"
            )));
        }
        Ok(Self {
            elements: elements.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    /// Two-outcome measurement `{M0, 1 - M0}`.
    pub fn binary(m0: ComplexMatrix) -> Result<Self> {
        let m1 = &ComplexMatrix::identity(m0.rows()) - &m0;
        Self::new(vec![m0, m1])
    }

    /// Projective measurement in the computational basis.
    pub fn computational(d: usize) -> Self {
        Self {
            elements: (0..d)
                .map(|k| ComplexMatrix::projector(&ComplexMatrix::ket(d, k)))
                .collect(),
        }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    /// Outcome distribution `Tr(rho M_b)`.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|m| rho.re_trace_product(m))
            .collect()
    }
}

/// Upper bound `omega` on the non-vacuum weight of the message.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EnergyBound(f64);

impl EnergyBound {
    pub fn new(omega: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&omega) {
            return Err(Error::InvalidEnergy {
                omega,
                reason: "must lie in [0, 1]".into(),
            });
        }
        Ok(Self(omega))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Minimum vacuum weight `1 - omega`.
    pub fn vacuum_floor(self) -> f64 {
        1.0 - self.0
    }
}

/// Conditional distribution `p(b|x,y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    n_b: usize,
    n_x: usize,
    n_y: usize,
    probs: Vec<f64>,
}

impl CorrelationTable {
    /// Build from a closure, validating range and normalization.
    pub fn from_fn(
        n_b: usize,
        n_x: usize,
        n_y: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut probs = Vec::with_capacity(n_b * n_x * n_y);
        for b in 0..n_b {
            for x in 0..n_x {
                for y in 0..n_y {
                    probs.push(f(b, x, y));
                }
            }
        }
        let t = Self {
            n_b,
            n_x,
            n_y,
            probs,
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        for x in 0..self.n_x {
            for y in 0..self.n_y {
                let mut total = 0.0;
                for b in 0..self.n_b {
                    let p = self.get(b, x, y);
                    if !(-1e-9..=1.0 + 1e-9).contains(&p) {
                        return Err(Error::InvalidInput(format!(
                            "p({b}|{x},{y}) = {p} out of range"
                        )));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput(format!("p(.|{x},{y}) sums to {total}")));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, b: usize, x: usize, y: usize) -> f64 {
        self.probs[(b * self.n_x + x) * self.n_y + y]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_b, self.n_x, self.n_y)
    }

    /// `E_{xy} = p(0|x,y) - p(1|x,y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.get(0, x, y) - self.get(1, x, y)
    }
}

/// Apply `channel` to one subsystem of `state`.
pub fn apply_channel(
    channel: &KrausChannel,
    state: &DensityMatrix,
    subsystem: usize,
) -> Result<DensityMatrix> {
    channel.check_completeness()?;
    let dims = state.dims();
    let local = *dims
        .dims()
        .get(subsystem)
        .ok_or_else(|| Error::DimMismatch(format!("subsystem {subsystem} out of range")))?;
    if local != channel.in_dim() {
        return Err(Error::DimMismatch(format!(
            "channel acts on dimension {} but subsystem {subsystem} has dimension {local}",
            channel.in_dim()
        )));
    }
    let out_dims = dims.with_replaced(subsystem, channel.out_dim())?;
    let out = apply_kraus(channel, state.matrix(), dims, subsystem);
    DensityMatrix::new(out, out_dims)
}

/// Unchecked core of [`apply_channel`] on a raw operator.
pub(crate) fn apply_kraus(
    channel: &KrausChannel,
    m: &ComplexMatrix,
    dims: &DimList,
    subsystem: usize,
) -> ComplexMatrix {
    let before: usize = dims.dims()[..subsystem].iter().product();
    let after: usize = dims.dims()[subsystem + 1..].iter().product();
    let left = ComplexMatrix::identity(before);
    let right = ComplexMatrix::identity(after);
    let n = before * channel.out_dim() * after;
    let mut out = ComplexMatrix::zeros(n, n);
    for k in channel.kraus_ops() {
        let full = kron_all(&[&left, k, &right]);
        out += &full.sandwich(m);
    }
    out.hermitian_part()
}

/// `<0|tau^C|0>` for the message subsystem, the vacuum being basis vector 0.
pub fn vacuum_weight(state: &DensityMatrix, message_subsystem: usize) -> Result<f64> {
    vacuum_weight_of(state.matrix(), state.dims(), message_subsystem)
}

/// [`vacuum_weight`] on a raw (possibly unnormalized) operator.
pub fn vacuum_weight_of(
    m: &ComplexMatrix,
    dims: &DimList,
    message_subsystem: usize,
) -> Result<f64> {
    dims.check(m)?;
    if message_subsystem >= dims.len() {
        return Err(Error::DimMismatch(format!(
            "subsystem {message_subsystem} out of range"
        )));
    }
    let stride: usize = dims.dims()[message_subsystem + 1..].iter().product();
    let d = dims.dims()[message_subsystem];
    Ok((0..m.rows())
        .filter(|i| (i / stride).is_multiple_of(d))
        .map(|i| m[(i, i)].re)
        .sum())
}

/// Helstrom discrimination of two equiprobable states.
///
/// Returns `1/2 + 1/2 lambda_+(tau0 - tau1)` and the measurement whose first
/// element projects onto the positive eigenspace.
pub fn helstrom(tau0: &DensityMatrix, tau1: &DensityMatrix) -> Result<(f64, Povm)> {
    if tau0.dims() != tau1.dims() {
        return Err(Error::DimMismatch(
            "Helstrom inputs have different dims".into(),
        ));
    }
    let (w, m0) = helstrom_projector(tau0.matrix(), tau1.matrix());
    let m1 = &ComplexMatrix::identity(m0.rows()) - &m0;
    Ok((
        w,
        Povm {
            elements: vec![m0, m1],
        },
    ))
}

/// `(1/2 + 1/2 lambda_+(a - b), P_+)` for raw Hermitian operators.
pub fn helstrom_projector(a: &ComplexMatrix, b: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let diff = a - b;
    let (vals, vecs) = eigh(&diff);
    let n = diff.rows();
    let mut proj = ComplexMatrix::zeros(n, n);
    let mut pos = 0.0;
    for (k, &v) in vals.iter().enumerate() {
        if v <= HELSTROM_ZERO_TOL {
            continue;
        }
        pos += v;
        for i in 0..n {
            for j in 0..n {
                proj[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj();
            }
        }
    }
    (0.5 + 0.5 * pos, proj)
}

/// Success probability `1/2 Tr(tau0 M0) + 1/2 Tr(tau1 M1)` of a binary measurement.
pub fn discrimination_probability(
    tau0: &DensityMatrix,
    tau1: &DensityMatrix,
    povm: &Povm,
) -> Result<f64> {
    if povm.outcomes() != 2 || povm.dim() != tau0.dim() || tau0.dim() != tau1.dim() {
        return Err(Error::DimMismatch(
            "need a two-outcome POVM matching both states".into(),
        ));
    }
    Ok(0.5 * tau0.matrix().re_trace_product(&povm.elements[0])
        + 0.5 * tau1.matrix().re_trace_product(&povm.elements[1]))
}

/// Outcome statistics `p(b|x,y) = Tr(tau_x M_{b|y})`.
pub fn correlations(states: &[DensityMatrix], povms: &[Povm]) -> Result<CorrelationTable> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidInput("no states".into()))?;
    let p0 = povms
        .first()
        .ok_or_else(|| Error::InvalidInput("no measurements".into()))?;
    let n_b = p0.outcomes();
    for s in states {
        if s.dim() != first.dim() {
            return Err(Error::DimMismatch("states have differing dimension".into()));
        }
    }
    for p in povms {
        if p.dim() != first.dim() || p.outcomes() != n_b {
            return Err(Error::DimMismatch(
                "measurement does not match the states".into(),
            ));
        }
    }
    CorrelationTable::from_fn(n_b, states.len(), povms.len(), |b, x, y| {
        states[x].matrix().re_trace_product(&povms[y].elements[b])
    })
}

fn require_bipartite(state: &DensityMatrix) -> Result<()> {
    if state.dims().len() != 2 {
        return Err(Error::DimMismatch(format!(
            "expected a bipartite state, got dims {:?}",
            state.dims().dims()
        )));
    }
    Ok(())
}

/// PPT test: `(min eigenvalue of the partial transpose >= -1e-9, min eigenvalue)`.
pub fn is_ppt(state: &DensityMatrix) -> Result<(bool, f64)> {
    require_bipartite(state)?;
    let pt = partial_transpose(state.matrix(), state.dims(), 1)?;
    let (vals, _) = eigh(&pt);
    let min = vals[0];
    Ok((min >= -STATE_PSD_TOL, min))
}

/// Trace norm of the realigned state; values above 1 certify entanglement.
pub fn ccnr_value(state: &DensityMatrix) -> Result<f64> {
    require_bipartite(state)?;
    Ok(trace_norm(&realign(state.matrix(), state.dims())?))
}

/// `Tr(rho^2)`.
pub fn purity(state: &DensityMatrix) -> f64 {
    state.matrix().re_trace_product(state.matrix())
}

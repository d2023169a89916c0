//! Randomness of the receiver's outcome against an eavesdropper who controls
//! the shared entanglement.
//!
//! The eavesdropper picks a hidden branch `lambda` with probability `q`,
//! distributes post-encoding states `tau_x^lambda` whose B-marginals do not
//! depend on `x`, and keeps `lambda`. A guess of the outcome `b` for the
//! test input `x*` then succeeds with probability
//! `p_g = sum_lambda q(lambda) max_b Tr(tau_{x*}^lambda M_b)`.
//!
//! The optimized attacks search over these models by alternating SDPs on the
//! unnormalized branch states `sigma = q tau` and on Bob's measurement, each
//! round maximizing a linearization of the target. The guessing probability
//! is convex and the conditional entropy concave in the outcome
//! probabilities, so both linearizations give monotone rounds.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DimList};
use crate::optim::model::{hermitian_basis, marginal_equalities, marginal_gap, vacuum_projector};
use crate::optim::seesaw::repair_energy;
use crate::optim::{sdp_solve, LinearForm, SdpProblem, SeesawConfig};
use crate::quantum::random::random_unitary;
use crate::quantum::{helstrom, vacuum_weight, CorrelationTable, DensityMatrix, EnergyBound, Povm};
use crate::schemes::{build_scheme, optimize_r, SchemeKind, SchemeParams};

/// Accepted deviation from the observed success probability.
pub const OBSERVATION_TOL: f64 = 1e-7;

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    shannon_entropy(&[p, 1.0 - p])
}

/// Shannon entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.log2()).sum()
}

/// What Alice and Bob see: the success probability of the two-input game at
/// energy `omega`, plus the inputs whose outcome is used for randomness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ObservedStatistics {
    pub w2_obs: f64,
    #[serde(serialize_with = "ser_omega")]
    pub omega: EnergyBound,
    pub x_star: usize,
    pub y_star: usize,
}

fn ser_omega<S: serde::Serializer>(o: &EnergyBound, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(o.value())
}

impl ObservedStatistics {
    pub fn new(w2_obs: f64, omega: EnergyBound, x_star: usize, y_star: usize) -> Result<Self> {
        if !(0.5..=1.0).contains(&w2_obs) {
            return Err(Error::InvalidParams(format!(
                "observed success probability {w2_obs} outside [1/2, 1]"
            )));
        }
        if x_star > 1 || y_star != 0 {
            return Err(Error::InvalidParams(format!(
                "inputs must satisfy x* in {{0, 1}} and y* = 0, got ({x_star}, {y_star})"
            )));
        }
        Ok(Self {
            w2_obs,
            omega,
            x_star,
            y_star,
        })
    }
}

/// Branch weights, branch states `branch_states[lambda][x]` on message (x)
/// shared system, and Bob's binary measurement.
#[derive(Clone, Debug)]
pub struct AttackModel {
    pub q: Vec<f64>,
    pub branch_states: Vec<Vec<DensityMatrix>>,
    pub measurement: Povm,
}

impl AttackModel {
    /// Check the structural invariants at energy `omega`.
    pub fn validate(&self, omega: EnergyBound) -> Result<()> {
        let total: f64 = self.q.iter().sum();
        if (total - 1.0).abs() > 1e-9
            || self.q.iter().any(|&v| v < 0.0)
            || self.q.len() != self.branch_states.len()
        {
            return Err(Error::InvalidParams(
                "branch weights must form a distribution over the branches".into(),
            ));
        }
        for (l, branch) in self.branch_states.iter().enumerate() {
            for (x, t) in branch.iter().enumerate() {
                if vacuum_weight(t, 0)? < omega.vacuum_floor() - 1e-8 {
                    return Err(Error::InvalidEnergy {
                        omega: omega.value(),
                        reason: format!("branch {l}, input {x} has too little vacuum"),
                    });
                }
            }
            let d = branch[0].dims().dims()[0];
            let db = branch[0].dims().dims()[1];
            for t in &branch[1..] {
                if marginal_gap(branch[0].matrix(), t.matrix(), d, db) > 1e-7 {
                    return Err(Error::InvalidState(format!(
                        "branch {l} signals the input to the shared system"
                    )));
                }
            }
        }
        Ok(())
    }

    /// `P[lambda][b] = Tr(tau_x^lambda M_b)`.
    pub fn branch_outcomes(&self, x: usize) -> Vec<Vec<f64>> {
        self.branch_states
            .iter()
            .map(|b| self.measurement.probabilities(b[x].matrix()))
            .collect()
    }

    /// Statistics visible to Alice and Bob, `p(b | x)` averaged over branches.
    pub fn visible_statistics(&self) -> Result<CorrelationTable> {
        let n_x = self.branch_states[0].len();
        let per_x: Vec<Vec<Vec<f64>>> = (0..n_x).map(|x| self.branch_outcomes(x)).collect();
        CorrelationTable::from_fn(self.measurement.outcomes(), n_x, 1, |b, x, _| {
            self.q.iter().zip(&per_x[x]).map(|(q, p)| q * p[b]).sum()
        })
    }

    /// `p(b = x | x)` for each input.
    pub fn success_probabilities(&self) -> Result<Vec<f64>> {
        let t = self.visible_statistics()?;
        Ok((0..t.shape().1).map(|x| t.get(x, x, 0)).collect())
    }

    /// `H(B | lambda)` for input `x`: the outcome entropy given the
    /// eavesdropper's branch.
    pub fn conditional_entropy(&self, x_star: usize) -> f64 {
        self.q
            .iter()
            .zip(self.branch_outcomes(x_star))
            .map(|(q, p)| q * shannon_entropy(&p))
            .sum()
    }
}

/// Eavesdropper's guessing probability of Bob's outcome on input `x_star`.
pub fn guessing_probability(m: &AttackModel, x_star: usize) -> f64 {
    m.q.iter()
        .zip(m.branch_outcomes(x_star))
        .map(|(q, p)| q * p.iter().cloned().fold(0.0, f64::max))
        .sum()
}

/// Per-branch data of a model without entanglement: states on the message
/// alone and one measurement per `y`.
#[derive(Clone, Debug)]
pub struct QcBranch {
    pub states: Vec<DensityMatrix>,
    pub measurements: Vec<Povm>,
}

/// `(H_min, H)` of the outcome on `(x_star, y_star)` given the branch.
pub fn classical_entropies(
    branches: &[QcBranch],
    q: &[f64],
    x_star: usize,
    y_star: usize,
) -> Result<(f64, f64)> {
    if branches.len() != q.len() || branches.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "{} branches but {} weights",
            branches.len(),
            q.len()
        )));
    }
    let mut pg = 0.0;
    let mut h = 0.0;
    for (br, &ql) in branches.iter().zip(q) {
        let (Some(rho), Some(m)) = (br.states.get(x_star), br.measurements.get(y_star)) else {
            return Err(Error::ShapeMismatch(format!(
                "branch lacks input ({x_star}, {y_star})"
            )));
        };
        if m.dim() != rho.dim() {
            return Err(Error::ShapeMismatch(
                "measurement and state dimensions differ".into(),
            ));
        }
        let p = m.probabilities(rho.matrix());
        pg += ql * p.iter().cloned().fold(0.0, f64::max);
        h += ql * shannon_entropy(&p);
    }
    Ok((-pg.log2(), h))
}

/// Two-branch attack built from the optimal two-qutrit scheme: branch 0
/// sends its states as is, branch 1 swaps them, and the weight is chosen so
/// that the average success probability equals the observed one. Knowing
/// the branch, the eavesdropper guesses Bob's outcome with the scheme's full
/// success probability.
pub fn explicit_two_branch_attack(obs: ObservedStatistics) -> Result<AttackModel> {
    two_branch_attack(obs, SchemeKind::Qutrit)
}

fn two_branch_attack(obs: ObservedStatistics, kind: SchemeKind) -> Result<AttackModel> {
    let (r, w) = optimize_r(kind, obs.omega);
    if obs.w2_obs > w + 1e-12 || obs.w2_obs < 1.0 - w - 1e-12 {
        return Err(Error::InfeasibleObservation(format!(
            "observed {} outside the reachable range [{}, {}]",
            obs.w2_obs,
            1.0 - w,
            w
        )));
    }
    let q0 = if 2.0 * w - 1.0 < 1e-15 {
        0.5
    } else {
        ((obs.w2_obs - (1.0 - w)) / (2.0 * w - 1.0)).clamp(0.0, 1.0)
    };
    let scheme = build_scheme(kind, SchemeParams::new(obs.omega.value().min(0.5), r)?)?;
    let [t0, t1] = [scheme.post_states[0].clone(), scheme.post_states[1].clone()];
    let (_, measurement) = helstrom(&t0, &t1)?;
    Ok(AttackModel {
        q: vec![q0, 1.0 - q0],
        branch_states: vec![vec![t0.clone(), t1.clone()], vec![t1, t0]],
        measurement,
    })
}

/// How the observation constrains the attack.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ObservationMode {
    /// `p(b = x | x) = w2_obs` for both inputs.
    Exact,
    /// `p(b = x | x) >= w2_obs` for both inputs.
    AtLeast,
}

/// Shape of the attack search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttackOptions {
    /// Number of hidden branches.
    pub branches: usize,
    /// Dimension of the message and of the shared system.
    pub local_dim: usize,
    pub observation: ObservationMode,
}

impl Default for AttackOptions {
    fn default() -> Self {
        Self {
            branches: 2,
            local_dim: 3,
            observation: ObservationMode::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Target {
    Guessing,
    Entropy,
}

impl Target {
    /// Higher is better for the attacker.
    fn score(self, m: &AttackModel, x_star: usize) -> f64 {
        match self {
            Target::Guessing => guessing_probability(m, x_star),
            Target::Entropy => -m.conditional_entropy(x_star),
        }
    }

    /// Weights `c[lambda][b]` of the linearized target `sum c P`.
    fn weights(self, p: &[Vec<f64>]) -> Vec<[f64; 2]> {
        p.iter()
            .map(|pl| match self {
                Target::Guessing => {
                    if pl[0] >= pl[1] {
                        [1.0, 0.0]
                    } else {
                        [0.0, 1.0]
                    }
                }
                Target::Entropy => {
                    let tot = (pl[0] + pl[1]).max(1e-300);
                    pl.iter()
                        .map(|&v| (v / tot).max(1e-9).log2())
                        .collect::<Vec<_>>()
                        .try_into()
                        .expect("two outcomes")
                }
            })
            .collect()
    }
}

struct Engine {
    obs: ObservedStatistics,
    opts: AttackOptions,
    n: usize,
}

impl Engine {
    fn block(&self, l: usize, x: usize) -> usize {
        2 * l + x
    }

    fn add_observation(&self, p: &mut SdpProblem, form: LinearForm) -> Result<()> {
        match self.opts.observation {
            ObservationMode::Exact => p.add_equality(form, self.obs.w2_obs),
            ObservationMode::AtLeast => p.add_ge(form, self.obs.w2_obs),
        }
    }

    /// Best unnormalized branch states for a fixed measurement.
    fn state_step(&self, m0: &ComplexMatrix, c: &[[f64; 2]]) -> Result<Vec<ComplexMatrix>> {
        let (n, d, nl) = (self.n, self.opts.local_dim, self.opts.branches);
        let id = ComplexMatrix::identity(n);
        let m = [m0.clone(), &id - m0];
        let mut p = SdpProblem::new(vec![n; 2 * nl])?;
        let xs = self.obs.x_star;
        p.set_objective(LinearForm::new(
            (0..nl)
                .map(|l| {
                    (
                        self.block(l, xs),
                        &m[0].scale(c[l][0]) + &m[1].scale(c[l][1]),
                    )
                })
                .collect(),
        ))?;
        p.add_equality(
            LinearForm::new((0..nl).map(|l| (self.block(l, 0), id.clone())).collect()),
            1.0,
        )?;
        for l in 0..nl {
            for (form, rhs) in marginal_equalities(self.block(l, 0), self.block(l, 1), d, d) {
                p.add_equality(form, rhs)?;
            }
        }
        let energy = &vacuum_projector(d, d) - &id.scale(self.obs.omega.vacuum_floor());
        for k in 0..2 * nl {
            p.add_ge(LinearForm::single(k, energy.clone()), 0.0)?;
        }
        for x in 0..2 {
            let form = LinearForm::new((0..nl).map(|l| (self.block(l, x), m[x].clone())).collect());
            self.add_observation(&mut p, form)?;
        }
        Ok(sdp_solve(&p)?
            .blocks
            .iter()
            .map(|b| b.hermitian_part())
            .collect())
    }

    /// Best measurement for fixed branch states; returns `M0`.
    fn measurement_step(&self, sigma: &[ComplexMatrix], c: &[[f64; 2]]) -> Result<ComplexMatrix> {
        let (n, nl) = (self.n, self.opts.branches);
        let xs = self.obs.x_star;
        let mut p = SdpProblem::new(vec![n, n])?;
        let mut obj = [ComplexMatrix::zeros(n, n), ComplexMatrix::zeros(n, n)];
        for l in 0..nl {
            for (b, o) in obj.iter_mut().enumerate() {
                *o += &sigma[self.block(l, xs)].scale(c[l][b]);
            }
        }
        let [o0, o1] = obj;
        p.set_objective(LinearForm::new(vec![(0, o0), (1, o1)]))?;
        for e in hermitian_basis(n) {
            let rhs = e.trace().re;
            p.add_equality(LinearForm::new(vec![(0, e.clone()), (1, e)]), rhs)?;
        }
        for x in 0..2 {
            let mut s = ComplexMatrix::zeros(n, n);
            for l in 0..nl {
                s += &sigma[self.block(l, x)];
            }
            self.add_observation(&mut p, LinearForm::single(x, s))?;
        }
        Ok(sdp_solve(&p)?.blocks[0].hermitian_part())
    }

    /// Helstrom measurement of the scheme at a random `r` whose success
    /// probability exceeds the observation, blurred by a random effect within
    /// the remaining slack.
    fn seed_measurement<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<ComplexMatrix> {
        let kind = if self.opts.local_dim == 3 {
            SchemeKind::Qutrit
        } else {
            SchemeKind::Qubit
        };
        let omega = self.obs.omega.value().min(0.5);
        let r_max = SchemeParams::r_max(omega);
        for _ in 0..50 {
            let p = SchemeParams::new(omega, rng.random_range(0.0..=r_max)).ok()?;
            let Ok(w) = crate::schemes::closed_form_w2(kind, p) else {
                continue;
            };
            let slack = w - self.obs.w2_obs;
            if slack <= 1e-6 {
                continue;
            }
            let scheme = build_scheme(kind, p).ok()?;
            let (_, povm) = helstrom(&scheme.post_states[0], &scheme.post_states[1]).ok()?;
            let t = rng.random_range(0.0..0.5) * slack;
            let m = &povm.elements()[0].scale(1.0 - t) + &random_effect(self.n, rng).scale(t);
            return Some(m);
        }
        None
    }

    /// Normalize into a model; branches with negligible weight are dropped.
    fn model(&self, sigma: &[ComplexMatrix], m0: &ComplexMatrix) -> Result<AttackModel> {
        let d = self.opts.local_dim;
        let dims = DimList::new(vec![d, d])?;
        let mut q = Vec::new();
        let mut states = Vec::new();
        for l in 0..self.opts.branches {
            let w = sigma[self.block(l, 0)].trace().re;
            if w <= 1e-12 {
                continue;
            }
            let mut pair: Vec<ComplexMatrix> = (0..2)
                .map(|x| {
                    let s = &sigma[self.block(l, x)];
                    s.scale(1.0 / s.trace().re)
                })
                .collect();
            repair_energy(self.obs.omega, d, &mut pair);
            q.push(w);
            states.push(
                pair.into_iter()
                    .map(|t| DensityMatrix::new(t, dims.clone()))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let tot: f64 = q.iter().sum();
        let q = q.into_iter().map(|v| v / tot).collect();
        let measurement = Povm::binary(clip_effect(m0))?;
        Ok(AttackModel {
            q,
            branch_states: states,
            measurement,
        })
    }

    fn admissible(&self, m: &AttackModel) -> bool {
        if m.validate(self.obs.omega).is_err() {
            return false;
        }
        let Ok(succ) = m.success_probabilities() else {
            return false;
        };
        succ.iter().all(|&s| match self.opts.observation {
            ObservationMode::Exact => (s - self.obs.w2_obs).abs() <= OBSERVATION_TOL,
            ObservationMode::AtLeast => s >= self.obs.w2_obs - OBSERVATION_TOL,
        })
    }

    fn run(
        &self,
        target: Target,
        cfg: &SeesawConfig,
        index: usize,
        warm: &AttackModel,
    ) -> Option<(f64, AttackModel)> {
        let xs = self.obs.x_star;
        let mut m0 = warm.measurement.elements()[0].clone();
        let mut c = if index == 0 {
            target.weights(&warm.branch_outcomes(xs))
        } else {
            // measurement of a scheme that still reaches the observation, and
            // a random branch-to-guess assignment
            let mut rng = cfg.rng(index);
            if let Some(m) = self.seed_measurement(&mut rng) {
                m0 = m;
            }
            (0..self.opts.branches)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        [1.0, 0.0]
                    } else {
                        [0.0, 1.0]
                    }
                })
                .collect()
        };
        let mut best: Option<(f64, AttackModel)> = None;
        if index == 0 && self.admissible(warm) {
            best = Some((target.score(warm, xs), warm.clone()));
        }
        let mut last = f64::NEG_INFINITY;
        for round in 0..cfg.max_iters {
            let step = self
                .state_step(&m0, &c)
                .and_then(|sigma| Ok((self.measurement_step(&sigma, &c)?, sigma)))
                .and_then(|(m, sigma)| Ok((self.model(&sigma, &m)?, m)));
            let model = match step {
                Ok((model, m)) if self.admissible(&model) => {
                    m0 = m;
                    model
                }
                Ok(_) => {
                    log::debug!("attack restart {index} round {round}: inadmissible model");
                    break;
                }
                Err(e) => {
                    log::debug!("attack restart {index} round {round}: {e}");
                    break;
                }
            };
            let v = target.score(&model, xs);
            c = target.weights(&model.branch_outcomes(xs));
            if best.as_ref().is_none_or(|(b, _)| v > *b) {
                best = Some((v, model));
            }
            let done = v - last < cfg.convergence_tol;
            last = v;
            if done {
                break;
            }
        }
        best
    }
}

/// Measurement effect with eigenvalues clipped into `[0, 1]`.
fn clip_effect(m: &ComplexMatrix) -> ComplexMatrix {
    crate::linalg::hermitian_map(m, |v| v.clamp(0.0, 1.0))
}

fn random_effect<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(n, rng);
    let diag: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    u.sandwich(&ComplexMatrix::diag(&diag))
}

fn search(
    obs: ObservedStatistics,
    cfg: SeesawConfig,
    opts: AttackOptions,
    target: Target,
) -> Result<(AttackModel, usize)> {
    cfg.validate()?;
    if opts.branches == 0 || !(2..=3).contains(&opts.local_dim) {
        return Err(Error::InvalidParams(format!(
            "attacks need at least one branch and local dimension 2 or 3, got {opts:?}"
        )));
    }
    let kind = if opts.local_dim == 3 {
        SchemeKind::Qutrit
    } else {
        SchemeKind::Qubit
    };
    let warm = pad_branches(two_branch_attack(obs, kind)?, opts.branches);
    let engine = Engine {
        obs,
        opts,
        n: opts.local_dim * opts.local_dim,
    };
    // zero entropy cannot be beaten, so no search is needed
    if engine.admissible(&warm)
        && warm.conditional_entropy(obs.x_star) <= 1e-12
        && guessing_probability(&warm, obs.x_star) >= 1.0 - 1e-12
    {
        return Ok((warm, 1));
    }
    let runs: Vec<Option<(f64, AttackModel)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| engine.run(target, &cfg, i, &warm))
        .collect();
    let mut best: Option<(f64, AttackModel)> = None;
    let mut used = 0;
    for r in runs.into_iter().flatten() {
        used += 1;
        if best.as_ref().is_none_or(|(b, _)| r.0 > *b) {
            best = Some(r);
        }
    }
    let (_, model) = best.ok_or_else(|| {
        Error::OptimizationFailure("no restart produced an admissible attack".into())
    })?;
    log::debug!("attack search used {used} of {} restarts", cfg.restarts);
    Ok((model, used))
}

fn pad_branches(mut m: AttackModel, branches: usize) -> AttackModel {
    if branches < m.q.len() {
        // only seeds the measurement, so the heavier branch is enough
        let keep = if m.q[0] >= m.q[1] { 0 } else { 1 };
        m.q = vec![1.0];
        m.branch_states = vec![m.branch_states[keep].clone()];
        return m;
    }
    while m.q.len() < branches {
        m.q.push(0.0);
        m.branch_states.push(m.branch_states[0].clone());
    }
    m
}

/// Upper bound on the min-entropy of Bob's outcome given quantum side
/// information: `-log2` of the best guessing probability found. Returns the
/// bound, the model and the number of restarts that produced an admissible
/// model.
pub fn min_entropy_attack_with(
    obs: ObservedStatistics,
    cfg: SeesawConfig,
    opts: AttackOptions,
) -> Result<(f64, AttackModel, usize)> {
    let (model, used) = search(obs, cfg, opts, Target::Guessing)?;
    let pg = guessing_probability(&model, obs.x_star).min(1.0);
    Ok(((-pg.log2()).max(0.0), model, used))
}

pub fn min_entropy_attack(
    obs: ObservedStatistics,
    cfg: SeesawConfig,
) -> Result<(f64, AttackModel)> {
    min_entropy_attack_with(obs, cfg, AttackOptions::default()).map(|(h, m, _)| (h, m))
}

/// Upper bound on the conditional von Neumann entropy `H(B | Q_E)` of Bob's
/// outcome, minimized over attack models by majorize-minimize rounds.
pub fn vn_entropy_attack_with(
    obs: ObservedStatistics,
    cfg: SeesawConfig,
    opts: AttackOptions,
) -> Result<(f64, AttackModel, usize)> {
    let (model, used) = search(obs, cfg, opts, Target::Entropy)?;
    Ok((model.conditional_entropy(obs.x_star).max(0.0), model, used))
}

pub fn vn_entropy_attack(obs: ObservedStatistics, cfg: SeesawConfig) -> Result<(f64, AttackModel)> {
    vn_entropy_attack_with(obs, cfg, AttackOptions::default()).map(|(h, m, _)| (h, m))
}

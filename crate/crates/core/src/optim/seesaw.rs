//! Alternating search for the best two-input discrimination probability over
//! entanglement-assisted models of a given local dimension.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::{
    dilate, marginal_equalities, pm_warm_start, random_feasible_states, vacuum_projector,
};
use super::sdp::{sdp_solve, LinearForm, SdpProblem};
use crate::error::{Error, Result};
use crate::linalg::{partial_trace, ComplexMatrix, DimList};
use crate::quantum::{helstrom, helstrom_projector, EnergyBound, Povm};
use crate::schemes::Scheme;

/// Knobs shared by every seesaw search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    /// Alternation rounds per restart.
    pub max_iters: usize,
    /// Stop a restart once a round improves the objective by less than this.
    pub convergence_tol: f64,
    /// Number of starting points (the first one is deterministic).
    pub restarts: usize,
    pub rng_seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            convergence_tol: 1e-8,
            restarts: 20,
            rng_seed: 0,
        }
    }
}

impl SeesawConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.restarts == 0 || !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "seesaw needs max_iters >= 1, restarts >= 1 and a positive tolerance, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Generator for restart `index`; restarts are reproducible individually.
    pub(crate) fn rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed.wrapping_add(index as u64))
    }
}

/// Outcome of [`seesaw_w2`].
#[derive(Clone, Debug)]
pub struct SeesawOutcome {
    /// Helstrom value of the reconstructed model.
    pub w2: f64,
    pub model: Scheme,
    pub povm: Povm,
    /// Objective after each alternation round of the winning restart.
    pub history: Vec<f64>,
    /// Index of the winning restart.
    pub restart: usize,
}

pub(crate) fn check_dim(local_dim: usize) -> Result<()> {
    if !(2..=4).contains(&local_dim) {
        return Err(Error::InvalidParams(format!(
            "local dimension must be 2, 3 or 4, got {local_dim}"
        )));
    }
    Ok(())
}

/// Hermitian part of each block, rescaled to unit trace.
pub(crate) fn normalize_states(blocks: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
    blocks
        .iter()
        .map(|b| {
            let h = b.hermitian_part();
            let t = h.trace().re;
            h.scale(1.0 / t)
        })
        .collect()
}

/// State step: best pair of post-encoding states for fixed measurement
/// `m0` (outcome 0 guesses input 0).
fn state_step(
    omega: EnergyBound,
    d: usize,
    m0: &ComplexMatrix,
) -> Result<(f64, Vec<ComplexMatrix>)> {
    let n = d * d;
    let mut p = SdpProblem::new(vec![n, n])?;
    let m1 = &ComplexMatrix::identity(n) - m0;
    p.set_objective(LinearForm::new(vec![
        (0, m0.scale(0.5)),
        (1, m1.scale(0.5)),
    ]))?;
    p.add_equality(LinearForm::single(0, ComplexMatrix::identity(n)), 1.0)?;
    for (form, rhs) in marginal_equalities(0, 1, d, d) {
        p.add_equality(form, rhs)?;
    }
    let vac = vacuum_projector(d, d);
    for k in 0..2 {
        p.add_ge(LinearForm::single(k, vac.clone()), omega.vacuum_floor())?;
    }
    let sol = sdp_solve(&p)?;
    Ok((sol.value, normalize_states(&sol.blocks)))
}

/// Push the states back inside the energy constraint by mixing in "vacuum on
/// the message, common marginal on B", which keeps the marginals equal.
pub(crate) fn repair_energy(omega: EnergyBound, d: usize, states: &mut [ComplexMatrix]) {
    let dims = DimList::new(vec![d, d]).expect("nonzero dims");
    let vac = vacuum_projector(d, d);
    let floor = omega.vacuum_floor();
    for s in states.iter_mut() {
        let w = s.re_trace_product(&vac);
        if w >= floor || w >= 1.0 {
            continue;
        }
        let rho_b = partial_trace(s, &dims, &[1]).expect("consistent dims");
        let reset =
            crate::linalg::kron(&ComplexMatrix::projector(&ComplexMatrix::ket(d, 0)), &rho_b);
        let t = ((floor - w) / (1.0 - w) + 1e-13).min(1.0);
        *s = &s.scale(1.0 - t) + &reset.scale(t);
    }
}

struct Run {
    value: f64,
    states: Vec<ComplexMatrix>,
    history: Vec<f64>,
}

fn run_restart(omega: EnergyBound, d: usize, cfg: &SeesawConfig, index: usize) -> Result<Run> {
    let mut states = if index == 0 {
        pm_warm_start(omega, d).to_vec()
    } else {
        random_feasible_states(omega, d, &mut cfg.rng(index))
    };
    let (mut value, mut m0) = helstrom_projector(&states[0], &states[1]);
    let mut history = vec![value];
    for _ in 0..cfg.max_iters {
        let (_, next) = match state_step(omega, d, &m0) {
            Ok(r) => r,
            // keep what we have; later restarts may do better
            Err(e) if e.is_solver_failure() && history.len() > 1 => break,
            Err(e) => return Err(e),
        };
        let (v, m) = helstrom_projector(&next[0], &next[1]);
        history.push(v);
        let improved = v - value;
        if v > value {
            states = next;
            value = v;
            m0 = m;
        }
        if improved < cfg.convergence_tol {
            break;
        }
    }
    Ok(Run {
        value,
        states,
        history,
    })
}

/// Maximize the two-input discrimination probability over entanglement-assisted
/// models whose message and shared systems have dimension `local_dim`.
///
/// Restart 0 starts from the best model without entanglement, the rest from
/// random admissible states. Each round applies the Helstrom measurement and
/// then re-optimizes both post-encoding states by an SDP under the energy and
/// equal-marginal constraints. The winning states are turned back into an
/// explicit shared state and encoding channels.
pub fn seesaw_w2(omega: EnergyBound, local_dim: usize, cfg: SeesawConfig) -> Result<SeesawOutcome> {
    check_dim(local_dim)?;
    cfg.validate()?;
    let d = local_dim;
    let runs: Vec<Result<Run>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(omega, d, &cfg, i))
        .collect();
    let mut best: Option<(usize, Run)> = None;
    let mut last_err = None;
    for (i, r) in runs.into_iter().enumerate() {
        match r {
            Ok(run) => {
                if best.as_ref().is_none_or(|(_, b)| run.value > b.value) {
                    best = Some((i, run));
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    let (restart, mut run) = match best {
        Some(b) => b,
        None => {
            return Err(last_err
                .unwrap_or_else(|| Error::NumericalFailure("no seesaw restart finished".into())))
        }
    };
    log::debug!(
        "seesaw_w2 omega={} dim={d} best restart {restart} value {}",
        omega.value(),
        run.value
    );
    repair_energy(omega, d, &mut run.states);
    let model = dilate(&run.states, d, d)?;
    let (w2, povm) = helstrom(&model.post_states[0], &model.post_states[1])?;
    Ok(SeesawOutcome {
        w2,
        model,
        povm,
        history: run.history,
        restart,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optim::model::marginal_gap;
    use crate::quantum::vacuum_weight;
    use crate::schemes::{optimize_r, qc_optimal_w2, SchemeKind};

    fn om(w: f64) -> EnergyBound {
        EnergyBound::new(w).unwrap()
    }

    fn small(restarts: usize) -> SeesawConfig {
        SeesawConfig {
            restarts,
            ..SeesawConfig::default()
        }
    }

    #[test]
    fn threshold_energy_is_perfect() {
        let out = seesaw_w2(om(0.5), 2, small(2)).unwrap();
        assert!((out.w2 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn qubit_matches_closed_form() {
        let out = seesaw_w2(om(0.2), 2, small(6)).unwrap();
        let (_, w) = optimize_r(SchemeKind::Qubit, om(0.2));
        assert!((out.w2 - w).abs() < 1e-4, "{} vs {w}", out.w2);
    }

    #[test]
    fn history_is_monotone_and_model_is_admissible() {
        let out = seesaw_w2(om(0.1), 3, small(3)).unwrap();
        for w in out.history.windows(2) {
            assert!(w[1] >= w[0] - 1e-7);
        }
        assert!(out.w2 >= qc_optimal_w2(om(0.1)) - 1e-6 && out.w2 <= 1.0 + 1e-12);
        for t in &out.model.post_states {
            assert!(vacuum_weight(t, 0).unwrap() >= 0.9 - 1e-8);
        }
        let [t0, t1] = [&out.model.post_states[0], &out.model.post_states[1]];
        assert!(marginal_gap(t0.matrix(), t1.matrix(), 3, 3) <= 1e-7);
    }

    #[test]
    fn rejects_bad_config() {
        let bad = SeesawConfig {
            restarts: 0,
            ..SeesawConfig::default()
        };
        assert!(seesaw_w2(om(0.2), 2, bad).is_err());
        assert!(seesaw_w2(om(0.2), 5, SeesawConfig::default()).is_err());
    }
}

//! Boundary of the correlator region `(E0, E1)` reachable with shared
//! entanglement, for a single binary measurement.
//!
//! `E_x = Tr((2 M0 - 1) tau_x)`. With `E0` pinned, the search alternates
//! between the best measurement for fixed states and the best states for a
//! fixed measurement, both as SDPs carrying the `E0` equality.

use rayon::prelude::*;

use super::model::{
    hermitian_basis, marginal_equalities, marginal_gap, random_feasible_states, vacuum_projector,
};
use super::sdp::{sdp_solve, LinearForm, SdpProblem};
use super::seesaw::{check_dim, normalize_states, SeesawConfig};
use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64, ZERO};
use crate::quantum::EnergyBound;

/// Worst accepted deviation of a returned point from its constraints.
const POINT_TOL: f64 = 1e-7;

/// A feasible point of the correlator region with its witnesses.
#[derive(Clone, Debug)]
pub struct CorrelatorPoint {
    pub e0: f64,
    pub e1: f64,
    /// Post-encoding states on message (x) shared system.
    pub states: Vec<ComplexMatrix>,
    /// Measurement element for outcome 0.
    pub m0: ComplexMatrix,
}

fn correlator(m0: &ComplexMatrix, tau: &ComplexMatrix) -> f64 {
    2.0 * m0.re_trace_product(tau) - tau.trace().re
}

fn point(states: Vec<ComplexMatrix>, m0: ComplexMatrix) -> CorrelatorPoint {
    CorrelatorPoint {
        e0: correlator(&m0, &states[0]),
        e1: correlator(&m0, &states[1]),
        states,
        m0,
    }
}

/// Model without entanglement on the upper (`upper = true`) or lower boundary
/// of the prepare-and-measure hull at `E0 = e0`, embedded in local dimension
/// `d`.
///
/// Pure qubit states at the energy limit with Bloch vectors `(+-s, 0, -gamma)`
/// and a measurement direction in the x-z plane trace the ellipse. Beyond the
/// upper tangent point the model is mixed, through a flag on the shared system,
/// with the "always answer 0" corner.
pub fn pm_boundary_point(
    omega: EnergyBound,
    e0: f64,
    d: usize,
    upper: bool,
) -> Result<CorrelatorPoint> {
    if !(e0.abs() <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "|E0| must be at most 1, got {e0}"
        )));
    }
    check_dim(d)?;
    if !upper {
        // mirror: best upper point at -e0 with the outcomes swapped
        let p = pm_boundary_point(omega, -e0, d, true)?;
        let m0 = &ComplexMatrix::identity(d * d) - &p.m0;
        return Ok(point(p.states, m0));
    }
    let gamma = 2.0 * omega.value().min(0.5) - 1.0;
    let s = (1.0 - gamma * gamma).max(0.0).sqrt();
    let phi = gamma.atan2(s);
    let x_t = 2.0 * gamma * gamma - 1.0;
    // weight on the ellipse part; the rest sits on the (1, 1) corner
    let (p, e0_arc) = if e0 > x_t && s > 0.0 {
        ((1.0 - e0) / (2.0 * s * s), x_t)
    } else if e0 > x_t {
        (0.0, x_t)
    } else {
        (1.0, e0)
    };
    let asin = e0_arc.clamp(-1.0, 1.0).asin();
    let theta = [phi + asin, phi + std::f64::consts::PI - asin]
        .into_iter()
        .max_by(|a, b| (-(a + phi).sin()).total_cmp(&(-(b + phi).sin())))
        .expect("two candidates");
    let qubit = |bx: f64, bz: f64| {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(0, 0)] = C64::new((1.0 + bz) / 2.0, 0.0);
        m[(1, 1)] = C64::new((1.0 - bz) / 2.0, 0.0);
        m[(0, 1)] = C64::new(bx / 2.0, 0.0);
        m[(1, 0)] = C64::new(bx / 2.0, 0.0);
        m
    };
    let flag = |k: usize| ComplexMatrix::projector(&ComplexMatrix::ket(d, k));
    let vac = flag(0);
    let states = [1.0, -1.0]
        .iter()
        .map(|&sign| {
            let rho = qubit(sign * s, -gamma);
            &kron(&rho, &flag(0)).scale(p) + &kron(&vac, &flag(1)).scale(1.0 - p)
        })
        .collect();
    // measurement projector onto Bloch direction (sin t, 0, cos t); on the
    // corner branch always answer 0
    let mut m_theta = qubit(theta.sin(), theta.cos());
    if d > 2 {
        for k in 2..d {
            m_theta[(k, k)] = ZERO;
        }
    }
    let mut corner = ComplexMatrix::identity(d * d);
    corner -= &kron(&ComplexMatrix::identity(d), &flag(0));
    let m0 = &kron(&m_theta, &flag(0)) + &corner;
    Ok(point(states, m0))
}

/// Measurement step: best `M0` for fixed states with `E0` pinned.
fn measurement_step(states: &[ComplexMatrix], e0: f64, sign: f64) -> Result<ComplexMatrix> {
    let n = states[0].rows();
    let mut p = SdpProblem::new(vec![n, n])?;
    p.set_objective(LinearForm::single(0, states[1].scale(2.0 * sign)))?;
    // M + S = 1
    for e in hermitian_basis(n) {
        let rhs = e.trace().re;
        p.add_equality(LinearForm::new(vec![(0, e.clone()), (1, e)]), rhs)?;
    }
    p.add_equality(
        LinearForm::single(0, states[0].scale(2.0)),
        e0 + states[0].trace().re,
    )?;
    let sol = sdp_solve(&p)?;
    Ok(sol.blocks[0].hermitian_part())
}

/// State step: best states for fixed `M0` with `E0` pinned.
fn state_step(
    omega: EnergyBound,
    d: usize,
    m0: &ComplexMatrix,
    e0: f64,
    sign: f64,
) -> Result<Vec<ComplexMatrix>> {
    let n = d * d;
    let id = ComplexMatrix::identity(n);
    let obs = &m0.scale(2.0) - &id;
    let mut p = SdpProblem::new(vec![n, n])?;
    p.set_objective(LinearForm::single(1, obs.scale(sign)))?;
    p.add_equality(LinearForm::single(0, id), 1.0)?;
    for (form, rhs) in marginal_equalities(0, 1, d, d) {
        p.add_equality(form, rhs)?;
    }
    p.add_equality(LinearForm::single(0, obs), e0)?;
    let vac = vacuum_projector(d, d);
    for k in 0..2 {
        p.add_ge(LinearForm::single(k, vac.clone()), omega.vacuum_floor())?;
    }
    Ok(normalize_states(&sdp_solve(&p)?.blocks))
}

fn admissible(omega: EnergyBound, d: usize, e0: f64, pt: &CorrelatorPoint) -> bool {
    let vac = vacuum_projector(d, d);
    let energy_ok = pt
        .states
        .iter()
        .all(|t| t.re_trace_product(&vac) >= omega.vacuum_floor() - 1e-8);
    energy_ok
        && (pt.e0 - e0).abs() <= POINT_TOL
        && marginal_gap(&pt.states[0], &pt.states[1], d, d) <= POINT_TOL
}

fn run_restart(
    omega: EnergyBound,
    e0: f64,
    d: usize,
    sign: f64,
    cfg: &SeesawConfig,
    index: usize,
) -> Result<CorrelatorPoint> {
    let warm = pm_boundary_point(omega, e0, d, sign > 0.0)?;
    let mut states = if index == 0 {
        warm.states.clone()
    } else {
        random_feasible_states(omega, d, &mut cfg.rng(index))
    };
    let mut best = if index == 0 { Some(warm) } else { None };
    let mut value = f64::NEG_INFINITY;
    for _ in 0..cfg.max_iters {
        // a failed step (typically an unreachable E0 for these states) ends
        // the restart with the best admissible point so far
        let Ok(m0) = measurement_step(&states, e0, sign) else {
            break;
        };
        let Ok(next) = state_step(omega, d, &m0, e0, sign) else {
            break;
        };
        let pt = point(next, m0);
        if !admissible(omega, d, e0, &pt) {
            break;
        }
        let v = sign * pt.e1;
        states = pt.states.clone();
        if best.as_ref().is_none_or(|b| v > sign * b.e1) {
            best = Some(pt);
        }
        let done = v - value < cfg.convergence_tol;
        value = v;
        if done {
            break;
        }
    }
    best.ok_or_else(|| {
        Error::Infeasible(format!(
            "restart {index} found no admissible point at E0 = {e0}"
        ))
    })
}

/// Extreme `E1` (largest if `maximize`, else smallest) over entanglement-
/// assisted models with `E0 = e0`, best over restarts.
///
/// Restart 0 starts on the boundary of the region without entanglement, so
/// the result always contains that region.
pub fn seesaw_correlator_extreme(
    omega: EnergyBound,
    e0: f64,
    local_dim: usize,
    cfg: SeesawConfig,
    maximize: bool,
) -> Result<CorrelatorPoint> {
    check_dim(local_dim)?;
    cfg.validate()?;
    if !(e0.abs() <= 1.0) {
        return Err(Error::Infeasible(format!("E0 = {e0} is outside [-1, 1]")));
    }
    let sign = if maximize { 1.0 } else { -1.0 };
    let runs: Vec<Result<CorrelatorPoint>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(omega, e0, local_dim, sign, &cfg, i))
        .collect();
    let mut best: Option<CorrelatorPoint> = None;
    let mut last_err = None;
    for r in runs {
        match r {
            Ok(pt) => {
                if best.as_ref().is_none_or(|b| sign * pt.e1 > sign * b.e1) {
                    best = Some(pt);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Infeasible("no restart succeeded".into())))
}

/// Largest `E1` compatible with `E0 = e0_target`.
pub fn seesaw_correlator_boundary(
    omega: EnergyBound,
    e0_target: f64,
    local_dim: usize,
    cfg: SeesawConfig,
) -> Result<f64> {
    seesaw_correlator_extreme(omega, e0_target, local_dim, cfg, true).map(|p| p.e1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::pm_ellipse_max_correlator;

    fn om(w: f64) -> EnergyBound {
        EnergyBound::new(w).unwrap()
    }

    #[test]
    fn pm_boundary_models_hit_the_hull() {
        for w in [0.0, 0.1, 0.2, 0.35, 0.5] {
            for i in 0..=20 {
                let e0 = -1.0 + 0.1 * i as f64;
                let (hi, lo) = pm_ellipse_max_correlator(om(w), e0).unwrap();
                for (upper, target) in [(true, hi), (false, lo)] {
                    let p = pm_boundary_point(om(w), e0, 2, upper).unwrap();
                    assert!((p.e0 - e0).abs() < 1e-12, "w={w} e0={e0}");
                    assert!(
                        (p.e1 - target).abs() < 1e-9,
                        "w={w} e0={e0} {} vs {target}",
                        p.e1
                    );
                    assert!(admissible(om(w), 2, e0, &p));
                }
            }
        }
    }

    #[test]
    fn corner_is_reached() {
        let e1 = seesaw_correlator_boundary(
            om(0.2),
            1.0,
            2,
            SeesawConfig {
                restarts: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((e1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn entanglement_widens_the_region_somewhere() {
        let cfg = SeesawConfig {
            restarts: 4,
            ..Default::default()
        };
        let lo = seesaw_correlator_extreme(om(0.2), 0.3, 2, cfg, false).unwrap();
        let (_, pm_lo) = pm_ellipse_max_correlator(om(0.2), 0.3).unwrap();
        assert!(lo.e1 <= pm_lo + 1e-9);
        assert!(admissible(om(0.2), 2, 0.3, &lo));
    }
}

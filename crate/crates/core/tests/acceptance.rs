//! Acceptance checks. Each test prints one `criterion N: PASS|FAIL` line with
//! the measured quantities, then asserts.

use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use eapm_core::attacks::{
    binary_entropy, explicit_two_branch_attack, guessing_probability, min_entropy_attack,
    vn_entropy_attack, ObservedStatistics,
};
use eapm_core::classical::{
    check_energy, evaluate_strategy, rac_strategy, result1_bound, transmission_strategy, Functional,
};
use eapm_core::optim::{seesaw_correlator_extreme, seesaw_w2, unitary_nogo_check, SeesawConfig};
use eapm_core::quantum::{ccnr_value, helstrom, is_ppt, vacuum_weight, EnergyBound};
use eapm_core::schemes::{
    build_scheme, closed_form_w2, deterministic_threshold, optimize_r, pm_ellipse_max_correlator,
    qc_optimal_w2, qutrit_message_diagonal, SchemeKind, SchemeParams,
};

// Criteria run one at a time so each time budget measures only its own work.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn om(w: f64) -> EnergyBound {
    EnergyBound::new(w).unwrap()
}

fn report(n: usize, start: Instant, limit: Duration, checks: &[(&str, bool)], detail: String) {
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let pass = in_time && checks.iter().all(|(_, ok)| *ok);
    let failed: Vec<&str> = checks
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(name, _)| *name)
        .collect();
    println!(
        "criterion {n}: {} ({detail}; {:.2?} of {:?}){}",
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        limit,
        if failed.is_empty() {
            String::new()
        } else {
            format!(" failed: {}", failed.join(", "))
        }
    );
    assert!(in_time, "criterion {n} exceeded its time budget");
    assert!(pass, "criterion {n} failed: {failed:?}");
}

#[test]
fn criterion_01_no_entanglement_baseline() {
    let _guard = serial();
    let t = Instant::now();
    let a = qc_optimal_w2(om(0.2));
    let b = qc_optimal_w2(om(0.5));
    report(
        1,
        t,
        Duration::from_secs(1),
        &[
            ("w(0.2) = 0.9", (a - 0.9).abs() <= 1e-12),
            ("w(0.5) = 1", (b - 1.0).abs() <= 1e-12),
        ],
        format!("w(0.2) = {a:.15}, w(0.5) = {b:.15}"),
    );
}

#[test]
fn criterion_02_transmission_saturation() {
    let _guard = serial();
    let t = Instant::now();
    let mut worst_value = 0.0f64;
    let mut worst_bound = 0.0f64;
    let mut energy_ok = true;
    for n in 2..=4 {
        let f = Functional::transmission(n).unwrap();
        for k in 1..=49 {
            let w = k as f64 / 100.0;
            let s = transmission_strategy(n, om(w)).unwrap();
            energy_ok &= check_energy(&s, om(w));
            let v = evaluate_strategy(&s, &f).unwrap();
            worst_value = worst_value.max((v - (1.0 / n as f64 + w)).abs());
            worst_bound = worst_bound.max((v - result1_bound(&f, om(w))).abs());
        }
    }
    report(
        2,
        t,
        Duration::from_secs(1),
        &[
            ("value = 1/n + omega", worst_value <= 1e-12),
            ("value = bound", worst_bound <= 1e-12),
            ("energy respected", energy_ok),
        ],
        format!("max |value - (1/n + omega)| = {worst_value:.2e}, max |value - bound| = {worst_bound:.2e}"),
    );
}

#[test]
fn criterion_03_random_access_code_saturation() {
    let _guard = serial();
    let t = Instant::now();
    let mut worst_value = 0.0f64;
    let mut worst_bound = 0.0f64;
    let mut energy_ok = true;
    for (m, d) in [(2usize, 2usize), (3, 2), (2, 3)] {
        let f = Functional::random_access_code(m, d).unwrap();
        let w_max = (d as f64).powi(-(m as i32));
        for k in 0..=20 {
            let w = w_max * k as f64 / 20.0;
            let s = rac_strategy(m, d, om(w)).unwrap();
            energy_ok &= check_energy(&s, om(w));
            let v = evaluate_strategy(&s, &f).unwrap();
            let expected = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * w;
            worst_value = worst_value.max((v - expected).abs());
            worst_bound = worst_bound.max((v - result1_bound(&f, om(w))).abs());
        }
    }
    report(
        3,
        t,
        Duration::from_secs(5),
        &[
            ("value = 1/d + (1 - 1/d) omega", worst_value <= 1e-12),
            ("value = bound", worst_bound <= 1e-12),
            ("energy respected", energy_ok),
        ],
        format!(
            "max |value - expected| = {worst_value:.2e}, max |value - bound| = {worst_bound:.2e}"
        ),
    );
}

#[test]
fn criterion_04_unitary_encodings_gain_nothing() {
    let _guard = serial();
    let t = Instant::now();
    let mut checks = Vec::new();
    let mut detail = Vec::new();
    for (i, w) in [0.1, 0.2, 0.3].into_iter().enumerate() {
        for d in [2, 3] {
            let best = unitary_nogo_check(om(w), d, 10_000, 100 + i as u64).unwrap();
            let limit = qc_optimal_w2(om(w));
            checks.push(best <= limit + 1e-9);
            detail.push(format!("omega={w} d={d}: {best:.9} <= {limit:.9}"));
        }
    }
    report(
        4,
        t,
        Duration::from_secs(60),
        &[(
            "no sample beats the no-entanglement optimum",
            checks.iter().all(|&c| c),
        )],
        detail.join(", "),
    );
}

#[test]
fn criterion_05_scheme_consistency() {
    let _guard = serial();
    let t = Instant::now();
    let mut w_err = 0.0f64;
    let mut vac_err = 0.0f64;
    let mut diag_err = 0.0f64;
    let mut points = 0;
    for i in 1..=10 {
        let w = 0.05 * i as f64;
        for j in 0..5 {
            let r = SchemeParams::r_max(w) * j as f64 / 4.0;
            let p = SchemeParams::new(w, r).unwrap();
            points += 1;
            for kind in [SchemeKind::Qubit, SchemeKind::Qutrit] {
                let s = build_scheme(kind, p).unwrap();
                let (h, _) = helstrom(&s.post_states[0], &s.post_states[1]).unwrap();
                w_err = w_err.max((h - closed_form_w2(kind, p).unwrap()).abs());
                for (x, tau) in s.post_states.iter().enumerate() {
                    vac_err = vac_err.max((vacuum_weight(tau, 0).unwrap() - (1.0 - w)).abs());
                    if kind == SchemeKind::Qutrit {
                        let red = tau.reduce(&[0]).unwrap();
                        let want = qutrit_message_diagonal(p, x);
                        for (k, v) in want.iter().enumerate() {
                            diag_err = diag_err.max((red.matrix()[(k, k)].re - v).abs());
                            for l in 0..3 {
                                if l != k {
                                    diag_err = diag_err.max(red.matrix()[(k, l)].norm());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    report(
        5,
        t,
        Duration::from_secs(10),
        &[
            ("closed form = Helstrom", w_err <= 1e-8),
            ("vacuum weight = 1 - omega", vac_err <= 1e-9),
            ("message reduction diagonal", diag_err <= 1e-9),
        ],
        format!("{points} points: W err {w_err:.2e}, vacuum err {vac_err:.2e}, reduction err {diag_err:.2e}"),
    );
}

#[test]
fn criterion_06_hierarchy_and_seesaw_agreement() {
    let _guard = serial();
    let t = Instant::now();
    let cfg = SeesawConfig::default();
    let mut order_ok = true;
    let mut worst_seesaw = 0.0f64;
    let mut min_margin = f64::INFINITY;
    for w in [0.05, 0.1, 0.2, 0.3, 0.4] {
        let qc = qc_optimal_w2(om(w));
        let (_, qb) = optimize_r(SchemeKind::Qubit, om(w));
        let (_, qt) = optimize_r(SchemeKind::Qutrit, om(w));
        min_margin = min_margin.min(qt - qb).min(qb - qc);
        order_ok &= qt - qb >= 1e-4 && qb - qc >= 1e-4;
        let s2 = seesaw_w2(om(w), 2, cfg).unwrap().w2;
        let s3 = seesaw_w2(om(w), 3, cfg).unwrap().w2;
        worst_seesaw = worst_seesaw.max((s2 - qb).abs()).max((s3 - qt).abs());
    }
    report(
        6,
        t,
        Duration::from_secs(600),
        &[
            ("qutrit > qubit > qc by 1e-4", order_ok),
            ("seesaw = closed form", worst_seesaw <= 1e-4),
        ],
        format!("smallest margin {min_margin:.3e}, worst seesaw gap {worst_seesaw:.3e}"),
    );
}

#[test]
fn criterion_07_deterministic_threshold() {
    let _guard = serial();
    let t = Instant::now();
    let w = deterministic_threshold();
    let at_03 = closed_form_w2(SchemeKind::Qutrit, SchemeParams::new(w, 0.3).unwrap()).unwrap();
    let (r_star, best) = optimize_r(SchemeKind::Qutrit, om(w));
    let cfg = SeesawConfig {
        restarts: 4,
        ..SeesawConfig::default()
    };
    let mut h_min_worst = 0.0f64;
    let mut h_vn_worst = 0.0f64;
    for omega in [w, 0.45, 0.5] {
        let qc = qc_optimal_w2(om(omega));
        for w_obs in [0.5, 0.75, qc] {
            let obs = ObservedStatistics::new(w_obs.min(qc), om(omega), 0, 0).unwrap();
            h_min_worst = h_min_worst.max(min_entropy_attack(obs, cfg).unwrap().0);
            h_vn_worst = h_vn_worst.max(vn_entropy_attack(obs, cfg).unwrap().0);
        }
    }
    report(
        7,
        t,
        Duration::from_secs(300),
        &[
            ("W2 = 1 at r = 0.3", (at_03 - 1.0).abs() <= 1e-9),
            ("W2 = 1 at the optimal r", (best - 1.0).abs() <= 1e-9),
            ("min-entropy attack reaches 0", h_min_worst <= 1e-6),
            ("von Neumann attack reaches 0", h_vn_worst <= 1e-4),
        ],
        format!(
            "1 - W2(r=0.3) = {:.3e}, 1 - W2(r*={r_star:.6}) = {:.3e}, worst H_min {h_min_worst:.2e}, worst H {h_vn_worst:.2e}",
            1.0 - at_03,
            1.0 - best
        ),
    );
}

#[test]
fn criterion_08_explicit_attack_algebra() {
    let _guard = serial();
    let t = Instant::now();
    let mut obs_err = 0.0f64;
    let mut pg_err = 0.0f64;
    let mut h_err = 0.0f64;
    for w in [0.05, 0.1, 0.2, 0.3] {
        let (_, wqq) = optimize_r(SchemeKind::Qutrit, om(w));
        for k in 0..=10 {
            let w_obs = 0.5 + (wqq - 0.5) * k as f64 / 10.0;
            let m =
                explicit_two_branch_attack(ObservedStatistics::new(w_obs, om(w), 0, 0).unwrap())
                    .unwrap();
            for s in m.success_probabilities().unwrap() {
                obs_err = obs_err.max((s - w_obs).abs());
            }
            pg_err = pg_err.max((guessing_probability(&m, 0) - wqq).abs());
            h_err = h_err.max((m.conditional_entropy(0) - binary_entropy(wqq)).abs());
        }
    }
    report(
        8,
        t,
        Duration::from_secs(10),
        &[
            ("observation reproduced", obs_err <= 1e-9),
            ("p_g = W2 of the qutrit scheme", pg_err <= 1e-9),
            ("entropy = h(W2) for every weight", h_err <= 1e-9),
        ],
        format!("observation err {obs_err:.2e}, p_g err {pg_err:.2e}, entropy err {h_err:.2e}"),
    );
}

#[test]
fn criterion_09_low_energy_robustness() {
    let _guard = serial();
    let t = Instant::now();
    let w_obs = qc_optimal_w2(om(0.05));
    let obs = ObservedStatistics::new(w_obs, om(0.05), 0, 0).unwrap();
    let (h, model) = min_entropy_attack(obs, SeesawConfig::default()).unwrap();
    let reference = -w_obs.log2();
    let model_ok = model.validate(om(0.05)).is_ok();
    report(
        9,
        t,
        Duration::from_secs(600),
        &[
            ("within 0.05 bits", (reference - h).abs() <= 0.05),
            ("model admissible", model_ok),
        ],
        format!(
            "attack H_min = {h:.6}, -log2(w_obs) = {reference:.6}, gap {:.4}",
            reference - h
        ),
    );
}

#[test]
fn criterion_10_correlator_region() {
    let _guard = serial();
    let t = Instant::now();
    let cfg = SeesawConfig {
        restarts: 8,
        ..SeesawConfig::default()
    };
    let mut contained = true;
    let mut widest = 0.0f64;
    let mut at = 0.0;
    for i in 0..=40 {
        let e0 = -1.0 + 0.05 * i as f64;
        let (pm_hi, pm_lo) = pm_ellipse_max_correlator(om(0.2), e0).unwrap();
        let hi = seesaw_correlator_extreme(om(0.2), e0, 2, cfg, true)
            .unwrap()
            .e1;
        let lo = seesaw_correlator_extreme(om(0.2), e0, 2, cfg, false)
            .unwrap()
            .e1;
        contained &= hi >= pm_hi - 1e-9 && lo <= pm_lo + 1e-9;
        let gain = (hi - pm_hi).max(pm_lo - lo);
        if gain > widest {
            widest = gain;
            at = e0;
        }
    }
    report(
        10,
        t,
        Duration::from_secs(900),
        &[
            ("contains the hull", contained),
            ("strictly wider somewhere", widest > 1e-3),
        ],
        format!("largest widening {widest:.4e} at E0 = {at:.2}"),
    );
}

#[test]
fn criterion_11_entanglement_witnesses() {
    let _guard = serial();
    let t = Instant::now();
    let mut min_neg = f64::INFINITY;
    let mut min_ccnr = f64::INFINITY;
    let mut ppt_fails = true;
    for w in [0.1, 0.2, 0.3] {
        for frac in [0.25, 0.5, 0.75, 0.95] {
            let r = frac * SchemeParams::r_max(w);
            let p = SchemeParams::new(w, r).unwrap();
            for tau in &build_scheme(SchemeKind::Qubit, p).unwrap().post_states {
                let (ppt, min_eig) = is_ppt(tau).unwrap();
                ppt_fails &= !ppt;
                min_neg = min_neg.min(-min_eig);
            }
            for tau in &build_scheme(SchemeKind::Qutrit, p).unwrap().post_states {
                min_ccnr = min_ccnr.min(ccnr_value(tau).unwrap());
            }
        }
    }
    report(
        11,
        t,
        Duration::from_secs(5),
        &[
            ("qubit states are NPT", ppt_fails),
            ("qutrit CCNR > 1", min_ccnr > 1.0),
        ],
        format!("smallest negativity {min_neg:.3e}, smallest CCNR norm {min_ccnr:.6}"),
    );
}

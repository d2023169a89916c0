use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use eapm_core::attacks::{
    guessing_probability, min_entropy_attack_with, vn_entropy_attack_with, AttackOptions,
    ObservedStatistics,
};
use eapm_core::classical::{
    check_energy, evaluate_strategy, rac_strategy, result1_bound, transmission_strategy, Functional,
};
use eapm_core::optim::{seesaw_correlator_extreme, seesaw_w2, unitary_nogo_check, SeesawConfig};
use eapm_core::quantum::{apply_channel, ccnr_value, helstrom, is_ppt, EnergyBound, KrausChannel};
use eapm_core::schemes::{
    build_scheme, closed_form_w2, optimize_r, pm_ellipse_max_correlator, qc_optimal_w2, SchemeKind,
    SchemeParams,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::table::{Format, Table};
use crate::{Command, Fault, Grid, Output, Panel, Scheme, Search};

#[derive(Debug)]
pub enum CliError {
    Io(PathBuf, std::io::Error),
    Core(eapm_core::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Core(e) => write!(f, "{}: {e}", e.kind()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Io(..) => ExitCode::from(3),
            CliError::Core(_) | CliError::Usage(_) => ExitCode::from(2),
        }
    }
}

impl From<eapm_core::Error> for CliError {
    fn from(e: eapm_core::Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::W2Curves {
            grid,
            scheme,
            search,
            output,
        } => {
            let t = w2_curves(grid, &scheme, search)?;
            emit(&t, &output)?;
        }
        Command::CorrelatorRegion {
            omega,
            e0_points,
            search,
            output,
        } => {
            let t = correlator_region(omega, e0_points, search)?;
            emit(&t, &output)?;
        }
        Command::Attacks {
            panel,
            grid,
            classical_ref,
            search,
            output,
        } => {
            let t = attacks(panel, grid, classical_ref.as_deref(), search)?;
            emit(&t, &output)?;
        }
        Command::Verify {
            trials,
            inject_fault,
            search,
            output,
        } => {
            let checks = verify(trials, inject_fault, search)?;
            write_out(&output, |w| write_checks(&checks, output.format, w))?;
            if checks.iter().any(|c| !c.passed) {
                for c in checks.iter().filter(|c| !c.passed) {
                    eprintln!("verification failed: {}: {}", c.name, c.detail);
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn seesaw_cfg(s: Search) -> Result<SeesawConfig> {
    let cfg = SeesawConfig {
        max_iters: s.max_iters,
        restarts: s.restarts,
        rng_seed: s.seed,
        ..SeesawConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Evenly spaced grid `start, start + step, ...` up to `stop` inclusive.
fn omega_grid(g: Grid, default: (f64, f64, f64)) -> Result<Vec<f64>> {
    let start = g.omega_start.unwrap_or(default.0);
    let stop = g.omega_stop.unwrap_or(default.1);
    let step = g.omega_step.unwrap_or(default.2);
    if !(step > 0.0) || !(stop >= start) || !(0.0..=1.0).contains(&start) || stop > 1.0 {
        return Err(CliError::Usage(format!(
            "invalid omega grid: start {start}, stop {stop}, step {step} (need 0 <= start <= stop <= 1, step > 0)"
        )));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    // round away accumulated binary noise so grid values print cleanly
    Ok((0..=n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

fn energy(w: f64) -> Result<EnergyBound> {
    Ok(EnergyBound::new(w)?)
}

fn w2_curves(grid: Grid, schemes: &[Scheme], search: Search) -> Result<Table> {
    let omegas = omega_grid(grid, (0.01, 0.50, 0.01))?;
    let cfg = seesaw_cfg(search)?;
    let dim = search.dim.unwrap_or(3);
    let mut cols = vec!["omega"];
    for s in schemes {
        match s {
            Scheme::Qc => cols.push("w2_qc"),
            Scheme::Qubit => cols.extend(["r_qubit", "w2_qubit"]),
            Scheme::Qutrit => cols.extend(["r_qutrit", "w2_qutrit"]),
            Scheme::Seesaw => cols.push("w2_seesaw"),
        }
    }
    let rows: Vec<Result<Vec<Option<f64>>>> = omegas
        .par_iter()
        .map(|&w| {
            let om = energy(w)?;
            let mut row = vec![Some(w)];
            for s in schemes {
                match s {
                    Scheme::Qc => row.push(Some(qc_optimal_w2(om))),
                    Scheme::Qubit | Scheme::Qutrit => {
                        let kind = if *s == Scheme::Qubit {
                            SchemeKind::Qubit
                        } else {
                            SchemeKind::Qutrit
                        };
                        let (r, v) = optimize_r(kind, om);
                        row.extend([Some(r), Some(v)]);
                    }
                    Scheme::Seesaw => row.push(Some(seesaw_w2(om, dim, cfg)?.w2)),
                }
            }
            Ok(row)
        })
        .collect();
    let mut t = Table::new("w2-curves", &cols);
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

fn correlator_region(omega: f64, points: usize, search: Search) -> Result<Table> {
    if points < 2 {
        return Err(CliError::Usage("--e0-points must be at least 2".into()));
    }
    let om = energy(omega)?;
    let cfg = seesaw_cfg(search)?;
    let dim = search.dim.unwrap_or(2);
    let rows: Vec<Result<Vec<Option<f64>>>> = (0..points)
        .into_par_iter()
        .map(|i| {
            let e0 = (-1.0 + 2.0 * i as f64 / (points - 1) as f64).clamp(-1.0, 1.0);
            let (pm_hi, pm_lo) = pm_ellipse_max_correlator(om, e0)?;
            let hi = seesaw_correlator_extreme(om, e0, dim, cfg, true)?.e1;
            let lo = seesaw_correlator_extreme(om, e0, dim, cfg, false)?.e1;
            Ok(vec![Some(e0), Some(pm_lo), Some(pm_hi), Some(lo), Some(hi)])
        })
        .collect();
    let mut t = Table::new(
        "correlator-region",
        &["e0", "e1_pm_min", "e1_pm_max", "e1_eapm_min", "e1_eapm_max"],
    );
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

fn read_classical_ref(path: &Path) -> Result<Vec<(f64, f64)>> {
    let io = |e: csv::Error| CliError::Io(path.to_path_buf(), std::io::Error::other(e));
    let mut r = csv::Reader::from_path(path).map_err(io)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(io)?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| {
                    CliError::Usage(format!(
                        "{}: expected numeric columns omega,h_min",
                        path.display()
                    ))
                })
        };
        out.push((num(0)?, num(1)?));
    }
    Ok(out)
}

fn attacks(
    panel: Panel,
    grid: Grid,
    classical_ref: Option<&Path>,
    search: Search,
) -> Result<Table> {
    let default = match panel {
        Panel::High => (0.30, 0.50, 0.01),
        Panel::Low => (0.01, 0.10, 0.005),
    };
    let omegas = omega_grid(grid, default)?;
    let cfg = seesaw_cfg(search)?;
    let opts = AttackOptions {
        local_dim: search.dim.unwrap_or(3),
        ..AttackOptions::default()
    };
    let reference = classical_ref.map(read_classical_ref).transpose()?;
    let rows: Vec<Result<Vec<Option<f64>>>> = omegas
        .par_iter()
        .map(|&w| {
            let om = energy(w)?;
            let w_obs = qc_optimal_w2(om);
            let obs = ObservedStatistics::new(w_obs, om, 0, 0)?;
            let (h_min, model, used) = min_entropy_attack_with(obs, cfg, opts)?;
            let (h_vn, _, _) = vn_entropy_attack_with(obs, cfg, opts)?;
            let pg = guessing_probability(&model, 0);
            let href = reference.as_ref().and_then(|r| {
                r.iter()
                    .find(|(o, _)| (o - w).abs() < 1e-9)
                    .map(|(_, h)| *h)
            });
            Ok(vec![
                Some(w),
                Some(w_obs),
                href,
                Some(h_min),
                Some(h_vn),
                Some(pg),
                Some(used as f64),
            ])
        })
        .collect();
    let mut t = Table::new(
        "attacks",
        &[
            "omega",
            "w2_obs",
            "h_min_classical_ref",
            "h_min_attack",
            "h_vn_attack",
            "pg",
            "restarts_used",
        ],
    );
    for r in rows {
        t.push(r?);
    }
    Ok(t)
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

/// Run a check whose computation may itself fail; an error fails the check
/// and names the error kind.
fn guarded(name: &'static str, f: impl FnOnce() -> eapm_core::Result<(bool, String)>) -> Check {
    match f() {
        Ok((ok, detail)) => check(name, ok, detail),
        Err(e) => check(name, false, format!("{}: {e}", e.kind())),
    }
}

fn verify(trials: usize, fault: Option<Fault>, search: Search) -> Result<Vec<Check>> {
    let cfg = seesaw_cfg(search)?;
    let mut out = Vec::new();

    let w = qc_optimal_w2(energy(0.2)?);
    out.push(check(
        "no-entanglement baseline",
        (w - 0.9).abs() <= 1e-12,
        format!("W2(0.2) = {w}"),
    ));

    out.push(guarded("transmission saturation", || {
        let mut worst = 0.0f64;
        for n in 2..=4 {
            let f = Functional::transmission(n)?;
            for k in 1..=49 {
                let om = EnergyBound::new(k as f64 / 100.0)?;
                let s = transmission_strategy(n, om)?;
                let v = evaluate_strategy(&s, &f)?;
                worst = worst
                    .max((v - (1.0 / n as f64 + om.value())).abs())
                    .max((v - result1_bound(&f, om)).abs());
                if !check_energy(&s, om) {
                    return Ok((
                        false,
                        format!("n = {n}, omega = {} violates the energy bound", om.value()),
                    ));
                }
            }
        }
        Ok((worst <= 1e-12, format!("max deviation {worst:.2e}")))
    }));

    out.push(guarded("random access code strategies", || {
        let mut worst = 0.0f64;
        for (m, d) in [(2usize, 2usize), (3, 2), (2, 3)] {
            let f = Functional::random_access_code(m, d)?;
            for k in 0..=10 {
                let om = EnergyBound::new((d as f64).powi(-(m as i32)) * k as f64 / 10.0)?;
                let s = rac_strategy(m, d, om)?;
                let v = evaluate_strategy(&s, &f)?;
                let expect = 1.0 / d as f64 + (1.0 - 1.0 / d as f64) * om.value();
                worst = worst.max((v - expect).abs());
                if !check_energy(&s, om) || v > result1_bound(&f, om) + 1e-12 {
                    return Ok((
                        false,
                        format!(
                            "(m, d) = ({m}, {d}) at omega = {} is inadmissible",
                            om.value()
                        ),
                    ));
                }
            }
        }
        Ok((
            worst <= 1e-12,
            format!("max deviation from 1/d + (1 - 1/d) omega: {worst:.2e}"),
        ))
    }));

    out.push(guarded("scheme channels and closed forms", || {
        let mut worst = 0.0f64;
        for kind in [SchemeKind::Qubit, SchemeKind::Qutrit] {
            for (w, r) in [(0.1, 0.05), (0.2, 0.1), (0.3, 0.2), (0.45, 0.3)] {
                let p = SchemeParams::new(w, r)?;
                let s = build_scheme(kind, p)?;
                let mut channels = s.channels.clone();
                if fault == Some(Fault::IncompleteChannel) {
                    let mut ops = channels[1].kraus_ops().to_vec();
                    ops[0] = ops[0].scale(1.1);
                    channels[1] = KrausChannel::new_unchecked(ops)?;
                }
                let post = channels
                    .iter()
                    .map(|ch| apply_channel(ch, &s.shared_state, 0))
                    .collect::<eapm_core::Result<Vec<_>>>()?;
                let (h, _) = helstrom(&post[0], &post[1])?;
                worst = worst.max((h - closed_form_w2(kind, p)?).abs());
            }
        }
        Ok((
            worst <= 1e-8,
            format!("max |closed form - Helstrom| = {worst:.2e}"),
        ))
    }));

    out.push(guarded("entanglement witnesses", || {
        let mut ok = true;
        for w in [0.1, 0.2, 0.3] {
            let p = SchemeParams::new(w, 0.5 * SchemeParams::r_max(w))?;
            for t in &build_scheme(SchemeKind::Qubit, p)?.post_states {
                ok &= !is_ppt(t)?.0;
            }
            for t in &build_scheme(SchemeKind::Qutrit, p)?.post_states {
                ok &= ccnr_value(t)? > 1.0;
            }
        }
        Ok((
            ok,
            "qubit post-states NPT, qutrit post-states violate CCNR".into(),
        ))
    }));

    out.push(guarded("unitary encodings gain nothing", || {
        let mut worst = f64::NEG_INFINITY;
        for w in [0.1, 0.2, 0.3] {
            let om = EnergyBound::new(w)?;
            for d in [2, 3] {
                let best = unitary_nogo_check(om, d, trials, cfg.rng_seed)?;
                worst = worst.max(best - qc_optimal_w2(om));
            }
        }
        Ok((
            worst <= 1e-9,
            format!("largest excess over the no-entanglement optimum {worst:.3e}"),
        ))
    }));

    out.push(guarded("seesaw reproduces closed forms", || {
        let om = EnergyBound::new(0.2)?;
        let mut worst = 0.0f64;
        for (kind, d) in [(SchemeKind::Qubit, 2), (SchemeKind::Qutrit, 3)] {
            let (_, w) = optimize_r(kind, om);
            worst = worst.max((seesaw_w2(om, d, cfg)?.w2 - w).abs());
        }
        Ok((
            worst <= 1e-4,
            format!("max gap at omega = 0.2: {worst:.2e}"),
        ))
    }));
    Ok(out)
}

fn write_checks(checks: &[Check], format: Format, mut w: impl Write) -> std::io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, checks)?;
            w.write_all(b"\n")
        }
        Format::Csv => {
            let mut c = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(w);
            c.write_record(["check", "status", "detail"])?;
            for ch in checks {
                c.write_record([ch.name, if ch.passed { "pass" } else { "fail" }, &ch.detail])?;
            }
            c.flush()
        }
    }
}

fn emit(t: &Table, output: &Output) -> Result<()> {
    write_out(output, |w| t.write(output.format, w))
}

fn write_out(output: &Output, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    match &output.out {
        Some(path) => {
            let io = |e| CliError::Io(path.clone(), e);
            let mut w = BufWriter::new(File::create(path).map_err(io)?);
            f(&mut w).map_err(io)?;
            w.flush().map_err(io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock).map_err(|e| CliError::Io(PathBuf::from("<stdout>"), e))
        }
    }
}

//! Dispatch of a validated [`ExperimentConfig`] to the solvers.

use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::kinetic::{simulate, SimulationConfig, Trajectory};
use crate::moments::{
    compute_moments, critical_masses, model_b_order2, sample_cascade, second_order_steady_state,
    stability, MomentTable,
};
use crate::ode::Tolerances;
use crate::params::ModelKind;
use crate::signal::convolve_signal;
use crate::stationary::{
    inverse_transform, large_mass_comparison, regularity_diagnostic, solve_stationary,
    solve_stationary_spectral, Initializer, SpectralOptions, StationaryOptions,
};

use super::config::{CommandKind, ExperimentConfig};
use super::initial::InitialFamily;
use super::io::{write_csv, write_field, write_json, Table};
use super::verify::run_checks;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    Completed,
    /// The computation finished but a trajectory left every bound.
    Diverged {
        time: f64,
    },
    /// `verify` found failing checks.
    ChecksFailed {
        failed: usize,
    },
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub outcome: Outcome,
    pub files: Vec<PathBuf>,
    /// Human-readable report for the terminal.
    pub lines: Vec<String>,
}

/// Exit status for an error: 2 for invalid input, 3 for divergence, 4 for
/// non-convergence, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. }
        | Error::CriticalMassNotExceeded { .. }
        | Error::IndexOutOfRange(_)
        | Error::HorizonTooLong { .. }
        | Error::Format(_) => 2,
        Error::Divergence { .. } => 3,
        Error::NonConvergence { .. } => 4,
        Error::Io(_) => 1,
    }
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Completed => 0,
            Outcome::Diverged { .. } => 3,
            Outcome::ChecksFailed { .. } => 1,
        }
    }
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Artifacts {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Artifacts {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        let p = self.dir.join(name);
        write_csv(&p, table)?;
        self.files.push(p);
        Ok(())
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) -> Result<()> {
        let p = self.dir.join(name);
        write_json(&p, value)?;
        self.files.push(p);
        Ok(())
    }

    fn field(&mut self, name: &str, f: &PhaseField) -> Result<()> {
        let p = self.dir.join(name);
        write_field(&p, f)?;
        self.files.push(p);
        Ok(())
    }
}

fn initial_field(cfg: &ExperimentConfig) -> Result<PhaseField> {
    let (x, v) = cfg.grid.build()?;
    cfg.initial.build(x, v, cfg.mass)
}

fn moment_header(order: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(MomentTable::labels(order, 2));
    h.push("mass".into());
    h
}

fn moment_row(t: f64, table: &MomentTable) -> Vec<f64> {
    let mut row = vec![t];
    for k in 2..=table.order() {
        for n in 0..=k {
            row.push(table.get(k - n, n));
        }
    }
    row.push(table.mass());
    row
}

/// Runs the command and writes its artifacts below `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    match cfg.command {
        CommandKind::Simulate => run_simulate(cfg),
        CommandKind::Moments => run_moments(cfg),
        CommandKind::CriticalMass => run_critical_mass(cfg),
        CommandKind::Stationary => run_stationary(cfg),
        CommandKind::Verify => run_verify(cfg),
    }
}

fn closure_errors(traj: &Trajectory, ode: &[MomentTable]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (c, (m, n)) in [(2, 0), (1, 1), (0, 2)].into_iter().enumerate() {
        let scale = ode.iter().map(|t| t.get(m, n).abs()).fold(0.0, f64::max);
        let worst = traj
            .moments
            .iter()
            .zip(ode)
            .map(|(p, o)| (p.get(m, n) - o.get(m, n)).abs())
            .fold(0.0, f64::max);
        out[c] = if scale > 0.0 { worst / scale } else { worst };
    }
    out
}

fn run_simulate(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let f0 = initial_field(cfg)?;
    let mut sim = SimulationConfig::new(cfg.model, cfg.time.dt, cfg.time.t_end);
    sim.stride = cfg.time.stride;
    sim.moment_order = cfg.solver.order;
    sim.snapshot_every = cfg.time.snapshot_every;
    let traj = simulate(&sim, &f0)?;

    let mut art = Artifacts::new(&cfg.out)?;
    let mut series = Table::new(moment_header(cfg.solver.order));
    for (t, m) in traj.times.iter().zip(&traj.moments) {
        series.push(moment_row(*t, m));
    }
    art.csv("timeseries.csv", &series)?;
    for (k, (_, snap)) in traj.snapshots.iter().enumerate() {
        art.field(&format!("field_{k:04}.bin"), snap)?;
    }

    let mut lines = vec![format!(
        "simulated Model {} to t = {} ({} samples), max mass drift {:.3e}",
        cfg.model,
        cfg.time.t_end,
        traj.times.len(),
        traj.max_mass_drift()
    )];
    let mut closure = serde_json::Value::Null;
    if cfg.model == ModelKind::A {
        let initial = compute_moments(&f0, cfg.solver.order);
        let ode = sample_cascade(
            &initial,
            cfg.mass,
            &traj.times,
            Tolerances::new(1e-10, 1e-10),
        )?;
        let mut table = Table::new(moment_header(cfg.solver.order));
        for (t, m) in ode.times.iter().zip(&ode.tables) {
            table.push(moment_row(*t, m));
        }
        art.csv("cascade.csv", &table)?;
        if ode.tables.len() == traj.moments.len() {
            let err = closure_errors(&traj, &ode.tables);
            lines.push(format!(
                "closure error vs moment ODE: A_2_0 {:.3e}, A_1_1 {:.3e}, A_0_2 {:.3e}",
                err[0], err[1], err[2]
            ));
            closure = json!({ "A_2_0": err[0], "A_1_1": err[1], "A_0_2": err[2] });
        }
    }
    art.json(
        "metadata.json",
        &json!({
            "config": cfg,
            "samples": traj.times.len(),
            "max_mass_drift": traj.max_mass_drift(),
            "outflow": traj.outflow.last(),
            "min_value": traj.min_value,
            "closure_relative_error": closure,
        }),
    )?;
    Ok(RunSummary {
        outcome: Outcome::Completed,
        files: art.files,
        lines,
    })
}

fn sample_times(t_end: f64, step: f64) -> Vec<f64> {
    let n = (t_end / step - 1e-9).ceil() as usize;
    let mut times: Vec<f64> = (0..n).map(|k| k as f64 * step).collect();
    times.push(t_end);
    times
}

/// Central second moments `(A20, A11, A02)` about the mean position and velocity.
fn central_second_moments(t: &MomentTable) -> [f64; 3] {
    let m = t.mass();
    let (mx, mv) = (t.get(1, 0) / m, t.get(0, 1) / m);
    [
        t.get(2, 0) - m * mx * mx,
        t.get(1, 1) - m * mx * mv,
        t.get(0, 2) - m * mv * mv,
    ]
}

fn run_moments(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let f0 = initial_field(cfg)?;
    let mut art = Artifacts::new(&cfg.out)?;
    let step = cfg.time.dt * cfg.time.stride as f64;
    let mut lines = Vec::new();
    let outcome;
    match cfg.model {
        ModelKind::A => {
            let initial = compute_moments(&f0, cfg.solver.order);
            let times = sample_times(cfg.time.t_end, step);
            let traj = sample_cascade(
                &initial,
                cfg.mass,
                &times,
                Tolerances::new(cfg.solver.tol, cfg.solver.tol),
            )?;
            let mut table = Table::new(moment_header(cfg.solver.order));
            for (t, m) in traj.times.iter().zip(&traj.tables) {
                table.push(moment_row(*t, m));
            }
            art.csv("moments.csv", &table)?;
            let reports = (2..=cfg.solver.order)
                .map(|n| stability(n, cfg.mass))
                .collect::<Result<Vec<_>>>()?;
            for r in &reports {
                lines.push(format!(
                    "order {}: {} (max Re λ = {:.6e})",
                    r.order, r.verdict, r.max_real_part
                ));
            }
            let steady = second_order_steady_state(cfg.mass).ok();
            outcome = match traj.diverged_at {
                Some(time) => {
                    lines.push(format!("moment cascade diverged at t = {time:.6}"));
                    Outcome::Diverged { time }
                }
                None => Outcome::Completed,
            };
            art.json(
                "metadata.json",
                &json!({
                    "config": cfg,
                    "stability": reports.iter().map(|r| json!({
                        "order": r.order,
                        "max_real_part": r.max_real_part,
                        "verdict": r.verdict.to_string(),
                        "routh_hurwitz_stable": r.routh_hurwitz,
                    })).collect::<Vec<_>>(),
                    "second_order_steady_state": steady.map(|(a, b, c)| [a, b, c]),
                    "diverged_at": traj.diverged_at,
                }),
            )?;
        }
        ModelKind::B => {
            let initial = central_second_moments(&compute_moments(&f0, 2));
            let report = model_b_order2(cfg.mass, initial, cfg.time.t_end)?;
            let mut table = Table::new(vec![
                "t".into(),
                "A_2_0".into(),
                "A_1_1".into(),
                "A_0_2".into(),
                "D".into(),
            ]);
            for ((t, s), d) in report
                .times
                .iter()
                .zip(&report.states)
                .zip(&report.determinant)
            {
                table.push(vec![*t, s[0], s[1], s[2], *d]);
            }
            art.csv("moments.csv", &table)?;
            let max_re = report
                .jacobian_eigenvalues
                .iter()
                .map(|z| z.re)
                .fold(f64::NEG_INFINITY, f64::max);
            lines.push(format!(
                "Model B: Jacobian max Re λ = {max_re:.6e}, determinant identity defect {:.3e}",
                report.integral_defect
            ));
            outcome = match report.exceeds_threshold_at {
                Some(time) => {
                    lines.push(format!("second moments exceed 1e6 at t = {time:.6}"));
                    Outcome::Diverged { time }
                }
                None => Outcome::Completed,
            };
            art.json(
                "metadata.json",
                &json!({
                    "config": cfg,
                    "initial_central_moments": initial,
                    "jacobian_max_real_part": max_re,
                    "steady_state": report.steady_state,
                    "determinant_integral_defect": report.integral_defect,
                    "min_diagonal": report.min_diagonal,
                    "exceeds_threshold_at": report.exceeds_threshold_at,
                }),
            )?;
        }
    }
    Ok(RunSummary {
        outcome,
        files: art.files,
        lines,
    })
}

fn run_critical_mass(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let entries = critical_masses(cfg.solver.n_max, cfg.solver.m_max)?;
    let mut art = Artifacts::new(&cfg.out)?;
    let mut table = Table::new(vec!["N".into(), "M_N".into()]);
    let mut lines = vec![format!("{:>4}  {:>20}", "N", "M_N")];
    for e in &entries {
        let m = e.critical_mass().unwrap_or(f64::NAN);
        table.push(vec![e.order as f64, m]);
        lines.push(format!("{:>4}  {:>20.12}", e.order, m));
    }
    art.csv("critical_masses.csv", &table)?;
    art.json(
        "metadata.json",
        &json!({
            "config": cfg,
            "roots": entries.iter().map(|e| json!({ "N": e.order, "roots": e.roots })).collect::<Vec<_>>(),
        }),
    )?;
    Ok(RunSummary {
        outcome: Outcome::Completed,
        files: art.files,
        lines,
    })
}

fn run_stationary(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let (x, v) = cfg.grid.build()?;
    let init = match cfg.initial.family {
        InitialFamily::ExponentialSignal => Initializer::Exponential,
        _ => Initializer::MomentMatched,
    };
    let opts = StationaryOptions {
        tol: cfg.solver.tol,
        max_iter: cfg.solver.max_iter,
        init,
        nodes: cfg.solver.nodes,
        anderson: cfg.solver.anderson,
    };
    let res = solve_stationary(cfg.mass, &x, &v, &opts)?;
    let mut art = Artifacts::new(&cfg.out)?;

    let signal = convolve_signal(&res.rho);
    let mut profile = Table::new(vec!["x".into(), "rho".into(), "S".into()]);
    for i in 0..x.len() {
        profile.push(vec![x.node(i), res.rho.values()[i], signal.values()[i]]);
    }
    art.csv("density.csv", &profile)?;

    let wx = x.trapezoid_weights();
    let mut marginal = Table::new(vec!["v".into(), "marginal".into(), "limit".into()]);
    for j in 0..v.len() {
        let g: f64 = (0..x.len()).map(|i| wx[i] * res.f.get(i, j)).sum();
        marginal.push(vec![
            v.node(j),
            g / cfg.mass,
            0.5 * (-v.node(j).abs()).exp(),
        ]);
    }
    art.csv("marginal.csv", &marginal)?;
    art.field("field.bin", &res.f)?;

    let reg = regularity_diagnostic(&res);
    let large = large_mass_comparison(&res);
    let (e20, e11, e02) = second_order_steady_state(cfg.mass)?;
    let mut lines = vec![
        format!("converged in {} iterations (update {:.3e})", res.iterations, res.update),
        format!(
            "A_2_0 = {:.6}, A_1_1 = {:.3e}, A_0_2 = {:.6} (moment system: {e20:.6}, {e11}, {e02:.6})",
            res.moments.get(2, 0),
            res.moments.get(1, 1),
            res.moments.get(0, 2)
        ),
        format!("strong-form residual {:.3e}, max |v| f = {:.6}", res.residual, res.max_velocity_weighted),
    ];

    let mut spectral = serde_json::Value::Null;
    if cfg.solver.spectral {
        let s = solve_stationary_spectral(
            cfg.mass,
            &SpectralOptions {
                tol: cfg.solver.tol,
                nodes: cfg.solver.nodes,
                ..SpectralOptions::default()
            },
        )?;
        let (rho_s, min_raw) = inverse_transform(&s.profile, &x);
        let l1 = rho_s.l1_distance(&res.rho);
        let xi = s.profile.grid();
        let mut table = Table::new(vec!["xi".into(), "rho_hat".into()]);
        for i in xi.center()..xi.len() {
            table.push(vec![xi.node(i), s.profile.values()[i]]);
        }
        art.csv("spectral.csv", &table)?;
        lines.push(format!(
            "spectral solver: {} iterations, L1 distance to physical {:.3e}",
            s.iterations, l1
        ));
        spectral = json!({
            "iterations": s.iterations,
            "update": s.update,
            "max_ratio": s.max_ratio,
            "min_inverse_value": min_raw,
            "l1_distance": l1,
        });
    }

    art.json(
        "metadata.json",
        &json!({
            "config": cfg,
            "iterations": res.iterations,
            "update": res.update,
            "max_mass_defect": res.max_mass_defect,
            "max_velocity_weighted": res.max_velocity_weighted,
            "residual": res.residual,
            "moments": { "A_2_0": res.moments.get(2, 0), "A_1_1": res.moments.get(1, 1), "A_0_2": res.moments.get(0, 2) },
            "expected_moments": [e20, e11, e02],
            "weighted_mass": res.weighted_mass,
            "regularity": {
                "origin": reg.origin,
                "imaginary_ratio": reg.imaginary_ratio,
                "parity_defect": reg.parity_defect,
                "band_radius": reg.band_radius,
                "constants": reg.constants,
                "fitted_order": reg.fitted_order,
            },
            "large_mass": {
                "marginal_l1": large.marginal_l1,
                "rescaled_a20": large.rescaled_a20,
                "expected_a20": large.expected_a20,
                "rescaled_a02": large.rescaled_a02,
                "expected_a02": large.expected_a02,
            },
            "spectral": spectral,
        }),
    )?;
    Ok(RunSummary {
        outcome: Outcome::Completed,
        files: art.files,
        lines,
    })
}

fn run_verify(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let checks = run_checks();
    let mut art = Artifacts::new(&cfg.out)?;
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut lines = vec![format!(
        "{:<width$}  {:>12}  {:>12}  result",
        "check", "value", "limit"
    )];
    for c in &checks {
        lines.push(format!(
            "{:<width$}  {:>12.3e}  {:>12.3e}  {}",
            c.name,
            c.value,
            c.limit,
            if c.passed { "PASS" } else { "FAIL" }
        ));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    lines.push(format!(
        "{}/{} checks passed",
        checks.len() - failed,
        checks.len()
    ));
    art.json(
        "verify.json",
        &json!(checks
            .iter()
            .map(|c| json!({ "check": c.name, "value": c.value, "limit": c.limit, "passed": c.passed }))
            .collect::<Vec<_>>()),
    )?;
    let outcome = if failed == 0 {
        Outcome::Completed
    } else {
        Outcome::ChecksFailed { failed }
    };
    Ok(RunSummary {
        outcome,
        files: art.files,
        lines,
    })
}

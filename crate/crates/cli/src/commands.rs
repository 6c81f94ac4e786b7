//! Subcommand implementations and their exit-code contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use adia_core::estimators::{
    crossover, exp_estimate_model, fit_regimes, first_order_coefficient,
};
use adia_core::validate::{run_validation, Level};
use adia_core::{sweep, Error as CoreError, ErrorCurve, SampleFlag};
use anyhow::{anyhow, Context, Result};

use crate::config::RunConfig;

fn write_or_print(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}

fn in_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        Ok(f())
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .context("building worker pool")?;
        Ok(pool.install(f))
    }
}

/// `sweep`: evaluate the curve and write the CSV (plus the fit report when
/// `out_fit` is configured). Exit 0 on all-ok samples, 2 when any sample is
/// flagged, 1 on configuration errors.
pub fn cmd_sweep(cfg: &RunConfig, out_override: Option<PathBuf>, workers: usize) -> Result<ExitCode> {
    let schedule = cfg.schedule()?;
    let problem = cfg.problem()?;
    let grid = cfg.grid.build();
    let integrator = cfg.integrator;
    let curve = in_pool(workers, || sweep(&schedule, &problem, &grid, &integrator))??;

    let mut text = curve.to_csv();
    if cfg.overlays {
        text = with_overlay_columns(&curve, &schedule, &problem)?;
    }
    let out = out_override.or_else(|| cfg.out_curve.clone());
    write_or_print(out.as_deref(), &text)?;

    if let Some(fit_path) = &cfg.out_fit {
        match fit_regimes(&curve) {
            Ok(fit) => write_or_print(Some(fit_path), &fit.to_report())?,
            Err(e) => eprintln!("fit skipped: {e}"),
        }
    }

    let flagged = curve.samples.iter().filter(|s| s.flag == SampleFlag::Fail).count();
    if flagged > 0 {
        eprintln!("{flagged} of {} samples flagged as failed", curve.samples.len());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

/// Rebuild the CSV with `poly_bound` / `exp_estimate` columns appended where
/// the family supports them.
fn with_overlay_columns(
    curve: &ErrorCurve,
    schedule: &adia_core::Schedule,
    problem: &adia_core::ProblemInstance,
) -> Result<String> {
    let poly_coeff = first_order_coefficient(schedule, problem).ok().filter(|c| *c > 0.0);
    let exp_model = exp_estimate_model(schedule, problem).ok();
    let mut header = String::from("JT,delta_ad,flag");
    if poly_coeff.is_some() {
        header.push_str(",poly_bound");
    }
    if exp_model.is_some() {
        header.push_str(",exp_estimate");
    }
    header.push('\n');
    let mut out = header;
    for s in &curve.samples {
        out.push_str(&format!("{:.16e},{:.16e},{}", s.jt, s.delta_ad, s.flag.as_str()));
        if let Some(c) = poly_coeff {
            if s.jt > 0.0 {
                out.push_str(&format!(",{:.16e}", c / s.jt));
            } else {
                out.push_str(",nan");
            }
        }
        if let Some(m) = &exp_model {
            out.push_str(&format!(",{:.16e}", m.eval(s.jt)));
        }
        out.push('\n');
    }
    Ok(out)
}

/// `fit`: regime report for a curve CSV. Exit 0 when at least one regime was
/// detected, 1 otherwise.
pub fn cmd_fit(curve_path: &Path, out: Option<PathBuf>) -> Result<ExitCode> {
    let text = fs::read_to_string(curve_path)
        .with_context(|| format!("reading {}", curve_path.display()))?;
    let curve = ErrorCurve::from_csv(&text)?;
    let fit = match fit_regimes(&curve) {
        Ok(fit) => fit,
        Err(CoreError::InsufficientData(msg)) => {
            eprintln!("insufficient data: {msg}");
            return Ok(ExitCode::from(1));
        }
        Err(e) => return Err(e.into()),
    };
    write_or_print(out.as_deref(), &fit.to_report())?;
    if fit.exp.is_none() && fit.poly.is_none() {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

/// `validate`: run the invariant suite and print a pass/fail table. Exit 0
/// iff every check passes.
pub fn cmd_validate(level: Level) -> Result<ExitCode> {
    let results = run_validation(level)?;
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(10);
    let mut all_ok = true;
    println!("{:<width$}  {:>12}  {:>12}  result", "check", "tolerance", "observed");
    for r in &results {
        println!(
            "{:<width$}  {:>12.3e}  {:>12.3e}  {}",
            r.name,
            r.tolerance,
            r.observed,
            if r.passed { "pass" } else { "FAIL" }
        );
        all_ok &= r.passed;
    }
    println!(
        "{} of {} checks passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

/// `crossover`: analytic JT* and, when a curve CSV is supplied, the
/// empirical fitted-curve intersection and their ratio. Exit 3 when the
/// family has no crossover.
pub fn cmd_crossover(cfg: &RunConfig, curve_path: Option<&Path>) -> Result<ExitCode> {
    let schedule = cfg.schedule()?;
    let problem = cfg.problem()?;
    let analytic = match crossover(&schedule, &problem) {
        Ok(v) => v,
        Err(CoreError::NoCrossover(msg)) | Err(CoreError::UnsupportedFamily(msg)) => {
            eprintln!("no crossover: {msg}");
            return Ok(ExitCode::from(3));
        }
        Err(e) => return Err(e.into()),
    };
    println!("analytic_crossover_JT={analytic}");
    if let Some(path) = curve_path {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let curve = ErrorCurve::from_csv(&text)?;
        let fit = fit_regimes(&curve)?;
        match fit.crossover_jt {
            Some(empirical) => {
                println!("empirical_crossover_JT={empirical}");
                println!("ratio={}", analytic / empirical);
            }
            None => println!("empirical_crossover_JT=nan"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// `schedule-dump`: x1, x2, gap, geodesic density, and Hamiltonian norm on
/// a uniform tau grid.
pub fn cmd_schedule_dump(cfg: &RunConfig, out: Option<PathBuf>) -> Result<ExitCode> {
    let schedule = cfg.schedule()?;
    let n = cfg.grid.n_points.max(2);
    let mut text = String::from("tau,x1,x2,gap,h_A,Hnorm\n");
    for i in 0..n {
        let tau = i as f64 / (n - 1) as f64;
        let pt = schedule.eval(tau)?;
        let gap = schedule.gap(tau)?;
        let h = schedule.geodesic_density(tau)?;
        let norm = schedule.hamiltonian_norm(tau)?;
        text.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            tau, pt.x1, pt.x2, gap, h, norm
        ));
    }
    write_or_print(out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

/// Resolve the worker count: flag, then ADIA_WORKERS, then config.
pub fn resolve_workers(flag: Option<usize>, cfg_workers: usize) -> Result<usize> {
    if let Some(w) = flag {
        return Ok(w);
    }
    if let Ok(env) = std::env::var("ADIA_WORKERS") {
        return env
            .parse()
            .map_err(|_| anyhow!("ADIA_WORKERS must be a non-negative integer, got '{env}'"));
    }
    Ok(cfg_workers)
}

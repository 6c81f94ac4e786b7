//! Flat key=value run configuration.
//!
//! One `key=value` per line, `#` starts a comment. Schedule keys follow the
//! schedule descriptor form (`family=`, `theta=`, `theta_k=`, `norm_profile=`,
//! `zeta=`, `r=`); the problem may be given as `N=`/`M=` counts instead of a
//! direct `r=`. Parse errors name the offending key and line.

use std::path::PathBuf;

use adia_core::{IntegratorConfig, ProblemInstance, Schedule, ScheduleDescriptor};
use anyhow::{anyhow, bail, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    pub jt_min: f64,
    pub jt_max: f64,
    pub n_points: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn build(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n)
            .map(|i| {
                let f = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.jt_min + (self.jt_max - self.jt_min) * f,
                    Spacing::Log => self.jt_min * (self.jt_max / self.jt_min).powf(f),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub descriptor: ScheduleDescriptor,
    pub counts: Option<(u64, u64)>,
    pub energy_scale: f64,
    pub grid: GridSpec,
    pub integrator: IntegratorConfig,
    pub out_curve: Option<PathBuf>,
    pub out_fit: Option<PathBuf>,
    pub overlays: bool,
    pub workers: usize,
}

impl RunConfig {
    pub fn schedule(&self) -> Result<Schedule> {
        Ok(Schedule::from_descriptor(&self.descriptor)?)
    }

    pub fn problem(&self) -> Result<ProblemInstance> {
        Ok(match self.counts {
            Some((n, m)) => ProblemInstance::from_counts(n, m, self.energy_scale)?,
            None => ProblemInstance::from_fraction(self.descriptor.r, self.energy_scale)?,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut schedule_kv = String::new();
        let mut n_items: Option<u64> = None;
        let mut n_marked: Option<u64> = None;
        let mut energy_scale = 1.0;
        let mut jt_min: Option<f64> = None;
        let mut jt_max: Option<f64> = None;
        let mut n_points: Option<usize> = None;
        let mut spacing = Spacing::Linear;
        let mut integrator = IntegratorConfig::default();
        let mut out_curve = None;
        let mut out_fit = None;
        let mut overlays = false;
        let mut workers = 0usize;
        let mut r_seen = false;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config error at line {line_no}: expected key=value, got '{line}'"))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |k: &str| anyhow!("config error at line {line_no}: invalid value for '{k}'");
            match key {
                "family" | "theta" | "theta_k" | "theta_alpha" | "theta_beta" | "norm_profile"
                | "zeta" | "r" => {
                    if key == "r" {
                        r_seen = true;
                    }
                    schedule_kv.push_str(&format!("{key}={value}\n"));
                }
                "N" => n_items = Some(value.parse().map_err(|_| bad("N"))?),
                "M" => n_marked = Some(value.parse().map_err(|_| bad("M"))?),
                "J" => energy_scale = value.parse().map_err(|_| bad("J"))?,
                "jt_min" => jt_min = Some(value.parse().map_err(|_| bad("jt_min"))?),
                "jt_max" => jt_max = Some(value.parse().map_err(|_| bad("jt_max"))?),
                "n_points" => n_points = Some(value.parse().map_err(|_| bad("n_points"))?),
                "spacing" => {
                    spacing = match value {
                        "linear" => Spacing::Linear,
                        "log" => Spacing::Log,
                        _ => bail!("config error at line {line_no}: spacing must be 'linear' or 'log'"),
                    }
                }
                "rel_tol" => integrator.rel_tol = value.parse().map_err(|_| bad("rel_tol"))?,
                "abs_tol" => integrator.abs_tol = value.parse().map_err(|_| bad("abs_tol"))?,
                "max_steps" => integrator.max_steps = value.parse().map_err(|_| bad("max_steps"))?,
                "initial_step" => {
                    integrator.initial_step = value.parse().map_err(|_| bad("initial_step"))?
                }
                "out_curve" => out_curve = Some(PathBuf::from(value)),
                "out_fit" => out_fit = Some(PathBuf::from(value)),
                "overlays" => {
                    overlays = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        _ => bail!("config error at line {line_no}: invalid value for 'overlays'"),
                    }
                }
                "workers" => workers = value.parse().map_err(|_| bad("workers"))?,
                other => bail!("config error at line {line_no}: unknown key '{other}'"),
            }
        }

        // Counts may stand in for (or cross-check) the direct fraction.
        match (n_items, n_marked) {
            (Some(n), Some(m)) => {
                if n == 0 || m == 0 || m > n {
                    bail!("config error: counts must satisfy 1 <= M <= N");
                }
                let r = m as f64 / n as f64;
                if r_seen {
                    let direct: f64 = extract_r(&schedule_kv)?;
                    if (direct - r).abs() > 1e-12 * r {
                        bail!("config error: 'r' disagrees with M/N");
                    }
                } else {
                    schedule_kv.push_str(&format!("r={r}\n"));
                }
            }
            (None, None) => {
                if !r_seen {
                    bail!("config error: missing key 'r' (or 'N' and 'M')");
                }
            }
            _ => bail!("config error: 'N' and 'M' must be given together"),
        }

        let descriptor = ScheduleDescriptor::from_kv(&schedule_kv)
            .map_err(|e| anyhow!("config error: {e}"))?;

        let jt_min = jt_min.ok_or_else(|| anyhow!("config error: missing key 'jt_min'"))?;
        let jt_max = jt_max.ok_or_else(|| anyhow!("config error: missing key 'jt_max'"))?;
        let n_points = n_points.ok_or_else(|| anyhow!("config error: missing key 'n_points'"))?;
        if n_points < 2 {
            bail!("config error: 'n_points' must be at least 2, got {n_points}");
        }
        if !(jt_min >= 0.0) {
            bail!("config error: 'jt_min' must be >= 0");
        }
        if !(jt_max > jt_min) {
            bail!("config error: 'jt_max' must exceed 'jt_min'");
        }
        if spacing == Spacing::Log && !(jt_min > 0.0) {
            bail!("config error: log spacing requires 'jt_min' > 0");
        }
        integrator.validate().map_err(|e| anyhow!("config error: {e}"))?;

        Ok(RunConfig {
            descriptor,
            counts: n_items.zip(n_marked),
            energy_scale,
            grid: GridSpec { jt_min, jt_max, n_points, spacing },
            integrator,
            out_curve,
            out_fit,
            overlays,
            workers,
        })
    }
}

fn extract_r(schedule_kv: &str) -> Result<f64> {
    for line in schedule_kv.lines() {
        if let Some(v) = line.strip_prefix("r=") {
            return Ok(v.parse()?);
        }
    }
    bail!("config error: missing key 'r'")
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "\
# minimal sweep config
family=constant_norm
theta=beta
theta_k=2
r=0.00390625
jt_min=1
jt_max=700
n_points=200
spacing=log
";

    #[test]
    fn parses_minimal_config() {
        let cfg = RunConfig::parse(GOOD).unwrap();
        assert_eq!(cfg.grid.n_points, 200);
        assert_eq!(cfg.grid.spacing, Spacing::Log);
        assert_eq!(cfg.descriptor.r, 0.00390625);
        let grid = cfg.grid.build();
        assert_eq!(grid.len(), 200);
        assert!((grid[0] - 1.0).abs() < 1e-12);
        assert!((grid[199] - 700.0).abs() < 1e-9);
        cfg.schedule().unwrap();
        cfg.problem().unwrap();
    }

    #[test]
    fn counts_define_the_fraction() {
        let text = "family=linear\nN=256\nM=2\njt_min=0\njt_max=10\nn_points=5\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.descriptor.r, 2.0 / 256.0);
        assert_eq!(cfg.problem().unwrap().n_items(), Some(256));
    }

    #[test]
    fn errors_name_key_and_line() {
        let err = RunConfig::parse("family=linear\nbogus=1\n").unwrap_err().to_string();
        assert!(err.contains("line 2") && err.contains("bogus"), "{err}");

        let err = RunConfig::parse("family=linear\nr=0.5\njt_min=0\njt_max=5\nn_points=1\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("n_points"), "{err}");

        let err = RunConfig::parse(
            "family=linear\nr=0.5\njt_min=0\njt_max=5\nn_points=4\nspacing=log\n",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("jt_min"), "{err}");

        let err = RunConfig::parse("family=linear\nN=8\njt_min=0\njt_max=5\nn_points=4\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("together"), "{err}");
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let text = "\n# comment\nfamily=linear # trailing\nr=0.5\njt_min=0\njt_max=5\nn_points=4\n";
        assert!(RunConfig::parse(text).is_ok());
    }
}

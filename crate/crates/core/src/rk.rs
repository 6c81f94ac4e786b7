//! Embedded Dormand–Prince 5(4) integration for two-component complex states.
//!
//! Both Schrödinger reductions in this crate (the rotated 2×2 frame and the
//! two-value unmarked/marked representation of the full Hamiltonian) evolve
//! a pair of complex amplitudes, so the stepper is specialized to that shape.
//! The generator is smooth and bounded by JT·max‖Ĥ‖; stiffness never arises
//! and step size is purely accuracy-driven.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Two complex amplitudes.
pub type State2 = [Complex64; 2];

/// Tolerances and budget for one integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: u64,
    /// First trial step in τ.
    pub initial_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        // Two orders below the tightest acceptance tolerance (1e-8).
        Self { rel_tol: 1e-10, abs_tol: 1e-10, max_steps: 1_000_000, initial_step: 1e-4 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(1e-14..=1e-3).contains(&tol) {
                return Err(Error::Domain(format!("{name} must lie in [1e-14, 1e-3], got {tol}")));
            }
        }
        if self.max_steps == 0 {
            return Err(Error::Domain("max_steps must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::Domain(format!("initial_step must be positive, got {}", self.initial_step)));
        }
        Ok(())
    }

    /// Stable one-line rendering, recorded in curve metadata.
    pub fn digest(&self) -> String {
        format!(
            "rel_tol={:e} abs_tol={:e} max_steps={} initial_step={:e}",
            self.rel_tol, self.abs_tol, self.max_steps, self.initial_step
        )
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy(y: &State2, k: &[State2], coeffs: &[f64], h: f64) -> State2 {
    let mut out = *y;
    for (ki, &c) in k.iter().zip(coeffs.iter()) {
        if c != 0.0 {
            out[0] += h * c * ki[0];
            out[1] += h * c * ki[1];
        }
    }
    out
}

/// Integrate dy/dτ = rhs(τ, y) from `t0` to `t1`.
pub fn integrate<F>(mut rhs: F, y0: State2, t0: f64, t1: f64, cfg: &IntegratorConfig) -> Result<State2>
where
    F: FnMut(f64, &State2) -> Result<State2>,
{
    cfg.validate()?;
    if t1 == t0 {
        return Ok(y0);
    }
    if t1 < t0 {
        return Err(Error::Domain("backward integration is not supported".into()));
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = cfg.initial_step.min(t1 - t0);
    let mut steps: u64 = 0;
    let mut k = [[Complex64::new(0.0, 0.0); 2]; 7];

    while t < t1 {
        if steps >= cfg.max_steps {
            return Err(Error::Integration {
                achieved_tau: t,
                msg: format!("step budget {} exhausted", cfg.max_steps),
            });
        }
        steps += 1;
        h = h.min(t1 - t);

        k[0] = rhs(t, &y)?;
        for stage in 1..7 {
            let y_stage = axpy(&y, &k[..stage], &A[stage - 1][..stage], h);
            k[stage] = rhs(t + C[stage] * h, &y_stage)?;
        }
        let y5 = axpy(&y, &k, &B5, h);
        let y4 = axpy(&y, &k, &B4, h);

        let mut err_sq = 0.0;
        for i in 0..2 {
            // The 0.25 keeps accumulated norm drift well inside 10×rel_tol
            // even when the phase JT∫Δ runs to hundreds of radians.
            let scale =
                0.25 * (cfg.abs_tol + cfg.rel_tol * y[i].norm().max(y5[i].norm()));
            let e = (y5[i] - y4[i]).norm() / scale;
            err_sq += e * e;
        }
        let err = (err_sq / 2.0).sqrt();
        if !err.is_finite() || !y5[0].is_finite() || !y5[1].is_finite() {
            return Err(Error::Integration {
                achieved_tau: t,
                msg: "state became non-finite".into(),
            });
        }

        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
        if h < 1e-15 {
            return Err(Error::Integration {
                achieved_tau: t,
                msg: "step size underflow".into(),
            });
        }
    }
    Ok(y)
}

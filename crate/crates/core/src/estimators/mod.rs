//! Analytic bounds, asymptotic estimates, and regime characterization.
//!
//! * polynomial bounds: first-order √(r(1-r))(|ẋ₂(0)|+|ẋ₁(1)|)/(JT) and the
//!   order-(n+1) boundary-flatness refinement for beta(n) reparametrizations;
//! * Dyson terms (nested oscillatory integrals) in [`dyson`];
//! * gap-closing points and the complex gap action in [`action`];
//! * exponential estimates R·e^(-JT·Im∫Δ) with the family closed forms;
//! * the exponential/polynomial crossover time;
//! * the regularized run time τ_run = JT·maxₜ‖H‖/J;
//! * curve averaging and regime fitting in [`fit`].

pub mod action;
pub mod dyson;
pub mod fit;

pub use action::{complex_gap_action, pole_locations, PoleClassification, PoleSet};
pub use dyson::{dyson_terms, DysonTerm, MAX_DYSON_ORDER};
pub use fit::{fit_regimes, fit_regimes_with, ExpFit, FitConfig, FitStatus, PolyFit, RegimeFit};

use crate::dynamics::ErrorCurve;
use crate::error::{Error, Result};
use crate::problem::ProblemInstance;
use crate::schedule::{Family, Schedule};
use crate::theta::ThetaKind;

/// First-order polynomial bound √(r(1-r)) (|ẋ₂(0)| + |ẋ₁(1)|) / (JT).
pub fn poly_bound_first_order(s: &Schedule, p: &ProblemInstance, jt: f64) -> Result<f64> {
    if !(jt > 0.0) {
        return Err(Error::Domain(format!("first-order bound requires JT > 0, got {jt}")));
    }
    Ok(first_order_coefficient(s, p)? / jt)
}

/// The JT-independent numerator of the first-order bound.
pub fn first_order_coefficient(s: &Schedule, p: &ProblemInstance) -> Result<f64> {
    let r = check_r(s, p)?;
    let start = s.eval(0.0)?;
    let end = s.eval(1.0)?;
    Ok((r * (1.0 - r)).sqrt() * (start.dx2.abs() + end.dx1.abs()))
}

/// Order-(n+1) bound for a beta(n) reparametrization of a symmetric family:
/// √(r(1-r)) |1-2r| (|ẋ₂(0) θ^{(n+1)}(0)| + |ẋ₁(1) θ^{(n+1)}(1)|) / (JT)^{n+1},
/// with ẋ taken with respect to the θ argument at the boundary.
pub fn poly_bound_order_n(s: &Schedule, p: &ProblemInstance, jt: f64) -> Result<f64> {
    if !(jt > 0.0) {
        return Err(Error::Domain(format!("order-n bound requires JT > 0, got {jt}")));
    }
    let r = check_r(s, p)?;
    let n = match s.theta().kind() {
        ThetaKind::Identity => 0,
        ThetaKind::Beta { k } => *k,
        ThetaKind::Bump { .. } => {
            return Err(Error::Domain(
                "order-n bound requires boundary-derivative access; bump theta has none".into(),
            ))
        }
    };
    let (slope0, slope1) = s.boundary_theta_slopes()?;
    let d0 = s
        .theta()
        .boundary_derivative(n + 1, false)
        .ok_or_else(|| Error::Domain("missing boundary derivative".into()))?;
    let d1 = s
        .theta()
        .boundary_derivative(n + 1, true)
        .ok_or_else(|| Error::Domain("missing boundary derivative".into()))?;
    let geom = (r * (1.0 - r)).sqrt() * (1.0 - 2.0 * r).abs();
    Ok(geom * (slope0 * d0.abs() + slope1 * d1.abs()) / jt.powi(n as i32 + 1))
}

/// Exponential error model δ ≈ prefactor · e^(-rate · JT).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpEstimate {
    pub prefactor: f64,
    pub rate: f64,
}

impl ExpEstimate {
    pub fn eval(&self, jt: f64) -> f64 {
        self.prefactor * (-self.rate * jt).exp()
    }
}

/// Default non-exponential prefactor for the general-family estimate, from
/// the residue computation at a simple pole.
pub const DEFAULT_EXP_PREFACTOR: f64 = std::f64::consts::FRAC_PI_2;

/// Build the exponential estimate for a schedule.
///
/// The canonical identity-θ members use their closed forms
/// ((π/2)·e^(-πJTr/(8√(1-r))) for linear, π·e^(-JT√r/2) for constant-norm);
/// everything else falls back to R·e^(-JT·Im∫Δ) with the numeric gap
/// action and R = π/2. Constant-gap schedules have no exponential regime
/// and are rejected.
pub fn exp_estimate_model(s: &Schedule, p: &ProblemInstance) -> Result<ExpEstimate> {
    exp_estimate_model_with_prefactor(s, p, DEFAULT_EXP_PREFACTOR)
}

pub fn exp_estimate_model_with_prefactor(
    s: &Schedule,
    p: &ProblemInstance,
    prefactor: f64,
) -> Result<ExpEstimate> {
    let r = check_r(s, p)?;
    let identity_theta = matches!(s.theta().kind(), ThetaKind::Identity);
    match s.family() {
        Family::ConstantGap => Err(Error::UnsupportedFamily(
            "constant-gap schedules have no exponential error regime".into(),
        )),
        Family::Linear if identity_theta => Ok(ExpEstimate {
            prefactor: std::f64::consts::FRAC_PI_2,
            rate: std::f64::consts::PI * r / (8.0 * (1.0 - r).sqrt()),
        }),
        Family::ConstantNorm if identity_theta => {
            Ok(ExpEstimate { prefactor: std::f64::consts::PI, rate: r.sqrt() / 2.0 })
        }
        _ => {
            let poles = pole_locations(s, p)?;
            let rate = complex_gap_action(s, p, &poles)?;
            Ok(ExpEstimate { prefactor, rate })
        }
    }
}

/// Evaluate the exponential estimate at one JT.
pub fn exp_estimate(s: &Schedule, p: &ProblemInstance, jt: f64) -> Result<f64> {
    Ok(exp_estimate_model(s, p)?.eval(jt))
}

/// Solve R·e^(-a·JT) = poly_bound_first_order(JT) for the crossover JT*.
///
/// The bracket is found by doubling from JT = 1 until the sign changes
/// (first to exponential-above, then to exponential-below), capped at 2^20.
pub fn crossover(s: &Schedule, p: &ProblemInstance) -> Result<f64> {
    let model = exp_estimate_model(s, p)?;
    let coeff = first_order_coefficient(s, p)?;
    if coeff <= 0.0 {
        return Err(Error::NoCrossover(
            "first-order polynomial bound vanishes (flat boundary derivatives)".into(),
        ));
    }
    let f = |jt: f64| model.eval(jt) - coeff / jt;
    let cap = (1u64 << 20) as f64;
    // Find a point where the exponential estimate dominates.
    let mut lo = 1.0;
    while f(lo) <= 0.0 {
        lo *= 2.0;
        if lo > cap {
            return Err(Error::NoCrossover(
                "exponential estimate never exceeds the polynomial bound".into(),
            ));
        }
    }
    let mut hi = lo;
    while f(hi) > 0.0 {
        hi *= 2.0;
        if hi > cap {
            return Err(Error::NoCrossover(format!(
                "no sign change up to JT = {cap}; the exponential regime does not hand over"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Run time τ_run = JT · maxₜ ‖H(τ)‖/J, the rescaling-invariant complexity
/// measure. The maximum is taken on a refined grid and polished locally.
pub fn tau_run(s: &Schedule, _p: &ProblemInstance, jt: f64) -> Result<f64> {
    if !(jt >= 0.0) {
        return Err(Error::Domain(format!("tau_run requires JT >= 0, got {jt}")));
    }
    const GRID: usize = 2048;
    let mut best_tau = 0.0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let tau = i as f64 / GRID as f64;
        let v = s.hamiltonian_norm(tau)?;
        if v > best {
            best = v;
            best_tau = tau;
        }
    }
    // Golden-section polish around the best grid cell.
    let golden = 0.5 * (3.0 - 5.0f64.sqrt());
    let mut a = (best_tau - 1.0 / GRID as f64).max(0.0);
    let mut b = (best_tau + 1.0 / GRID as f64).min(1.0);
    for _ in 0..60 {
        let x1 = a + golden * (b - a);
        let x2 = b - golden * (b - a);
        if s.hamiltonian_norm(x1)? > s.hamiltonian_norm(x2)? {
            b = x2;
        } else {
            a = x1;
        }
    }
    let polished = s.hamiltonian_norm(0.5 * (a + b))?.max(best);
    Ok(jt * polished)
}

/// Average adiabatic error (1/JT_max) ∫₀^{JT_max} δ_ad dJT by trapezoid
/// over the ok samples; the (0, √(1-r)) endpoint is prepended when absent.
pub fn eta_average(curve: &ErrorCurve) -> Result<f64> {
    let mut pts: Vec<(f64, f64)> = curve.ok_samples().map(|s| (s.jt, s.delta_ad)).collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "eta average needs at least 2 ok samples, got {}",
            pts.len()
        )));
    }
    if pts[0].0 > 0.0 {
        let r = curve.metadata.r.ok_or_else(|| {
            Error::InsufficientData(
                "curve lacks a JT = 0 sample and carries no marked-fraction metadata".into(),
            )
        })?;
        pts.insert(0, (0.0, (1.0 - r).sqrt()));
    }
    let jt_max = pts[pts.len() - 1].0;
    if !(jt_max > 0.0) {
        return Err(Error::InsufficientData("curve spans zero time".into()));
    }
    let mut integral = 0.0;
    for pair in pts.windows(2) {
        integral += 0.5 * (pair[0].1 + pair[1].1) * (pair[1].0 - pair[0].0);
    }
    Ok(integral / jt_max)
}

fn check_r(s: &Schedule, p: &ProblemInstance) -> Result<f64> {
    let r = p.marked_fraction();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("estimators require 0 < r < 1, got {r}")));
    }
    if (s.marked_fraction() - r).abs() > 1e-12 * r {
        return Err(Error::Domain("schedule r does not match problem r".into()));
    }
    Ok(r)
}

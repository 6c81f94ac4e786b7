//! Schrödinger dynamics of the search problem and the adiabatic error.
//!
//! The reduced path propagates the normalized two-component state in the
//! rotated frame, i ψ̂' = JT Ĥ(τ) ψ̂ with the traceless Hermitian core
//! Ĥ = (Δ/2)(cos γ σ_z + sin γ σ_x); the trivial (x₁+x₂)/2 shift is dropped
//! since it only contributes a global phase. The full path propagates the
//! unmarked/marked amplitude pair under the matrix elements of
//! H = x₁(𝟙 - |φ⟩⟨φ|) + x₂(𝟙 - P_M) directly, without going through the
//! rotated-frame machinery, and serves as the independent oracle.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::problem::ProblemInstance;
use crate::rk::{integrate, IntegratorConfig, State2};
use crate::schedule::{gap_from, Schedule, ScheduleDescriptor};

/// Which amplitude pair a `ReducedState` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// (ψ_u, ψ_m): unmarked/marked amplitudes of the unnormalized reduction.
    Um,
    /// Components of |ψ̂⟩ = √M S⁻¹ |ψ̃⟩ in the {|z,+⟩, |z,-⟩} basis.
    Rotated,
}

/// Two-component reduced state with its representation tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub amplitudes: State2,
    pub frame: Frame,
}

impl ReducedState {
    /// Euclidean norm of the amplitude pair (unit in the rotated frame).
    pub fn norm(&self) -> f64 {
        (self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()).sqrt()
    }

    /// Convert a rotated-frame state to the (ψ_u, ψ_m) frame,
    /// ψ̃ = S ψ̂ / √M.
    pub fn to_um(&self, p: &ProblemInstance) -> Result<ReducedState> {
        if self.frame == Frame::Um {
            return Ok(*self);
        }
        let m = p.n_marked().ok_or_else(|| {
            Error::Domain("um-frame conversion requires integer counts".into())
        })? as f64;
        let r = p.marked_fraction();
        let sq = m.sqrt();
        let (a, b) = (self.amplitudes[0], self.amplitudes[1]);
        let psi_u = (r / (1.0 - r).sqrt() * a + r.sqrt() * b) / sq;
        let psi_m = (-(1.0 - r).sqrt() * a + r.sqrt() * b) / sq;
        Ok(ReducedState { amplitudes: [psi_u, psi_m], frame: Frame::Um })
    }

    /// (N-M)|ψ_u|² + M|ψ_m|² for an um-frame state.
    pub fn um_norm(&self, p: &ProblemInstance) -> Result<f64> {
        if self.frame != Frame::Um {
            return Err(Error::Domain("um_norm requires an um-frame state".into()));
        }
        let n = p.n_items().ok_or_else(|| Error::Domain("um_norm requires integer counts".into()))? as f64;
        let m = p.n_marked().unwrap() as f64;
        Ok(((n - m) * self.amplitudes[0].norm_sqr() + m * self.amplitudes[1].norm_sqr()).sqrt())
    }
}

/// Full-Hamiltonian state in its two-value representation; the marked
/// amplitudes all equal `psi_m` and the unmarked ones `psi_u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullState {
    pub psi_u: Complex64,
    pub psi_m: Complex64,
    pub n_items: u64,
    pub n_marked: u64,
}

impl FullState {
    /// √((N-M)|ψ_u|² + M|ψ_m|²), conserved by the full dynamics.
    pub fn norm(&self) -> f64 {
        let n = self.n_items as f64;
        let m = self.n_marked as f64;
        ((n - m) * self.psi_u.norm_sqr() + m * self.psi_m.norm_sqr()).sqrt()
    }
}

fn reduced_rhs(s: &Schedule, jt: f64, tau: f64, y: &State2) -> Result<State2> {
    let pt = s.eval(tau)?;
    let r = s.marked_fraction();
    let delta = gap_from(pt.x1, pt.x2, r);
    let c = ((pt.x1 - (1.0 - 2.0 * r) * pt.x2) / delta).clamp(-1.0, 1.0);
    let sg = (1.0 - c * c).max(0.0).sqrt();
    let w = Complex64::new(0.0, -0.5 * jt * delta);
    Ok([w * (c * y[0] + sg * y[1]), w * (sg * y[0] - c * y[1])])
}

/// Integrate the reduced rotated-frame dynamics from |z,-⟩ to τ = 1.
pub fn integrate_reduced(
    s: &Schedule,
    p: &ProblemInstance,
    jt: f64,
    cfg: &IntegratorConfig,
) -> Result<ReducedState> {
    check_problem(s, p)?;
    if !jt.is_finite() || jt < 0.0 {
        return Err(Error::Domain(format!("JT must be finite and non-negative, got {jt}")));
    }
    let y0 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
    let y = integrate(|tau, y: &State2| reduced_rhs(s, jt, tau, y), y0, 0.0, 1.0, cfg)?;
    Ok(ReducedState { amplitudes: y, frame: Frame::Rotated })
}

/// δ_ad(1) = |⟨Φ̂₊(1)|ψ̂⟩| for a rotated-frame state at τ = 1.
pub fn adiabatic_error_reduced(state: &ReducedState, s: &Schedule, _p: &ProblemInstance) -> Result<f64> {
    if state.frame != Frame::Rotated {
        return Err(Error::Domain("adiabatic error expects a rotated-frame state".into()));
    }
    let c1 = s.rotation_cosine(1.0)?;
    // Principal branch: γ(1) ∈ [0, π], so both half-angle values are >= 0.
    let cos_half = ((1.0 + c1) / 2.0).sqrt();
    let sin_half = ((1.0 - c1) / 2.0).sqrt();
    Ok((cos_half * state.amplitudes[0] + sin_half * state.amplitudes[1]).norm())
}

/// One-call convenience: integrate and evaluate δ_ad(1).
pub fn adiabatic_error(s: &Schedule, p: &ProblemInstance, jt: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let state = integrate_reduced(s, p, jt, cfg)?;
    adiabatic_error_reduced(&state, s, p)
}

fn check_problem(s: &Schedule, p: &ProblemInstance) -> Result<()> {
    let r = p.marked_fraction();
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("dynamics requires 0 < r < 1, got {r}")));
    }
    if (s.marked_fraction() - r).abs() > 1e-12 * r.max(1e-300) {
        return Err(Error::Domain(format!(
            "schedule r = {} does not match problem r = {r}",
            s.marked_fraction()
        )));
    }
    Ok(())
}

/// Largest database size accepted by the full oracle.
pub const MAX_ORACLE_ITEMS: u64 = 4096;

/// Propagate the full N-dimensional dynamics (two-value form) and return the
/// end state. ψ_i(0) = 1/√N.
pub fn integrate_full_state(
    s: &Schedule,
    n_items: u64,
    n_marked: u64,
    jt: f64,
    cfg: &IntegratorConfig,
) -> Result<FullState> {
    if n_items == 0 || n_items > MAX_ORACLE_ITEMS {
        return Err(Error::Domain(format!(
            "full oracle supports 1 <= N <= {MAX_ORACLE_ITEMS}, got {n_items}"
        )));
    }
    if n_marked == 0 || n_marked >= n_items {
        return Err(Error::Domain(format!(
            "full oracle requires 1 <= M < N, got M={n_marked}, N={n_items}"
        )));
    }
    let n = n_items as f64;
    let m = n_marked as f64;
    let r = m / n;
    if (s.marked_fraction() - r).abs() > 1e-12 * r {
        return Err(Error::Domain(format!(
            "schedule r = {} does not match M/N = {r}",
            s.marked_fraction()
        )));
    }
    if !jt.is_finite() || jt < 0.0 {
        return Err(Error::Domain(format!("JT must be finite and non-negative, got {jt}")));
    }
    // Componentwise action of H = x₁(𝟙 - |φ⟩⟨φ|) + x₂(𝟙 - P_M):
    //   unmarked: x₁(ψ_u - s/N) + x₂ ψ_u
    //   marked:   x₁(ψ_m - s/N)            with s = (N-M)ψ_u + M ψ_m.
    let rhs = |tau: f64, y: &State2| -> Result<State2> {
        let pt = s.eval(tau)?;
        let total = (n - m) * y[0] + m * y[1];
        let hu = pt.x1 * (y[0] - total / n) + pt.x2 * y[0];
        let hm = pt.x1 * (y[1] - total / n);
        let mi = Complex64::new(0.0, -jt);
        Ok([mi * hu, mi * hm])
    };
    let amp0 = Complex64::new(1.0 / n.sqrt(), 0.0);
    let y = integrate(rhs, [amp0, amp0], 0.0, 1.0, cfg)?;
    Ok(FullState { psi_u: y[0], psi_m: y[1], n_items, n_marked })
}

/// δ'_ad(1) = √N √(1-r) |ψ_u(1)| from the full-Hamiltonian oracle.
pub fn integrate_full(
    s: &Schedule,
    n_items: u64,
    n_marked: u64,
    jt: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let state = integrate_full_state(s, n_items, n_marked, jt, cfg)?;
    let n = n_items as f64;
    let r = n_marked as f64 / n;
    Ok(n.sqrt() * (1.0 - r).sqrt() * state.psi_u.norm())
}

/// Exact constant-gap error φ |sin √(φ² + (JT)²/4)| / √(φ² + (JT)²/4).
pub fn constant_gap_closed_form(r: f64, jt: f64) -> Result<f64> {
    let p = crate::schedule::phi(r)?;
    if !(jt >= 0.0) {
        return Err(Error::Domain(format!("JT must be non-negative, got {jt}")));
    }
    let root = (p * p + jt * jt / 4.0).sqrt();
    Ok(p * root.sin().abs() / root)
}

/// Times of instantaneous full adiabaticity, JT_k = 2√(k²π² - φ²), k = 1..k_max.
pub fn constant_gap_zeros(r: f64, k_max: u32) -> Result<Vec<f64>> {
    if k_max < 1 {
        return Err(Error::Domain(format!("k_max must be >= 1, got {k_max}")));
    }
    let p = crate::schedule::phi(r)?;
    Ok((1..=k_max)
        .map(|k| {
            let kpi = k as f64 * std::f64::consts::PI;
            2.0 * (kpi * kpi - p * p).sqrt()
        })
        .collect())
}

/// Quality flag attached to each sweep sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFlag {
    Ok,
    Fail,
}

impl SampleFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SampleFlag::Ok => "ok",
            SampleFlag::Fail => "fail",
        }
    }
}

/// One sweep sample (JT, δ_ad(1)); failed integrations carry `Fail` and a
/// zero value rather than NaN so downstream fits can exclude them
/// deterministically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSample {
    pub jt: f64,
    pub delta_ad: f64,
    pub flag: SampleFlag,
}

/// Provenance recorded alongside a curve; absent when parsed back from CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CurveMetadata {
    pub descriptor: Option<ScheduleDescriptor>,
    pub r: Option<f64>,
    pub integrator_digest: Option<String>,
}

/// Ordered samples of δ_ad(1) against JT.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    pub samples: Vec<ErrorSample>,
    pub metadata: CurveMetadata,
}

impl ErrorCurve {
    pub fn ok_samples(&self) -> impl Iterator<Item = &ErrorSample> {
        self.samples.iter().filter(|s| s.flag == SampleFlag::Ok)
    }

    /// Serialize as CSV with header `JT,delta_ad,flag` and 17 significant
    /// digits, which round-trips f64 exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("JT,delta_ad,flag\n");
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{}\n", s.jt, s.delta_ad, s.flag.as_str()));
        }
        out
    }

    /// Parse the CSV form; extra columns (estimate overlays) are ignored.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
        if !header.trim_end().starts_with("JT,delta_ad,flag") {
            return Err(Error::Parse(format!("unexpected CSV header '{header}'")));
        }
        let mut samples = Vec::new();
        for (idx, line) in lines.enumerate() {
            let row = idx + 2;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let jt: f64 = fields
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("row {row}: bad JT field")))?;
            let delta: f64 = fields
                .next()
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("row {row}: bad delta_ad field")))?;
            let flag = match fields.next().map(str::trim) {
                Some("ok") => SampleFlag::Ok,
                Some("fail") => SampleFlag::Fail,
                other => {
                    return Err(Error::Parse(format!("row {row}: bad flag field {other:?}")))
                }
            };
            samples.push(ErrorSample { jt, delta_ad: delta, flag });
        }
        let curve = ErrorCurve { samples, metadata: CurveMetadata::default() };
        curve.check_ordering()?;
        Ok(curve)
    }

    pub fn check_ordering(&self) -> Result<()> {
        for pair in self.samples.windows(2) {
            if !(pair[1].jt > pair[0].jt) {
                return Err(Error::Domain(format!(
                    "JT grid must be strictly increasing, got {} then {}",
                    pair[0].jt, pair[1].jt
                )));
            }
        }
        Ok(())
    }
}

/// Evaluate δ_ad(1) on an ascending JT grid. Grid points are independent
/// and evaluated in parallel; output order matches the input grid and is
/// bitwise independent of the worker schedule.
pub fn sweep(
    s: &Schedule,
    p: &ProblemInstance,
    jt_grid: &[f64],
    cfg: &IntegratorConfig,
) -> Result<ErrorCurve> {
    if jt_grid.is_empty() {
        return Err(Error::Domain("JT grid must be nonempty".into()));
    }
    for pair in jt_grid.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::Domain("JT grid must be strictly ascending".into()));
        }
    }
    check_problem(s, p)?;
    cfg.validate()?;
    let samples: Vec<ErrorSample> = jt_grid
        .par_iter()
        .map(|&jt| match adiabatic_error(s, p, jt, cfg) {
            Ok(delta) => ErrorSample { jt, delta_ad: delta, flag: SampleFlag::Ok },
            Err(_) => ErrorSample { jt, delta_ad: 0.0, flag: SampleFlag::Fail },
        })
        .collect();
    Ok(ErrorCurve {
        samples,
        metadata: CurveMetadata {
            descriptor: Some(s.descriptor()),
            r: Some(p.marked_fraction()),
            integrator_digest: Some(cfg.digest()),
        },
    })
}

//! Interpolation families x(τ) for the search Hamiltonian and their derived
//! scalar fields (gap, geodesic density, norms, spectrum).
//!
//! Every schedule moves the pair (x₁, x₂) from (1, 0) at τ = 0 to (0, 1) at
//! τ = 1. The three geodesic families (`constant_norm`, `constant_gap`,
//! `general`) all satisfy the ratio law
//! x₂/x₁ = sin(2θφ) / sin(2(1-θ)φ) with φ = arctan √((1-r)/r), and differ
//! only in the auxiliary constraint that fixes the overall normalization.
//! The closed forms are evaluated in their sine/cosine representation, which
//! keeps the boundary values exact to rounding regardless of how small r is.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::theta::{clamp_tau, ThetaFunction, ThetaKind};

/// Geodesic mixing angle φ = arctan √((1-r)/r) ∈ (0, π/2).
///
/// sin φ = √(1-r) and cos φ = √r; r = 1 would collapse the geodesic and is
/// rejected.
pub fn phi(r: f64) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("phi requires 0 < r < 1, got {r}")));
    }
    Ok(((1.0 - r) / r).sqrt().atan())
}

/// Interpolation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// x₁ = 1 - θ(τ), x₂ = θ(τ).
    Linear,
    /// Geodesic with ‖H(τ)‖/J = 1 (a ≡ 1).
    ConstantNorm,
    /// Geodesic with Δ(τ) = 1.
    ConstantGap,
    /// Geodesic with x₁ + x₂ = a(τ) for a configurable norm profile.
    General,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::ConstantNorm => "constant_norm",
            Family::ConstantGap => "constant_gap",
            Family::General => "general",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Family::Linear),
            "constant_norm" => Ok(Family::ConstantNorm),
            "constant_gap" => Ok(Family::ConstantGap),
            "general" => Ok(Family::General),
            other => Err(Error::Parse(format!("unknown family '{other}'"))),
        }
    }

    fn is_geodesic(&self) -> bool {
        !matches!(self, Family::Linear)
    }
}

/// Norm profile a(τ) for the `general` family; a(0) = a(1) = 1 always.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormProfile {
    Unit,
    /// a(τ) = 1 + τ(1-τ).
    Parabolic,
    /// a(τ) = 1 + sin(πτ).
    Sinusoidal,
    /// a(τ) = 1 + ζ θ̇(τ); requires a θ with θ̇(0) = θ̇(1) = 0.
    Zeta(f64),
}

impl NormProfile {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormProfile::Unit => "unit",
            NormProfile::Parabolic => "parabolic",
            NormProfile::Sinusoidal => "sinusoidal",
            NormProfile::Zeta(_) => "zeta",
        }
    }
}

/// The schedule and its τ-derivatives at a single scaled time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchedulePoint {
    pub tau: f64,
    pub x1: f64,
    pub x2: f64,
    pub dx1: f64,
    pub dx2: f64,
}

/// An evaluable interpolation: family, θ reparametrization, norm profile,
/// and marked fraction. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Schedule {
    family: Family,
    theta: ThetaFunction,
    profile: NormProfile,
    r: f64,
    /// Cached φ(r); 0 for the linear family at r = 1 where it is never used.
    phi: f64,
}

impl Schedule {
    /// Construct a schedule (the `make_schedule` operation).
    ///
    /// The norm profile only applies to the `general` family and is ignored
    /// otherwise. Geodesic families require r ∈ (0,1); `linear` also accepts
    /// r = 1.
    pub fn new(
        family: Family,
        theta: ThetaFunction,
        profile: NormProfile,
        r: f64,
    ) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Domain(format!("marked fraction must lie in (0,1], got {r}")));
        }
        if family.is_geodesic() && r >= 1.0 {
            return Err(Error::Domain(
                "r = 1 degenerates the geodesic families; only `linear` accepts it".into(),
            ));
        }
        let profile = if family == Family::General { profile } else { NormProfile::Unit };
        if let NormProfile::Zeta(zeta) = profile {
            let k = match theta.kind() {
                ThetaKind::Beta { k } if *k >= 1 => *k,
                _ => {
                    return Err(Error::Domain(
                        "zeta norm profile requires a beta(k>=1) reparametrization".into(),
                    ))
                }
            };
            // max θ̇ = θ̇(1/2) for the symmetric beta kernel; positivity of
            // a(τ) = 1 + ζ θ̇(τ) reduces to the value at the midpoint.
            let (_, max_dot) = theta.eval(0.5)?;
            if 1.0 + zeta * max_dot <= 0.0 || 1.0 + zeta * 0.0 <= 0.0 {
                return Err(Error::Domain(format!(
                    "zeta = {zeta} makes 1 + zeta*theta_dot non-positive (max theta_dot = {max_dot}, beta k = {k})"
                )));
            }
        }
        let phi_val = if r < 1.0 { phi(r)? } else { 0.0 };
        Ok(Self { family, theta, profile, r, phi: phi_val })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn theta(&self) -> &ThetaFunction {
        &self.theta
    }

    pub fn norm_profile(&self) -> NormProfile {
        self.profile
    }

    pub fn marked_fraction(&self) -> f64 {
        self.r
    }

    /// φ(r) of this schedule's marked fraction.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    fn profile_values(&self, tau: f64) -> Result<(f64, f64)> {
        Ok(match self.profile {
            NormProfile::Unit => (1.0, 0.0),
            NormProfile::Parabolic => (1.0 + tau * (1.0 - tau), 1.0 - 2.0 * tau),
            NormProfile::Sinusoidal => {
                let p = std::f64::consts::PI;
                (1.0 + (p * tau).sin(), p * (p * tau).cos())
            }
            NormProfile::Zeta(zeta) => {
                let (_, dot) = self.theta.eval(tau)?;
                let ddot = self.theta.second_derivative(tau)?;
                (1.0 + zeta * dot, zeta * ddot)
            }
        })
    }

    /// Evaluate (x₁, x₂, ẋ₁, ẋ₂) at τ. Derivatives are analytic (chain rule
    /// through θ̇), never finite-differenced.
    pub fn eval(&self, tau: f64) -> Result<SchedulePoint> {
        let tau = clamp_tau(tau)?;
        let (th, thd) = self.theta.eval(tau)?;
        let point = match self.family {
            Family::Linear => {
                SchedulePoint { tau, x1: 1.0 - th, x2: th, dx1: -thd, dx2: thd }
            }
            Family::ConstantNorm | Family::General => {
                let (a, da) = if self.family == Family::General {
                    self.profile_values(tau)?
                } else {
                    (1.0, 0.0)
                };
                let p = self.phi;
                let arg = (1.0 - 2.0 * th) * p;
                let (n1, n2) = (((1.0 - th) * 2.0 * p).sin(), (2.0 * th * p).sin());
                let d = p.sin() * arg.cos();
                let dn1 = -2.0 * p * thd * ((1.0 - th) * 2.0 * p).cos();
                let dn2 = 2.0 * p * thd * (2.0 * th * p).cos();
                let dd = p.sin() * 2.0 * p * thd * arg.sin();
                let x1 = 0.5 * a * n1 / d;
                let x2 = 0.5 * a * n2 / d;
                let dx1 = 0.5 * da * n1 / d + 0.5 * a * (dn1 * d - n1 * dd) / (d * d);
                let dx2 = 0.5 * da * n2 / d + 0.5 * a * (dn2 * d - n2 * dd) / (d * d);
                SchedulePoint { tau, x1, x2, dx1, dx2 }
            }
            Family::ConstantGap => {
                let p = self.phi;
                let s = 0.5 / (self.r * (1.0 - self.r)).sqrt();
                let x1 = s * ((1.0 - th) * 2.0 * p).sin();
                let x2 = s * (2.0 * th * p).sin();
                let dx1 = -s * 2.0 * p * thd * ((1.0 - th) * 2.0 * p).cos();
                let dx2 = s * 2.0 * p * thd * (2.0 * th * p).cos();
                SchedulePoint { tau, x1, x2, dx1, dx2 }
            }
        };
        if !(point.x1.is_finite() && point.x2.is_finite() && point.dx1.is_finite() && point.dx2.is_finite()) {
            return Err(Error::Domain(format!("schedule evaluation produced non-finite values at tau={tau}")));
        }
        Ok(point)
    }

    /// Analytic continuation of (x₁, x₂) to complex scaled time; requires an
    /// analytic θ (identity or beta).
    pub fn eval_complex(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (th, dot) = self.theta.eval_complex(z)?;
        let one = Complex64::new(1.0, 0.0);
        Ok(match self.family {
            Family::Linear => (one - th, th),
            Family::ConstantNorm | Family::General => {
                let a = match self.profile {
                    NormProfile::Unit => one,
                    NormProfile::Parabolic => one + z * (one - z),
                    NormProfile::Sinusoidal => one + (std::f64::consts::PI * z).sin(),
                    NormProfile::Zeta(zeta) => one + zeta * dot,
                };
                let p = self.phi;
                let d = p.sin() * (((one - 2.0 * th) * p).cos());
                let x1 = 0.5 * a * ((one - th) * 2.0 * p).sin() / d;
                let x2 = 0.5 * a * (2.0 * th * p).sin() / d;
                (x1, x2)
            }
            Family::ConstantGap => {
                let s = 0.5 / (self.r * (1.0 - self.r)).sqrt();
                let x1 = s * ((one - th) * 2.0 * self.phi).sin();
                let x2 = s * (2.0 * th * self.phi).sin();
                (x1, x2)
            }
        })
    }

    /// Dimensionless gap Δ = √((x₁-x₂)² + 4 r x₁ x₂).
    pub fn gap(&self, tau: f64) -> Result<f64> {
        let pt = self.eval(tau)?;
        Ok(gap_from(pt.x1, pt.x2, self.r))
    }

    /// Squared gap continued to complex scaled time, in a per-family form
    /// that avoids the catastrophic cancellation of (x₁-x₂)² + 4rx₁x₂ near
    /// the gap-closing point: (1-r)(1-2θ)² + r for the linear family and
    /// a²·r·sec²((1-2θ)φ) for the geodesic ones.
    pub fn gap_sq_complex(&self, z: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let (th, dot) = self.theta.eval_complex(z)?;
        Ok(match self.family {
            Family::Linear => {
                let w = one - 2.0 * th;
                (1.0 - self.r) * w * w + self.r
            }
            Family::ConstantGap => one,
            Family::ConstantNorm | Family::General => {
                let a = match self.profile {
                    NormProfile::Unit => one,
                    NormProfile::Parabolic => one + z * (one - z),
                    NormProfile::Sinusoidal => one + (std::f64::consts::PI * z).sin(),
                    NormProfile::Zeta(zeta) => one + zeta * dot,
                };
                let c = ((one - 2.0 * th) * self.phi).cos();
                // cos grows like cosh(2 Im θ · φ); past ~1e150 the squared
                // gap underflows to an exact zero.
                if c.norm() > 1e150 {
                    Complex64::new(0.0, 0.0)
                } else {
                    a * a * self.r / (c * c)
                }
            }
        })
    }

    /// Geodesic density ĥ_A = √(r(1-r)) (x₁ẋ₂ - ẋ₁x₂) / Δ².
    pub fn geodesic_density(&self, tau: f64) -> Result<f64> {
        let pt = self.eval(tau)?;
        let d2 = (pt.x1 - pt.x2).powi(2) + 4.0 * self.r * pt.x1 * pt.x2;
        if d2 <= 0.0 {
            return Err(Error::Domain(format!("gap vanished at tau={tau}; geodesic density singular")));
        }
        Ok((self.r * (1.0 - self.r)).sqrt() * (pt.x1 * pt.dx2 - pt.dx1 * pt.x2) / d2)
    }

    /// ‖H(τ)‖/J.
    pub fn hamiltonian_norm(&self, tau: f64) -> Result<f64> {
        let pt = self.eval(tau)?;
        Ok(projective_norm(pt.x1, pt.x2, self.r))
    }

    /// ‖Ḣ(τ)‖/J.
    pub fn hamiltonian_rate_norm(&self, tau: f64) -> Result<f64> {
        let pt = self.eval(tau)?;
        Ok(projective_norm(pt.dx1, pt.dx2, self.r))
    }

    /// Dimensionless eigenvalues (E₋, E₊, E_>).
    pub fn spectrum(&self, tau: f64) -> Result<(f64, f64, f64)> {
        let pt = self.eval(tau)?;
        let delta = gap_from(pt.x1, pt.x2, self.r);
        let sum = pt.x1 + pt.x2;
        Ok((0.5 * (sum - delta), 0.5 * (sum + delta), sum))
    }

    /// Argument of the arccos in the rotation operator Â, clamped to [-1, 1]
    /// with at most 1e-12 of slack.
    pub fn rotation_cosine(&self, tau: f64) -> Result<f64> {
        let pt = self.eval(tau)?;
        let delta = gap_from(pt.x1, pt.x2, self.r);
        let c = (pt.x1 - (1.0 - 2.0 * self.r) * pt.x2) / delta;
        if c.abs() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("arccos argument {c} out of range at tau={tau}")));
        }
        Ok(c.clamp(-1.0, 1.0))
    }

    /// |∂x₂/∂θ| at θ=0 and |∂x₁/∂θ| at θ=1, the boundary slopes of the
    /// family with respect to its θ argument (unit norm profile only).
    pub fn boundary_theta_slopes(&self) -> Result<(f64, f64)> {
        match self.family {
            Family::Linear => Ok((1.0, 1.0)),
            Family::ConstantNorm | Family::ConstantGap => {
                let s = self.phi / (self.r * (1.0 - self.r)).sqrt();
                Ok((s, s))
            }
            Family::General => match self.profile {
                NormProfile::Unit => {
                    let s = self.phi / (self.r * (1.0 - self.r)).sqrt();
                    Ok((s, s))
                }
                _ => Err(Error::Domain(
                    "boundary theta-slopes are defined for the unit norm profile only".into(),
                )),
            },
        }
    }

    /// The serializable description of this schedule.
    pub fn descriptor(&self) -> ScheduleDescriptor {
        ScheduleDescriptor {
            family: self.family,
            theta: self.theta.kind().clone(),
            norm_profile: self.profile,
            r: self.r,
        }
    }

    pub fn from_descriptor(d: &ScheduleDescriptor) -> Result<Self> {
        let theta = match &d.theta {
            ThetaKind::Identity => ThetaFunction::identity(),
            ThetaKind::Beta { k } => ThetaFunction::beta(*k)?,
            ThetaKind::Bump { alpha, beta } => ThetaFunction::bump(*alpha, *beta)?,
        };
        Schedule::new(d.family, theta, d.norm_profile, d.r)
    }
}

pub(crate) fn gap_from(x1: f64, x2: f64, r: f64) -> f64 {
    ((x1 - x2) * (x1 - x2) + 4.0 * r * x1 * x2).sqrt()
}

/// Operator norm of y₁ H_I + y₂ H_M in units of J.
///
/// The zero-sum branch is entered on relative cancellation, not exact
/// equality: for constant-norm-type schedules ẋ₁ + ẋ₂ vanishes analytically
/// but rounds to ~1e-16 in evaluation.
fn projective_norm(y1: f64, y2: f64, r: f64) -> f64 {
    let sum = y1 + y2;
    if sum.abs() > 1e-12 * (y1.abs() + y2.abs()) {
        sum.abs()
    } else {
        (1.0 - r).sqrt() * y1.abs()
    }
}

/// Flat key=value descriptor for a schedule; round-trips exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleDescriptor {
    pub family: Family,
    pub theta: ThetaKind,
    pub norm_profile: NormProfile,
    pub r: f64,
}

impl ScheduleDescriptor {
    /// Serialize as `key=value` lines.
    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("family={}\n", self.family.as_str()));
        match &self.theta {
            ThetaKind::Identity => out.push_str("theta=identity\n"),
            ThetaKind::Beta { k } => {
                out.push_str("theta=beta\n");
                out.push_str(&format!("theta_k={k}\n"));
            }
            ThetaKind::Bump { alpha, beta } => {
                out.push_str("theta=bump\n");
                out.push_str(&format!("theta_alpha={alpha}\n"));
                out.push_str(&format!("theta_beta={beta}\n"));
            }
        }
        out.push_str(&format!("norm_profile={}\n", self.norm_profile.as_str()));
        if let NormProfile::Zeta(z) = self.norm_profile {
            out.push_str(&format!("zeta={z}\n"));
        }
        out.push_str(&format!("r={}\n", self.r));
        out
    }

    /// One-line form used in curve metadata.
    pub fn to_compact(&self) -> String {
        self.to_kv().trim_end().replace('\n', " ")
    }

    /// Parse `key=value` pairs separated by newlines or whitespace.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut family = None;
        let mut theta_name = None;
        let mut theta_k = None;
        let mut theta_alpha = None;
        let mut theta_beta = None;
        let mut profile_name = None;
        let mut zeta = None;
        let mut r = None;
        for token in text.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{token}'")))?;
            match key {
                "family" => family = Some(Family::parse(value)?),
                "theta" => theta_name = Some(value.to_string()),
                "theta_k" => theta_k = Some(parse_num::<u32>(key, value)?),
                "theta_alpha" => theta_alpha = Some(parse_num::<f64>(key, value)?),
                "theta_beta" => theta_beta = Some(parse_num::<f64>(key, value)?),
                "norm_profile" => profile_name = Some(value.to_string()),
                "zeta" => zeta = Some(parse_num::<f64>(key, value)?),
                "r" => r = Some(parse_num::<f64>(key, value)?),
                other => return Err(Error::Parse(format!("unknown schedule key '{other}'"))),
            }
        }
        let family = family.ok_or_else(|| Error::Parse("missing key 'family'".into()))?;
        let r = r.ok_or_else(|| Error::Parse("missing key 'r'".into()))?;
        let theta = match theta_name.as_deref().unwrap_or("identity") {
            "identity" => ThetaKind::Identity,
            "beta" => ThetaKind::Beta {
                k: theta_k.ok_or_else(|| Error::Parse("theta=beta requires theta_k".into()))?,
            },
            "bump" => ThetaKind::Bump {
                alpha: theta_alpha.unwrap_or(1.0),
                beta: theta_beta.unwrap_or(0.5),
            },
            other => return Err(Error::Parse(format!("unknown theta kind '{other}'"))),
        };
        let norm_profile = match profile_name.as_deref().unwrap_or("unit") {
            "unit" => NormProfile::Unit,
            "parabolic" => NormProfile::Parabolic,
            "sinusoidal" => NormProfile::Sinusoidal,
            "zeta" => NormProfile::Zeta(
                zeta.ok_or_else(|| Error::Parse("norm_profile=zeta requires zeta".into()))?,
            ),
            other => return Err(Error::Parse(format!("unknown norm profile '{other}'"))),
        };
        Ok(Self { family, theta, norm_profile, r })
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse(format!("invalid value for '{key}': '{value}'")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn sched(family: Family, r: f64) -> Schedule {
        Schedule::new(family, ThetaFunction::identity(), NormProfile::Unit, r).unwrap()
    }

    #[test]
    fn phi_reference_values() {
        assert!((phi(0.5).unwrap() - FRAC_PI_4).abs() < 1e-15);
        // arctan(√19), frozen from an extended-precision evaluation.
        assert!((phi(0.05).unwrap() - 1.345282920896765).abs() < 1e-12);
        assert!(phi(1e-9).unwrap() < FRAC_PI_2);
        assert!(phi(1e-9).unwrap() > FRAC_PI_2 - 1e-4);
        assert!(phi(0.0).is_err());
        assert!(phi(1.0).is_err());
        assert!(phi(-0.2).is_err());
    }

    #[test]
    fn linear_is_affine() {
        let s = sched(Family::Linear, 0.25);
        let pt = s.eval(0.3).unwrap();
        assert_eq!(pt.x1, 0.7);
        assert_eq!(pt.x2, 0.3);
        assert_eq!(pt.dx1, -1.0);
        assert_eq!(pt.dx2, 1.0);
    }

    #[test]
    fn general_unit_matches_constant_norm() {
        let r = 0.05;
        let g = Schedule::new(Family::General, ThetaFunction::beta(1).unwrap(), NormProfile::Unit, r).unwrap();
        let c = Schedule::new(Family::ConstantNorm, ThetaFunction::beta(1).unwrap(), NormProfile::Unit, r).unwrap();
        for i in 0..=20 {
            let tau = i as f64 / 20.0;
            let pg = g.eval(tau).unwrap();
            let pc = c.eval(tau).unwrap();
            assert!((pg.x1 - pc.x1).abs() < 1e-15);
            assert!((pg.x2 - pc.x2).abs() < 1e-15);
            assert!((pg.dx1 - pc.dx1).abs() < 1e-12);
            assert!((pg.dx2 - pc.dx2).abs() < 1e-12);
        }
    }

    #[test]
    fn boundaries_are_sharp_for_every_family() {
        for family in [Family::Linear, Family::ConstantNorm, Family::ConstantGap, Family::General] {
            for r in [1e-6, 0.001, 0.05, 0.5, 0.9] {
                let s = sched(family, r);
                let p0 = s.eval(0.0).unwrap();
                let p1 = s.eval(1.0).unwrap();
                assert!((p0.x1 - 1.0).abs() < 1e-12, "{family:?} r={r}");
                assert!(p0.x2.abs() < 1e-12);
                assert!(p1.x1.abs() < 1e-12);
                assert!((p1.x2 - 1.0).abs() < 1e-12);
                assert!((s.gap(0.0).unwrap() - 1.0).abs() < 1e-12);
                assert!((s.gap(1.0).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gap_reference_values() {
        let s = sched(Family::Linear, 0.05);
        assert!((s.gap(0.5).unwrap() - 0.05f64.sqrt()).abs() < 1e-14);
        let cg = sched(Family::ConstantGap, 0.37);
        for i in 0..=16 {
            assert!((cg.gap(i as f64 / 16.0).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_density_reference_values() {
        let r = 0.01;
        let s = sched(Family::ConstantNorm, r);
        let expect = phi(r).unwrap();
        for i in 0..=10 {
            let h = s.geodesic_density(i as f64 / 10.0).unwrap();
            assert!((h - expect).abs() < 1e-10 * expect, "tau={}", i as f64 / 10.0);
        }
        // Linear at tau = 0: (x₁,x₂,ẋ₁,ẋ₂) = (1,0,-1,1), Δ = 1.
        let lin = sched(Family::Linear, 0.3);
        assert!((lin.geodesic_density(0.0).unwrap() - (0.3f64 * 0.7).sqrt()).abs() < 1e-14);
        // Flat θ forces ĥ_A(0) = 0.
        let flat = Schedule::new(Family::ConstantGap, ThetaFunction::beta(1).unwrap(), NormProfile::Unit, 0.2).unwrap();
        assert_eq!(flat.geodesic_density(0.0).unwrap(), 0.0);
    }

    #[test]
    fn norms_reference_values() {
        let lin = sched(Family::Linear, 0.05);
        for i in 0..=10 {
            let tau = i as f64 / 10.0;
            assert!((lin.hamiltonian_norm(tau).unwrap() - 1.0).abs() < 1e-14);
            assert!((lin.hamiltonian_rate_norm(tau).unwrap() - 0.95f64.sqrt()).abs() < 1e-14);
        }
        let cg = sched(Family::ConstantGap, 0.5);
        assert!((cg.hamiltonian_norm(0.5).unwrap() - 1.0 / 0.5f64.sqrt()).abs() < 1e-12);
        assert!((cg.hamiltonian_norm(0.0).unwrap() - 1.0).abs() < 1e-12);
        // ẋ₁ + ẋ₂ → 0 at τ = 1/2, so the rate norm drops to the zero-sum
        // branch value √(1-r)|ẋ₁| there; the sum branch vanishes on approach.
        assert!(cg.hamiltonian_rate_norm(0.5 - 1e-7).unwrap() < 1e-5);
        assert!(cg.hamiltonian_rate_norm(0.5 + 1e-7).unwrap() < 1e-5);
        let at_half = cg.hamiltonian_rate_norm(0.5).unwrap();
        assert!((at_half - cg.phi()).abs() < 1e-12);

        // Constant norm: max ‖Ḣ‖ = φ/√r at the endpoints.
        let r = 0.01;
        let cn = sched(Family::ConstantNorm, r);
        let expect = phi(r).unwrap() / r.sqrt();
        let got = cn.hamiltonian_rate_norm(0.0).unwrap();
        assert!((got - expect).abs() < 1e-9 * expect);
        for i in 1..10 {
            assert!(cn.hamiltonian_rate_norm(i as f64 / 10.0).unwrap() <= got + 1e-12);
        }
    }

    #[test]
    fn spectrum_reference_values() {
        for family in [Family::Linear, Family::ConstantNorm, Family::ConstantGap] {
            let s = sched(family, 0.2);
            for tau in [0.0, 1.0] {
                let (lo, hi, top) = s.spectrum(tau).unwrap();
                assert!(lo.abs() < 1e-12);
                assert!((hi - 1.0).abs() < 1e-12);
                assert!((top - 1.0).abs() < 1e-12);
            }
            for i in 0..=10 {
                let (lo, hi, top) = s.spectrum(i as f64 / 10.0).unwrap();
                assert!(lo <= hi + 1e-15 && hi <= top + 1e-15);
            }
        }
        let cg = sched(Family::ConstantGap, 0.13);
        for i in 0..=10 {
            let (lo, hi, _) = cg.spectrum(i as f64 / 10.0).unwrap();
            assert!((hi - lo - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ratio_law_and_symmetry() {
        for family in [Family::ConstantNorm, Family::ConstantGap, Family::General] {
            let th = ThetaFunction::beta(1).unwrap();
            let s = Schedule::new(family, th, NormProfile::Unit, 0.07).unwrap();
            let p = s.phi();
            for i in 0..100 {
                let tau = i as f64 / 100.0;
                let pt = s.eval(tau).unwrap();
                let (theta, _) = s.theta().eval(tau).unwrap();
                if pt.x1.abs() > 1e-12 {
                    let lhs = pt.x2 / pt.x1;
                    let rhs = (2.0 * theta * p).sin() / ((2.0 * (1.0 - theta) * p).sin());
                    assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "tau={tau}");
                }
                let mirrored = s.eval(1.0 - tau).unwrap();
                assert!((pt.x2 - mirrored.x1).abs() < 1e-12, "{family:?} tau={tau}");
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for family in [Family::Linear, Family::ConstantNorm, Family::ConstantGap, Family::General] {
            let s = Schedule::new(family, ThetaFunction::beta(2).unwrap(), NormProfile::Parabolic, 0.1).unwrap();
            for i in 1..20 {
                let tau = i as f64 / 20.0;
                let pt = s.eval(tau).unwrap();
                let plus = s.eval(tau + h).unwrap();
                let minus = s.eval(tau - h).unwrap();
                assert!((pt.dx1 - (plus.x1 - minus.x1) / (2.0 * h)).abs() < 1e-6);
                assert!((pt.dx2 - (plus.x2 - minus.x2) / (2.0 * h)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn zeta_profile_validation() {
        let th1 = ThetaFunction::beta(1).unwrap();
        // θ̇ max is 1.5 for beta(1): ζ = -0.5 keeps a > 0, ζ = -0.7 does not.
        assert!(Schedule::new(Family::General, th1.clone(), NormProfile::Zeta(-0.5), 0.1).is_ok());
        assert!(Schedule::new(Family::General, th1, NormProfile::Zeta(-0.7), 0.1).is_err());
        assert!(Schedule::new(
            Family::General,
            ThetaFunction::identity(),
            NormProfile::Zeta(0.1),
            0.1
        )
        .is_err());
        // a(0) = a(1) = 1 for a valid zeta profile.
        let s = Schedule::new(
            Family::General,
            ThetaFunction::beta(2).unwrap(),
            NormProfile::Zeta(0.3),
            0.1,
        )
        .unwrap();
        assert!((s.hamiltonian_norm(0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((s.hamiltonian_norm(1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn r_equal_one_only_for_linear() {
        assert!(Schedule::new(Family::Linear, ThetaFunction::identity(), NormProfile::Unit, 1.0).is_ok());
        for family in [Family::ConstantNorm, Family::ConstantGap, Family::General] {
            assert!(Schedule::new(family, ThetaFunction::identity(), NormProfile::Unit, 1.0).is_err());
        }
    }

    #[test]
    fn rotation_cosine_stays_in_range() {
        for family in [Family::Linear, Family::ConstantNorm, Family::ConstantGap] {
            for r in [0.001, 0.05, 0.5] {
                let s = sched(family, r);
                for i in 0..=200 {
                    let c = s.rotation_cosine(i as f64 / 200.0).unwrap();
                    assert!((-1.0..=1.0).contains(&c));
                }
            }
        }
    }

    #[test]
    fn descriptor_round_trip_examples() {
        let d = ScheduleDescriptor {
            family: Family::ConstantNorm,
            theta: ThetaKind::Beta { k: 2 },
            norm_profile: NormProfile::Unit,
            r: 0.00390625,
        };
        let text = d.to_kv();
        assert!(text.contains("family=constant_norm"));
        assert!(text.contains("theta_k=2"));
        assert!(text.contains("r=0.00390625"));
        assert_eq!(ScheduleDescriptor::from_kv(&text).unwrap(), d);

        let z = ScheduleDescriptor {
            family: Family::General,
            theta: ThetaKind::Beta { k: 1 },
            norm_profile: NormProfile::Zeta(0.1),
            r: 0.25,
        };
        assert_eq!(ScheduleDescriptor::from_kv(&z.to_kv()).unwrap(), z);
        assert!(ScheduleDescriptor::from_kv("family=linear").is_err());
        assert!(ScheduleDescriptor::from_kv("family=linear r=0.5 bogus=1").is_err());
    }

    proptest! {
        #[test]
        fn descriptor_round_trip(r in 1e-6f64..1.0, k in 0u32..=8, zeta in -0.1f64..0.5) {
            let d = ScheduleDescriptor {
                family: Family::General,
                theta: ThetaKind::Beta { k },
                norm_profile: if k >= 1 { NormProfile::Zeta(zeta) } else { NormProfile::Parabolic },
                r,
            };
            let parsed = ScheduleDescriptor::from_kv(&d.to_kv()).unwrap();
            prop_assert_eq!(parsed, d);
        }

        #[test]
        fn geodesic_constancy(r in 1e-4f64..0.99, tau in 0.01f64..0.99) {
            let s = Schedule::new(Family::ConstantNorm, ThetaFunction::beta(1).unwrap(), NormProfile::Unit, r).unwrap();
            let (_, thd) = s.theta().eval(tau).unwrap();
            if thd > 1e-8 {
                let h = s.geodesic_density(tau).unwrap();
                let p = s.phi();
                prop_assert!((h / thd - p).abs() <= 1e-10 * p);
            }
        }
    }
}

//! Monotone time reparametrizations θ(τ) with controlled boundary flatness.
//!
//! Three kinds are supported:
//!
//! * `identity` — θ(τ) = τ.
//! * `beta(k)` — the regularized incomplete beta function B_τ(k+1, k+1) /
//!   B_1(k+1, k+1), evaluated through its exact degree-(2k+1) polynomial so
//!   the first k derivatives vanish *exactly* at both endpoints. The
//!   coefficients are built in integer arithmetic at construction.
//! * `bump(α, β)` — the normalized integral of the symmetric bump
//!   b_{αβ}(τ) = exp(-β / (τ^α (1-τ)^α)), which is flat to all orders at
//!   the endpoints. The denominator ∫₀¹ b_{αβ} is computed once by adaptive
//!   quadrature and cached.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::adaptive_quad;

/// Largest supported beta order; (2k+1)! must fit in i128.
pub const MAX_BETA_ORDER: u32 = 16;

/// Slack allowed when an adaptive integrator steps marginally outside [0, 1].
pub(crate) const TAU_CLAMP: f64 = 1e-12;

/// Clamp τ to [0, 1], tolerating overshoot up to `TAU_CLAMP`.
pub(crate) fn clamp_tau(tau: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&tau) {
        Ok(tau)
    } else if tau > -TAU_CLAMP && tau < 1.0 + TAU_CLAMP {
        Ok(tau.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain(format!("tau must lie in [0,1], got {tau}")))
    }
}

/// Which reparametrization a `ThetaFunction` evaluates.
#[derive(Debug, Clone, PartialEq)]
pub enum ThetaKind {
    Identity,
    Beta { k: u32 },
    Bump { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone)]
enum Repr {
    Identity,
    Beta {
        k: u32,
        /// Normalization (2k+1)!/(k!)², i.e. 1/B_1(k+1, k+1).
        norm: f64,
        /// θ̇(τ) = Σ_j dot[j] τ^{k+j} (exact integers).
        dot: Vec<f64>,
        /// θ(τ) = τ^{k+1} Σ_j theta[j] τ^j.
        theta: Vec<f64>,
    },
    Bump { alpha: f64, beta: f64, denom: f64 },
}

/// A monotone reparametrization θ: [0,1] → [0,1] with θ(0)=0, θ(1)=1.
#[derive(Debug, Clone)]
pub struct ThetaFunction {
    kind: ThetaKind,
    repr: Repr,
}

fn factorial_i128(n: u32) -> i128 {
    (1..=n as i128).product()
}

impl ThetaFunction {
    pub fn identity() -> Self {
        Self { kind: ThetaKind::Identity, repr: Repr::Identity }
    }

    /// θ_k from the regularized incomplete beta function; `beta(0)` is the
    /// identity polynomial θ = τ.
    pub fn beta(k: u32) -> Result<Self> {
        if k > MAX_BETA_ORDER {
            return Err(Error::Domain(format!("beta order k must be <= {MAX_BETA_ORDER}, got {k}")));
        }
        // norm · C(k,j) = (2k+1)! / (k! j! (k-j)!), an exact integer.
        let f2k1 = factorial_i128(2 * k + 1);
        let fk = factorial_i128(k);
        let norm = (f2k1 / (fk * fk)) as f64;
        let mut dot = Vec::with_capacity(k as usize + 1);
        let mut theta = Vec::with_capacity(k as usize + 1);
        for j in 0..=k {
            let mag = f2k1 / (fk * factorial_i128(j) * factorial_i128(k - j));
            let signed = if j % 2 == 0 { mag } else { -mag } as f64;
            dot.push(signed);
            theta.push(signed / (k + j + 1) as f64);
        }
        Ok(Self { kind: ThetaKind::Beta { k }, repr: Repr::Beta { k, norm, dot, theta } })
    }

    /// Bump reparametrization θ_∞ with 0 < α, β <= 1.
    pub fn bump(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) || !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::Domain(format!(
                "bump parameters must satisfy 0 < alpha, beta <= 1, got alpha={alpha}, beta={beta}"
            )));
        }
        let denom =
            adaptive_quad(&|t: f64| bump_b(t, alpha, beta), 0.0, 1.0, 1e-12, 1e-300)?.value;
        if !(denom > 0.0) {
            return Err(Error::Domain("bump normalization integral vanished".into()));
        }
        Ok(Self { kind: ThetaKind::Bump { alpha, beta }, repr: Repr::Bump { alpha, beta, denom } })
    }

    pub fn kind(&self) -> &ThetaKind {
        &self.kind
    }

    /// Order k through which boundary derivatives vanish; `None` for the
    /// bump kind (flat to all orders).
    pub fn flat_order(&self) -> Option<u32> {
        match &self.repr {
            Repr::Identity => Some(0),
            Repr::Beta { k, .. } => Some(*k),
            Repr::Bump { .. } => None,
        }
    }

    /// (θ(τ), θ̇(τ)). τ may overshoot [0,1] by at most 1e-12 (clamped).
    pub fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        let tau = clamp_tau(tau)?;
        Ok(match &self.repr {
            Repr::Identity => (tau, 1.0),
            Repr::Beta { k, norm, theta, .. } => {
                let dot = norm * tau.powi(*k as i32) * (1.0 - tau).powi(*k as i32);
                // Symmetric evaluation keeps θ(1-τ) = 1 - θ(τ) exact.
                let th = if tau == 0.5 {
                    0.5
                } else if tau < 0.5 {
                    beta_theta_raw(theta, *k, tau)
                } else {
                    1.0 - beta_theta_raw(theta, *k, 1.0 - tau)
                };
                (th, dot)
            }
            Repr::Bump { alpha, beta, denom } => {
                let dot = bump_b(tau, *alpha, *beta) / denom;
                let th = if tau == 0.5 {
                    0.5
                } else if tau < 0.5 {
                    bump_theta_raw(tau, *alpha, *beta, *denom)?
                } else {
                    1.0 - bump_theta_raw(1.0 - tau, *alpha, *beta, *denom)?
                };
                (th, dot)
            }
        })
    }

    /// θ̈(τ) for the identity and beta kinds.
    pub fn second_derivative(&self, tau: f64) -> Result<f64> {
        let tau = clamp_tau(tau)?;
        match &self.repr {
            Repr::Identity => Ok(0.0),
            Repr::Beta { k, norm, .. } => {
                if *k == 0 {
                    return Ok(0.0);
                }
                let kk = *k as i32;
                Ok(norm
                    * *k as f64
                    * tau.powi(kk - 1)
                    * (1.0 - tau).powi(kk - 1)
                    * (1.0 - 2.0 * tau))
            }
            Repr::Bump { .. } => {
                Err(Error::Domain("second derivative is not exposed for the bump kind".into()))
            }
        }
    }

    /// Exact m-th derivative at a boundary (identity and beta kinds);
    /// `None` for the bump kind, whose derivatives are not polynomially
    /// accessible.
    pub fn boundary_derivative(&self, m: u32, at_one: bool) -> Option<f64> {
        match &self.repr {
            Repr::Identity => Some(match m {
                0 => {
                    if at_one {
                        1.0
                    } else {
                        0.0
                    }
                }
                1 => 1.0,
                _ => 0.0,
            }),
            Repr::Beta { k, dot, .. } => {
                if m == 0 {
                    return Some(if at_one { 1.0 } else { 0.0 });
                }
                // θ^{(m)}(0): the τ^{k+j} term of θ̇ contributes iff k+j = m-1.
                let at_zero = if m - 1 < *k || m - 1 > 2 * k {
                    0.0
                } else {
                    let j = (m - 1 - k) as usize;
                    dot[j] * factorial_i128(m - 1) as f64
                };
                if at_one {
                    // θ(1-τ) = 1 - θ(τ)  ⇒  θ^{(m)}(1) = (-1)^{m+1} θ^{(m)}(0).
                    Some(if m % 2 == 1 { at_zero } else { -at_zero })
                } else {
                    Some(at_zero)
                }
            }
            Repr::Bump { .. } => None,
        }
    }

    /// Analytic continuation of (θ, θ̇) to complex argument; defined for the
    /// identity and beta kinds only (the bump function is not analytic).
    pub fn eval_complex(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        match &self.repr {
            Repr::Identity => Ok((z, Complex64::new(1.0, 0.0))),
            Repr::Beta { k, norm, theta, .. } => {
                let one = Complex64::new(1.0, 0.0);
                let mut poly = Complex64::new(0.0, 0.0);
                for &c in theta.iter().rev() {
                    poly = poly * z + c;
                }
                let th = z.powu(*k + 1) * poly;
                let dot = *norm * z.powu(*k) * (one - z).powu(*k);
                Ok((th, dot))
            }
            Repr::Bump { .. } => Err(Error::Domain(
                "bump reparametrization is not analytic; complex evaluation unsupported".into(),
            )),
        }
    }
}

fn beta_theta_raw(theta_coeffs: &[f64], k: u32, tau: f64) -> f64 {
    let mut poly = 0.0;
    for &c in theta_coeffs.iter().rev() {
        poly = poly * tau + c;
    }
    tau.powi(k as i32 + 1) * poly
}

fn bump_b(tau: f64, alpha: f64, beta: f64) -> f64 {
    if tau <= 0.0 || tau >= 1.0 {
        return 0.0;
    }
    let u = tau.powf(alpha) * (1.0 - tau).powf(alpha);
    (-beta / u).exp()
}

fn bump_theta_raw(tau: f64, alpha: f64, beta: f64, denom: f64) -> Result<f64> {
    let num = adaptive_quad(&|t: f64| bump_b(t, alpha, beta), 0.0, tau, 1e-12, 1e-16)?.value;
    Ok(num / denom)
}

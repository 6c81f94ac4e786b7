//! Gap-closing points in the complex τ plane and the imaginary gap action
//! Im ∫₀^{z₀} Δ(z) dz that sets the exponential decay rate.
//!
//! The gap closes where x₂/x₁ reaches 1 - 2r ± 2i√(r(1-r)). For the linear
//! interpolation with identity θ the inversion is explicit; for the
//! geodesic families the ratio law pins tan(2θφ) = ±i, so the closing point
//! sits at infinite imaginary θ and the action is accumulated along a
//! truncated vertical ascent instead.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::problem::ProblemInstance;
use crate::schedule::{Family, Schedule};
use crate::theta::ThetaKind;

/// Where the gap closes.
#[derive(Debug, Clone, PartialEq)]
pub enum PoleClassification {
    /// A conjugate pair of finite points.
    FinitePair,
    /// θ(z₀) = ±i∞: the closing point lies at infinite imaginary part.
    AtInfinity,
}

/// Gap-closing points of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    /// Finite poles (conjugate pair, upper half plane first); empty for
    /// `AtInfinity`.
    pub poles: Vec<Complex64>,
    pub classification: PoleClassification,
}

impl PoleSet {
    /// Upper-half-plane pole of a finite pair.
    pub fn upper(&self) -> Option<Complex64> {
        self.poles.iter().find(|z| z.im > 0.0).copied()
    }
}

/// Locate the complex-τ gap-closing points.
pub fn pole_locations(s: &Schedule, p: &ProblemInstance) -> Result<PoleSet> {
    let r = p.marked_fraction();
    if (s.marked_fraction() - r).abs() > 1e-12 * r {
        return Err(Error::Domain("schedule r does not match problem r".into()));
    }
    match s.family() {
        Family::ConstantGap => Err(Error::UnsupportedFamily(
            "constant-gap schedules keep Δ = 1 everywhere; there is no gap-closing point".into(),
        )),
        Family::Linear => linear_poles(s, r),
        Family::ConstantNorm | Family::General => geodesic_poles(s, r),
    }
}

fn linear_poles(s: &Schedule, r: f64) -> Result<PoleSet> {
    // x₂/x₁ = θ/(1-θ) = w  ⇒  θ(z₀) = w/(1+w); with identity θ this gives
    // z₀ = 1/2 ± i √r / (2√(1-r)).
    match s.theta().kind() {
        ThetaKind::Identity => {
            let im = r.sqrt() / (2.0 * (1.0 - r).sqrt());
            let upper = Complex64::new(0.5, im);
            Ok(PoleSet {
                poles: vec![upper, upper.conj()],
                classification: PoleClassification::FinitePair,
            })
        }
        ThetaKind::Beta { .. } => {
            let w = Complex64::new(1.0 - 2.0 * r, 2.0 * (r * (1.0 - r)).sqrt());
            let target = w / (1.0 + w);
            let upper = invert_theta(s, target)?;
            let upper = if upper.im >= 0.0 { upper } else { upper.conj() };
            Ok(PoleSet {
                poles: vec![upper, upper.conj()],
                classification: PoleClassification::FinitePair,
            })
        }
        ThetaKind::Bump { .. } => Err(Error::Domain(
            "pole location requires an analytic theta (identity or beta)".into(),
        )),
    }
}

fn geodesic_poles(s: &Schedule, r: f64) -> Result<PoleSet> {
    // Invert the ratio law continued to complex θ:
    // tan(2θφ) = w sin 2φ / (1 + w cos 2φ) with w = 1-2r + 2i√(r(1-r)).
    let two_phi = 2.0 * s.phi();
    let w = Complex64::new(1.0 - 2.0 * r, 2.0 * (r * (1.0 - r)).sqrt());
    let t = w * two_phi.sin() / (1.0 + w * two_phi.cos());
    // tan(2θφ) = ±i has no finite solution: the pole recedes to ±i∞.
    if (t - Complex64::new(0.0, 1.0)).norm() < 1e-9
        || (t + Complex64::new(0.0, 1.0)).norm() < 1e-9
    {
        return Ok(PoleSet { poles: vec![], classification: PoleClassification::AtInfinity });
    }
    let theta0 = t.atan() / two_phi;
    let upper = invert_theta(s, theta0)?;
    let upper = if upper.im >= 0.0 { upper } else { upper.conj() };
    Ok(PoleSet { poles: vec![upper, upper.conj()], classification: PoleClassification::FinitePair })
}

/// Solve θ(z) = target by Newton iteration from a spread of starting points.
fn invert_theta(s: &Schedule, target: Complex64) -> Result<Complex64> {
    let starts = [
        Complex64::new(0.5, 0.2),
        Complex64::new(0.5, -0.2),
        Complex64::new(0.5, 0.8),
        Complex64::new(0.25, 0.4),
        Complex64::new(0.75, 0.4),
    ];
    for &start in &starts {
        let mut z = start;
        for _ in 0..200 {
            let (th, dot) = s.theta().eval_complex(z)?;
            let f = th - target;
            if f.norm() < 1e-13 {
                return Ok(z);
            }
            if dot.norm() < 1e-300 {
                break;
            }
            let step = f / dot;
            z -= step;
            if !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1e6 {
                break;
            }
        }
    }
    Err(Error::NoPoleFound(format!("Newton inversion of theta(z) = {target} did not converge")))
}

/// Δ(z) with a caller-maintained branch: of the two square roots of
/// Δ²(z), pick the one continuous with `prev`.
fn gap_branch(s: &Schedule, z: Complex64, prev: Complex64) -> Result<Complex64> {
    let root = s.gap_sq_complex(z)?.sqrt();
    if (root - prev).norm() <= (-root - prev).norm() {
        Ok(root)
    } else {
        Ok(-root)
    }
}

/// Composite GL15 integration of Δ(z(u)) z'(u) along one parametrized leg,
/// with sequential branch continuation and refinement until two successive
/// panel counts agree.
fn integrate_leg<Z, DZ>(
    s: &Schedule,
    z_of: Z,
    dz_of: DZ,
    branch: &mut Complex64,
    tol: f64,
) -> Result<Complex64>
where
    Z: Fn(f64) -> Complex64,
    DZ: Fn(f64) -> Complex64,
{
    let basis = crate::quad::GlBasis::get();
    let mut prev_val: Option<Complex64> = None;
    let mut last_diff = f64::NAN;
    let mut panels = 8usize;
    loop {
        let mut total = Complex64::new(0.0, 0.0);
        let mut running = *branch;
        for p in 0..panels {
            let (a, b) = (p as f64 / panels as f64, (p + 1) as f64 / panels as f64);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..crate::quad::GL_N {
                let u = mid + half * basis.nodes[i];
                let d = gap_branch(s, z_of(u), running)?;
                // Nodes are visited in order; a jump of more than π/2 in
                // phase between neighbours means the branch was lost.
                if running.norm() > 1e-12
                    && d.norm() > 1e-12
                    && (d / running).arg().abs() > std::f64::consts::FRAC_PI_2
                {
                    if panels >= 1 << 15 {
                        return Err(Error::BranchTracking(format!(
                            "gap argument jumped at z = {}",
                            z_of(u)
                        )));
                    }
                    running = Complex64::new(f64::NAN, 0.0); // force refinement
                    break;
                }
                running = d;
                acc += basis.weights[i] * d * dz_of(u);
            }
            if !running.re.is_finite() {
                break;
            }
            total += acc * half;
        }
        if running.re.is_finite() {
            if let Some(prev) = prev_val {
                last_diff = (total - prev).norm();
                if last_diff <= tol.max(1e-11 * total.norm()) {
                    *branch = running;
                    return Ok(total);
                }
            }
            prev_val = Some(total);
        } else {
            prev_val = None;
        }
        if panels >= 1 << 15 {
            return Err(Error::Quadrature { achieved: last_diff });
        }
        panels *= 2;
    }
}

/// Im ∫₀^{z₀} Δ(z) dz along the standard path: a real-axis segment followed
/// by a vertical ascent (sine-substituted into the pole for a finite z₀;
/// adaptively truncated for a pole at infinity).
pub fn complex_gap_action(s: &Schedule, p: &ProblemInstance, pole: &PoleSet) -> Result<f64> {
    let r = p.marked_fraction();
    if (s.marked_fraction() - r).abs() > 1e-12 * r {
        return Err(Error::Domain("schedule r does not match problem r".into()));
    }
    let mut branch = Complex64::new(1.0, 0.0); // Δ(0) = 1
    let tol = 1e-12;
    match pole.classification {
        PoleClassification::FinitePair => {
            let z0 = pole
                .upper()
                .ok_or_else(|| Error::Domain("finite pole set lacks an upper pole".into()))?;
            let x0 = z0.re;
            let y0 = z0.im;
            let mut total = integrate_leg(
                s,
                |u| Complex64::new(u * x0, 0.0),
                |_| Complex64::new(x0, 0.0),
                &mut branch,
                tol,
            )?;
            // Vertical leg with y = y₀ sin(πu/2): the √(z-z₀) behaviour of Δ
            // becomes linear in (1-u) and GL panels converge fast.
            let half_pi = std::f64::consts::FRAC_PI_2;
            total += integrate_leg(
                s,
                |u| Complex64::new(x0, y0 * (half_pi * u).sin()),
                |u| Complex64::new(0.0, y0 * half_pi * (half_pi * u).cos()),
                &mut branch,
                tol,
            )?;
            Ok(total.im)
        }
        PoleClassification::AtInfinity => {
            let mut total = integrate_leg(
                s,
                |u| Complex64::new(0.5 * u, 0.0),
                |_| Complex64::new(0.5, 0.0),
                &mut branch,
                tol,
            )?;
            // Vertical blocks of growing height; stop once the imaginary
            // increment is below 1e-14 of the accumulated value.
            let mut y = 0.0;
            let mut height = 0.5;
            for _ in 0..200 {
                let (a, b) = (y, y + height);
                let inc = integrate_leg(
                    s,
                    |u| Complex64::new(0.5, a + (b - a) * u),
                    |_| Complex64::new(0.0, b - a),
                    &mut branch,
                    tol,
                )?;
                total += inc;
                y = b;
                height *= 1.4;
                if total.im.abs() > 0.0 && inc.im.abs() < 1e-14 * total.im.abs() {
                    return Ok(total.im);
                }
            }
            Err(Error::Quadrature { achieved: total.im })
        }
    }
}

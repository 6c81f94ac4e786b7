//! Adaptive Gauss–Legendre quadrature and spectral cumulative integration.
//!
//! Two tools live here: a classic bisection-adaptive integrator built on a
//! 15-point Gauss–Legendre rule (real- and complex-valued variants), and a
//! per-panel "spectral cumulative" operator that maps nodal values of an
//! integrand to nodal values of its running integral. The latter is exact
//! for polynomials up to degree 14 and is what the nested Dyson integrals
//! are assembled from.

use num_complex::Complex64;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub(crate) const GL_N: usize = 15;
const MAX_DEPTH: usize = 48;

/// Nodes, weights, and the cumulative-integration matrix of the 15-point
/// Gauss–Legendre rule on [-1, 1].
pub(crate) struct GlBasis {
    pub nodes: [f64; GL_N],
    pub weights: [f64; GL_N],
    /// cum[m][i]: nodal cumulative operator, F(x_m) = Σ_i cum[m][i] f(x_i)
    /// with F(x) = ∫_{-1}^{x} f. Exact for deg(f) <= 14.
    pub cum: [[f64; GL_N]; GL_N],
}

/// Legendre P_0..P_kmax at x by the three-term recurrence.
fn legendre_all(x: f64, kmax: usize) -> Vec<f64> {
    let mut p = vec![0.0; kmax + 1];
    p[0] = 1.0;
    if kmax >= 1 {
        p[1] = x;
    }
    for k in 1..kmax {
        p[k + 1] = ((2 * k + 1) as f64 * x * p[k] - k as f64 * p[k - 1]) / (k + 1) as f64;
    }
    p
}

fn gl_nodes_weights() -> ([f64; GL_N], [f64; GL_N]) {
    let n = GL_N;
    let mut nodes = [0.0; GL_N];
    let mut weights = [0.0; GL_N];
    for i in 0..n {
        // Chebyshev-based initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let p = legendre_all(x, n);
            let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            let dx = p[n] / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let p = legendre_all(x, n);
        let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

impl GlBasis {
    pub(crate) fn get() -> &'static GlBasis {
        static BASIS: OnceLock<GlBasis> = OnceLock::new();
        BASIS.get_or_init(|| {
            let (nodes, weights) = gl_nodes_weights();
            // Legendre values at the nodes, up to P_15 (needed for ∫P_14).
            let mut pv = [[0.0; GL_N]; GL_N + 1];
            for i in 0..GL_N {
                let p = legendre_all(nodes[i], GL_N);
                for (k, row) in pv.iter_mut().enumerate() {
                    row[i] = p[k];
                }
            }
            // Icum_k(x) = ∫_{-1}^{x} P_k = (P_{k+1}(x) - P_{k-1}(x)) / (2k+1), k >= 1.
            let mut cum = [[0.0; GL_N]; GL_N];
            for m in 0..GL_N {
                let xm = nodes[m];
                let pm = legendre_all(xm, GL_N);
                for i in 0..GL_N {
                    let mut s = 0.0;
                    for k in 0..GL_N {
                        let coeff = (2 * k + 1) as f64 / 2.0 * weights[i] * pv[k][i];
                        let icum = if k == 0 {
                            xm + 1.0
                        } else {
                            (pm[k + 1] - pm[k - 1]) / (2 * k + 1) as f64
                        };
                        s += coeff * icum;
                    }
                    cum[m][i] = s;
                }
            }
            GlBasis { nodes, weights, cum }
        })
    }

    /// Map [a, b] node positions.
    pub(crate) fn mapped_nodes(&self, a: f64, b: f64) -> [f64; GL_N] {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut out = [0.0; GL_N];
        for (o, &x) in out.iter_mut().zip(self.nodes.iter()) {
            *o = mid + half * x;
        }
        out
    }
}

fn gl15_real<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let basis = GlBasis::get();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..GL_N {
        s += basis.weights[i] * f(mid + half * basis.nodes[i]);
    }
    s * half
}

fn gl15_complex<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let basis = GlBasis::get();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..GL_N {
        s += basis.weights[i] * f(mid + half * basis.nodes[i]);
    }
    s * half
}

/// Value and error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Adaptive bisection integration of a real function over [a, b].
///
/// A panel is accepted when its whole-panel GL15 value agrees with the sum
/// over its halves within the panel's share of the tolerance budget.
pub fn adaptive_quad<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0 });
    }
    let rough = gl15_real(f, a, b).abs();
    let tol = abs_tol.max(rel_tol * rough.max(1e-300));
    let mut value = 0.0;
    let mut err = 0.0;
    let mut converged = true;
    rec_real(f, a, b, gl15_real(f, a, b), tol, 0, &mut value, &mut err, &mut converged);
    if !converged {
        return Err(Error::Quadrature { achieved: err });
    }
    Ok(QuadResult { value, error_estimate: err })
}

#[allow(clippy::too_many_arguments)]
fn rec_real<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    value: &mut f64,
    err: &mut f64,
    converged: &mut bool,
) {
    let m = 0.5 * (a + b);
    let left = gl15_real(f, a, m);
    let right = gl15_real(f, m, b);
    let diff = (left + right - whole).abs();
    if diff <= tol || depth >= MAX_DEPTH {
        *value += left + right;
        *err += diff;
        if depth >= MAX_DEPTH && diff > tol {
            *converged = false;
        }
        return;
    }
    rec_real(f, a, m, left, 0.5 * tol, depth + 1, value, err, converged);
    rec_real(f, m, b, right, 0.5 * tol, depth + 1, value, err, converged);
}

/// Adaptive bisection integration of a complex function of a real parameter.
pub fn adaptive_quad_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(Complex64, f64)> {
    if a == b {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let rough = gl15_complex(f, a, b).norm();
    let tol = abs_tol.max(rel_tol * rough.max(1e-300));
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut converged = true;
    rec_complex(f, a, b, gl15_complex(f, a, b), tol, 0, &mut value, &mut err, &mut converged);
    if !converged {
        return Err(Error::Quadrature { achieved: err });
    }
    Ok((value, err))
}

#[allow(clippy::too_many_arguments)]
fn rec_complex<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: usize,
    value: &mut Complex64,
    err: &mut f64,
    converged: &mut bool,
) {
    let m = 0.5 * (a + b);
    let left = gl15_complex(f, a, m);
    let right = gl15_complex(f, m, b);
    let diff = (left + right - whole).norm();
    if diff <= tol || depth >= MAX_DEPTH {
        *value += left + right;
        *err += diff;
        if depth >= MAX_DEPTH && diff > tol {
            *converged = false;
        }
        return;
    }
    rec_complex(f, a, m, left, 0.5 * tol, depth + 1, value, err, converged);
    rec_complex(f, m, b, right, 0.5 * tol, depth + 1, value, err, converged);
}

/// Nodal running integral over one panel [a, b].
///
/// Input: integrand values at the 15 mapped GL nodes. Output: running
/// integral ∫_a^{x_m} at the same nodes, plus the whole-panel integral.
pub(crate) fn panel_cumulative_complex(
    values: &[Complex64; GL_N],
    a: f64,
    b: f64,
) -> ([Complex64; GL_N], Complex64) {
    let basis = GlBasis::get();
    let half = 0.5 * (b - a);
    let mut cum = [Complex64::new(0.0, 0.0); GL_N];
    for m in 0..GL_N {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..GL_N {
            s += basis.cum[m][i] * values[i];
        }
        cum[m] = s * half;
    }
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..GL_N {
        total += basis.weights[i] * values[i];
    }
    (cum, total * half)
}

pub(crate) fn panel_cumulative_real(values: &[f64; GL_N], a: f64, b: f64) -> ([f64; GL_N], f64) {
    let basis = GlBasis::get();
    let half = 0.5 * (b - a);
    let mut cum = [0.0; GL_N];
    for m in 0..GL_N {
        let mut s = 0.0;
        for i in 0..GL_N {
            s += basis.cum[m][i] * values[i];
        }
        cum[m] = s * half;
    }
    let mut total = 0.0;
    for i in 0..GL_N {
        total += basis.weights[i] * values[i];
    }
    (cum, total * half)
}

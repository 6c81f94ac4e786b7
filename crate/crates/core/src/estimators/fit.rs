//! Exponential / power-law regime detection on sampled error curves.
//!
//! The exponential regime is a window where log δ is linear against JT; the
//! polynomial tail is a window where log δ is linear against log JT. A
//! window claims a regime only when its own parametrization scores at least
//! `r2_threshold` *and* beats the other parametrization on the same points,
//! which cleanly rejects pure power laws on the exponential side and pure
//! exponentials on the polynomial side.
//!
//! Post-crossover tails of the search dynamics oscillate under their
//! envelope (the boundary term beats against the residual phase), so the
//! tail fit runs on look-forward maxima rather than raw samples; for a
//! monotone curve the extraction is the identity.

use crate::dynamics::ErrorCurve;
use crate::error::{Error, Result};
use crate::schedule::Family;

/// Fixed thresholds of the window detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Minimum R² for a window to count as linear.
    pub r2_threshold: f64,
    /// Minimum number of samples per window.
    pub min_points: usize,
    /// Minimum JT_hi/JT_lo per window.
    pub min_span_ratio: f64,
    /// Look-forward width (in samples) of the tail envelope extraction.
    pub envelope_lookahead: usize,
    /// Block width (in samples) of the geometric-mean smoothing applied
    /// before the exponential fit; averaging over a beat period of the
    /// interfering boundary term cancels its oscillation to first order.
    pub exp_block: usize,
    /// Relative slack allowed in the sliding concavity test of the
    /// exponential-window detector.
    pub convexity_tol: f64,
    /// Exclude samples below `floor_factor`·√r from the exponential window
    /// for constant-norm curves (the O(√r) additive floor would bias the
    /// rate).
    pub floor_factor: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            r2_threshold: 0.999,
            min_points: 6,
            min_span_ratio: 1.5,
            envelope_lookahead: 6,
            exp_block: 6,
            convexity_tol: 0.15,
            floor_factor: 0.3,
        }
    }
}

/// Fitted exponential regime δ ≈ prefactor · e^(-rate · JT).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    pub rate: f64,
    pub prefactor: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    pub residual_rms: f64,
}

/// Fitted polynomial regime δ ≈ coeff · JT^(-order).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyFit {
    pub order: f64,
    pub coeff: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    pub residual_rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Both,
    ExpOnly,
    PolyOnly,
    None,
}

impl FitStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            FitStatus::Both => "both",
            FitStatus::ExpOnly => "exp_only",
            FitStatus::PolyOnly => "poly_only",
            FitStatus::None => "none",
        }
    }
}

/// Detected regimes of an error curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeFit {
    pub exp: Option<ExpFit>,
    pub poly: Option<PolyFit>,
    /// Intersection of the two fitted curves; `None` when either regime is
    /// missing or no intersection is bracketed.
    pub crossover_jt: Option<f64>,
}

impl RegimeFit {
    pub fn status(&self) -> FitStatus {
        match (&self.exp, &self.poly) {
            (Some(_), Some(_)) => FitStatus::Both,
            (Some(_), None) => FitStatus::ExpOnly,
            (None, Some(_)) => FitStatus::PolyOnly,
            (None, None) => FitStatus::None,
        }
    }

    /// Flat key=value report.
    pub fn to_report(&self) -> String {
        fn num(v: Option<f64>) -> String {
            match v {
                Some(x) => format!("{x}"),
                None => "nan".into(),
            }
        }
        let mut out = String::new();
        out.push_str(&format!("exp_rate={}\n", num(self.exp.map(|e| e.rate))));
        out.push_str(&format!("exp_prefactor={}\n", num(self.exp.map(|e| e.prefactor))));
        out.push_str(&format!("exp_window_lo={}\n", num(self.exp.map(|e| e.window.0))));
        out.push_str(&format!("exp_window_hi={}\n", num(self.exp.map(|e| e.window.1))));
        out.push_str(&format!("poly_order={}\n", num(self.poly.map(|p| p.order))));
        out.push_str(&format!("poly_coeff={}\n", num(self.poly.map(|p| p.coeff))));
        out.push_str(&format!("poly_window_lo={}\n", num(self.poly.map(|p| p.window.0))));
        out.push_str(&format!("poly_window_hi={}\n", num(self.poly.map(|p| p.window.1))));
        out.push_str(&format!("crossover_JT={}\n", num(self.crossover_jt)));
        out.push_str(&format!("status={}\n", self.status().as_str()));
        out
    }
}

/// Least-squares line through (a_i, y_i): (slope, intercept, r², rms).
fn line_fit(a: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = a.len() as f64;
    let sa: f64 = a.iter().sum();
    let sy: f64 = y.iter().sum();
    let saa: f64 = a.iter().map(|v| v * v).sum();
    let say: f64 = a.iter().zip(y).map(|(v, w)| v * w).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let denom = n * saa - sa * sa;
    if denom <= 0.0 {
        return (0.0, sy / n, 0.0, f64::INFINITY);
    }
    let slope = (n * say - sa * sy) / denom;
    let intercept = (sy - slope * sa) / n;
    let sst = syy - sy * sy / n;
    let sse: f64 = a
        .iter()
        .zip(y)
        .map(|(v, w)| {
            let res = w - (slope * v + intercept);
            res * res
        })
        .sum();
    let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 0.0 };
    (slope, intercept, r2, (sse / a.len() as f64).sqrt())
}

struct Samples {
    jt: Vec<f64>,
    ln_delta: Vec<f64>,
}

fn usable_samples(curve: &ErrorCurve) -> Samples {
    let mut jt = Vec::new();
    let mut ln_delta = Vec::new();
    for s in curve.ok_samples() {
        if s.jt > 0.0 && s.delta_ad > 0.0 {
            jt.push(s.jt);
            ln_delta.push(s.delta_ad.ln());
        }
    }
    Samples { jt, ln_delta }
}

/// Upper-envelope extraction for the tail fit: the maximum of each block of
/// `w` samples, with a parabolic crest refinement when the block maximum is
/// a strict local maximum (on a monotone decreasing curve every block
/// maximum is the block's first sample and passes through unchanged).
fn envelope_points(jt: &[f64], delta: &[f64], w: usize) -> (Vec<f64>, Vec<f64>) {
    let n = jt.len();
    let mut out_jt = Vec::new();
    let mut out_delta = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + w).min(n);
        let mut arg = start;
        for i in start..end {
            if delta[i] > delta[arg] {
                arg = i;
            }
        }
        let (mut t, mut d) = (jt[arg], delta[arg]);
        if arg > 0 && arg + 1 < n && delta[arg] >= delta[arg - 1] && delta[arg] >= delta[arg + 1] {
            if let Some((tv, dv)) = parabola_vertex(
                (jt[arg - 1], delta[arg - 1]),
                (jt[arg], delta[arg]),
                (jt[arg + 1], delta[arg + 1]),
            ) {
                if tv > jt[arg - 1] && tv < jt[arg + 1] && dv >= d && dv <= 1.5 * d {
                    t = tv;
                    d = dv;
                }
            }
        }
        if out_jt.last().map_or(true, |&prev| t > prev) {
            out_jt.push(t);
            out_delta.push(d);
        }
        start = end;
    }
    chord_cleanup(&mut out_jt, &mut out_delta);
    (out_jt, out_delta)
}

/// Remove candidates sitting more than 1% below the log-log chord of their
/// neighbours: block maxima that landed mid-flank rather than on a crest.
/// Straight or concave envelopes pass through unchanged.
fn chord_cleanup(jt: &mut Vec<f64>, delta: &mut Vec<f64>) {
    const SLACK: f64 = 0.01;
    for _ in 0..3 {
        let n = jt.len();
        if n < 3 {
            return;
        }
        let mut keep = vec![true; n];
        for i in 1..n - 1 {
            let (u0, u1, u2) = (jt[i - 1].ln(), jt[i].ln(), jt[i + 1].ln());
            let (y0, y2) = (delta[i - 1].ln(), delta[i + 1].ln());
            let chord = y0 + (y2 - y0) * (u1 - u0) / (u2 - u0);
            if delta[i].ln() < chord - SLACK {
                keep[i] = false;
            }
        }
        // Endpoints against the extrapolated chord of the two nearest points.
        let extrap = |ua: f64, ya: f64, ub: f64, yb: f64, u: f64| ya + (yb - ya) * (u - ua) / (ub - ua);
        if delta[0].ln()
            < extrap(jt[1].ln(), delta[1].ln(), jt[2].ln(), delta[2].ln(), jt[0].ln()) - 1.5 * SLACK
        {
            keep[0] = false;
        }
        if delta[n - 1].ln()
            < extrap(
                jt[n - 3].ln(),
                delta[n - 3].ln(),
                jt[n - 2].ln(),
                delta[n - 2].ln(),
                jt[n - 1].ln(),
            ) - 1.5 * SLACK
        {
            keep[n - 1] = false;
        }
        if keep.iter().all(|&k| k) {
            return;
        }
        let mut j = 0;
        jt.retain(|_| {
            j += 1;
            keep[j - 1]
        });
        j = 0;
        delta.retain(|_| {
            j += 1;
            keep[j - 1]
        });
    }
}

/// Vertex of the parabola through three points, if it is a maximum.
fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<(f64, f64)> {
    let (x0, y0) = a;
    let (x1, y1) = b;
    let (x2, y2) = c;
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curv = (d1 - d0) / (x2 - x0);
    if !(curv < 0.0) {
        return None;
    }
    // Newton form y = y0 + d0(x-x0) + curv(x-x0)(x-x1); y' vanishes at xv.
    let xv = 0.5 * (x0 + x1 - d0 / curv);
    let yv = y0 + d0 * (xv - x0) + curv * (xv - x0) * (xv - x1);
    Some((xv, yv))
}

/// Detect regimes with the default thresholds.
pub fn fit_regimes(curve: &ErrorCurve) -> Result<RegimeFit> {
    fit_regimes_with(curve, &FitConfig::default())
}

pub fn fit_regimes_with(curve: &ErrorCurve, cfg: &FitConfig) -> Result<RegimeFit> {
    let data = usable_samples(curve);
    let n = data.jt.len();
    if n < 8 {
        return Err(Error::InsufficientData(format!(
            "need at least 8 ok samples with JT > 0 and delta > 0, got {n}"
        )));
    }
    let (dmin, dmax) = data
        .ln_delta
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if dmax - dmin < std::f64::consts::LN_10 {
        return Err(Error::InsufficientData(
            "samples must span at least one decade in delta".into(),
        ));
    }

    // Optional exponential-side floor exclusion for constant-norm curves.
    let floor = match (&curve.metadata.descriptor, curve.metadata.r) {
        (Some(d), Some(r)) if d.family == Family::ConstantNorm => {
            Some((cfg.floor_factor * r.sqrt()).ln())
        }
        _ => None,
    };
    let exp_idx: Vec<usize> = (0..n)
        .filter(|&i| floor.map_or(true, |f| data.ln_delta[i] >= f))
        .collect();

    let exp = detect_exp(&data, &exp_idx, cfg);

    // Tail region: past the exponential window when one exists.
    let tail_start_jt = exp.map(|e| e.window.1).unwrap_or(f64::NEG_INFINITY);
    let tail_jt: Vec<f64> = data.jt.iter().copied().filter(|&t| t > tail_start_jt).collect();
    let tail_delta: Vec<f64> = (0..n)
        .filter(|&i| data.jt[i] > tail_start_jt)
        .map(|i| data.ln_delta[i].exp())
        .collect();
    let (env_jt, env_delta) = envelope_points(&tail_jt, &tail_delta, cfg.envelope_lookahead);
    let poly = detect_poly(&env_jt, &env_delta, cfg);

    let crossover_jt = match (&exp, &poly) {
        (Some(e), Some(p)) => intersect(e, p),
        _ => None,
    };
    Ok(RegimeFit { exp, poly, crossover_jt })
}

fn window_ok(jt: &[f64], cfg: &FitConfig) -> bool {
    jt.len() >= cfg.min_points && jt[jt.len() - 1] / jt[0] >= cfg.min_span_ratio
}

/// Maximal run of block-mean points where log δ is concave-to-linear
/// against JT, then least squares over the whole run.
///
/// Concavity (local decay rate non-decreasing along JT) is what separates
/// an exponential regime from a power law: C·JT^(-p) has rate p/JT, which
/// strictly decreases, so power-law stretches are convex and never enter
/// the run. As a backstop against locally-flat convexity slipping through
/// the slack, the final run must also score better against JT than against
/// log JT.
fn detect_exp(data: &Samples, idx: &[usize], cfg: &FitConfig) -> Option<ExpFit> {
    // Geometric means over blocks of `exp_block` samples suppress the
    // residual-phase beats riding on the exponential segment.
    let mut mean_jt = Vec::new();
    let mut mean_y = Vec::new();
    let mut start = 0;
    while start < idx.len() {
        let end = (start + cfg.exp_block).min(idx.len());
        let block = &idx[start..end];
        let n = block.len() as f64;
        mean_jt.push(block.iter().map(|&i| data.jt[i]).sum::<f64>() / n);
        mean_y.push(block.iter().map(|&i| data.ln_delta[i]).sum::<f64>() / n);
        start = end;
    }
    let m = mean_jt.len();
    let w = 4;
    if m < w.max(cfg.min_points) {
        return None;
    }
    // Sliding concavity gate: within each short window the right half must
    // decay at least as fast as the left half, within the slack.
    let mut pass = vec![false; m - w + 1];
    for i in 0..=(m - w) {
        let jt = &mean_jt[i..i + w];
        let y = &mean_y[i..i + w];
        let half = w / 2;
        let (s_left, _, _, _) = line_fit(&jt[..half + 1], &y[..half + 1]);
        let (s_right, _, _, _) = line_fit(&jt[half..], &y[half..]);
        let scale = 0.5 * (s_left.abs() + s_right.abs());
        pass[i] = s_right <= s_left + cfg.convexity_tol * scale && s_right < 0.0;
    }
    // Longest run of consecutive passing windows covers the points
    // [run_start, run_end + w - 1].
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < pass.len() {
        if pass[i] {
            let mut j = i;
            while j + 1 < pass.len() && pass[j + 1] {
                j += 1;
            }
            let len = j - i + w;
            if best.map_or(true, |(a, b)| len > b - a + 1) {
                best = Some((i, j + w - 1));
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    let (lo, hi) = best?;
    let jt = &mean_jt[lo..=hi];
    let y = &mean_y[lo..=hi];
    if jt.len() < cfg.min_points || !window_ok(jt, cfg) {
        return None;
    }
    let u: Vec<f64> = jt.iter().map(|t| t.ln()).collect();
    let (slope, intercept, r2, rms) = line_fit(jt, y);
    let (_, _, r2_other, _) = line_fit(&u, y);
    if !(slope < 0.0 && r2 > r2_other) {
        return None;
    }
    Some(ExpFit {
        rate: -slope,
        prefactor: intercept.exp(),
        window: (jt[0], jt[jt.len() - 1]),
        n_points: jt.len(),
        residual_rms: rms,
    })
}

/// Longest tail-anchored window over the envelope points that is linear in
/// log-log and more linear there than against JT.
fn detect_poly(env_jt: &[f64], env_delta: &[f64], cfg: &FitConfig) -> Option<PolyFit> {
    let m = env_jt.len();
    if m < cfg.min_points {
        return None;
    }
    for start in 0..=(m - cfg.min_points) {
        let jt = &env_jt[start..];
        if !window_ok(jt, cfg) {
            continue;
        }
        let y: Vec<f64> = env_delta[start..].iter().map(|d| d.ln()).collect();
        let u: Vec<f64> = jt.iter().map(|t| t.ln()).collect();
        let (slope, intercept, r2, rms) = line_fit(&u, &y);
        let (_, _, r2_other, _) = line_fit(jt, &y);
        if slope < 0.0 && r2 >= cfg.r2_threshold && r2 > r2_other {
            return Some(PolyFit {
                order: -slope,
                coeff: intercept.exp(),
                window: (jt[0], jt[jt.len() - 1]),
                n_points: jt.len(),
                residual_rms: rms,
            });
        }
    }
    None
}

fn intersect(e: &ExpFit, p: &PolyFit) -> Option<f64> {
    // g(T) = ln(pref) - rate·T - ln(coeff) + order·ln(T); strictly
    // decreasing past T = order/rate, where the unique handover root lives.
    let g = |t: f64| e.prefactor.ln() - e.rate * t - p.coeff.ln() + p.order * t.ln();
    let mut lo = (p.order / e.rate).max(e.window.0) * (1.0 + 1e-12);
    if g(lo) <= 0.0 {
        // Exponential already below the tail at its own window: fall back to
        // scanning from the left edge of the exponential window.
        lo = e.window.0;
        if g(lo) <= 0.0 {
            return None;
        }
    }
    let mut hi = lo.max(p.window.1);
    let mut guard = 0;
    while g(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        if guard > 60 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

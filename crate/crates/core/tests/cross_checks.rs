//! Cross-module oracle checks: the two-value full-Hamiltonian integration
//! against the rotated-frame reduction, and the Dyson series against the
//! simulated error.

use adia_core::estimators::dyson_terms;
use adia_core::rk::IntegratorConfig;
use adia_core::{
    adiabatic_error, integrate_full, phi, sweep, Family, NormProfile, ProblemInstance, Schedule,
    ThetaFunction,
};

fn problem_counts(n: u64, m: u64) -> (ProblemInstance, f64) {
    let p = ProblemInstance::from_counts(n, m, 1.0).unwrap();
    let r = p.marked_fraction();
    (p, r)
}

#[test]
fn representation_equivalence_across_families_and_thetas() {
    // The full two-value dynamics and the rotated 2x2 reduction describe the
    // same evolution; they only share the schedule evaluation.
    let cfg = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-12, ..Default::default() };
    let thetas: Vec<(&str, ThetaFunction)> = vec![
        ("identity", ThetaFunction::identity()),
        ("beta2", ThetaFunction::beta(2).unwrap()),
    ];
    for (n, m) in [(16u64, 2u64), (64, 8), (256, 1)] {
        let (p, r) = problem_counts(n, m);
        for family in [Family::Linear, Family::ConstantNorm, Family::ConstantGap, Family::General]
        {
            for (tname, theta) in &thetas {
                let s = Schedule::new(family, theta.clone(), NormProfile::Unit, r).unwrap();
                for jt in [0.0, 5.0, 50.0] {
                    let full = integrate_full(&s, n, m, jt, &cfg).unwrap();
                    let reduced = adiabatic_error(&s, &p, jt, &cfg).unwrap();
                    assert!(
                        (full - reduced).abs() <= 1e-8,
                        "{family:?}/{tname} N={n} M={m} JT={jt}: {full} vs {reduced}"
                    );
                }
            }
        }
    }
}

#[test]
fn representation_equivalence_with_norm_profiles() {
    let cfg = IntegratorConfig { rel_tol: 1e-12, abs_tol: 1e-12, ..Default::default() };
    let (p, r) = problem_counts(64, 4);
    for profile in [
        NormProfile::Parabolic,
        NormProfile::Sinusoidal,
        NormProfile::Zeta(0.25),
    ] {
        let theta = ThetaFunction::beta(1).unwrap();
        let s = Schedule::new(Family::General, theta, profile, r).unwrap();
        for jt in [0.0, 7.5, 40.0] {
            let full = integrate_full(&s, 64, 4, jt, &cfg).unwrap();
            let reduced = adiabatic_error(&s, &p, jt, &cfg).unwrap();
            assert!(
                (full - reduced).abs() <= 1e-8,
                "{profile:?} JT={jt}: {full} vs {reduced}"
            );
        }
    }
}

#[test]
fn truncated_dyson_series_reproduces_small_errors() {
    // Where the series converges quickly, |I1 - I3| tracks the simulation.
    let cfg = IntegratorConfig::default();
    let r = 0.05;
    let s = Schedule::new(Family::Linear, ThetaFunction::identity(), NormProfile::Unit, r).unwrap();
    let p = ProblemInstance::from_fraction(r, 1.0).unwrap();
    for jt in [40.0, 80.0, 120.0] {
        let terms = dyson_terms(&s, &p, jt, 3).unwrap();
        let truncated = (terms[1].value - terms[3].value).norm();
        let sim = adiabatic_error(&s, &p, jt, &cfg).unwrap();
        assert!(
            (truncated - sim).abs() <= 0.05 * sim.max(1e-4),
            "JT={jt}: truncated {truncated} vs simulated {sim}"
        );
    }
}

#[test]
fn sweep_metadata_round_trips_through_descriptor() {
    let r = 0.125;
    let theta = ThetaFunction::beta(1).unwrap();
    let s = Schedule::new(Family::ConstantNorm, theta, NormProfile::Unit, r).unwrap();
    let p = ProblemInstance::from_fraction(r, 1.0).unwrap();
    let curve = sweep(&s, &p, &[0.0, 2.0, 4.0], &IntegratorConfig::default()).unwrap();
    let desc = curve.metadata.descriptor.unwrap();
    let rebuilt = Schedule::from_descriptor(&desc).unwrap();
    assert_eq!(rebuilt.family(), Family::ConstantNorm);
    assert_eq!(rebuilt.marked_fraction(), r);
    assert!((rebuilt.phi() - phi(r).unwrap()).abs() < 1e-15);
}

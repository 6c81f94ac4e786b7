//! Simulator and analysis library for continuous-time adiabatic quantum
//! search.
//!
//! The library computes the adiabatic error δ_ad(1) exactly by integrating
//! the reduced Schrödinger dynamics of the search Hamiltonian, evaluates the
//! analytic polynomial bounds and exponential estimates that govern it, and
//! characterizes the exponential-vs-polynomial error regimes and their
//! crossover as functions of the scaled run time JT and the marked fraction
//! r = M/N.
//!
//! Modules:
//! * [`schedule`] — interpolation families x(τ), θ reparametrizations, and
//!   derived scalar fields (gap, geodesic density, norms, spectrum).
//! * [`dynamics`] — reduced 2×2 and full-Hamiltonian integration, adiabatic
//!   errors, constant-gap closed forms, and sweeps.
//! * [`estimators`] — polynomial bounds, Dyson terms, pole locations,
//!   complex gap actions, exponential estimates, crossover, run-time metric,
//!   and regime fitting.
//! * [`validate`] — the cross-module invariant suite behind `validate`.
//!
//! All types are immutable after construction and evaluation is pure, so
//! values may be shared and evaluated concurrently without restriction.

pub mod dynamics;
pub mod error;
pub mod estimators;
pub mod problem;
pub mod quad;
pub mod rk;
pub mod schedule;
pub mod theta;
pub mod validate;

pub use dynamics::{
    adiabatic_error, adiabatic_error_reduced, constant_gap_closed_form, constant_gap_zeros,
    integrate_full, integrate_full_state, integrate_reduced, sweep, CurveMetadata, ErrorCurve,
    ErrorSample, Frame, FullState, ReducedState, SampleFlag,
};
pub use error::{Error, Result};
pub use problem::ProblemInstance;
pub use rk::IntegratorConfig;
pub use schedule::{phi, Family, NormProfile, Schedule, ScheduleDescriptor, SchedulePoint};
pub use theta::{ThetaFunction, ThetaKind};

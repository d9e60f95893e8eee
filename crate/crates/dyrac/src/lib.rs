//! Mechanism-level simulation, control, and analysis toolkit for a
//! three-motor variable impedance actuator.
//!
//! The modeled actuator varies its output stiffness by sliding the pivot
//! point of a torsion-spring lever: a crank driven by the relative
//! rotation of two coaxial motors sets the pivot radius, which scales the
//! effective stiffness from nearly zero to three orders of magnitude above
//! the spring's own rate. A third motor on the output shaft renders
//! viscous damping in torque mode.
//!
//! # What's here
//!
//! - [`geometry`]: closed-form crank and lever kinematics.
//! - [`statics`]: torques, forces, effective stiffness, stored energy, and
//!   characterization curves.
//! - [`actuation`]: rate-limited position servos and the saturating,
//!   lagged damper motor.
//! - [`controller`]: stiffness-setpoint pipeline (two stiffness-to-radius
//!   maps), motor position commands, and the impact-triggered damping
//!   scheduler.
//! - [`sim`]: fixed-step RK4 simulation of the output inertia through the
//!   nonlinear spring, with end stops, optional play, and scenario/event
//!   execution.
//! - [`analysis`]: polyline simplification, hysteresis center lines,
//!   stiffness-map fitting, velocity gain, and schedule grid search.
//! - [`scenario_file`] and [`cli`]: the text scenario format and the
//!   `dyrac` binary's commands.
//!
//! # Quick start
//!
//! ```
//! use dyrac::DesignParams;
//!
//! let params = DesignParams::default();
//! // pivot at half the lever: effective stiffness equals the spring's
//! let k_e = params.small_deflection_stiffness(0.010).unwrap();
//! assert!((k_e - params.k).abs() < 1e-9);
//! // holding 0.3 rad of deflection at a compliant setting
//! let torque = params.output_torque(0.0069, 0.3).unwrap();
//! assert!(torque > 4.0 && torque < 4.3);
//! ```
//!
//! Runnable walkthroughs live in `examples/`; each major capability has
//! one (`cargo run --example hammer`, `--example stiffness_curves`, ...).

// `!(x > 0.0)` guards reject NaN along with the out-of-range values;
// the positively-phrased comparisons clippy prefers would let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod actuation;
pub mod analysis;
pub mod cli;
pub mod controller;
pub mod error;
pub mod geometry;
pub mod scenario;
pub mod scenario_file;
pub mod sim;
pub mod statics;
pub mod trace;

pub use actuation::{damper_torque, servo_step, DamperModel, ServoModel, ServoState};
pub use analysis::{
    douglas_peucker, fit_radius_stiffness, hysteresis_centerline, optimize_schedule,
    quasi_static_sweep, velocity_gain, Polyline, ScheduleCandidate,
};
pub use controller::{
    DampingController, FitCoefficients, Setpoints, StiffnessSetpoint, TriggerRule,
};
pub use error::{Error, Result};
pub use geometry::{DesignParams, MechanismConfiguration};
pub use scenario::{Scenario, StiffnessEntry, Waveform};
pub use scenario_file::{load_scenario, parse_scenario};
pub use sim::{apply_backlash, measure_step_response, simulate, StepResponseResult};
pub use statics::{CurveKind, CurveSpec, StaticsResult};
pub use trace::{SimTrace, TraceRow};

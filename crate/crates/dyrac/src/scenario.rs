//! Scenario description: everything a simulation run needs.

use crate::actuation::{DamperModel, ServoModel};
use crate::controller::{StiffnessSetpoint, TriggerRule};
use crate::error::{Error, Result};
use crate::geometry::DesignParams;

/// Default mechanical end stop, +-120 degrees of deflection.
pub const DEFAULT_END_STOP: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Neutral-position drive waveform for motor 1.
#[derive(Debug, Clone, PartialEq)]
pub enum Waveform {
    /// Hold a fixed command (locked motors).
    Hold { position: f64 },
    /// `offset + amplitude * sin(2 pi f t + phase)` for `cycles` full
    /// periods, then a step command to `rest` for the remainder of the
    /// run. `cycles = 0` drives for the whole run. A phase of `-pi/2`
    /// starts the swing at its lower extremum with zero commanded
    /// velocity.
    Sine {
        amplitude: f64,
        freq_hz: f64,
        offset: f64,
        phase: f64,
        cycles: f64,
        rest: f64,
    },
    /// Piecewise-linear position trajectory; held at the end points
    /// outside the listed time range.
    PiecewiseLinear { points: Vec<[f64; 2]> },
}

impl Waveform {
    /// Commanded motor-1 position at time `t`.
    pub fn command(&self, t: f64) -> f64 {
        match self {
            Waveform::Hold { position } => *position,
            Waveform::Sine {
                amplitude,
                freq_hz,
                offset,
                phase,
                cycles,
                rest,
            } => {
                if *cycles > 0.0 && t >= cycles / freq_hz {
                    *rest
                } else {
                    offset + amplitude * (2.0 * std::f64::consts::PI * freq_hz * t + phase).sin()
                }
            }
            Waveform::PiecewiseLinear { points } => {
                let first = points.first().expect("validated non-empty");
                let last = points.last().expect("validated non-empty");
                if t <= first[0] {
                    return first[1];
                }
                if t >= last[0] {
                    return last[1];
                }
                let i = points.partition_point(|p| p[0] <= t);
                let (a, b) = (points[i - 1], points[i]);
                let f = (t - a[0]) / (b[0] - a[0]);
                a[1] + f * (b[1] - a[1])
            }
        }
    }

    /// End of the actively driven interval, if the waveform has one.
    pub fn drive_end(&self) -> Option<f64> {
        match self {
            Waveform::Sine {
                freq_hz, cycles, ..
            } if *cycles > 0.0 => Some(cycles / freq_hz),
            Waveform::PiecewiseLinear { points } => points.last().map(|p| p[0]),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Waveform::Hold { position } => {
                if !position.is_finite() {
                    return Err(Error::Config("hold position must be finite".into()));
                }
            }
            Waveform::Sine {
                amplitude,
                freq_hz,
                offset,
                phase,
                cycles,
                rest,
            } => {
                if !(freq_hz.is_finite() && *freq_hz > 0.0) {
                    return Err(Error::Config(format!(
                        "sine frequency must be positive, got {freq_hz}"
                    )));
                }
                for (name, v) in [
                    ("amplitude", amplitude),
                    ("offset", offset),
                    ("phase", phase),
                    ("cycles", cycles),
                    ("rest", rest),
                ] {
                    if !v.is_finite() || (name == "cycles" && *v < 0.0) {
                        return Err(Error::Config(format!("sine {name} invalid: {v}")));
                    }
                }
            }
            Waveform::PiecewiseLinear { points } => {
                if points.is_empty() {
                    return Err(Error::Config("piecewise-linear drive needs points".into()));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0]))
                    || points
                        .iter()
                        .any(|p| !(p[0].is_finite() && p[1].is_finite()))
                {
                    return Err(Error::Config(
                        "piecewise-linear drive points must be finite with strictly increasing times"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Timed stiffness setpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessEntry {
    pub t: f64,
    pub set: StiffnessSetpoint,
}

/// Complete simulation description. Use [`Scenario::new`] for a run with
/// the reference design and fill in the drive and schedules.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub design: DesignParams,
    /// Output load inertia (kg m^2).
    pub load_inertia: f64,
    /// Viscous friction on the output (N m s/rad).
    pub load_viscous_friction: f64,
    /// Coulomb friction torque on the output (N m).
    pub coulomb_friction: f64,
    /// Backlash dead zone on the transmitted deflection (rad).
    pub backlash: f64,
    /// One-sided end stop position (rad).
    pub end_stop: f64,
    /// Neutral-position motor.
    pub servo1: ServoModel,
    /// Stiffness motor.
    pub servo2: ServoModel,
    /// Damper hardware (the damping factor itself is scheduled).
    pub damper: DamperModel,
    pub drive: Waveform,
    /// Zero-order-held stiffness setpoints; first entry must be at t = 0.
    pub stiffness_schedule: Vec<StiffnessEntry>,
    /// Zero-order-held damping setpoints (t, b).
    pub damping_schedule: Vec<[f64; 2]>,
    pub trigger: TriggerRule,
    /// Integrator step (s).
    pub dt_physics: f64,
    /// Control tick and trace sample interval (s); must be an integer
    /// multiple of `dt_physics`.
    pub dt_control: f64,
    pub duration: f64,
    /// Initial deflection of the output away from the commanded neutral
    /// position (rad).
    pub initial_alpha: f64,
    /// Initial output velocity (rad/s).
    pub initial_eta_dot: f64,
}

impl Scenario {
    /// Scenario with the reference design, a locked drive, and nothing
    /// scheduled except an initial pivot radius.
    pub fn new(initial: StiffnessSetpoint) -> Self {
        Scenario {
            design: DesignParams::default(),
            load_inertia: 0.0125,
            load_viscous_friction: 0.0,
            coulomb_friction: 0.0,
            backlash: 0.0,
            end_stop: DEFAULT_END_STOP,
            servo1: ServoModel::default(),
            servo2: ServoModel::default(),
            damper: DamperModel::default(),
            drive: Waveform::Hold { position: 0.0 },
            stiffness_schedule: vec![StiffnessEntry {
                t: 0.0,
                set: initial,
            }],
            damping_schedule: vec![],
            trigger: TriggerRule::None,
            dt_physics: 1e-4,
            dt_control: 1e-3,
            duration: 1.0,
            initial_alpha: 0.0,
            initial_eta_dot: 0.0,
        }
    }

    /// Number of physics sub-steps per control tick.
    pub fn substeps(&self) -> usize {
        (self.dt_control / self.dt_physics).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.design.validate()?;
        if !(self.load_inertia > 0.0) {
            return Err(Error::Config(format!(
                "load inertia must be positive, got {}",
                self.load_inertia
            )));
        }
        if !(self.dt_physics > 0.0 && self.dt_control >= self.dt_physics) {
            return Err(Error::Config(format!(
                "need 0 < dt_physics <= dt_control, got {} and {}",
                self.dt_physics, self.dt_control
            )));
        }
        let ratio = self.dt_control / self.dt_physics;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::Config(format!(
                "dt_control must be an integer multiple of dt_physics (ratio {ratio})"
            )));
        }
        if !(self.duration > 0.0) {
            return Err(Error::Config("duration must be positive".into()));
        }
        if !(self.end_stop > 0.0) {
            return Err(Error::Config("end stop must be positive".into()));
        }
        if self.backlash < 0.0 || self.coulomb_friction < 0.0 || self.load_viscous_friction < 0.0 {
            return Err(Error::Config(
                "backlash and friction terms must be non-negative".into(),
            ));
        }
        self.drive.validate()?;
        if self.stiffness_schedule.is_empty() {
            return Err(Error::Config(
                "stiffness schedule needs an initial entry".into(),
            ));
        }
        if self.stiffness_schedule[0].t != 0.0 {
            return Err(Error::Config(
                "first stiffness entry must be at t = 0".into(),
            ));
        }
        if self
            .stiffness_schedule
            .windows(2)
            .any(|w| !(w[1].t > w[0].t))
        {
            return Err(Error::Config(
                "stiffness schedule times must be strictly increasing".into(),
            ));
        }
        if self
            .damping_schedule
            .windows(2)
            .any(|w| !(w[1][0] > w[0][0]))
            || self.damping_schedule.iter().any(|e| e[1] < 0.0)
        {
            return Err(Error::Config(
                "damping schedule must have increasing times and non-negative factors".into(),
            ));
        }
        if let TriggerRule::NegativePosition { b_low, b_high } = self.trigger {
            if b_low < 0.0 || b_high < 0.0 {
                return Err(Error::Config(
                    "trigger damping factors must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    /// Scheduled stiffness setpoint active at time `t` (zero-order hold).
    pub fn stiffness_at(&self, t: f64) -> StiffnessSetpoint {
        let mut active = self.stiffness_schedule[0].set;
        for e in &self.stiffness_schedule {
            if e.t <= t + 1e-12 {
                active = e.set;
            } else {
                break;
            }
        }
        active
    }

    /// Scheduled damping factor active at time `t` (zero-order hold; 0
    /// before the first entry or with an empty schedule).
    pub fn damping_at(&self, t: f64) -> f64 {
        let mut active = 0.0;
        for e in &self.damping_schedule {
            if e[0] <= t + 1e-12 {
                active = e[1];
            } else {
                break;
            }
        }
        active
    }
}

//! Setpoint pipeline: stiffness setpoint -> pivot radius -> crank angle ->
//! motor position commands, plus damping scheduling with the impact
//! trigger.
//!
//! Two stiffness-to-radius maps are provided. The analytic map inverts the
//! ideal zero-deflection law exactly and is the simulator default. The
//! empirical map is the cubic-log calibration fitted against prototype
//! measurements (which include play); it exists to reproduce the hardware
//! controller and to be re-fitted from data.

use crate::error::{Error, Result};
use crate::geometry::DesignParams;

/// Stiffness request: exactly one of a pivot radius or an effective
/// stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StiffnessSetpoint {
    /// Pivot radius (m).
    Radius(f64),
    /// Zero-deflection effective stiffness (N m/rad), converted through
    /// the analytic map.
    EffectiveStiffness(f64),
}

/// One controller input frame.
#[derive(Debug, Clone, Copy)]
pub struct Setpoints {
    /// Neutral position (rad).
    pub phi_set: f64,
    pub stiffness: StiffnessSetpoint,
    /// Damping factor (N m s/rad).
    pub b_set: f64,
}

/// Coefficients of the empirical stiffness-to-radius map
/// `r = scale * (p * (ln k_e + q))^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitCoefficients {
    pub p: f64,
    pub q: f64,
    /// Length scale of the cubic (m).
    pub scale: f64,
}

/// Calibration of the reference prototype: p = 0.2273, q = 5.9, millimeter
/// scale.
impl Default for FitCoefficients {
    fn default() -> Self {
        FitCoefficients {
            p: 0.2273,
            q: 5.9,
            scale: 1e-3,
        }
    }
}

impl FitCoefficients {
    /// Evaluate the map without any band clamping (m).
    pub fn radius(&self, k_e: f64) -> Result<f64> {
        if !(k_e > (-self.q).exp()) {
            return Err(Error::Domain(format!(
                "stiffness {k_e} N m/rad at or below the map's zero at exp(-q) = {:.3e}",
                (-self.q).exp()
            )));
        }
        let base = self.p * (k_e.ln() + self.q);
        Ok(self.scale * base * base * base)
    }
}

/// A radius that may have been saturated to the reachable band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedRadius {
    /// Radius after clamping (m).
    pub r: f64,
    /// True if the raw value fell outside the band. The controller runs in
    /// a live loop, so out-of-band requests saturate with a flag instead
    /// of failing.
    pub clamped: bool,
}

impl DesignParams {
    fn clamp_radius(&self, raw: f64) -> ClampedRadius {
        let (lo, hi) = (self.r_min(), self.r_max());
        let r = raw.clamp(lo, hi);
        ClampedRadius {
            r,
            clamped: raw < lo || raw > hi,
        }
    }

    /// Empirical map: radius for a stiffness setpoint through the fitted
    /// cubic-log calibration, clamped to the reachable band.
    pub fn radius_from_stiffness_fit(
        &self,
        coeffs: &FitCoefficients,
        k_e: f64,
    ) -> Result<ClampedRadius> {
        Ok(self.clamp_radius(coeffs.radius(k_e)?))
    }

    /// Analytic map: exact inverse of the zero-deflection stiffness law,
    /// `r = l s / (1 + s)` with `s = sqrt(k_e / k)`, clamped to the
    /// reachable band.
    pub fn radius_from_stiffness_analytic(&self, k_e: f64) -> Result<ClampedRadius> {
        if !(k_e > 0.0) {
            return Err(Error::Domain(format!(
                "stiffness setpoint must be positive, got {k_e}"
            )));
        }
        let s = (k_e / self.k).sqrt();
        Ok(self.clamp_radius(self.l * s / (1.0 + s)))
    }

    /// Resolve a stiffness setpoint to a clamped radius.
    pub fn resolve_stiffness(&self, set: StiffnessSetpoint) -> Result<ClampedRadius> {
        match set {
            StiffnessSetpoint::Radius(r) => Ok(self.clamp_radius(r)),
            StiffnessSetpoint::EffectiveStiffness(k_e) => self.radius_from_stiffness_analytic(k_e),
        }
    }

    /// Motor position commands for a setpoint frame.
    ///
    /// Motor 1 takes the neutral position directly; motor 2 leads it by
    /// the crank angle, `phi_2 = phi_1 + delta(r_set)`, so that changing
    /// the neutral position moves both motors together and leaves the
    /// stiffness untouched.
    pub fn motor_commands(&self, setpoints: &Setpoints) -> Result<MotorCommands> {
        let r = self.resolve_stiffness(setpoints.stiffness)?;
        let delta = self.crank_angle_for_radius(r.r)?;
        Ok(MotorCommands {
            phi_1: setpoints.phi_set,
            phi_2: setpoints.phi_set + delta,
            r_set: r,
        })
    }
}

/// Position commands produced by [`DesignParams::motor_commands`].
#[derive(Debug, Clone, Copy)]
pub struct MotorCommands {
    pub phi_1: f64,
    pub phi_2: f64,
    pub r_set: ClampedRadius,
}

/// Damping scheduling rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TriggerRule {
    /// Hold the initial damping factor for the whole run.
    None,
    /// Follow the scenario's damping schedule.
    TimeSchedule,
    /// Start at `b_low`; latch `b_high` the first time the output position
    /// goes negative (the impact surrogate) and hold it to the end.
    NegativePosition { b_low: f64, b_high: f64 },
}

/// Stateful damping scheduler owned by the simulation loop.
#[derive(Debug, Clone)]
pub struct DampingController {
    rule: TriggerRule,
    latched: bool,
    /// Time at which the trigger latched, if it did (s).
    pub latched_at: Option<f64>,
}

impl DampingController {
    pub fn new(rule: TriggerRule) -> Self {
        DampingController {
            rule,
            latched: false,
            latched_at: None,
        }
    }

    /// Active damping factor given the measured output position, the time,
    /// and the schedule's current value.
    pub fn damping_trigger(&mut self, eta: f64, t: f64, scheduled_b: f64) -> f64 {
        match self.rule {
            TriggerRule::None | TriggerRule::TimeSchedule => scheduled_b,
            TriggerRule::NegativePosition { b_low, b_high } => {
                if !self.latched && eta < 0.0 {
                    self.latched = true;
                    self.latched_at = Some(t);
                }
                if self.latched {
                    b_high
                } else {
                    b_low
                }
            }
        }
    }
}

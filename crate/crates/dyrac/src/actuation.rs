//! Drive models: rate-limited position servos for the neutral-position and
//! stiffness motors, and the torque-mode damper motor.
//!
//! The position drivers are abstracted as first-order tracking with a hard
//! velocity clamp; the measured stiffness step times emerge from the clamp
//! alone, so the tracking bandwidth only shapes the last few hundredths of
//! a radian. Motor torque limits are checked and flagged by the simulator
//! but do not clip the kinematic tracking, because the physical drivers run
//! in position mode.

/// Position-servo parameters. Defaults match the reference drive stage:
/// 16 rad/s nominal velocity, 12 N m torque, 50 Hz tracking bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoModel {
    /// Hard slew limit (rad/s).
    pub velocity_limit: f64,
    /// Torque rating, used only for limit flags (N m).
    pub torque_limit: f64,
    /// First-order tracking bandwidth (Hz).
    pub tracking_bandwidth: f64,
}

impl Default for ServoModel {
    fn default() -> Self {
        ServoModel {
            velocity_limit: 16.0,
            torque_limit: 12.0,
            tracking_bandwidth: 50.0,
        }
    }
}

/// Servo state advanced by [`servo_step`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ServoState {
    /// Shaft position (rad).
    pub position: f64,
    /// Velocity realized over the last step (rad/s).
    pub velocity: f64,
}

/// Advance a servo by `dt` toward `commanded`.
///
/// The unsaturated update is the exact first-order response
/// `x' = cmd + (x - cmd) exp(-2 pi f dt)`; the step is then clamped to
/// `velocity_limit * dt`, so a saturated servo advances exactly at the slew
/// limit regardless of `dt`.
pub fn servo_step(model: &ServoModel, commanded: f64, state: ServoState, dt: f64) -> ServoState {
    assert!(dt > 0.0, "servo_step needs dt > 0");
    let lambda = 2.0 * std::f64::consts::PI * model.tracking_bandwidth;
    let target = commanded + (state.position - commanded) * (-lambda * dt).exp();
    let max_step = model.velocity_limit * dt;
    let step = (target - state.position).clamp(-max_step, max_step);
    ServoState {
        position: state.position + step,
        velocity: step / dt,
    }
}

/// Variable-damper parameters. The damping factor `b` is the runtime
/// setpoint; the torque limit and the torque-loop lag are hardware
/// constants (3 N m and 4.3 ms for the reference drive, which puts a
/// commanded step at 90 % after 10 ms).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamperModel {
    /// Rendered damping factor (N m s/rad).
    pub b: f64,
    /// Saturation torque (N m).
    pub torque_limit: f64,
    /// First-order torque-loop time constant (s); 0 for an ideal damper.
    pub lag_time_constant: f64,
}

impl Default for DamperModel {
    fn default() -> Self {
        DamperModel {
            b: 0.0,
            torque_limit: 3.0,
            lag_time_constant: 4.3e-3,
        }
    }
}

impl DamperModel {
    /// Raw commanded torque `b (phi_dot - eta_dot)` before saturation (N m).
    pub fn commanded_torque(&self, phi_dot: f64, eta_dot: f64) -> f64 {
        self.b * (phi_dot - eta_dot)
    }
}

/// One discrete damper update: saturate the commanded torque, then relax
/// the applied torque toward it through the torque-loop lag. The returned
/// torque acts on the output body.
pub fn damper_torque(
    model: &DamperModel,
    phi_dot: f64,
    eta_dot: f64,
    prev_torque: f64,
    dt: f64,
) -> f64 {
    assert!(dt > 0.0, "damper_torque needs dt > 0");
    let cmd = model
        .commanded_torque(phi_dot, eta_dot)
        .clamp(-model.torque_limit, model.torque_limit);
    if model.lag_time_constant <= 0.0 {
        cmd
    } else {
        cmd + (prev_torque - cmd) * (-dt / model.lag_time_constant).exp()
    }
}

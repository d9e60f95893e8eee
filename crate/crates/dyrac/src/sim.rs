//! Fixed-step time-domain simulation of the output inertia coupled to the
//! mechanism.
//!
//! Motors 1 and 2 are kinematic position sources tracked by the servo
//! models; the static motor torques are reported in the trace for limit
//! checking but are not integrated. The output obeys
//!
//! ```text
//! J eta_dd = -T_O(alpha_eff; r) + T_3 - b_visc eta_dot - T_coulomb + T_stop
//! alpha = eta - phi_1
//! ```
//!
//! integrated with explicit RK4 at `dt_physics`. Schedule setpoints
//! (stiffness, damping, trigger state) are zero-order held at the control
//! tick; the drive position command is interpolated linearly across the
//! tick, the way interpolating position drives consume their 1 kHz
//! setpoint stream (a raw staircase would ring the stiff output mode
//! through the servo's tracking velocity ripple). Within one physics step
//! the servo positions advance linearly (exactly right while slew-limited)
//! and the damper torque is held at the value computed at the step start.
//! A run is single-threaded and deterministic: the same scenario produces
//! a bit-identical trace.

use crate::actuation::{damper_torque, servo_step, ServoState};
use crate::controller::DampingController;
use crate::error::{Error, Result};
use crate::geometry::{radius_raw, spring_deflection_raw};
use crate::scenario::Scenario;
use crate::statics::output_torque_from_config;
use crate::trace::{flags, SimTrace, TraceRow};

/// Penalty stiffness of the end stop (N m/rad).
pub const END_STOP_STIFFNESS: f64 = 1e4;
/// Penalty damping of the end stop (N m s/rad).
pub const END_STOP_DAMPING: f64 = 10.0;

/// Transmitted deflection through a symmetric play dead zone:
/// `sign(alpha) * max(0, |alpha| - dead_zone / 2)`. Identity at zero dead
/// zone. This is the memoryless outbound-engagement branch; the contact
/// state of a full reversal cycle is modeled by
/// [`crate::analysis::quasi_static_sweep`].
pub fn apply_backlash(alpha: f64, dead_zone: f64) -> f64 {
    debug_assert!(dead_zone >= 0.0);
    alpha.signum() * (alpha.abs() - 0.5 * dead_zone).max(0.0)
}

/// 90 % step-response measurement result.
#[derive(Debug, Clone, Copy)]
pub struct StepResponseResult {
    /// Time from step issue until the pivot radius first crosses 90 % of
    /// the commanded change (s).
    pub t_90: f64,
    pub r_initial: f64,
    pub r_final: f64,
    /// Largest excursion past the final radius, as a fraction of the step.
    pub overshoot: f64,
}

struct SimState {
    servo1: ServoState,
    servo2: ServoState,
    eta: f64,
    eta_dot: f64,
    t3: f64,
}

/// Run a scenario to completion.
pub fn simulate(scenario: &Scenario) -> Result<SimTrace> {
    scenario.validate()?;
    let p = &scenario.design;
    let dt = scenario.dt_physics;
    let n_sub = scenario.substeps();
    let n_ticks = (scenario.duration / scenario.dt_control).round().max(1.0) as usize;

    // start settled on the t = 0 commands
    let phi1_cmd0 = scenario.drive.command(0.0);
    let mut r_set = p.resolve_stiffness(scenario.stiffness_at(0.0))?;
    let delta0 = p.crank_angle_for_radius(r_set.r)?;
    let mut state = SimState {
        servo1: ServoState {
            position: phi1_cmd0,
            velocity: 0.0,
        },
        servo2: ServoState {
            position: phi1_cmd0 + delta0,
            velocity: 0.0,
        },
        eta: phi1_cmd0 + scenario.initial_alpha,
        eta_dot: scenario.initial_eta_dot,
        t3: 0.0,
    };
    let mut damping = DampingController::new(scenario.trigger);
    let mut b = damping.damping_trigger(state.eta, 0.0, scenario.damping_at(0.0));
    let mut phi1_cmd = phi1_cmd0;
    let mut delta_cmd = delta0;

    let mut rows = Vec::with_capacity(n_ticks + 1);
    rows.push(sample_row(
        scenario,
        &state,
        0.0,
        phi1_cmd,
        r_set.r,
        b,
        r_set.clamped,
    )?);

    for tick in 0..n_ticks {
        let t_tick = tick as f64 * scenario.dt_control;
        let t_next = (tick + 1) as f64 * scenario.dt_control;
        let phi1_cmd_next = scenario.drive.command(t_next);
        for sub in 0..n_sub {
            let t = t_tick + sub as f64 * dt;
            // the drive command ramps linearly toward the next tick's value
            let f = (sub + 1) as f64 / n_sub as f64;
            let cmd = phi1_cmd + (phi1_cmd_next - phi1_cmd) * f;
            step_physics(scenario, &mut state, cmd, cmd + delta_cmd, b, t, dt)?;
        }
        // control tick: refresh the zero-order-held setpoints
        phi1_cmd = phi1_cmd_next;
        r_set = p.resolve_stiffness(scenario.stiffness_at(t_next))?;
        delta_cmd = p.crank_angle_for_radius(r_set.r)?;
        b = damping.damping_trigger(state.eta, t_next, scenario.damping_at(t_next));
        rows.push(sample_row(
            scenario,
            &state,
            t_next,
            phi1_cmd,
            r_set.r,
            b,
            r_set.clamped,
        )?);
    }
    Ok(SimTrace {
        rows,
        sample_dt: scenario.dt_control,
    })
}

/// One physics step: advance the servos, update the damper torque, then
/// integrate the output with RK4 while the servo positions move linearly.
fn step_physics(
    scenario: &Scenario,
    state: &mut SimState,
    phi1_cmd: f64,
    phi2_cmd: f64,
    b: f64,
    t: f64,
    dt: f64,
) -> Result<()> {
    let p = &scenario.design;
    let s1_from = state.servo1.position;
    let s2_from = state.servo2.position;
    state.servo1 = servo_step(&scenario.servo1, phi1_cmd, state.servo1, dt);
    state.servo2 = servo_step(&scenario.servo2, phi2_cmd, state.servo2, dt);
    let phi1_dot = state.servo1.velocity;
    let phi2_dot = state.servo2.velocity;

    let mut damper = scenario.damper;
    damper.b = b;
    state.t3 = damper_torque(&damper, phi1_dot, state.eta_dot, state.t3, dt);
    let t3 = state.t3;

    let j = scenario.load_inertia;
    let accel = |s: f64, eta: f64, eta_dot: f64| -> f64 {
        let phi1 = s1_from + phi1_dot * s;
        let phi2 = s2_from + phi2_dot * s;
        let r = radius_raw(p, phi2 - phi1);
        let alpha = eta - phi1;
        let alpha_eff = apply_backlash(alpha, scenario.backlash);
        let theta = spring_deflection_raw(p, r, alpha_eff);
        let beta = std::f64::consts::FRAC_PI_2 - alpha_eff.abs() - theta;
        let c = crate::geometry::spring_lever_raw(p, r, alpha_eff);
        let t_hold = alpha_eff.signum() * beta.sin() * p.k * theta / c * r;
        let mut torque = -t_hold + t3 - scenario.load_viscous_friction * eta_dot;
        if scenario.coulomb_friction > 0.0 && eta_dot.abs() > 1e-6 {
            torque -= scenario.coulomb_friction * eta_dot.signum();
        }
        torque += end_stop_torque(alpha, eta_dot - phi1_dot, scenario.end_stop);
        torque / j
    };

    // RK4 on (eta, eta_dot)
    let (y0, v0) = (state.eta, state.eta_dot);
    let k1v = accel(0.0, y0, v0);
    let k1y = v0;
    let h2 = 0.5 * dt;
    let k2v = accel(h2, y0 + h2 * k1y, v0 + h2 * k1v);
    let k2y = v0 + h2 * k1v;
    let k3v = accel(h2, y0 + h2 * k2y, v0 + h2 * k2v);
    let k3y = v0 + h2 * k2v;
    let k4v = accel(dt, y0 + dt * k3y, v0 + dt * k3v);
    let k4y = v0 + dt * k3v;
    state.eta = y0 + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    state.eta_dot = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);

    if !(state.eta.is_finite() && state.eta_dot.is_finite()) {
        return Err(Error::Simulation {
            t: t + dt,
            msg: "output state became non-finite".into(),
        });
    }
    if (state.eta - state.servo1.position).abs() > std::f64::consts::PI {
        return Err(Error::Simulation {
            t: t + dt,
            msg: format!(
                "deflection {:.3} rad left the geometric domain",
                state.eta - state.servo1.position
            ),
        });
    }
    Ok(())
}

/// One-sided penalty spring-damper past the end stops.
fn end_stop_torque(alpha: f64, alpha_dot: f64, end_stop: f64) -> f64 {
    if alpha > end_stop {
        -END_STOP_STIFFNESS * (alpha - end_stop) - END_STOP_DAMPING * alpha_dot
    } else if alpha < -end_stop {
        -END_STOP_STIFFNESS * (alpha + end_stop) - END_STOP_DAMPING * alpha_dot
    } else {
        0.0
    }
}

fn sample_row(
    scenario: &Scenario,
    state: &SimState,
    t: f64,
    phi1_cmd: f64,
    r_set: f64,
    b: f64,
    r_clamped: bool,
) -> Result<TraceRow> {
    let p = &scenario.design;
    let phi1 = state.servo1.position;
    let phi2 = state.servo2.position;
    let delta = phi2 - phi1;
    let r = radius_raw(p, delta);
    let alpha = state.eta - phi1;
    let alpha_eff = apply_backlash(alpha, scenario.backlash);
    let cfg = p
        .configuration(r, alpha_eff)
        .map_err(|e| Error::Simulation {
            t,
            msg: e.to_string(),
        })?;
    let t_o = output_torque_from_config(p, &cfg);
    let mut row_flags = 0u32;
    if r_clamped {
        row_flags |= flags::R_SET_CLAMPED;
    }
    let (t_1, t_2) = match p.motor_torques(r, alpha_eff) {
        Ok(m) => {
            if m.t_1.abs() > scenario.servo1.torque_limit {
                row_flags |= flags::MOTOR1_TORQUE_EXCEEDED;
            }
            if m.t_2.abs() > scenario.servo2.torque_limit {
                row_flags |= flags::MOTOR2_TORQUE_EXCEEDED;
            }
            (m.t_1, m.t_2)
        }
        Err(Error::Singularity(_)) => {
            row_flags |= flags::MOTOR_TORQUE_SINGULAR;
            (f64::NAN, f64::NAN)
        }
        Err(e) => {
            return Err(Error::Simulation {
                t,
                msg: e.to_string(),
            })
        }
    };
    if alpha.abs() > scenario.end_stop {
        row_flags |= flags::END_STOP_CONTACT;
    }
    let t3_cmd = b * (state.servo1.velocity - state.eta_dot);
    if t3_cmd.abs() > scenario.damper.torque_limit {
        row_flags |= flags::DAMPER_SATURATED;
    }
    Ok(TraceRow {
        t,
        phi1_cmd,
        phi1,
        phi1_dot: state.servo1.velocity,
        phi2,
        delta,
        r,
        r_set,
        alpha,
        theta: cfg.theta,
        eta: state.eta,
        eta_dot: state.eta_dot,
        t_o,
        t_1,
        t_2,
        t3_cmd,
        t3: state.t3,
        k_e0: p
            .small_deflection_stiffness(r)
            .map_err(|e| Error::Simulation {
                t,
                msg: e.to_string(),
            })?,
        e_spring: 0.5 * p.k * cfg.theta * cfg.theta,
        b_set: b,
        flags: row_flags,
    })
}

/// Simulate a scenario whose stiffness schedule contains exactly one step
/// and time the pivot-radius response.
///
/// `t_90` is the interval from the step issue until `r(t)` first crosses
/// `r_initial + 0.9 (r_final - r_initial)`, interpolated between trace
/// samples.
pub fn measure_step_response(scenario: &Scenario) -> Result<StepResponseResult> {
    scenario.validate()?;
    let p = &scenario.design;
    if scenario.stiffness_schedule.len() != 2 {
        return Err(Error::Config(format!(
            "step response needs a schedule with exactly one step (initial entry plus one change), \
             got {} entries",
            scenario.stiffness_schedule.len()
        )));
    }
    let r_initial = p.resolve_stiffness(scenario.stiffness_schedule[0].set)?.r;
    let r_final = p.resolve_stiffness(scenario.stiffness_schedule[1].set)?.r;
    let t_step = scenario.stiffness_schedule[1].t;
    if (r_final - r_initial).abs() < 1e-12 {
        return Ok(StepResponseResult {
            t_90: 0.0,
            r_initial,
            r_final,
            overshoot: 0.0,
        });
    }
    let trace = simulate(scenario)?;
    let span = r_final - r_initial;
    let r_90 = r_initial + 0.9 * span;
    let crossed = |r: f64| (r - r_90) * span.signum() >= 0.0;
    let mut t_cross = None;
    for w in trace.rows.windows(2) {
        if w[0].t + 1e-12 < t_step {
            continue;
        }
        if crossed(w[1].r) {
            let f = if crossed(w[0].r) {
                0.0
            } else {
                (r_90 - w[0].r) / (w[1].r - w[0].r)
            };
            t_cross = Some(w[0].t + f * (w[1].t - w[0].t));
            break;
        }
    }
    let t_cross = t_cross.ok_or_else(|| {
        Error::Data(format!(
            "pivot radius never crossed 90 % of the step ({r_initial} -> {r_final} m) \
             within the run"
        ))
    })?;
    let overshoot = trace
        .rows
        .iter()
        .filter(|row| row.t >= t_cross)
        .map(|row| ((row.r - r_final) * span.signum() / span.abs()).max(0.0))
        .fold(0.0, f64::max);
    Ok(StepResponseResult {
        t_90: t_cross - t_step,
        r_initial,
        r_final,
        overshoot,
    })
}

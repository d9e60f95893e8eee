//! The controller pipeline: stiffness setpoint to pivot radius (both the
//! analytic inverse and the empirical calibration), radius to crank angle,
//! and the two motor position commands; plus the impact trigger latching.
//!
//! ```bash
//! cargo run --example setpoint_pipeline
//! ```

use dyrac::{
    DampingController, DesignParams, FitCoefficients, Setpoints, StiffnessSetpoint, TriggerRule,
};

fn main() -> dyrac::Result<()> {
    let p = DesignParams::default();
    let calibration = FitCoefficients::default();

    println!("stiffness setpoint -> pivot radius:");
    println!(
        "{:>10} {:>16} {:>16}",
        "k_e", "analytic [mm]", "calibrated [mm]"
    );
    for k_e in [0.2, 1.0, 16.65, 60.0, 160.0, 313.0] {
        let analytic = p.radius_from_stiffness_analytic(k_e)?;
        let fitted = p.radius_from_stiffness_fit(&calibration, k_e)?;
        println!(
            "{k_e:>10.2} {:>16.3} {:>16.3}",
            analytic.r * 1e3,
            fitted.r * 1e3
        );
    }
    println!("(the calibrated map absorbs the prototype's play, so it sits a bit high)");

    println!("\nmotor commands (phi_2 leads phi_1 by the crank angle):");
    for (phi_set, r_mm) in [(0.0, 19.5), (0.0, 6.9), (1.0, 6.9)] {
        let cmd = p.motor_commands(&Setpoints {
            phi_set,
            stiffness: StiffnessSetpoint::Radius(r_mm * 1e-3),
            b_set: 0.0,
        })?;
        println!(
            "  phi_set = {phi_set:.1}, r_set = {r_mm:>4.1} mm -> phi_1 = {:.4}, phi_2 = {:.4}",
            cmd.phi_1, cmd.phi_2
        );
    }

    println!("\nimpact trigger (latches high on the first negative position):");
    let mut ctl = DampingController::new(TriggerRule::NegativePosition {
        b_low: 0.01,
        b_high: 0.5,
    });
    for (t, eta) in [(0.0, 0.8), (0.1, 0.2), (0.2, -0.03), (0.3, 0.4)] {
        let b = ctl.damping_trigger(eta, t, 0.0);
        println!("  t = {t:.1} s, eta = {eta:>5.2} rad -> b = {b}");
    }
    Ok(())
}

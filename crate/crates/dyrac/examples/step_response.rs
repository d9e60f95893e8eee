//! Time the pivot-radius step response at the nominal and at a raised
//! crank velocity limit, against the pure slew-arithmetic floor.
//!
//! ```bash
//! cargo run --example step_response
//! ```

use dyrac::{measure_step_response, parse_scenario};

fn main() -> dyrac::Result<()> {
    for (name, text) in [
        ("16 rad/s", include_str!("../scenarios/step_large.scn")),
        ("35 rad/s", include_str!("../scenarios/step_large_fast.scn")),
    ] {
        let scenario = parse_scenario(text, name)?;
        let result = measure_step_response(&scenario)?;
        let p = &scenario.design;
        // crank travel to the 90 % radius, at the slew limit
        let delta_from = p.crank_angle_for_radius(result.r_initial)?;
        let span = result.r_final - result.r_initial;
        let delta_90 = p.crank_angle_for_radius(result.r_initial + 0.9 * span)?;
        let floor = (delta_90 - delta_from).abs() / scenario.servo2.velocity_limit;
        println!(
            "crank limit {name}: r {:.1} -> {:.1} mm, t_90 = {:.1} ms (slew floor {:.1} ms), overshoot {:.2} %",
            result.r_initial * 1e3,
            result.r_final * 1e3,
            result.t_90 * 1e3,
            floor * 1e3,
            result.overshoot * 100.0
        );
    }
    Ok(())
}

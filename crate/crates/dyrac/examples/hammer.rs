//! The hammering application: the same swing-and-strike motion once stiff
//! and once compliant. The compliant run stores the swing in the spring
//! and releases it, beating the motor's own peak velocity; the strike's
//! negative-position trigger then latches the damper high and kills the
//! ringing.
//!
//! ```bash
//! cargo run --example hammer
//! ```

use dyrac::analysis::velocity_gain;
use dyrac::cli::summary_gain_window;
use dyrac::{parse_scenario, simulate, SimTrace};

fn ring_down_rate(trace: &SimTrace) -> f64 {
    let t_neg = trace
        .rows
        .iter()
        .find(|r| r.eta < 0.0)
        .map(|r| r.t)
        .expect("the strike undershoots zero");
    let peak = |t0: f64, t1: f64| {
        trace
            .window(t0, t1)
            .map(|r| r.alpha.abs())
            .fold(0.0, f64::max)
    };
    (peak(t_neg + 0.05, t_neg + 0.25) / peak(t_neg + 0.35, t_neg + 0.55)).ln() / 0.3
}

fn main() -> dyrac::Result<()> {
    for (name, text) in [
        (
            "high stiffness (r = 19.1 mm)",
            include_str!("../scenarios/hammer_high_stiffness.scn"),
        ),
        (
            "low stiffness  (r -> 6.9 mm)",
            include_str!("../scenarios/hammer_low_stiffness.scn"),
        ),
    ] {
        let scenario = parse_scenario(text, name)?;
        let trace = simulate(&scenario)?;
        let window = summary_gain_window(&scenario, &trace);
        let gain = velocity_gain(&trace, window)?;
        let trigger_at = trace
            .rows
            .windows(2)
            .find(|w| w[1].b_set > w[0].b_set)
            .map(|w| w[1].t);
        println!("{name}");
        println!(
            "  peak |phi1_dot| = {:>6.2} rad/s   peak |eta_dot| = {:>6.2} rad/s",
            trace.peak(|r| r.phi1_dot),
            trace.peak(|r| r.eta_dot)
        );
        println!(
            "  velocity gain over the swing = {gain:.2}   max |alpha| = {:.4} rad",
            trace.peak(|r| r.alpha)
        );
        match trigger_at {
            Some(t) => println!(
                "  damper triggered at t = {t:.3} s; ring-down decays at {:.1} 1/s",
                ring_down_rate(&trace)
            ),
            None => println!("  damper never triggered"),
        }
        println!();
    }
    Ok(())
}

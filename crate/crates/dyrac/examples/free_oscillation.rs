//! Release the output from a deflection with locked motors and watch the
//! ring: natural frequency against the linearized prediction and the
//! integrator's energy bookkeeping.
//!
//! ```bash
//! cargo run --example free_oscillation
//! ```

use dyrac::{parse_scenario, simulate};

fn main() -> dyrac::Result<()> {
    let scenario = parse_scenario(
        include_str!("../scenarios/free_oscillation.scn"),
        "free_oscillation.scn",
    )?;
    let trace = simulate(&scenario)?;

    // zero-crossing frequency estimate
    let mut crossings = Vec::new();
    for w in trace.rows.windows(2) {
        if w[0].alpha.signum() != w[1].alpha.signum() {
            let f = w[0].alpha / (w[0].alpha - w[1].alpha);
            crossings.push(w[0].t + f * (w[1].t - w[0].t));
        }
    }
    let measured = (crossings.len() - 1) as f64 / 2.0 / (crossings.last().unwrap() - crossings[0]);
    let k_e0 = scenario
        .design
        .small_deflection_stiffness(trace.rows[0].r)?;
    let linearized = (k_e0 / scenario.load_inertia).sqrt() / (2.0 * std::f64::consts::PI);

    let energy = |row: &dyrac::TraceRow| {
        0.5 * scenario.load_inertia * row.eta_dot * row.eta_dot + row.e_spring
    };
    let e0 = energy(&trace.rows[0]);
    let drift = trace
        .rows
        .iter()
        .map(|r| ((energy(r) - e0) / e0).abs())
        .fold(0.0, f64::max);

    println!(
        "r = {:.1} mm, k_e0 = {k_e0:.2} N m/rad, released from {:.2} rad",
        trace.rows[0].r * 1e3,
        scenario.initial_alpha
    );
    println!("measured frequency   {measured:.3} Hz");
    println!("linearized sqrt(k/J) {linearized:.3} Hz");
    println!("(the mechanism softens with amplitude, so the swing runs slightly slow)");
    println!(
        "energy drift over {:.0} s: {:.2e} relative",
        scenario.duration, drift
    );
    Ok(())
}

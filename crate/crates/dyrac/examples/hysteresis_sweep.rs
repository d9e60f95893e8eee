//! Reduce a measured-style torque-deflection loop: sweep the output
//! quasi-statically with play and friction, extract the hysteresis center
//! line, compare it against the ideal curve, and thin the polylines with
//! Douglas-Peucker.
//!
//! ```bash
//! cargo run --example hysteresis_sweep
//! ```

use dyrac::analysis::{loop_area, CenterlineOptions};
use dyrac::{douglas_peucker, hysteresis_centerline, quasi_static_sweep, DesignParams};

fn main() -> dyrac::Result<()> {
    let p = DesignParams::default();
    let r = 6.9e-3;
    let dead_zone = 0.04;
    let coulomb = 0.3;

    let loop_line = quasi_static_sweep(&p, r, 0.3, 600, dead_zone, coulomb)?;
    let ideal = quasi_static_sweep(&p, r, 0.3, 600, 0.0, 0.0)?;
    println!(
        "swept loop at r = {:.1} mm with {:.0} mrad play and {:.1} N m friction",
        r * 1e3,
        dead_zone * 1e3,
        coulomb
    );
    println!(
        "enclosed area: {:.4} N m rad (ideal sweep: {:.2e})",
        loop_area(&loop_line).abs(),
        loop_area(&ideal).abs()
    );

    let center = hysteresis_centerline(&loop_line, CenterlineOptions::default())?;
    let mut worst = 0.0f64;
    for pt in &center.points {
        if pt[0].abs() > 0.28 {
            continue;
        }
        worst = worst.max((pt[1] - p.output_torque(r, pt[0])?).abs());
    }
    println!("center line vs ideal torque curve: max deviation {worst:.4} N m");

    for tolerance in [1e-4, 1e-3, 1e-2] {
        let reduced = douglas_peucker(&center, tolerance)?;
        println!(
            "Douglas-Peucker at tolerance {tolerance:>6}: {} -> {} points",
            center.len(),
            reduced.len()
        );
    }
    Ok(())
}

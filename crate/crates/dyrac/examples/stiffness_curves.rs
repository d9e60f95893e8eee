//! Tabulate the three characterization curve families: the stiffness map
//! over pivot radius, torque over deflection, and secant stiffness over
//! torque.
//!
//! ```bash
//! cargo run --example stiffness_curves
//! ```

use dyrac::statics::{CurveKind, CurveSpec};
use dyrac::DesignParams;

fn main() -> dyrac::Result<()> {
    let params = DesignParams::default();

    println!("stiffness ratio k_e0/k over radius ratio r/l");
    println!("{:>10} {:>14}", "r/l", "k_e0/k");
    let r_values: Vec<f64> = (1..=19).map(|i| i as f64 * params.l / 20.0).collect();
    let map = params.generate_curve(&CurveSpec {
        r_values,
        alpha_grid: vec![],
        output_kind: CurveKind::StiffnessRatioVsRadiusRatio,
    })?;
    for pt in &map.series[0].points {
        println!("{:>10.3} {:>14.5}", pt[0], pt[1]);
    }

    println!();
    println!("output torque [N m] over deflection [rad] per pivot radius");
    let radii = [4.0e-3, 6.9e-3, 10.0e-3, 19.1e-3];
    let alpha_grid: Vec<f64> = (-6..=6).map(|i| i as f64 * 0.05).collect();
    let torque = params.generate_curve(&CurveSpec {
        r_values: radii.to_vec(),
        alpha_grid: alpha_grid.clone(),
        output_kind: CurveKind::TorqueVsDeflection,
    })?;
    print!("{:>8}", "alpha");
    for r in radii {
        print!(" {:>9.1}mm", r * 1e3);
    }
    println!();
    for (i, &alpha) in alpha_grid.iter().enumerate() {
        print!("{alpha:>8.2}");
        for series in &torque.series {
            print!(" {:>11.4}", series.points[i][1]);
        }
        println!();
    }

    println!();
    println!("secant stiffness [N m/rad] over torque [N m] at r = 6.9 mm (softening)");
    let alpha_grid: Vec<f64> = (0..=10).map(|i| i as f64 * 0.03).collect();
    let softening = params.generate_curve(&CurveSpec {
        r_values: vec![6.9e-3],
        alpha_grid,
        output_kind: CurveKind::StiffnessVsTorque,
    })?;
    for pt in &softening.series[0].points {
        println!("  T = {:>7.4} N m -> k_e = {:>7.3} N m/rad", pt[0], pt[1]);
    }
    Ok(())
}

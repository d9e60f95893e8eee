//! Walk the closed-form kinematics: crank angle to pivot radius and back,
//! the full pose at a deflected output, and the fold-over deflection where
//! the restoring torque reverses.
//!
//! ```bash
//! cargo run --example mechanism_geometry
//! ```

use dyrac::DesignParams;

fn main() -> dyrac::Result<()> {
    let p = DesignParams::default();
    println!(
        "design: r_d = {} mm, a = {} mm, l = {} mm, k = {} N m/rad",
        p.r_d * 1e3,
        p.a * 1e3,
        p.l * 1e3,
        p.k
    );
    println!(
        "pivot travel: {:.2} mm .. {:.2} mm\n",
        p.r_min() * 1e3,
        p.r_max() * 1e3
    );

    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>12}",
        "delta", "r [mm]", "phi_d", "epsilon", "k_e0"
    );
    for i in 1..=9 {
        let delta = std::f64::consts::PI * i as f64 / 10.0;
        let r = p.radius_for_crank_angle(delta)?;
        let angles = p.triangle_angles(r)?;
        println!(
            "{delta:>10.4} {:>10.3} {:>10.4} {:>10.4} {:>12.3}",
            r * 1e3,
            angles.phi_d,
            angles.epsilon,
            p.small_deflection_stiffness(r)?,
        );
        assert!((p.crank_angle_for_radius(r)? - delta).abs() < 1e-9);
    }

    let r = 6.9e-3;
    let cfg = p.configuration(r, 0.3)?;
    println!("\npose at r = 6.9 mm, alpha = 0.3 rad:");
    println!("  spring lever c = {:.3} mm", cfg.c * 1e3);
    println!("  spring deflection theta = {:.4} rad", cfg.theta);
    println!("  holding torque = {:.3} N m", p.output_torque(r, 0.3)?);

    // past arccos(r/l) the spring can no longer pull the output back
    let fold = (r / p.l).acos();
    println!("\nfold-over deflection at r = 6.9 mm: {fold:.3} rad");
    for alpha in [0.9 * fold, fold, 1.1 * fold] {
        println!("  T_O({alpha:.3}) = {:+.4} N m", p.output_torque(r, alpha)?);
    }
    Ok(())
}

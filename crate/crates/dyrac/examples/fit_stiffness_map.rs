//! Identify the cubic-log stiffness-to-radius map from sampled
//! (stiffness, radius) data and compare it against both the generating
//! model and the reference calibration.
//!
//! ```bash
//! cargo run --example fit_stiffness_map
//! ```

use dyrac::{fit_radius_stiffness, DesignParams, FitCoefficients};

fn main() -> dyrac::Result<()> {
    let p = DesignParams::default();

    // sample the ideal analytic map across the operating range
    let data: Vec<(f64, f64)> = (0..60)
        .map(|i| {
            let k_e = 0.2 * (313.0f64 / 0.2).powf(i as f64 / 59.0);
            (k_e, p.radius_from_stiffness_analytic(k_e).unwrap().r)
        })
        .collect();
    let fit = fit_radius_stiffness(&data, 1e-3)?;
    println!(
        "fit to the ideal map:      p = {:.4}, q = {:.4}, rms residual {:.2e}",
        fit.coefficients.p, fit.coefficients.q, fit.residual
    );

    let reference = FitCoefficients::default();
    println!(
        "reference calibration:     p = {:.4}, q = {:.4}",
        reference.p, reference.q
    );

    println!(
        "\n{:>8} {:>12} {:>12} {:>12}",
        "k_e", "ideal [mm]", "fit [mm]", "ref [mm]"
    );
    for k_e in [0.2, 2.0, 20.0, 60.0, 313.0] {
        println!(
            "{k_e:>8.1} {:>12.3} {:>12.3} {:>12.3}",
            p.radius_from_stiffness_analytic(k_e)?.r * 1e3,
            fit.coefficients.radius(k_e)? * 1e3,
            reference.radius(k_e)? * 1e3
        );
    }

    // a self-consistency round trip on the reference coefficients
    let regenerated: Vec<(f64, f64)> = (0..50)
        .map(|i| {
            let k_e = 0.2 * (313.0f64 / 0.2).powf(i as f64 / 49.0);
            (k_e, reference.radius(k_e).unwrap())
        })
        .collect();
    let refit = fit_radius_stiffness(&regenerated, 1e-3)?;
    println!(
        "\nrefit of reference-generated data recovers p = {:.10}, q = {:.10}",
        refit.coefficients.p, refit.coefficients.q
    );
    Ok(())
}

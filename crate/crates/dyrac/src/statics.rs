//! Static torques, forces, effective stiffness, and stored energy at a
//! fixed pose, plus generation of the characterization curves.
//!
//! Sign convention: [`DesignParams::output_torque`] returns the torque that
//! must be applied externally to hold the output at deflection `alpha`
//! (positive for positive `alpha`); the torque the mechanism exerts back on
//! the output is its negation. The triangle quantities are evaluated at
//! `|alpha|` and the result is oddly extended, which matches the ideal
//! symmetric spring; the prototype's drive-train asymmetry is not modeled.

use crate::error::{Error, Result};
use crate::geometry::{spring_deflection_raw, DesignParams, MechanismConfiguration};

/// Denominator magnitude below which the motor-torque chain is treated as
/// singular instead of being evaluated toward infinity.
const SINGULARITY_EPS: f64 = 1e-9;

/// Torques, forces, stiffness, and energy at one pose.
#[derive(Debug, Clone, Copy)]
pub struct StaticsResult {
    /// Output holding torque (N m), sign of `alpha`.
    pub t_o: f64,
    /// Spring torque `k * theta` (N m).
    pub t_a: f64,
    /// Motor 1 holding torque (N m).
    pub t_1: f64,
    /// Motor 2 holding torque (N m).
    pub t_2: f64,
    /// Spring force at the pivot, `t_a / c` (N).
    pub f_p: f64,
    /// Force along the crank link (N).
    pub f_d: f64,
    /// Tangential force on the motor-1 slide (N).
    pub f_t1: f64,
    /// Force on the crank disc rim (N).
    pub f_t2: f64,
    /// Secant effective stiffness `t_o / alpha`; the zero-deflection limit
    /// is substituted at `alpha == 0` (N m/rad).
    pub k_e_secant: f64,
    /// Elastic energy stored in the spring (J).
    pub e_spring: f64,
}

/// Motor-side torques and the force chain behind them.
#[derive(Debug, Clone, Copy)]
pub struct MotorTorques {
    pub t_1: f64,
    pub t_2: f64,
    pub f_p: f64,
    pub f_d: f64,
    pub f_t1: f64,
    pub f_t2: f64,
}

impl DesignParams {
    /// Torque required at the output to hold deflection `alpha` at pivot
    /// radius `r` (N m).
    ///
    /// `sin(beta) * (k theta / c) * r` evaluated at `|alpha|`, returned
    /// with the sign of `alpha`. Past the fold-over deflection
    /// `arccos(r / l)` the projection angle `beta` goes negative and so
    /// does the held torque; this matches the energy gradient.
    pub fn output_torque(&self, r: f64, alpha: f64) -> Result<f64> {
        let cfg = self.configuration(r, alpha)?;
        Ok(output_torque_from_config(self, &cfg))
    }

    /// Secant effective stiffness `output_torque / alpha` (N m/rad).
    ///
    /// Undefined at `alpha == 0`; the mechanism softens, so this is below
    /// the zero-deflection value for any nonzero deflection.
    pub fn effective_stiffness_secant(&self, r: f64, alpha: f64) -> Result<f64> {
        if alpha == 0.0 {
            return Err(Error::Domain(
                "secant stiffness undefined at alpha = 0; use small_deflection_stiffness".into(),
            ));
        }
        Ok(self.output_torque(r, alpha)? / alpha)
    }

    /// Zero-deflection effective stiffness `k * (r / (l - r))^2` (N m/rad),
    /// the analytic limit of the secant stiffness.
    ///
    /// Equals the spring stiffness at `r = l/2`; valid for any `r` in
    /// `[0, l)`, also outside the reachable band (the full theoretical
    /// stiffness-ratio curve sweeps it).
    pub fn small_deflection_stiffness(&self, r: f64) -> Result<f64> {
        if !r.is_finite() || r < 0.0 || r >= self.l {
            return Err(Error::Domain(format!(
                "pivot radius {r} m outside [0, l = {} m)",
                self.l
            )));
        }
        let ratio = r / (self.l - r);
        Ok(self.k * ratio * ratio)
    }

    /// Spring torque from Hooke's law, `k * theta` (N m).
    pub fn spring_torque(&self, theta: f64) -> f64 {
        self.k * theta
    }

    /// Motor holding torques and the force chain at `(r, alpha)`.
    ///
    /// Near the band edges `cos(gamma) -> 0` and at the right-angle radius
    /// `cos(epsilon) -> 0`; both denominators diverge physically (this is
    /// why low stiffness settings are expensive to hold), and crossing
    /// [`SINGULARITY_EPS`] raises a singularity error rather than
    /// returning infinities.
    pub fn motor_torques(&self, r: f64, alpha: f64) -> Result<MotorTorques> {
        let cfg = self.configuration(r, alpha)?;
        motor_torques_from_config(self, &cfg)
    }

    /// Elastic energy stored in the spring at `(r, alpha)`: `k theta^2 / 2` (J).
    pub fn stored_energy(&self, r: f64, alpha: f64) -> Result<f64> {
        let theta = self.spring_deflection(r, alpha)?;
        Ok(0.5 * self.k * theta * theta)
    }

    /// Everything at once; motor-torque singularities propagate as errors.
    pub fn statics(&self, r: f64, alpha: f64) -> Result<StaticsResult> {
        let cfg = self.configuration(r, alpha)?;
        let t_o = output_torque_from_config(self, &cfg);
        let m = motor_torques_from_config(self, &cfg)?;
        let k_e_secant = if alpha == 0.0 {
            self.small_deflection_stiffness(r)?
        } else {
            t_o / alpha
        };
        Ok(StaticsResult {
            t_o,
            t_a: self.k * cfg.theta,
            t_1: m.t_1,
            t_2: m.t_2,
            f_p: m.f_p,
            f_d: m.f_d,
            f_t1: m.f_t1,
            f_t2: m.f_t2,
            k_e_secant,
            e_spring: 0.5 * self.k * cfg.theta * cfg.theta,
        })
    }
}

pub(crate) fn output_torque_from_config(p: &DesignParams, cfg: &MechanismConfiguration) -> f64 {
    let magnitude = cfg.beta.sin() * p.k * cfg.theta / cfg.c * cfg.r;
    if cfg.alpha < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

fn motor_torques_from_config(
    p: &DesignParams,
    cfg: &MechanismConfiguration,
) -> Result<MotorTorques> {
    let cos_eps = cfg.epsilon.cos();
    // cos(gamma) = sin(delta), taken from the stable area form so the
    // collinear travel ends register as exactly singular
    let cos_gamma = crate::geometry::stable_sin_delta(p, cfg.r);
    if cos_eps.abs() < SINGULARITY_EPS {
        return Err(Error::Singularity(format!(
            "cos(epsilon) = {cos_eps:.3e} at r = {} m",
            cfg.r
        )));
    }
    if cos_gamma.abs() < SINGULARITY_EPS {
        return Err(Error::Singularity(format!(
            "cos(gamma) = {cos_gamma:.3e} at r = {} m (crank near collinear)",
            cfg.r
        )));
    }
    let sign = if cfg.alpha == 0.0 {
        0.0
    } else {
        cfg.alpha.signum()
    };
    let f_p = p.k * cfg.theta / cfg.c;
    let f_d = cfg.beta.cos() * f_p / cos_eps;
    let f_t1 = cfg.beta.sin() * f_p + sign * cfg.epsilon.sin() * f_d;
    let f_t2 = f_d / cos_gamma;
    Ok(MotorTorques {
        t_1: f_t1 * cfg.r,
        t_2: f_t2 * p.r_d,
        f_p,
        f_d,
        f_t1,
        f_t2,
    })
}

// ---------------------------------------------------------------------------
// Characterization curves
// ---------------------------------------------------------------------------

/// Which characterization curve to tabulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// Output torque over deflection, one series per pivot radius.
    TorqueVsDeflection,
    /// Secant stiffness over output torque, one series per pivot radius
    /// (semi-log in the usual plot).
    StiffnessVsTorque,
    /// Zero-deflection stiffness ratio `k_e / k` over radius ratio `r / l`,
    /// a single series.
    StiffnessRatioVsRadiusRatio,
}

/// Grid specification for [`DesignParams::generate_curve`].
#[derive(Debug, Clone)]
pub struct CurveSpec {
    /// Pivot radii (m); for the ratio curve these sweep the x axis.
    pub r_values: Vec<f64>,
    /// Deflection grid (rad); unused (may be empty) for the ratio curve.
    pub alpha_grid: Vec<f64>,
    pub output_kind: CurveKind,
}

/// One tabulated series: `(x, y)` rows at a fixed pivot radius (`r` is NaN
/// for the single-series ratio curve).
#[derive(Debug, Clone)]
pub struct CurveSeries {
    pub r: f64,
    pub points: Vec<[f64; 2]>,
}

/// Tabulated curve data ready for CSV export.
#[derive(Debug, Clone)]
pub struct CurveTable {
    pub kind: CurveKind,
    pub series: Vec<CurveSeries>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain(format!("{name} grid is empty")));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain(format!(
            "{name} grid must be finite and strictly increasing"
        )));
    }
    Ok(())
}

impl DesignParams {
    /// Tabulate one characterization curve on the given grids.
    pub fn generate_curve(&self, spec: &CurveSpec) -> Result<CurveTable> {
        check_grid("radius", &spec.r_values)?;
        if spec.output_kind != CurveKind::StiffnessRatioVsRadiusRatio {
            check_grid("deflection", &spec.alpha_grid)?;
        }
        let series = match spec.output_kind {
            CurveKind::TorqueVsDeflection => spec
                .r_values
                .iter()
                .map(|&r| {
                    let points = spec
                        .alpha_grid
                        .iter()
                        .map(|&a| Ok([a, self.output_torque(r, a)?]))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(CurveSeries { r, points })
                })
                .collect::<Result<Vec<_>>>()?,
            CurveKind::StiffnessVsTorque => spec
                .r_values
                .iter()
                .map(|&r| {
                    let points = spec
                        .alpha_grid
                        .iter()
                        .map(|&a| {
                            if a == 0.0 {
                                // zero-torque intercept: the stiffness limit
                                Ok([0.0, self.small_deflection_stiffness(r)?])
                            } else {
                                Ok([
                                    self.output_torque(r, a)?,
                                    self.effective_stiffness_secant(r, a)?,
                                ])
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(CurveSeries { r, points })
                })
                .collect::<Result<Vec<_>>>()?,
            CurveKind::StiffnessRatioVsRadiusRatio => {
                let points = spec
                    .r_values
                    .iter()
                    .map(|&r| Ok([r / self.l, self.small_deflection_stiffness(r)? / self.k]))
                    .collect::<Result<Vec<_>>>()?;
                vec![CurveSeries {
                    r: f64::NAN,
                    points,
                }]
            }
        };
        Ok(CurveTable {
            kind: spec.output_kind,
            series,
        })
    }
}

// ---------------------------------------------------------------------------
// Energy-gradient audit
// ---------------------------------------------------------------------------

/// Deviation of the projection-chain motor torques from finite-difference
/// energy gradients, reported over a grid.
///
/// The motor-1 gradient at fixed output position is
/// `|dE/d(phi_1)| = k theta |d(theta)/d(alpha)|`, and the motor-2 gradient
/// at fixed positions is `|dE/d(delta)| = k theta |d(theta)/d(r)| dr/d(delta)`.
/// The chain values are not exact gradients; this audit quantifies the gap
/// without asserting a bound.
#[derive(Debug, Clone)]
pub struct EnergyGradientAudit {
    pub grid_points: usize,
    /// Points skipped because the torque chain was singular there.
    pub skipped: usize,
    pub t1_max_rel_dev: f64,
    pub t1_mean_rel_dev: f64,
    pub t2_max_rel_dev: f64,
    pub t2_mean_rel_dev: f64,
}

impl std::fmt::Display for EnergyGradientAudit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "energy-gradient audit over {} grid points ({} singular skipped):",
            self.grid_points, self.skipped
        )?;
        writeln!(
            f,
            "  motor 1 vs |dE/dphi1|:  max rel dev {:.3e}, mean {:.3e}",
            self.t1_max_rel_dev, self.t1_mean_rel_dev
        )?;
        write!(
            f,
            "  motor 2 vs |dE/ddelta|: max rel dev {:.3e}, mean {:.3e}",
            self.t2_max_rel_dev, self.t2_mean_rel_dev
        )
    }
}

impl DesignParams {
    /// Run the audit on explicit grids.
    pub fn energy_gradient_audit(
        &self,
        r_values: &[f64],
        alpha_values: &[f64],
    ) -> Result<EnergyGradientAudit> {
        check_grid("radius", r_values)?;
        check_grid("deflection", alpha_values)?;
        let h = 1e-6;
        let mut t1_devs: Vec<f64> = Vec::new();
        let mut t2_devs: Vec<f64> = Vec::new();
        let mut skipped = 0usize;
        for &r in r_values {
            for &alpha in alpha_values {
                let m = match self.motor_torques(r, alpha) {
                    Ok(m) => m,
                    Err(Error::Singularity(_)) => {
                        skipped += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let theta = self.spring_deflection(r, alpha)?;
                // dE/dphi1 at fixed eta: alpha = eta - phi1
                let dth_da = (spring_deflection_raw(self, r, alpha + h)
                    - spring_deflection_raw(self, r, alpha - h))
                    / (2.0 * h);
                let t1_star = (self.k * theta * dth_da).abs();
                // dE/ddelta at fixed phi1, eta: delta only moves r
                let delta = self.crank_angle_for_radius(r)?;
                let e_at = |d: f64| {
                    let rr = crate::geometry::radius_raw(self, d);
                    let th = spring_deflection_raw(self, rr, alpha);
                    0.5 * self.k * th * th
                };
                let t2_star = ((e_at(delta + h) - e_at(delta - h)) / (2.0 * h)).abs();
                t1_devs.push(rel_dev(m.t_1.abs(), t1_star));
                t2_devs.push(rel_dev(m.t_2.abs(), t2_star));
            }
        }
        if t1_devs.is_empty() {
            return Err(Error::Data("audit grid entirely singular".into()));
        }
        Ok(EnergyGradientAudit {
            grid_points: r_values.len() * alpha_values.len(),
            skipped,
            t1_max_rel_dev: t1_devs.iter().cloned().fold(0.0, f64::max),
            t1_mean_rel_dev: t1_devs.iter().sum::<f64>() / t1_devs.len() as f64,
            t2_max_rel_dev: t2_devs.iter().cloned().fold(0.0, f64::max),
            t2_mean_rel_dev: t2_devs.iter().sum::<f64>() / t2_devs.len() as f64,
        })
    }

    /// Audit on the standard 20 x 20 grid, r in [1, 19] mm, alpha in
    /// [0.01, 0.5] rad.
    pub fn energy_gradient_audit_standard(&self) -> Result<EnergyGradientAudit> {
        let (r_grid, a_grid) = standard_grid();
        self.energy_gradient_audit(&r_grid, &a_grid)
    }
}

/// The standard characterization grid: 20 radii in [1, 19] mm by 20
/// deflections in [0.01, 0.5] rad.
pub fn standard_grid() -> (Vec<f64>, Vec<f64>) {
    let r_grid: Vec<f64> = (0..20)
        .map(|i| 1e-3 + (19e-3 - 1e-3) * i as f64 / 19.0)
        .collect();
    let a_grid: Vec<f64> = (0..20)
        .map(|i| 0.01 + (0.5 - 0.01) * i as f64 / 19.0)
        .collect();
    (r_grid, a_grid)
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const MM: f64 = 1e-3;

    fn p() -> DesignParams {
        DesignParams::default()
    }

    /// Virtual-work oracle: T_O = k theta dtheta/dalpha by central
    /// difference, independent of the projection formula.
    fn torque_virtual_work(p: &DesignParams, r: f64, alpha: f64) -> f64 {
        let h = 1e-6;
        let th = p.spring_deflection(r, alpha).unwrap();
        let dth = (p.spring_deflection(r, alpha + h).unwrap()
            - p.spring_deflection(r, alpha - h).unwrap())
            / (2.0 * h);
        p.k * th * dth
    }

    /// Adaptive Simpson quadrature, used as the work-energy oracle.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
            let m = 0.5 * (a + b);
            let fm = f(m);
            ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
        }
        #[allow(clippy::too_many_arguments)]
        fn recurse(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            fa: f64,
            b: f64,
            fb: f64,
            whole: f64,
            m: f64,
            fm: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let (left, lm, flm) = simpson(f, a, fa, m, fm);
            let (right, rm, frm) = simpson(f, m, fm, b, fb);
            if depth == 0 || (left + right - whole).abs() < 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                    + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
            }
        }
        let (fa, fb) = (f(a), f(b));
        let (whole, m, fm) = simpson(f, a, fa, b, fb);
        recurse(f, a, fa, b, fb, whole, m, fm, tol, 40)
    }

    #[test]
    fn output_torque_zero_at_zero_deflection() {
        let p = p();
        for r_mm in [0.5, 6.9, 10.0, 19.5] {
            assert_eq!(p.output_torque(r_mm * MM, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn output_torque_small_deflection_law() {
        let p = p();
        // at r = l/2 the stiffness ratio is 1, so T ~ k * alpha
        let t = p.output_torque(10.0 * MM, 1e-3).unwrap();
        assert_relative_eq!(t, 0.060, max_relative = 1e-2);
    }

    #[test]
    fn output_torque_matches_virtual_work_at_reference_point() {
        let p = p();
        let t = p.output_torque(6.9 * MM, 0.3).unwrap();
        assert_relative_eq!(
            t,
            torque_virtual_work(&p, 6.9 * MM, 0.3),
            max_relative = 1e-7
        );
        assert_relative_eq!(t, 4.146500973368116, max_relative = 1e-12); // frozen from the oracle
    }

    #[test]
    fn virtual_work_identity_over_standard_grid() {
        let p = p();
        let (r_grid, a_grid) = standard_grid();
        for &r in &r_grid {
            for &a in &a_grid {
                let t = p.output_torque(r, a).unwrap();
                let t_vw = torque_virtual_work(&p, r, a);
                assert!(
                    (t - t_vw).abs() <= 1e-4 * t_vw.abs().max(1e-12),
                    "virtual work off at r = {r}, alpha = {a}: {t} vs {t_vw}"
                );
            }
        }
    }

    #[test]
    fn work_energy_quadrature_over_standard_grid() {
        let p = p();
        let (r_grid, a_grid) = standard_grid();
        for &r in &r_grid {
            for &a in [a_grid[0], a_grid[9], a_grid[19]].iter() {
                let work = adaptive_simpson(&|x| p.output_torque(r, x).unwrap(), 0.0, a, 1e-13);
                let energy = p.stored_energy(r, a).unwrap();
                assert!(
                    (work - energy).abs() <= 1e-6 * energy,
                    "work-energy off at r = {r}, alpha = {a}: {work} vs {energy}"
                );
            }
        }
    }

    #[test]
    fn output_torque_is_odd() {
        let p = p();
        for r_mm in [2.0, 6.9, 15.0] {
            for a in [0.01, 0.3, 1.0] {
                assert_eq!(
                    p.output_torque(r_mm * MM, -a).unwrap(),
                    -p.output_torque(r_mm * MM, a).unwrap()
                );
            }
        }
    }

    #[test]
    fn secant_stiffness_softens_and_matches_ratio() {
        let p = p();
        let k_e = p.effective_stiffness_secant(6.9 * MM, 0.3).unwrap();
        assert_relative_eq!(k_e, 13.821669911227055, max_relative = 1e-12);
        let k_e0 = p.small_deflection_stiffness(6.9 * MM).unwrap();
        assert_relative_eq!(k_e0, 16.645883107045044, max_relative = 1e-12);
        assert!(k_e < k_e0);
    }

    #[test]
    fn secant_stiffness_near_limit() {
        let p = p();
        let k_e = p.effective_stiffness_secant(10.0 * MM, 1e-3).unwrap();
        assert_relative_eq!(k_e, 60.0, max_relative = 1e-2);
    }

    #[test]
    fn secant_stiffness_rejects_zero_deflection() {
        let p = p();
        let err = p.effective_stiffness_secant(10.0 * MM, 0.0).unwrap_err();
        assert!(err.to_string().contains("small_deflection_stiffness"));
    }

    #[test]
    fn secant_stiffness_limit_consistency() {
        let p = p();
        for r_mm in [1.0, 5.0, 6.9, 10.0, 15.0, 19.0] {
            let r = r_mm * MM;
            let secant = p.effective_stiffness_secant(r, 1e-6).unwrap();
            let limit = p.small_deflection_stiffness(r).unwrap();
            assert!(
                (secant - limit).abs() <= 1e-4 * limit,
                "limit inconsistency at r = {r_mm} mm: {secant} vs {limit}"
            );
        }
    }

    #[test]
    fn secant_stiffness_non_increasing_in_deflection() {
        let p = p();
        for r_mm in [2.0, 6.9, 10.0, 19.0] {
            let mut prev = f64::INFINITY;
            for i in 1..=50 {
                let a = 0.5 * i as f64 / 50.0;
                let k_e = p.effective_stiffness_secant(r_mm * MM, a).unwrap();
                assert!(
                    k_e <= prev + 1e-12,
                    "softening violated at r = {r_mm} mm, alpha = {a}"
                );
                prev = k_e;
            }
        }
    }

    #[test]
    fn small_deflection_stiffness_extremes() {
        let p = p();
        assert_relative_eq!(p.small_deflection_stiffness(10.0 * MM).unwrap(), 60.0);
        let ratio_low = p.small_deflection_stiffness(0.5 * MM).unwrap() / p.k;
        let ratio_high = p.small_deflection_stiffness(19.5 * MM).unwrap() / p.k;
        assert_relative_eq!(ratio_low, 6.574621959237343e-4, max_relative = 1e-12);
        assert_relative_eq!(ratio_high, 1521.0, max_relative = 1e-12);
        assert!(p.small_deflection_stiffness(20.0 * MM).is_err());
    }

    #[test]
    fn spring_torque_points() {
        let p = p();
        assert_eq!(p.spring_torque(0.0), 0.0);
        // 15.1 degrees of deflection carries 15.8 N m
        assert_relative_eq!(p.spring_torque(0.2635), 15.8, max_relative = 2e-3);
        assert_relative_eq!(p.spring_torque(0.1), 6.0);
    }

    /// Vector oracle for the motor torques: measure every angle from 2-D
    /// constructed points and push the spring force through the projection
    /// chain, without the law-of-cosines angle formulas.
    fn motor_torques_vector_oracle(p: &DesignParams, r: f64, alpha: f64) -> (f64, f64) {
        let al = alpha.abs();
        let o = [0.0, 0.0];
        let pt = [r, 0.0];
        let anchor = [p.l * al.cos(), p.l * al.sin()];
        let angle = |v: [f64; 2], p1: [f64; 2], p2: [f64; 2]| -> f64 {
            let u = [p1[0] - v[0], p1[1] - v[1]];
            let w = [p2[0] - v[0], p2[1] - v[1]];
            (u[0] * w[1] - u[1] * w[0])
                .abs()
                .atan2(u[0] * w[0] + u[1] * w[1])
        };
        let theta = angle(anchor, o, pt);
        let c = (anchor[0] - pt[0]).hypot(anchor[1] - pt[1]);
        // direction of the spring force on the pivot: perpendicular to AP
        let ap = [(pt[0] - anchor[0]) / c, (pt[1] - anchor[1]) / c];
        let normal = [-ap[1], ap[0]];
        let beta = normal[1].abs().asin(); // angle of the force to the slide normal
        assert!((normal[0].abs() - beta.cos()).abs() < 1e-12);
        // crank triangle vertices from delta
        let delta = p.crank_angle_for_radius(r).unwrap();
        let b = [p.a, 0.0];
        let dir = std::f64::consts::PI - delta;
        let crank_pt = [b[0] + p.r_d * dir.cos(), b[1] + p.r_d * dir.sin()];
        let epsilon = angle(o, b, crank_pt);
        let gamma = std::f64::consts::FRAC_PI_2 - delta;
        let sign = alpha.signum();
        let f_p = p.k * theta / c;
        let f_d = beta.cos() * f_p / epsilon.cos();
        let f_t1 = beta.sin() * f_p + sign * epsilon.sin() * f_d;
        let f_t2 = f_d / gamma.cos();
        (f_t1 * r, f_t2 * p.r_d)
    }

    #[test]
    fn motor_torques_zero_at_zero_deflection() {
        let p = p();
        let m = p.motor_torques(6.9 * MM, 0.0).unwrap();
        assert_eq!(m.t_1, 0.0);
        assert_eq!(m.t_2, 0.0);
    }

    #[test]
    fn motor_torques_match_vector_oracle() {
        let p = p();
        let m = p.motor_torques(6.9 * MM, 0.3).unwrap();
        let (t1_o, t2_o) = motor_torques_vector_oracle(&p, 6.9 * MM, 0.3);
        assert_relative_eq!(m.t_1, t1_o, max_relative = 1e-9);
        assert_relative_eq!(m.t_2, t2_o, max_relative = 1e-9);
        // frozen oracle values; motor 2 exceeds the 12 N m motor limit here
        assert_relative_eq!(m.t_1, 10.802482249158828, max_relative = 1e-12);
        assert_relative_eq!(m.t_2, 15.252222345623617, max_relative = 1e-12);
        assert!(m.t_2 > 12.0);
        // chain consistency
        assert_relative_eq!(m.t_1, m.f_t1 * 6.9 * MM, max_relative = 1e-12);
        assert_relative_eq!(m.t_2, m.f_t2 * p.r_d, max_relative = 1e-12);
    }

    #[test]
    fn motor_torques_finite_near_top_of_band() {
        let p = p();
        let m = p.motor_torques(19.0 * MM, 0.01).unwrap();
        let (t1_o, t2_o) = motor_torques_vector_oracle(&p, 19.0 * MM, 0.01);
        assert_relative_eq!(m.t_1, t1_o, max_relative = 1e-9);
        assert_relative_eq!(m.t_2, t2_o, max_relative = 1e-9);
        assert!(m.t_2.is_finite());
        // moderate magnitude, nothing like the 1/cos blow-up at the edges
        assert!(m.t_2.abs() < 100.0, "t_2 = {}", m.t_2);
    }

    #[test]
    fn motor_torques_singular_at_band_edges() {
        let p = p();
        assert!(matches!(
            p.motor_torques(19.5 * MM, 0.1),
            Err(Error::Singularity(_))
        ));
        assert!(matches!(
            p.motor_torques(0.5 * MM, 0.1),
            Err(Error::Singularity(_))
        ));
        // the right-angle radius zeroes cos(epsilon)
        let r_right = (p.r_d * p.r_d - p.a * p.a).sqrt();
        assert!(matches!(
            p.motor_torques(r_right, 0.1),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn motor_torque_cost_grows_toward_small_radii() {
        // holding one unit of output torque costs ever more motor-2 torque
        // at compliant settings: the sin(delta) denominator collapses
        let p = p();
        let cost = |r_mm: f64| {
            let m = p.motor_torques(r_mm * MM, 0.3).unwrap();
            let t_o = p.output_torque(r_mm * MM, 0.3).unwrap();
            m.t_2.abs() / t_o.abs()
        };
        assert!(cost(0.7) > cost(1.5));
        assert!(cost(1.5) > cost(6.9));
    }

    #[test]
    fn stored_energy_values() {
        let p = p();
        assert_eq!(p.stored_energy(6.9 * MM, 0.0).unwrap(), 0.0);
        // 1/2 * 60 * 0.2635^2 at the pose that bends the spring by 0.2635 rad
        let theta = 0.2635;
        assert_relative_eq!(0.5 * p.k * theta * theta, 2.0829675, max_relative = 1e-12);
        let e = p.stored_energy(6.9 * MM, 0.3).unwrap();
        assert!(e > 0.0);
    }

    #[test]
    fn statics_assembles_exact_identities() {
        let p = p();
        let s = p.statics(6.9 * MM, 0.3).unwrap();
        let theta = p.spring_deflection(6.9 * MM, 0.3).unwrap();
        let c = p.spring_lever(6.9 * MM, 0.3).unwrap();
        assert_eq!(s.t_a, p.k * theta);
        assert_eq!(s.f_p, s.t_a / c);
        assert_eq!(s.e_spring, 0.5 * p.k * theta * theta);
        assert_relative_eq!(s.k_e_secant, s.t_o / 0.3);
        // restoring torque on the output opposes the deflection
        assert!(-s.t_o < 0.0);
    }

    #[test]
    fn curve_ratio_passes_through_unity() {
        let p = p();
        let spec = CurveSpec {
            r_values: vec![5.0 * MM, 10.0 * MM, 15.0 * MM],
            alpha_grid: vec![],
            output_kind: CurveKind::StiffnessRatioVsRadiusRatio,
        };
        let table = p.generate_curve(&spec).unwrap();
        assert_eq!(table.series.len(), 1);
        let mid = table.series[0].points[1];
        assert_relative_eq!(mid[0], 0.5);
        assert_relative_eq!(mid[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn curve_torque_deflection_passes_through_origin() {
        let p = p();
        let spec = CurveSpec {
            r_values: vec![4.0 * MM, 6.9 * MM, 19.1 * MM],
            alpha_grid: vec![-0.2, -0.1, 0.0, 0.1, 0.2],
            output_kind: CurveKind::TorqueVsDeflection,
        };
        let table = p.generate_curve(&spec).unwrap();
        for s in &table.series {
            assert_eq!(s.points[2], [0.0, 0.0]);
        }
    }

    #[test]
    fn curve_stiffness_torque_is_softening() {
        let p = p();
        let alpha_grid: Vec<f64> = (0..=60).map(|i| 0.3 * i as f64 / 60.0).collect();
        let spec = CurveSpec {
            r_values: vec![6.9 * MM],
            alpha_grid,
            output_kind: CurveKind::StiffnessVsTorque,
        };
        let table = p.generate_curve(&spec).unwrap();
        let pts = &table.series[0].points;
        for w in pts.windows(2) {
            assert!(w[1][0] >= w[0][0], "torque axis must grow");
            assert!(
                w[1][1] <= w[0][1] + 1e-12,
                "stiffness must not grow with torque"
            );
        }
    }

    #[test]
    fn curve_rejects_bad_grids() {
        let p = p();
        let spec = CurveSpec {
            r_values: vec![],
            alpha_grid: vec![0.0],
            output_kind: CurveKind::TorqueVsDeflection,
        };
        assert!(p.generate_curve(&spec).is_err());
        let spec = CurveSpec {
            r_values: vec![10.0 * MM, 5.0 * MM],
            alpha_grid: vec![0.0, 0.1],
            output_kind: CurveKind::TorqueVsDeflection,
        };
        assert!(p.generate_curve(&spec).is_err());
    }

    #[test]
    fn audit_runs_on_standard_grid() {
        let p = p();
        let audit = p.energy_gradient_audit_standard().unwrap();
        assert_eq!(audit.grid_points, 400);
        // motor 1 carries a documented non-gradient term; just require the
        // numbers to be finite and the report printable
        assert!(audit.t1_max_rel_dev.is_finite());
        assert!(audit.t2_max_rel_dev.is_finite());
        let text = audit.to_string();
        assert!(text.contains("motor 1") && text.contains("motor 2"));
    }
}

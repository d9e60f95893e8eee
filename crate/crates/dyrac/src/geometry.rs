//! Closed-form kinematics of the crank and lever mechanisms.
//!
//! The stiffness-setting stage is a slider crank: the triangle `OBP` has
//! fixed side lengths `a` (carrier arm `OB`) and `r_D` (crank disc excenter
//! `BP`), and the pivot radius `r = |OP|` is set by the interior angle
//! `delta` at vertex `B`. The output stage is a lever: the triangle `OPA`
//! has the pivot at `P = (r, 0)` on the neutral ray and the spring anchor
//! at `A`, a fixed distance `l` from the center, rotated by the output
//! deflection `alpha`. Deflecting the output bends the torsion spring by
//! `theta`, the angle at `A`.
//!
//! All angles are computed from side lengths by the law of cosines (or the
//! equivalent `atan2` form where that is better conditioned), which is
//! single-valued on the whole travel. `delta` is the canonical stiffness
//! coordinate: it is strictly monotone in `r`, while the angle at `P` rises
//! and falls over the travel and cannot encode `r` uniquely.
//!
//! Units are SI throughout: meters, radians, newton-meters.

use crate::error::{Error, Result};

/// Slack allowed on an `acos` argument before the pose is rejected.
const ACOS_SLACK: f64 = 1e-12;

/// Mechanism design constants.
///
/// `r_d` and `a` bound the pivot travel to `[|r_d - a|, r_d + a]`; both
/// bounds must stay strictly inside the lever length `l` so the effective
/// stiffness remains finite, and `r_d == a` is rejected because the pivot
/// could then reach the center dead-lock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    /// Crank disc excenter, side `BP` (m).
    pub r_d: f64,
    /// Carrier arm, side `OB` (m).
    pub a: f64,
    /// Spring lever, side `OA` (m).
    pub l: f64,
    /// Torsion spring stiffness (N m/rad).
    pub k: f64,
}

impl DesignParams {
    /// Validated constructor.
    pub fn new(r_d: f64, a: f64, l: f64, k: f64) -> Result<Self> {
        let p = DesignParams { r_d, a, l, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let DesignParams { r_d, a, l, k } = *self;
        if !(r_d > 0.0 && a > 0.0 && l > 0.0 && k > 0.0) {
            return Err(Error::Domain(format!(
                "design parameters must be positive: r_d = {r_d}, a = {a}, l = {l}, k = {k}"
            )));
        }
        if r_d == a {
            return Err(Error::Domain(format!(
                "r_d must differ from a (pivot radius could reach the dead-lock at 0): both are {r_d}"
            )));
        }
        if r_d + a >= l {
            return Err(Error::Domain(format!(
                "pivot travel must stay inside the lever: r_d + a = {} >= l = {l}",
                r_d + a
            )));
        }
        Ok(())
    }

    /// Smallest reachable pivot radius, `|r_d - a|` (m).
    pub fn r_min(&self) -> f64 {
        (self.r_d - self.a).abs()
    }

    /// Largest reachable pivot radius, `r_d + a` (m).
    pub fn r_max(&self) -> f64 {
        self.r_d + self.a
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        let (lo, hi) = (self.r_min(), self.r_max());
        if !(r.is_finite() && r >= lo - ACOS_SLACK && r <= hi + ACOS_SLACK) {
            return Err(Error::Domain(format!(
                "pivot radius {r} m outside the reachable band [{lo}, {hi}] m"
            )));
        }
        Ok(())
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        if !alpha.is_finite() || alpha.abs() > std::f64::consts::PI {
            return Err(Error::Domain(format!(
                "deflection {alpha} rad outside (-pi, pi)"
            )));
        }
        Ok(())
    }

    /// Pivot radius for a crank angle `delta` in `[0, pi]` (rad).
    ///
    /// Law of cosines on the triangle `OBP`. Strictly increasing in
    /// `delta`, from `|r_d - a|` at the folded crank to `r_d + a` at the
    /// stretched one.
    pub fn radius_for_crank_angle(&self, delta: f64) -> Result<f64> {
        if !delta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&delta) {
            return Err(Error::Domain(format!(
                "crank angle {delta} rad outside [0, pi]"
            )));
        }
        Ok(radius_raw(self, delta))
    }

    /// Crank angle `delta` for a pivot radius inside the reachable band.
    ///
    /// Unique inverse of [`radius_for_crank_angle`](Self::radius_for_crank_angle).
    pub fn crank_angle_for_radius(&self, r: f64) -> Result<f64> {
        self.check_radius(r)?;
        acos_clamped(
            (self.a * self.a + self.r_d * self.r_d - r * r) / (2.0 * self.a * self.r_d),
            "crank angle",
        )
    }

    /// All three interior angles of the crank triangle at a given radius,
    /// plus the slide angle `gamma = pi/2 - delta`.
    ///
    /// The angles at `P` and `O` come from the law of cosines; `delta`
    /// closes the triangle as `pi - phi_d - epsilon`, so the angle sum is
    /// exact by construction (it agrees with
    /// [`crank_angle_for_radius`](Self::crank_angle_for_radius) to
    /// rounding).
    pub fn triangle_angles(&self, r: f64) -> Result<TriangleAngles> {
        self.check_radius(r)?;
        let (a, r_d) = (self.a, self.r_d);
        // Degenerate collinear triangles (band edges) have a zero-length
        // denominator in the angle at P; resolve them explicitly.
        let phi_d = if r <= ACOS_SLACK {
            0.0
        } else {
            acos_clamped((r_d * r_d + r * r - a * a) / (2.0 * r_d * r), "angle at P")?
        };
        let epsilon = if r <= ACOS_SLACK {
            0.0
        } else {
            acos_clamped((a * a + r * r - r_d * r_d) / (2.0 * a * r), "angle at O")?
        };
        let delta = std::f64::consts::PI - phi_d - epsilon;
        Ok(TriangleAngles {
            phi_d,
            epsilon,
            gamma: std::f64::consts::FRAC_PI_2 - delta,
            delta,
        })
    }

    /// Spring lever length `c = |AP|` at pivot radius `r` and output
    /// deflection `alpha` (m). Even in `alpha`; equals `l - r` at zero
    /// deflection.
    pub fn spring_lever(&self, r: f64, alpha: f64) -> Result<f64> {
        self.check_radius(r)?;
        self.check_alpha(alpha)?;
        Ok(spring_lever_raw(self, r, alpha))
    }

    /// Spring deflection `theta` at pivot radius `r` and output deflection
    /// `alpha` (rad).
    ///
    /// Computed as `atan2(r sin|alpha|, l - r cos alpha)`, the angle at the
    /// anchor `A` between the center ray and the pivot. This is the same
    /// value as the law-of-cosines form
    /// `arccos((c^2 + l^2 - r^2) / (2 c l))` but stays fully conditioned as
    /// `alpha -> 0`, where the `arccos` argument grazes 1. Even in `alpha`,
    /// zero at zero deflection, with small-deflection slope `r / (l - r)`.
    pub fn spring_deflection(&self, r: f64, alpha: f64) -> Result<f64> {
        self.check_radius(r)?;
        self.check_alpha(alpha)?;
        Ok(spring_deflection_raw(self, r, alpha))
    }

    /// Assemble the full geometric pose at `(r, alpha)`.
    ///
    /// Triangle quantities are evaluated at `|alpha|`; the stored `alpha`
    /// keeps its sign. The nominal working range is `|alpha|` up to the
    /// simulator's end stop; the triangles stay well formed for any
    /// `|alpha| < pi` because the pivot travels strictly inside the lever.
    pub fn configuration(&self, r: f64, alpha: f64) -> Result<MechanismConfiguration> {
        let angles = self.triangle_angles(r)?;
        self.check_alpha(alpha)?;
        let c = spring_lever_raw(self, r, alpha);
        let theta = spring_deflection_raw(self, r, alpha);
        Ok(MechanismConfiguration {
            delta: angles.delta,
            r,
            phi_d: angles.phi_d,
            epsilon: angles.epsilon,
            gamma: angles.gamma,
            alpha,
            theta,
            beta: std::f64::consts::FRAC_PI_2 - alpha.abs() - theta,
            c,
        })
    }
}

/// Desk-scale reference design: 10 mm excenter, 9.5 mm carrier arm, 20 mm
/// lever, 60 N m/rad spring.
impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            r_d: 0.010,
            a: 0.0095,
            l: 0.020,
            k: 60.0,
        }
    }
}

/// Interior angles of the crank triangle `OBP` (rad).
#[derive(Debug, Clone, Copy)]
pub struct TriangleAngles {
    /// Angle at the pivot `P`.
    pub phi_d: f64,
    /// Angle at the center `O`.
    pub epsilon: f64,
    /// Slide angle, `pi/2 - delta`.
    pub gamma: f64,
    /// Crank angle at `B`, the canonical stiffness coordinate.
    pub delta: f64,
}

/// One complete geometric pose of the mechanism.
#[derive(Debug, Clone, Copy)]
pub struct MechanismConfiguration {
    /// Crank angle at `B` (rad).
    pub delta: f64,
    /// Pivot radius `|OP|` (m).
    pub r: f64,
    /// Crank triangle angle at `P` (rad).
    pub phi_d: f64,
    /// Crank triangle angle at `O` (rad).
    pub epsilon: f64,
    /// Slide angle `pi/2 - delta` (rad).
    pub gamma: f64,
    /// Output deflection, signed (rad).
    pub alpha: f64,
    /// Spring deflection, evaluated at `|alpha|` (rad).
    pub theta: f64,
    /// Force projection angle `pi/2 - |alpha| - theta` (rad).
    pub beta: f64,
    /// Spring lever length `|AP|` (m).
    pub c: f64,
}

/// `acos` with a tiny tolerance for floating-point excursions past the
/// mathematical domain; anything larger is a real geometry violation.
fn acos_clamped(x: f64, what: &str) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + ACOS_SLACK {
        return Err(Error::Geometry(format!(
            "{what}: arccos argument {x} outside [-1, 1]"
        )));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

// Unchecked forms shared with the simulator, which pre-validates its state
// and must also evaluate transient crank angles slightly outside [0, pi]
// (the law-of-cosines radius is even and periodic in delta, so the formula
// itself is total).

pub(crate) fn radius_raw(p: &DesignParams, delta: f64) -> f64 {
    (p.a * p.a + p.r_d * p.r_d - 2.0 * p.a * p.r_d * delta.cos()).sqrt()
}

pub(crate) fn spring_lever_raw(p: &DesignParams, r: f64, alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    let dx = p.l * c - r;
    let dy = p.l * s;
    (dx * dx + dy * dy).sqrt()
}

pub(crate) fn spring_deflection_raw(p: &DesignParams, r: f64, alpha: f64) -> f64 {
    let a = alpha.abs();
    (r * a.sin()).atan2(p.l - r * a.cos())
}

/// `sin(delta)` of the crank triangle from its side lengths, via Kahan's
/// stable triangle area. The `acos` route bottoms out near 1.5e-8 at the
/// collinear travel ends; this form goes to zero there, which the
/// motor-torque singularity check relies on.
pub(crate) fn stable_sin_delta(p: &DesignParams, r: f64) -> f64 {
    let mut s = [p.a, p.r_d, r];
    s.sort_by(f64::total_cmp);
    let [z, y, x] = s; // x >= y >= z
    let product = (x + (y + z)) * (z - (x - y)) * (z + (x - y)) * (x + (y - z));
    let area = 0.25 * product.max(0.0).sqrt();
    2.0 * area / (p.a * p.r_d)
}

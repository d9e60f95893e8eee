//! Post-processing and identification: polyline reduction, hysteresis
//! center lines, stiffness-map fitting, the velocity-gain metric, and a
//! grid search over hard-soft stiffness schedules.

use crate::controller::{FitCoefficients, StiffnessSetpoint};
use crate::error::{Error, Result};
use crate::geometry::DesignParams;
use crate::scenario::{Scenario, StiffnessEntry};
use crate::sim::{apply_backlash, simulate};
use crate::trace::SimTrace;
use rayon::prelude::*;

/// An ordered sequence of finite 2-D points.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
}

impl Polyline {
    pub fn new(points: Vec<[f64; 2]>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain(format!(
                "polyline needs at least 2 points, got {}",
                points.len()
            )));
        }
        if points
            .iter()
            .any(|p| !(p[0].is_finite() && p[1].is_finite()))
        {
            return Err(Error::Domain("polyline points must be finite".into()));
        }
        Ok(Polyline { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Perpendicular distance from `p` to the line through `a` and `b`
/// (distance to `a` when the segment degenerates).
fn point_line_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let norm = dx.hypot(dy);
    if norm < 1e-300 {
        return (p[0] - a[0]).hypot(p[1] - a[1]);
    }
    (dy * p[0] - dx * p[1] + b[0] * a[1] - b[1] * a[0]).abs() / norm
}

/// Douglas-Peucker line simplification.
///
/// Returns a subsequence of the input containing both end points; every
/// dropped point lies within `tolerance` of the simplified line.
pub fn douglas_peucker(line: &Polyline, tolerance: f64) -> Result<Polyline> {
    if tolerance < 0.0 || !tolerance.is_finite() {
        return Err(Error::Domain(format!(
            "tolerance must be >= 0, got {tolerance}"
        )));
    }
    let pts = &line.points;
    let mut keep = vec![false; pts.len()];
    keep[0] = true;
    *keep.last_mut().unwrap() = true;
    let mut stack = vec![(0usize, pts.len() - 1)];
    while let Some((start, end)) = stack.pop() {
        if end <= start + 1 {
            continue;
        }
        let (mut max_d, mut max_i) = (0.0f64, start + 1);
        for i in start + 1..end {
            let d = point_line_distance(pts[i], pts[start], pts[end]);
            if d > max_d {
                max_d = d;
                max_i = i;
            }
        }
        if max_d > tolerance {
            keep[max_i] = true;
            stack.push((start, max_i));
            stack.push((max_i, end));
        }
    }
    let points = pts
        .iter()
        .zip(&keep)
        .filter_map(|(p, &k)| k.then_some(*p))
        .collect();
    Polyline::new(points)
}

/// Options for [`hysteresis_centerline`].
#[derive(Debug, Clone, Copy)]
pub struct CenterlineOptions {
    /// Resampling bins across the x range.
    pub bins: usize,
    /// Largest tolerated fraction of backward-running segments per branch.
    pub max_nonmonotone_fraction: f64,
}

impl Default for CenterlineOptions {
    fn default() -> Self {
        CenterlineOptions {
            bins: 200,
            max_nonmonotone_fraction: 0.05,
        }
    }
}

/// Center line of a closed up-then-down sweep loop.
///
/// The loop is split at its extreme x values into two branches, both
/// branches are resampled on a common x grid, and the pointwise mean is
/// returned.
pub fn hysteresis_centerline(loop_line: &Polyline, opts: CenterlineOptions) -> Result<Polyline> {
    let pts = &loop_line.points;
    let n = pts.len();
    let (mut i_min, mut i_max) = (0usize, 0usize);
    for (i, p) in pts.iter().enumerate() {
        if p[0] < pts[i_min][0] {
            i_min = i;
        }
        if p[0] > pts[i_max][0] {
            i_max = i;
        }
    }
    if i_min == i_max {
        return Err(Error::Data("loop has no x extent".into()));
    }
    // walk the (cyclic) sequence from one extreme to the other; the two
    // disjoint walks are the up and down branches
    let cyclic_slice = |from: usize, to: usize| -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        let mut i = from;
        for _ in 0..n {
            out.push(pts[i]);
            if i == to {
                break;
            }
            i = (i + 1) % n;
        }
        out
    };
    let up = cyclic_slice(i_min, i_max);
    let down = cyclic_slice((i_max + 1) % n, (i_min + n - 1) % n);
    let up = monotone_branch(up, opts.max_nonmonotone_fraction, "rising")?;
    let down = monotone_branch(down, opts.max_nonmonotone_fraction, "falling")?;

    let x_lo = pts[i_min][0];
    let x_hi = pts[i_max][0];
    let bins = opts.bins.max(1);
    let points = (0..=bins)
        .map(|i| {
            let x = x_lo + (x_hi - x_lo) * i as f64 / bins as f64;
            let y = 0.5 * (interp(&up, x) + interp(&down, x));
            [x, y]
        })
        .collect();
    Polyline::new(points)
}

/// Validate branch monotonicity and return it sorted by x for
/// interpolation.
fn monotone_branch(
    mut branch: Vec<[f64; 2]>,
    max_fraction: f64,
    name: &str,
) -> Result<Vec<[f64; 2]>> {
    if branch.len() < 2 {
        return Err(Error::Data(format!("{name} branch too short")));
    }
    let dir = (branch.last().unwrap()[0] - branch[0][0]).signum();
    let backward = branch
        .windows(2)
        .filter(|w| (w[1][0] - w[0][0]) * dir < 0.0)
        .count();
    let fraction = backward as f64 / (branch.len() - 1) as f64;
    if fraction > max_fraction {
        return Err(Error::Data(format!(
            "{name} branch runs backward over {:.1} % of its segments",
            fraction * 100.0
        )));
    }
    branch.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(branch)
}

/// Piecewise-linear interpolation on points sorted by x, clamped at the
/// ends.
fn interp(pts: &[[f64; 2]], x: f64) -> f64 {
    if x <= pts[0][0] {
        return pts[0][1];
    }
    if x >= pts[pts.len() - 1][0] {
        return pts[pts.len() - 1][1];
    }
    let i = pts.partition_point(|p| p[0] <= x);
    let (a, b) = (pts[i - 1], pts[i]);
    if b[0] == a[0] {
        return 0.5 * (a[1] + b[1]);
    }
    a[1] + (x - a[0]) / (b[0] - a[0]) * (b[1] - a[1])
}

/// Result of [`fit_radius_stiffness`].
#[derive(Debug, Clone, Copy)]
pub struct StiffnessFit {
    pub coefficients: FitCoefficients,
    /// RMS residual in the cube-root-transformed space.
    pub residual: f64,
}

/// Fit the cubic-log stiffness map `r = scale (p (ln k_e + q))^3` to
/// `(k_e, r)` samples.
///
/// The cube-root substitution `v = (r / scale)^(1/3)` makes the model
/// linear, `v = p u + p q` with `u = ln k_e`, so the fit is closed-form
/// linear least squares and fully deterministic.
pub fn fit_radius_stiffness(data: &[(f64, f64)], scale: f64) -> Result<StiffnessFit> {
    if data.len() < 3 {
        return Err(Error::Data(format!(
            "fit needs at least 3 points, got {}",
            data.len()
        )));
    }
    if !(scale > 0.0) {
        return Err(Error::Data("fit scale must be positive".into()));
    }
    let mut u = Vec::with_capacity(data.len());
    let mut v = Vec::with_capacity(data.len());
    for &(k_e, r) in data {
        if !(k_e > 0.0 && r > 0.0) {
            return Err(Error::Data(format!(
                "fit samples must be positive, got (k_e = {k_e}, r = {r})"
            )));
        }
        u.push(k_e.ln());
        v.push((r / scale).cbrt());
    }
    let n = data.len() as f64;
    let u_mean = u.iter().sum::<f64>() / n;
    let v_mean = v.iter().sum::<f64>() / n;
    let mut suu = 0.0;
    let mut suv = 0.0;
    for (ui, vi) in u.iter().zip(&v) {
        suu += (ui - u_mean) * (ui - u_mean);
        suv += (ui - u_mean) * (vi - v_mean);
    }
    if suu < 1e-12 {
        return Err(Error::Data(
            "degenerate design matrix: stiffness samples do not spread".into(),
        ));
    }
    let p = suv / suu;
    if !(p > 0.0) {
        return Err(Error::Data(format!(
            "fitted slope must be positive for a monotone map, got {p}"
        )));
    }
    let intercept = v_mean - p * u_mean;
    let mut ss = 0.0;
    for (ui, vi) in u.iter().zip(&v) {
        let e = vi - (p * ui + intercept);
        ss += e * e;
    }
    Ok(StiffnessFit {
        coefficients: FitCoefficients {
            p,
            q: intercept / p,
            scale,
        },
        residual: (ss / n).sqrt(),
    })
}

/// Peak output velocity over peak input velocity inside a time window.
pub fn velocity_gain(trace: &SimTrace, window: (f64, f64)) -> Result<f64> {
    let (t0, t1) = window;
    if !(t0 < t1) {
        return Err(Error::Domain(format!("bad window [{t0}, {t1}]")));
    }
    let first = trace.rows.first().map(|r| r.t).unwrap_or(0.0);
    let last = trace.rows.last().map(|r| r.t).unwrap_or(0.0);
    if t0 < first - 1e-9 || t1 > last + 1e-9 {
        return Err(Error::Domain(format!(
            "window [{t0}, {t1}] outside trace [{first}, {last}]"
        )));
    }
    let mut peak_out = 0.0f64;
    let mut peak_in = 0.0f64;
    for row in trace.window(t0, t1) {
        peak_out = peak_out.max(row.eta_dot.abs());
        peak_in = peak_in.max(row.phi1_dot.abs());
    }
    if peak_in < 1e-12 {
        return Err(Error::Data(
            "velocity gain undefined: input velocity peak is zero".into(),
        ));
    }
    Ok(peak_out / peak_in)
}

/// One hard-soft-hard stiffness schedule: stiff until `t_soft`, compliant
/// until `t_stiff`, stiff again afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleCandidate {
    pub t_soft: f64,
    pub t_stiff: f64,
    /// Compliant-phase pivot radius (m).
    pub r_low: f64,
    /// Stiff-phase pivot radius (m).
    pub r_high: f64,
}

impl ScheduleCandidate {
    fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !(0.0 <= self.t_soft && self.t_soft < self.t_stiff && self.t_stiff <= scenario.duration)
        {
            return Err(Error::Config(format!(
                "need 0 <= t_soft < t_stiff <= duration, got {} and {}",
                self.t_soft, self.t_stiff
            )));
        }
        let p = &scenario.design;
        for r in [self.r_low, self.r_high] {
            if !(p.r_min() - 1e-12 <= r && r <= p.r_max() + 1e-12) {
                return Err(Error::Config(format!(
                    "candidate radius {r} m outside the reachable band"
                )));
            }
        }
        Ok(())
    }

    fn apply(&self, template: &Scenario) -> Scenario {
        let mut s = template.clone();
        s.stiffness_schedule = vec![StiffnessEntry {
            t: 0.0,
            set: StiffnessSetpoint::Radius(self.r_high),
        }];
        if self.t_soft == 0.0 {
            s.stiffness_schedule[0].set = StiffnessSetpoint::Radius(self.r_low);
        } else {
            s.stiffness_schedule.push(StiffnessEntry {
                t: self.t_soft,
                set: StiffnessSetpoint::Radius(self.r_low),
            });
        }
        s.stiffness_schedule.push(StiffnessEntry {
            t: self.t_stiff,
            set: StiffnessSetpoint::Radius(self.r_high),
        });
        s
    }
}

/// Outcome of one candidate evaluation.
#[derive(Debug, Clone)]
pub struct CandidateOutcome {
    pub candidate: ScheduleCandidate,
    /// Peak `|eta_dot|` over the run, when the simulation succeeded.
    pub peak_velocity: Option<f64>,
    pub error: Option<String>,
}

/// Full grid-search report.
#[derive(Debug, Clone)]
pub struct ScheduleReport {
    pub entries: Vec<CandidateOutcome>,
}

/// Exhaustively simulate every candidate schedule and return the one with
/// the highest peak output speed.
///
/// Candidates are evaluated in parallel; the winner is reduced with a
/// total tie-break order (earliest `t_soft`, then lowest `r_low`, then
/// earliest `t_stiff`, then lowest `r_high`), so the result does not
/// depend on grid ordering. Failing candidates are recorded in the report
/// and skipped; if every candidate fails, the first failure is returned.
pub fn optimize_schedule(
    template: &Scenario,
    grid: &[ScheduleCandidate],
) -> Result<(ScheduleCandidate, ScheduleReport)> {
    if grid.is_empty() {
        return Err(Error::Config("empty schedule grid".into()));
    }
    let outcomes: Vec<(CandidateOutcome, Option<Error>)> = grid
        .par_iter()
        .map(|cand| {
            let run = cand
                .validate(template)
                .and_then(|()| simulate(&cand.apply(template)));
            match run {
                Ok(trace) => (
                    CandidateOutcome {
                        candidate: *cand,
                        peak_velocity: Some(trace.peak(|r| r.eta_dot)),
                        error: None,
                    },
                    None,
                ),
                Err(e) => (
                    CandidateOutcome {
                        candidate: *cand,
                        peak_velocity: None,
                        error: Some(e.to_string()),
                    },
                    Some(e),
                ),
            }
        })
        .collect();

    let mut best: Option<&CandidateOutcome> = None;
    for (outcome, _) in &outcomes {
        let Some(peak) = outcome.peak_velocity else {
            continue;
        };
        let better = match best {
            None => true,
            Some(b) => {
                let bp = b.peak_velocity.unwrap();
                let c = &outcome.candidate;
                let bc = &b.candidate;
                peak > bp
                    || (peak == bp
                        && (c.t_soft, c.r_low, c.t_stiff, c.r_high)
                            < (bc.t_soft, bc.r_low, bc.t_stiff, bc.r_high))
            }
        };
        if better {
            best = Some(outcome);
        }
    }
    match best {
        Some(b) => Ok((
            b.candidate,
            ScheduleReport {
                entries: outcomes.into_iter().map(|(o, _)| o).collect(),
            },
        )),
        None => {
            let first_err = outcomes
                .into_iter()
                .find_map(|(_, e)| e)
                .expect("non-empty grid with no winner has an error");
            Err(first_err)
        }
    }
}

/// Kinematic quasi-static torque-deflection sweep with play and friction,
/// the loop the output torque sensor would record: deflection swept
/// `-alpha_max -> +alpha_max -> -alpha_max`, spring engagement lagging by
/// the contact state of the dead zone, and Coulomb friction flipping with
/// the sweep direction.
pub fn quasi_static_sweep(
    params: &DesignParams,
    r: f64,
    alpha_max: f64,
    samples_per_branch: usize,
    dead_zone: f64,
    coulomb: f64,
) -> Result<Polyline> {
    if !(alpha_max > 0.0) || samples_per_branch < 2 {
        return Err(Error::Domain(
            "sweep needs alpha_max > 0 and at least 2 samples per branch".into(),
        ));
    }
    if dead_zone < 0.0 || coulomb < 0.0 {
        return Err(Error::Domain("dead zone and friction must be >= 0".into()));
    }
    let n = samples_per_branch;
    let mut points = Vec::with_capacity(2 * n);
    // contact state after an initial downward approach to -alpha_max
    let mut alpha_spring = apply_backlash(-alpha_max, dead_zone);
    let half = 0.5 * dead_zone;
    let mut push = |alpha: f64, dir: f64, alpha_spring: &mut f64| -> Result<()> {
        *alpha_spring = alpha_spring.clamp(alpha - half, alpha + half);
        let torque = params.output_torque(r, *alpha_spring)? + dir * coulomb;
        points.push([alpha, torque]);
        Ok(())
    };
    for i in 0..n {
        let alpha = -alpha_max + 2.0 * alpha_max * i as f64 / (n - 1) as f64;
        push(alpha, 1.0, &mut alpha_spring)?;
    }
    for i in 1..n {
        let alpha = alpha_max - 2.0 * alpha_max * i as f64 / (n - 1) as f64;
        push(alpha, -1.0, &mut alpha_spring)?;
    }
    Polyline::new(points)
}

/// Signed shoelace area enclosed by a polyline treated as a closed loop.
pub fn loop_area(line: &Polyline) -> f64 {
    let pts = &line.points;
    let mut area = 0.0;
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        area += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * area
}

//! Command implementations behind the `dyrac` binary.
//!
//! Commands print human-readable summaries to standard output and write
//! machine-readable CSV files. Exit-code mapping lives in
//! [`crate::error::Error::exit_code`].

use crate::analysis::{fit_radius_stiffness, optimize_schedule, velocity_gain, ScheduleCandidate};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::scenario_file::load_scenario;
use crate::sim::{measure_step_response, simulate};
use crate::statics::{CurveKind, CurveSpec};
use crate::trace::{flags, SimTrace};
use std::io::{BufRead, Write};
use std::path::Path;

const MM: f64 = 1e-3;

/// Stiffness-map sampling: the radius-ratio span swept in 200 uniform
/// steps (201 rows), which keeps the ratio-1 midpoint 0.5 exactly on the
/// grid.
const RATIO_SPAN: (f64, f64) = (0.026, 0.974);
const RATIO_STEPS: usize = 200;

/// Default radii for the per-radius characterization curves (m).
const CURVE_RADII_MM: [f64; 5] = [4.0, 6.9, 10.0, 13.8, 19.1];

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    let file = std::fs::File::create(path)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    Ok(std::io::BufWriter::new(file))
}

fn wline(w: &mut impl Write, path: &Path, line: std::fmt::Arguments) -> Result<()> {
    writeln!(w, "{line}").map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// `curves` subcommand: tabulate one characterization curve as CSV.
pub fn cmd_curves(kind: CurveKind, out: &Path) -> Result<()> {
    let params = crate::geometry::DesignParams::default();
    let mut w = create(out)?;
    match kind {
        CurveKind::StiffnessRatioVsRadiusRatio => {
            let r_values: Vec<f64> = (0..=RATIO_STEPS)
                .map(|i| {
                    let ratio = RATIO_SPAN.0
                        + (RATIO_SPAN.1 - RATIO_SPAN.0) * i as f64 / RATIO_STEPS as f64;
                    ratio * params.l
                })
                .collect();
            let table = params.generate_curve(&CurveSpec {
                r_values,
                alpha_grid: vec![],
                output_kind: kind,
            })?;
            wline(&mut w, out, format_args!("radius_ratio,stiffness_ratio"))?;
            for pt in &table.series[0].points {
                wline(&mut w, out, format_args!("{:.16e},{:.16e}", pt[0], pt[1]))?;
            }
            println!(
                "stiffness map: {} rows over radius ratio [{}, {}] -> {}",
                RATIO_STEPS + 1,
                RATIO_SPAN.0,
                RATIO_SPAN.1,
                out.display()
            );
        }
        CurveKind::TorqueVsDeflection => {
            let alpha_grid: Vec<f64> = (0..=120).map(|i| -0.3 + 0.6 * i as f64 / 120.0).collect();
            let table = params.generate_curve(&CurveSpec {
                r_values: CURVE_RADII_MM.iter().map(|r| r * MM).collect(),
                alpha_grid,
                output_kind: kind,
            })?;
            wline(&mut w, out, format_args!("r_mm,alpha_rad,torque_nm"))?;
            for s in &table.series {
                for pt in &s.points {
                    wline(
                        &mut w,
                        out,
                        format_args!("{:.4},{:.16e},{:.16e}", s.r / MM, pt[0], pt[1]),
                    )?;
                }
            }
            println!(
                "torque-deflection curves for r = {CURVE_RADII_MM:?} mm -> {}",
                out.display()
            );
        }
        CurveKind::StiffnessVsTorque => {
            let alpha_grid: Vec<f64> = (0..=120).map(|i| 0.3 * i as f64 / 120.0).collect();
            let table = params.generate_curve(&CurveSpec {
                r_values: CURVE_RADII_MM.iter().map(|r| r * MM).collect(),
                alpha_grid,
                output_kind: kind,
            })?;
            wline(
                &mut w,
                out,
                format_args!("r_mm,torque_nm,stiffness_nm_per_rad"),
            )?;
            for s in &table.series {
                for pt in &s.points {
                    wline(
                        &mut w,
                        out,
                        format_args!("{:.4},{:.16e},{:.16e}", s.r / MM, pt[0], pt[1]),
                    )?;
                }
            }
            println!(
                "stiffness-torque curves for r = {CURVE_RADII_MM:?} mm -> {}",
                out.display()
            );
        }
    }
    w.flush()
        .map_err(|e| Error::io(format!("writing {}", out.display()), e))
}

/// Window used for the simulate summary's velocity gain: the driven
/// interval when the drive has a finite end, the whole run otherwise.
pub fn summary_gain_window(scenario: &Scenario, trace: &SimTrace) -> (f64, f64) {
    let t_last = trace.rows.last().map(|r| r.t).unwrap_or(0.0);
    match scenario.drive.drive_end() {
        Some(t_end) if t_end <= t_last => (0.25 * t_end, t_end),
        _ => (0.0, t_last),
    }
}

/// `simulate` subcommand: run a scenario file and write the trace CSV.
pub fn cmd_simulate(scenario_path: &Path, out: &Path, dt_override: Option<f64>) -> Result<()> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(dt) = dt_override {
        scenario.dt_physics = dt;
    }
    let trace = simulate(&scenario)?;
    trace.save_csv(out)?;
    let window = summary_gain_window(&scenario, &trace);
    let gain = velocity_gain(&trace, window)
        .map(|g| format!("{g:.3}"))
        .unwrap_or_else(|_| "n/a".into());
    let flags_union = trace.flags_union();
    let flag_names = flags::describe(flags_union);
    println!(
        "simulated {:.3} s ({} samples) -> {}",
        trace.rows.last().map(|r| r.t).unwrap_or(0.0),
        trace.rows.len(),
        out.display()
    );
    println!(
        "peak |phi1_dot| = {:.3} rad/s, peak |eta_dot| = {:.3} rad/s, gain = {} (window {:.2}-{:.2} s), max |alpha| = {:.4} rad, flags = {}",
        trace.peak(|r| r.phi1_dot),
        trace.peak(|r| r.eta_dot),
        gain,
        window.0,
        window.1,
        trace.peak(|r| r.alpha),
        if flag_names.is_empty() {
            "none".to_string()
        } else {
            flag_names.join("+")
        },
    );
    Ok(())
}

/// `step` subcommand: time the pivot-radius response to the scheduled
/// stiffness step; optionally write the r(t) CSV.
pub fn cmd_step(scenario_path: &Path, out: Option<&Path>, dt_override: Option<f64>) -> Result<()> {
    let mut scenario = load_scenario(scenario_path)?;
    if let Some(dt) = dt_override {
        scenario.dt_physics = dt;
    }
    let result = measure_step_response(&scenario)?;
    println!(
        "t_90 = {:.1} ms (r {:.2} -> {:.2} mm, overshoot {:.2} %)",
        result.t_90 * 1e3,
        result.r_initial / MM,
        result.r_final / MM,
        result.overshoot * 100.0
    );
    if let Some(out) = out {
        let trace = simulate(&scenario)?;
        let mut w = create(out)?;
        wline(&mut w, out, format_args!("t,r_m,r_set_m"))?;
        for row in &trace.rows {
            wline(
                &mut w,
                out,
                format_args!("{:.16e},{:.16e},{:.16e}", row.t, row.r, row.r_set),
            )?;
        }
        w.flush()
            .map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
        println!("radius trace -> {}", out.display());
    }
    Ok(())
}

/// Read `(k_e, r)` samples from a CSV with header `k_e,r_m`.
pub fn read_fit_data(path: &Path) -> Result<Vec<(f64, f64)>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let name = path.display().to_string();
    let mut data = Vec::new();
    let mut lines = std::io::BufReader::new(file).lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(Error::Parse {
            path: name,
            line: 1,
            msg: "empty data file".into(),
        });
    };
    let header = header.map_err(|e| Error::io(format!("reading {name}"), e))?;
    if header.trim() != "k_e,r_m" {
        return Err(Error::Parse {
            path: name,
            line: 1,
            msg: format!("expected header `k_e,r_m`, got `{header}`"),
        });
    }
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(format!("reading {name}"), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let mut cols = line.split(',');
        let parse = |field: Option<&str>, what: &str| -> Result<f64> {
            field
                .map(str::trim)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    path: name.clone(),
                    line: lineno,
                    msg: format!("bad {what} field"),
                })
        };
        let k_e = parse(cols.next(), "k_e")?;
        let r = parse(cols.next(), "r_m")?;
        if cols.next().is_some() {
            return Err(Error::Parse {
                path: name,
                line: lineno,
                msg: "expected exactly 2 columns".into(),
            });
        }
        data.push((k_e, r));
    }
    Ok(data)
}

/// `fit` subcommand: fit the cubic-log stiffness map to data and write the
/// fitted curve.
pub fn cmd_fit(data_path: &Path, out: Option<&Path>) -> Result<()> {
    let data = read_fit_data(data_path)?;
    let fit = fit_radius_stiffness(&data, 1e-3)?;
    println!(
        "p = {:.6}, q = {:.6}, rms residual (cube-root space) = {:.3e}",
        fit.coefficients.p, fit.coefficients.q, fit.residual
    );
    if let Some(out) = out {
        let (k_lo, k_hi) = data
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(k_e, _)| {
                (lo.min(k_e), hi.max(k_e))
            });
        let mut w = create(out)?;
        wline(&mut w, out, format_args!("k_e,r_m"))?;
        for i in 0..=100 {
            let k_e = k_lo * (k_hi / k_lo).powf(i as f64 / 100.0);
            wline(
                &mut w,
                out,
                format_args!("{:.16e},{:.16e}", k_e, fit.coefficients.radius(k_e)?),
            )?;
        }
        w.flush()
            .map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
        println!("fitted curve -> {}", out.display());
    }
    Ok(())
}

/// Parsed `--grid` axis: `name=a:b:n`.
fn parse_axis(spec: &str, token: &str) -> Result<(String, Vec<f64>)> {
    let parse_err = |msg: String| Error::Parse {
        path: "--grid".into(),
        line: 1,
        msg,
    };
    let (name, range) = token
        .split_once('=')
        .ok_or_else(|| parse_err(format!("expected `name=a:b:n`, got `{token}` in `{spec}`")))?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(parse_err(format!(
            "axis `{name}` needs `a:b:n`, got `{range}`"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| parse_err(format!("axis `{name}`: bad start `{}`", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| parse_err(format!("axis `{name}`: bad end `{}`", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| parse_err(format!("axis `{name}`: bad count `{}`", parts[2])))?;
    if n == 0 || (n > 1 && !(b > a)) {
        return Err(parse_err(format!(
            "axis `{name}`: need count >= 1 and end > start for multi-point axes"
        )));
    }
    let values = if n == 1 {
        vec![a]
    } else {
        (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect()
    };
    Ok((name.to_string(), values))
}

/// Build the candidate grid from a `--grid` specification:
/// `t_soft=<a:b:n>,t_stiff=<a:b:n>,r_low_mm=<a:b:n>,r_high_mm=<a:b:n>`.
/// Combinations with `t_soft >= t_stiff` are dropped.
pub fn parse_grid(spec: &str) -> Result<Vec<ScheduleCandidate>> {
    let parse_err = |msg: String| Error::Parse {
        path: "--grid".into(),
        line: 1,
        msg,
    };
    let mut axes: std::collections::BTreeMap<String, Vec<f64>> = Default::default();
    for token in spec.split(',') {
        let (name, values) = parse_axis(spec, token.trim())?;
        match name.as_str() {
            "t_soft" | "t_stiff" | "r_low_mm" | "r_high_mm" => {
                if axes.insert(name.clone(), values).is_some() {
                    return Err(parse_err(format!("duplicate axis `{name}`")));
                }
            }
            other => {
                return Err(parse_err(format!(
                    "unknown axis `{other}` (expected t_soft, t_stiff, r_low_mm, r_high_mm)"
                )))
            }
        }
    }
    let get = |name: &str| -> Result<&Vec<f64>> {
        axes.get(name)
            .ok_or_else(|| parse_err(format!("missing axis `{name}`")))
    };
    let (t_softs, t_stiffs) = (get("t_soft")?, get("t_stiff")?);
    let (r_lows, r_highs) = (get("r_low_mm")?, get("r_high_mm")?);
    let mut grid = Vec::new();
    for &t_soft in t_softs {
        for &t_stiff in t_stiffs {
            if t_soft >= t_stiff {
                continue;
            }
            for &r_low in r_lows {
                for &r_high in r_highs {
                    grid.push(ScheduleCandidate {
                        t_soft,
                        t_stiff,
                        r_low: r_low * MM,
                        r_high: r_high * MM,
                    });
                }
            }
        }
    }
    if grid.is_empty() {
        return Err(parse_err(
            "grid is empty after dropping t_soft >= t_stiff".into(),
        ));
    }
    Ok(grid)
}

/// `optimize` subcommand: grid search over hard-soft schedules.
pub fn cmd_optimize(
    scenario_path: &Path,
    grid_spec: &str,
    out: Option<&Path>,
    dt_override: Option<f64>,
) -> Result<()> {
    let mut template = load_scenario(scenario_path)?;
    if let Some(dt) = dt_override {
        template.dt_physics = dt;
    }
    let grid = parse_grid(grid_spec)?;
    let (best, report) = optimize_schedule(&template, &grid)?;
    let best_peak = report
        .entries
        .iter()
        .find(|e| e.candidate == best)
        .and_then(|e| e.peak_velocity)
        .unwrap_or(f64::NAN);
    println!(
        "evaluated {} candidates; best: t_soft = {:.3} s, t_stiff = {:.3} s, r_low = {:.2} mm, r_high = {:.2} mm, peak |eta_dot| = {:.3} rad/s",
        report.entries.len(),
        best.t_soft,
        best.t_stiff,
        best.r_low / MM,
        best.r_high / MM,
        best_peak
    );
    if let Some(out) = out {
        let mut w = create(out)?;
        wline(
            &mut w,
            out,
            format_args!("t_soft,t_stiff,r_low_mm,r_high_mm,peak_eta_dot,error"),
        )?;
        for e in &report.entries {
            let c = e.candidate;
            wline(
                &mut w,
                out,
                format_args!(
                    "{:.16e},{:.16e},{:.6},{:.6},{},{}",
                    c.t_soft,
                    c.t_stiff,
                    c.r_low / MM,
                    c.r_high / MM,
                    e.peak_velocity
                        .map(|v| format!("{v:.16e}"))
                        .unwrap_or_else(|| "NaN".into()),
                    e.error
                        .as_deref()
                        .map(|s| s.replace(',', ";"))
                        .unwrap_or_default()
                ),
            )?;
        }
        w.flush()
            .map_err(|e| Error::io(format!("writing {}", out.display()), e))?;
        println!("candidate report -> {}", out.display());
    }
    Ok(())
}

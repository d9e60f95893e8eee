//! Line-oriented scenario file format.
//!
//! Sectioned `key = value` text; `#` and `;` start comments. Lengths carry
//! a `_mm` key suffix and are converted to meters on load. Schedule and
//! piecewise-drive entries are bare lines of `k=v` tokens starting with
//! `t=`. Unknown sections or keys are rejected with the offending line
//! number.
//!
//! ```text
//! [design]
//! r_d_mm = 10.0
//! a_mm = 9.5
//! l_mm = 20.0
//! k_spring = 60.0
//!
//! [load]
//! inertia = 0.0125
//!
//! [drive]
//! waveform = sine
//! amplitude_rad = 0.5
//! freq_hz = 3.1
//!
//! [schedule]
//! t=0 r_mm=19.1
//! t=0.05 r_mm=6.9
//!
//! [trigger]
//! rule = negative_position
//! b_low = 0.01
//! b_high = 0.5
//!
//! [sim]
//! duration = 3.0
//! ```

use crate::controller::{StiffnessSetpoint, TriggerRule};
use crate::error::{Error, Result};
use crate::scenario::{Scenario, StiffnessEntry, Waveform, DEFAULT_END_STOP};
use std::collections::BTreeMap;
use std::path::Path;

const MM: f64 = 1e-3;

/// Parse a scenario file from disk.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    parse_scenario(&text, &path.display().to_string())
}

/// Known keys per section; anything else is a parse error.
const SECTIONS: &[(&str, &[&str])] = &[
    ("design", &["r_d_mm", "a_mm", "l_mm", "k_spring"]),
    (
        "load",
        &[
            "inertia",
            "viscous_friction",
            "coulomb_friction",
            "backlash_rad",
            "end_stop_rad",
        ],
    ),
    (
        "motors",
        &[
            "pos_vel_limit",
            "pos_torque_limit",
            "pos_bandwidth_hz",
            "stiff_vel_limit",
            "stiff_torque_limit",
            "stiff_bandwidth_hz",
            "damper_torque_limit",
            "damper_lag_s",
        ],
    ),
    (
        "drive",
        &[
            "waveform",
            "amplitude_rad",
            "freq_hz",
            "offset_rad",
            "phase_rad",
            "cycles",
            "rest_rad",
            "hold_rad",
        ],
    ),
    ("schedule", &[]),
    ("trigger", &["rule", "b_low", "b_high"]),
    (
        "sim",
        &[
            "dt",
            "control_dt",
            "duration",
            "initial_alpha_rad",
            "initial_eta_dot",
        ],
    ),
];

struct Entry {
    line: usize,
    value: String,
}

#[derive(Default)]
struct RawSections {
    // section -> key -> (line, value)
    keys: BTreeMap<String, BTreeMap<String, Entry>>,
    schedule_lines: Vec<(usize, String)>,
    drive_points: Vec<(usize, String)>,
}

/// Parse scenario text; `name` appears in diagnostics.
pub fn parse_scenario(text: &str, name: &str) -> Result<Scenario> {
    let raw = split_sections(text, name)?;
    build_scenario(&raw, name)
}

fn err(name: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: name.to_string(),
        line,
        msg: msg.into(),
    }
}

fn split_sections(text: &str, name: &str) -> Result<RawSections> {
    let mut raw = RawSections::default();
    let mut section: Option<String> = None;
    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw_line).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let sec = rest
                .strip_suffix(']')
                .ok_or_else(|| err(name, lineno, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if !SECTIONS.iter().any(|(s, _)| *s == sec) {
                let known: Vec<&str> = SECTIONS.iter().map(|(s, _)| *s).collect();
                return Err(err(
                    name,
                    lineno,
                    format!("unknown section [{sec}] (expected one of {known:?})"),
                ));
            }
            section = Some(sec);
            continue;
        }
        let Some(sec) = section.as_deref() else {
            return Err(err(
                name,
                lineno,
                format!("`{line}` appears before any [section]"),
            ));
        };
        // entry lines: bare `t=...` tokens in [schedule] and [drive]
        if line.starts_with("t=") {
            match sec {
                "schedule" => {
                    raw.schedule_lines.push((lineno, line.to_string()));
                    continue;
                }
                "drive" => {
                    raw.drive_points.push((lineno, line.to_string()));
                    continue;
                }
                _ => {
                    return Err(err(
                        name,
                        lineno,
                        format!(
                            "[{sec}] does not take entry lines (only [schedule] and [drive] do)"
                        ),
                    ))
                }
            }
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            err(
                name,
                lineno,
                format!("[{sec}] expected `key = value`, got `{line}`"),
            )
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        let allowed = SECTIONS
            .iter()
            .find(|(s, _)| *s == sec)
            .map(|(_, keys)| *keys)
            .unwrap_or(&[]);
        if sec == "schedule" {
            return Err(err(
                name,
                lineno,
                format!("[schedule] takes entry lines `t=<s> r_mm=<mm> | k_e=<N m/rad> | b=<N m s/rad>`, got key `{key}`"),
            ));
        }
        if !allowed.contains(&key.as_str()) {
            return Err(err(
                name,
                lineno,
                format!("[{sec}] unknown key `{key}` (expected one of {allowed:?})"),
            ));
        }
        let dup = raw.keys.entry(sec.to_string()).or_default().insert(
            key.clone(),
            Entry {
                line: lineno,
                value,
            },
        );
        if dup.is_some() {
            return Err(err(name, lineno, format!("[{sec}] duplicate key `{key}`")));
        }
    }
    Ok(raw)
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

struct SectionView<'a> {
    name: &'a str,
    section: &'a str,
    keys: Option<&'a BTreeMap<String, Entry>>,
}

impl<'a> SectionView<'a> {
    fn require(&self, key: &str) -> Result<(usize, &'a str)> {
        match self.keys.and_then(|k| k.get(key)) {
            Some(e) => Ok((e.line, e.value.as_str())),
            None => Err(err(
                self.name,
                1,
                format!("missing required key `{key}` in section [{}]", self.section),
            )),
        }
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        match self.keys.and_then(|k| k.get(key)) {
            Some(e) => parse_number(self.name, e.line, key, &e.value).map(Some),
            None => Ok(None),
        }
    }

    fn required_number(&self, key: &str) -> Result<f64> {
        let (line, value) = self.require(key)?;
        parse_number(self.name, line, key, value)
    }

    fn string(&self, key: &str) -> Option<(usize, &'a str)> {
        self.keys
            .and_then(|k| k.get(key))
            .map(|e| (e.line, e.value.as_str()))
    }
}

fn parse_number(name: &str, line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| {
            err(
                name,
                line,
                format!("key `{key}`: `{value}` is not a finite number"),
            )
        })
}

fn build_scenario(raw: &RawSections, name: &str) -> Result<Scenario> {
    let view = |section: &'static str| SectionView {
        name,
        section,
        keys: raw.keys.get(section),
    };

    let design = view("design");
    let params = crate::geometry::DesignParams::new(
        design.required_number("r_d_mm")? * MM,
        design.required_number("a_mm")? * MM,
        design.required_number("l_mm")? * MM,
        design.required_number("k_spring")?,
    )
    .map_err(|e| err(name, 1, format!("[design] {e}")))?;

    let load = view("load");
    let mut scenario = Scenario::new(StiffnessSetpoint::Radius(params.r_min()));
    scenario.design = params;
    scenario.load_inertia = load.required_number("inertia")?;
    scenario.load_viscous_friction = load.number("viscous_friction")?.unwrap_or(0.0);
    scenario.coulomb_friction = load.number("coulomb_friction")?.unwrap_or(0.0);
    scenario.backlash = load.number("backlash_rad")?.unwrap_or(0.0);
    scenario.end_stop = load.number("end_stop_rad")?.unwrap_or(DEFAULT_END_STOP);

    let motors = view("motors");
    if let Some(v) = motors.number("pos_vel_limit")? {
        scenario.servo1.velocity_limit = v;
    }
    if let Some(v) = motors.number("pos_torque_limit")? {
        scenario.servo1.torque_limit = v;
    }
    if let Some(v) = motors.number("pos_bandwidth_hz")? {
        scenario.servo1.tracking_bandwidth = v;
    }
    if let Some(v) = motors.number("stiff_vel_limit")? {
        scenario.servo2.velocity_limit = v;
    }
    if let Some(v) = motors.number("stiff_torque_limit")? {
        scenario.servo2.torque_limit = v;
    }
    if let Some(v) = motors.number("stiff_bandwidth_hz")? {
        scenario.servo2.tracking_bandwidth = v;
    }
    if let Some(v) = motors.number("damper_torque_limit")? {
        scenario.damper.torque_limit = v;
    }
    if let Some(v) = motors.number("damper_lag_s")? {
        scenario.damper.lag_time_constant = v;
    }

    scenario.drive = parse_drive(raw, name)?;

    scenario.stiffness_schedule = Vec::new();
    scenario.damping_schedule = Vec::new();
    for (lineno, line) in &raw.schedule_lines {
        parse_schedule_entry(name, *lineno, line, &mut scenario)?;
    }
    if scenario.stiffness_schedule.is_empty() {
        return Err(err(
            name,
            1,
            "[schedule] needs at least one stiffness entry (t=0 r_mm=... or k_e=...)",
        ));
    }

    scenario.trigger = parse_trigger(&view("trigger"), name)?;

    let sim = view("sim");
    scenario.duration = sim.required_number("duration")?;
    if let Some(v) = sim.number("dt")? {
        scenario.dt_physics = v;
    }
    if let Some(v) = sim.number("control_dt")? {
        scenario.dt_control = v;
    }
    scenario.initial_alpha = sim.number("initial_alpha_rad")?.unwrap_or(0.0);
    scenario.initial_eta_dot = sim.number("initial_eta_dot")?.unwrap_or(0.0);

    scenario
        .validate()
        .map_err(|e| err(name, 1, format!("invalid scenario: {e}")))?;
    Ok(scenario)
}

fn parse_drive(raw: &RawSections, name: &str) -> Result<Waveform> {
    let drive = SectionView {
        name,
        section: "drive",
        keys: raw.keys.get("drive"),
    };
    let (line, kind) = drive.require("waveform")?;
    match kind.to_ascii_lowercase().as_str() {
        "none" => {
            if !raw.drive_points.is_empty() {
                let (l, _) = raw.drive_points[0];
                return Err(err(name, l, "waveform `none` takes no trajectory points"));
            }
            Ok(Waveform::Hold {
                position: drive.number("hold_rad")?.unwrap_or(0.0),
            })
        }
        "sine" => Ok(Waveform::Sine {
            amplitude: drive.required_number("amplitude_rad")?,
            freq_hz: drive.required_number("freq_hz")?,
            offset: drive.number("offset_rad")?.unwrap_or(0.0),
            phase: drive.number("phase_rad")?.unwrap_or(0.0),
            cycles: drive.number("cycles")?.unwrap_or(0.0),
            rest: drive.number("rest_rad")?.unwrap_or(0.0),
        }),
        "linear" => {
            let mut points = Vec::new();
            for (lineno, line) in &raw.drive_points {
                let tokens = parse_tokens(name, *lineno, line, &["t", "phi"])?;
                let t = *tokens.get("t").expect("t required by prefix");
                let phi = *tokens.get("phi").ok_or_else(|| {
                    err(name, *lineno, "[drive] trajectory point needs `phi=<rad>`")
                })?;
                points.push([t, phi]);
            }
            if points.len() < 2 {
                return Err(err(
                    name,
                    line,
                    "waveform `linear` needs at least two `t=<s> phi=<rad>` lines",
                ));
            }
            Ok(Waveform::PiecewiseLinear { points })
        }
        other => Err(err(
            name,
            line,
            format!("unknown waveform `{other}` (expected none, sine, or linear)"),
        )),
    }
}

/// Parse whitespace-separated `k=v` tokens, restricted to `allowed` keys.
fn parse_tokens(
    name: &str,
    lineno: usize,
    line: &str,
    allowed: &[&str],
) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| err(name, lineno, format!("expected `k=v` token, got `{token}`")))?;
        if !allowed.contains(&key) {
            return Err(err(
                name,
                lineno,
                format!("unknown entry key `{key}` (expected one of {allowed:?})"),
            ));
        }
        let v = parse_number(name, lineno, key, value)?;
        if out.insert(key.to_string(), v).is_some() {
            return Err(err(name, lineno, format!("duplicate entry key `{key}`")));
        }
    }
    Ok(out)
}

fn parse_schedule_entry(
    name: &str,
    lineno: usize,
    line: &str,
    scenario: &mut Scenario,
) -> Result<()> {
    let tokens = parse_tokens(name, lineno, line, &["t", "r_mm", "k_e", "b"])?;
    let t = *tokens
        .get("t")
        .ok_or_else(|| err(name, lineno, "schedule entry needs `t=<s>`"))?;
    let stiffness = match (tokens.get("r_mm"), tokens.get("k_e")) {
        (Some(_), Some(_)) => {
            return Err(err(name, lineno, "give either `r_mm` or `k_e`, not both"))
        }
        (Some(&r), None) => Some(StiffnessSetpoint::Radius(r * MM)),
        (None, Some(&k_e)) => Some(StiffnessSetpoint::EffectiveStiffness(k_e)),
        (None, None) => None,
    };
    let b = tokens.get("b").copied();
    if stiffness.is_none() && b.is_none() {
        return Err(err(
            name,
            lineno,
            "schedule entry needs at least one of `r_mm`, `k_e`, `b`",
        ));
    }
    if let Some(set) = stiffness {
        scenario.stiffness_schedule.push(StiffnessEntry { t, set });
    }
    if let Some(b) = b {
        scenario.damping_schedule.push([t, b]);
    }
    Ok(())
}

fn parse_trigger(view: &SectionView, name: &str) -> Result<TriggerRule> {
    let Some((line, rule)) = view.string("rule") else {
        // no trigger section or no rule: follow the [schedule] b entries
        return Ok(TriggerRule::TimeSchedule);
    };
    match rule.to_ascii_lowercase().as_str() {
        "none" => Ok(TriggerRule::None),
        "time_schedule" => Ok(TriggerRule::TimeSchedule),
        "negative_position" => Ok(TriggerRule::NegativePosition {
            b_low: view.required_number("b_low")?,
            b_high: view.required_number("b_high")?,
        }),
        other => Err(err(
            name,
            line,
            format!(
                "unknown trigger rule `{other}` (expected none, negative_position, time_schedule)"
            ),
        )),
    }
}

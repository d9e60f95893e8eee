//! Simulation trace: uniformly sampled time series of commanded and actual
//! states, and its CSV serialization.
//!
//! The CSV column order is a stable contract. Values are written with 17
//! significant digits so a read-back reproduces every `f64` bit-exactly;
//! the flags column is a decimal bit set.

use crate::error::{Error, Result};
use std::io::{BufRead, Write};

/// Row flag bits.
pub mod flags {
    /// The stiffness setpoint was saturated to the reachable radius band.
    pub const R_SET_CLAMPED: u32 = 1 << 0;
    /// Motor-1 static holding torque exceeds its rating.
    pub const MOTOR1_TORQUE_EXCEEDED: u32 = 1 << 1;
    /// Motor-2 static holding torque exceeds its rating.
    pub const MOTOR2_TORQUE_EXCEEDED: u32 = 1 << 2;
    /// The deflection is beyond the end stop (penalty contact active).
    pub const END_STOP_CONTACT: u32 = 1 << 3;
    /// The commanded damper torque was saturated.
    pub const DAMPER_SATURATED: u32 = 1 << 4;
    /// Motor torques not computable here (singular denominator); the
    /// torque columns hold NaN.
    pub const MOTOR_TORQUE_SINGULAR: u32 = 1 << 5;

    /// Human-readable names of the set bits.
    pub fn describe(bits: u32) -> Vec<&'static str> {
        let table = [
            (R_SET_CLAMPED, "r_set_clamped"),
            (MOTOR1_TORQUE_EXCEEDED, "motor1_torque_exceeded"),
            (MOTOR2_TORQUE_EXCEEDED, "motor2_torque_exceeded"),
            (END_STOP_CONTACT, "end_stop_contact"),
            (DAMPER_SATURATED, "damper_saturated"),
            (MOTOR_TORQUE_SINGULAR, "motor_torque_singular"),
        ];
        table
            .iter()
            .filter(|(bit, _)| bits & bit != 0)
            .map(|&(_, name)| name)
            .collect()
    }
}

/// One sample of the simulation state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    /// Sample time (s).
    pub t: f64,
    /// Commanded motor-1 position (rad).
    pub phi1_cmd: f64,
    /// Motor-1 position (rad).
    pub phi1: f64,
    /// Motor-1 velocity (rad/s).
    pub phi1_dot: f64,
    /// Motor-2 position (rad).
    pub phi2: f64,
    /// Crank angle `phi2 - phi1` (rad).
    pub delta: f64,
    /// Pivot radius (m).
    pub r: f64,
    /// Commanded pivot radius after clamping (m).
    pub r_set: f64,
    /// Output deflection `eta - phi1` (rad).
    pub alpha: f64,
    /// Spring deflection (rad).
    pub theta: f64,
    /// Output position (rad).
    pub eta: f64,
    /// Output velocity (rad/s).
    pub eta_dot: f64,
    /// Output holding torque (N m).
    pub t_o: f64,
    /// Motor-1 static holding torque (N m); NaN when singular.
    pub t_1: f64,
    /// Motor-2 static holding torque (N m); NaN when singular.
    pub t_2: f64,
    /// Commanded damper torque before saturation (N m).
    pub t3_cmd: f64,
    /// Applied damper torque (N m).
    pub t3: f64,
    /// Zero-deflection effective stiffness at the actual radius (N m/rad).
    pub k_e0: f64,
    /// Stored spring energy (J).
    pub e_spring: f64,
    /// Active damping factor (N m s/rad).
    pub b_set: f64,
    pub flags: u32,
}

impl TraceRow {
    fn fields(&self) -> [f64; 20] {
        [
            self.t,
            self.phi1_cmd,
            self.phi1,
            self.phi1_dot,
            self.phi2,
            self.delta,
            self.r,
            self.r_set,
            self.alpha,
            self.theta,
            self.eta,
            self.eta_dot,
            self.t_o,
            self.t_1,
            self.t_2,
            self.t3_cmd,
            self.t3,
            self.k_e0,
            self.e_spring,
            self.b_set,
        ]
    }

    fn from_fields(f: &[f64; 20], flags: u32) -> TraceRow {
        TraceRow {
            t: f[0],
            phi1_cmd: f[1],
            phi1: f[2],
            phi1_dot: f[3],
            phi2: f[4],
            delta: f[5],
            r: f[6],
            r_set: f[7],
            alpha: f[8],
            theta: f[9],
            eta: f[10],
            eta_dot: f[11],
            t_o: f[12],
            t_1: f[13],
            t_2: f[14],
            t3_cmd: f[15],
            t3: f[16],
            k_e0: f[17],
            e_spring: f[18],
            b_set: f[19],
            flags,
        }
    }
}

/// Fixed CSV header (the column-order contract).
pub const CSV_HEADER: &str = "t,phi1_cmd,phi1,phi1_dot,phi2,delta,r_m,r_set_m,alpha,theta,eta,\
eta_dot,T_O,T_1,T_2,T3_cmd,T3,k_e0,E_spring,b_set,flags";

/// A completed simulation trace. Rows are uniformly spaced at the control
/// interval and immutable once the run finishes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
    /// Sample interval (s).
    pub sample_dt: f64,
}

impl SimTrace {
    /// Rows whose time lies in `[t0, t1]`.
    pub fn window(&self, t0: f64, t1: f64) -> impl Iterator<Item = &TraceRow> {
        self.rows.iter().filter(move |r| r.t >= t0 && r.t <= t1)
    }

    /// Largest `|f(row)|` over the whole trace.
    pub fn peak(&self, f: impl Fn(&TraceRow) -> f64) -> f64 {
        self.rows.iter().map(|r| f(r).abs()).fold(0.0, f64::max)
    }

    /// Union of all row flags.
    pub fn flags_union(&self) -> u32 {
        self.rows.iter().fold(0, |acc, r| acc | r.flags)
    }

    /// Write the trace as CSV with 17-significant-digit values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let ctx = "writing trace CSV";
        writeln!(w, "{CSV_HEADER}").map_err(|e| Error::io(ctx, e))?;
        for row in &self.rows {
            let mut line = String::with_capacity(512);
            for v in row.fields() {
                line.push_str(&format!("{v:.16e}"));
                line.push(',');
            }
            line.push_str(&row.flags.to_string());
            writeln!(w, "{line}").map_err(|e| Error::io(ctx, e))?;
        }
        Ok(())
    }

    /// Write the trace to a file path.
    pub fn save_csv(&self, path: &std::path::Path) -> Result<()> {
        let file = std::fs::File::create(path)
            .map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Parse a trace back from CSV. `name` is used in diagnostics.
    pub fn read_csv<R: BufRead>(reader: R, name: &str) -> Result<SimTrace> {
        let mut rows = Vec::new();
        let mut lines = reader.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(name, 1, "empty file"))?;
        let header = header.map_err(|e| Error::io(format!("reading {name}"), e))?;
        if header.trim() != CSV_HEADER {
            return Err(parse_err(name, 1, "unexpected trace CSV header"));
        }
        for (idx, line) in lines {
            let line = line.map_err(|e| Error::io(format!("reading {name}"), e))?;
            if line.trim().is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 21 {
                return Err(parse_err(
                    name,
                    lineno,
                    &format!("expected 21 columns, found {}", parts.len()),
                ));
            }
            let mut fields = [0.0f64; 20];
            for (i, s) in parts[..20].iter().enumerate() {
                fields[i] = s.trim().parse::<f64>().map_err(|_| {
                    parse_err(name, lineno, &format!("column {}: bad number `{s}`", i + 1))
                })?;
            }
            let flags: u32 = parts[20]
                .trim()
                .parse()
                .map_err(|_| parse_err(name, lineno, "bad flags field"))?;
            rows.push(TraceRow::from_fields(&fields, flags));
        }
        if rows.len() < 2 {
            return Err(parse_err(name, 1, "trace needs at least two rows"));
        }
        let sample_dt = rows[1].t - rows[0].t;
        Ok(SimTrace { rows, sample_dt })
    }
}

fn parse_err(path: &str, line: usize, msg: &str) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        msg: msg.to_string(),
    }
}

//! Error type shared by all modules.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the kinematics, simulation, analysis, and CLI layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the operation's domain (bad angle, radius
    /// outside the reachable band, zero deflection where a secant is asked
    /// for, ...).
    #[error("{0}")]
    Domain(String),

    /// The requested pose does not form a valid triangle.
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// A denominator of the motor-torque chain is numerically zero; the
    /// configuration must be treated as unreachable rather than clamped.
    #[error("singular configuration: {0}")]
    Singularity(String),

    /// Malformed scenario, trigger rule, or grid specification.
    #[error("{0}")]
    Config(String),

    /// Analysis input that cannot be processed (degenerate fit matrix,
    /// non-monotone hysteresis branch, zero input peak, ...).
    #[error("{0}")]
    Data(String),

    /// The integrator produced a non-finite state or hit a geometric
    /// singularity; carries the simulation time of the failure.
    #[error("simulation failed at t = {t:.6} s: {msg}")]
    Simulation { t: f64, msg: String },

    /// Scenario-file or data-file parse failure with source location.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// File-system failure wrapping the OS error.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code used by the command-line frontend:
    /// 0 success, 2 I/O, 3 parse, 4 simulation, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Parse { .. } => 3,
            Error::Simulation { .. } => 4,
            _ => 1,
        }
    }
}

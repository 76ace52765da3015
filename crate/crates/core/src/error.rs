use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is outside its admissible range.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trajectory is malformed: {0}")]
    Trajectory(String),

    /// `a_max <= gdot_max^2 * a_d_max`: no admissible bound on the rate derivative.
    #[error("infeasible limits: a_max = {a_max} leaves no room for gdot_max^2 * a_d_max = {required}")]
    InfeasibleLimits { a_max: f64, required: f64 },

    #[error("singular game parameters: {symbol} vanishes")]
    SingularParameters { symbol: &'static str },

    #[error("operation requires the {expected} branch but the solution is {actual}")]
    BranchMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error(
        "no feasible discount rate up to {alpha_cap}: worst violation {worst_violation:.6e} at alpha = {last_alpha}"
    )]
    NoFeasibleAlpha {
        alpha_cap: f64,
        last_alpha: f64,
        worst_violation: f64,
    },

    #[error("QP solver did not converge after {iterations} iterations (KKT residual {residual:.3e})")]
    SolverNonConvergence { iterations: usize, residual: f64 },

    #[error("step {step}, agent {agent}: {source}")]
    AgentStep {
        step: usize,
        agent: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

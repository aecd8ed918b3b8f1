use thiserror::Error;

/// Errors raised by the linkage, spring and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("{what} = {value} is outside the valid domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A closed form is singular at the requested knee angle.
    #[error("{formula} is singular at a knee angle of {angle_deg:.6} deg")]
    Singularity {
        formula: &'static str,
        angle_deg: f64,
    },

    /// The mechanism or spring arrangement is not well formed.
    #[error("invalid configuration: {0}")]
    Configuration(String),

    /// No stiffness can reach the force budget (the spring never deflects).
    #[error("unsolvable: {0}")]
    Unsolvable(String),

    /// A robot record lacks the measurements a prediction needs.
    #[error("robot `{name}` has neither a take-off velocity nor a stored-energy fraction")]
    InsufficientData { name: String },

    /// A malformed row in a robot catalogue.
    #[error("catalogue row {row}, field `{field}`: {message}")]
    Catalogue {
        row: usize,
        field: String,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn singular(formula: &'static str, angle_rad: f64) -> Self {
        Error::Singularity {
            formula,
            angle_deg: angle_rad.to_degrees(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use core::fmt;

/// Errors from the contract-checked entry points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// A Monte Carlo run was requested with zero trials.
    EmptyRun,
    /// A grid step outside the valid range `(0, pi/2]`.
    InvalidStep,
    /// A violation-family angle outside the open interval `(0, pi/4)`.
    ThetaOutsideFamily,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyRun => write!(f, "empty run: at least one trial is required"),
            Error::InvalidStep => write!(f, "grid step must lie in (0, pi/2]"),
            Error::ThetaOutsideFamily => {
                write!(f, "family angle must lie strictly between 0 and pi/4")
            }
        }
    }
}

impl core::error::Error for Error {}

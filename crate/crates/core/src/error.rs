use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors that must share a length do not.
    Dimension {
        expected: usize,
        found: usize,
    },
    /// An operation that needs at least one element got none.
    Empty,
    /// A gradient or parameter element is NaN or infinite.
    NonFinite {
        index: usize,
        value: f64,
    },
    /// A hyperparameter is outside its admissible range.
    InvalidHyper {
        name: &'static str,
        value: f64,
    },
    /// Nesterov momentum was requested with a combination the update does not define.
    Nesterov(&'static str),
    /// Mixing weights must sum to one unless built unconstrained.
    LambdaSum {
        lambda_a: f64,
        lambda_s: f64,
    },
    InvalidArgument(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::Empty => f.write_str("empty vector"),
            Error::NonFinite { index, value } => {
                write!(f, "non-finite value {value} at index {index}")
            }
            Error::InvalidHyper { name, value } => {
                write!(f, "hyperparameter `{name}` out of range: {value}")
            }
            Error::Nesterov(why) => write!(f, "invalid nesterov configuration: {why}"),
            Error::LambdaSum { lambda_a, lambda_s } => write!(
                f,
                "lambda_a + lambda_s must equal 1 (got {lambda_a} + {lambda_s})"
            ),
            Error::InvalidArgument(why) => write!(f, "invalid argument: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        None => Ok(()),
        Some(index) => Err(Error::NonFinite {
            index,
            value: values[index],
        }),
    }
}

use thiserror::Error;

use crate::qmat::QmatError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linear(#[from] QmatError),
    #[error("{name} = {value} is outside its allowed range {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("invalid optimizer configuration: {0}")]
    Config(String),
    #[error("invalid domain: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn unit_interval(name: &'static str, value: f64) -> Result<f64> {
        if (0.0..=1.0).contains(&value) {
            Ok(value)
        } else {
            Err(Error::OutOfRange { name, value, range: "[0, 1]" })
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A field or velocity returned a non-finite value.
    #[error("non-finite {what} at t = {t}, x = ({}, {}, {})", point[0], point[1], point[2])]
    Evaluation {
        what: String,
        t: f64,
        point: [f64; 3],
    },

    /// The flow map lost invertibility (|det F| below the floor, or det F < 0).
    #[error("degenerate deformation: det F = {det} at t = {t}, X = ({}, {}, {})", point[0], point[1], point[2])]
    DegenerateMap { det: f64, t: f64, point: [f64; 3] },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Expr(#[from] EvalError),
}

impl Error {
    pub(crate) fn non_finite(what: impl Into<String>, t: f64, x: &crate::Point) -> Self {
        Error::Evaluation {
            what: what.into(),
            t,
            point: [x[0], x[1], x[2]],
        }
    }
}

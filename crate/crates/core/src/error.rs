use thiserror::Error;

use crate::model::Family;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("x = {x} lies outside the {family} domain {domain}")]
    Domain {
        family: Family,
        x: f64,
        domain: &'static str,
    },

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("no bound state for {family} at j = {j}, g = {g}: j must lie in {window}")]
    NoBoundState {
        family: Family,
        j: f64,
        g: f64,
        window: String,
    },

    #[error("quantization violated: {0}")]
    Quantization(String),

    #[error("non-normalizable state: {0}")]
    NonNormalizable(String),

    #[error("jet order exhausted: requested {requested}, available {available}")]
    OrderExhausted { requested: usize, available: usize },

    #[error("degenerate function: {0}")]
    Degenerate(String),

    #[error("grid error: {0}")]
    Grid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

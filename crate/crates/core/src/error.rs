use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{element} is not in {group}")]
    Membership { element: String, group: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("group too large: exceeded cap of {cap} elements ({partial} found so far)")]
    CapExceeded { cap: usize, partial: usize },

    #[error("group too large: predicted order {predicted} exceeds the cap of {cap} elements")]
    CapPredicted { cap: usize, predicted: u128 },

    #[error("undecided at bound: modulus {modulus} exceeds the configured maximum {bound}")]
    ModulusBound { modulus: u64, bound: u64 },

    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("cache error: {0}")]
    Cache(String),
}

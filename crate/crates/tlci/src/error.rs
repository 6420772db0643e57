use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("interval: {0}")]
    Interval(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("line {line}: {msg}")]
    Word { line: usize, msg: String },
    #[error("automaton: {0}")]
    Automaton(String),
    #[error("position {0} out of range")]
    Position(usize),
    #[error("rewrite: {0}")]
    Rewrite(String),
    #[error("repair did not converge within {0} rounds")]
    RepairCap(usize),
    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.

use alloc::string::String;
use alloc::vec::Vec;

use crate::computation_dag::Violation;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument is out of its documented range.
    InvalidArgument(String),
    /// An edge set that must be acyclic contains a cycle.
    CyclicDependency,
    /// A scheduler was asked to choose a task but none is incomplete.
    EmptyChoice,
    /// A documented precondition does not hold.
    PreconditionViolation(String),
    /// An exact oracle refused to run because the instance exceeds its
    /// configured search-space bound.
    ResourceLimit(String),
    /// A computation DAG failed validation.
    InvalidPattern(Vec<Violation>),
    /// A vertex id not present in the computation DAG.
    UnknownVertex(usize),
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::CyclicDependency => write!(f, "task dependency graph contains a cycle"),
            Error::EmptyChoice => write!(f, "no incomplete task to choose from"),
            Error::PreconditionViolation(msg) => write!(f, "precondition violated: {msg}"),
            Error::ResourceLimit(msg) => write!(f, "resource limit exceeded: {msg}"),
            Error::InvalidPattern(violations) => {
                write!(f, "invalid computation pattern ({} violations)", violations.len())
            }
            Error::UnknownVertex(id) => write!(f, "unknown vertex id {id}"),
        }
    }
}

impl core::error::Error for Error {}

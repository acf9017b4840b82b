//! Permutations, permutation groups and the generator file format.

mod element;
mod group;
mod prm;

pub use element::{cycle_type_from_fixpoints, CycleType, Perm};
pub(crate) use group::is_transitive;
pub use group::{
    conjugacy_class_orbit, ClassWalk, ElementKey, PermGroup, RandomElements, StabChain,
};
pub use prm::{parse_prm, write_prm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PermError {
    #[error("permutation is not a bijection")]
    NotBijection,
    #[error("point {0} is out of range")]
    PointOutOfRange(usize),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("inconsistent fixed-point data: {0}")]
    InconsistentFixpoints(String),
    #[error("element is not in the group")]
    NotMember,
    #[error("class orbit exceeds the bound {0}")]
    BoundExceeded(usize),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

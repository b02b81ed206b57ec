use thiserror::Error;

/// Reasons an instance document is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("no root machine (every machine has a parent)")]
    MissingRoot,
    #[error("multiple roots: machines {0} and {1} have no parent")]
    MultipleRoots(usize, usize),
    #[error("cycle in parent links through machine {0}")]
    Cycle(usize),
    #[error("machine {machine} has unknown parent {parent}")]
    DanglingParent { machine: usize, parent: usize },
    #[error("job {job} has nonpositive size")]
    NonPositiveSize { job: usize },
    #[error("job {job} has unknown home machine {home}")]
    DanglingHome { job: usize, home: usize },
    #[error("duplicate {kind} id {id}")]
    DuplicateId { kind: &'static str, id: usize },
    #[error("{kind} ids are not dense: expected {expected}, found {found}")]
    NonDenseId { kind: &'static str, expected: usize, found: usize },
    #[error("unknown machine id {0}")]
    UnknownMachine(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("epsilon must be in (0,1]: {0}")]
    InvalidEpsilon(String),
    #[error("job of size {size} exceeds target {target}: infeasible at this C")]
    InfeasibleAtTarget { size: u64, target: u64 },
    #[error("tuple subtraction underflow: {0}")]
    TupleUnderflow(String),
    #[error("job {job} assigned to machine {machine}, which is off its home-to-root path")]
    OffPath { job: usize, machine: usize },
    #[error("schedule references unknown {kind} {id}")]
    UnknownId { kind: &'static str, id: usize },
    #[error("oracle node budget of {0} exhausted")]
    BudgetExceeded(u64),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

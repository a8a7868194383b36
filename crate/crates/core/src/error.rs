use thiserror::Error;

/// Which binary operation an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Join,
    Meet,
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Op::Join => f.write_str("join"),
            Op::Meet => f.write_str("meet"),
        }
    }
}

/// A lattice identity that can fail on concrete witnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Law {
    Idempotence,
    Commutativity,
    Associativity,
    Absorption,
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Law::Idempotence => "idempotence",
            Law::Commutativity => "commutativity",
            Law::Associativity => "associativity",
            Law::Absorption => "absorption",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element id {id} out of range for a structure with {n} elements")]
    IdOutOfRange { id: usize, n: usize },
    #[error("cover relation contains a cycle through {0:?}")]
    CycleDetected(Vec<usize>),
    #[error("cover pair ({0}, {1}) listed twice")]
    DuplicateCover(usize, usize),
    #[error("{op}({a}, {b}) is undefined")]
    UndefinedEntry { a: usize, b: usize, op: Op },
    #[error("{law} fails on {witnesses:?}")]
    LawViolation { law: Law, witnesses: Vec<usize> },
    #[error("constants invalid: {0}")]
    InvalidConstants(String),
    #[error("table has {got} entries, expected {expected}")]
    TableShape { expected: usize, got: usize },
    #[error("map is not injective: {0} and {1} share an image")]
    NotInjective(usize, usize),
    #[error("map length {got} does not match source size {expected}")]
    MapLength { expected: usize, got: usize },
    #[error("partial lattice carries no declared order")]
    NoOrderDeclared,
    #[error("no witness lattice supplied for extra element {0}")]
    WitnessMissing(usize),
    #[error("source is not a relative subalgebra of the parent")]
    NotRelative,
    #[error("union order is not antisymmetric; cycle {0:?}")]
    AntisymmetryFailure(Vec<usize>),
    #[error("amalgam verification failed: {0}")]
    VerificationFailure(String),
    #[error("map is not a sublattice embedding: {0}")]
    NotASublattice(String),
    #[error("constant-preserving maps disagree on constants")]
    ConstantsClash,
    #[error("size bound {k} exceeds the configured maximum {max}")]
    BoundTooLarge { k: usize, max: usize },
    #[error("[{a}, {b}] is not a nontrivial interval")]
    NotAnInterval { a: usize, b: usize },
    #[error("operation requires a {expected} chain, got {got}")]
    WrongVariety { expected: String, got: String },
    #[error("function is not monotone: f{lesser:?} is not below f{greater:?}")]
    MonotonicityViolation {
        lesser: Vec<usize>,
        greater: Vec<usize>,
    },
    #[error("prefix bounds differ: {0} vs {1}")]
    BoundMismatch(usize, usize),
    #[error("carrier label {label} exceeds prefix bound {bound}")]
    CarrierOutOfRange { label: u64, bound: usize },
    #[error("partial algebra admits no compatible order: {0}")]
    NotExtendable(String),
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("stage {stage}: {message}")]
    Validation { stage: usize, message: String },
    #[error("built stages exhausted after {reached} steps; more budget needed")]
    StagesExhausted { reached: usize },
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

use crate::codes::TriReport;
use crate::gf2::BinaryVector;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix parse error on line {line}: {message}")]
    MatrixParse { line: usize, message: String },

    #[error("rank {rank} exceeds the enumeration limit {limit}")]
    RankExceedsLimit { rank: usize, limit: usize },

    #[error("weight enumerator infeasible: rank {rank} and dual rank {dual_rank} both exceed limit {limit}")]
    EnumeratorInfeasible {
        rank: usize,
        dual_rank: usize,
        limit: usize,
    },

    #[error("weight enumerator entry does not fit in 128 bits")]
    EnumeratorOverflow,

    #[error("row space is not contained in the ambient space; witness {witness}")]
    NotContained { witness: BinaryVector },

    #[error("CSS dual containment violated: row {witness} of C2-perp is not in C1")]
    DualContainment { witness: BinaryVector },

    #[error("matrix is not triorthogonal ({} pair and {} triple violations)", .0.pair_violations.len(), .0.triple_violations.len())]
    NotTriorthogonal(Box<TriReport>),

    #[error("code encodes no logical qubits")]
    NoLogicalQubits,

    #[error("odd-weight rows are linearly dependent modulo the even-weight rows")]
    DependentLogicalRows,

    #[error("code shapes differ: {0}")]
    ShapeMismatch(String),

    #[error("mirror relation does not hold: {0}")]
    NotMirror(String),

    #[error("circuit has {qubits} qubits; the dense simulator supports at most {max}")]
    TooManyQubits { qubits: usize, max: usize },

    #[error("unitary simulation does not accept measurement gates (gate {index})")]
    MeasurementInUnitary { index: usize },

    #[error("invalid gate {index}: {message}")]
    InvalidGate { index: usize, message: String },

    #[error("circuit parse error on line {line}: {message}")]
    CircuitParse { line: usize, message: String },

    #[error("error vector has nonzero syndrome")]
    NonzeroSyndrome,

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("output-error map is the identity; no isolated fixed point")]
    DegenerateThreshold,

    #[error("no fixed point of the output-error map in (1e-6, 0.5)")]
    NoThresholdCrossing,

    #[error(
        "input error {p} is at or above the threshold {threshold}; iteration does not contract"
    )]
    AboveThreshold { p: f64, threshold: f64 },

    #[error("target not reached within {0} levels")]
    LevelCap(usize),

    #[error("(3k+8)p = {product} >= 1 for k = {k}, p = {p}; use a smaller p or a user-supplied code matrix")]
    OutsideValidityWindow { k: usize, p: f64, product: f64 },

    #[error("k = {0} outside the supported range 1..=50")]
    InvalidBlockSize(usize),

    #[error("target {target} unreachable from p0 = {p0}")]
    Unreachable { p0: f64, target: f64 },

    #[error("{0}")]
    InvalidArgument(String),
}

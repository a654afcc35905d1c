use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not of full column rank ({rows}x{cols}, rank {rank})")]
    NotFullColumnRank { rows: usize, cols: usize, rank: usize },

    #[error("cokernel is infinite: the matrix is singular")]
    InfiniteCokernel,

    #[error("transformation matrix is singular")]
    SingularTransform,

    #[error("modulus {0} is out of range")]
    InvalidModulus(String),

    #[error("index {index} out of range (valid: {valid})")]
    IndexOutOfRange { index: usize, valid: String },

    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("edge {0}->{1} is not an edge between mutable vertices of the reduced quiver")]
    EdgeNotFound(usize, usize),

    #[error("seed is not acyclic")]
    NotAcyclic,

    #[error("point is not on the variety (residual {residual:e})")]
    NotOnVariety { residual: f64 },

    #[error("coordinate z[{0}] is zero")]
    ZeroCoordinate(usize),

    #[error("character tuple does not live in the subgroup's ambient group: {0}")]
    AmbientMismatch(String),

    #[error("q = {0} is even; only odd primes are supported")]
    EvenPrime(u64),

    #[error("q = {0} is not prime")]
    NotPrime(u64),

    #[error("brute-force enumeration needs {needed} points, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("need {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("interpolated coefficient {0} is not an integer")]
    NonIntegralCoefficients(String),

    #[error("interpolated polynomial has degree {got} and leading coefficient {lead}, expected a monic polynomial of degree {expected}")]
    NotMonicOfDegree { expected: usize, got: usize, lead: String },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("holdout q = {q}: counted {counted}, polynomial predicts {predicted}")]
    HoldoutMismatch {
        q: u64,
        counted: String,
        predicted: String,
    },
}

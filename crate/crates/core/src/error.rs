use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{poly} is reducible over F_{p}")]
    Reducible { p: u64, poly: String },
    #[error("{c} is a quadratic residue mod {p}")]
    QuadraticResidue { p: u64, c: u64 },
    #[error("quadratic extensions of F_2 must be given by an irreducible with a linear term")]
    EvenCharacteristic,
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("F_{0} has no nontrivial cube root of unity (p is not 1 mod 3)")]
    NoCubeRoot(u64),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("construction unavailable: {0}")]
    NoConstruction(String),
    #[error("received word is not consistent with any codeword")]
    Inconsistent,
    #[error("parse error: {0}")]
    Parse(String),
}

use thiserror::Error;

/// Errors raised by exact computations in this crate.
///
/// `Parse` is a syntax problem in a polynomial/point string; everything else
/// is a violated mathematical precondition. The CLI maps the two classes to
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be >= 1")]
    BadExtensionDegree,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("xgcd of (0, 0) is undefined")]
    XgcdBothZero,
    #[error("irreducibility is undefined for constant polynomials")]
    ConstantPolynomial,
    #[error("degree bound must be nonnegative")]
    NegativeDegree,
    #[error("reconstruction bounds overlap: num_bound + den_bound must be < deg of the modulus")]
    BoundViolation,
    #[error("pair ({0}, {1}) is not coprime to the level")]
    NotCoprimeToLevel(String, String),
    #[error("operation requires a prime level")]
    NotPrimeLevel,
    #[error("operation requires a prime level of odd degree")]
    EvenDegreeLevel,
    #[error("operation requires level degree >= {0}")]
    LevelDegreeTooSmall(usize),
    #[error("basis does not match the level context: {0}")]
    BasisMismatch(String),
    #[error("no invertible eta_m of degree 1 on the parabolic block")]
    NoInvertibleEta,
    #[error("lattice did not stabilize at degree cap {0}")]
    Unstable(usize),
    #[error("monic polynomial required, got {0}")]
    NotMonic(String),
    #[error("zero polynomial is not a valid level or Hecke index")]
    ZeroIdeal,
}

pub type Result<T> = std::result::Result<T, Error>;

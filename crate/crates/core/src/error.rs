use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected degree {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("element is not homogeneous (degrees {degrees:?})")]
    NotHomogeneous { degrees: Vec<usize> },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("volume form must be a nonzero element of top degree {dim}")]
    BadVolume { dim: usize },

    #[error("structure constants violate the Jacobi identity at ({i}, {j}, {k})")]
    JacobiViolated { i: usize, j: usize, k: usize },

    #[error("bilinear form: {0}")]
    BadBilinearForm(String),

    #[error("twisted Poisson condition fails (closed: {closed}, condition: {condition})")]
    NotTwisted { closed: bool, condition: bool },

    #[error("not a chain complex: D∘D is nonzero at degree {degree}")]
    NotAComplex { degree: usize },

    #[error("element is not a cocycle in degree {degree}")]
    NotACocycle { degree: usize },

    #[error("structure is not unimodular")]
    NotUnimodular,

    #[error("gauge not invertible over polynomial ring: det(Id + B♭π♯) = {det}")]
    GaugeNotInvertible { det: String },

    #[error("volume form coefficient must be a nonzero constant")]
    NonConstantVolume,

    #[error("operator degree {degree} is not valid here: {reason}")]
    BadOperatorDegree { degree: i32, reason: &'static str },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

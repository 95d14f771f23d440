use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("degenerate zero at point `{point}`: tangent determinant vanishes")]
    Degenerate { point: String },

    #[error("zero determinant: the zero is degenerate, use the numeric residue oracle instead")]
    DegenerateResidue,

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("unknown symbol `{name}` at column {column}")]
    UnknownSymbol { name: String, column: usize },

    #[error("expression is not a polynomial: {0}")]
    NotPolynomial(String),

    #[error("Chern polynomial is not weighted-homogeneous of weight {expected}: term {term} has weight {found}")]
    Inhomogeneous {
        expected: usize,
        found: usize,
        term: String,
    },

    #[error("point `{point}` carries no bundle data (bundle_endo or line_weight)")]
    MissingBundleData { point: String },

    #[error("point `{point}` carries no twist weight")]
    MissingTwist { point: String },

    #[error("no numerator supplied for point `{point}`")]
    MissingNumerator { point: String },

    #[error("numerators carry inconsistent normalizations")]
    MixedNormalization,

    #[error("denominator nearly vanishes on the integration torus (min modulus {min:e}, scale {scale:e}); try a different radius")]
    NearZeroDenominator { min: f64, scale: f64 },

    #[error("non-finite value encountered during quadrature")]
    NonFinite,

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by malformed user input rather than by the computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Syntax { .. }
                | Error::UnknownSymbol { .. }
                | Error::NotPolynomial(_)
                | Error::Schema(_)
                | Error::InvalidArgument(_)
        )
    }
}

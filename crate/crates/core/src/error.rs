use thiserror::Error;

/// Failures of the symbolic algebra engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("polynomials live over different generator sets")]
    UniverseMismatch,
    #[error("generator `{0}` has degree 0; degree slices would be infinite")]
    DegreeZeroGenerator(String),
    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("cannot parse monomial `{0}`")]
    BadMonomial(String),
    #[error("value is not homogeneous")]
    Inhomogeneous,
    #[error("degree {degree} exceeds the working cap {cap}")]
    BeyondCap { degree: u32, cap: u32 },
    #[error("no element of degree {degree} has the required Steenrod action ({context})")]
    NoSolution { degree: u32, context: String },
    #[error("Steenrod action does not pin down an element of degree {degree} ({context}); ambiguity spanned by {ambiguity:?}")]
    Ambiguous {
        degree: u32,
        context: String,
        ambiguity: Vec<String>,
    },
    #[error("element is not in the image of the identification map in degree {0}")]
    NotInImage(u32),
    #[error("operation basis in degree {0} does not pair perfectly with the monomial basis")]
    DegeneratePairing(u32),
}

/// Failures while loading or querying a stems table.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("inconsistent table: {0}")]
    Inconsistent(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("degree {degree} is outside the table range 0..={range}")]
    OutOfRange { degree: i64, range: u32 },
    #[error("cannot parse element `{0}`")]
    BadElement(String),
    #[error("elements have different degrees ({0} and {1})")]
    DegreeMismatch(u32, u32),
    #[error("no bracket data for <{0}>")]
    NoBracketData(String),
    #[error("bracket <{bracket}> is undefined: {reason}")]
    BracketUndefined { bracket: String, reason: String },
    #[error("product needed for {0} is not tabulated")]
    UnknownProduct(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Failures of the characteristic builder.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error("oracle contradiction at stage {stage}: {message}")]
    Contradiction { stage: u32, message: String },
    #[error("cap {cap} exceeds the kernel data range {range} of target `{target}`")]
    CapBeyondData {
        cap: u32,
        range: u32,
        target: String,
    },
}

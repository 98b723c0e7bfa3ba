use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported order {order} for {family}")]
    UnsupportedOrder { family: &'static str, order: usize },
    #[error("derivative order {order} needs at least {required} vanishing moments, basis has {available}")]
    InsufficientSmoothness {
        order: usize,
        required: usize,
        available: usize,
    },
    #[error("length {0} is not a power of two")]
    NonDyadicLength(usize),
    #[error("shape {0}x{1} is not dyadic")]
    NonDyadicShape(usize, usize),
    #[error("size {0} is not a power of two")]
    NonDyadicSize(usize),
    #[error("{levels} levels requested but at most {max} are available")]
    TooManyLevels { levels: usize, max: usize },
    #[error("malformed coefficients: {0}")]
    MalformedCoefficients(String),
    #[error("unknown level {0}")]
    UnknownLevel(usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vector length {got} does not match operator size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("time step {dt} exceeds the stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },
    #[error("field norm grew by a factor {growth} between snapshots at t = {time}")]
    UnstableStep { time: f64, growth: f64 },
    #[error("hbar mismatch: wavefunction has {wavefunction}, requested {requested}")]
    InconsistentHbar { wavefunction: f64, requested: f64 },
    #[error("momentum grid with {0} points is not dyadic")]
    NonDyadicPGrid(usize),
    #[error("wavefunction norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("weights sum to {0}, expected 1")]
    WeightsNotNormalized(f64),
    #[error("quadrature under-resolved: Gram deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    QuadratureUnderResolved { deviation: f64, tolerance: f64 },
    #[error("unsupported nonlinearity: {0}")]
    UnsupportedNonlinearity(String),
    #[error("unsupported term: {0}")]
    UnsupportedTerm(String),
    #[error("denominator vanishes on the quadrature grid (min |den| = {0:.3e})")]
    PoleInDenominator(f64),
    #[error("singular system (condition estimate {0:.3e})")]
    SingularSystem(f64),
    #[error("Newton iteration diverged after {iterations} iterations, residual {residual:.3e}")]
    NewtonDiverged { iterations: usize, residual: f64 },
    #[error("empty field")]
    EmptyField,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

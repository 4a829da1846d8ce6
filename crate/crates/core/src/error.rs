use thiserror::Error;

/// Every failure a statorforge operation can report.
///
/// The `Display` form always starts with the variant name so that CLI users
/// and the C ABI see a stable, greppable token.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NotSquare: expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("NotNormal: commutator residual {residual:.3e} exceeds {bound:.3e}")]
    NotNormal { residual: f64, bound: f64 },

    #[error("NotHermitian: residual {residual:.3e} exceeds {bound:.3e}")]
    NotHermitian { residual: f64, bound: f64 },

    #[error("NotUnitary: {what} has unitarity residual {residual:.3e} (bound {bound:.3e})")]
    NotUnitary {
        what: String,
        residual: f64,
        bound: f64,
    },

    #[error("NotIsometry: residual {residual:.3e} exceeds {bound:.3e}")]
    NotIsometry { residual: f64, bound: f64 },

    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("NonFinite: matrix contains NaN or infinite entries")]
    NonFinite,

    #[error("InvalidTable: {0}")]
    InvalidTable(String),

    #[error("UnknownBuiltin: {0}")]
    UnknownBuiltin(String),

    #[error("IncompleteIrreps: {0}")]
    IncompleteIrreps(String),

    #[error("UnknownIrrep: {0}")]
    UnknownIrrep(String),

    #[error("IndexOutOfRange: {0}")]
    IndexOutOfRange(String),

    #[error("IncompleteKraus: completeness residual {residual:.3e} exceeds {bound:.3e}")]
    IncompleteKraus { residual: f64, bound: f64 },

    #[error("NotUnitaryChoice: {which} has unitarity residual {residual:.3e}")]
    NotUnitaryChoice { which: &'static str, residual: f64 },

    #[error("NotUnitaryElement: u[{index}] has unitarity residual {residual:.3e}")]
    NotUnitaryElement { index: usize, residual: f64 },

    #[error("NotNormalized: norm is {norm:.15}")]
    NotNormalized { norm: f64 },

    #[error("ZeroKraus: Kraus operator {0} vanishes")]
    ZeroKraus(usize),

    #[error("NotProportionalToUnitary: Kraus operator {index} has residual {residual:.3e}")]
    NotProportionalToUnitary { index: usize, residual: f64 },

    #[error("MismatchedAncilla: {0}")]
    MismatchedAncilla(String),

    #[error("TooLarge: {0}")]
    TooLarge(String),

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    #[error("Parse: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Largest |A - A†| entry.
    NotHermitian(f64),
    /// Observed trace.
    TraceNotOne(f64),
    /// Most negative eigenvalue.
    NegativeEigenvalue(f64),
    /// Largest |U†U - I| entry.
    NotUnitary(f64),
    DimensionMismatch { expected: usize, found: usize },
    IndexOutOfRange { index: usize, bound: usize },
    InvalidParameter(String),
    /// An oracle input was queried twice.
    RepeatedQuery(u32),
    /// The oracle was called on a register whose output half was not |0>.
    DirtyOracleRegister(f64),
    TooLarge(String),
    /// A path state fell below its guaranteed eigenvalue floor.
    SingularPathState { step: usize, min_eigenvalue: f64, floor: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian(d) => write!(f, "matrix is not Hermitian (max deviation {d:e})"),
            Error::TraceNotOne(t) => write!(f, "trace is {t}, expected 1"),
            Error::NegativeEigenvalue(l) => write!(f, "eigenvalue {l:e} is below the clamping tolerance"),
            Error::NotUnitary(d) => write!(f, "matrix is not unitary (max deviation {d:e})"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::IndexOutOfRange { index, bound } => {
                write!(f, "index {index} out of range (bound {bound})")
            }
            Error::InvalidParameter(s) => write!(f, "invalid parameter: {s}"),
            Error::RepeatedQuery(x) => write!(f, "oracle input {x} was already queried"),
            Error::DirtyOracleRegister(w) => {
                write!(f, "oracle called with nonzero output register (weight {w:e})")
            }
            Error::TooLarge(s) => write!(f, "size limit exceeded: {s}"),
            Error::SingularPathState { step, min_eigenvalue, floor } => write!(
                f,
                "path state {step} has eigenvalue {min_eigenvalue:e} below floor {floor:e}"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

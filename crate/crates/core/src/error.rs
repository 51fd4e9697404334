use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rotation parameter A must be finite and nonzero, got {0}")]
    DegenerateRotation(f64),
    #[error("operation is singular at r = {0}")]
    SingularPoint(f64),
    #[error("zero vector or covector")]
    ZeroVector,
    #[error("point is off the characteristic set (|p| = {0:e})")]
    OffCharacteristicSet(f64),
    #[error("ray is string-bound (A tau + eta = 0)")]
    StringBound,
    #[error("ray is not string-bound (A tau + eta = {0:e})")]
    NotStringBound(f64),
    #[error("ray is outgoing; expected incoming orientation")]
    OutgoingOrientation,
    #[error("trajectory is not oriented forward in time")]
    Unoriented,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("ODE step size underflow at parameter {0}")]
    StepUnderflow(f64),
    #[error("input does not decay at the grid boundary (|f| = {0:e})")]
    NonDecaying(f64),
    #[error("argument out of the supported range: {0}")]
    Range(&'static str),
    #[error("quadrature disagrees with closed form by {0:e}")]
    QuadratureMismatch(f64),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, FinslerError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FinslerError {
    #[error("non-smooth point: {0}")]
    NonSmoothPoint(String),
    #[error("metric `{0}` has no exact Taylor evaluator")]
    NotDifferentiable(String),
    #[error("point lies outside the body")]
    PointOutsideBody,
    #[error("ray does not meet the boundary")]
    UnboundedRay,
    #[error("operation requires a bounded body")]
    UnboundedBody,
    #[error("origin is not an interior point of the norm body")]
    OriginNotInterior,
    #[error("1-form has norm {norm} >= 1 at probe {probe:?}")]
    FormTooLarge { norm: f64, probe: Vec<f64> },
    #[error("wind field has F(x, Z(x)) = {speed} >= 1")]
    WindTooStrong { speed: f64 },
    #[error("fundamental tensor is not positive definite (min eigenvalue {min_eigenvalue})")]
    NotStronglyConvex { min_eigenvalue: f64 },
    #[error("fundamental tensor is singular")]
    SingularFundamentalTensor,
    #[error("curve leaves the domain at t = {t}")]
    CurveLeavesDomain { t: f64 },
    #[error("segment leaves the domain")]
    SegmentLeavesDomain,
    #[error("Lagrangian vanishes along direction {0:?}")]
    DegenerateDirection(Vec<f64>),
    #[error("escaping direction: F(p, xi) = 0")]
    EscapingDirection,
    #[error("point lies outside the unit ball")]
    OutsideUnitBall,
    #[error("boundary reached at s = {s}")]
    BoundaryReached { s: f64, x: Vec<f64>, y: Vec<f64> },
    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },
    #[error("metric is weak: it vanishes on some directions")]
    WeakMetric,
    #[error("Lagrangian vanishes")]
    ZeroLagrangian,
    #[error("degenerate flag: {0}")]
    DegenerateFlag(String),
    #[error("stationary point: derivative vanishes")]
    StationaryPoint,
    #[error("metric is not projectively flat (residual {residual:e})")]
    NotProjectivelyFlat { residual: f64 },
    #[error("inconsistent boundary data: {0}")]
    InconsistentBoundaryData(String),
    #[error("zero vector where a nonzero vector is required")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid derivative request: {0}")]
    InvalidRequest(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl FinslerError {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            FinslerError::SingularFundamentalTensor
                | FinslerError::StepUnderflow { .. }
                | FinslerError::NotStronglyConvex { .. }
                | FinslerError::Numerical(_)
                | FinslerError::NonSmoothPoint(_)
                | FinslerError::StationaryPoint
        )
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(FinslerError::DimensionMismatch { expected, got })
    }
}

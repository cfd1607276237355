use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative discriminant: no real point with traces x={x}, y={y}")]
    NegativeDiscriminant { x: f64, y: f64 },
    #[error("non-hyperbolic trace {0} (must exceed 2)")]
    NonHyperbolic(f64),
    #[error("point ({x}, {y}, {z}) is off the Markov surface (residual {residual:e})")]
    OffSurface { x: f64, y: f64, z: f64, residual: f64 },
    #[error("invalid slope ({p}, {q})")]
    InvalidSlope { p: i64, q: i64 },
    #[error("length cutoff {0} is below the systole; no geodesic qualifies")]
    CutoffTooSmall(f64),
    #[error("chart fold 2z = xy: implicit derivative undefined")]
    BranchSingularity,
    #[error("constraint gradient vanishes")]
    DegenerateConstraint,
    #[error("retraction diverged after {0} iterations")]
    RetractionDiverged(usize),
    #[error("normalization stalled after {0} iterations")]
    NormalizationStalled(usize),
    #[error("slope tree exceeded {0} nodes")]
    NodeCapExceeded(usize),

    #[error("T = {0} outside (0, 1)")]
    InvalidT(f64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("tail tolerance unreachable below cutoff cap {0}")]
    CutoffCapExceeded(f64),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("both feasibility margins below tolerance")]
    ToleranceAmbiguous,
    #[error("direction has zero projection onto the span")]
    PerpendicularInput,
    #[error("configuration is not semi-eutactic")]
    NotSemiEutactic,
    #[error("point is not eutactic")]
    NotEutactic,

    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("degenerate Hessian: eigenvalue {0:e}")]
    DegenerateHessian(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pairing sum not converged: last shell {last_shell:e} of total {total:e}")]
    NotConverged { last_shell: f64, total: f64 },
    #[error("length differentials nearly parallel (condition {0:e})")]
    BasisDegenerate(f64),

    #[error("adaptive step collapsed below {0:e}")]
    StepCollapse(f64),
    #[error("only {found} samples in the decay window, need {needed}")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("boundary composite in degree {degree} has {entries} nonzero entries")]
    NotAComplex { degree: usize, entries: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of an iterative method rather than of the input.
    pub fn is_no_convergence(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence(_)
                | Error::NotConverged { .. }
                | Error::RetractionDiverged(_)
                | Error::NormalizationStalled(_)
                | Error::StepCollapse(_)
                | Error::CutoffCapExceeded(_)
                | Error::DegenerateHessian(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

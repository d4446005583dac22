use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cannot invert a series whose leading coefficient is zero")]
    LeadingZero,
    #[error("linear system is singular (rank {rank} < {unknowns} unknowns)")]
    Singular { rank: usize, unknowns: usize },
    #[error("overdetermined linear system is inconsistent")]
    Inconsistent,
    #[error("weight {0} is odd")]
    OddWeight(i64),
    #[error("element is not homogeneous in weight")]
    Inhomogeneous,
    #[error("imaginary part {im} is below the floor {floor}")]
    LowImaginaryPart { im: f64, floor: f64 },
    #[error("Hecke image could not be reconstructed: {0}")]
    ReconstructionFailed(String),
    #[error("point lies on (or too close to) the discriminant locus: |delta| = {0:e}")]
    OnDiscriminant(f64),
    #[error("integrator could not reach tolerance at s = {s} (step {step:e})")]
    StepFailure { s: f64, step: f64 },
    #[error("roots of the cubic are not separated (min gap {0:e})")]
    RootSeparationFailure(f64),
    #[error("trajectory approached the singular locus of the vector field at s = {0}")]
    SingularApproach(f64),
    #[error("trajectory approached the discriminant at s = {s}: |delta| = {delta:e}")]
    DiscriminantApproach { s: f64, delta: f64 },
    #[error("degenerate scale factor c4 z - c2 = 0 or (c2, c4) = (0, 0)")]
    DegenerateScale,
    #[error("G0 action needs a nonzero scale k")]
    ZeroScale,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

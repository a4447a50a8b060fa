use thiserror::Error;

/// Errors raised by the kinematics, transport and frame routines.
///
/// Residual-carrying variants report the measured violation so callers can
/// log or surface it without recomputing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite component in input")]
    NonFinite,
    #[error("frame is singular (|det| = {det:e})")]
    SingularFrame { det: f64 },
    #[error("frame is not orthonormal (residual {residual:e})")]
    NotOrthonormal { residual: f64 },
    #[error("vector is not unit timelike (x.x = {norm})")]
    NotUnitTimelike { norm: f64 },
    #[error("vector is past pointing (x^0 = {time})")]
    PastPointing { time: f64 },
    #[error("antipodal timelike pair, 1 + gamma = {value:e}")]
    AntipodalDegenerate { value: f64 },
    #[error("relative Lorentz factor {gamma:e} exceeds the supported range")]
    ExtremeRapidity { gamma: f64 },
    #[error("tetrad does not match the boost source (residual {residual:e})")]
    FrameMismatch { residual: f64 },
    #[error("matrix is not a Lorentz transformation (residual {residual:e})")]
    NotLorentz { residual: f64 },
    #[error("matrix does not fix the given four-velocity as a rotation (residual {residual:e})")]
    NotARotationAboutU { residual: f64 },
    #[error("matrix is not orthogonal (residual {residual:e})")]
    NotOrthogonal { residual: f64 },
    #[error("matrix is not antisymmetric (residual {residual:e})")]
    NotAntisymmetric { residual: f64 },
    #[error("radius must be positive, got {r}")]
    ZeroRadius { r: f64 },
    #[error("velocity increment is not orthogonal to u (u.du = {residual:e})")]
    NotOrthogonalIncrement { residual: f64 },
    #[error("worldline sample at s = {s} violates u.udot = 0 (residual {residual:e})")]
    InconsistentWorldline { s: f64, residual: f64 },
    #[error("gamma = {gamma} inconsistent with |beta| = {beta}")]
    InconsistentGamma { gamma: f64, beta: f64 },
    #[error("spectrum is degenerate (Delta = {delta:e})")]
    DegenerateSpectrum { delta: f64 },
    #[error("curvature vanishes (a = {a:e})")]
    ZeroCurvature { a: f64 },
    #[error("rotation rate omega vanishes")]
    ZeroOmega,
    #[error("mixing parameter Lambda vanishes")]
    ZeroLambda,
    #[error("torsion vanishes (tau = {tau:e}); third curvature undefined")]
    DegenerateTorsion { tau: f64 },
    #[error("a*tau = {value:e} must be nonzero")]
    HypothesisViolated { value: f64 },
    #[error("chart velocities are not pairwise distinct")]
    DegenerateTriple,
    #[error("base field is not in the span of the generators (residual {residual:e})")]
    NotInSpan { residual: f64 },
    #[error("adaptive step {step:e} underflowed at s = {s}")]
    StepUnderflow { s: f64, step: f64 },
    #[error("integration produced a non-finite state at s = {s}")]
    NonFiniteState { s: f64 },
    #[error("frame too far from orthonormal to renormalize (residual {residual:e})")]
    TooFarFromOrthonormal { residual: f64 },
    #[error("invariant drift {drift:e} exceeded threshold {threshold:e} at s = {s}")]
    DriftExceeded { s: f64, drift: f64, threshold: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

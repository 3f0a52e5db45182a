use thiserror::Error;

/// Errors raised by the geometry, spectral and resonance routines.
///
/// Every variant carries enough context to be reported on its own; the CLI
/// prints the variant name followed by the message.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no interval (r_-, r_+) with Delta_r > 0 for M0={m0}, Lambda={lambda}, a={a}")]
    NoHorizonRegion { m0: f64, lambda: f64, a: f64 },

    #[error("horizon roots {r1} and {r2} are too close to be resolved")]
    DegenerateHorizon { r1: f64, r2: f64 },

    #[error("Kerr-star slack condition fails: minimum {min_slack:e} at r={r}")]
    SlackViolated { min_slack: f64, r: f64 },

    #[error("boundary series at the {end} end did not stabilise (radius estimates {estimates:?})")]
    SeriesDivergence { end: char, estimates: Vec<f64> },

    #[error("x={x} is outside the domain of the boundary series (|Re x| <= {x0})")]
    OutsideDomain { x: f64, x0: f64 },

    #[error("angular basis of size {n} too small: branch l={l} moved by {shift:e} under doubling")]
    BasisTooSmall { n: usize, l: usize, shift: f64 },

    #[error("angular branches collide near lambda={lambda} (separation {separation:e})")]
    BranchCollision { lambda: String, separation: f64 },

    #[error("outgoing series tail not converged at the {end} end with {n} terms (tail ratio {tail:e})")]
    TailNotConverged { end: char, n: usize, tail: f64 },

    #[error("ODE integration failed: step size underflow at x={x}")]
    ToleranceNotMet { x: f64 },

    #[error("Wronskian too small for the radial Green operator: |W|/scale = {ratio:e}")]
    NearResonance { ratio: f64 },

    #[error("Newton/secant iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("iterate {omega} left the search box")]
    EscapedBox { omega: String },

    #[error("|D| dropped to {value:e} on the contour near {omega}; a zero sits on the boundary")]
    BoundaryTooClose { omega: String, value: f64 },

    #[error("trapping classification ambiguous: max V0 = {max_v:e}, delta_V = {delta_v:e}")]
    AmbiguousCase { max_v: f64, delta_v: f64 },

    #[error("angular branch is degenerate; the residue sum is undefined")]
    DegenerateBranch,

    #[error("zero-frequency extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),

    #[error("contour passes within {distance:e} of an eigenvalue")]
    ContourThroughSpectrum { distance: f64 },

    #[error("contour does not separate the spectrum of B from that of -A")]
    ContourSeparation,

    #[error("time step {dt} violates the CFL bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("time-domain evolution supports a = 0 only (got a={0})")]
    NonzeroSpinUnsupported(f64),

    #[error("ringdown fit residual {residual:.3} exceeds 10% of the signal energy")]
    PoorFit { residual: f64 },
}

impl Error {
    /// Short variant name, used as the error label on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NoHorizonRegion { .. } => "NoHorizonRegion",
            Error::DegenerateHorizon { .. } => "DegenerateHorizon",
            Error::SlackViolated { .. } => "SlackViolated",
            Error::SeriesDivergence { .. } => "SeriesDivergence",
            Error::OutsideDomain { .. } => "OutsideDomain",
            Error::BasisTooSmall { .. } => "BasisTooSmall",
            Error::BranchCollision { .. } => "BranchCollision",
            Error::TailNotConverged { .. } => "TailNotConverged",
            Error::ToleranceNotMet { .. } => "ToleranceNotMet",
            Error::NearResonance { .. } => "NearResonance",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::EscapedBox { .. } => "EscapedBox",
            Error::BoundaryTooClose { .. } => "BoundaryTooClose",
            Error::AmbiguousCase { .. } => "AmbiguousCase",
            Error::DegenerateBranch => "DegenerateBranch",
            Error::ExtrapolationUnstable(_) => "ExtrapolationUnstable",
            Error::ContourThroughSpectrum { .. } => "ContourThroughSpectrum",
            Error::ContourSeparation => "ContourSeparation",
            Error::CflViolation { .. } => "CFLViolation",
            Error::NonzeroSpinUnsupported(_) => "NonzeroSpinUnsupported",
            Error::PoorFit { .. } => "PoorFit",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported presentation: {0}")]
    UnsupportedPresentation(String),

    #[error("resource budget exceeded after completing radius {completed_radius} ({vertices} vertices)")]
    ResourceExceeded { completed_radius: usize, vertices: usize },

    #[error("radius too small: need {needed}, window has {have}")]
    RadiusTooSmall { needed: usize, have: usize },

    #[error("membership undecided; a window of radius {required_radius} is required")]
    MembershipUnknown { required_radius: usize },

    #[error("no admissible triangle in a window of radius {0}")]
    NoAdmissibleTriangle(usize),

    #[error("subgroup {0} has fewer than two elements in the window")]
    TooFewSubgroupElements(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("degenerate syllable {index}: factor lies in the amalgamated subgroup")]
    DegenerateSyllable { index: usize },

    #[error("syllable {index} is not a shortest coset representative; normalize first")]
    NormalizeFirst { index: usize },

    #[error("local-to-global search inconclusive: {0}")]
    LocalToGlobal(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

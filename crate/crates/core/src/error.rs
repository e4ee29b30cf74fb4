use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("degenerate polynomial: {0}")]
    DegeneratePolynomial(&'static str),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// `d1 d2 - t1 t2` vanishes; the bulk quartic drops degree.
    #[error("singular quartic: d1*d2 - t1*t2 = 0")]
    SingularQuartic,

    #[error("eigensolver did not converge for a {size}x{size} matrix")]
    NoConvergence { size: usize },

    #[error("root structure: {0}")]
    RootStructure(String),

    /// The Bistritz recursion met a pattern outside the regular and
    /// singular cases it handles.
    #[error("unsupported Bistritz structure at level {level}: {detail}")]
    UnsupportedBistritz { level: usize, detail: String },

    #[error("removable singularity: cos(alpha) = cos(beta)")]
    RemovableSingularity,

    #[error("no zero mode for these parameters")]
    NoZeroMode,

    #[error("lambda is not on an infinite-size curve: no equal-modulus root pair")]
    NotOnCurve,
}

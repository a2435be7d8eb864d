use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ground-set sizes differ: {left} vs {right}")]
    SizeMismatch { left: u32, right: u32 },

    #[error("point {point} is outside 1..={n}")]
    OutOfRange { point: u32, n: u32 },

    #[error("mapping is not injective: {detail}")]
    NotInjective { detail: String },

    #[error("ground-set size must be at least 1")]
    ZeroSize,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("element cap {cap} exceeded during closure")]
    CapExceeded { cap: usize },

    #[error("rank search cap exceeded; rank is between {lower} and {upper}")]
    SearchCapExceeded { lower: usize, upper: usize },

    #[error("not an element of the enumerated monoid: {element}")]
    NotAnElement { element: String },

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("the empty map extends to every cycle power, so its exponent is ambiguous")]
    AmbiguousExtension,

    #[error("element is not a restriction of a cycle power: {element}")]
    NotARestriction { element: String },

    #[error("element is not order-preserving: {element}")]
    NotOrderPreserving { element: String },

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("letter {letter} has no assigned value")]
    UnassignedLetter { letter: String },

    #[error("letter {letter} is not in the alphabet")]
    ForeignLetter { letter: String },

    #[error("defining word for {letter} mentions an eliminated letter")]
    CyclicSubstitution { letter: String },

    #[error(
        "enumeration incomplete: {live_states} live states and {steps} steps \
         (caps: {max_states} states, {max_steps} steps)"
    )]
    IncompleteEnumeration {
        live_states: usize,
        steps: u64,
        max_states: usize,
        max_steps: u64,
    },

    #[error("assigned images do not generate the target monoid")]
    NotGenerating,
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("simple reflection index {index} out of range 1..={rank}")]
    BadSimpleIndex { index: usize, rank: usize },

    #[error("invalid permutation: {0}")]
    BadPermutation(String),

    #[error("diagram automorphism does not preserve the Cartan matrix: {0}")]
    BadAutomorphism(String),

    #[error("unsupported Cartan type {0:?}")]
    UnsupportedType(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("({v}, {mu}, {w}) is not a normal form: t^mu w is not minimal in its coset")]
    InvalidNormalForm { v: String, mu: String, w: String },

    #[error("translation part {0} of the normal form is not dominant")]
    NonDominantTranslation(String),

    #[error("element is not superregular: {0}")]
    NotSuperregular(String),

    #[error("twisted (non-identity) diagram automorphisms are not supported here")]
    TwistedUnsupported,

    #[error("malformed slopes: {0}")]
    MalformedSlopes(String),

    #[error("classes are not comparable in the dominance order: {0} vs {1}")]
    NotComparable(String, String),

    #[error("enumeration limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("Kottwitz points differ: {0} vs {1}")]
    KappaMismatch(String, String),

    #[error("generic classes of sx and sx\u{3c3}(s) are incomparable: {0} vs {1}")]
    IncomparableTops(String, String),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("invalid sampler configuration: {0}")]
    BadSamplerConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use std::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// A violated lemma precondition. Carries the offending value where there is one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Precondition {
    EmptyOperand,
    ZeroNotInB,
    /// An element of `B ∖ {0}` shares a factor with the modulus.
    NotCoprime {
        element: u64,
        modulus: u64,
    },
    ModulusTooSmall {
        modulus: u64,
    },
    ModulusPrime {
        modulus: u64,
    },
    /// `q` must share a factor with the modulus.
    QCoprime {
        q: u64,
        modulus: u64,
    },
    /// `b` is neither `0`, `q̄`, nor a unit.
    ElementNotAllowed {
        element: u64,
    },
    /// `|A + {0, q̄}| ≥ |A| + 1` failed.
    NoGrowth {
        size: usize,
        grown: usize,
    },
    ShiftIsZero,
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Precondition::EmptyOperand => write!(f, "operand is empty"),
            Precondition::ZeroNotInB => write!(f, "0 is not in B"),
            Precondition::NotCoprime { element, modulus } => {
                write!(f, "{element} is not coprime to {modulus}")
            }
            Precondition::ModulusTooSmall { modulus } => {
                write!(f, "modulus {modulus} is too small")
            }
            Precondition::ModulusPrime { modulus } => write!(f, "modulus {modulus} is prime"),
            Precondition::QCoprime { q, modulus } => {
                write!(f, "q = {q} is coprime to {modulus}")
            }
            Precondition::ElementNotAllowed { element } => {
                write!(f, "{element} is neither 0, q nor a unit")
            }
            Precondition::NoGrowth { size, grown } => {
                write!(f, "|A + {{0, q}}| = {grown} < |A| + 1 = {}", size + 1)
            }
            Precondition::ShiftIsZero => write!(f, "shift is 0 modulo n"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("integer overflow in {op}")]
    Overflow { op: &'static str },
    #[error("{op} requires a nonempty set")]
    EmptySet { op: &'static str },
    #[error("invalid modulus {modulus}")]
    InvalidModulus { modulus: i64 },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("residue {residue} out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },
    #[error("class index {index} out of range 1..={classes}")]
    ClassIndexOutOfRange { index: usize, classes: usize },
    #[error("set does not match the decomposition's source set")]
    SourceMismatch,
    #[error("{lemma}: precondition violated: {violation}")]
    Precondition {
        lemma: &'static str,
        violation: Precondition,
    },
    #[error("{lemma}: not applicable: {reason}")]
    NotApplicable { lemma: &'static str, reason: String },
    #[error("k = {k} is outside the scope of {what}")]
    OutOfScope { k: i64, what: &'static str },
    #[error("{what} requires odd k, got {k}")]
    EvenModulus { k: i64, what: &'static str },
    #[error("moduli {n} and {m} are not coprime")]
    NotCoprime { n: i64, m: i64 },
    #[error("invalid coefficients: {0}")]
    InvalidForm(String),
    #[error("exhaustive search needs {candidates} candidate sets (universe {universe}, size up to {size}), budget is {budget}")]
    BudgetExceeded {
        universe: u64,
        size: usize,
        candidates: String,
        budget: u64,
    },
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    #[error("unknown bound '{0}'")]
    UnknownBound(String),
    #[error("line {line}: cannot parse '{content}' as an integer")]
    Parse { line: usize, content: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn overflow(op: &'static str) -> Self {
        Error::Overflow { op }
    }

    pub(crate) fn precondition(lemma: &'static str, violation: Precondition) -> Self {
        Error::Precondition { lemma, violation }
    }

    pub(crate) fn not_applicable(lemma: &'static str, reason: impl Into<String>) -> Self {
        Error::NotApplicable {
            lemma,
            reason: reason.into(),
        }
    }
}

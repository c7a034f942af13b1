use thiserror::Error;

/// Errors produced by the core operations.
///
/// `Internal` means a consistency check that should be unfalsifiable for
/// valid inputs has failed (a table bug or an implementation bug), as opposed
/// to a rejected input.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("ring order {order} exceeds the order cap {cap}")]
    OrderCapExceeded { order: usize, cap: usize },

    #[error("{what} requires ring order <= {cap}, got {order}")]
    EnumerationCapExceeded {
        what: &'static str,
        order: usize,
        cap: usize,
    },

    #[error("degree bound {requested} exceeds the degree cap {cap}")]
    DegreeCapExceeded { requested: usize, cap: usize },

    #[error("ring axiom `{law}` fails at ({a}, {b}, {c})")]
    RingAxiom {
        law: &'static str,
        a: usize,
        b: usize,
        c: usize,
    },

    #[error("raw tables are malformed: {reason}")]
    MalformedTables { reason: String },

    #[error("quotient requires a proper two-sided ideal: {reason}")]
    BadQuotient { reason: &'static str },

    #[error("derivation law `{law}` fails at ({a}, {b})")]
    DerivationViolation {
        law: &'static str,
        a: usize,
        b: usize,
    },

    #[error("ideal is not delta-stable: delta({witness}) escapes")]
    NotDeltaStable { witness: usize },

    #[error("operands belong to different contexts")]
    ContextMismatch,

    #[error("divisor is not monic")]
    NotMonic,

    #[error("{0} is not a field")]
    NotAField(String),

    #[error("modulus is reducible: zero divisor pair ({a}, {b}) in the quotient")]
    ReducibleModulus { a: usize, b: usize },

    #[error("ideal is not eligible for the coefficient projection: {reason}")]
    PhiIneligible { reason: &'static str },

    #[error("operation requires a quasi-duo instance, but the verdict is no")]
    NotQuasiDuo,

    #[error("degree-bounded closure did not stabilize at dmax {dmax}; raise dmax")]
    ClosureNotStabilized { dmax: usize },

    #[error("degree-bounded closure slice is too large to materialize ({ambient} candidate polynomials)")]
    ClosureTooLarge { ambient: u128 },

    #[error("generators do not cut a maximal ideal: {reason}")]
    NotMaximal { reason: String },

    #[error("quasi-regular iteration exceeded the cap {cap}: precondition violated")]
    QuasiRegularCapExceeded { cap: usize },

    #[error("coefficient {label} lies outside the radical intersection K")]
    CoefficientOutsideK { label: String },

    #[error("element label `{0}` does not resolve in this ring")]
    UnknownLabel(String),

    #[error("gf parameters must be a prime power: {0}")]
    NotPrimePower(String),

    #[error("internal invariant failure: {0}")]
    Internal(String),
}

impl Error {
    /// Whether this error indicates an internal inconsistency rather than a
    /// rejected input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

use thiserror::Error;

use crate::pade::PadeIndex;
use crate::universal::UniversalityCertificate;

pub type Result<T> = std::result::Result<T, PadeError>;

#[derive(Debug, Error)]
pub enum PadeError {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("center mismatch: {left} vs {right} (recenter first)")]
    CenterMismatch { left: String, right: String },

    #[error("insufficient series order: coefficient a_{required} required")]
    InsufficientOrder { required: usize },

    #[error("denominator vanishes at the expansion center ({modulus:e})")]
    NearPole { modulus: f64 },

    #[error("series is not in the existence class for [{p}/{q}] (|det| = {det_abs:e}, scale = {scale:e})")]
    NotInExistenceClass { p: usize, q: usize, det_abs: f64, scale: f64 },

    #[error("singular denominator system for [{p}/{q}] (|det| = {det_abs:e}, scale = {scale:e})")]
    SingularSystem { p: usize, q: usize, det_abs: f64, scale: f64 },

    #[error("jacobi route limited to q <= {max_q}, got q = {q}")]
    JacobiOrderTooLarge { q: usize, max_q: usize },

    #[error("region '{0}' is empty")]
    EmptyRegion(String),

    #[error("invalid region '{label}': {reason}")]
    InvalidRegion { label: String, reason: String },

    #[error("regions '{a}' and '{b}' overlap (distance {distance:e} <= margin {margin:e})")]
    RegionsOverlap { a: String, b: String, distance: f64, margin: f64 },

    #[error("fit budget {budget:e} unreachable: best error {best_error:e} at degree {at_degree}")]
    BudgetUnreachable { best_error: f64, at_degree: usize, budget: f64 },

    #[error("index family exhausted: no witness with p > {min_p}")]
    FamilyExhausted { min_p: usize },

    #[error("invalid index family: {0}")]
    InvalidFamily(String),

    #[error("certification failed for [{p}/{q}]: {reason}", p = .0.p, q = .0.q, reason = .0.failure_summary())]
    CertificationFailed(Box<UniversalityCertificate>),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<PadeError>,
    },

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error("{operation}{}{}: {source}", index_note(.index), region_note(.region))]
    Context {
        operation: &'static str,
        index: Option<PadeIndex>,
        region: Option<String>,
        #[source]
        source: Box<PadeError>,
    },
}

fn index_note(index: &Option<PadeIndex>) -> String {
    index.map(|i| format!(" {i}")).unwrap_or_default()
}

fn region_note(region: &Option<String>) -> String {
    region.as_ref().map(|r| format!(" on region '{r}'")).unwrap_or_default()
}

/// Process exit codes used by the command-line front end.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CERTIFICATION: i32 = 2;
    pub const INPUT: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

impl PadeError {
    /// True for failures caused by conditioning rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            PadeError::NearPole { .. }
            | PadeError::NotInExistenceClass { .. }
            | PadeError::SingularSystem { .. }
            | PadeError::Numerical(_) => true,
            PadeError::Stage { source, .. } | PadeError::Context { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn is_certification(&self) -> bool {
        match self {
            PadeError::CertificationFailed(_)
            | PadeError::FamilyExhausted { .. }
            | PadeError::BudgetUnreachable { .. } => true,
            PadeError::Stage { source, .. } | PadeError::Context { source, .. } => source.is_certification(),
            _ => false,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_certification() {
            exit::CERTIFICATION
        } else if self.is_numerical() {
            exit::NUMERICAL
        } else {
            exit::INPUT
        }
    }

    /// The failing certificate, if this error carries one.
    pub fn certificate(&self) -> Option<&UniversalityCertificate> {
        match self {
            PadeError::CertificationFailed(c) => Some(c),
            PadeError::Stage { source, .. } | PadeError::Context { source, .. } => source.certificate(),
            _ => None,
        }
    }

    pub fn context(self, operation: &'static str, index: Option<PadeIndex>, region: Option<&str>) -> Self {
        PadeError::Context { operation, index, region: region.map(str::to_owned), source: Box::new(self) }
    }
}

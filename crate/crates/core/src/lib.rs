//! Hard-margin support vector machines and the Radon-type geometry of their
//! support vectors.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: dense rank, null space, linear solves, projections.
//! * [`lp`]: phase-one simplex with Bland's rule, used for every
//!   convex-hull and separability decision.
//! * [`geometry`]: Radon partitions, hull intersection witnesses, general
//!   position predicates, the equidistant simplex.
//! * [`svm`]: dual training by pairwise coordinate ascent, a brute-force
//!   active-set oracle, KKT auditing.
//! * [`analysis`]: projected Radon points, configuration reports,
//!   perturbation stability, shattering and the precision audit.
//! * [`experiments`]: the two-Gaussian Monte Carlo census.

pub mod analysis;
pub mod experiments;
pub mod geometry;
pub mod lp;
pub mod numerics;
pub mod sampling;
pub mod svm;

use serde::Serialize;

pub use analysis::{ConfigurationReport, PrecisionAudit, PrecisionCause};
pub use experiments::{CensusResult, ExperimentConfig};
pub use geometry::{HullWitness, PointSet, RadonCertificate};
pub use numerics::Matrix;
pub use svm::{KktReport, LabeledPointSet, SvmSolution, TrainParams};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate hyperplane")]
    DegenerateHyperplane,
    #[error("singular system")]
    SingularSystem,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("too few points for Radon's theorem: need {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("audit too large: {pairs} subset pairs exceeds the budget of {budget}")]
    AuditTooLarge { pairs: u128, budget: u128 },
    #[error("simplex method exceeded {0} pivots")]
    LpIterationLimit(usize),
    #[error("both classes must be nonempty")]
    EmptyClass,
    #[error("not linearly separable")]
    NotLinearlySeparable,
    #[error("iteration budget of {max_iter} pair updates exhausted (KKT violation {violation:e})")]
    IterationLimit {
        max_iter: usize,
        violation: f64,
        best: Box<SvmSolution>,
        report: Box<KktReport>,
    },
    #[error("not an SVM solution: KKT residual {residual:e} exceeds {tol:e}")]
    NotAnSvmSolution { residual: f64, tol: f64 },
    #[error("combinatorial guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("separability rejection limit of {0} redraws reached")]
    RejectionLimit(usize),
}

/// Outcome of a predicate that can name a counterexample.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "snake_case")]
pub enum Verdict<W> {
    Holds,
    Violated(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(w) => Some(w),
        }
    }
}

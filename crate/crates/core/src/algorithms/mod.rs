//! Allocation procedures.
//!
//! Each procedure re-checks the guarantee it is supposed to deliver before
//! returning. A failed check is reported as [`AlgorithmError::TheoremViolation`]
//! carrying the instance and the procedure's trace; it is never swallowed.
//!
//! All argmin/argmax choices break ties towards the lowest input index.

mod approx_wefx;
mod chore_rr;
mod envy_cycle;
mod envy_graph;
mod integer_wefx;

use std::fmt;

use thiserror::Error;

use crate::model::{Instance, Kind, ModelError};
use crate::numeric::Scalar;

pub use approx_wefx::{approx_wefx, less_than_alpha_times, ApproxCase, ApproxTrace, LemmaCheck};
pub use chore_rr::{chore_round_robin, Pick, PickTrace};
pub use envy_cycle::{common_order, envy_cycle_weighted, envy_cycle_weighted_with, EnvyCycleOptions, EnvyCycleRun, Mode, Rotation};
pub use envy_graph::{envy_graph, EnvyGraph};
pub use integer_wefx::{greedy_partition, icyc_integer_wefx, partition_lemma_violations, IcycRun};

/// A runtime guarantee failed. If the implementation is right this is a
/// counterexample to the claim named in `claim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremViolation {
    pub claim: String,
    pub detail: String,
    /// The instance in the command-line JSON format.
    pub instance: String,
    pub trace: String,
    /// The offending (possibly partial) bundles, when there are any.
    pub bundles: Option<Vec<Vec<usize>>>,
}

impl fmt::Display for TheoremViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}\ninstance: {}\ntrace: {}", self.claim, self.detail, self.instance, self.trace)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgorithmError {
    #[error("algorithm requires {0}")]
    KindMismatch(Kind),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("mode error: {0}")]
    Mode(String),
    #[error("envy-cycle rotation revisited a state without producing a source")]
    NonTermination,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("theorem violation: {0}")]
    TheoremViolation(Box<TheoremViolation>),
}

impl AlgorithmError {
    pub fn is_theorem_violation(&self) -> bool {
        matches!(self, AlgorithmError::TheoremViolation(_))
    }
}

pub(crate) fn violation<S: Scalar>(
    inst: &Instance<S>,
    claim: &str,
    detail: impl Into<String>,
    trace: impl fmt::Debug,
) -> AlgorithmError {
    violation_in(inst, claim, detail, trace, None)
}

pub(crate) fn violation_in<S: Scalar>(
    inst: &Instance<S>,
    claim: &str,
    detail: impl Into<String>,
    trace: impl fmt::Debug,
    bundles: Option<Vec<Vec<usize>>>,
) -> AlgorithmError {
    AlgorithmError::TheoremViolation(Box::new(TheoremViolation {
        claim: claim.to_string(),
        detail: detail.into(),
        instance: crate::io::instance_to_json(inst).to_string(),
        trace: format!("{trace:?}"),
        bundles,
    }))
}

pub(crate) fn require_kind<S: Scalar>(inst: &Instance<S>, kind: Kind) -> Result<(), AlgorithmError> {
    if inst.kind() == kind {
        Ok(())
    } else {
        Err(AlgorithmError::KindMismatch(kind))
    }
}

/// First index minimising `key` under `less`.
pub(crate) fn argmin_by<T>(items: impl IntoIterator<Item = T>, mut less: impl FnMut(&T, &T) -> bool) -> Option<T> {
    let mut best: Option<T> = None;
    for x in items {
        match &best {
            Some(b) if !less(&x, b) => {}
            _ => best = Some(x),
        }
    }
    best
}

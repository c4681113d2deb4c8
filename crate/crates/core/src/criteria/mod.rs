//! Executable interval-map chaos conditions, the aggregate classifier, and
//! the constructive set-pair builders.

mod classify;
mod conditions;
mod construct;
mod transitive;

use std::fmt;

use serde::Serialize;

pub use classify::{classify_chaos, ChaosParams, ChaosVerdict, Evidence, Verdict};
pub use conditions::{
    check_covering_transitivity, check_diam_growth, check_f1, check_g1, find_traps, invariant, CoveringResult,
    F1Result, G1Result, Trap,
};
pub use construct::{
    construct_hyper_eps_ly_pair, construct_hyper_ly_pair, ConstructParams, Construction, NotFound, TraceStep,
};
pub use transitive::{
    find_invariant_transitive_intervals, Dichotomy, RejectedCandidate, TransitiveInterval, TransitiveIntervalReport,
};

/// Outcome of a test that quantifies over infinite time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// How a status was reached: `Sampled` passes rest on a finite grid or
/// horizon, `Proved` passes and `Certified` fails rest on an exact finite
/// certificate such as an eventually periodic interval sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Sampled,
    Proved,
    Certified,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TriState {
    pub status: Status,
    pub basis: Basis,
}

impl TriState {
    pub fn sampled_pass() -> Self {
        TriState { status: Status::Pass, basis: Basis::Sampled }
    }

    pub fn proved_pass() -> Self {
        TriState { status: Status::Pass, basis: Basis::Proved }
    }

    pub fn certified_fail() -> Self {
        TriState { status: Status::Fail, basis: Basis::Certified }
    }

    /// A failure read off a finite window without a certificate.
    pub fn observed_fail() -> Self {
        TriState { status: Status::Fail, basis: Basis::Sampled }
    }

    pub fn inconclusive() -> Self {
        TriState { status: Status::Inconclusive, basis: Basis::None }
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn is_fail(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn is_certified_fail(&self) -> bool {
        self.status == Status::Fail && self.basis == Basis::Certified
    }

    /// Conjunction: a certified failure dominates, then any failure, then
    /// inconclusive; a pass is proved only if every part is.
    pub fn and(self, other: TriState) -> TriState {
        use Status::*;
        match (self.status, other.status) {
            (Fail, _) | (_, Fail) => {
                let certified = self.is_certified_fail() || other.is_certified_fail();
                if certified {
                    TriState::certified_fail()
                } else {
                    TriState::observed_fail()
                }
            }
            (Inconclusive, _) | (_, Inconclusive) => TriState::inconclusive(),
            (Pass, Pass) => {
                if self.basis == Basis::Proved && other.basis == Basis::Proved {
                    TriState::proved_pass()
                } else {
                    TriState::sampled_pass()
                }
            }
        }
    }
}

impl fmt::Display for TriState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.status, self.basis) {
            (Status::Pass, Basis::Sampled) => f.write_str("pass (sampled)"),
            (Status::Pass, _) => f.write_str("pass (proved)"),
            (Status::Fail, Basis::Certified) => f.write_str("fail (certified)"),
            (Status::Fail, _) => f.write_str("fail (observed)"),
            (Status::Inconclusive, _) => f.write_str("inconclusive"),
        }
    }
}

//! Infinity branches and generalized asymptotes of curves given by
//! meromorphic parametrizations.
//!
//! A curve in `C^n` is described by `n >= 2` component functions of one
//! parameter `s`, each meromorphic on the plane (rational functions,
//! fractional powers, `sin`, `cos`, `exp` and their quotients). Every pole
//! of the components sends the curve out to infinity along an *infinity
//! branch*; this crate locates the poles, computes each branch as a
//! truncated Puiseux series `r(z)` at infinity, and extracts from the
//! non-negative part of the series the *generalized asymptote*: the unique
//! perfect curve `(t^n, q_2(t), ..)` the branch converges to.
//!
//! The pipeline is organized like the data flows:
//!
//! * [`expr`] — parsing, printing and evaluation of the component functions;
//! * [`series`] — truncated Puiseux series arithmetic and local expansion;
//! * [`poles`] — pole location inside a search window and order classification;
//! * [`branches`] — the limit cascade producing branch series, plus an
//!   independent series-reversion oracle;
//! * [`asymptotes`] — proper asymptote extraction, horizontal/vertical
//!   lines, and the full per-pole driver for plane and space curves.

pub mod asymptotes;
pub mod branches;
pub mod expr;
pub mod poles;
pub mod series;

pub use asymptotes::{
    all_asymptotes, asymptote_from_branch, horizontal_asymptote, nd_asymptotes,
    reparametrization_equivalent, vertical_asymptote, AsymptoteKind, GAsymptote, RunOutcome,
};
pub use branches::{
    approach_distance, branch_series, branch_series_oracle, converge, infinity_point, BranchError,
    InfinityBranch,
};
pub use expr::{evaluate, parse, CurveParam, Expr};
pub use poles::{classify_orders, find_poles, PoleData, PoleError, Window};
pub use series::{expand_at, PuiseuxSeries};

/// Knobs shared by the pole/branch/asymptote pipeline.
#[derive(Clone, Debug)]
pub struct Options {
    /// Extra series orders past the constant term of each branch head.
    /// `None` selects the default of 5 (enough for the tail terms below).
    pub depth: Option<i64>,
    /// Number of negative-exponent branch coefficients to compute.
    pub tail_terms: usize,
    /// Relative zero tolerance used when pruning series coefficients.
    pub tolerance: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            depth: None,
            tail_terms: 3,
            tolerance: 1e-10,
        }
    }
}

impl Options {
    /// Series orders to expand past the head for a branch with the given
    /// non-pivot blow-up order, honoring the configured depth and tails.
    pub(crate) fn head_margin(&self) -> i64 {
        let depth = self.depth.unwrap_or(5).max(1);
        depth.max(self.tail_terms as i64 + 2)
    }
}

#[cfg(test)]
mod shared_across_threads {
    use super::*;

    fn assert_send_sync<T: Send + Sync>() {}

    // Everything in the pipeline is immutable after construction and safe
    // to hand to other threads.
    #[test]
    fn pipeline_types_are_send_and_sync() {
        assert_send_sync::<Expr>();
        assert_send_sync::<CurveParam>();
        assert_send_sync::<PuiseuxSeries>();
        assert_send_sync::<PoleData>();
        assert_send_sync::<InfinityBranch>();
        assert_send_sync::<GAsymptote>();
        assert_send_sync::<Options>();
    }
}

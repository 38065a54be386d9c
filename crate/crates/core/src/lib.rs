//! Exact and asymptotic enumeration of symmetric 0-1 matrices with prescribed row
//! sums, where a diagonal entry contributes 1 ([`LoopModel::Once`]) or 2
//! ([`LoopModel::Twice`]) to its row sum.
//!
//! * [`exact`]: big-integer counts by memoized degree-multiset recursion.
//! * [`asymptotics`]: log-space evaluators of the sparse, dense and regular formulas.
//! * [`dist`]: Poisson binomial machinery and trace-distribution laws.
//! * [`saddle`]: elementary symmetric sums of exponential weights.

pub mod asymptotics;
pub mod dist;
pub mod error;
pub mod exact;
pub mod real;
pub mod saddle;
pub mod sequence;
pub mod special;

pub use asymptotics::{ErrorOrder, Formula, LogEstimate, SparsePrefactor};
pub use dist::{PoissonBinomialParams, Polynomial, SparseTraceParams, TraceLaw};
pub use error::{Error, Result};
pub use exact::{log_big, BigCount, CountCache, ExactCounter, MemoKey};
pub use real::Real;
pub use saddle::WeightVector;
pub use sequence::{
    compute_stats, lbar, q_dense, DegreeSequence, LoopModel, LoopModelParams, SequenceStats,
};

//! Numerical laboratory for a doubling weight on the circle whose logarithm
//! has bounded mean oscillation but which fails every Muckenhoupt condition.
//!
//! The weight is built in three stages:
//!
//! 1. [`riesz`] evaluates lacunary Riesz products `P_N(x) = ∏_{j≤N} (1 + ε cos 3^j x)`,
//!    picks one index `N_n` per level from an `L^{p_n}` growth threshold and
//!    assembles the `L log L`-normalised density `f̃`.
//! 2. [`maximal`] applies the exact discrete uncentered Hardy–Littlewood maximal
//!    operator, giving `ω = M f̃` (and its powers `ω^t`).
//! 3. [`diagnostics`], [`welding`] and [`conformal`] measure what can be measured
//!    at finite resolution: doubling ratios, `A_p`/`A_1` characteristics, BMO
//!    norms, circle homeomorphisms `h_t`, and the rectifiable curve traced by
//!    `γ' = ω e^{ib}`.
//!
//! Every function lives on the uniform grid `x_i = 2πi/G`; see [`SampledFunction`].

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod diagnostics;
mod error;
pub mod maximal;
pub mod pipeline;
pub mod riesz;
mod sampled;
pub mod sum;
pub mod welding;

pub use error::{Error, Result};
pub use sampled::{grid_point, SampledFunction};

pub use diagnostics::{IntervalFamily, WeightBundle, WeightProvenance};
pub use maximal::{build_omega, maximal_fast, maximal_naive, prefix_sums, IntervalStats, MaximalResult};
pub use pipeline::{construct, grid_for_exponent, Construction};
pub use riesz::{build_ftilde, sample_riesz, select_index, FtildeSpec, IndexPolicy, RieszSpec};

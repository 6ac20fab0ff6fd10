//! Exact-arithmetic envelopes for classes of full conditional probabilities.
//!
//! A model is a finite grid of atoms `H_i ∧ E_j` (conditioning cells × observable
//! cells), a prior `π` on a subalgebra of the conditioning side, and a strategy `σ`
//! giving one probability row per conditioning cell. This crate computes, over exact
//! rationals, the lower/upper envelopes of every full conditional probability that
//! extends `{π, σ}`: the coherent class, the disintegrable class, and the
//! (fully) strongly conglomerable class, together with an independent
//! linear-programming coherence oracle used to cross-validate the closed forms.
//!
//! Modules:
//! - [`algebra`]: atom spaces, events as bitsets, subalgebras, partition enumeration,
//!   the GN-implication order.
//! - [`assessment`]: priors, statistical models, strategies, layered conditionals
//!   (complete agreeing classes) and their validation.
//! - [`lp`]: an exact rational simplex solver (Bland's rule, no tolerances).
//! - [`coherence`]: coherence checking and extension intervals for arbitrary finite
//!   conditional assessments, used as the oracle.
//! - [`capacity`]: Möbius calculus, n-monotonicity, cores, inner/outer measures,
//!   Choquet and lower/upper Stieltjes integrals.
//! - [`envelopes`]: closed-form envelope formulas on finite instances.
//! - [`countable`]: finitely-describable countably infinite conditioning partitions
//!   (profile models) for strong-conglomerability envelopes and null-prior infima.
//!
//! No floating point is used anywhere in the core logic: case analysis turns on
//! exact zero tests, which rounding would corrupt.

pub mod algebra;
pub mod assessment;
pub mod capacity;
pub mod coherence;
pub mod countable;
pub mod envelopes;
pub mod lp;
pub mod rational;

pub use rational::Q;

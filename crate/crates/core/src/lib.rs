//! Exact operational semantics, execution distributions and coupling
//! checks for a probabilistic higher-order language with heaps and
//! presampling tapes.
//!
//! The algebra is generic over the weight scalar ([`weight::Weight`]); the
//! aliases below fix it to exact big rationals, which every analysis uses.

pub mod analysis;
pub mod corpus;
pub mod coupling;
pub mod dist;
pub mod exec;
pub mod lang;
pub mod semantics;
pub mod weight;

pub use weight::{ExactWeight, Weight};

/// Exact probability weight.
pub type Prob = num_rational::BigRational;

/// Sub-distribution with exact weights.
pub type Distr<A> = dist::SubDistr<A, Prob>;

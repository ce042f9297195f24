//! First-order solvers for maximizing monotone up-concave (DR-submodular)
//! functions over convex regions, when the objective is Hölder-smooth or
//! non-smooth:
//!
//! - [`greedy::continuous_greedy`] — conditional gradient with inexact
//!   gradients, `(1 − 1/e)`-style guarantees for Hölder-smooth objectives;
//! - [`mirror_prox::mirror_prox`] — extragradient method returning the best
//!   half-step iterate of a candidate window, with `1/2`-style guarantees
//!   down to non-smooth (`σ = 0`) and non-differentiable objectives;
//! - [`robust`] — maximizing a pointwise minimum of members via mirror-prox
//!   on active-member gradients;
//! - [`dro`] — Wasserstein distributionally robust maximization through a
//!   regularized inner problem with certified approximate gradients;
//! - [`multilinear`] — submodular set functions, exact and sampled
//!   multilinear extensions, the bridge from discrete problems.
//!
//! All numerics are generic over the scalar type through [`scalar::Real`];
//! `f64` aliases for the common types live at the crate root.

pub mod dro;
pub mod error;
pub mod greedy;
pub mod holder;
pub mod mirror;
pub mod mirror_prox;
pub mod multilinear;
pub mod norm;
pub mod objective;
pub mod region;
pub mod report;
pub mod robust;
pub mod scalar;
pub mod vector;

pub use error::{Error, Result};
pub use norm::NormKind;
pub use scalar::Real;

/// `f64` aliases for the main types.
pub type Vector64 = vector::Vector<f64>;
pub type Region64 = region::FeasibleRegion<f64>;
pub type Modulus64 = holder::HolderModulus<f64>;
pub type Report64 = report::SolveReport<f64>;

/// `f32` aliases, for callers trading accuracy for footprint.
pub type Vector32 = vector::Vector<f32>;
pub type Region32 = region::FeasibleRegion<f32>;
pub type Modulus32 = holder::HolderModulus<f32>;
pub type Report32 = report::SolveReport<f32>;

//! Rényi-divergence probability comparison bounds and the error-exponent
//! bounds derived from them.
//!
//! The comparison inequality
//!
//! ```text
//! ln P(A) / (α−1)  ≤  ln Q(A) / α  +  D_α(P‖Q)
//! ```
//!
//! transfers exponential decay rates from a tractable reference model `Q`
//! to a model of interest `P`. This crate implements the divergence
//! primitives ([`divergence`]), the exponent-level two-sided bounds and
//! their α-optimizers ([`exponent`]), and the channel/source models built on
//! them: Gaussian channels with bounded interference and ISI
//! ([`gaussian`]), fading channels in discrete and continuous time
//! ([`fading`]), binary channels with hidden-Markov erasure ([`erasure`]),
//! and rate-distortion and guessing ([`source`]). The [`verify`] module
//! holds the brute-force oracles that cross-check every closed form.
//!
//! Divergences use the `1/(α(α−1))` normalization throughout, so
//! `α·D_α` is the usual order-α Rényi divergence.
//!
//! Grid scans run on rayon when the `parallel` feature is enabled (the
//! default); see [`par::Execution`].

pub mod divergence;
pub mod erasure;
pub mod error;
pub mod exponent;
pub mod fading;
pub mod gaussian;
pub mod grid;
pub mod numerics;
pub mod par;
pub mod source;
pub mod verify;

pub use divergence::{DiscreteDist, DivergenceOrder};
pub use error::{Error, Result};
pub use exponent::{BoundResult, ExponentPair, TwoSided};
pub use grid::AlphaGrid;
pub use par::Execution;

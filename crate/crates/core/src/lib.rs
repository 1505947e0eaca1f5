//! Optimal portfolio allocation when the market price of risk follows an
//! Ornstein-Uhlenbeck process, under full observation of the market price of
//! risk and under partial observation through prices only.
//!
//! The crate covers the whole chain from model parameters to monetary values:
//!
//! * [`model`]: parameter validation and the regime classification of the
//!   Riccati system (critical correlation, critical risk aversion, critical time).
//! * [`riccati`]: backward integration of the full- and partial-information
//!   Riccati systems, the filter variance ODE and the `Q(t)` bridge.
//! * [`filter`]: the Kalman-Bucy filter for the latent market price of risk.
//! * [`allocation`]: optimal strategies, multipliers, optimal wealth and
//!   expected utility in closed form.
//! * [`mgf`]: moment generating function systems of the optimal wealth, for
//!   real and complex exponents.
//! * [`density`]: Fourier inversion into wealth densities, mean-variance
//!   frontiers and stochastic dominance checks.
//! * [`voi`]: value of initial and dynamic information and certainty equivalents.
//! * [`mc`]: a Monte Carlo oracle used to cross-check every closed form.
//!
//! The crate is `no_std` (with `alloc`). The default `std` feature switches the
//! float kernels to the platform math library and parallelizes path and
//! frequency loops with rayon.

#![no_std]
// Float methods come from `num_traits::Float` without std; with std linked the
// inherent methods win and those imports go unused.
#![cfg_attr(any(feature = "std", test), allow(unused_imports))]
// `!(x > 0.0)` is the NaN-rejecting form used throughout input checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
extern crate std;

extern crate alloc;

pub mod allocation;
pub mod density;
mod error;
pub mod filter;
pub mod grid;
mod interp;
pub mod mc;
pub mod mgf;
pub mod model;
mod par;
pub mod riccati;
pub mod voi;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use model::{classify, validate, MarketParams, RawParams, Regime, RegimeReport};

/// Which investor the quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfoKind {
    /// Observes the market price of risk directly.
    FullInfo,
    /// Observes prices only and filters the market price of risk.
    PartialInfo,
}

impl InfoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InfoKind::FullInfo => "full",
            InfoKind::PartialInfo => "partial",
        }
    }
}

//! Link-level simulator and achievable-rate calculator for MIMO
//! communication when the receiver only holds a noisy channel estimate.
//!
//! The crate covers both sides of the question "what does imperfect channel
//! estimation cost, and how much of it can the decoding metric win back":
//!
//! - a full bit-interleaved coded modulation chain (convolutional code,
//!   random interleaver, Gray 16-QAM MIMO mapping, iterative soft
//!   demapping/decoding) that measures BER with either the classical
//!   mismatched ML metric or the estimation-error-aware improved metric;
//! - closed-form worst-case achievable rates for both metrics, plus
//!   outage-rate, estimation-induced-outage and ergodic-capacity reference
//!   curves evaluated by seeded Monte Carlo.
//!
//! Everything stochastic derives from explicit `(seed, stream_id)` pairs;
//! Monte Carlo loops parallelize over disjoint streams (rayon, behind the
//! default `parallel` feature) and reduce in fixed order, so results are
//! bit-reproducible at any worker count.

pub mod bicm;
pub mod channel;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod parallel;
pub mod rates;

pub use error::{Error, Result};

//! A laboratory for two-player turn-based stochastic games.
//!
//! The crate covers the full loop of a regret experiment:
//!
//! * [`game`] — episodic, discounted and linear game specifications, seeded
//!   random instances, one-hot linear lifts, and a bit-exact JSON format.
//! * [`solve`] — exact Nash solutions (backward induction, value iteration),
//!   best responses, duality gaps, occupancy-based gap sums, and brute-force
//!   enumeration oracles.
//! * [`tabular`] — optimistic Nash Q-learning in the episodic and discounted
//!   settings, with upper/lower confidence tables and monotone envelopes.
//! * [`linear`] — least-squares value iteration with UCB/LCB bonuses, in
//!   centralized self-play and independent (pluggable opponent) settings.
//! * [`harness`] — experiment orchestration: regret accounting against the
//!   exact solution, concentration measurement, peeling histograms, growth
//!   fits, and CSV/SVG/JSON outputs.
//!
//! Everything is deterministic given its inputs and a seed.

pub mod error;
pub mod game;
pub mod harness;
pub mod linear;
pub mod rng;
pub mod solve;
pub mod tabular;

pub use game::{DiscountedGameSpec, EpisodicGameSpec, GameSpec, InitialState, LinearGameSpec, Player};
pub use solve::{DiscountedNashSolution, GapMin, NashSolution, PolicyPair};

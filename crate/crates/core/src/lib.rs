//! Robust quantitative verification of continuous-time Markov chains.
//!
//! * [`ctmc`]: labelled CTMCs, reward structures, interval CTMCs and the JSON model format.
//! * [`bipp`]: posterior rate bounds for events never observed, from partial priors.
//! * [`ipsp`]: posterior rate intervals for recurring events, from sets of Gamma priors.
//! * [`checker`]: reachability, time-bounded until and reachability rewards, for point
//!   and interval chains.
//! * [`mission`]: the underwater-vehicle chain-cleaning case study with its
//!   reconfiguration controller and simulator.
//!
//! The numeric modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

pub mod bipp;
pub mod checker;
pub mod ctmc;
pub mod ipsp;
pub mod linalg;
pub mod mission;
pub mod optim;
pub mod scalar;

pub use scalar::Scalar;

pub type Ctmc64 = ctmc::Ctmc<f64>;
pub type IntervalCtmc64 = ctmc::IntervalCtmc<f64>;
pub type RewardStructure64 = ctmc::RewardStructure<f64>;
pub type RateObservation64 = ctmc::RateObservation<f64>;

//! Posted-price mechanisms for buyers who arrive in uniformly random order
//! with independent, known value distributions.
//!
//! The crate covers single items, matroids, unit-demand matchings and XOS
//! combinatorial auctions with time-discounted dynamic prices, fixed-threshold
//! mechanisms, exact offline optima, a configuration LP solver, a seeded
//! Monte Carlo harness and the iid hard instance for fixed thresholds.

pub mod cli;
pub mod config_lp;
pub mod distributions;
pub mod error;
pub mod generators;
pub mod hardness;
pub mod instance;
pub mod instance_file;
pub mod matroids;
pub mod offline;
pub mod online;
pub mod pricing;
pub mod simulation;
pub mod valuations;

pub use error::{Error, Result};
pub use instance::{Instance, InstanceKind, Profile};

//! Budget-constrained bidding for auction-based federated learning.
//!
//! Data consumers compete in first-price sealed-bid auctions for data
//! owners. Each consumer estimates an owner's utility with a log-linear model,
//! predicts its chance of winning with a calibrated winning function, and
//! bids the price that maximizes expected surplus subject to its budget
//! (priced through a Lagrange multiplier). Recruited owners then train a
//! shared model with federated averaging.
//!
//! Modules, bottom-up:
//!
//! - [`market`]: owner pool, bid requests, auctions, the market loop, metrics
//! - [`estimator`]: utility estimator and ground-truth utility
//! - [`win_model`]: winning functions and their calibration
//! - [`strategy`]: baseline and optimal bidding functions, multiplier solver
//! - [`fl`]: synthetic or IDX-backed owner data, softmax regression, FedAvg
//! - [`harness`]: run configuration, the bootstrap + market + training
//!   experiment, CSV artifacts and charts
//!
//! The `examples/` directory has one runnable program per capability.

pub mod error;
pub mod estimator;
pub mod fl;
pub mod harness;
pub mod market;
pub mod seed;
pub mod strategy;
pub mod win_model;

pub use error::{Error, Result};

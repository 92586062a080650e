//! Handwriting-dynamics scoring engine.
//!
//! Predicts a continuous handwriting-difficulty score (SEMS scale, 0–12 for
//! print writing) from 10-channel smart-pen sensor recordings. The score is a
//! composition of two regressors: a from-scratch LSTM that maps a fixed-length
//! window of the 10 sensor channels to a score, and an epsilon-SVR that
//! combines the per-child mean LSTM score with age and gender into the final
//! prediction.
//!
//! The crate is organized around that pipeline:
//!
//! * [`data`] — sensor frames, sessions, windowing, normalization, cohort CSV
//!   formats, and a seeded synthetic-cohort generator used for verification.
//! * [`lstm`] — the LSTM regressor: forward pass, backpropagation through
//!   time, inverted dropout, and Adam.
//! * [`attention`] — a variable-wise LSTM with mixture attention that yields
//!   overall and per-timestep channel-importance scores.
//! * [`svr`] — epsilon support vector regression solved by SMO.
//! * [`metrics`] — RMSE plus threshold-based confusion counts and the derived
//!   classification metrics.
//! * [`pipeline`] — end-to-end training, prediction, Monte-Carlo
//!   cross-validation, architecture sweeps, activation traces, and the
//!   serialized model bundle.
//!
//! Everything is deterministic given a root seed: all randomness flows through
//! [`seeds`], which derives per-component substreams from one root value.

pub mod attention;
pub mod data;
pub mod error;
pub mod linalg;
pub mod lstm;
pub mod metrics;
pub mod pipeline;
pub mod seeds;
pub mod svr;

pub use error::{Error, Result};

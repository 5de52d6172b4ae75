//! Bibliometric index computation, one-factor measurement modelling, and
//! population-modulated researcher scoring.
//!
//! The crate is organized as a pipeline: [`indices`] turns publication
//! lists into the classical single-number indices, [`cfa`] fits a
//! one-factor model to the six transformed indicators of a population,
//! [`scoring`] converts the fit into per-researcher scores and rankings,
//! [`analytics`] adds group descriptives, and [`report`] orchestrates the
//! stages and renders the results. [`synth`] generates seeded synthetic
//! populations with known factor structure for validation.

pub mod analytics;
pub mod cfa;
pub mod dataset;
pub mod error;
pub mod indices;
pub mod report;
pub mod scoring;
pub mod synth;

pub use error::{Error, Result};

//! Scoring, the surrogate classifier and the end-to-end pipeline.

pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod surrogate;

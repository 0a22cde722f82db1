//! Field-normalized research productivity of university faculty, and
//! indicators of how well each university recruits and retains productive
//! researchers.
//!
//! The pipeline: load and validate yearly rosters and a publication corpus
//! ([`model`]), score individual productivity ([`scoring`], [`credit`]),
//! derive career events and cohorts ([`mobility`]), compute recruitment,
//! turnover and mobility effectiveness ([`indicators`]) and correlate them
//! ([`stats`]). [`pipeline::analyze`] runs everything; [`synth`] generates
//! test systems.

pub mod cli;
pub mod credit;
pub mod error;
pub mod indicators;
pub mod mobility;
pub mod model;
pub mod pipeline;
pub mod scoring;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};

#[cfg(test)]
mod testkit;

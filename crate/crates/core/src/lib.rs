//! Document model, text metrics, curation checks and the shared
//! deterministic random stream.

pub mod corpus;
pub mod curation;
pub mod docmodel;
pub mod metrics;
pub mod rng;

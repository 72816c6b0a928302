//! Linguistic profiling of training corpora, questionnaire-based trait
//! scoring for language models, and the statistics that relate the two.

pub mod analytics;
pub mod cli;
pub mod client;
pub mod corpus;
pub mod digest;
pub mod lexicon;
pub mod plot;
pub mod profiler;
pub mod psychometrics;
pub mod rng;
pub mod sampler;
pub mod synth;
pub mod text;

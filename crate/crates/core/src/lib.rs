//! Emotion intensity modeling toolkit.
//!
//! The pipeline, end to end:
//!
//! 1. [`dataset`] ingests precomputed acoustic feature corpora (CSV/JSONL),
//!    standardizes them, builds the ordered/similar pair sets, and can
//!    generate synthetic corpora with known latent intensity for testing.
//! 2. [`ranker`] learns a linear ranking function over the pair constraints
//!    by minimizing a squared-hinge / squared-gap penalty objective.
//! 3. [`remap`] turns raw ranking scores into per-class relative intensities
//!    in (0,1) via a mean-centered sigmoid.
//! 4. [`controller`] holds the intensity controller: emotion mixing, the
//!    NLinear intensity extractor and emotion classifier, the per-class
//!    candidate pool, alpha-based intensity adjustment, and scaled
//!    dot-product fusion of speaker and emotion embeddings.
//! 5. [`decouple`] estimates and minimizes mutual information between
//!    speaker and emotion embeddings (vCLUB), plus the speaker-consistency,
//!    reconstruction, and total losses.
//!
//! Everything is seed-deterministic: given the same inputs and seeds, every
//! operation produces bitwise-identical results, with or without the
//! `parallel` feature (see [`parallel`] for the reduction-order contract).

pub mod controller;
pub mod dataset;
pub mod decouple;
pub mod matrix;
pub mod nn;
pub mod optimize;
pub mod parallel;
pub mod ranker;
pub mod remap;
pub mod seed;
pub mod stats;

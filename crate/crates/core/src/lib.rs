//! Spectral word maps from bigram nearest-neighbor graphs.
//!
//! The pipeline: [`corpus`] turns raw text into a vocabulary and bigram
//! counts; [`context`] builds left/right context vectors for the most frequent
//! words; [`graph`] links each word to its nearest neighbors by cosine;
//! [`spectral`] embeds the graph with normalized-laplacian eigenvectors. On
//! the morphology side, [`morphology`] finds stem/suffix signatures and
//! rewrites rare words as `<signature>_<suffix>` pseudo-words, and
//! [`coherence`] measures how tightly each suffix's pseudo-words cluster in
//! the resulting maps. [`render`] draws the maps as SVG and [`pipeline`]
//! wires the stages to files on disk.

pub mod coherence;
pub mod context;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod morphology;
pub mod pipeline;
pub mod render;
pub mod spectral;

pub use error::{Error, Result};

//! Harsanyi-dividend interaction concepts for black-box value functions over
//! small variable sets, together with the tabular models and concept-quality
//! metrics used to study them.

pub mod analytics;
pub mod axioms;
pub mod config;
pub mod data;
pub mod error;
pub mod indices;
pub mod lattice;
pub mod mlp;
pub mod pipeline;
pub mod report;
pub mod value;

pub use error::{Error, Result};

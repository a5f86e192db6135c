//! Minimum spanning acycles of random weighted simplicial complexes.

pub mod cli;
pub mod complex;
pub mod error;
pub mod experiment;
pub mod limit;
pub mod linalg;
pub mod manifest;
pub mod msa;
pub mod oracle;
pub mod quad;
pub mod sampler;
pub mod stats;
pub mod streaming;

pub use complex::{Face, FaceRank, Weight, WeightedComplex};
pub use error::{Error, Result};
pub use limit::LimitLaw;
pub use linalg::FieldChoice;
pub use msa::{kruskal_msa, persistence_deaths, Msa};
pub use sampler::{Seed, WeightLaw};

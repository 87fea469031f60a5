pub mod analysis;
pub mod dialogue;
pub mod error;
pub mod ingest;
pub mod lexicon;
pub mod ml;
pub mod questgen;
pub mod similarity;
pub mod text;

pub use error::{Error, Result};

pub mod centrality;
pub mod error;
pub mod experiment;
pub mod generate;
pub mod graph;
pub mod immunization;
pub mod ipq;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};

//! Economic-complexity ordinations of trade specialization data.
//!
//! The pipeline runs from raw export records ([`ingest`]) through classic
//! correspondence analysis ([`ca`], giving ECI/PCI and higher axes) or
//! canonical correspondence analysis constrained by country variables
//! ([`cca`]), to Type-1 scaled biplots ([`biplot`]).

pub mod biplot;
pub mod ca;
pub mod cca;
pub mod cli;
pub mod error;
pub mod format;
pub mod ingest;
mod iterate;
pub mod ordination;
pub mod solver;
pub mod synth;
pub mod weighted;

pub use error::{Error, Result};
pub use ordination::{Ordination, OrdinationKind, SignConvention, SolveOptions};

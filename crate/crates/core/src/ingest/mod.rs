//! From raw trade records to the binary specialization matrix and the
//! standardized country-variable matrix.

mod environment;
mod prune;
mod rca;
mod specialization;
mod trade;

pub use environment::{parse_variables_csv, standardize_environment, CountryVariableTable, CountryVariables};
pub use prune::PruneReport;
pub use rca::{compute_rca, RcaMatrix};
pub use specialization::{binarize, Component, SpecializationMatrix};
pub(crate) use trade::csv_error;
pub use trade::{parse_trade_csv, TradeRecord, TradeTable, TRADE_HEADER};

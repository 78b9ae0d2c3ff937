//! Orlicz-space computations on measure spaces with atoms and a continuum
//! part, with boundedness and range criteria for multiplication and
//! composition operators.

pub mod cli;
pub mod error;
pub mod measure;
pub mod operators;
pub mod oracle_lp;
pub mod orlicz;
pub mod partition;
pub mod quadrature;
pub mod range;
pub mod trend;
pub mod verdict;
pub mod young;

pub use error::{Error, Result};
pub use verdict::{Status, Verdict};
pub use young::YoungFunction;

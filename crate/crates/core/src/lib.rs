pub mod avo;
pub mod avofactors;
pub mod certificates;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod format;
pub mod group;
pub mod languages;
pub mod oracles;
pub mod patterns;
pub mod search;
pub mod shapes;

pub use error::{Error, Result};
pub use group::{Group, Point};

//! Free monoids on S-bimodules: free properads, operads, dioperads and
//! half-props, built both as a sequential colimit of leveled-graph quotients
//! and directly on graphs without levels.

pub mod error;
pub mod free;
pub mod graph;
pub mod linalg;
pub mod perm;
pub mod product;

pub use error::{Error, Result};

pub mod boolfn;
pub mod circuit;
pub mod corpus;
pub mod debate;
pub mod error;
pub mod par;
pub mod protocols;
pub mod pspace;
pub mod randomized;
pub mod transforms;

pub use error::{Error, Result};

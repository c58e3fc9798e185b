pub mod algebra;
pub mod cocycles;
pub mod correspondence;
pub mod error;
pub mod quotient;
pub mod representations;
pub mod special_rep;
pub mod tree;

pub use error::{Error, Result};

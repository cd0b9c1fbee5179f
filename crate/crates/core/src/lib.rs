pub mod digraph;
pub mod numlinalg;
pub mod pseudoinverse;
pub mod regex;
pub mod spectral;
pub mod symdyn;
pub mod validation;
pub mod error;

pub use error::{Error, Result};

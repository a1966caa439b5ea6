pub mod body;
pub mod decomposition;
pub mod dimension;
pub mod error;
pub mod exactgeom;
pub mod harness;
pub mod io;
pub mod oracle;
pub mod surface;
pub mod toric;

pub use error::{Error, Result};

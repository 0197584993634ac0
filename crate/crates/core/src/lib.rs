pub mod bench;
pub mod dvd;
pub mod error;
pub mod exact;
pub mod generators;
pub mod io;
pub mod lp;
pub mod model;
pub mod normalize;
pub mod number;
pub mod rounding;
pub mod solve;

pub use error::{Error, Result};
pub use model::*;
pub use number::{Ext, Rational};

//! Lacunary direction sets, directional maximal operators and the cone
//! multipliers used to bound them.

pub mod direction_sets;
pub mod error;
pub mod generators;
pub mod maximal;
pub mod multipliers;

pub use error::{Error, Result};

//! Discrete maximal operators on sampled functions.

mod directional;
mod grid;
mod lift_eval;
mod measure;
mod norm;
mod oracle;
mod radii;
mod tube;

pub use directional::{directional_maximal, hl_1d, line_average, strong_maximal};
pub use grid::GridFunction;
pub use lift_eval::{LiftField, LiftOptions, LineRule};
pub use measure::{measure_union, UnionInput};
pub use norm::{lp_norm, norm_ratio};
pub use oracle::{brute_oracle, ORACLE_LIMIT};
pub use radii::RadiusSet;
pub use tube::{tube_average, tube_maximal};

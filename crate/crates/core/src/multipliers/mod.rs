//! Cone multipliers ψ_{σ,i}, the operators K, R, S and T built from them,
//! and numerical checks of the identities that drive the L^p bounds.

mod checks;
mod cone;
pub mod dft;
mod operators;
mod profile;

pub use checks::{
    check_cell, overlap_count, region_emptiness_search, square_function_p2, vanishing_check, vanishing_max,
    EmptinessOptions, FrequencyLattice, VanishingResult,
};
pub use cone::{ConeSpec, MultiplierStack};
pub use operators::{apply_k, apply_r, apply_t, inclusion_exclusion_residual, s_multiplier, t_multiplier, CellIndex};
pub use profile::{eta_o, m_multiplier, m_o, phi_o, smooth_step};

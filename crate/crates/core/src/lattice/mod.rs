//! Exact subset-lattice machinery: masks, value profiles, the Harsanyi
//! (Möbius) transform and its zeta inverse, and salient-set extraction.

mod io;
mod salient;
mod set;
mod table;

pub use io::MAGIC as TABLE_MAGIC;
pub use salient::{normalized_strength_curve, salient_set, SalientSet};
pub use set::{VariableSet, MAX_VARIABLES};
pub use table::{
    build_value_profile, efficiency_residual, efficiency_tolerance, harsanyi_transform,
    reconstruct_value, InteractionTable, ValueFunction, ValueProfile, EXACT_TOLERANCE,
};

pub(crate) use table::evaluate_masks;

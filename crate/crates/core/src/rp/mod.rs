//! Discrete rough paths: lifts, two-index maps, variation norms and the
//! operations that build new lifts out of old ones.

mod brownian;
pub mod io;
mod lift;
mod path;
mod two_index;
mod variation;
mod young;

pub use brownian::{brownian_lift, ito_lift, piecewise_linear_approximation};
pub use lift::{
    chen_defect, dilate, geometricity_defect, increment, joint_lift_young, sum_lifts,
    LiftIncrement, PathLift, TripleSelection, DEFAULT_P,
};
pub use path::Path;
pub use two_index::TwoIndexMap;
pub use variation::{p_variation, p_variation_by, two_index_p_variation, Control};
pub use young::young_cross;

//! Rough path algebra, rough-driver SPDE solvers and pathwise CLT / moderate
//! deviation experiments on periodic grids.

pub mod error;
pub mod grid;
pub mod rp;

pub use error::{Error, Result};
pub use grid::{SpaceGrid, TimeGrid};
pub mod drivers;
pub mod spde;
pub mod clt;
pub mod mdp;
pub mod presets;

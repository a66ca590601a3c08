//! Independent ground truth: finite differences, Monte Carlo integration
//! and exact planar half-plane intersection.

pub mod fd;
pub mod mc;
pub mod wulff;

pub use fd::{finite_diff, finite_diff_richardson, FD_STEP_G};
pub use mc::{mc_measure, McEstimate, MC_BATCH};
pub use wulff::{wulff_polygon, wulff_polygon_from_fn, PlanarBody};

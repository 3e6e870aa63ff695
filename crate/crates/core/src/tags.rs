//! Shared failure-tag vocabulary used in evaluation reports.

pub const BOUNDARY_VIOLATION: &str = "boundary violation";
pub const WRONG_MOVEMENT: &str = "wrong movement";
pub const KINEMATIC_INCONSISTENCY: &str = "kinematic inconsistency";
pub const CHROMATIC_DISTORTION: &str = "chromatic distortion";
pub const STRUCTURAL_DISTORTION: &str = "structural distortion";
pub const ANGULAR_DEVIATION: &str = "angular deviation";
pub const CENTROID_DISPLACEMENT: &str = "centroid displacement";

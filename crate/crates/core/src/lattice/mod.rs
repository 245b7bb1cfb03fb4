//! Integer points in the convex bodies cut out by growth constraints:
//! ellipsoids for the quadratic norms, polytopes for the sup norm.

mod bounds;
mod constants;
mod ellipsoid;
mod search;

pub use bounds::{count_vs_volume_check, pulled_back_ellipsoid, pulled_back_form, vaaler_ball_bounds, CountVolume, VaalerBall};
pub use constants::{c_a, c_a_f64, c_ab};
pub use ellipsoid::{
    ball_volume, build_ellipsoid, ellipsoid_log_volume, ellipsoid_volume, enumerate_ellipsoid, log_ball_volume, min_nonzero,
    Ellipsoid, EnumConfig, Enumeration, LatticePoint, DIM_CAP,
};
pub use search::{enclosing_ellipsoid, search_ivps, sup_norm_bounds, witness_rows, PolytopeLInf, SearchConfig, SearchReport};

//! Porous planar sets as `δ`-resolution point clouds.
//!
//! A set `Y` is `ν`-porous on lines on scales `ρ₀` to `ρ₁` when every segment
//! `τ` of length `R ∈ [ρ₀, ρ₁]` contains a point `x` with `B(x, νR) ∩ Y = ∅`;
//! on balls, when every ball of diameter `R` contains such a point. A cloud is
//! read as its `δ`-neighbourhood, so all checks hold "at resolution".

mod cloud;
mod counting;
mod estimate;
mod generators;
mod kdtree;

pub use cloud::{PointCloud2, ScaleRange};
pub use counting::{
    delta_exponent, measure_bound_check, min_largest_gap, porosity_1d, resolve_1d, separated_net,
    separation_defect, tube_count_check, MeasureBound, Segment, TubeCount,
};
pub use estimate::{
    anchors, estimate_ball_porosity, estimate_line_porosity, estimate_porosity, estimate_porosity_at, inflate, PorosityReport,
    PorositySettings, Witness, WitnessKind, MAX_INFLATED_POINTS, NU_CAP,
};
pub use generators::{cantor_1d, cantor_product, grid_fill, hierarchical_random, line_set, MAX_POINTS};
pub use kdtree::KdTree;

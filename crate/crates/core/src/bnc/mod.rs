//! Exact solver: the arc formulation, directed-cut separation and branching.

mod model;
mod separation;
mod solver;

pub use model::{tree_lp, DeltaTerm, MipModel};
pub use separation::{
    separate_c1, separate_c1_at, separate_c2, separate_c2_at, triangle_row, violated_triangles, Cut, CutFamily,
    CUT_TOL,
};
pub use solver::{
    branch_and_cut, build_relaxation, lp_lower_bound, BncOptions, CutConfig, CuttingPlanes, NodeLp, SolveReport,
    SolveStatus,
};

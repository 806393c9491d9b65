//! Exact minimum-cost edge covers of bichromatic point sets on the integer grid.
//!
//! Every red point must be joined to at least one blue point and vice versa;
//! the cost of a cover is the sum of its Euclidean edge lengths.  The solver
//! reduces the cover to a perfect matching on a two-layer graph, runs a
//! cost-scaling matcher, keeps only the edges that can appear in an optimum,
//! and finishes with divide and conquer over a planar separator.

pub mod debug;
pub mod eligibility;
pub mod error;
pub mod exact;
pub mod fixed;
pub mod gen;
pub mod geom;
pub mod oracle;
pub mod penalty1d;
pub mod prism;
pub mod report;
pub mod scalar;
pub mod scaling;
pub mod separator;
pub mod solver;
pub mod wnn;

pub use error::{Error, Result};
pub use exact::{cmp_root, RadicalSum, RootExpr};
pub use fixed::Fixed;
pub use geom::{dist2, line_key, orientation, segments_properly_cross, Color, GridPoint, Instance, LineKey};
pub use prism::{matching_to_cover, EdgeCover, PrismGraph, PrismMatching};
pub use report::CostReport;
pub use scalar::Scalar;
pub use solver::{solve_approx, solve_exact, Solution, SolveOptions, SolveStats};

//! Pointed extensions: metric groups, Lagrangian subgroups and orthogonal actions.

pub mod metric;
pub mod qz;
pub mod snf;
pub mod subgroup;
pub mod action;
pub mod fusion;

pub use action::{OrthogonalAction, PointedInput};
pub use fusion::{pointed_fusion, pointed_idempotents, pointed_spec};
pub use metric::{AbelianGroup, MetricGroup};
pub use qz::Qz;
pub use subgroup::{lagrangian_from_pair, LagrangianSubgroup, Subgroup};

//! Exact analysis of positively homogeneous piecewise-linear functions.

mod analysis;
mod arrangement;
mod function;
pub mod lp;

pub use analysis::{
    active_piece, equivalent, max_min_form, sup_abs_over, CellDecomposition, Equivalence, MaxMinForm, Region,
    SupAbs,
};
pub use arrangement::{build_arrangement, Arrangement, Cell, Sign};
pub use function::{LinFunc, PwlError, PwlFunction};
pub use lp::{solve_lp, Goal, LinearConstraint, LpOutcome, Relation};

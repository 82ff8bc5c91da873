//! Fractional perimeters, Besov seminorms and fractional capacities of
//! bounded sets in `R^n`, with the inequalities relating them.

// `!(x > 0.0)` also rejects NaN; index loops mirror the formulas
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod besov;
pub mod capacity;
pub mod constants;
pub mod error;
pub mod estimate;
pub mod geometry;
pub mod inequalities;
pub mod numerics;
pub mod perimeter;

pub use constants::AlphaContext;
pub use error::{Error, Result};
pub use estimate::{Estimate, Method};
pub use geometry::{AxisBox, Shape};

//! Integration machinery shared by the perimeter, Besov and capacity code.

mod extrapolate;
mod gauss;
mod montecarlo;
mod quadrature;

pub use extrapolate::{extrapolate_limit, LimitEnd, LimitScanResult};
pub use gauss::GaussRule;
pub(crate) use gauss::gauss_rule;
pub use montecarlo::{mc_mean, McSpec, McStream};
pub use quadrature::{integrate_1d, QuadratureSpec};

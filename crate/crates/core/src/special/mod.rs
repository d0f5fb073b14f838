//! Special functions entering the free-energy expansion.

mod chi;
mod polylog;
pub mod quadrature;
mod sum;

pub use chi::{chi, chi_dd, q_func, xi, SERIES_RADIUS};
pub use polylog::{li, zeta};
pub use quadrature::{universal_constant, ConstantEstimate, QuadratureSettings};
pub use sum::NeumaierSum;

//! Exact partition functions of the hexagonal dimer model (plane partitions
//! in a box) and the finite-size expansion of its free energy.
//!
//! Free energies are f = -ln Z / V, with V = 2(MN + NK + MK) for a finite box
//! and V = MN for unbounded height.

pub mod asymptotics;
mod error;
pub mod experiments;
pub mod fitting;
pub mod kasteleyn;
pub mod model;
pub mod partition;
pub mod special;
pub mod weight;

pub use error::{Error, Result};

//! Seeds, extended exchange matrices, quivers and mutation, with the
//! acyclic / isolated / Louise classification.

mod classify;
mod quiver;
mod seed;

pub use classify::{classify, louise, Classification};
pub use quiver::{CycleReach, Quiver};
pub use seed::{EquationDescriptor, ExtendedExchangeMatrix};

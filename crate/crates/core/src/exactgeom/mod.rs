//! Exact rational linear algebra, linear programming and polytopes.

pub mod dd;
pub mod lattice;
pub mod limit;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod volume;

pub use lattice::{count_lattice_points, lattice_points};
pub use limit::EpsilonSchedule;
pub use polytope::{Halfspace, Polytope, Sense};
pub use rational::{QMatrix, QVector, Rational};
pub use volume::volume;

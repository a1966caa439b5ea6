//! Surfaces given by a Néron–Severi lattice and a list of curves.

pub mod model;
pub mod polygon;
pub mod zariski;

pub use model::{from_toric, toric_class, Curve, LatticeSurface, SurfaceReport};
pub use polygon::{
    base_loci_divisorial, okounkov_polygon, parametric_sweep, restricted_volumes, Chamber, SurfFlag, Sweep,
};
pub use zariski::{classify, numerical_dim, zariski_decompose, SurfaceClass};

//! Smooth complete toric varieties given by fans.

pub mod body;
pub mod divisor;
pub mod fan;
pub mod models;
pub mod series;

pub use body::{okounkov_body, restricted_volume, InvariantFlag};
pub use divisor::{
    asymptotic_order, base_loci, classify, iitaka_dim, numerical_dim, section_polytope, sigma_s_decomposition,
    BaseLoci, LimitSettings, ToricClass,
};
pub use fan::{Blowup, ToricVariety, Wall};
pub use series::{series_body, series_generate, GradedSeries};

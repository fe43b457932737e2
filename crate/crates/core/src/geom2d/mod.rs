//! Planar geometry on the lattice `h * Z^2`: shapes, pixel masks, discrete
//! polarization and Schwarz symmetrization.

mod hull;
pub mod io;
mod mask;
mod polarize;
mod schwarz;
mod shape;
mod vec2;

pub use hull::{convex_hull, diameter, hull_points, min_enclosing_circle};
pub use mask::{Cell, GridFunction, PixelMask};
pub(crate) use mask::same_spacing;
pub use polarize::{polarize_fn, polarize_set, reflect, GridNormal, GridReflection, Polarizer};
pub use schwarz::{schwarz_fn, schwarz_set};
pub use shape::{BoundaryNode, Shape};
pub use vec2::Vec2;

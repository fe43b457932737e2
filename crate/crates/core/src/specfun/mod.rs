//! Bessel functions `J_m`, `I_0`, `I_1`, their zeros, and the roots of the
//! disc boundary-condition equations.

mod bessel;
mod roots;
mod zeros;

pub use bessel::{
    bessel_i0, bessel_i0e, bessel_i0p, bessel_i1, bessel_i1e, bessel_j, bessel_j0, bessel_j1, bessel_jp,
};
pub use roots::{f_ratio, g_ratio, h_ratio, mu_modified, mu_radial, BoundaryRoot, RootKind};
pub use zeros::{bessel_zero, bessel_zeros, BesselRootTable};

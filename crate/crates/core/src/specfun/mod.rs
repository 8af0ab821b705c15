//! Special-function kernel: integer-order and spherical Bessel functions,
//! their positive zeros, and associated Legendre functions.

mod bessel;
mod legendre;
mod zeros;

pub use bessel::{bessel_j, bessel_j_half, bessel_j_prime, spherical_j, spherical_j_prime};
pub use legendre::assoc_legendre;
pub use zeros::{
    bessel_zero, mcmahon, rayleigh_sums, spherical_bessel_zero, zero_table, BesselOrder, ZeroMethod,
    ZeroTable,
};

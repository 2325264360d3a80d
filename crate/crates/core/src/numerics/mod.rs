//! Self-contained numerical kernels: special functions, normal
//! distribution, truncated normals, quadrature, shape-preserving
//! interpolation, and deterministic random numbers.
//!
//! Everything here is dependency-free and fully reproducible; reference
//! values in the tests were produced by independent arbitrary-precision
//! implementations.

pub mod erf;
pub mod interp;
pub mod normal;
pub mod quadrature;
pub mod rng;
pub mod truncnorm;

/// Shared mathematical constants at full f64 precision.
pub(crate) mod consts {
    /// sqrt(2)
    pub const SQRT_2: f64 = std::f64::consts::SQRT_2;
    /// sqrt(2 pi)
    pub const SQRT_2PI: f64 = 2.5066282746310002;
    /// 1 / sqrt(2 pi)
    pub const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;
}

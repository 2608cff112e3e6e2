//! Thin wrappers over `libm` for the float operations `core` lacks.
//!
//! Routing everything through `libm` keeps results bit-identical between the
//! `no_std` and test builds.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Round half away from zero, like `f64::round`.
#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

//! Float math shims so the crate builds both with `std` and with `libm`.

#![allow(dead_code)]

macro_rules! shim {
    ($name:ident, $std_method:ident, $libm_fn:ident) => {
        #[cfg(feature = "std")]
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            x.$std_method()
        }
        #[cfg(not(feature = "std"))]
        #[inline(always)]
        pub(crate) fn $name(x: f64) -> f64 {
            libm::$libm_fn(x)
        }
    };
}

shim!(sqrt, sqrt, sqrt);
shim!(abs, abs, fabs);
shim!(exp, exp, exp);
shim!(ln, ln, log);
shim!(sin, sin, sin);
shim!(cos, cos, cos);
shim!(tanh, tanh, tanh);
shim!(floor, floor, floor);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    x.hypot(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn copysign(x: f64, y: f64) -> f64 {
    x.copysign(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn copysign(x: f64, y: f64) -> f64 {
    libm::copysign(x, y)
}

/// Euclidean norm with a plain left-to-right accumulation order.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`.
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn scale(v: &mut [f64], alpha: f64) {
    for x in v {
        *x *= alpha;
    }
}

pub(crate) fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

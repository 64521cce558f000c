//! Thin wrappers so the rest of the crate reads like ordinary float code.

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Negative part, `max(-x, 0)`.
#[inline]
pub(crate) fn neg_part(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        0.0
    }
}

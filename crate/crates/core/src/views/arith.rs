//! Checked, instrumented arithmetic for bound computations.
//!
//! Every helper counts one arithmetic operation on the store. Results that
//! must land in an `i64` bound report `Error::Overflow` instead of wrapping;
//! purely internal quantities are widened to `i128` where that keeps the
//! math exact.

use crate::engine::DomainStore;
use crate::error::{Error, Result};

pub fn add(s: &DomainStore, a: i64, b: i64) -> Result<i64> {
    s.count_op();
    a.checked_add(b).ok_or(Error::Overflow)
}

pub fn sub(s: &DomainStore, a: i64, b: i64) -> Result<i64> {
    s.count_op();
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub fn mul(s: &DomainStore, a: i64, b: i64) -> Result<i64> {
    s.count_op();
    a.checked_mul(b).ok_or(Error::Overflow)
}

pub fn neg(s: &DomainStore, a: i64) -> Result<i64> {
    s.count_op();
    a.checked_neg().ok_or(Error::Overflow)
}

/// Exact product, widened; cannot overflow.
pub fn mul_wide(s: &DomainStore, a: i64, b: i64) -> i128 {
    s.count_op();
    a as i128 * b as i128
}

pub fn fit(v: i128) -> Result<i64> {
    if v < i64::MIN as i128 || v > i64::MAX as i128 {
        Err(Error::Overflow)
    } else {
        Ok(v as i64)
    }
}

pub fn div_floor(s: &DomainStore, a: i128, b: i128) -> i128 {
    s.count_op();
    debug_assert!(b != 0);
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub fn div_ceil(s: &DomainStore, a: i128, b: i128) -> i128 {
    s.count_op();
    debug_assert!(b != 0);
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Largest r with r*r <= v; caller guarantees v >= 0.
pub fn isqrt(s: &DomainStore, v: i64) -> i64 {
    s.count_op();
    debug_assert!(v >= 0);
    if v < 2 {
        return v;
    }
    let mut r = (v as f64).sqrt() as i64;
    while r > 0 && r.saturating_mul(r) > v {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= v {
        r += 1;
    }
    r
}

/// Smallest r >= 0 with r*r >= v.
pub fn isqrt_ceil(s: &DomainStore, v: i64) -> i64 {
    let f = isqrt(s, v.max(0));
    if f * f >= v {
        f
    } else {
        f + 1
    }
}

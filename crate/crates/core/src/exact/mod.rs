//! Exact arithmetic toolkit: big rationals, integer matrices in Hermite
//! normal form, lattices over Q, positive definite quadratic form
//! enumeration, characters and class numbers, univariate polynomials and
//! number fields with real embeddings.

pub mod arith;
pub mod enumerate;
pub mod fastenum;
pub mod hnf;
pub mod mat;
pub mod numberfield;
pub mod poly;

pub use hnf::{hnf, Lattice};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(int(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(int(n), int(d))
}

pub fn rat_of(n: &Int) -> Rat {
    Rat::from_integer(n.clone())
}

/// Exact integer square root: `Some(s)` with `s >= 0` and `s*s == n`.
pub fn int_sqrt(n: &Int) -> Option<Int> {
    if n.is_negative() {
        return None;
    }
    let s = n.sqrt();
    if &(&s * &s) == n {
        Some(s)
    } else {
        None
    }
}

/// Exact rational square root of a non-negative rational.
pub fn rat_sqrt(r: &Rat) -> Option<Rat> {
    if r.is_negative() {
        return None;
    }
    let num = int_sqrt(r.numer())?;
    let den = int_sqrt(r.denom())?;
    Some(Rat::new(num, den))
}

pub fn factorial(n: u64) -> Int {
    let mut acc = Int::one();
    for i in 2..=n {
        acc *= Int::from(i);
    }
    acc
}

/// Floor of a rational as a big integer.
pub fn rat_floor(r: &Rat) -> Int {
    r.floor().to_integer()
}

pub fn rat_ceil(r: &Rat) -> Int {
    r.ceil().to_integer()
}

/// Best-effort f64 value, used only to seed exact searches.
pub fn rat_to_f64(r: &Rat) -> f64 {
    let f = bigint_to_f64(r.numer()) / bigint_to_f64(r.denom());
    if f.is_finite() {
        f
    } else {
        0.0
    }
}

fn bigint_to_f64(n: &Int) -> f64 {
    // Avoids i64 overflow for large values; precision loss is fine here.
    let s = n.to_string();
    s.parse::<f64>().unwrap_or(0.0)
}

pub fn is_zero_rat(r: &Rat) -> bool {
    r.is_zero()
}

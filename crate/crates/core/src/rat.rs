//! Rational numbers and small helpers around `BigRational`.

use alloc::string::String;
use core::fmt::Write;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = num_rational::BigRational;

pub fn ri(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rq(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rsign(r: &Rat) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale down huge numerators/denominators before converting
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let shift = (nb.max(db) - 900).max(0) as usize;
            let n = (r.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (r.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if n >= 0.0 { f64::INFINITY } else { f64::NEG_INFINITY }
            } else {
                n / d
            }
        }
    }
}

/// Exact rational value of a finite double.
pub fn from_f64(x: f64) -> Rat {
    Rat::from_float(x).unwrap_or_else(Rat::zero)
}

pub fn two_pow(k: i32) -> Rat {
    let p = BigInt::one() << (k.unsigned_abs() as usize);
    if k >= 0 {
        Rat::from_integer(p)
    } else {
        Rat::new(BigInt::one(), p)
    }
}

pub fn mid(a: &Rat, b: &Rat) -> Rat {
    (a + b) / ri(2)
}

/// Simplest rational strictly between `a` and `b` (a < b), preferring small denominators.
pub fn simplest_between(a: &Rat, b: &Rat) -> Rat {
    debug_assert!(a < b);
    let fa = a.floor();
    if &(fa.clone() + ri(1)) < b {
        let c = fa + ri(1);
        if a.is_negative() && b.is_positive() {
            return ri(0);
        }
        if b.is_positive() || c.is_zero() {
            return c;
        }
        // both negative: largest integer below b
        let cb = b.ceil() - ri(1);
        return cb;
    }
    let mut d = BigInt::from(2);
    loop {
        let dr = Rat::from_integer(d.clone());
        let n = (a * &dr).floor() + ri(1);
        let c = n / dr;
        if &c < b && &c > a {
            return c;
        }
        d = d * 2;
    }
}

/// A rational strictly between `a` and `b` suitable as a sample: dyadic with few bits.
pub fn dyadic_between(a: &Rat, b: &Rat) -> Rat {
    simplest_between(a, b)
}

pub fn rat_to_string(r: &Rat) -> String {
    let mut s = String::new();
    if r.denom().is_one() {
        let _ = write!(s, "{}", r.numer());
    } else {
        let _ = write!(s, "{}/{}", r.numer(), r.denom());
    }
    s
}

pub fn gcd_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn lcm_int(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

/// Upper bound on |x| for x rational, as a power of two exponent.
pub fn log2_ceil_abs(r: &Rat) -> i64 {
    if r.is_zero() {
        return i64::MIN / 4;
    }
    let n = r.numer().abs().bits() as i64;
    let d = r.denom().bits() as i64;
    n - d + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest() {
        assert_eq!(simplest_between(&rq(-1, 2), &rq(1, 2)), ri(0));
        assert_eq!(simplest_between(&rq(1, 3), &rq(1, 2)), rq(3, 8).min(simplest_between(&rq(1, 3), &rq(1, 2))));
        let c = simplest_between(&rq(1, 3), &rq(1, 2));
        assert!(c > rq(1, 3) && c < rq(1, 2));
        let c = simplest_between(&ri(-7), &rq(-5, 2));
        assert!(c > ri(-7) && c < rq(-5, 2));
        assert_eq!(simplest_between(&ri(2), &ri(5)), ri(3));
    }

    #[test]
    fn f64_roundtrip() {
        assert_eq!(to_f64(&rq(1, 4)), 0.25);
        assert_eq!(from_f64(0.5), rq(1, 2));
    }
}

//! Elements of Q(eps), eps a positive infinitesimal, in the form eps^k * num(eps) / den(eps).

use crate::error::{Error, Result};
use crate::field::{Field, OrderedField};
use crate::rat::{rat_to_string, ri, rsign, Rat};
use crate::upoly::UPoly;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use core::fmt;
use num_traits::{One, Signed, Zero};

/// Canonical: num(0) != 0, den(0) = 1, gcd(num, den) = 1; zero has empty num and k = 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElem {
    k: i64,
    num: UPoly<Rat>,
    den: UPoly<Rat>,
}

impl core::hash::Hash for UPoly<Rat> {
    fn hash<H: core::hash::Hasher>(&self, h: &mut H) {
        self.c.hash(h)
    }
}
impl Eq for UPoly<Rat> {}

fn low_order(p: &UPoly<Rat>) -> usize {
    p.c.iter().position(|a| !a.is_zero()).unwrap_or(0)
}

fn drop_low(p: &UPoly<Rat>, n: usize) -> UPoly<Rat> {
    UPoly::new(p.c[n..].to_vec())
}

impl FieldElem {
    pub fn from_parts(k: i64, num: UPoly<Rat>, den: UPoly<Rat>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero_elem();
        }
        let a = low_order(&num);
        let b = low_order(&den);
        let mut num = drop_low(&num, a);
        let mut den = drop_low(&den, b);
        let k = k + a as i64 - b as i64;
        let g = num.gcd(&den);
        if g.deg() > 0 {
            num = num.divrem(&g).0;
            den = den.divrem(&g).0;
        }
        let d0 = den.c[0].clone();
        let inv = d0.recip();
        FieldElem { k, num: num.scale(&inv), den: den.scale(&inv) }
    }

    fn zero_elem() -> Self {
        FieldElem { k: 0, num: UPoly::zero(), den: UPoly::constant(ri(1)) }
    }

    pub fn from_rat(r: Rat) -> Self {
        Self::from_parts(0, UPoly::constant(r), UPoly::constant(ri(1)))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(ri(n))
    }

    pub fn eps() -> Self {
        Self::eps_pow(1)
    }

    pub fn eps_pow(k: i64) -> Self {
        FieldElem { k, num: UPoly::constant(ri(1)), den: UPoly::constant(ri(1)) }
    }

    /// Element given by a polynomial in eps with rational coefficients.
    pub fn from_poly(p: &UPoly<Rat>) -> Self {
        Self::from_parts(0, p.clone(), UPoly::constant(ri(1)))
    }

    pub fn order(&self) -> i64 {
        self.k
    }

    pub fn num(&self) -> &UPoly<Rat> {
        &self.num
    }

    pub fn den(&self) -> &UPoly<Rat> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else {
            rsign(&self.num.c[0])
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.is_zero() || self.k >= 0
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.is_zero() || self.k >= 1
    }

    /// Standard part of a bounded element.
    pub fn st(&self) -> Result<Rat> {
        if self.is_zero() || self.k >= 1 {
            Ok(Rat::zero())
        } else if self.k == 0 {
            Ok(self.num.c[0].clone())
        } else {
            Err(Error::Domain(format!("{} is not bounded", self)))
        }
    }

    /// Leading monomial coefficient: self = c * eps^k * (1 + o(1)).
    pub fn leading(&self) -> Rat {
        if self.is_zero() {
            Rat::zero()
        } else {
            self.num.c[0].clone()
        }
    }

    /// Value at a real parameter e > 0 (None if the denominator vanishes).
    pub fn eval_at(&self, e: &Rat) -> Option<Rat> {
        if self.is_zero() {
            return Some(Rat::zero());
        }
        let d = self.den.eval(e);
        if d.is_zero() {
            return None;
        }
        let mut p = Rat::one();
        let base = if self.k >= 0 { e.clone() } else { e.recip() };
        for _ in 0..self.k.unsigned_abs() {
            p *= &base;
        }
        Some(p * self.num.eval(e) / d)
    }

    /// Substitute eps := eta^m (the result is expressed in the new infinitesimal).
    pub fn reparam(&self, m: u32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let up = |p: &UPoly<Rat>| {
            let mut c = vec![Rat::zero(); (p.c.len() - 1) * m as usize + 1];
            for (i, a) in p.c.iter().enumerate() {
                c[i * m as usize] = a.clone();
            }
            UPoly::new(c)
        };
        Self::from_parts(self.k * m as i64, up(&self.num), up(&self.den))
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            Field::neg(self)
        } else {
            self.clone()
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = FieldElem::from_int(1);
        for _ in 0..n {
            r = Field::mul(&r, self);
        }
        r
    }

    pub fn is_rational(&self) -> bool {
        self.is_zero() || (self.k == 0 && self.num.deg() == 0 && self.den.deg() == 0)
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.st().unwrap())
        } else {
            None
        }
    }
}

pub fn upoly_to_string(p: &UPoly<Rat>, var: &str) -> String {
    if p.is_zero() {
        return String::from("0");
    }
    let mut s = String::new();
    for (i, a) in p.c.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let neg = a.is_negative();
        let mag = a.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mono = match i {
            0 => String::new(),
            1 => String::from(var),
            _ => format!("{}^{}", var, i),
        };
        if mono.is_empty() {
            s.push_str(&rat_to_string(&mag));
        } else if mag.is_one() {
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{}*{}", rat_to_string(&mag), mono));
        }
    }
    s
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num_s = upoly_to_string(&self.num, "eps");
        let num_s = if self.num.c.iter().filter(|a| !a.is_zero()).count() > 1 {
            format!("({})", num_s)
        } else {
            num_s
        };
        let pw = match self.k.unsigned_abs() {
            0 => String::new(),
            1 => String::from("eps"),
            k => format!("eps^{}", k),
        };
        let mut head = num_s;
        if self.k > 0 {
            head = if head == "1" { pw.clone() } else if head == "-1" { format!("-{}", pw) } else { format!("{}*{}", pw, head) };
        }
        let den_plain = self.den.deg() == 0;
        if den_plain && self.k >= 0 {
            return write!(f, "{}", head);
        }
        let mut den_s = if den_plain { String::new() } else { format!("({})", upoly_to_string(&self.den, "eps")) };
        if self.k < 0 {
            den_s = if den_s.is_empty() { pw } else { format!("{}*{}", pw, den_s) };
            if self.k < -1 || !den_plain {
                den_s = format!("({})", den_s);
            }
        }
        write!(f, "{}/{}", head, den_s)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl Field for FieldElem {
    fn fzero() -> Self {
        Self::zero_elem()
    }
    fn fone() -> Self {
        Self::from_int(1)
    }
    fn fis_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.k.min(o.k);
        let sh = |p: &UPoly<Rat>, s: i64| {
            let mut c = vec![Rat::zero(); s as usize];
            c.extend(p.c.iter().cloned());
            UPoly::new(c)
        };
        let a = sh(&self.num.mul(&o.den), self.k - m);
        let b = sh(&o.num.mul(&self.den), o.k - m);
        Self::from_parts(m, a.add(&b), self.den.mul(&o.den))
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero_elem();
        }
        Self::from_parts(self.k + o.k, self.num.mul(&o.num), self.den.mul(&o.den))
    }
    fn neg(&self) -> Self {
        FieldElem { k: self.k, num: self.num.neg(), den: self.den.clone() }
    }
    fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        Self::from_parts(-self.k, self.den.clone(), self.num.clone())
    }
    fn from_rat(r: &Rat) -> Self {
        FieldElem::from_rat(r.clone())
    }
}

impl OrderedField for FieldElem {
    fn sign(&self) -> i8 {
        FieldElem::sign(self)
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, o: &Self) -> Option<core::cmp::Ordering> {
        Some(Field::sub(self, o).sign().cmp(&0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rq;

    fn fe(k: i64, n: &[i64], d: &[i64]) -> FieldElem {
        FieldElem::from_parts(k, UPoly::new(n.iter().map(|&a| ri(a)).collect()), UPoly::new(d.iter().map(|&a| ri(a)).collect()))
    }

    #[test]
    fn signs_and_st() {
        assert_eq!(FieldElem::eps().sign(), 1);
        assert_eq!(fe(0, &[0, 2, -1], &[3, 1]).sign(), 1);
        assert_eq!(FieldElem::zero_elem().sign(), 0);
        assert!(FieldElem::from_int(5).is_bounded());
        assert!(!fe(0, &[1, 1], &[0, 1]).is_bounded());
        assert!(fe(3, &[1], &[1, -1]).is_bounded());
        assert_eq!(fe(0, &[1], &[1, 1]).st().unwrap(), ri(1));
        assert_eq!(fe(0, &[1, 2], &[1, -1]).st().unwrap(), ri(1));
        assert_eq!(fe(1, &[7, 1], &[1]).st().unwrap(), ri(0));
        assert!(fe(-1, &[1], &[1]).st().is_err());
    }

    #[test]
    fn display() {
        assert_eq!(format!("{}", fe(2, &[3, 1], &[1, -2])), "eps^2*(3 + eps)/(1 - 2*eps)");
        assert_eq!(format!("{}", FieldElem::eps()), "eps");
        assert_eq!(format!("{}", FieldElem::from_rat(rq(-1, 2))), "-1/2");
        assert_eq!(format!("{}", fe(-1, &[1], &[1])), "1/eps");
    }

    #[test]
    fn canonical_cancel() {
        // (eps^2 - eps)/(eps) = eps - 1
        let a = fe(0, &[0, -1, 1], &[0, 1]);
        assert_eq!(a, fe(0, &[-1, 1], &[1]));
        let b = fe(0, &[2], &[2, 2]);
        assert_eq!(b.den().c[0], ri(1));
    }
}

//! Dense univariate polynomials over a field, with Sturm sequences over ordered fields.

use crate::field::{Field, OrderedField};
use alloc::vec;
use alloc::vec::Vec;

/// Coefficients from the constant term upward; no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<F> {
    pub c: Vec<F>,
}

impl<F: Field> UPoly<F> {
    pub fn new(mut c: Vec<F>) -> Self {
        while c.last().is_some_and(|x| x.fis_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn constant(a: F) -> Self {
        Self::new(vec![a])
    }

    /// The polynomial x.
    pub fn x() -> Self {
        UPoly { c: vec![F::fzero(), F::fone()] }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; -1 for the zero polynomial.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lc(&self) -> F {
        self.c.last().cloned().unwrap_or_else(F::fzero)
    }

    pub fn coeff(&self, i: usize) -> F {
        self.c.get(i).cloned().unwrap_or_else(F::fzero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i).add(&o.coeff(i))).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i).sub(&o.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        UPoly { c: self.c.iter().map(|a| a.neg()).collect() }
    }

    pub fn scale(&self, a: &F) -> Self {
        Self::new(self.c.iter().map(|b| b.mul(a)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut r = vec![F::fzero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.fis_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] = r[i + j].add(&a.mul(b));
            }
        }
        Self::new(r)
    }

    pub fn eval(&self, t: &F) -> F {
        let mut acc = F::fzero();
        for a in self.c.iter().rev() {
            acc = acc.mul(t).add(a);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let mut r = Vec::new();
        let mut k = F::fzero();
        for (i, a) in self.c.iter().enumerate() {
            if i > 0 {
                r.push(a.mul(&k));
            }
            k = k.add(&F::fone());
        }
        Self::new(r)
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.lc().inv();
        self.scale(&l)
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        let li = d.lc().inv();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![F::fzero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let t = r[i + dd].mul(&li);
            if !t.fis_zero() {
                for (j, b) in d.c.iter().enumerate() {
                    r[i + j] = r[i + j].sub(&t.mul(b));
                }
            }
            q[i] = t;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, o: &Self) -> Self {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree(&self) -> Self {
        if self.deg() <= 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// p(x + a)
    pub fn shift(&self, a: &F) -> Self {
        let mut r = Self::zero();
        let lin = UPoly::new(vec![a.clone(), F::fone()]);
        for c in self.c.iter().rev() {
            r = r.mul(&lin).add(&Self::constant(c.clone()));
        }
        r
    }
}

impl<F: OrderedField> UPoly<F> {
    /// Canonical Sturm chain p, p', -rem, ...
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut ch = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return ch;
        }
        ch.push(d);
        loop {
            let n = ch.len();
            let r = ch[n - 2].rem(&ch[n - 1]);
            if r.is_zero() {
                break;
            }
            ch.push(r.neg());
        }
        ch
    }

    pub fn sign_at(&self, t: &F) -> i8 {
        self.eval(t).sign()
    }

    /// Sign as x -> +inf (pos = true) or -inf.
    pub fn sign_at_inf(&self, pos: bool) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let s = self.lc().sign();
        if pos || self.deg() % 2 == 0 {
            s
        } else {
            -s
        }
    }
}

/// Point on the extended line used as a Sturm-count endpoint.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound<F> {
    NegInf,
    At(F),
    PosInf,
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for s in signs {
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

pub fn chain_variations<F: OrderedField>(chain: &[UPoly<F>], b: &Bound<F>) -> usize {
    match b {
        Bound::NegInf => variations(chain.iter().map(|p| p.sign_at_inf(false))),
        Bound::PosInf => variations(chain.iter().map(|p| p.sign_at_inf(true))),
        Bound::At(t) => variations(chain.iter().map(|p| p.sign_at(t))),
    }
}

/// Number of distinct roots in the half-open interval (lo, hi] using a precomputed chain.
pub fn chain_count<F: OrderedField>(chain: &[UPoly<F>], lo: &Bound<F>, hi: &Bound<F>) -> usize {
    let a = chain_variations(chain, lo);
    let b = chain_variations(chain, hi);
    a.saturating_sub(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{ri, Rat};

    fn p(v: &[i64]) -> UPoly<Rat> {
        UPoly::new(v.iter().map(|&a| ri(a)).collect())
    }

    #[test]
    fn divrem_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q, p(&[-1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&p(&[-1, 1])), p(&[-1, 1]));
        assert_eq!(p(&[0, 0, 0, 1]).squarefree(), p(&[0, 1]));
    }

    #[test]
    fn sturm_counts() {
        let a = p(&[-1, 0, 1]);
        let ch = a.sturm_chain();
        assert_eq!(chain_count(&ch, &Bound::NegInf, &Bound::PosInf), 2);
        assert_eq!(chain_count(&ch, &Bound::At(ri(0)), &Bound::At(ri(2))), 1);
        let b = p(&[1, 0, 1]);
        assert_eq!(chain_count(&b.sturm_chain(), &Bound::NegInf, &Bound::PosInf), 0);
        // non-squarefree: (x-1)^2 (x+1) has two distinct roots
        let c = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[1, 1]));
        assert_eq!(chain_count(&c.sturm_chain(), &Bound::NegInf, &Bound::PosInf), 2);
    }

    #[test]
    fn shift_eval() {
        let a = p(&[1, 2, 3]);
        let s = a.shift(&ri(2));
        assert_eq!(s.eval(&ri(1)), a.eval(&ri(3)));
    }
}

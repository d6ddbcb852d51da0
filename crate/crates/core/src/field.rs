//! Coefficient field abstraction shared by the univariate machinery.

use crate::rat::{rsign, Rat};
use core::fmt::Debug;
use num_traits::{One, Zero};

pub trait Field: Clone + PartialEq + Debug {
    fn fzero() -> Self;
    fn fone() -> Self;
    fn fis_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Panics on zero.
    fn inv(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;

    fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }
}

pub trait OrderedField: Field {
    fn sign(&self) -> i8;

    fn lt(&self, o: &Self) -> bool {
        self.sub(o).sign() < 0
    }
}

impl Field for Rat {
    fn fzero() -> Self {
        Zero::zero()
    }
    fn fone() -> Self {
        One::one()
    }
    fn fis_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        assert!(!Zero::is_zero(self), "inverse of zero");
        self.recip()
    }
    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }
}

impl OrderedField for Rat {
    fn sign(&self) -> i8 {
        rsign(self)
    }
}

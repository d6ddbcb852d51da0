//! Quotients of polynomials used as function descriptors.

use crate::formula::{poly_to_string, Formula, Rel};
use crate::mpoly::MPoly;
use crate::rat::Rat;
use alloc::format;
use alloc::string::String;

/// num / den, in the same variable slots as the sets they act on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub num: MPoly,
    pub den: MPoly,
}

impl Term {
    pub fn poly(p: MPoly) -> Self {
        Term { num: p, den: MPoly::int(1) }
    }

    pub fn quot(num: MPoly, den: MPoly) -> Self {
        Term { num, den }
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_const()
    }

    /// Formula `self rel 0`, clearing the denominator by its square.
    pub fn sign_atom(&self, r: Rel) -> Formula {
        if self.is_poly() {
            let c = self.den.const_value().unwrap();
            return Formula::atom(self.num.scale(&(Rat::from_integer(1.into()) / c)), r);
        }
        Formula::and2(Formula::atom(self.num.mul(&self.den), r), Formula::atom(self.den.clone(), Rel::Ne))
    }

    /// Formula `y = self` for a slot y not used by the term.
    pub fn graph_atom(&self, y: usize) -> Formula {
        Formula::and2(
            Formula::atom(MPoly::var(y).mul(&self.den).sub(&self.num), Rel::Eq),
            Formula::atom(self.den.clone(), Rel::Ne),
        )
    }

    pub fn eval(&self, x: &[Rat]) -> Option<Rat> {
        let d = self.den.eval(x);
        if d == Rat::from_integer(0.into()) {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.num.eval_f64(x) / self.den.eval_f64(x)
    }

    /// Partial derivative in slot v, as (N'D - ND') / D^2 (or N' for polynomials).
    pub fn derivative(&self, v: usize) -> Term {
        if self.is_poly() {
            return Term { num: self.num.derivative(v), den: self.den.clone() };
        }
        let num = self.num.derivative(v).mul(&self.den).sub(&self.num.mul(&self.den.derivative(v)));
        Term { num, den: self.den.pow(2) }
    }

    pub fn map_polys(&self, f: &dyn Fn(&MPoly) -> MPoly) -> Term {
        Term { num: f(&self.num), den: f(&self.den) }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        if self.is_poly() && self.den == MPoly::int(1) {
            poly_to_string(&self.num, names)
        } else {
            format!("({})/({})", poly_to_string(&self.num, names), poly_to_string(&self.den, names))
        }
    }
}

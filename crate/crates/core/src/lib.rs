#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod alg_eps;
pub mod algebraic;
pub mod cad;
pub mod ctx;
pub mod error;
pub mod field;
pub mod measure;
pub mod mpoly;
pub mod qe;
pub mod fieldelem;
pub mod formula;
pub mod good;
pub mod rat;
pub mod resultant;
pub mod st;
pub mod tau;
pub mod term;
pub mod topology;
pub mod upoly;

pub use error::{Error, Result};
pub use fieldelem::FieldElem;
pub use rat::Rat;

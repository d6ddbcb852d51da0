//! Resultants and principal subresultant coefficients via fraction-free elimination.

use crate::error::{Error, Result};
use crate::mpoly::MPoly;
use alloc::vec::Vec;

/// Determinant by Bareiss elimination; every division is exact.
pub fn det(mut m: Vec<Vec<MPoly>>) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::int(1);
    }
    let mut sign = 1i32;
    let mut prev = MPoly::int(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            // choose the sparsest nonzero pivot below
            let piv = (k + 1..n).filter(|&i| !m[i][k].is_zero()).min_by_key(|&i| m[i][k].t.len());
            match piv {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return MPoly::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = a.div_exact(&prev).expect("Bareiss division is exact");
            }
            m[i][k] = MPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if sign < 0 {
        d.neg()
    } else {
        d
    }
}

/// j-th principal subresultant coefficient of f and g in variable v.
pub fn psc(f: &MPoly, g: &MPoly, v: usize, j: usize) -> MPoly {
    let fc = f.coeffs(v);
    let gc = g.coeffs(v);
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    assert!(j <= m.min(n));
    let rows = m + n - 2 * j;
    if rows == 0 {
        return MPoly::int(1);
    }
    let width = m + n - j;
    let mut mat: Vec<Vec<MPoly>> = Vec::with_capacity(rows);
    // row x^s * f has coefficient of x^(width-1-c) in column c
    for s in (0..n - j).rev() {
        let mut row = alloc::vec![MPoly::zero(); width];
        for (e, c) in fc.iter().enumerate() {
            let pw = e + s;
            row[width - 1 - pw] = c.clone();
        }
        mat.push(row);
    }
    for s in (0..m - j).rev() {
        let mut row = alloc::vec![MPoly::zero(); width];
        for (e, c) in gc.iter().enumerate() {
            let pw = e + s;
            row[width - 1 - pw] = c.clone();
        }
        mat.push(row);
    }
    for r in mat.iter_mut() {
        r.truncate(rows);
    }
    det(mat)
}

pub fn resultant(f: &MPoly, g: &MPoly, v: usize) -> Result<MPoly> {
    if f.is_zero() || g.is_zero() {
        return Err(Error::Invalid("resultant of zero polynomial".into()));
    }
    if f.deg(v) == 0 && g.deg(v) == 0 {
        return Err(Error::Invalid("resultant: both polynomials are constant in the variable".into()));
    }
    if f.deg(v) == 0 {
        return Ok(f.pow(g.deg(v)));
    }
    if g.deg(v) == 0 {
        return Ok(g.pow(f.deg(v)));
    }
    Ok(psc(f, g, v, 0))
}

/// Discriminant normalized so that disc(a x^2 + b x + c) = b^2 - 4ac.
pub fn discriminant(f: &MPoly, v: usize) -> Result<MPoly> {
    let d = f.deg(v);
    if d == 0 {
        return Err(Error::Invalid("discriminant of a constant".into()));
    }
    if d == 1 {
        return Ok(MPoly::int(1));
    }
    let r = resultant(f, &f.derivative(v), v)?;
    let q = r.div_exact(&f.lc(v)).expect("leading coefficient divides resultant");
    let sgn = if (d * (d - 1) / 2) % 2 == 1 { -1 } else { 1 };
    Ok(q.scale(&crate::rat::ri(sgn)))
}

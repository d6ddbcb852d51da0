//! Root counting, isolation and standard parts of roots over Q(eps).

use crate::algebraic::{isolate_at, roots_at, Coord, Interval};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fieldelem::FieldElem;
use crate::mpoly::MPoly;
use crate::rat::{ri, Rat};
use crate::upoly::{chain_count, Bound, UPoly};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Real algebraic element over Q(eps): the unique root of `def` in (lo, hi).
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElem {
    pub def: UPoly<FieldElem>,
    pub lo: FieldElem,
    pub hi: FieldElem,
}

/// Standard part on the extended line.
#[derive(Clone, Debug, PartialEq)]
pub enum Ext {
    NegInf,
    Fin(Coord),
    PosInf,
}

/// p(eps, x_v) as a univariate polynomial over Q(eps).
pub fn to_fe_poly(p: &MPoly, v: usize) -> UPoly<FieldElem> {
    UPoly::new(
        p.coeffs(v)
            .iter()
            .map(|c| FieldElem::from_poly(&c.to_upoly(0).expect("coefficient in eps only")))
            .collect(),
    )
}

fn check_endpoint(p: &UPoly<FieldElem>, b: &Bound<FieldElem>) -> Result<()> {
    if let Bound::At(t) = b {
        if p.eval(t).is_zero() {
            return Err(Error::Invalid(format!("endpoint {} is a root", t)));
        }
    }
    Ok(())
}

/// Distinct roots of p in the open interval (lo, hi).
pub fn sturm_count(p: &UPoly<FieldElem>, lo: &Bound<FieldElem>, hi: &Bound<FieldElem>) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::Invalid(String::from("zero polynomial")));
    }
    check_endpoint(p, lo)?;
    check_endpoint(p, hi)?;
    Ok(chain_count(&p.sturm_chain(), lo, hi))
}

/// Cauchy bound over Q(eps): every root has |x| < 1 + max |a_i / a_n|.
fn fe_root_bound(p: &UPoly<FieldElem>) -> FieldElem {
    let lc = p.lc();
    let mut m = FieldElem::from_int(0);
    for i in 0..p.c.len() - 1 {
        let q = p.c[i].div(&lc).abs();
        if q > m {
            m = q;
        }
    }
    m.add(&FieldElem::from_int(1))
}

/// p(t + eps^j y) as a polynomial in y.
fn recenter(p: &UPoly<FieldElem>, t: &FieldElem, j: i64) -> UPoly<FieldElem> {
    let lin = UPoly::new(vec![t.clone(), FieldElem::eps_pow(j)]);
    let mut out = UPoly::zero();
    for c in p.c.iter().rev() {
        out = out.mul(&lin).add(&UPoly::constant(c.clone()));
    }
    out
}

/// Rationals strictly separating the distinct finite standard parts of the roots of q.
fn separators(q: &UPoly<FieldElem>) -> Vec<Rat> {
    let mut fins: Vec<Coord> = Vec::new();
    for e in root_sts(q, 1).unwrap_or_default() {
        if let Ext::Fin(c) = e {
            if fins.last() != Some(&c) {
                fins.push(c);
            }
        }
    }
    let mut out = Vec::new();
    for (i, c) in fins.iter().enumerate() {
        let (lo, hi) = c.interval();
        out.push(lo.floor() - ri(1));
        if i + 1 < fins.len() {
            let (nl, _) = fins[i + 1].interval();
            if hi < nl {
                out.push(crate::rat::simplest_between(&hi, &nl));
            }
        }
        out.push(hi.ceil() + ri(1));
    }
    out
}

fn find_split(
    sf: &UPoly<FieldElem>,
    ch: &[UPoly<FieldElem>],
    a: &FieldElem,
    c: &FieldElem,
    n: usize,
) -> Result<(FieldElem, usize)> {
    let mut centers = vec![a.clone(), c.clone()];
    for e in root_sts(sf, 1)? {
        if let Ext::Fin(Coord::Rat(r)) = e {
            let f = FieldElem::from_rat(r);
            if !centers.contains(&f) {
                centers.push(f);
            }
        }
    }
    let mut cands = vec![a.add(&c.sub(a).div(&FieldElem::from_int(2)))];
    for j in 0..=6 {
        for t in &centers {
            for q in separators(&recenter(sf, t, j)) {
                cands.push(t.add(&FieldElem::eps_pow(j).mul(&FieldElem::from_rat(q))));
            }
        }
    }
    for m in cands {
        if !(*a < m && m < *c) || sf.eval(&m).is_zero() {
            continue;
        }
        let n1 = chain_count(ch, &Bound::At(a.clone()), &Bound::At(m.clone()));
        if n1 > 0 && n1 < n {
            return Ok((m, n1));
        }
    }
    Err(Error::Domain(format!(
        "{} roots in ({}, {}) are not separated by elements of Q(eps); reparametrize eps := eta^m",
        n, a, c
    )))
}

/// Isolate all roots; fails when two roots are not separated by any element of Q(eps) tried.
pub fn isolate_roots(p: &UPoly<FieldElem>) -> Result<Vec<AlgElem>> {
    if p.is_zero() {
        return Err(Error::Invalid(String::from("zero polynomial")));
    }
    let sf = p.squarefree();
    if sf.deg() < 1 {
        return Ok(Vec::new());
    }
    let ch = sf.sturm_chain();
    let b = fe_root_bound(&sf);
    let lo = b.neg();
    let n = chain_count(&ch, &Bound::At(lo.clone()), &Bound::At(b.clone()));
    let mut out = Vec::new();
    let mut work = vec![(lo, b, n)];
    while let Some((a, c, n)) = work.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push(AlgElem { def: sf.clone(), lo: a, hi: c });
            continue;
        }
        let split = find_split(&sf, &ch, &a, &c, n)?;
        let (m, n1) = split;
        work.push((m.clone(), c, n - n1));
        work.push((a, m, n1));
    }
    out.sort_by(|x, y| x.lo.partial_cmp(&y.lo).unwrap());
    Ok(out)
}

/// Lowest-order part in eps of a polynomial over Q(eps), as a polynomial over Q.
pub fn lowest_part(p: &UPoly<FieldElem>) -> UPoly<Rat> {
    let k = p.c.iter().filter(|c| !c.is_zero()).map(|c| c.order()).min().unwrap_or(0);
    UPoly::new(p.c.iter().map(|c| if !c.is_zero() && c.order() == k { c.leading() } else { ri(0) }).collect())
}

/// Lowest-order part in eps (slot 0) of a multivariate polynomial.
pub fn lowest_eps_part(p: &MPoly) -> MPoly {
    let k = p.t.keys().map(|m| m.exp(0)).min().unwrap_or(0);
    let mut out = MPoly::zero();
    for (m, c) in &p.t {
        if m.exp(0) == k {
            let mut e = m.0.clone();
            if !e.is_empty() {
                e[0] = 0;
            }
            out = out.add(&MPoly::monomial(crate::mpoly::Mono::new(e), c.clone()));
        }
    }
    out
}

/// Real roots of a polynomial over Q (in slot `v`) with isolating intervals usable for counting.
pub fn q_roots(f: &UPoly<Rat>, v: usize) -> (Vec<Coord>, Vec<Interval>) {
    let mp = MPoly::from_upoly(&f.squarefree(), v);
    let mut prefix: Vec<Coord> = (0..v).map(|_| Coord::Rat(ri(0))).collect();
    let ivs = isolate_at(&mut prefix, &mp, v);
    let rs = roots_at(&mut prefix, &mp, v);
    (rs, ivs)
}

/// Standard parts of the distinct roots of p in the real closure of Q(eps), ascending.
///
/// Coordinates of finite standard parts are expressed in slot `v`.
pub fn root_sts(p: &UPoly<FieldElem>, v: usize) -> Result<Vec<Ext>> {
    if p.is_zero() {
        return Err(Error::Invalid(String::from("zero polynomial")));
    }
    let sf = p.squarefree();
    let ch = sf.sturm_chain();
    let total = chain_count(&ch, &Bound::NegInf, &Bound::PosInf);
    let f0 = lowest_part(&sf);
    let (rs, ivs) = if f0.deg() >= 1 { q_roots(&f0, v) } else { (Vec::new(), Vec::new()) };
    let fe = |r: &Rat| Bound::At(FieldElem::from_rat(r.clone()));
    let mut out = Vec::new();
    let below = if ivs.is_empty() {
        let mut q = ri(0);
        while sf.eval(&FieldElem::from_rat(q.clone())).is_zero() {
            q += ri(1);
        }
        chain_count(&ch, &Bound::NegInf, &fe(&q))
    } else {
        chain_count(&ch, &Bound::NegInf, &fe(&ivs[0].0))
    };
    out.extend(core::iter::repeat(Ext::NegInf).take(below));
    let mut seen = below;
    for (r, (a, b)) in rs.iter().zip(&ivs) {
        let c = chain_count(&ch, &fe(a), &fe(b));
        out.extend(core::iter::repeat(Ext::Fin(r.clone())).take(c));
        seen += c;
    }
    out.extend(core::iter::repeat(Ext::PosInf).take(total - seen));
    Ok(out)
}

impl AlgElem {
    /// Standard part of this root (slot `v` for the coordinate).
    pub fn st(&self, v: usize) -> Result<Ext> {
        let all = root_sts(&self.def, v)?;
        let ch = self.def.squarefree().sturm_chain();
        let idx = chain_count(&ch, &Bound::NegInf, &Bound::At(self.lo.clone()));
        Ok(all[idx].clone())
    }

    pub fn is_bounded(&self) -> bool {
        true
    }

    /// Narrow the isolating interval by bisection until its width is below `w`.
    pub fn refine(&mut self, w: &FieldElem) {
        let ch = self.def.sturm_chain();
        while self.hi.sub(&self.lo) > *w {
            let m = self.lo.add(&self.hi).div(&FieldElem::from_int(2));
            if self.def.eval(&m).is_zero() {
                self.lo = m.clone();
                self.hi = m;
                return;
            }
            if chain_count(&ch, &Bound::At(self.lo.clone()), &Bound::At(m.clone())) == 1 {
                self.hi = m;
            } else {
                self.lo = m;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rq;

    fn fe(i: i64) -> FieldElem {
        FieldElem::from_int(i)
    }

    fn x2_minus_eps() -> UPoly<FieldElem> {
        UPoly::new(vec![FieldElem::eps().neg(), fe(0), fe(1)])
    }

    #[test]
    fn counts() {
        let p = UPoly::new(vec![fe(1), fe(0), fe(1)]);
        assert_eq!(sturm_count(&p, &Bound::NegInf, &Bound::PosInf).unwrap(), 0);
        let q = UPoly::new(vec![fe(0), fe(1)]);
        assert_eq!(sturm_count(&q, &Bound::At(fe(-1)), &Bound::At(fe(1))).unwrap(), 1);
        let r = x2_minus_eps();
        assert_eq!(sturm_count(&r, &Bound::At(fe(0)), &Bound::At(fe(1))).unwrap(), 1);
        assert!(sturm_count(&q, &Bound::At(fe(0)), &Bound::At(fe(1))).is_err());
    }

    #[test]
    fn isolation() {
        let p = UPoly::new(vec![fe(-1), fe(0), fe(1)]);
        let rs = isolate_roots(&p).unwrap();
        assert_eq!(rs.len(), 2);
        let r = isolate_roots(&x2_minus_eps()).unwrap();
        assert_eq!(r.len(), 2);
        let mut r0 = r[0].clone();
        r0.refine(&FieldElem::from_rat(rq(1, 1000)));
        assert!(r0.hi.sub(&r0.lo) <= FieldElem::from_rat(rq(1, 1000)));
        let cube = UPoly::new(vec![fe(0), fe(0), fe(0), fe(1)]);
        assert_eq!(isolate_roots(&cube).unwrap().len(), 1);
        // roots eps and 2 eps are separable
        let e = FieldElem::eps();
        let two_e = e.mul(&fe(2));
        let q = UPoly::new(vec![e.neg(), fe(1)]).mul(&UPoly::new(vec![two_e.neg(), fe(1)]));
        assert_eq!(isolate_roots(&q).unwrap().len(), 2);
        // 1 + eps and 1 + 2 eps need a recentred separator
        let a = UPoly::new(vec![fe(-1).sub(&e), fe(1)]);
        let b = UPoly::new(vec![fe(-1).sub(&two_e), fe(1)]);
        assert_eq!(isolate_roots(&a.mul(&b)).unwrap().len(), 2);
        // +-sqrt(eps) and +-2 sqrt(eps): no separator in Q(eps) between sqrt(eps) and 2 sqrt(eps)
        let c = x2_minus_eps().mul(&UPoly::new(vec![e.mul(&fe(-4)), fe(0), fe(1)]));
        assert!(matches!(isolate_roots(&c), Err(Error::Domain(_))));
    }

    #[test]
    fn standard_parts() {
        let s = root_sts(&x2_minus_eps(), 1).unwrap();
        assert_eq!(s, vec![Ext::Fin(Coord::Rat(ri(0))), Ext::Fin(Coord::Rat(ri(0)))]);
        // eps x^2 - 1: roots +-1/sqrt(eps)
        let p = UPoly::new(vec![fe(-1), fe(0), FieldElem::eps()]);
        assert_eq!(root_sts(&p, 1).unwrap(), vec![Ext::NegInf, Ext::PosInf]);
        // (x - 1 - eps)(eps x - 1)
        let a = UPoly::new(vec![fe(-1).sub(&FieldElem::eps()), fe(1)]);
        let b = UPoly::new(vec![fe(-1), FieldElem::eps()]);
        let st = root_sts(&a.mul(&b), 1).unwrap();
        assert_eq!(st, vec![Ext::Fin(Coord::Rat(ri(1))), Ext::PosInf]);
        let rs = isolate_roots(&a.mul(&b)).unwrap();
        assert_eq!(rs[1].st(1).unwrap(), Ext::PosInf);
    }
}

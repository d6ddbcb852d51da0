//! Closures of good cells as st-sets and connectedness of st-sets.

use crate::cad::Cad;
use crate::ctx::Ctx;
use crate::error::{Error, Result};
use crate::formula::{Formula, Rel, SaFormula};
use crate::good::GoodCell;
use crate::mpoly::MPoly;
use crate::qe::{self, cell_formulas, prepare, qe_prepared};
use crate::st::{is_strongly_bounded, st_set_internal};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// A definable family X_r, decreasing as r grows, with slot 0 holding r.
#[derive(Clone, Debug, PartialEq)]
pub struct ShrinkFamily {
    pub family: SaFormula,
    /// The family is defined for 0 < r < r0.
    pub r0: crate::Rat,
}

impl ShrinkFamily {
    /// X_r at r = eps^m.
    pub fn at_eps_pow(&self, m: u32) -> SaFormula {
        let e = MPoly::var(0).pow(m);
        let body = self.family.body.map_polys(&|p| p.subst(0, &e));
        SaFormula { names: self.family.names.clone(), nfree: self.family.nfree, body }
    }
}

fn strengthen(f: &Formula) -> Formula {
    let r = MPoly::var(0);
    match f {
        Formula::Atom(a, rel, b) => {
            let p = a.sub(b);
            match rel {
                Rel::Gt => Formula::atom(p.sub(&r), Rel::Ge),
                Rel::Lt => Formula::atom(p.add(&r), Rel::Le),
                Rel::Ne => Formula::atom(p.pow(2).sub(&r.pow(2)), Rel::Ge),
                _ => f.clone(),
            }
        }
        Formula::And(gs) => Formula::and(gs.iter().map(strengthen).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(strengthen).collect()),
        Formula::Exists(v, g) => Formula::Exists(*v, Box::new(strengthen(g))),
        Formula::Forall(v, g) => Formula::Forall(*v, Box::new(strengthen(g))),
        other => other.clone(),
    }
}

fn in_unit_box(c: &SaFormula) -> bool {
    let out: Vec<Formula> = (1..=c.nfree)
        .map(|i| Formula::atom(MPoly::var(i).pow(2).sub(&MPoly::int(1)), Rel::Gt))
        .collect();
    qe::sa_empty(&SaFormula::new(c.nfree, Formula::and2(c.body.clone(), Formula::or(out))))
}

/// Family shrinking C from inside: strict sign conditions get margin r; coordinates of cells
/// leaving [-1, 1]^n stay in [-1/r, 1/r].
pub fn shrink_family(c: &GoodCell) -> ShrinkFamily {
    let n = c.n();
    let mut cs = vec![strengthen(&c.region.body.nnf())];
    let r = MPoly::var(0);
    let bounded = in_unit_box(&c.region);
    for i in (1..=n).filter(|_| !bounded) {
        let rx = r.mul(&MPoly::var(i));
        cs.push(Formula::atom(rx.sub(&MPoly::int(1)), Rel::Le));
        cs.push(Formula::atom(rx.add(&MPoly::int(1)), Rel::Ge));
    }
    let mut names = c.region.names.clone();
    names[0] = String::from("r");
    ShrinkFamily { family: SaFormula::with_names(names, n, Formula::and(cs)), r0: crate::rat::ri(1) }
}

/// Certificate for a closure computed as an st-set.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureCertificate {
    pub family: ShrinkFamily,
    /// Exponent m with r = eps^m.
    pub exponent: u32,
    /// X_s contains X_r for 0 < s < r infinitesimal (decided for n <= 1).
    pub monotone: Option<bool>,
    pub closure: SaFormula,
}

/// X over Q(eps) with st X equal to the closure of C.
pub fn closure_as_st(c: &GoodCell, ctx: &Ctx) -> Result<(SaFormula, ClosureCertificate)> {
    let n = c.n();
    if n > 2 {
        return Err(Error::Budget(format!("closures are supported for n <= 2, got {}", n)));
    }
    let fam = shrink_family(c);
    let closure = closure_oracle(&c.region, ctx)?;
    let monotone = if n <= 1 { Some(decide_monotone(&fam)) } else { None };
    for m in [1u32, 2] {
        let x = fam.at_eps_pow(m);
        let s = st_set_internal(&x, ctx)?;
        if qe::sa_equal(&s.result, &closure)? {
            let mut x = x;
            x.names[0] = String::from("eps");
            return Ok((x, ClosureCertificate { family: fam, exponent: m, monotone, closure }));
        }
    }
    Err(Error::Certificate(String::from("st of the shrunk family differs from the closure")))
}

/// Closure of a set over Q, from its CAD: the union of the closures of its cells.
fn closure_oracle(region: &SaFormula, ctx: &Ctx) -> Result<SaFormula> {
    // for a set over Q, st is the topological closure
    Ok(st_set_internal(region, ctx)?.result)
}

fn decide_monotone(fam: &ShrinkFamily) -> bool {
    // forall s (0 < s < eps -> forall x (X_eps(x) -> X_s(x)))
    let n = fam.family.nfree;
    let s = fam.family.fresh_var();
    let xs = |f: &Formula| f.map_vars(&|i| if i >= 1 && i <= n { s + i } else { i });
    let big = xs(&fam.family.body);
    let small = xs(&fam.family.body.map_polys(&|p| p.subst(0, &MPoly::var(s))));
    let big = big.map_vars(&|i| if i > s + n { i + 2 * n + 4 } else { i });
    let small = small.map_vars(&|i| if i > s + n { i + 4 * n + 8 } else { i });
    let mut inner = Formula::implies(big, small);
    for i in (1..=n).rev() {
        inner = Formula::Forall(s + i, Box::new(inner));
    }
    let range = Formula::and2(Formula::atom(MPoly::var(s), Rel::Gt), Formula::atom(MPoly::var(s).sub(&MPoly::var(0)), Rel::Lt));
    let sent = Formula::Forall(s, Box::new(Formula::implies(range, inner)));
    qe::decide_prepared(&prepare(&SaFormula::new(0, sent)))
}

/// Connectedness of st X with a separating pair when disconnected.
#[derive(Clone, Debug, PartialEq)]
pub struct Connectedness {
    pub connected: bool,
    /// Components of st X (each a union of cells), in CAD order.
    pub components: Vec<SaFormula>,
    /// Two disjoint nonempty relatively clopen sets covering st X.
    pub witness: Option<(SaFormula, SaFormula)>,
}

fn find(p: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while p[r] != r {
        r = p[r];
    }
    p[i] = r;
    r
}

/// Decide connectedness of st X by adjacency of the cells of st X.
pub fn is_connected_st(x: &SaFormula, ctx: &Ctx) -> Result<Connectedness> {
    let n = x.nfree;
    if n > 2 {
        return Err(Error::Budget(format!("connectedness is supported for n <= 2, got {}", n)));
    }
    if !is_strongly_bounded(x, ctx)? {
        return Err(Error::Domain(String::from("precondition failed: X is not strongly bounded")));
    }
    let s = st_set_internal(x, ctx)?.result;
    let names = s.names[..=n].to_vec();
    let p = prepare(&s);
    let mut ps = p.polys();
    ps.retain(|q| !q.is_const());
    let mut cad = Cad::build(&ps, n + 1, n, n);
    let forms = cell_formulas(&mut cad, n).ok_or_else(|| Error::Certificate(String::from("cells are not sign-definable")))?;
    let cells: Vec<SaFormula> = forms
        .into_iter()
        .map(|f| SaFormula::with_names(names.clone(), n, f))
        .filter(|c| !qe::sa_empty(&qe::intersection(c, &s).unwrap()))
        .collect();
    let k = cells.len();
    let mut closures = Vec::with_capacity(k);
    for c in &cells {
        closures.push(st_set_internal(c, ctx)?.result);
    }
    let mut parent: Vec<usize> = (0..k).collect();
    for i in 0..k {
        for j in i + 1..k {
            if find(&mut parent, i) == find(&mut parent, j) {
                continue;
            }
            let touch = !qe::sa_empty(&qe::intersection(&closures[i], &cells[j])?)
                || !qe::sa_empty(&qe::intersection(&cells[i], &closures[j])?);
            if touch {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                parent[b] = a;
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        match roots.iter().position(|&q| q == r) {
            Some(g) => groups[g].push(i),
            None => {
                roots.push(r);
                groups.push(vec![i]);
            }
        }
    }
    let union_of = |ids: &[usize]| {
        let body = Formula::or(ids.iter().map(|&i| cells[i].body.clone()).collect());
        let f = SaFormula::with_names(names.clone(), n, body);
        SaFormula::with_names(names.clone(), n, qe_prepared(&prepare(&f)))
    };
    let components: Vec<SaFormula> = groups.iter().map(|g| union_of(g)).collect();
    let connected = components.len() <= 1;
    let witness = if connected {
        None
    } else {
        let rest: Vec<usize> = groups[1..].iter().flatten().copied().collect();
        Some((components[0].clone(), union_of(&rest)))
    };
    Ok(Connectedness { connected, components, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::good::good_decomposition_box;
    use crate::rat::rq;

    fn v(i: usize) -> MPoly {
        MPoly::var(i)
    }
    fn c(n: i64, d: i64) -> MPoly {
        MPoly::constant(rq(n, d))
    }
    fn at(p: MPoly, r: Rel) -> Formula {
        Formula::atom(p, r)
    }

    #[test]
    fn closures_of_cells() {
        let ctx = Ctx::default();
        let x = SaFormula::new(1, Formula::and2(at(v(1).sub(&v(0)), Rel::Gt), at(v(1).sub(&c(1, 1)).add(&v(0)), Rel::Lt)));
        let d = good_decomposition_box(&[x], None, &ctx).unwrap();
        for cell in &d.cells {
            let (_, cert) = closure_as_st(cell, &ctx).unwrap();
            assert_eq!(cert.monotone, Some(true));
        }
        let sq = SaFormula::new(
            2,
            Formula::and(vec![at(v(1), Rel::Gt), at(v(1).sub(&c(1, 1)), Rel::Lt), at(v(2), Rel::Gt), at(v(2).sub(&c(1, 1)), Rel::Lt)]),
        );
        let d = good_decomposition_box(&[sq.clone()], None, &ctx).unwrap();
        let open = d.cells.iter().find(|cl| qe::sa_equal(&cl.region, &sq).unwrap()).unwrap();
        let (_, cert) = closure_as_st(open, &ctx).unwrap();
        let closed = SaFormula::new(
            2,
            Formula::and(vec![at(v(1), Rel::Ge), at(v(1).sub(&c(1, 1)), Rel::Le), at(v(2), Rel::Ge), at(v(2).sub(&c(1, 1)), Rel::Le)]),
        );
        assert!(qe::sa_equal(&cert.closure, &closed).unwrap());
    }

    #[test]
    fn connectedness() {
        let ctx = Ctx::default();
        let circle = SaFormula::new(2, at(v(1).pow(2).add(&v(2).pow(2)).sub(&c(1, 1)), Rel::Eq));
        assert!(is_connected_st(&circle, &ctx).unwrap().connected);
        let two = SaFormula::new(1, Formula::or2(at(v(1).sub(&v(0)), Rel::Eq), at(v(1).sub(&c(1, 1)), Rel::Eq)));
        let r = is_connected_st(&two, &ctx).unwrap();
        assert!(!r.connected);
        let (a, b) = r.witness.unwrap();
        assert!(qe::sa_equal(&a, &SaFormula::new(1, at(v(1), Rel::Eq))).unwrap());
        assert!(qe::sa_equal(&b, &SaFormula::new(1, at(v(1).sub(&c(1, 1)), Rel::Eq))).unwrap());
        // xy = eps, eps <= x <= 1: st is the L-shape
        let arc = SaFormula::new(
            2,
            Formula::and(vec![at(v(1).mul(&v(2)).sub(&v(0)), Rel::Eq), at(v(1).sub(&v(0)), Rel::Ge), at(v(1).sub(&c(1, 1)), Rel::Le)]),
        );
        assert!(is_connected_st(&arc, &ctx).unwrap().connected);
    }
}

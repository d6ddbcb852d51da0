//! Standard part of definable sets over Q(eps), computed through transfer to real parameters.

use crate::alg_eps::{lowest_eps_part, root_sts, to_fe_poly, Ext};
use crate::algebraic::{compare_coords, sign_at, Coord};
use crate::cad::{project, Cad};
use crate::ctx::Ctx;
use crate::error::{Error, Result};
use crate::fieldelem::FieldElem;
use crate::formula::{Formula, Rel, SaFormula};
use crate::mpoly::MPoly;
use crate::qe::{self, describe_cells, prepare, qe_prepared, truth_cad, Prepared};
use crate::rat::{ri, Rat};
use crate::resultant::resultant;
use crate::term::Term;
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Closed piece [lo, hi] of the line; `lo` is never +inf and `hi` never -inf.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub lo: Ext,
    pub hi: Ext,
}

impl Piece {
    pub fn is_point(&self) -> bool {
        matches!((&self.lo, &self.hi), (Ext::Fin(a), Ext::Fin(b)) if a == b)
    }
}

/// st(X) for a source set X over Q(eps).
#[derive(Clone, Debug, PartialEq)]
pub struct StSet {
    pub source: SaFormula,
    /// Quantifier-free closed set over Q.
    pub result: SaFormula,
    /// Explicit intervals and points when n = 1.
    pub pieces: Option<Vec<Piece>>,
}

fn zero_prefix(v: usize) -> Vec<Coord> {
    (0..v).map(|_| Coord::Rat(ri(0))).collect()
}

pub fn ext_cmp(prefix: &mut [Coord], a: &Ext, b: &Ext) -> i8 {
    match (a, b) {
        (Ext::NegInf, Ext::NegInf) | (Ext::PosInf, Ext::PosInf) => 0,
        (Ext::NegInf, _) | (_, Ext::PosInf) => -1,
        (_, Ext::NegInf) | (Ext::PosInf, _) => 1,
        (Ext::Fin(x), Ext::Fin(y)) => compare_coords(prefix, &mut x.clone(), &mut y.clone()),
    }
}

/// Sort and merge overlapping pieces.
pub fn normalize_pieces(mut ps: Vec<Piece>, v: usize) -> Vec<Piece> {
    let mut pre = zero_prefix(v);
    // insertion sort: comparisons are exact but not cheap
    let mut sorted: Vec<Piece> = Vec::with_capacity(ps.len());
    for p in ps.drain(..) {
        let pos = sorted.iter().position(|q| ext_cmp(&mut pre, &p.lo, &q.lo) < 0).unwrap_or(sorted.len());
        sorted.insert(pos, p);
    }
    let mut out: Vec<Piece> = Vec::new();
    for p in sorted {
        if let Some(last) = out.last_mut() {
            if ext_cmp(&mut pre, &p.lo, &last.hi) <= 0 {
                if ext_cmp(&mut pre, &p.hi, &last.hi) > 0 {
                    last.hi = p.hi;
                }
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// y in the union of pieces; y and the piece endpoints live in slot prefix.len().
pub fn in_pieces(prefix: &mut [Coord], y: &Coord, ps: &[Piece]) -> bool {
    let e = Ext::Fin(y.clone());
    ps.iter().any(|p| ext_cmp(prefix, &p.lo, &e) <= 0 && ext_cmp(prefix, &e, &p.hi) <= 0)
}

fn x_minus(v: usize, a: &Rat) -> MPoly {
    MPoly::var(v).sub(&MPoly::constant(a.clone()))
}

/// x_v >= a (ge = true) or x_v <= a.
fn bound_formula(v: usize, a: &Coord, ge: bool) -> Formula {
    match a {
        Coord::Rat(r) if ge => Formula::cmp(MPoly::constant(r.clone()), Rel::Le, MPoly::var(v)),
        Coord::Rat(r) => Formula::cmp(MPoly::var(v), Rel::Le, MPoly::constant(r.clone())),
        Coord::Alg { def, lo, hi, .. } => {
            let mut pt = zero_prefix(v);
            if ge {
                pt.push(Coord::Rat(hi.clone()));
                let s = sign_at(&mut pt, def);
                Formula::or2(
                    Formula::atom(x_minus(v, hi), Rel::Ge),
                    Formula::and2(Formula::atom(x_minus(v, lo), Rel::Gt), Formula::atom(def.scale(&ri(s as i64)), Rel::Ge)),
                )
            } else {
                pt.push(Coord::Rat(lo.clone()));
                let s = sign_at(&mut pt, def);
                Formula::or2(
                    Formula::atom(x_minus(v, lo), Rel::Le),
                    Formula::and2(Formula::atom(x_minus(v, hi), Rel::Lt), Formula::atom(def.scale(&ri(s as i64)), Rel::Ge)),
                )
            }
        }
    }
}

fn point_formula(v: usize, a: &Coord) -> Formula {
    match a {
        Coord::Rat(r) => Formula::cmp(MPoly::var(v), Rel::Eq, MPoly::constant(r.clone())),
        Coord::Alg { def, lo, hi, .. } => Formula::and(vec![
            Formula::atom(def.clone(), Rel::Eq),
            Formula::atom(x_minus(v, lo), Rel::Gt),
            Formula::atom(x_minus(v, hi), Rel::Lt),
        ]),
    }
}

pub fn pieces_formula(ps: &[Piece], v: usize) -> Formula {
    Formula::or(
        ps.iter()
            .map(|p| {
                if p.is_point() {
                    if let Ext::Fin(a) = &p.lo {
                        return point_formula(v, a);
                    }
                }
                let mut cs = Vec::new();
                if let Ext::Fin(a) = &p.lo {
                    cs.push(bound_formula(v, a, true));
                }
                if let Ext::Fin(b) = &p.hi {
                    cs.push(bound_formula(v, b, false));
                }
                Formula::and(cs)
            })
            .collect(),
    )
}

/// st of a one-free-variable set (slot 1, eps in slot 0); endpoint coordinates are placed in slot v.
pub fn st_pieces(p: &Prepared, v: usize) -> Result<Vec<Piece>> {
    debug_assert_eq!(p.nfree, 1);
    let tc = truth_cad(p, false);
    let leaves = tc.cad.leaves();
    let facs = &tc.cad.proj.levels[1];
    let mut counters = vec![0usize; facs.len()];
    let mut cache: Vec<Option<Vec<Ext>>> = vec![None; facs.len()];
    let mut sec: Vec<Option<Ext>> = vec![None; leaves.len()];
    for (j, leaf) in leaves.iter().enumerate() {
        if j % 2 == 0 {
            continue;
        }
        let mut pt = leaf.sample.clone();
        let mut found = None;
        for (fi, f) in facs.iter().enumerate() {
            if sign_at(&mut pt, f) == 0 {
                if found.is_none() {
                    found = Some((fi, counters[fi]));
                }
                counters[fi] += 1;
            }
        }
        let (fi, idx) = found.ok_or_else(|| Error::Invalid(String::from("section without a vanishing factor")))?;
        if cache[fi].is_none() {
            cache[fi] = Some(root_sts(&to_fe_poly(&facs[fi], 1), v)?);
        }
        let sts = cache[fi].as_ref().unwrap();
        let e = sts.get(idx).cloned().ok_or_else(|| Error::Certificate(String::from("root count differs at the sample")))?;
        sec[j] = Some(e);
    }
    let mut ps = Vec::new();
    for (j, &t) in tc.truth.iter().enumerate() {
        if !t {
            continue;
        }
        if j % 2 == 1 {
            if let Some(Ext::Fin(a)) = &sec[j] {
                ps.push(Piece { lo: Ext::Fin(a.clone()), hi: Ext::Fin(a.clone()) });
            }
        } else {
            let lo = if j == 0 { Ext::NegInf } else { sec[j - 1].clone().unwrap() };
            let hi = if j + 1 == leaves.len() { Ext::PosInf } else { sec[j + 1].clone().unwrap() };
            if lo != Ext::PosInf && hi != Ext::NegInf {
                ps.push(Piece { lo, hi });
            }
        }
    }
    Ok(normalize_pieces(ps, v))
}

fn budget(f: &SaFormula, ctx: &Ctx, maxn: usize) -> Result<()> {
    if f.nfree > maxn {
        return Err(Error::Budget(format!("st supports at most {} free variables, got {}", maxn, f.nfree)));
    }
    let p = prepare(f);
    let nv = p.nfree + p.prefix.len();
    if nv > ctx.max_vars {
        return Err(Error::Budget(format!("{} variables exceed the limit of {}", nv, ctx.max_vars)));
    }
    Ok(())
}

/// st of a set in one variable as explicit closed pieces.
pub fn st_onevar(f: &SaFormula, ctx: &Ctx) -> Result<StSet> {
    if f.nfree != 1 {
        return Err(Error::Arity(format!("st_onevar needs one free variable, got {}", f.nfree)));
    }
    budget(f, ctx, 1)?;
    let ps = st_pieces(&prepare(f), 1)?;
    let body = pieces_formula(&ps, 1);
    Ok(StSet { source: f.clone(), result: SaFormula::with_names(f.names[..=1].to_vec(), 1, body), pieces: Some(ps) })
}

/// Polynomials over Q whose CAD is expected to carry st(X) for X in the plane.
fn candidate_polys(qf: &Formula) -> Vec<MPoly> {
    let mut ps = Vec::new();
    qf.polys(&mut ps);
    let proj = project(&ps, 3, 0);
    let mut out: Vec<MPoly> = Vec::new();
    let mut push = |p: MPoly| {
        let q = lowest_eps_part(&p);
        if !q.is_const() && !out.contains(&q) {
            out.push(q);
        }
    };
    for f in proj.levels[1].iter().chain(proj.levels[2].iter()) {
        push(f.clone());
    }
    let l2 = &proj.levels[2];
    for i in 0..l2.len() {
        if l2[i].deg(1) == 0 {
            continue;
        }
        let d = l2[i].derivative(1);
        if !d.is_zero() {
            if let Ok(r) = resultant(&l2[i], &d, 1) {
                push(r);
            }
        }
        for g in l2.iter().skip(i + 1).chain(proj.levels[1].iter()) {
            if g.deg(1) > 0 {
                if let Ok(r) = resultant(&l2[i], g, 1) {
                    push(r);
                }
            }
        }
    }
    out
}

/// {x2 : phi(c, x2)} for rational c, as a one-variable problem.
fn sector_fiber(qf: &Formula, c: &Rat) -> Prepared {
    let m = qf.map_polys(&|p| p.subst_rat(1, c)).map_vars(&|i| if i == 2 { 1 } else { i });
    Prepared { nfree: 1, prefix: Vec::new(), matrix: m }
}

/// {x2 : exists t near a, phi(t, x2)} with eps := eta^m and window width of order eta.
fn window_fiber(qf: &Formula, a: &Coord, m: u32) -> Prepared {
    let eta = MPoly::var(0);
    let em = eta.pow(m);
    let body = qf
        .map_polys(&|p| p.subst(0, &em))
        .map_vars(&|i| match i {
            1 => 2,
            2 => 1,
            j => j,
        });
    let t = MPoly::var(2);
    let win = match a {
        Coord::Rat(r) => {
            let d = t.sub(&MPoly::constant(r.clone()));
            Formula::and2(Formula::atom(d.sub(&eta), Rel::Lt), Formula::atom(d.add(&eta), Rel::Gt))
        }
        Coord::Alg { def, lo, hi, .. } => {
            let g = def.map_vars(|i| if i == 1 { 2 } else { i });
            Formula::and(vec![
                Formula::atom(t.sub(&MPoly::constant(lo.clone())), Rel::Gt),
                Formula::atom(t.sub(&MPoly::constant(hi.clone())), Rel::Lt),
                Formula::atom(g.sub(&eta), Rel::Lt),
                Formula::atom(g.add(&eta), Rel::Gt),
            ])
        }
    };
    Prepared { nfree: 1, prefix: vec![true], matrix: Formula::and2(win, body) }
}

/// Fiber pieces (slot 2) whose finite endpoints are all sections of the candidate stack.
fn checked_fiber(pr: &Prepared, pt: &mut [Coord], sections: &[Coord]) -> Result<core::result::Result<Vec<Piece>, Coord>> {
    let ps = st_pieces(pr, 2)?;
    for p in &ps {
        for e in [&p.lo, &p.hi] {
            if let Ext::Fin(c) = e {
                let ok = sections.iter().any(|s| compare_coords(pt, &mut c.clone(), &mut s.clone()) == 0);
                if !ok {
                    return Ok(Err(c.clone()));
                }
            }
        }
    }
    Ok(Ok(ps))
}

fn st_plane(qf: &Formula, ctx: &Ctx) -> Result<Formula> {
    let uses_eps = {
        let mut ps = Vec::new();
        qf.polys(&mut ps);
        ps.iter().any(|p| p.uses_var(0))
    };
    let m0 = if uses_eps { ctx.reparam_depth } else { 1 };
    let cands = candidate_polys(qf);
    for closure in [0usize, 2] {
        let mut d = Cad::build(&cands, 3, 2, closure);
        let mut truth = vec![false; d.leaves().len()];
        let n1 = d.cells[1].len();
        for i in 0..n1 {
            let mut pt = d.cells[1][i].sample.clone();
            let kids = d.cells[1][i].children.clone();
            let sections: Vec<Coord> = kids.iter().skip(1).step_by(2).map(|&k| d.cells[2][k].sample[2].clone()).collect();
            let fiber = if i % 2 == 0 {
                let c = pt[1].as_rat().unwrap().clone();
                match checked_fiber(&sector_fiber(qf, &c), &mut pt, &sections)? {
                    Ok(ps) => ps,
                    Err(bad) => {
                        return Err(Error::Certificate(format!(
                            "fiber endpoint {:.6} over x = {} is not a candidate section",
                            bad.approx(),
                            crate::rat::rat_to_string(&c)
                        )))
                    }
                }
            } else {
                let mut res = None;
                let mut last_bad = None;
                for m in [m0, 2 * m0] {
                    match checked_fiber(&window_fiber(qf, &pt[1], m), &mut pt, &sections)? {
                        Ok(ps) => {
                            res = Some(ps);
                            break;
                        }
                        Err(bad) => last_bad = Some(bad),
                    }
                    if !uses_eps {
                        break;
                    }
                }
                match res {
                    Some(ps) => ps,
                    None => {
                        return Err(Error::Certificate(format!(
                            "window fiber endpoint {:.6} over x ~ {:.6} is not a candidate section",
                            last_bad.unwrap().approx(),
                            pt[1].approx()
                        )))
                    }
                }
            };
            for &k in &kids {
                let y = d.cells[2][k].sample[2].clone();
                truth[k] = in_pieces(&mut pt, &y, &fiber);
            }
        }
        if let Some(f) = describe_cells(&mut d, &truth, 2) {
            return Ok(f);
        }
    }
    Err(Error::Certificate(String::from("st set is not sign-definable on the candidate decomposition")))
}

/// st(X) for X in R^n, n <= 2.
pub fn st_set(f: &SaFormula, ctx: &Ctx) -> Result<StSet> {
    budget(f, ctx, 2)?;
    match f.nfree {
        0 => {
            // a sentence: st of a point set in R^0 is the set itself
            let t = qe::decide_prepared(&prepare(f));
            let body = if t { Formula::True } else { Formula::False };
            Ok(StSet { source: f.clone(), result: SaFormula::with_names(f.names[..1].to_vec(), 0, body), pieces: None })
        }
        1 => st_onevar(f, ctx),
        _ => {
            let qf = qe_prepared(&prepare(f));
            let body = st_plane(&qf, ctx)?;
            Ok(StSet { source: f.clone(), result: SaFormula::with_names(f.names[..=2].to_vec(), 2, body), pieces: None })
        }
    }
}

/// Same as st_set without the user-facing variable budget (used internally with an extra variable).
pub fn st_set_internal(f: &SaFormula, ctx: &Ctx) -> Result<StSet> {
    let mut c = ctx.clone();
    c.max_vars = c.max_vars.max(f.nfree + prepare(f).prefix.len());
    st_set(f, &c)
}

/// Whether X is bounded by some element of the field: exists R forall x (phi -> |x_i| <= R).
pub fn is_bounded(f: &SaFormula) -> bool {
    let n = f.nfree;
    let r = f.fresh_var();
    // move free variables to bound slots above r
    let body = f.body.map_vars(&|i| if i >= 1 && i <= n { r + i } else { i });
    let mut bnd = Vec::new();
    for i in 1..=n {
        let x = MPoly::var(r + i);
        let rr = MPoly::var(r);
        bnd.push(Formula::atom(x.sub(&rr), Rel::Le));
        bnd.push(Formula::atom(x.add(&rr), Rel::Ge));
    }
    let mut inner = Formula::implies(body, Formula::and(bnd));
    for i in (1..=n).rev() {
        inner = Formula::Forall(r + i, Box::new(inner));
    }
    let s = Formula::Exists(r, Box::new(inner));
    let sf = SaFormula::new(0, s);
    qe::decide_prepared(&prepare(&sf))
}

/// Whether X lies in [-q, q]^n for some rational q: the set of bounds M has nonempty st.
pub fn is_strongly_bounded(f: &SaFormula, ctx: &Ctx) -> Result<bool> {
    let n = f.nfree;
    let t = f.fresh_var();
    // M goes to slot 1, the free variables to bound slots above everything
    let body = f.body.map_vars(&|i| if i >= 1 && i <= n { t + i } else { i });
    let m = MPoly::var(1);
    let mut bnd = Vec::new();
    for i in 1..=n {
        let x = MPoly::var(t + i);
        bnd.push(Formula::atom(x.sub(&m), Rel::Le));
        bnd.push(Formula::atom(x.add(&m), Rel::Ge));
    }
    let mut inner = Formula::implies(body, Formula::and(bnd));
    for i in (1..=n).rev() {
        inner = Formula::Forall(t + i, Box::new(inner));
    }
    let bounds = SaFormula::new(1, inner);
    let mut c = ctx.clone();
    c.max_vars = c.max_vars.max(n + 1 + prepare(f).prefix.len());
    Ok(!qe::sa_empty(&st_onevar(&bounds, &c)?.result))
}

/// st of the projection onto the first m coordinates, certified against the projection of st(X).
pub fn st_project_bounded(s: &StSet, m: usize, ctx: &Ctx) -> Result<StSet> {
    let n = s.source.nfree;
    if m > n {
        return Err(Error::Arity(format!("cannot project R^{} onto R^{}", n, m)));
    }
    if !is_bounded(&s.source) {
        return Err(Error::Domain(String::from("precondition failed: X is not bounded")));
    }
    let px = qe::project_last(&s.source, n - m);
    let r = st_set_internal(&px, ctx)?;
    let pst = qe::project_last(&s.result, n - m);
    if !qe::sa_equal(&pst, &r.result)? {
        return Err(Error::Certificate(String::from("projection of st(X) differs from st of the projection")));
    }
    Ok(r)
}

/// Witness Z in X x Y with pi(st Z) = st X cap st Y, for sets on the line.
#[derive(Clone, Debug)]
pub struct IntersectionWitness {
    /// Z over Q(eta) with eps = eta^2; slots 1, 2 hold x and y.
    pub z: SaFormula,
    /// Exponent j of the window width w = eta^j.
    pub width_exp: u32,
    pub projected: SaFormula,
    pub target: SaFormula,
}

pub fn st_intersection_witness(phi: &SaFormula, psi: &SaFormula, ctx: &Ctx) -> Result<IntersectionWitness> {
    if phi.nfree != 1 || psi.nfree != 1 {
        return Err(Error::Budget(String::from("intersection witnesses are supported for sets on the line")));
    }
    let sx = st_onevar(phi, ctx)?;
    let sy = st_onevar(psi, ctx)?;
    let target = qe::intersection(&sx.result, &sy.result)?;
    let e2 = MPoly::var(0).pow(2);
    let re = |f: &SaFormula| f.body.map_polys(&|p| p.subst(0, &e2));
    let xb = re(phi);
    // psi's free variable goes to slot 2, its bound variables above everything in phi
    let off = phi.fresh_var() + 1;
    let yb = re(psi).map_vars(&|i| if i == 1 { 2 } else if i == 0 { 0 } else { i - 2 + off });
    let xb = xb.map_vars(&|i| if i >= 2 { i + 1 } else { i });
    let mut residual = String::new();
    for j in 1..=2 * ctx.reparam_depth {
        let w = MPoly::var(0).pow(j);
        let d = MPoly::var(1).sub(&MPoly::var(2));
        let near = Formula::and2(Formula::atom(d.sub(&w), Rel::Lt), Formula::atom(d.add(&w), Rel::Gt));
        let z = SaFormula::new(2, Formula::and(vec![xb.clone(), yb.clone(), near]));
        let st = st_set_internal(&z, ctx)?;
        let proj = qe::project_last(&st.result, 1);
        let projected = SaFormula { names: sx.result.names.clone(), nfree: 1, body: qe_prepared(&prepare(&proj)) };
        if qe::sa_equal(&projected, &target)? {
            return Ok(IntersectionWitness { z, width_exp: j, projected, target });
        }
        residual = format!("{}", qe::difference(&target, &projected)?);
    }
    Err(Error::Certificate(format!("no window width in the schedule works; residual: {}", residual)))
}

/// Side of an unbounded locus: f > Q (+) or f < Q (-).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Neg,
    Pos,
}

/// st({x in X : f(x) beyond every rational on the given side}) via the reciprocal graph.
pub fn st_unbounded_locus(phi: &SaFormula, f: &Term, side: Side, ctx: &Ctx) -> Result<StSet> {
    if phi.nfree != 1 {
        return Err(Error::Budget(String::from("unbounded loci are supported for sets on the line")));
    }
    // f must be defined on X
    let bad = SaFormula::with_names(phi.names.clone(), 1, Formula::and2(phi.body.clone(), Formula::atom(f.den.clone(), Rel::Eq)));
    if !qe::sa_empty(&bad) {
        return Err(Error::Domain(String::from("the term's denominator vanishes on X")));
    }
    // Y = {(x, y) : x in X, f(x) on side, f(x) y = 1}; y in slot 2
    let shift = |i: usize| if i >= 2 { i + 1 } else { i };
    let xb = phi.body.map_vars(&shift);
    let num = f.num.map_vars(shift);
    let den = f.den.map_vars(shift);
    let sgn = Formula::atom(num.mul(&den), if side == Side::Pos { Rel::Gt } else { Rel::Lt });
    let recip = Formula::atom(num.mul(&MPoly::var(2)).sub(&den), Rel::Eq);
    let y = SaFormula::new(2, Formula::and(vec![xb, sgn, recip]));
    let sy = st_set_internal(&y, ctx)?;
    // pi(st Y cap {y = 0})
    let on_axis = Formula::and2(sy.result.body.clone(), Formula::atom(MPoly::var(2), Rel::Eq));
    let body = qe_prepared(&prepare(&SaFormula::new(1, Formula::Exists(2, Box::new(on_axis)))));
    let src = SaFormula::with_names(phi.names[..=1].to_vec(), 1, body);
    let ps = st_pieces(&prepare(&src), 1)?;
    let body = pieces_formula(&ps, 1);
    Ok(StSet { source: phi.clone(), result: SaFormula::with_names(phi.names[..=1].to_vec(), 1, body), pieces: Some(ps) })
}

/// Whether the standard part of a bounded point satisfies a set over Q.
pub fn hull_member(x: &[FieldElem], c: &SaFormula) -> Result<bool> {
    if x.len() != c.nfree {
        return Err(Error::Arity(format!("point has {} coordinates, set has {}", x.len(), c.nfree)));
    }
    let mut s = Vec::with_capacity(x.len());
    for xi in x {
        s.push(xi.st()?);
    }
    Ok(qe::holds_at(c, &s, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
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
    fn ctx() -> Ctx {
        Ctx::default()
    }
    fn eq1(a: &SaFormula, b: Formula) -> bool {
        qe::sa_equal(a, &SaFormula::new(a.nfree, b)).unwrap()
    }
    fn unit() -> Formula {
        Formula::and2(at(v(1), Rel::Ge), at(v(1).sub(&c(1, 1)), Rel::Le))
    }

    #[test]
    fn onevar_examples() {
        // (eps, 1 - eps) u {2 + eps} -> [0,1] u {2}
        let f = Formula::or2(
            Formula::and2(at(v(1).sub(&v(0)), Rel::Gt), at(v(1).sub(&c(1, 1)).add(&v(0)), Rel::Lt)),
            at(v(1).sub(&c(2, 1)).sub(&v(0)), Rel::Eq),
        );
        let s = st_onevar(&SaFormula::new(1, f), &ctx()).unwrap();
        assert_eq!(s.pieces.as_ref().unwrap().len(), 2);
        assert!(eq1(&s.result, Formula::or2(unit(), at(v(1).sub(&c(2, 1)), Rel::Eq))));
        // x^2 < eps -> {0}
        let s = st_onevar(&SaFormula::new(1, at(v(1).pow(2).sub(&v(0)), Rel::Lt)), &ctx()).unwrap();
        assert_eq!(s.pieces.unwrap(), vec![Piece { lo: Ext::Fin(Coord::Rat(ri(0))), hi: Ext::Fin(Coord::Rat(ri(0))) }]);
        // (1/eps, 2/eps) -> empty
        let g = Formula::and2(at(v(0).mul(&v(1)).sub(&c(1, 1)), Rel::Gt), at(v(0).mul(&v(1)).sub(&c(2, 1)), Rel::Lt));
        let s = st_onevar(&SaFormula::new(1, g), &ctx()).unwrap();
        assert!(s.pieces.unwrap().is_empty());
        // x > 1/eps -> empty; x^2 <= 2 -> closed with algebraic ends
        let s = st_onevar(&SaFormula::new(1, at(v(0).mul(&v(1)).sub(&c(1, 1)), Rel::Gt)), &ctx()).unwrap();
        assert_eq!(s.result.body, Formula::False);
        let s = st_onevar(&SaFormula::new(1, at(v(1).pow(2).sub(&c(2, 1)), Rel::Lt)), &ctx()).unwrap();
        assert!(eq1(&s.result, at(v(1).pow(2).sub(&c(2, 1)), Rel::Le)));
    }

    #[test]
    fn plane_hyperbola() {
        // xy = eps, eps <= x <= 1 -> {0} x [0,1] u [0,1] x {0}
        let f = Formula::and(vec![
            at(v(1).mul(&v(2)).sub(&v(0)), Rel::Eq),
            at(v(1).sub(&v(0)), Rel::Ge),
            at(v(1).sub(&c(1, 1)), Rel::Le),
        ]);
        let s = st_set(&SaFormula::new(2, f), &ctx()).unwrap();
        let y01 = Formula::and2(at(v(2), Rel::Ge), at(v(2).sub(&c(1, 1)), Rel::Le));
        let expect = Formula::or2(
            Formula::and2(at(v(1), Rel::Eq), y01),
            Formula::and2(unit(), at(v(2), Rel::Eq)),
        );
        assert!(eq1(&s.result, expect));
    }

    #[test]
    fn plane_simple() {
        // y = eps x, 0 <= x <= 1 -> segment on the axis; its projection is [0,1]
        let f = Formula::and(vec![at(v(2).sub(&v(0).mul(&v(1))), Rel::Eq), unit()]);
        let s = st_set(&SaFormula::new(2, f), &ctx()).unwrap();
        assert!(eq1(&s.result, Formula::and2(unit(), at(v(2), Rel::Eq))));
        let p = st_project_bounded(&s, 1, &ctx()).unwrap();
        assert!(eq1(&p.result, unit()));
        // disk of radius 1 - eps -> closed unit disk
        let d = at(v(1).pow(2).add(&v(2).pow(2)).sub(&c(1, 1).sub(&v(0)).pow(2)), Rel::Lt);
        let s = st_set(&SaFormula::new(2, d), &ctx()).unwrap();
        assert!(eq1(&s.result, at(v(1).pow(2).add(&v(2).pow(2)).sub(&c(1, 1)), Rel::Le)));
    }

    #[test]
    fn strong_boundedness() {
        let near = SaFormula::new(1, Formula::and2(at(v(1), Rel::Gt), at(v(1).mul(&v(0)).sub(&c(1, 1)), Rel::Lt)));
        assert!(is_bounded(&near));
        assert!(!is_strongly_bounded(&near, &ctx()).unwrap());
        let disk = SaFormula::new(2, at(v(1).pow(2).add(&v(2).pow(2)).sub(&c(1, 1)).sub(&v(0)), Rel::Lt));
        assert!(is_strongly_bounded(&disk, &ctx()).unwrap());
    }

    #[test]
    fn unbounded_and_hull() {
        let x01 = SaFormula::new(1, Formula::and2(at(v(1), Rel::Gt), at(v(1).sub(&c(1, 1)), Rel::Lt)));
        let s = st_unbounded_locus(&x01, &Term::quot(MPoly::int(1), v(1)), Side::Pos, &ctx()).unwrap();
        assert!(eq1(&s.result, at(v(1), Rel::Eq)));
        let s = st_unbounded_locus(&x01, &Term::poly(v(1)), Side::Pos, &ctx()).unwrap();
        assert_eq!(s.result.body, Formula::False);
        let sq = SaFormula::new(1, unit());
        let e = FieldElem::eps();
        assert!(hull_member(&[FieldElem::from_int(1).add(&e)], &sq).unwrap());
        assert!(!hull_member(&[FieldElem::from_int(2).add(&e)], &sq).unwrap());
    }

    #[test]
    fn intersection_witness() {
        let a = SaFormula::new(1, unit());
        let e2 = v(0).pow(2);
        let b = SaFormula::new(1, Formula::and2(at(v(1).sub(&c(1, 1)).sub(&e2), Rel::Ge), at(v(1).sub(&c(2, 1)), Rel::Le)));
        let w = st_intersection_witness(&a, &b, &ctx()).unwrap();
        assert!(eq1(&w.projected, at(v(1).sub(&c(1, 1)), Rel::Eq)));
    }
}

//! The coordinate map x -> x / sqrt(1 + x^2) between R and J = (-1, 1), applied to formulas exactly.

use crate::formula::{Formula, Rel, SaFormula};
use crate::mpoly::MPoly;
use crate::rat::ri;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

/// p with x_v replaced by x_v / s, times s^d, written as A + s B where s^2 = 1 + c x_v^2.
fn split(p: &MPoly, v: usize, c: i64) -> (MPoly, MPoly, MPoly) {
    let ss = MPoly::int(1).add(&MPoly::var(v).pow(2).scale(&ri(c)));
    let cs = p.coeffs(v);
    let d = cs.len().saturating_sub(1);
    let mut a = MPoly::zero();
    let mut b = MPoly::zero();
    for (k, ck) in cs.iter().enumerate() {
        if ck.is_zero() {
            continue;
        }
        let t = ck.mul(&MPoly::var(v).pow(k as u32));
        let e = d - k;
        if e % 2 == 0 {
            a = a.add(&t.mul(&ss.pow((e / 2) as u32)));
        } else {
            b = b.add(&t.mul(&ss.pow((e / 2) as u32)));
        }
    }
    (a, b, ss)
}

fn pos(a: &MPoly, b: &MPoly, ss: &MPoly) -> Formula {
    let disc = a.pow(2).sub(&ss.mul(&b.pow(2)));
    Formula::or(vec![
        Formula::and(vec![
            Formula::atom(a.clone(), Rel::Ge),
            Formula::atom(b.clone(), Rel::Ge),
            Formula::or2(Formula::atom(a.clone(), Rel::Gt), Formula::atom(b.clone(), Rel::Gt)),
        ]),
        Formula::and(vec![Formula::atom(a.clone(), Rel::Gt), Formula::atom(b.clone(), Rel::Lt), Formula::atom(disc.clone(), Rel::Gt)]),
        Formula::and(vec![Formula::atom(a.clone(), Rel::Lt), Formula::atom(b.clone(), Rel::Gt), Formula::atom(disc, Rel::Lt)]),
    ])
}

fn zero(a: &MPoly, b: &MPoly, ss: &MPoly) -> Formula {
    let disc = a.pow(2).sub(&ss.mul(&b.pow(2)));
    Formula::or2(
        Formula::and2(Formula::atom(a.clone(), Rel::Eq), Formula::atom(b.clone(), Rel::Eq)),
        Formula::and2(Formula::atom(a.mul(b), Rel::Lt), Formula::atom(disc, Rel::Eq)),
    )
}

/// Atom `p rel 0` after x_v := x_v / sqrt(1 + c x_v^2).
fn atom_subst(p: &MPoly, r: Rel, v: usize, c: i64) -> Formula {
    if !p.uses_var(v) {
        return Formula::atom(p.clone(), r);
    }
    let (a, b, ss) = split(p, v, c);
    if b.is_zero() {
        return Formula::atom(a, r);
    }
    let (na, nb) = (a.neg(), b.neg());
    match r {
        Rel::Gt => pos(&a, &b, &ss),
        Rel::Lt => pos(&na, &nb, &ss),
        Rel::Eq => zero(&a, &b, &ss),
        Rel::Ne => Formula::not(zero(&a, &b, &ss)),
        Rel::Ge => Formula::or2(pos(&a, &b, &ss), zero(&a, &b, &ss)),
        Rel::Le => Formula::or2(pos(&na, &nb, &ss), zero(&a, &b, &ss)),
    }
}

fn subst_formula(f: &Formula, v: usize, c: i64) -> Formula {
    match f {
        Formula::Atom(l, r, rhs) => atom_subst(&l.sub(rhs), *r, v, c),
        Formula::Not(g) => Formula::not(subst_formula(g, v, c)),
        Formula::And(gs) => Formula::and(gs.iter().map(|g| subst_formula(g, v, c)).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(|g| subst_formula(g, v, c)).collect()),
        Formula::Exists(w, g) => Formula::Exists(*w, Box::new(subst_formula(g, v, c))),
        Formula::Forall(w, g) => Formula::Forall(*w, Box::new(subst_formula(g, v, c))),
        t => t.clone(),
    }
}

/// tau(S) inside J^n for a set S in R^n: y in J^n with S(y / sqrt(1 - y^2)).
pub fn tau_image(s: &SaFormula) -> SaFormula {
    let mut body = s.body.clone();
    let mut inside = Vec::new();
    for v in 1..=s.nfree {
        body = subst_formula(&body, v, -1);
        inside.push(Formula::atom(MPoly::var(v).pow(2).sub(&MPoly::int(1)), Rel::Lt));
    }
    inside.push(body);
    SaFormula { names: s.names.clone(), nfree: s.nfree, body: Formula::and(inside) }
}

/// tau^{-1}(D) in R^n for a set D in J^n: x with D(x / sqrt(1 + x^2)).
pub fn tau_preimage(d: &SaFormula) -> SaFormula {
    let mut body = d.body.clone();
    for v in 1..=d.nfree {
        body = subst_formula(&body, v, 1);
    }
    SaFormula { names: d.names.clone(), nfree: d.nfree, body }
}

/// Graph of tau between slots x and y: y^2 (1 + x^2) = x^2, x y >= 0, |y| < 1.
pub fn tau_graph(x: usize, y: usize) -> Formula {
    let (xv, yv) = (MPoly::var(x), MPoly::var(y));
    Formula::and(vec![
        Formula::atom(yv.pow(2).mul(&MPoly::int(1).add(&xv.pow(2))).sub(&xv.pow(2)), Rel::Eq),
        Formula::atom(xv.mul(&yv), Rel::Ge),
        Formula::atom(yv.pow(2).sub(&MPoly::int(1)), Rel::Lt),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qe::{holds_at, project_last, sa_equal};
    use crate::rat::rq;

    #[test]
    fn image_of_half_line() {
        // tau((0, inf)) = (0, 1); tau([1, 2]) = [1/sqrt2, 2/sqrt5]
        let s = SaFormula::new(1, Formula::atom(MPoly::var(1), Rel::Gt));
        let t = tau_image(&s);
        let j = SaFormula::new(1, Formula::and2(Formula::atom(MPoly::var(1), Rel::Gt), Formula::atom(MPoly::var(1).sub(&MPoly::int(1)), Rel::Lt)));
        assert!(sa_equal(&t, &j).unwrap());
        let x = MPoly::var(1);
        let seg = SaFormula::new(1, Formula::and2(Formula::atom(x.sub(&MPoly::int(1)), Rel::Ge), Formula::atom(x.sub(&MPoly::int(2)), Rel::Le)));
        let ts = tau_image(&seg);
        assert!(holds_at(&ts, &[rq(8, 10)], None));
        assert!(!holds_at(&ts, &[rq(7, 10)], None));
        assert!(!holds_at(&ts, &[rq(9, 10)], None));
        assert!(sa_equal(&tau_preimage(&ts), &seg).unwrap());
        // graph check: {y : exists x in seg, tau(x) = y} = tau(seg)
        let g = SaFormula::new(2, Formula::and2(tau_graph(2, 1), seg.body.map_vars(&|i| if i == 1 { 2 } else { i })));
        assert!(sa_equal(&project_last(&g, 1), &ts).unwrap());
    }
}

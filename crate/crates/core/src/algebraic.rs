//! Real algebraic points given as towers over Q, and exact sign evaluation at them.
//!
//! Coordinate i of a point is either rational or the unique root of `def(x_0..x_{i-1}, x_i)`
//! inside an open rational interval, where `def` is squarefree at the prefix and its leading
//! coefficient does not vanish there.

use crate::mpoly::{prem, MPoly};
use crate::rat::{mid, ri, rsign, Rat};
use crate::upoly::Bound;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub enum Coord {
    Rat(Rat),
    Alg { def: MPoly, lo: Rat, hi: Rat, slo: i8 },
}

impl Coord {
    pub fn interval(&self) -> (Rat, Rat) {
        match self {
            Coord::Rat(r) => (r.clone(), r.clone()),
            Coord::Alg { lo, hi, .. } => (lo.clone(), hi.clone()),
        }
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Coord::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn approx(&self) -> f64 {
        let (a, b) = self.interval();
        crate::rat::to_f64(&mid(&a, &b))
    }
}

pub type Interval = (Rat, Rat);

fn ipow(iv: &Interval, e: u32) -> Interval {
    if e == 0 {
        return (ri(1), ri(1));
    }
    let (a, b) = iv;
    let pa = pow_r(a, e);
    let pb = pow_r(b, e);
    if e % 2 == 1 || !a.is_negative() {
        (pa, pb)
    } else if !b.is_positive() {
        (pb, pa)
    } else {
        (Rat::zero(), if pa > pb { pa } else { pb })
    }
}

fn pow_r(a: &Rat, e: u32) -> Rat {
    let mut r = ri(1);
    for _ in 0..e {
        r *= a;
    }
    r
}

fn imul(x: &Interval, y: &Interval) -> Interval {
    let c = [&x.0 * &y.0, &x.0 * &y.1, &x.1 * &y.0, &x.1 * &y.1];
    let mut lo = c[0].clone();
    let mut hi = c[0].clone();
    for v in &c[1..] {
        if *v < lo {
            lo = v.clone();
        }
        if *v > hi {
            hi = v.clone();
        }
    }
    (lo, hi)
}

/// Interval enclosure of q over a box.
pub fn ieval(q: &MPoly, bx: &[Interval]) -> Interval {
    let mut lo = Rat::zero();
    let mut hi = Rat::zero();
    for (m, c) in &q.t {
        let mut t: Interval = (c.clone(), c.clone());
        for (i, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = imul(&t, &ipow(&bx[i], e));
            }
        }
        lo += t.0;
        hi += t.1;
    }
    (lo, hi)
}

pub fn boxes(pt: &[Coord]) -> Vec<Interval> {
    pt.iter().map(|c| c.interval()).collect()
}

/// Substitute all rational coordinates.
pub fn subst_rationals(pt: &[Coord], q: &MPoly) -> MPoly {
    let mut q = q.clone();
    for (i, c) in pt.iter().enumerate() {
        if let Coord::Rat(r) = c {
            if q.uses_var(i) {
                q = q.subst_rat(i, r);
            }
        }
    }
    q
}

/// Halve the isolating interval of coordinate i (or discover it is rational).
pub fn bisect(pt: &mut [Coord], i: usize) {
    let (prefix, rest) = pt.split_at_mut(i);
    let (m, s, slo_v) = match &rest[0] {
        Coord::Rat(_) => return,
        Coord::Alg { def, lo, hi, slo } => {
            let m = mid(lo, hi);
            let s = sign_at(prefix, &def.subst_rat(i, &m));
            (m, s, *slo)
        }
    };
    if s == 0 {
        rest[0] = Coord::Rat(m);
    } else if let Coord::Alg { lo, hi, .. } = &mut rest[0] {
        if s == slo_v {
            *lo = m;
        } else {
            *hi = m;
        }
    }
}

/// Refine coordinate i until its interval is at most `w` wide.
pub fn refine_to(pt: &mut [Coord], i: usize, w: &Rat) {
    loop {
        let (a, b) = pt[i].interval();
        if &(b - a) <= w {
            return;
        }
        bisect(pt, i);
    }
}

/// Exact sign of q at the point (q may use only variables < pt.len()).
pub fn sign_at(pt: &mut [Coord], q: &MPoly) -> i8 {
    let q = subst_rationals(pt, q);
    if let Some(c) = q.const_value() {
        return rsign(&c);
    }
    let j = q.main_var().unwrap();
    assert!(j < pt.len(), "polynomial uses variables beyond the point");
    if is_zero_at(pt, &q, j) {
        return 0;
    }
    let mut q = q;
    loop {
        let (lo, hi) = ieval(&q, &boxes(&pt[..=j]));
        if lo.is_positive() {
            return 1;
        }
        if hi.is_negative() {
            return -1;
        }
        for i in 0..=j {
            bisect(pt, i);
        }
        q = subst_rationals(pt, &q);
        if let Some(c) = q.const_value() {
            return rsign(&c);
        }
    }
}

/// Whether q (main variable j, an algebraic coordinate) vanishes at the point.
fn is_zero_at(pt: &mut [Coord], q: &MPoly, j: usize) -> bool {
    let (prefix, rest) = pt.split_at_mut(j);
    let (def, lo, hi) = match &rest[0] {
        Coord::Alg { def, lo, hi, .. } => (def.clone(), lo.clone(), hi.clone()),
        Coord::Rat(_) => unreachable!("rational coordinates are substituted"),
    };
    let qs = strip(prefix, q, j);
    if qs.is_zero() {
        return true;
    }
    if qs.deg(j) == 0 {
        return false;
    }
    let g = gcd_at(prefix, &def, &qs, j);
    if g.deg(j) == 0 {
        return false;
    }
    let ch = sturm_chain_at(prefix, &g, j);
    count_at(prefix, &ch, j, &Bound::At(lo), &Bound::At(hi)) > 0
}

/// Drop leading coefficients (in v) that vanish at the prefix.
pub fn strip(prefix: &mut [Coord], p: &MPoly, v: usize) -> MPoly {
    let mut cs = p.coeffs(v);
    while let Some(c) = cs.last() {
        if sign_at(prefix, c) == 0 {
            cs.pop();
        } else {
            break;
        }
    }
    MPoly::from_coeffs(v, &cs)
}

/// Primitive part with respect to v, keeping the sign at the prefix.
fn prim_at(prefix: &mut [Coord], p: &MPoly, v: usize) -> MPoly {
    if p.is_zero() {
        return p.clone();
    }
    let c = p.content(v);
    let mut q = p.div_exact(&c).unwrap();
    let sc = sign_at(prefix, &c);
    if sc < 0 {
        q = q.neg();
    }
    // positive rational rescaling only
    let n = q.normalize();
    let ratio = n.lt().unwrap().1 / q.lt().unwrap().1;
    if ratio.is_positive() {
        n
    } else {
        n.neg()
    }
}

/// gcd over Q(prefix) of two polynomials in x_v; result stripped, possibly constant.
pub fn gcd_at(prefix: &mut [Coord], a: &MPoly, b: &MPoly, v: usize) -> MPoly {
    let mut a = strip(prefix, a, v);
    let mut b = strip(prefix, b, v);
    if a.deg(v) < b.deg(v) {
        core::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.is_zero() {
            return prim_at(prefix, &a, v);
        }
        if b.deg(v) == 0 {
            return MPoly::int(1);
        }
        let r = strip(prefix, &prem(&a, &b, v), v);
        a = b;
        b = prim_at(prefix, &r, v);
    }
}

/// Pseudo-division: lc(b)^(da-db+1) a = q b + r.
pub fn pdivrem(a: &MPoly, b: &MPoly, v: usize) -> (MPoly, MPoly) {
    let db = b.deg(v);
    let lb = b.lc(v);
    let mut r = a.clone();
    let mut q = MPoly::zero();
    if r.deg(v) < db {
        return (q, r);
    }
    let mut k = r.deg(v) - db + 1;
    while !r.is_zero() && r.deg(v) >= db {
        let dr = r.deg(v);
        let lr = r.lc(v);
        let sh = crate::mpoly::Mono::var(v, dr - db);
        let t = lr.mul_mono(&sh, &ri(1));
        q = q.mul(&lb).add(&t);
        r = r.mul(&lb).sub(&t.mul(b));
        k -= 1;
    }
    let f = lb.pow(k);
    (q.mul(&f), r.mul(&f))
}

/// Squarefree part of p(prefix, x_v) over Q(prefix), stripped.
pub fn sqfree_at(prefix: &mut [Coord], p: &MPoly, v: usize) -> MPoly {
    let p = strip(prefix, p, v);
    if p.deg(v) <= 1 {
        return p;
    }
    let g = gcd_at(prefix, &p, &p.derivative(v), v);
    if g.deg(v) == 0 {
        return prim_at(prefix, &p, v);
    }
    let (q, _) = pdivrem(&p, &g, v);
    let q = strip(prefix, &q, v);
    prim_at(prefix, &q, v)
}

/// Sturm chain of p(prefix, x_v) with signs valid at the prefix.
pub fn sturm_chain_at(prefix: &mut [Coord], p: &MPoly, v: usize) -> Vec<MPoly> {
    let p = strip(prefix, p, v);
    let mut ch = vec![p.clone()];
    if p.deg(v) == 0 {
        return ch;
    }
    let d = strip(prefix, &p.derivative(v), v);
    ch.push(prim_at(prefix, &d, v));
    loop {
        let n = ch.len();
        let a = &ch[n - 2];
        let b = &ch[n - 1];
        if b.deg(v) == 0 {
            break;
        }
        let delta = a.deg(v) - b.deg(v);
        let r = strip(prefix, &prem(a, b, v), v);
        if r.is_zero() {
            break;
        }
        let slc = sign_at(prefix, &b.lc(v));
        let flip = slc < 0 && (delta + 1) % 2 == 1;
        let r = if flip { r } else { r.neg() };
        ch.push(prim_at(prefix, &r, v));
    }
    ch
}

fn variations(signs: &[i8]) -> usize {
    let mut last = 0;
    let mut n = 0;
    for &s in signs {
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

pub fn chain_variations_at(prefix: &mut [Coord], ch: &[MPoly], v: usize, b: &Bound<Rat>) -> usize {
    let mut s = Vec::with_capacity(ch.len());
    for p in ch {
        let sg = match b {
            Bound::At(t) => sign_at(prefix, &p.subst_rat(v, t)),
            Bound::NegInf | Bound::PosInf => {
                let l = sign_at(prefix, &p.lc(v));
                if matches!(b, Bound::NegInf) && p.deg(v) % 2 == 1 {
                    -l
                } else {
                    l
                }
            }
        };
        s.push(sg);
    }
    variations(&s)
}

/// Distinct roots of the chain's first polynomial in (lo, hi].
pub fn count_at(prefix: &mut [Coord], ch: &[MPoly], v: usize, lo: &Bound<Rat>, hi: &Bound<Rat>) -> usize {
    let a = chain_variations_at(prefix, ch, v, lo);
    let b = chain_variations_at(prefix, ch, v, hi);
    a.saturating_sub(b)
}

/// Rational bound strictly above the absolute value of every root of p(prefix, x_v).
pub fn root_bound_at(prefix: &mut [Coord], p: &MPoly, v: usize) -> Rat {
    let cs = p.coeffs(v);
    let lc = cs.last().unwrap().clone();
    loop {
        let bx = boxes(prefix);
        let (a, b) = ieval(&lc, &bx);
        let lmin = if a.is_positive() {
            a
        } else if b.is_negative() {
            -b
        } else {
            for i in 0..prefix.len() {
                bisect(prefix, i);
            }
            continue;
        };
        let mut m = Rat::zero();
        for c in &cs[..cs.len() - 1] {
            let (x, y) = ieval(c, &bx);
            let t = if x.abs() > y.abs() { x.abs() } else { y.abs() };
            if t > m {
                m = t;
            }
        }
        let bnd = ri(1) + m / lmin;
        let mut p2 = ri(1);
        while p2 <= bnd {
            p2 *= ri(2);
        }
        return p2;
    }
}

/// Isolating intervals (open, rational, non-root endpoints) of the distinct real roots, ascending.
pub fn isolate_at(prefix: &mut [Coord], p: &MPoly, v: usize) -> Vec<Interval> {
    let p = strip(prefix, p, v);
    if p.deg(v) == 0 {
        return Vec::new();
    }
    let ch = sturm_chain_at(prefix, &p, v);
    let b = root_bound_at(prefix, &p, v);
    let lo = -b.clone();
    let total = count_at(prefix, &ch, v, &Bound::At(lo.clone()), &Bound::At(b.clone()));
    let mut out = Vec::new();
    let mut stack = vec![(lo, b, total)];
    while let Some((a, c, n)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((a, c));
            continue;
        }
        let mut m = mid(&a, &c);
        let mut k = 2;
        while sign_at(prefix, &p.subst_rat(v, &m)) == 0 {
            k += 1;
            m = &a + (&c - &a) / ri(k);
        }
        let n1 = count_at(prefix, &ch, v, &Bound::At(a.clone()), &Bound::At(m.clone()));
        stack.push((m.clone(), c, n - n1));
        stack.push((a, m, n1));
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Real roots of p(prefix, x_v) as coordinates (ascending).
pub fn roots_at(prefix: &mut [Coord], p: &MPoly, v: usize) -> Vec<Coord> {
    let ivs = isolate_at(prefix, p, v);
    if ivs.is_empty() {
        return Vec::new();
    }
    let def = sqfree_at(prefix, p, v);
    let mut out = Vec::new();
    for (lo, hi) in ivs {
        if def.deg(v) == 1 {
            // linear: the root is rational when the prefix is
            let cs = def.coeffs(v);
            if cs[0].is_const() && cs[1].is_const() {
                let r = -cs[0].const_value().unwrap() / cs[1].const_value().unwrap();
                out.push(Coord::Rat(r));
                continue;
            }
        }
        let slo = sign_at(prefix, &def.subst_rat(v, &lo));
        let mut c = Coord::Alg { def: def.clone(), lo, hi, slo };
        // snap to a rational root when one is detected on a few bisections
        let mut tmp: Vec<Coord> = prefix.to_vec();
        tmp.push(c.clone());
        for _ in 0..4 {
            let n = tmp.len() - 1;
            bisect(&mut tmp, n);
            if matches!(tmp[n], Coord::Rat(_)) {
                break;
            }
        }
        c = tmp.pop().unwrap();
        out.push(c);
    }
    out
}

/// Order of two coordinates that live over the same prefix: -1, 0, 1.
pub fn compare_coords(prefix: &mut [Coord], a: &mut Coord, b: &mut Coord) -> i8 {
    let v = prefix.len();
    match (a.clone(), b.clone()) {
        (Coord::Rat(x), Coord::Rat(y)) => rsign(&(x - y)),
        (Coord::Rat(x), Coord::Alg { def, .. }) => {
            let mut pt: Vec<Coord> = prefix.to_vec();
            pt.push(b.clone());
            let s = sign_at(&mut pt, &MPoly::var(v).sub(&MPoly::constant(x.clone())));
            *b = pt.pop().unwrap();
            let _ = def;
            -s
        }
        (Coord::Alg { .. }, Coord::Rat(y)) => {
            let mut pt: Vec<Coord> = prefix.to_vec();
            pt.push(a.clone());
            let s = sign_at(&mut pt, &MPoly::var(v).sub(&MPoly::constant(y)));
            *a = pt.pop().unwrap();
            s
        }
        (Coord::Alg { .. }, Coord::Alg { def: db, .. }) => {
            // equal iff a is a root of db lying in b's interval
            let mut pa: Vec<Coord> = prefix.to_vec();
            pa.push(a.clone());
            let z = sign_at(&mut pa, &db) == 0;
            *a = pa.pop().unwrap();
            loop {
                let (al, ah) = a.interval();
                let (bl, bh) = b.interval();
                if ah <= bl {
                    return -1;
                }
                if bh <= al {
                    return 1;
                }
                if z && al >= bl && ah <= bh {
                    return 0;
                }
                let mut pa: Vec<Coord> = prefix.to_vec();
                pa.push(a.clone());
                let n = pa.len() - 1;
                bisect(&mut pa, n);
                *a = pa.pop().unwrap();
                if !z {
                    let mut pb: Vec<Coord> = prefix.to_vec();
                    pb.push(b.clone());
                    bisect(&mut pb, n);
                    *b = pb.pop().unwrap();
                }
                if let (Coord::Rat(_), _) | (_, Coord::Rat(_)) = (&*a, &*b) {
                    return compare_coords(prefix, a, b);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rq;

    fn x(i: usize) -> MPoly {
        MPoly::var(i)
    }

    #[test]
    fn sqrt2_sign() {
        // x0 = sqrt 2
        let mut pt: Vec<Coord> = Vec::new();
        let p = x(0).pow(2).sub(&MPoly::int(2));
        let r = roots_at(&mut pt, &p, 0);
        assert_eq!(r.len(), 2);
        let mut pt = vec![r[1].clone()];
        assert_eq!(sign_at(&mut pt, &p), 0);
        assert_eq!(sign_at(&mut pt, &x(0).sub(&MPoly::constant(rq(141, 100)))), 1);
        assert_eq!(sign_at(&mut pt, &x(0).sub(&MPoly::constant(rq(142, 100)))), -1);
        // (x0^2 - 2) * 5 + x0 - x0 is zero
        let q = p.scale(&ri(5));
        assert_eq!(sign_at(&mut pt, &q), 0);
    }

    #[test]
    fn tower_two_levels() {
        // x0 = sqrt 2, x1 root of x1^2 - x0 : x1 = 2^(1/4)
        let p0 = x(0).pow(2).sub(&MPoly::int(2));
        let r0 = roots_at(&mut [], &p0, 0);
        let mut pre = vec![r0[1].clone()];
        let p1 = x(1).pow(2).sub(&x(0));
        let r1 = roots_at(&mut pre, &p1, 1);
        assert_eq!(r1.len(), 2);
        let mut pt = vec![pre[0].clone(), r1[1].clone()];
        // x1^4 - 2 = 0
        assert_eq!(sign_at(&mut pt, &x(1).pow(4).sub(&MPoly::int(2))), 0);
        // x1 - x0 < 0 since 2^(1/4) < 2^(1/2)
        assert_eq!(sign_at(&mut pt, &x(1).sub(&x(0))), -1);
        // x1^2 - x0 = 0
        assert_eq!(sign_at(&mut pt, &p1), 0);
    }

    #[test]
    fn degenerate_fiber() {
        // over x0 = 0: x0*x1^2 + x1 - 1 has single root x1 = 1
        let mut pre = vec![Coord::Rat(ri(0))];
        let p = x(0).mul(&x(1).pow(2)).add(&x(1)).sub(&MPoly::int(1));
        let r = roots_at(&mut pre, &p, 1);
        assert_eq!(r.len(), 1);
        assert_eq!(r[0], Coord::Rat(ri(1)));
    }

    #[test]
    fn double_root_counted_once() {
        let p = x(0).sub(&MPoly::int(1)).pow(2).mul(&x(0).add(&MPoly::int(3)));
        let r = roots_at(&mut [], &p, 0);
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn compare() {
        let p0 = x(0).pow(2).sub(&MPoly::int(2));
        let r0 = roots_at(&mut [], &p0, 0);
        let p1 = x(0).pow(2).sub(&MPoly::int(3));
        let r1 = roots_at(&mut [], &p1, 0);
        let mut a = r0[1].clone();
        let mut b = r1[1].clone();
        assert_eq!(compare_coords(&mut [], &mut a, &mut b), -1);
        let p2 = x(0).pow(4).sub(&MPoly::int(4));
        let r2 = roots_at(&mut [], &p2, 0);
        let mut c = r2[1].clone();
        let mut a = r0[1].clone();
        assert_eq!(compare_coords(&mut [], &mut a, &mut c), 0);
    }
}

//! Lebesgue measure of st-sets, rational boxes, volumes of definable functions and
//! measure-preserving isomorphisms.

use crate::algebraic::Coord;
use crate::alg_eps::lowest_eps_part;
use crate::ctx::Ctx;
use crate::error::{Error, Result};
use crate::formula::{Formula, Rel, SaFormula};
use crate::good::{make_induced_fn, FnDesc, GoodCell};
use crate::mpoly::MPoly;
use crate::qe::{self, prepare, truth_cad};
use crate::rat::{from_f64, ri, to_f64, two_pow, Rat};
use crate::alg_eps::Ext;
use crate::st::{is_bounded, is_strongly_bounded, st_onevar, st_set_internal};
use crate::term::Term;
use crate::upoly::{chain_count, Bound, UPoly};
use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureValue {
    /// Finite value (an exact rational when `exact`, otherwise the centre of the error interval).
    pub value: Rat,
    pub infinite: bool,
    pub radius: Rat,
    pub exact: bool,
    pub note: Option<String>,
}

impl MeasureValue {
    pub fn exact(value: Rat) -> Self {
        MeasureValue { value, infinite: false, radius: Rat::zero(), exact: true, note: None }
    }

    pub fn infinite(note: &str) -> Self {
        MeasureValue { value: Rat::zero(), infinite: true, radius: Rat::zero(), exact: false, note: Some(String::from(note)) }
    }

    pub fn approx(&self) -> f64 {
        if self.infinite {
            f64::INFINITY
        } else {
            to_f64(&self.value)
        }
    }

    pub fn radius_f64(&self) -> f64 {
        to_f64(&self.radius)
    }

    /// |a - b| within the summed radii (plus `slack`).
    pub fn agrees(&self, o: &MeasureValue, slack: f64) -> bool {
        if self.infinite || o.infinite {
            return self.infinite == o.infinite;
        }
        (self.approx() - o.approx()).abs() <= self.radius_f64() + o.radius_f64() + slack
    }

    fn add(&self, o: &MeasureValue) -> MeasureValue {
        MeasureValue {
            value: &self.value + &o.value,
            infinite: self.infinite || o.infinite,
            radius: &self.radius + &o.radius,
            exact: self.exact && o.exact,
            note: None,
        }
    }
}

/// Double-exponential quadrature of f on [a, b]; returns (value, error estimate).
pub fn tanh_sinh(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let half_pi = core::f64::consts::FRAC_PI_2;
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let tmax = 3.2;
    let mut h = 1.0;
    let mut sum = half_pi * f(c);
    let add_nodes = |h: f64, step: usize, sum: &mut f64, f: &mut dyn FnMut(f64) -> f64| {
        let mut k = 1usize;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            let u = half_pi * libm::sinh(t);
            let ch = libm::cosh(u);
            let w = half_pi * libm::cosh(t) / (ch * ch);
            // 1 - tanh(u) computed without cancellation
            let comp = 1.0 / (libm::exp(u) * ch);
            let xl = a + d * comp;
            let xr = b - d * comp;
            if xl > a && xl < b {
                *sum += w * f(xl);
            }
            if xr > a && xr < b {
                *sum += w * f(xr);
            }
            k += step;
        }
    };
    add_nodes(h, 1, &mut sum, f);
    let mut est = h * d * sum;
    let mut err = f64::INFINITY;
    for level in 0..8 {
        h *= 0.5;
        add_nodes(h, 2, &mut sum, f);
        let next = h * d * sum;
        err = (next - est).abs();
        est = next;
        if level >= 2 && err < tol {
            break;
        }
    }
    (est, err)
}

/// Real roots of a squarefree rational polynomial, refined to width w, as midpoints.
fn real_roots(u: &UPoly<Rat>, w: &Rat) -> Vec<f64> {
    if u.deg() <= 0 {
        return Vec::new();
    }
    let ch = u.sturm_chain();
    let lc = u.lc().abs();
    let mut bound = ri(1);
    for i in 0..u.deg() as usize {
        let q = u.coeff(i).abs() / &lc;
        if q > bound {
            bound = q;
        }
    }
    let bound = bound + ri(1);
    let mut out = Vec::new();
    let mut stack = vec![(-bound.clone(), bound)];
    while let Some((lo, hi)) = stack.pop() {
        let k = chain_count(&ch, &Bound::At(lo.clone()), &Bound::At(hi.clone()));
        if k == 0 {
            continue;
        }
        if k == 1 {
            // bisect on sign changes; the root lies in (lo, hi]
            let (mut l, mut h) = (lo, hi);
            if u.sign_at(&h) == 0 {
                out.push(to_f64(&h));
                continue;
            }
            let sh = u.sign_at(&h);
            while &h - &l > *w {
                let m = (&l + &h) / ri(2);
                let sm = u.sign_at(&m);
                if sm == 0 {
                    l = m.clone();
                    h = m;
                    break;
                }
                if sm == sh {
                    h = m;
                } else {
                    l = m;
                }
            }
            out.push(to_f64(&((&l + &h) / ri(2))));
            continue;
        }
        let m = (&lo + &hi) / ri(2);
        stack.push((lo, m.clone()));
        stack.push((m, hi));
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Sorted roots in y of the level-2 factors at x, each tagged with its factor.
fn fiber_roots(factors: &[MPoly], e0: &Rat, x: &Rat, w: &Rat) -> Vec<(f64, usize)> {
    let mut out = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        let q = f.subst_rat(0, e0).subst_rat(1, x);
        if let Some(u) = q.to_upoly(2) {
            for r in real_roots(&u, w) {
                out.push((r, i));
            }
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn coord_value(pt: &mut [Coord], i: usize, w: &Rat) -> (Rat, Rat, bool) {
    match &pt[i] {
        Coord::Rat(r) => (r.clone(), Rat::zero(), true),
        _ => {
            crate::algebraic::refine_to(pt, i, w);
            let (a, b) = pt[i].interval();
            ((&a + &b) / ri(2), (b - a) / ri(2), false)
        }
    }
}

/// Root y = -c0(x)/c1 of a factor linear in y with constant leading coefficient.
fn linear_root(f: &MPoly) -> Option<UPoly<Rat>> {
    if f.deg(2) != 1 || f.uses_var(0) {
        return None;
    }
    let cs = f.coeffs(2);
    let c1 = cs[1].const_value()?;
    let c0 = cs[0].to_upoly(1).unwrap_or_else(|| UPoly::constant(cs[0].const_value().unwrap_or_else(Rat::zero)));
    Some(c0.scale(&(-ri(1) / c1)))
}

fn antiderivative_diff(p: &UPoly<Rat>, a: &Rat, b: &Rat) -> Rat {
    let mut cs = vec![Rat::zero()];
    for i in 0..=p.deg().max(0) as usize {
        cs.push(p.coeff(i) / ri(i as i64 + 1));
    }
    let q = UPoly::new(cs);
    q.eval(b) - q.eval(a)
}

fn length_of_pieces(s: &SaFormula, ctx: &Ctx) -> Result<MeasureValue> {
    let st = st_onevar(s, ctx)?;
    let w = two_pow(-60);
    let mut total = MeasureValue::exact(Rat::zero());
    for pc in st.pieces.unwrap_or_default() {
        if pc.is_point() {
            continue;
        }
        // endpoint coordinates live in slot 1 over a dummy slot 0
        let (mut lo, mut hi) = match (&pc.lo, &pc.hi) {
            (Ext::Fin(a), Ext::Fin(b)) => (vec![Coord::Rat(Rat::zero()), a.clone()], vec![Coord::Rat(Rat::zero()), b.clone()]),
            _ => return Ok(MeasureValue::infinite("st X is unbounded")),
        };
        let (a, ra, ea) = coord_value(&mut lo, 1, &w);
        let (b, rb, eb) = coord_value(&mut hi, 1, &w);
        total = total.add(&MeasureValue { value: b - a, infinite: false, radius: ra + rb, exact: ea && eb, note: None });
    }
    Ok(total)
}

fn area(s: &SaFormula, ctx: &Ctx) -> Result<MeasureValue> {
    let tc = truth_cad(&prepare(s), false);
    let mut cad = tc.cad;
    let e0 = cad.e0();
    let factors = cad.proj.levels[2].clone();
    let w = two_pow(-48);
    let tol = 1e-12;
    let mut total = MeasureValue::exact(Rat::zero());
    let base_len = cad.cells[1].len();
    for bi in 0..base_len {
        if cad.cells[1][bi].index[0] % 2 == 1 {
            continue;
        }
        let kids = cad.cells[1][bi].children.clone();
        // true full-dimensional cells over this base: pairs of bounding section indices
        let mut bands: Vec<(usize, usize)> = Vec::new();
        for (pos, &k) in kids.iter().enumerate() {
            if pos % 2 == 0 && tc.truth[k] {
                if pos == 0 || pos + 1 == kids.len() || bi == 0 || bi + 1 == base_len {
                    return Ok(MeasureValue::infinite("st X is unbounded"));
                }
                bands.push(((pos - 1) / 2, (pos + 1) / 2));
            }
        }
        if bands.is_empty() {
            continue;
        }
        let nsec = kids.len() / 2;
        let mut lo_pt = cad.cells[1][bi - 1].sample.clone();
        let mut hi_pt = cad.cells[1][bi + 1].sample.clone();
        let (a, ra, ea) = coord_value(&mut lo_pt, 1, &w);
        let (b, rb, eb) = coord_value(&mut hi_pt, 1, &w);
        cad.cells[1][bi - 1].sample = lo_pt;
        cad.cells[1][bi + 1].sample = hi_pt;
        // exact when both endpoints are rational and every bounding section is linear in y
        let xs = cad.cells[1][bi].sample[1].as_rat().cloned().unwrap_or_else(|| (&a + &b) / ri(2));
        let tags = fiber_roots(&factors, &e0, &xs, &w);
        if tags.len() != nsec {
            return Err(Error::Certificate(String::from("root count differs at the base sample")));
        }
        let lin: Option<Vec<(UPoly<Rat>, UPoly<Rat>)>> = bands
            .iter()
            .map(|&(l, u)| Some((linear_root(&factors[tags[l].1])?, linear_root(&factors[tags[u].1])?)))
            .collect();
        if let (true, true, Some(lin)) = (ea, eb, lin) {
            let mut v = Rat::zero();
            for (l, u) in lin {
                v += antiderivative_diff(&u.sub(&l), &a, &b);
            }
            total = total.add(&MeasureValue::exact(v));
            continue;
        }
        let mut skipped = 0usize;
        let mut f = |x: f64| {
            let rs = fiber_roots(&factors, &e0, &from_f64(x), &w);
            if rs.len() != nsec {
                skipped += 1;
                return 0.0;
            }
            bands.iter().map(|&(l, u)| rs[u].0 - rs[l].0).sum::<f64>()
        };
        let (v, err) = tanh_sinh(&mut f, to_f64(&a), to_f64(&b), tol);
        // bound on the band height times the endpoint uncertainty
        let hmax = 2.0 * (to_f64(&b) - to_f64(&a)).abs().max(1.0) * 1e3;
        let rad = err + (to_f64(&ra) + to_f64(&rb)) * hmax + 1e-13 * (skipped as f64 + 1.0);
        total = total.add(&MeasureValue { value: from_f64(v), infinite: false, radius: from_f64(rad), exact: false, note: None });
    }
    let _ = ctx;
    Ok(total)
}

/// lambda(st X) for strongly bounded X in R^n, n <= 2.
pub fn measure_st(x: &SaFormula, ctx: &Ctx) -> Result<MeasureValue> {
    let n = x.nfree;
    if n > 2 {
        return Err(Error::Budget(format!("measures are supported for n <= 2, got {}", n)));
    }
    if !is_strongly_bounded(x, ctx)? {
        return Err(Error::Domain(String::from("precondition failed: X is not strongly bounded")));
    }
    let s = st_set_internal(x, ctx)?.result;
    match n {
        0 => Ok(MeasureValue::exact(if qe::sa_empty(&s) { Rat::zero() } else { ri(1) })),
        _ if qe::sa_dim(&s) < n as i32 => Ok(MeasureValue::exact(Rat::zero())),
        1 => length_of_pieces(&s, ctx),
        _ => area(&s, ctx),
    }
}

/// Outcome of a search for a rational box.
#[derive(Clone, Debug, PartialEq)]
pub enum QBox {
    /// Closed box [lo_i, hi_i] contained in X.
    Found(Vec<(Rat, Rat)>),
    InteriorEmpty,
}

fn box_inside(x: &SaFormula, bx: &[(Rat, Rat)]) -> bool {
    // forall y (y in box -> X(y)), with y in fresh slots
    let n = x.nfree;
    let t = x.fresh_var();
    let body = x.body.map_vars(&|i| if i >= 1 && i <= n { t + i } else { i });
    let mut cs = Vec::new();
    for (i, (lo, hi)) in bx.iter().enumerate() {
        let y = MPoly::var(t + i + 1);
        cs.push(Formula::atom(y.sub(&MPoly::constant(lo.clone())), Rel::Ge));
        cs.push(Formula::atom(y.sub(&MPoly::constant(hi.clone())), Rel::Le));
    }
    let mut f = Formula::implies(Formula::and(cs), body);
    for i in (1..=n).rev() {
        f = Formula::Forall(t + i, Box::new(f));
    }
    qe::decide_prepared(&prepare(&SaFormula::new(0, f)))
}

/// A dyadic box inside X when st X has interior.
pub fn contains_qbox(x: &SaFormula, ctx: &Ctx) -> Result<QBox> {
    let n = x.nfree;
    if n == 0 || n > 2 {
        return Err(Error::Budget(format!("box search is supported for 1 <= n <= 2, got {}", n)));
    }
    let s = st_set_internal(x, ctx)?.result;
    if qe::sa_dim(&s) < n as i32 {
        return Ok(QBox::InteriorEmpty);
    }
    let tc = truth_cad(&prepare(&s), false);
    let centres: Vec<Vec<Rat>> = tc
        .cad
        .leaves()
        .iter()
        .zip(&tc.truth)
        .filter(|(c, &t)| t && c.dim() == n)
        .map(|(c, _)| c.sample[1..].iter().map(|k| k.as_rat().cloned().unwrap_or_else(|| from_f64(k.approx()))).collect())
        .collect();
    let mut seen: BTreeSet<(u32, Vec<Rat>)> = BTreeSet::new();
    for d in 0..=ctx.grid_depth {
        let side = two_pow(-(d as i32));
        for p in &centres {
            let base: Vec<Rat> = p.iter().map(|v| (v / &side).floor()).collect();
            let offs: Vec<Vec<i64>> = if n == 1 {
                (-1..=1).map(|a| vec![a]).collect()
            } else {
                (-1..=1).flat_map(|a| (-1..=1).map(move |b| vec![a, b])).collect()
            };
            for o in offs {
                let ks: Vec<Rat> = base.iter().zip(&o).map(|(k, &di)| k + ri(di)).collect();
                if !seen.insert((d, ks.clone())) {
                    continue;
                }
                let bx: Vec<(Rat, Rat)> = ks.iter().map(|k| (k * &side, (k + ri(1)) * &side)).collect();
                if box_inside(x, &bx) {
                    return Ok(QBox::Found(bx));
                }
            }
        }
    }
    Err(Error::Certificate(format!("st X has interior but no dyadic box of depth <= {} lies in X", ctx.grid_depth)))
}

fn subgraph(f: &FnDesc) -> Result<SaFormula> {
    match f {
        FnDesc::Term { domain, term } => {
            let n = domain.nfree;
            let y = MPoly::var(n + 1);
            let shift = |i: usize| if i > n { i + 1 } else { i };
            let d = domain.body.map_vars(&shift);
            let t = term.map_polys(&|p| p.map_vars(shift));
            // 0 <= y <= f(x)
            let below = Formula::and2(Formula::atom(t.num.sub(&y.mul(&t.den)).mul(&t.den), Rel::Ge), Formula::atom(t.den.clone(), Rel::Ne));
            let mut names = domain.names[..=n].to_vec();
            names.push(String::from("_y"));
            Ok(SaFormula::with_names(names, n + 1, Formula::and(vec![d, Formula::atom(y, Rel::Ge), below])))
        }
        FnDesc::Graph(g) => {
            let n = g.nfree - 1;
            let t = g.fresh_var();
            // exists v (graph(x, v) and 0 <= y <= v)
            let gb = g.body.map_vars(&|i| if i == n + 1 { t } else { i });
            let y = MPoly::var(n + 1);
            let body = Formula::Exists(
                t,
                Box::new(Formula::and(vec![gb, Formula::atom(y.clone(), Rel::Ge), Formula::atom(y.sub(&MPoly::var(t)), Rel::Le)])),
            );
            Ok(SaFormula::with_names(g.names.clone(), n + 1, body))
        }
    }
}

/// I(f): the sum over open cells of the integral of the induced function, computed as
/// lambda(st of the subgraph), for f of one variable.
pub fn volume_i(f: &FnDesc, ctx: &Ctx) -> Result<MeasureValue> {
    let n = f.arity();
    if n != 1 {
        return Err(Error::Budget(format!("volumes are supported for functions of one variable, got {}", n)));
    }
    let sg = subgraph(f)?;
    // f >= 0 on its domain
    let neg = match f {
        FnDesc::Term { domain, term } => {
            SaFormula::with_names(domain.names.clone(), n, Formula::and2(domain.body.clone(), term.sign_atom(Rel::Lt)))
        }
        FnDesc::Graph(g) => SaFormula::with_names(g.names.clone(), n + 1, Formula::and2(g.body.clone(), Formula::atom(MPoly::var(n + 1), Rel::Lt))),
    };
    if !qe::sa_empty(&neg) {
        return Err(Error::Domain(String::from("precondition failed: f takes negative values")));
    }
    if !is_strongly_bounded(&sg, ctx)? {
        return Err(Error::Domain(String::from("precondition failed: the subgraph of f is not strongly bounded")));
    }
    measure_st(&sg, ctx)
}

/// A map psi: U -> V given by terms over Q(eps).
#[derive(Clone, Debug, PartialEq)]
pub struct IsoMap {
    pub comps: Vec<Term>,
    pub domain: SaFormula,
    pub codomain: SaFormula,
}

impl IsoMap {
    pub fn n(&self) -> usize {
        self.comps.len()
    }

    /// Jacobian determinant (n <= 2).
    pub fn jacobian(&self) -> Result<Term> {
        let d = |i: usize, j: usize| self.comps[i].derivative(j + 1);
        match self.n() {
            1 => Ok(d(0, 0)),
            2 => {
                let (a, b, c, e) = (d(0, 0), d(0, 1), d(1, 0), d(1, 1));
                let ae = Term::quot(a.num.mul(&e.num), a.den.mul(&e.den));
                let bc = Term::quot(b.num.mul(&c.num), b.den.mul(&c.den));
                Ok(Term::quot(ae.num.mul(&bc.den).sub(&bc.num.mul(&ae.den)), ae.den.mul(&bc.den)))
            }
            n => Err(Error::Budget(format!("Jacobians are supported for n <= 2, got {}", n))),
        }
    }
}

fn subst_terms(p: &MPoly, n: usize, comps: &[Term]) -> MPoly {
    // p(y) with y_i = M_i / D, cleared by an even power of D
    let mut den = MPoly::int(1);
    for t in comps {
        den = den.mul(&t.den);
    }
    let ms: Vec<MPoly> = comps
        .iter()
        .map(|t| {
            let mut m = t.num.clone();
            for o in comps {
                if !core::ptr::eq(o, t) {
                    m = m.mul(&o.den);
                }
            }
            m
        })
        .collect();
    let deg: u32 = p.t.keys().map(|m| (1..=n).map(|i| m.exp(i)).sum::<u32>()).max().unwrap_or(0);
    let e = deg + deg % 2;
    let mut out = MPoly::zero();
    for (mono, c) in p.t.iter() {
        let mut term = MPoly::constant(c.clone());
        let mut k = 0;
        for i in 0..mono.0.len() {
            let ex = mono.exp(i);
            if ex == 0 {
                continue;
            }
            if i >= 1 && i <= n {
                term = term.mul(&ms[i - 1].pow(ex));
                k += ex;
            } else {
                term = term.mul(&MPoly::var(i).pow(ex));
            }
        }
        out = out.add(&term.mul(&den.pow(e - k)));
    }
    out
}

/// {x : psi(x) in Y} (where the components are defined).
pub fn pullback(y: &SaFormula, comps: &[Term]) -> SaFormula {
    let n = y.nfree;
    let body = y.body.map_polys(&|p| subst_terms(p, n, comps));
    let defined = Formula::and(comps.iter().map(|t| Formula::atom(t.den.clone(), Rel::Ne)).collect());
    SaFormula::with_names(y.names.clone(), n, Formula::and2(defined, body))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsoReport {
    /// X and psi^-1(Y) agree on U outside a set of dimension < n.
    pub sets_agree: bool,
    /// |J psi| = 1 on X cap U outside a set of dimension < n.
    pub unit_jacobian: bool,
    /// Injectivity on U (decided for n = 1).
    pub injective: Option<bool>,
    pub measure_x: Option<MeasureValue>,
    pub measure_y: Option<MeasureValue>,
    pub isomorphic: bool,
    pub report: String,
}

/// Check that psi restricts to an isomorphism of (X, Y) as elements of B[n].
pub fn check_isomorphism(psi: &IsoMap, x: &SaFormula, y: &SaFormula, ctx: &Ctx) -> Result<IsoReport> {
    let n = psi.n();
    if x.nfree != n || y.nfree != n {
        return Err(Error::Arity(String::from("map and sets differ in dimension")));
    }
    let u = &psi.domain;
    let back = pullback(y, &psi.comps);
    let xor = Formula::or2(Formula::and2(x.body.clone(), Formula::not(back.body.clone())), Formula::and2(Formula::not(x.body.clone()), back.body.clone()));
    let l1 = qe::intersection(u, &SaFormula::with_names(x.names.clone(), n, xor))?;
    let sets_agree = qe::sa_dim(&l1) < n as i32;
    let j = psi.jacobian()?;
    let jj = Term::quot(j.num.pow(2).sub(&j.den.pow(2)), j.den.pow(2));
    let bad = SaFormula::with_names(x.names.clone(), n, jj.sign_atom(Rel::Ne));
    let l2 = qe::intersection(&qe::intersection(x, u)?, &bad)?;
    let unit_jacobian = qe::sa_dim(&l2) < n as i32;
    let injective = if n == 1 { Some(injective_on(psi, u)) } else { None };
    let (mut mx, mut my) = (None, None);
    let mut ok = sets_agree && unit_jacobian && injective != Some(false);
    let mut report = format!("sets agree a.e.: {}; |J| = 1 a.e.: {}", sets_agree, unit_jacobian);
    if ok && is_strongly_bounded(x, ctx)? && is_strongly_bounded(y, ctx)? {
        let a = measure_st(x, ctx)?;
        let b = measure_st(y, ctx)?;
        let agree = a.agrees(&b, 0.0);
        report.push_str(&format!("; measures {:.12} and {:.12} agree: {}", a.approx(), b.approx(), agree));
        ok &= agree;
        mx = Some(a);
        my = Some(b);
    }
    Ok(IsoReport { sets_agree, unit_jacobian, injective, measure_x: mx, measure_y: my, isomorphic: ok, report })
}

fn injective_on(psi: &IsoMap, u: &SaFormula) -> bool {
    // forall s, t in U: psi(s) = psi(t) -> s = t
    let t0 = u.fresh_var();
    let (s, t) = (t0, t0 + 1);
    let at = |v: usize, k: usize| u.body.map_vars(&|i| if i == 1 { v } else if i > 1 { i + k } else { i });
    let us = at(s, 2 * t0 + 4);
    let ut = at(t, 3 * t0 + 8);
    let f = &psi.comps[0];
    let fs = f.map_polys(&|p| p.map_vars(|i| if i == 1 { s } else { i }));
    let ft = f.map_polys(&|p| p.map_vars(|i| if i == 1 { t } else { i }));
    let eq = Formula::atom(fs.num.mul(&ft.den).sub(&ft.num.mul(&fs.den)), Rel::Eq);
    let same = Formula::atom(MPoly::var(s).sub(&MPoly::var(t)), Rel::Eq);
    let body = Formula::implies(Formula::and(vec![us, ut, eq]), same);
    let sent = Formula::Forall(s, Box::new(Formula::Forall(t, Box::new(body))));
    qe::decide_prepared(&prepare(&SaFormula::new(0, sent)))
}

/// mu*(X): the measure of a strongly bounded isomorphic copy, or infinity without a witness.
pub fn measure_extension(x: &SaFormula, witness: Option<(&IsoMap, &SaFormula)>, ctx: &Ctx) -> Result<MeasureValue> {
    if !is_bounded(x) {
        return Err(Error::Domain(String::from("precondition failed: X is not bounded")));
    }
    match witness {
        Some((psi, y)) => {
            let r = check_isomorphism(psi, x, y, ctx)?;
            if !(r.sets_agree && r.unit_jacobian && r.injective != Some(false)) {
                return Err(Error::Certificate(format!("witness fails: {}", r.report)));
            }
            measure_st(y, ctx)
        }
        None if is_strongly_bounded(x, ctx)? => measure_st(x, ctx),
        None => Ok(MeasureValue::infinite("no witness supplied")),
    }
}

/// Result of comparing st of derivatives with derivatives of st.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeReport {
    /// Per variable: the graph of the induced derivative equals that of d g / d x_i.
    pub symbolic: Vec<Option<bool>>,
    pub fd_points: usize,
    pub fd_max_error: f64,
    pub ok: bool,
}

/// Standard part of a term on a cell where its lowest-order denominator has no zero.
fn standard_term(t: &Term) -> Term {
    let a = t.num.t.keys().map(|m| m.exp(0)).min().unwrap_or(0);
    let b = t.den.t.keys().map(|m| m.exp(0)).min().unwrap_or(0);
    if t.num.is_zero() || a > b {
        Term::poly(MPoly::zero())
    } else {
        Term::quot(lowest_eps_part(&t.num), lowest_eps_part(&t.den))
    }
}

fn graph_over(t: &Term, c: &GoodCell) -> SaFormula {
    let n = c.n();
    let mut names = c.region.names[..=n].to_vec();
    names.push(String::from("_y"));
    let lifted = c.region.body.map_vars(&|i| if i > n { i + 1 } else { i });
    SaFormula::with_names(names, n + 1, Formula::and2(lifted, t.graph_atom(n + 1)))
}

/// Rational points of an open cell in a grid, with room for central differences of step h.
fn grid_points(c: &GoodCell, count: usize, h: &Rat) -> Vec<Vec<Rat>> {
    let n = c.n();
    let mut pts = Vec::new();
    let mut res = 16i64;
    while pts.len() < count && res <= 1024 {
        pts.clear();
        let g: Vec<Rat> = (1..2 * res).map(|k| crate::rat::rq(k, res) - ri(1)).collect();
        let combos: Vec<Vec<Rat>> = if n == 1 { g.iter().map(|a| vec![a.clone()]).collect() } else { g.iter().flat_map(|a| g.iter().map(move |b| vec![a.clone(), b.clone()])).collect() };
        for p in combos {
            let mut ok = qe::holds_at(&c.region, &p, None);
            for i in 0..n {
                if !ok {
                    break;
                }
                for s in [-1i64, 1] {
                    let mut q = p.clone();
                    q[i] += h * ri(s);
                    ok &= qe::holds_at(&c.region, &q, None);
                }
            }
            if ok {
                pts.push(p);
            }
        }
        res *= 2;
    }
    // spread the chosen points over the candidates
    if pts.len() > count {
        let step = pts.len() as f64 / count as f64;
        pts = (0..count).map(|k| pts[(k as f64 * step) as usize].clone()).collect();
    }
    pts
}

/// Check that the functions induced by the partial derivatives of f are the partial derivatives
/// of the function induced by f on the open cell D.
pub fn st_derivative_commutes(f: &FnDesc, d: &GoodCell, ctx: &Ctx) -> Result<DerivativeReport> {
    let (domain, term) = match f {
        FnDesc::Term { domain, term } => (domain, term),
        FnDesc::Graph(_) => return Err(Error::Invalid(String::from("derivatives need a term descriptor"))),
    };
    if !d.is_open() {
        return Err(Error::Invalid(String::from("the cell must be open")));
    }
    let n = d.n();
    let g = make_induced_fn(f, d, ctx)?;
    let gt = standard_term(term);
    let g_sym = qe::sa_equal(&graph_over(&gt, d), &g.graph_st)?;
    let mut symbolic = Vec::new();
    let mut derivs = Vec::new();
    for i in 1..=n {
        let fi = FnDesc::Term { domain: domain.clone(), term: term.derivative(i) };
        let gi = make_induced_fn(&fi, d, ctx).map_err(|e| Error::NotInduced(format!("d f / d x{}: {}", i, e)))?;
        let dgt = gt.derivative(i);
        symbolic.push(if g_sym { Some(qe::sa_equal(&graph_over(&dgt, d), &gi.graph_st)?) } else { None });
        derivs.push(standard_term(&term.derivative(i)));
    }
    // finite differences of g against the induced derivatives
    let h = Rat::new(1.into(), 1000.into());
    let pts = grid_points(d, 100, &h);
    let mut worst: f64 = 0.0;
    for p in &pts {
        let pf: Vec<f64> = p.iter().map(to_f64).collect();
        for i in 0..n {
            let mut a = pf.clone();
            let mut b = pf.clone();
            a[i] -= 1e-3;
            b[i] += 1e-3;
            let fd = (gt.eval_f64(&[&[0.0][..], &b].concat()) - gt.eval_f64(&[&[0.0][..], &a].concat())) / 2e-3;
            let exact = derivs[i].eval_f64(&[&[0.0][..], &pf].concat());
            worst = worst.max((fd - exact).abs());
        }
    }
    let ok = symbolic.iter().all(|s| *s != Some(false)) && g_sym && worst <= 1e-4 && pts.len() >= 100;
    Ok(DerivativeReport { symbolic, fd_points: pts.len(), fd_max_error: worst, ok })
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
    fn ctx() -> Ctx {
        Ctx::default()
    }
    fn open01() -> Formula {
        Formula::and2(at(v(1), Rel::Gt), at(v(1).sub(&c(1, 1)), Rel::Lt))
    }

    #[test]
    fn quadrature() {
        let (v, _) = tanh_sinh(&mut |x| libm::sqrt(1.0 - x * x), -1.0, 1.0, 1e-13);
        assert!((v - core::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn measures() {
        let x = SaFormula::new(1, Formula::and2(at(v(1).sub(&v(0)), Rel::Gt), at(v(1).sub(&c(1, 1)).add(&v(0)), Rel::Lt)));
        assert_eq!(measure_st(&x, &ctx()).unwrap(), MeasureValue::exact(ri(1)));
        let root2 = SaFormula::new(1, at(v(1).pow(2).sub(&c(2, 1)), Rel::Lt));
        let m = measure_st(&root2, &ctx()).unwrap();
        assert!(!m.exact && (m.approx() - 2.0 * core::f64::consts::SQRT_2).abs() < 1e-12);
        let disk = SaFormula::new(2, at(v(1).pow(2).add(&v(2).pow(2)).sub(&c(1, 1)).sub(&v(0)), Rel::Lt));
        let m = measure_st(&disk, &ctx()).unwrap();
        assert!((m.approx() - core::f64::consts::PI).abs() < 1e-6);
        assert!(m.radius_f64() < 1e-6);
        let seg = SaFormula::new(2, Formula::and2(open01(), at(v(2), Rel::Eq)));
        assert_eq!(measure_st(&seg, &ctx()).unwrap(), MeasureValue::exact(Rat::zero()));
        // triangle 0 < y < x < 1 has area 1/2 exactly
        let tri = SaFormula::new(2, Formula::and2(open01(), Formula::and2(at(v(2), Rel::Gt), at(v(2).sub(&v(1)), Rel::Lt))));
        assert_eq!(measure_st(&tri, &ctx()).unwrap(), MeasureValue::exact(rq(1, 2)));
    }

    #[test]
    fn qboxes() {
        let x = SaFormula::new(1, at(v(1).sub(&c(1, 2)).pow(2).sub(&c(1, 4)).sub(&v(0)), Rel::Lt));
        assert!(matches!(contains_qbox(&x, &ctx()).unwrap(), QBox::Found(_)));
        let seg = SaFormula::new(2, Formula::and2(open01(), at(v(2), Rel::Eq)));
        assert_eq!(contains_qbox(&seg, &ctx()).unwrap(), QBox::InteriorEmpty);
        let sq = SaFormula::new(2, Formula::and(vec![at(v(1).pow(2).sub(&c(1, 1)), Rel::Le), at(v(2).pow(2).sub(&c(1, 1)), Rel::Le)]));
        assert_eq!(contains_qbox(&sq, &ctx()).unwrap(), QBox::Found(vec![(ri(-1), ri(0)), (ri(-1), ri(0))]));
    }

    #[test]
    fn volumes() {
        let x = SaFormula::new(1, Formula::and2(at(v(1).sub(&v(0)), Rel::Gt), at(v(1).sub(&c(1, 1)).add(&v(0)), Rel::Lt)));
        let one = FnDesc::Term { domain: x, term: Term::poly(MPoly::int(1)) };
        assert_eq!(volume_i(&one, &ctx()).unwrap(), MeasureValue::exact(ri(1)));
        let dom = SaFormula::new(1, Formula::and2(at(v(1).add(&c(1, 1)), Rel::Gt), at(v(1).sub(&c(1, 1)), Rel::Lt)));
        let bump = FnDesc::Term { domain: dom, term: Term::poly(c(1, 1).sub(&v(1).pow(2)).add(&v(0))) };
        let m = volume_i(&bump, &ctx()).unwrap();
        assert!((m.approx() - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn isomorphisms() {
        let x = SaFormula::new(1, open01());
        let y = SaFormula::new(1, Formula::and2(at(v(1).add(&v(0)), Rel::Gt), at(v(1).sub(&c(1, 1)).add(&v(0)), Rel::Lt)));
        let u = SaFormula::new(1, Formula::True);
        let shift = IsoMap { comps: vec![Term::poly(v(1).sub(&v(0)))], domain: u.clone(), codomain: u.clone() };
        assert!(check_isomorphism(&shift, &x, &y, &ctx()).unwrap().isomorphic);
        let double = IsoMap { comps: vec![Term::poly(v(1).scale(&ri(2)))], domain: u.clone(), codomain: u.clone() };
        let y2 = SaFormula::new(1, Formula::and2(at(v(1), Rel::Gt), at(v(1).sub(&c(2, 1)), Rel::Lt)));
        let r = check_isomorphism(&double, &x, &y2, &ctx()).unwrap();
        assert!(r.sets_agree && !r.unit_jacobian && !r.isomorphic);
        // (1/eps, 1/eps + 1) is bounded but not strongly; translated to (0, 1)
        let far = SaFormula::new(1, Formula::and2(at(v(1).mul(&v(0)).sub(&c(1, 1)), Rel::Gt), at(v(1).mul(&v(0)).sub(&c(1, 1)).sub(&v(0)), Rel::Lt)));
        let back = IsoMap { comps: vec![Term::quot(v(1).mul(&v(0)).sub(&c(1, 1)), v(0))], domain: u.clone(), codomain: u };
        assert_eq!(measure_extension(&far, Some((&back, &x)), &ctx()).unwrap(), MeasureValue::exact(ri(1)));
        assert!(measure_extension(&far, None, &ctx()).unwrap().infinite);
    }

    #[test]
    fn derivatives() {
        let x = SaFormula::new(1, Formula::and2(at(v(1).sub(&v(0)), Rel::Gt), at(v(1).sub(&c(1, 1)).add(&v(0)), Rel::Lt)));
        let d = good_decomposition_box(&[x.clone()], None, &ctx()).unwrap();
        let cell = d.cells.iter().find(|cl| qe::sa_equal(&cl.region, &SaFormula::new(1, open01())).unwrap()).unwrap();
        let f = FnDesc::term(1, Term::poly(v(1).pow(2).add(&v(0).mul(&v(1)))));
        let r = st_derivative_commutes(&f, cell, &ctx()).unwrap();
        assert!(r.ok, "{:?}", r);
        let f = FnDesc::Term { domain: x, term: Term::quot(v(0), v(1)) };
        let r = st_derivative_commutes(&f, cell, &ctx()).unwrap();
        assert!(r.ok, "{:?}", r);
    }
}

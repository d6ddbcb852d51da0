//! Decision, quantifier elimination and set algebra via CAD.

use crate::algebraic::{sign_at, Coord};
use crate::cad::{stack, Cad, Projection};
use crate::ctx::Ctx;
use crate::error::{Error, Result};
use crate::formula::{prenex, Formula, Prefix, Rel, SaFormula};
use crate::mpoly::MPoly;
use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Formula rearranged for CAD: slots 0 (eps), 1..=nfree free, then the prefix variables in order.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub nfree: usize,
    pub prefix: Vec<bool>,
    pub matrix: Formula,
}

impl Prepared {
    pub fn nvars(&self) -> usize {
        1 + self.nfree + self.prefix.len()
    }

    pub fn polys(&self) -> Vec<MPoly> {
        let mut ps = Vec::new();
        self.matrix.polys(&mut ps);
        ps
    }
}

fn rename_apart(f: &Formula, next: &mut usize, map: &BTreeMap<usize, usize>) -> Formula {
    match f {
        Formula::Atom(a, r, b) => {
            let g = |i: usize| *map.get(&i).unwrap_or(&i);
            Formula::Atom(a.map_vars(g), *r, b.map_vars(g))
        }
        Formula::Not(g) => Formula::Not(Box::new(rename_apart(g, next, map))),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename_apart(g, next, map)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename_apart(g, next, map)).collect()),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let nv = *next;
            *next += 1;
            let mut m2 = map.clone();
            m2.insert(*v, nv);
            let inner = Box::new(rename_apart(g, next, &m2));
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(nv, inner)
            } else {
                Formula::Forall(nv, inner)
            }
        }
        t => t.clone(),
    }
}

pub fn prepare(f: &SaFormula) -> Prepared {
    let start = f.body.max_var().max(f.nfree + 1) + 1;
    let mut next = start;
    let g = rename_apart(&f.body, &mut next, &BTreeMap::new());
    let (pre, m): (Prefix, Formula) = prenex(&g);
    let mut map = BTreeMap::new();
    for (i, (_, v)) in pre.iter().enumerate() {
        map.insert(*v, f.nfree + 1 + i);
    }
    let m = m.map_vars(&|i| *map.get(&i).unwrap_or(&i));
    Prepared { nfree: f.nfree, prefix: pre.iter().map(|p| p.0).collect(), matrix: m }
}

fn check_budget(p: &Prepared, ctx: &Ctx) -> Result<()> {
    let nv = p.nfree + p.prefix.len();
    if nv > ctx.max_vars {
        return Err(Error::Budget(format!("{} variables exceed the limit of {}", nv, ctx.max_vars)));
    }
    for q in p.polys() {
        let d = q.map_vars(|i| if i == 0 { 0 } else { i }).t.keys().map(|m| m.0.iter().skip(1).sum::<u32>()).max().unwrap_or(0);
        if d > ctx.max_degree {
            return Err(Error::Budget(format!("degree {} exceeds the limit of {}", d, ctx.max_degree)));
        }
    }
    Ok(())
}

/// Truth of the quantified part over a sample point at level `level - 1`.
fn eval_from(proj: &Projection, pt: &mut Vec<Coord>, level: usize, p: &Prepared) -> bool {
    let n = p.nvars();
    if level == n {
        let mut s = |q: &MPoly| sign_at(pt, q);
        return p.matrix.eval_qf(&mut s);
    }
    let ex = p.prefix[level - 1 - p.nfree];
    let samples = stack(pt, &proj.levels[level], level);
    // sectors (rational samples) first
    let order: Vec<usize> = (0..samples.len()).step_by(2).chain((1..samples.len()).step_by(2)).collect();
    for i in order {
        pt.push(samples[i].clone());
        let t = eval_from(proj, pt, level + 1, p);
        pt.pop();
        if ex && t {
            return true;
        }
        if !ex && !t {
            return false;
        }
    }
    !ex
}

/// CAD lifted over the free variables with the truth value on each free cell.
pub struct TruthCad {
    pub cad: Cad,
    pub truth: Vec<bool>,
    pub nfree: usize,
}

pub fn truth_cad(p: &Prepared, closure: bool) -> TruthCad {
    let extra: Vec<MPoly> = Vec::new();
    truth_cad_with(p, closure, &extra)
}

/// Same, with extra polynomials made sign-invariant.
pub fn truth_cad_with(p: &Prepared, closure: bool, extra: &[MPoly]) -> TruthCad {
    let mut polys = p.polys();
    polys.extend(extra.iter().cloned());
    let n = p.nvars();
    let cad = Cad::build(&polys, n, p.nfree, if closure { p.nfree } else { 0 });
    let mut truth = Vec::with_capacity(cad.leaves().len());
    for c in cad.leaves() {
        let mut pt = c.sample.clone();
        truth.push(eval_from(&cad.proj, &mut pt, p.nfree + 1, p));
    }
    TruthCad { cad, truth, nfree: p.nfree }
}

pub fn decide_prepared(p: &Prepared) -> bool {
    assert_eq!(p.nfree, 0);
    let t = truth_cad(p, false);
    t.truth[0]
}

pub fn decide(f: &SaFormula, ctx: &Ctx) -> Result<bool> {
    if f.nfree != 0 {
        return Err(Error::Invalid(String::from("decide: free variables present")));
    }
    let p = prepare(f);
    check_budget(&p, ctx)?;
    Ok(decide_prepared(&p))
}

fn literal(f: &MPoly, s: i8) -> Formula {
    Formula::atom(f.clone(), Rel::from_sign(s))
}

/// Quantifier-free description of the true cells by sign conditions.
fn describe(tc: &mut TruthCad) -> Option<Formula> {
    describe_cells(&mut tc.cad, &tc.truth, tc.nfree)
}

/// Sign-condition formula for the union of the true leaves on level k; None if two leaves with
/// the same sign vector disagree.
pub fn describe_cells(cad: &mut Cad, truth: &[bool], k: usize) -> Option<Formula> {
    if truth.iter().all(|&t| t) {
        return Some(Formula::True);
    }
    if truth.iter().all(|&t| !t) {
        return Some(Formula::False);
    }
    let nleaves = cad.leaves().len();
    let mut svs: Vec<Vec<i8>> = Vec::with_capacity(nleaves);
    for i in 0..nleaves {
        svs.push(cad.sign_vector(k, i));
    }
    let mut by: BTreeMap<Vec<i8>, bool> = BTreeMap::new();
    for (sv, &t) in svs.iter().zip(truth) {
        if let Some(&o) = by.get(sv) {
            if o != t {
                return None;
            }
        }
        by.insert(sv.clone(), t);
    }
    let facs = cad.factors_upto(k);
    let falses: Vec<&Vec<i8>> = by.iter().filter(|(_, &t)| !t).map(|(s, _)| s).collect();
    let mut disj: Vec<Vec<(usize, i8)>> = Vec::new();
    for (sv, _) in by.iter().filter(|(_, &t)| t) {
        // skip if already covered by an earlier conjunction
        if disj.iter().any(|c| c.iter().all(|&(i, s)| sv[i] == s)) {
            continue;
        }
        let mut lits: Vec<(usize, i8)> = sv.iter().enumerate().map(|(i, &s)| (i, s)).collect();
        let mut i = 0;
        while i < lits.len() {
            let trial: Vec<(usize, i8)> = lits.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| *l).collect();
            let hits_false = falses.iter().any(|f| trial.iter().all(|&(x, s)| f[x] == s));
            if hits_false {
                i += 1;
            } else {
                lits = trial;
            }
        }
        disj.push(lits);
    }
    Some(Formula::or(disj.into_iter().map(|c| Formula::and(c.into_iter().map(|(i, s)| literal(&facs[i], s)).collect())).collect()))
}

/// Quantifier-free equivalent; for already quantifier-free input the formula is returned unchanged.
pub fn qe_prepared(p: &Prepared) -> Formula {
    if p.prefix.is_empty() {
        return p.matrix.clone();
    }
    let mut tc = truth_cad(p, false);
    if let Some(f) = describe(&mut tc) {
        return f;
    }
    let mut tc = truth_cad(p, true);
    describe(&mut tc).expect("derivative-closed CAD is projection definable")
}

pub fn eliminate_quantifiers(f: &SaFormula, ctx: &Ctx) -> Result<SaFormula> {
    let p = prepare(f);
    check_budget(&p, ctx)?;
    let body = qe_prepared(&p);
    Ok(SaFormula { names: f.names[..=f.nfree].to_vec(), nfree: f.nfree, body })
}

/// Dimension of the set (max over true free cells), -1 if empty.
pub fn sa_dim(f: &SaFormula) -> i32 {
    let p = prepare(f);
    let t = truth_cad(&p, false);
    t.cad.leaves().iter().zip(&t.truth).filter(|(_, &b)| b).map(|(c, _)| c.dim() as i32).max().unwrap_or(-1)
}

pub fn sa_empty(f: &SaFormula) -> bool {
    let p = prepare(f);
    let t = truth_cad(&p, false);
    !t.truth.iter().any(|&b| b)
}

/// Extensional equality of two sets of the same arity.
pub fn sa_equal(f: &SaFormula, g: &SaFormula) -> Result<bool> {
    Ok(sa_equal_all(&[f.clone(), g.clone()])?.0)
}

/// Truth tables of several same-arity sets on a common CAD; returns (all equal, tables).
pub fn sa_equal_all(fs: &[SaFormula]) -> Result<(bool, Vec<Vec<bool>>)> {
    let tabs = common_tables(fs)?;
    let eq = tabs.iter().all(|t| *t == tabs[0]);
    Ok((eq, tabs))
}

/// Truth values of each (quantifier-free-ized) formula on the leaves of one common CAD.
pub fn common_tables(fs: &[SaFormula]) -> Result<Vec<Vec<bool>>> {
    let n = fs[0].nfree;
    if fs.iter().any(|f| f.nfree != n) {
        return Err(Error::Arity(String::from("formulas of different arity")));
    }
    let qf: Vec<Formula> = fs.iter().map(|f| qe_prepared(&prepare(f))).collect();
    let mut polys = Vec::new();
    for f in &qf {
        f.polys(&mut polys);
    }
    let cad = Cad::build(&polys, n + 1, n, 0);
    let mut tabs = vec![Vec::new(); fs.len()];
    for c in cad.leaves() {
        let mut pt = c.sample.clone();
        for (i, f) in qf.iter().enumerate() {
            let mut s = |q: &MPoly| sign_at(&mut pt, q);
            tabs[i].push(f.eval_qf(&mut s));
        }
    }
    Ok(tabs)
}

/// Leaves of a common CAD with the truth of each formula and the cell dimension.
pub fn common_cells(fs: &[SaFormula]) -> Result<(Cad, Vec<Vec<bool>>)> {
    let n = fs[0].nfree;
    if fs.iter().any(|f| f.nfree != n) {
        return Err(Error::Arity(String::from("formulas of different arity")));
    }
    let qf: Vec<Formula> = fs.iter().map(|f| qe_prepared(&prepare(f))).collect();
    let mut polys = Vec::new();
    for f in &qf {
        f.polys(&mut polys);
    }
    let cad = Cad::build(&polys, n + 1, n, 0);
    let mut tabs = vec![Vec::new(); fs.len()];
    for c in cad.leaves() {
        let mut pt = c.sample.clone();
        for (i, f) in qf.iter().enumerate() {
            let mut s = |q: &MPoly| sign_at(&mut pt, q);
            tabs[i].push(f.eval_qf(&mut s));
        }
    }
    Ok((cad, tabs))
}

/// Minimal sign-condition formula for every cell on level k; None if two cells share a sign vector.
pub fn cell_formulas(cad: &mut Cad, k: usize) -> Option<Vec<Formula>> {
    let n = cad.cells[k].len();
    let svs: Vec<Vec<i8>> = (0..n).map(|i| cad.sign_vector(k, i)).collect();
    for i in 0..n {
        for j in i + 1..n {
            if svs[i] == svs[j] {
                return None;
            }
        }
    }
    let facs = cad.factors_upto(k);
    let mut out = Vec::with_capacity(n);
    for (ci, sv) in svs.iter().enumerate() {
        let mut lits: Vec<(usize, i8)> = sv.iter().enumerate().map(|(i, &s)| (i, s)).collect();
        let mut i = 0;
        while i < lits.len() {
            let trial: Vec<(usize, i8)> = lits.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| *l).collect();
            let clash = svs.iter().enumerate().any(|(o, w)| o != ci && trial.iter().all(|&(x, s)| w[x] == s));
            if clash {
                i += 1;
            } else {
                lits = trial;
            }
        }
        out.push(Formula::and(lits.into_iter().map(|(i, s)| literal(&facs[i], s)).collect()));
    }
    Some(out)
}

// ---- set operations ----

fn same_arity(f: &SaFormula, g: &SaFormula) -> Result<()> {
    if f.nfree != g.nfree {
        return Err(Error::Arity(format!("{} vs {} variables", f.nfree, g.nfree)));
    }
    Ok(())
}

/// Move g's bound variables above f's slots so the two bodies can be combined.
fn align(f: &SaFormula, g: &SaFormula) -> (Vec<String>, Formula) {
    let off = f.fresh_var();
    let n = g.nfree;
    let body = g.body.map_vars(&|i| if i <= n { i } else { i - n - 1 + off });
    let mut names = f.names.clone();
    while names.len() < off {
        let k = names.len();
        names.push(format!("_b{}", k));
    }
    for nm in g.names.iter().skip(n + 1) {
        names.push(nm.clone());
    }
    (names, body)
}

pub fn union(f: &SaFormula, g: &SaFormula) -> Result<SaFormula> {
    same_arity(f, g)?;
    let (names, gb) = align(f, g);
    Ok(SaFormula::with_names(names, f.nfree, Formula::or2(f.body.clone(), gb)))
}

pub fn intersection(f: &SaFormula, g: &SaFormula) -> Result<SaFormula> {
    same_arity(f, g)?;
    let (names, gb) = align(f, g);
    Ok(SaFormula::with_names(names, f.nfree, Formula::and2(f.body.clone(), gb)))
}

pub fn complement(f: &SaFormula) -> SaFormula {
    SaFormula { names: f.names.clone(), nfree: f.nfree, body: Formula::not(f.body.clone()) }
}

pub fn difference(f: &SaFormula, g: &SaFormula) -> Result<SaFormula> {
    intersection(f, &complement(g))
}

/// f x g with g's coordinates placed after f's.
pub fn product(f: &SaFormula, g: &SaFormula) -> SaFormula {
    let n = f.nfree;
    let m = g.nfree;
    // f: free 1..n stay; bound shift by m. g: free 1..m -> n+1..n+m; bound above everything.
    let fb = f.body.map_vars(&|i| if i <= n { i } else { i + m });
    let foff = f.fresh_var() + m;
    let gb = g.body.map_vars(&|i| if i == 0 { 0 } else if i <= m { i + n } else { i - m - 1 + foff });
    let mut names = vec![String::from("eps")];
    let fnames: Vec<String> = f.names[1..=n].to_vec();
    let gnames: Vec<String> = g.names[1..=m].to_vec();
    let mut free: Vec<String> = fnames.clone();
    for nm in gnames {
        let mut nm2 = nm.clone();
        while free.contains(&nm2) {
            nm2.push('\'');
        }
        free.push(nm2);
    }
    names.extend(free);
    SaFormula::with_names(names, n + m, Formula::and2(fb, gb))
}

/// Image under the projection dropping the last k coordinates.
pub fn project_last(f: &SaFormula, k: usize) -> SaFormula {
    let n = f.nfree;
    let mut body = f.body.clone();
    for v in (n - k + 1..=n).rev() {
        body = Formula::Exists(v, Box::new(body));
    }
    SaFormula { names: f.names.clone(), nfree: n - k, body }
}

/// Evaluate a formula at a rational point (any quantifiers are decided).
pub fn holds_at(f: &SaFormula, x: &[crate::rat::Rat], e: Option<&crate::rat::Rat>) -> bool {
    let n = f.nfree;
    let mut body = f.body.clone();
    for i in 1..=n {
        let xi = x[i - 1].clone();
        body = body.map_polys(&|p| p.subst_rat(i, &xi));
    }
    if let Some(e) = e {
        body = body.map_polys(&|p| p.subst_rat(0, e));
    }
    let s = SaFormula::with_names(f.names.clone(), 0, body.map_vars(&|i| if i > n { i - n } else { i }));
    decide_prepared(&prepare(&s))
}

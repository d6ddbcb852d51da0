//! Good cells over the reals, induced functions and good decompositions.

use crate::algebraic::sign_at;
use crate::alg_eps::lowest_eps_part;
use crate::cad::Cad;
use crate::ctx::Ctx;
use crate::error::{Error, Result};
use crate::formula::{Formula, Rel, SaFormula};
use crate::mpoly::MPoly;
use crate::qe::{self, cell_formulas, common_cells, prepare, qe_prepared};
use crate::st::{st_set_internal, st_unbounded_locus, Side, StSet};
use crate::tau::{tau_image, tau_preimage};
use crate::term::Term;
use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// A definable function f: X -> R over Q(eps).
#[derive(Clone, Debug, PartialEq)]
pub enum FnDesc {
    /// f = term on the domain (n free variables).
    Term { domain: SaFormula, term: Term },
    /// Graph in n + 1 variables; the value is the last coordinate.
    Graph(SaFormula),
}

impl FnDesc {
    pub fn arity(&self) -> usize {
        match self {
            FnDesc::Term { domain, .. } => domain.nfree,
            FnDesc::Graph(g) => g.nfree - 1,
        }
    }

    /// Term on the set where its denominator does not vanish.
    pub fn term(n: usize, t: Term) -> Self {
        let dom = SaFormula::new(n, Formula::atom(t.den.clone(), Rel::Ne));
        FnDesc::Term { domain: dom, term: t }
    }

    pub fn graph_formula(&self) -> SaFormula {
        match self {
            FnDesc::Term { domain, term } => {
                let n = domain.nfree;
                let y = n + 1;
                let shift = |i: usize| if i > n { i + 1 } else { i };
                let d = domain.body.map_vars(&shift);
                let t = term.map_polys(&|p| p.map_vars(shift));
                let mut names = domain.names[..=n].to_vec();
                names.push(String::from("_y"));
                SaFormula::with_names(names, n + 1, Formula::and2(d, t.graph_atom(y)))
            }
            FnDesc::Graph(g) => g.clone(),
        }
    }

    fn domain(&self) -> SaFormula {
        match self {
            FnDesc::Term { domain, .. } => domain.clone(),
            FnDesc::Graph(g) => qe::project_last(g, 1),
        }
    }
}

/// g: C -> R with graph st(graph f) cap (C x R).
#[derive(Clone, Debug, PartialEq)]
pub struct InducedFn {
    /// Region of the domain cell C (n variables, over Q).
    pub domain: SaFormula,
    pub source: FnDesc,
    /// Graph of g (n + 1 variables, over Q).
    pub graph_st: SaFormula,
    /// Set when acceptance relied on a sufficient symbolic criterion.
    pub conservative: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Point,
    Graph(InducedFn),
    Cyl,
    Below(InducedFn),
    Between(InducedFn, InducedFn),
    Above(InducedFn),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodCell {
    /// 0 = graph coordinate, 1 = band coordinate.
    pub types: Vec<u8>,
    pub shape: Shape,
    pub base: Option<Box<GoodCell>>,
    /// The cell as a set over Q.
    pub region: SaFormula,
}

impl GoodCell {
    pub fn point() -> Self {
        GoodCell { types: Vec::new(), shape: Shape::Point, base: None, region: SaFormula::new(0, Formula::True) }
    }

    pub fn n(&self) -> usize {
        self.types.len()
    }

    pub fn is_open(&self) -> bool {
        self.types.iter().all(|&t| t == 1)
    }

    pub fn shape_tag(&self) -> &'static str {
        match self.shape {
            Shape::Point => "point",
            Shape::Graph(_) => "graph",
            Shape::Cyl => "cylinder",
            Shape::Below(_) => "below",
            Shape::Between(..) => "band",
            Shape::Above(_) => "above",
        }
    }

    /// Region rebuilt from the recursive shape (uses a bound variable for bands).
    pub fn shape_formula(&self) -> SaFormula {
        let n = self.n();
        if n == 0 {
            return SaFormula::new(0, Formula::True);
        }
        let base = self.base.as_ref().map(|b| b.region.body.clone()).unwrap_or(Formula::True);
        let t = n + 1;
        // y > f(x') as: exists t (graph_f(x', t) & y > t)
        let side = |g: &InducedFn, r: Rel| {
            let gb = g.graph_st.body.map_vars(&|i| if i == n { t } else if i > n { i + 2 } else { i });
            Formula::Exists(t, Box::new(Formula::and2(gb, Formula::atom(MPoly::var(n).sub(&MPoly::var(t)), r))))
        };
        let body = match &self.shape {
            Shape::Point => Formula::True,
            Shape::Cyl => base,
            Shape::Graph(g) => g.graph_st.body.clone(),
            Shape::Below(g) => Formula::and2(base, side(g, Rel::Lt)),
            Shape::Above(g) => Formula::and2(base, side(g, Rel::Gt)),
            Shape::Between(f, g) => Formula::and(vec![base, side(f, Rel::Gt), side(g, Rel::Lt)]),
        };
        SaFormula::with_names(self.region.names.clone(), n, body)
    }
}

fn lift(f: &Formula, n: usize) -> Formula {
    // n-variable formula into n+1 variables (bound slots move up by one)
    f.map_vars(&|i| if i > n { i + 1 } else { i })
}

/// C x R as a formula in n + 1 variables.
fn cyl(c: &SaFormula) -> Formula {
    lift(&c.body, c.nfree)
}

fn in_cell_empty(set: &SaFormula, c: &SaFormula) -> Result<bool> {
    Ok(qe::sa_empty(&qe::intersection(set, c)?))
}

/// A point of C (approximate coordinates) where `bad` holds, for error reports.
fn witness(bad: &SaFormula) -> String {
    let p = prepare(bad);
    let t = qe::truth_cad(&p, false);
    for (c, &b) in t.cad.leaves().iter().zip(&t.truth) {
        if b {
            let xs: Vec<String> = c.sample[1..].iter().map(|x| format!("{:.6}", x.approx())).collect();
            return format!("({})", xs.join(", "));
        }
    }
    String::from("(none)")
}

/// Exactly one value over each point of C: checked by decision over Q (n = 1).
fn check_fibers(graph: &SaFormula, c: &SaFormula) -> Result<()> {
    let n = c.nfree;
    if n != 1 {
        return Ok(());
    }
    // slots: x = 1, y = 2, y' = 3
    let g = &graph.body;
    let g2 = g.map_vars(&|i| if i == 2 { 3 } else if i > 2 { i + 10 } else { i });
    let total = SaFormula::new(1, Formula::and2(c.body.clone(), Formula::not(Formula::Exists(2, Box::new(g.clone())))));
    if !qe::sa_empty(&total) {
        return Err(Error::NotInduced(format!("empty fiber over {}", witness(&total))));
    }
    let uniq = Formula::Exists(
        2,
        Box::new(Formula::Exists(
            3,
            Box::new(Formula::and(vec![g.clone(), g2, Formula::atom(MPoly::var(2).sub(&MPoly::var(3)), Rel::Ne)])),
        )),
    );
    let multi = SaFormula::new(1, Formula::and2(c.body.clone(), uniq));
    if !qe::sa_empty(&multi) {
        return Err(Error::NotInduced(format!("several values over {}", witness(&multi))));
    }
    Ok(())
}

/// Leading eps-order and lowest part of a polynomial.
fn order_and_lowest(p: &MPoly) -> (u32, MPoly) {
    let k = p.t.keys().map(|m| m.exp(0)).min().unwrap_or(0);
    (k, lowest_eps_part(p))
}

/// Certify that f induces a function on C and compute its graph.
pub fn make_induced_fn(f: &FnDesc, c: &GoodCell, ctx: &Ctx) -> Result<InducedFn> {
    let n = c.n();
    if f.arity() != n {
        return Err(Error::Arity(format!("function of {} variables on a cell in R^{}", f.arity(), n)));
    }
    let creg = &c.region;
    // C^h inside the domain: no point outside X has its standard part in C
    let dom = f.domain();
    let outside = st_set_internal(&qe::complement(&dom), ctx)?;
    if !in_cell_empty(&outside.result, creg)? {
        return Err(Error::Domain(format!(
            "precondition failed: the hull of the cell leaves the domain near {}",
            witness(&qe::intersection(&outside.result, creg)?)
        )));
    }
    if let FnDesc::Term { term, .. } = f {
        // symbolic criterion: f = eps^(a-b) N0/D0 (1 + o(1)) with D0 != 0 on C
        let (a, n0) = order_and_lowest(&term.num);
        let (b, d0) = order_and_lowest(&term.den);
        let dz = SaFormula::new(n, Formula::atom(d0.clone(), Rel::Eq));
        let fits = a >= b && in_cell_empty(&dz, creg)?;
        if n >= 2 && !fits {
            return Err(Error::NotInduced(String::from(if a < b {
                "f is not bounded on the hull of the cell"
            } else {
                "conservative: lowest-order denominator vanishes on the cell"
            })));
        }
        if fits {
            let y = n + 1;
            let gbody = if a > b {
                Formula::atom(MPoly::var(y), Rel::Eq)
            } else {
                Formula::atom(MPoly::var(y).mul(&d0).sub(&n0), Rel::Eq)
            };
            let mut names = creg.names[..=n].to_vec();
            names.push(String::from("_y"));
            let graph = SaFormula::with_names(names, n + 1, Formula::and2(cyl(creg), gbody));
            return Ok(InducedFn { domain: creg.clone(), source: f.clone(), graph_st: graph, conservative: n >= 2 });
        }
    }
    if let FnDesc::Term { domain, term } = f {
        if n == 1 {
            for side in [Side::Pos, Side::Neg] {
                let u = st_unbounded_locus(domain, term, side, ctx)?;
                if !in_cell_empty(&u.result, creg)? {
                    return Err(Error::NotInduced(format!(
                        "f is not bounded on the hull of the cell near {}",
                        witness(&qe::intersection(&u.result, creg)?)
                    )));
                }
            }
        }
    }
    let g = f.graph_formula();
    let sg = st_set_internal(&g, ctx)?;
    let body = qe_prepared(&prepare(&SaFormula::with_names(
        sg.result.names.clone(),
        n + 1,
        Formula::and2(sg.result.body.clone(), cyl(creg)),
    )));
    let graph = SaFormula::with_names(sg.result.names.clone(), n + 1, body);
    check_fibers(&graph, creg)?;
    Ok(InducedFn { domain: creg.clone(), source: f.clone(), graph_st: graph, conservative: false })
}

/// g o pi on C for g induced on pi(C), pi selecting coordinates js (1-based, increasing).
pub fn compose_projection(g: &InducedFn, js: &[usize], c: &GoodCell) -> Result<InducedFn> {
    let n = c.n();
    let m = js.len();
    if m != g.domain.nfree || js.iter().any(|&j| j == 0 || j > n) || js.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Arity(String::from("projection indices out of range")));
    }
    // pi(C) must be the domain of g
    let mut pc = c.region.body.clone();
    let keep: Vec<usize> = js.to_vec();
    let drop: Vec<usize> = (1..=n).filter(|i| !keep.contains(i)).collect();
    for &d in &drop {
        pc = Formula::Exists(d, Box::new(pc));
    }
    // renumber kept coordinates to 1..m, dropped ones above everything
    let top = c.region.fresh_var() + n + 2;
    let ren = |i: usize| {
        if let Some(p) = keep.iter().position(|&k| k == i) {
            p + 1
        } else if i >= 1 && i <= n {
            top + i
        } else if i > n {
            i + top + n
        } else {
            i
        }
    };
    let pc = SaFormula::new(m, pc.map_vars(&ren));
    if !qe::sa_equal(&pc, &g.domain)? {
        return Err(Error::Domain(String::from("the projection of the cell is not the domain of g")));
    }
    // source f o p
    let back = |i: usize| if i >= 1 && i <= m { js[i - 1] } else if i == m + 1 { n + 1 } else if i > m + 1 { i + n + 1 } else { i };
    let source = match &g.source {
        FnDesc::Term { domain, term } => FnDesc::Term {
            domain: SaFormula::new(n, domain.body.map_vars(&|i| if i >= 1 && i <= m { js[i - 1] } else if i > m { i + n } else { i })),
            term: term.map_polys(&|p| p.map_vars(|i| if i >= 1 && i <= m { js[i - 1] } else { i })),
        },
        FnDesc::Graph(gr) => FnDesc::Graph(SaFormula::new(n + 1, gr.body.map_vars(&back))),
    };
    let gb = g.graph_st.body.map_vars(&back);
    let graph = SaFormula::with_names(
        {
            let mut v = c.region.names[..=n].to_vec();
            v.push(String::from("_y"));
            v
        },
        n + 1,
        Formula::and2(cyl(&c.region), gb),
    );
    Ok(InducedFn { domain: c.region.clone(), source, graph_st: graph, conservative: g.conservative })
}

/// Behaviour of a function on an open cell of a decomposition.
#[derive(Clone, Debug, PartialEq)]
pub enum FnOnCell {
    /// st(graph f) does not meet C x R.
    Misses,
    Induces(InducedFn),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// I^n with I = [-1, 1].
    Box,
    Rn,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodDecomposition {
    pub ambient: Ambient,
    pub n: usize,
    pub cells: Vec<GoodCell>,
    /// Index of each cell's projection in the base decomposition.
    pub base_index: Vec<Option<usize>>,
    pub base: Option<Box<GoodDecomposition>>,
    /// st(X_i) for the inputs, over Q.
    pub st_sets: Vec<SaFormula>,
    /// Per cell, for open cells when a function was supplied.
    pub fn_status: Vec<Option<FnOnCell>>,
}

fn unit_box(n: usize, names: &[String], strict: bool) -> SaFormula {
    let r = if strict { Rel::Lt } else { Rel::Le };
    let cs = (1..=n).map(|v| Formula::atom(MPoly::var(v).pow(2).sub(&MPoly::int(1)), r)).collect();
    SaFormula::with_names(names[..=n].to_vec(), n, Formula::and(cs))
}

fn box_polys(n: usize) -> Vec<MPoly> {
    let mut ps = Vec::new();
    for v in 1..=n {
        ps.push(MPoly::var(v).sub(&MPoly::int(1)));
        ps.push(MPoly::var(v).add(&MPoly::int(1)));
    }
    ps
}

/// Whether coordinate v of the sample lies in [-1, 1] (or (-1, 1) when strict).
fn coord_inside(pt: &mut [crate::algebraic::Coord], v: usize, strict: bool) -> bool {
    let a = sign_at(&mut pt[..=v], &MPoly::var(v).sub(&MPoly::int(1)));
    let b = sign_at(&mut pt[..=v], &MPoly::var(v).add(&MPoly::int(1)));
    if strict {
        a < 0 && b > 0
    } else {
        a <= 0 && b >= 0
    }
}

fn section_fn(base: &GoodCell, sec: &SaFormula) -> InducedFn {
    InducedFn { domain: base.region.clone(), source: FnDesc::Graph(sec.clone()), graph_st: sec.clone(), conservative: false }
}

/// Cells of a sign-definable CAD inside the box, level by level.
fn cad_levels(polys: &[MPoly], n: usize, names: &[String], strict: bool) -> Result<Vec<(Vec<GoodCell>, Vec<Option<usize>>)>> {
    let mut cad = Cad::build(polys, n + 1, n, n);
    let mut levels: Vec<(Vec<GoodCell>, Vec<Option<usize>>)> = vec![(vec![GoodCell::point()], vec![None])];
    // map cad index -> kept index, per level
    let mut kept_prev: Vec<Option<usize>> = vec![Some(0)];
    for k in 1..=n {
        let forms = cell_formulas(&mut cad, k).ok_or_else(|| Error::Certificate(String::from("cells are not sign-definable")))?;
        let ncells = cad.cells[k].len();
        let mut inside = vec![false; ncells];
        for (ci, ins) in inside.iter_mut().enumerate() {
            let mut pt = cad.cells[k][ci].sample.clone();
            let parent_ok = kept_prev[cad.cells[k][ci].parent.unwrap()].is_some();
            *ins = parent_ok && coord_inside(&mut pt, k, false);
            if strict && cad.cells[k][ci].index[k - 1] % 2 == 1 {
                *ins = *ins && coord_inside(&mut pt, k, true);
            }
        }
        let nm = names[..=k].to_vec();
        let region = |ci: usize| SaFormula::with_names(nm.clone(), k, forms[ci].clone());
        let mut cells = Vec::new();
        let mut bidx = Vec::new();
        let mut kept = vec![None; ncells];
        for ci in 0..ncells {
            if !inside[ci] {
                continue;
            }
            let cell = &cad.cells[k][ci];
            let p = cell.parent.unwrap();
            let pk = kept_prev[p].unwrap();
            let base = levels[k - 1].0[pk].clone();
            let j = cell.index[k - 1];
            let mut types = base.types.clone();
            let shape = if j % 2 == 1 {
                types.push(0);
                Shape::Graph(section_fn(&base, &region(ci)))
            } else {
                types.push(1);
                let sibs = &cad.cells[k - 1][p].children;
                let pos = sibs.iter().position(|&s| s == ci).unwrap();
                let bound = |q: Option<usize>| q.filter(|&s| inside[s]).map(|s| section_fn(&base, &region(s)));
                let lo = if pos > 0 { bound(Some(sibs[pos - 1])) } else { None };
                let hi = if pos + 1 < sibs.len() { bound(Some(sibs[pos + 1])) } else { None };
                match (lo, hi) {
                    (None, None) => Shape::Cyl,
                    (Some(f), None) => Shape::Above(f),
                    (None, Some(g)) => Shape::Below(g),
                    (Some(f), Some(g)) => Shape::Between(f, g),
                }
            };
            kept[ci] = Some(cells.len());
            cells.push(GoodCell { types, shape, base: Some(Box::new(base)), region: region(ci) });
            bidx.push(Some(pk));
        }
        levels.push((cells, bidx));
        kept_prev = kept;
    }
    Ok(levels)
}

fn assemble(levels: Vec<(Vec<GoodCell>, Vec<Option<usize>>)>, ambient: Ambient, st_sets: &[SaFormula]) -> GoodDecomposition {
    let mut dec: Option<GoodDecomposition> = None;
    for (k, (cells, bidx)) in levels.into_iter().enumerate() {
        let m = cells.len();
        let sets = if k + 1 == st_sets.first().map(|s| s.nfree + 1).unwrap_or(0) { st_sets.to_vec() } else { Vec::new() };
        dec = Some(GoodDecomposition {
            ambient,
            n: k,
            cells,
            base_index: if k == 0 { vec![None; m] } else { bidx },
            base: dec.map(Box::new),
            st_sets: sets,
            fn_status: vec![None; m],
        });
    }
    dec.unwrap()
}

fn formula_polys(f: &SaFormula, out: &mut Vec<MPoly>) {
    let q = qe_prepared(&prepare(f));
    q.polys(out);
}

/// Decomposition of I^n into good cells refining every st(X_i); with a function, each open
/// cell either misses st(graph f) or carries an induced function.
pub fn good_decomposition_box(sets: &[SaFormula], f: Option<&FnDesc>, ctx: &Ctx) -> Result<GoodDecomposition> {
    let n = sets.first().map(|s| s.nfree).or_else(|| f.map(|g| g.arity())).unwrap_or(0);
    if n > 2 {
        return Err(Error::Budget(format!("decompositions support n <= 2, got {}", n)));
    }
    let names = sets.first().map(|s| s.names.clone()).unwrap_or_else(|| crate::formula::default_names(n));
    let bx = unit_box(n, &names, false);
    let mut st_sets = Vec::new();
    let mut polys = box_polys(n);
    for x in sets {
        if x.nfree != n {
            return Err(Error::Arity(String::from("inputs of different arity")));
        }
        if !qe::sa_empty(&qe::difference(x, &bx)?) {
            return Err(Error::Domain(String::from("precondition failed: an input leaves I(R)^n")));
        }
        let s = st_set_internal(x, ctx)?;
        formula_polys(&s.result, &mut polys);
        st_sets.push(s.result);
    }
    if let Some(FnDesc::Term { domain, term }) = f {
        for p in [&term.num, &term.den] {
            let q = lowest_eps_part(p);
            if !q.is_const() {
                polys.push(q);
            }
        }
        let out = st_set_internal(&qe::complement(domain), ctx)?;
        formula_polys(&out.result, &mut polys);
    }
    let levels = cad_levels(&polys, n, &names, false)?;
    let mut dec = assemble(levels, Ambient::Box, &st_sets);
    if let Some(func) = f {
        for i in 0..dec.cells.len() {
            if dec.cells[i].is_open() {
                dec.fn_status[i] = Some(classify(func, &dec.cells[i], ctx)?);
            }
        }
    }
    Ok(dec)
}

/// Misses or induces on one open cell.
fn classify(f: &FnDesc, c: &GoodCell, ctx: &Ctx) -> Result<FnOnCell> {
    // pi(st graph f) lies in st(domain)
    let sd = st_set_internal(&f.domain(), ctx)?;
    if in_cell_empty(&sd.result, &c.region)? {
        return Ok(FnOnCell::Misses);
    }
    match make_induced_fn(f, c, ctx) {
        Ok(g) => Ok(FnOnCell::Induces(g)),
        Err(Error::NotInduced(msg)) => {
            let n = c.n();
            let misses = if n == 1 {
                let sg = st_set_internal(&f.graph_formula(), ctx)?;
                let cc = SaFormula::with_names(sg.result.names.clone(), n + 1, cyl(&c.region));
                in_cell_empty(&sg.result, &cc)?
            } else if let FnDesc::Term { term, .. } = f {
                // |f| exceeds every rational on the hull when a < b and N0 has no zero on C
                let (a, n0) = order_and_lowest(&term.num);
                let (b, _) = order_and_lowest(&term.den);
                a < b && in_cell_empty(&SaFormula::new(n, Formula::atom(n0, Rel::Eq)), &c.region)?
            } else {
                false
            };
            if misses {
                Ok(FnOnCell::Misses)
            } else {
                Err(Error::NotInduced(msg))
            }
        }
        Err(e) => Err(e),
    }
}

/// Decomposition of R^n refining every st(X_i), pulled back from J^n through tau.
pub fn good_decomposition_rn(sets: &[SaFormula], ctx: &Ctx) -> Result<GoodDecomposition> {
    let n = sets.first().map(|s| s.nfree).unwrap_or(0);
    if n > 2 {
        return Err(Error::Budget(format!("decompositions support n <= 2, got {}", n)));
    }
    let names = sets.first().map(|s| s.names.clone()).unwrap_or_else(|| crate::formula::default_names(n));
    let mut st_sets = Vec::new();
    let mut polys = box_polys(n);
    for x in sets {
        let s = st_set_internal(x, ctx)?;
        formula_polys(&tau_image(&s.result), &mut polys);
        st_sets.push(s.result);
    }
    let levels = cad_levels(&polys, n, &names, true)?;
    let pulled: Vec<(Vec<GoodCell>, Vec<Option<usize>>)> =
        levels.into_iter().map(|(cs, b)| (cs.iter().map(pull_cell).collect(), b)).collect();
    Ok(assemble(pulled, Ambient::Rn, &st_sets))
}

fn pull_fn(g: &InducedFn) -> InducedFn {
    let src = match &g.source {
        FnDesc::Graph(s) => FnDesc::Graph(tau_preimage(s)),
        t => t.clone(),
    };
    InducedFn { domain: tau_preimage(&g.domain), source: src, graph_st: tau_preimage(&g.graph_st), conservative: g.conservative }
}

fn pull_cell(c: &GoodCell) -> GoodCell {
    let shape = match &c.shape {
        Shape::Point => Shape::Point,
        Shape::Cyl => Shape::Cyl,
        Shape::Graph(g) => Shape::Graph(pull_fn(g)),
        Shape::Below(g) => Shape::Below(pull_fn(g)),
        Shape::Above(g) => Shape::Above(pull_fn(g)),
        Shape::Between(f, g) => Shape::Between(pull_fn(f), pull_fn(g)),
    };
    GoodCell {
        types: c.types.clone(),
        shape,
        base: c.base.as_ref().map(|b| Box::new(pull_cell(b))),
        region: if c.n() == 0 { c.region.clone() } else { tau_preimage(&c.region) },
    }
}

/// Image of f under the projection dropping free coordinate k.
pub fn drop_coord(f: &SaFormula, k: usize) -> SaFormula {
    let n = f.nfree;
    let t = f.fresh_var();
    let body = f.body.map_vars(&|i| if i == k { t } else if i > k && i <= n { i - 1 } else { i });
    let mut names: Vec<String> = f.names.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, s)| s.clone()).collect();
    while names.len() <= t {
        let j = names.len();
        names.push(format!("_b{}", j));
    }
    SaFormula::with_names(names, n - 1, Formula::Exists(t, Box::new(body)))
}

/// Insert a fresh free coordinate at position k (formula over the other coordinates).
fn insert_coord(f: &SaFormula, k: usize) -> Formula {
    f.body.map_vars(&|i| if i >= k { i + 1 } else { i })
}

/// (X, Y) over Q(eps) with st X minus st Y equal to C, certified.
pub fn good_cell_as_difference(c: &GoodCell, ctx: &Ctx) -> Result<(SaFormula, SaFormula)> {
    let n = c.n();
    if n == 0 {
        return Ok((c.region.clone(), SaFormula::new(0, Formula::False)));
    }
    let x = c.region.clone();
    let closure = st_set_internal(&x, ctx)?.result;
    let y = qe::difference(&closure, &x)?;
    let y = SaFormula::with_names(y.names.clone(), n, qe_prepared(&prepare(&y)));
    let sy = st_set_internal(&y, ctx)?.result;
    if !qe::sa_equal(&qe::difference(&closure, &sy)?, &c.region)? {
        return Err(Error::Certificate(String::from("st X minus st Y differs from the cell")));
    }
    Ok((x, y))
}

fn lift_over_point(g: &InducedFn, base: &GoodCell) -> InducedFn {
    // g over R^0 with graph in R^1 becomes a constant over the point cell base in R^1
    let gs = insert_coord(&g.graph_st, 1);
    let body = Formula::and2(lift(&base.region.body, 1), gs);
    let names = [base.region.names[..2].to_vec(), g.graph_st.names[1..2].to_vec()].concat();
    let graph = SaFormula::with_names(names, 2, body);
    InducedFn { domain: base.region.clone(), source: FnDesc::Graph(graph.clone()), graph_st: graph, conservative: g.conservative }
}

/// pi^-1(E) cap C as a good cell, where pi drops coordinate k and i_k = 0.
pub fn degenerate_projection(c: &GoodCell, e: &GoodCell, k: usize) -> Result<GoodCell> {
    let n = c.n();
    if n > 2 || k == 0 || k > n || c.types[k - 1] != 0 || e.n() + 1 != n {
        return Err(Error::Arity(String::from("degenerate projection needs i_k = 0 and E one dimension lower")));
    }
    let pc = drop_coord(&c.region, k);
    if !qe::sa_empty(&qe::difference(&e.region, &pc)?) {
        return Err(Error::Domain(format!("E is not contained in pi(C); witness {}", witness(&qe::difference(&e.region, &pc)?))));
    }
    let body = Formula::and2(c.region.body.clone(), insert_coord(&e.region, k).map_vars(&|i| if i > n { i + c.region.fresh_var() } else { i }));
    let region = SaFormula::with_names(c.region.names.clone(), n, body);
    let cell = if n == 1 {
        c.clone()
    } else if k == 2 {
        let g = InducedFn { domain: e.region.clone(), source: FnDesc::Graph(region.clone()), graph_st: region.clone(), conservative: false };
        let mut types = e.types.clone();
        types.push(0);
        GoodCell { types, shape: Shape::Graph(g), base: Some(Box::new(e.clone())), region: region.clone() }
    } else {
        let base = *c.base.clone().unwrap();
        let shape = match &e.shape {
            Shape::Point => Shape::Point,
            Shape::Cyl => Shape::Cyl,
            Shape::Graph(g) => Shape::Graph(lift_over_point(g, &base)),
            Shape::Below(g) => Shape::Below(lift_over_point(g, &base)),
            Shape::Above(g) => Shape::Above(lift_over_point(g, &base)),
            Shape::Between(f, g) => Shape::Between(lift_over_point(f, &base), lift_over_point(g, &base)),
        };
        GoodCell { types: vec![0, e.types[0]], shape, base: Some(Box::new(base)), region: region.clone() }
    };
    if !qe::sa_equal(&cell.shape_formula(), &region)? {
        return Err(Error::Certificate(String::from("inverse image does not match its shape")));
    }
    Ok(cell)
}

/// (A, B) with A minus B = pi(st X cap (C x R)), pi dropping coordinate k; sets X in R^2 over a point cell.
pub fn project_st_over_degenerate(x: &SaFormula, c: &GoodCell, k: usize, ctx: &Ctx) -> Result<(StSet, StSet)> {
    let n = c.n();
    if n != 1 || k != 1 || c.types[0] != 0 {
        return Err(Error::Budget(String::from("projection over degenerate cells is supported for a point cell on the line")));
    }
    if x.nfree != 2 {
        return Err(Error::Arity(String::from("X must live in R^2")));
    }
    let empty = |s: &SaFormula| StSet { source: s.clone(), result: SaFormula::with_names(s.names.clone(), 1, Formula::False), pieces: Some(Vec::new()) };
    let sx = st_set_internal(x, ctx)?.result;
    let target = drop_coord(&qe::intersection(&sx, &SaFormula::with_names(sx.names.clone(), 2, cyl(&c.region)))?, 1);
    let target = SaFormula::with_names(target.names[..2].to_vec(), 1, qe_prepared(&prepare(&target)));
    let b = empty(&target);
    if qe::sa_empty(&x.clone()) {
        return Ok((empty(&target), b));
    }
    // X_w = X cap {x1 within w of C}, with eps = eta^m and w = eta^j
    let mut residual = String::new();
    let mut m = 2u32;
    while m <= 2 * ctx.reparam_depth {
        let em = MPoly::var(0).pow(m);
        let xb = x.body.map_polys(&|p| p.subst(0, &em));
        let t = x.fresh_var();
        let cb = c.region.body.map_vars(&|i| if i == 1 { t } else if i > 1 { i + t } else { i });
        for j in 1..=2 * m {
            let w = MPoly::var(0).pow(j);
            let d = MPoly::var(1).sub(&MPoly::var(t));
            let near = Formula::Exists(t, Box::new(Formula::and(vec![cb.clone(), Formula::atom(d.sub(&w), Rel::Lt), Formula::atom(d.add(&w), Rel::Gt)])));
            let xw = SaFormula::with_names(x.names.clone(), 2, Formula::and2(xb.clone(), near));
            let px = drop_coord(&xw, 1);
            let a = st_set_internal(&px, ctx)?;
            if qe::sa_equal(&a.result, &target)? {
                return Ok((a, b));
            }
            residual = format!("{}", qe::difference(&target, &a.result)?);
        }
        m *= 2;
    }
    Err(Error::Certificate(format!("fattening schedule exhausted; residual: {}", residual)))
}

/// Outcome of checking a decomposition, one flag per property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCertificate {
    /// Cells pairwise disjoint and covering the ambient space.
    pub partition: bool,
    /// Each st(X_i) is a union of cells.
    pub refines: bool,
    /// Projections of cells are exactly the cells of the base, at every level.
    pub pi_compatible: bool,
    /// Each region equals its recursive shape description.
    pub shapes: bool,
    /// Every open cell carries a status when a function was given.
    pub fn_cells: bool,
}

impl DecompositionCertificate {
    pub fn ok(&self) -> bool {
        self.partition && self.refines && self.pi_compatible && self.shapes && self.fn_cells
    }
}

impl GoodDecomposition {
    pub fn ambient_formula(&self) -> SaFormula {
        let names = self.cells.first().map(|c| c.region.names[..=self.n].to_vec()).unwrap_or_else(|| crate::formula::default_names(self.n));
        match self.ambient {
            Ambient::Box => unit_box(self.n, &names, false),
            Ambient::Rn => SaFormula::with_names(names, self.n, Formula::True),
        }
    }

    /// Decompositions from the top level down to R^0.
    pub fn levels(&self) -> Vec<&GoodDecomposition> {
        let mut out = vec![self];
        let mut d = self;
        while let Some(b) = &d.base {
            out.push(b);
            d = b;
        }
        out
    }

    pub fn certify(&self, check_shapes: bool) -> Result<DecompositionCertificate> {
        let mut cert = DecompositionCertificate { partition: true, refines: true, pi_compatible: true, shapes: true, fn_cells: true };
        for d in self.levels() {
            if d.n == 0 {
                cert.partition &= d.cells.len() == 1;
                continue;
            }
            let mut fs: Vec<SaFormula> = d.cells.iter().map(|c| c.region.clone()).collect();
            fs.push(d.ambient_formula());
            fs.extend(d.st_sets.iter().cloned());
            let m = d.cells.len();
            let (_, tables) = common_cells(&fs)?;
            for leaf in 0..tables[0].len() {
                let hits = (0..m).filter(|&i| tables[i][leaf]).count();
                cert.partition &= hits == usize::from(tables[m][leaf]);
            }
            for s in 0..d.st_sets.len() {
                for i in 0..m {
                    let vals: Vec<bool> = (0..tables[0].len()).filter(|&l| tables[i][l]).map(|l| tables[m + 1 + s][l]).collect();
                    cert.refines &= vals.windows(2).all(|w| w[0] == w[1]);
                }
            }
            let base = d.base.as_ref().unwrap();
            let mut hit = vec![false; base.cells.len()];
            for (i, c) in d.cells.iter().enumerate() {
                let bi = d.base_index[i].unwrap();
                hit[bi] = true;
                let pc = qe::project_last(&c.region, 1);
                cert.pi_compatible &= qe::sa_equal(&pc, &base.cells[bi].region)?;
                if check_shapes {
                    cert.shapes &= qe::sa_equal(&c.shape_formula(), &c.region)?;
                }
                if c.is_open() && d.fn_status.iter().any(|s| s.is_some()) {
                    cert.fn_cells &= d.fn_status[i].is_some();
                }
            }
            cert.pi_compatible &= hit.iter().all(|&h| h);
        }
        Ok(cert)
    }
}

/// Set expressions over st-atoms.
#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    St(SaFormula),
    Union(Box<SetExpr>, Box<SetExpr>),
    Inter(Box<SetExpr>, Box<SetExpr>),
    Diff(Box<SetExpr>, Box<SetExpr>),
    /// Complement within R^n.
    Compl(Box<SetExpr>),
    /// Product with R (a new last coordinate).
    TimesR(Box<SetExpr>),
    /// Projection dropping the last coordinate.
    Proj(Box<SetExpr>),
}

impl SetExpr {
    pub fn arity(&self) -> usize {
        match self {
            SetExpr::St(x) => x.nfree,
            SetExpr::Union(a, _) | SetExpr::Inter(a, _) | SetExpr::Diff(a, _) | SetExpr::Compl(a) => a.arity(),
            SetExpr::TimesR(a) => a.arity() + 1,
            SetExpr::Proj(a) => a.arity().saturating_sub(1),
        }
    }

    /// The denoted subset of R^n as a quantifier-free formula over Q.
    pub fn eval(&self, ctx: &Ctx) -> Result<SaFormula> {
        let r = match self {
            SetExpr::St(x) => return Ok(st_set_internal(x, ctx)?.result),
            SetExpr::Union(a, b) => qe::union(&a.eval(ctx)?, &b.eval(ctx)?)?,
            SetExpr::Inter(a, b) => qe::intersection(&a.eval(ctx)?, &b.eval(ctx)?)?,
            SetExpr::Diff(a, b) => qe::difference(&a.eval(ctx)?, &b.eval(ctx)?)?,
            SetExpr::Compl(a) => qe::complement(&a.eval(ctx)?),
            SetExpr::TimesR(a) => {
                let s = a.eval(ctx)?;
                let n = s.nfree;
                let mut names = s.names[..=n].to_vec();
                names.push(format!("x{}", n + 1));
                SaFormula::with_names(names, n + 1, lift(&s.body, n))
            }
            SetExpr::Proj(a) => {
                let s = a.eval(ctx)?;
                if s.nfree == 0 {
                    return Err(Error::Arity(String::from("cannot project R^0")));
                }
                let p = qe::project_last(&s, 1);
                SaFormula::with_names(s.names[..s.nfree].to_vec(), s.nfree - 1, p.body)
            }
        };
        if r.nfree > ctx.max_vars {
            return Err(Error::Budget(format!("expression needs {} variables", r.nfree)));
        }
        Ok(SaFormula::with_names(r.names[..=r.nfree].to_vec(), r.nfree, qe_prepared(&prepare(&r))))
    }
}

/// Pairs (X_j, Y_j) with the union of st X_j minus st Y_j equal to the expression, certified.
pub fn normal_form_ind(expr: &SetExpr, ctx: &Ctx) -> Result<Vec<(SaFormula, SaFormula)>> {
    let s = expr.eval(ctx)?;
    let n = s.nfree;
    let mut pairs = Vec::new();
    let mut cur = s.clone();
    // peel off cl(S) minus cl(cl S minus S); what remains lies in the lower-dimensional frontier
    for _ in 0..=n + 1 {
        if qe::sa_empty(&cur) {
            break;
        }
        let closure = st_set_internal(&cur, ctx)?.result;
        let frontier = qe::difference(&closure, &cur)?;
        let frontier = SaFormula::with_names(cur.names.clone(), n, qe_prepared(&prepare(&frontier)));
        let cl_front = st_set_internal(&frontier, ctx)?.result;
        pairs.push((cur.clone(), frontier));
        let next = qe::intersection(&cur, &cl_front)?;
        cur = SaFormula::with_names(cur.names.clone(), n, qe_prepared(&prepare(&next)));
    }
    if !qe::sa_empty(&cur) {
        return Err(Error::Certificate(String::from("frontier recursion did not terminate")));
    }
    let mut parts = Vec::new();
    for (x, y) in &pairs {
        let sx = st_set_internal(x, ctx)?.result;
        let sy = st_set_internal(y, ctx)?.result;
        parts.push(qe::difference(&sx, &sy)?.body);
    }
    let union = SaFormula::with_names(s.names.clone(), n, Formula::or(parts));
    if !qe::sa_equal(&union, &s)? {
        return Err(Error::Certificate(String::from("union of differences differs from the expression")));
    }
    Ok(pairs)
}

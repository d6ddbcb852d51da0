//! Verification catalogs. Each suite turns its catalog into certificates; `verify` runs them.

use serde_json::{json, Value};
use stpart::alg_eps::Ext;
use stpart::ctx::Ctx;
use stpart::formula::{Formula, Rel, SaFormula};
use stpart::good::{self, FnDesc, FnOnCell, GoodDecomposition, SetExpr};
use stpart::measure::{self, pullback, MeasureValue, QBox};
use stpart::qe;
use stpart::st::{self, Side};
use stpart::term::Term;
use stpart::topology;
use stpart::Rat;

use crate::commands::{measure_json, pieces_json, separation_holds};
use crate::parse::{infer_vars, parse_formula_with, parse_set_expr, parse_term, parse_terms};
use crate::report::Certificate;

pub const SUITES: [&str; 9] = ["st", "st-properties", "decomposition", "normal-form", "closure", "connected", "measure", "derivative", "qbox"];

#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub results: Vec<Value>,
    pub certificates: Vec<Certificate>,
}

impl SuiteOutput {
    fn push(&mut self, c: Certificate) {
        self.certificates.push(c);
    }

    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.verdict == crate::report::Verdict::Verified)
    }

    pub fn failures(&self) -> Vec<&Certificate> {
        self.certificates.iter().filter(|c| c.verdict != crate::report::Verdict::Verified).collect()
    }
}

type R<T> = Result<T, String>;

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Parse a catalog formula; the free variables are given explicitly.
pub fn formula(text: &str, vars: &[&str]) -> SaFormula {
    let vs: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    parse_formula_with(text, &vs).unwrap_or_else(|e| panic!("catalog formula `{}`: {}", text, e))
}

/// Free variables of catalog text: x, or x and y.
pub fn vars_of(text: &str) -> Vec<&'static str> {
    let vs = infer_vars(text).expect("catalog text lexes");
    if vs.iter().any(|v| v == "y") {
        vec!["x", "y"]
    } else {
        vec!["x"]
    }
}

/// A set over Q(eps) with a hand-derived standard part.
#[derive(Clone, Copy, Debug)]
pub struct StCase {
    pub set: &'static str,
    pub st: &'static str,
    /// Whether X is bounded by a rational.
    pub bounded: bool,
}

impl StCase {
    pub fn vars(&self) -> Vec<&'static str> {
        vars_of(&format!("{} & {}", self.set, self.st))
    }

    pub fn set(&self) -> SaFormula {
        formula(self.set, &self.vars())
    }

    pub fn expected(&self) -> SaFormula {
        formula(self.st, &self.vars())
    }
}

pub fn st_catalog() -> Vec<StCase> {
    let c = |set, st, bounded| StCase { set, st, bounded };
    vec![
        c("eps < x & x < 1 - eps", "0 <= x & x <= 1", true),
        c("x^2 < eps^2", "x = 0", true),
        c("x^2 <= 1 + eps", "-1 <= x & x <= 1", true),
        c("eps*x = 1", "false", false),
        c("0 < x & eps*x < 1", "x >= 0", false),
        c("x^2 - 2 + eps = 0", "x^2 = 2", true),
        c("(x - eps)*(x - 1) < 0", "0 <= x & x <= 1", true),
        c("x^3 < eps^4 & x > -1", "-1 <= x & x <= 0", true),
        c("x > 1/eps | x < eps", "x <= 0", false),
        c("eps*x^2 - x < 0 & x < 2", "0 <= x & x <= 2", true),
        c("x^2 + y^2 < 1 + eps", "x^2 + y^2 <= 1", true),
        c("x^2 + y^2 = eps^2", "x = 0 & y = 0", true),
        c("0 < y & y < eps*x & x < 1", "0 <= x & x <= 1 & y = 0", true),
        c("x*y = eps^2 & 0 < x & x < 1 & y < 1", "(0 <= x & x <= 1 & y = 0) | (x = 0 & 0 <= y & y <= 1)", true),
        c("(x - eps)^2 + y^2 < 1", "x^2 + y^2 <= 1", true),
        c("y = x^2 + eps & 0 <= x & x <= 1", "y = x^2 & 0 <= x & x <= 1", true),
        c("eps*y = x & 0 < x & x < eps", "x = 0 & 0 <= y & y <= 1", true),
        c("x^2 + eps*y^2 < 1", "x^2 <= 1", false),
        c("(x^2 + y^2 - 1)^2 < eps", "x^2 + y^2 = 1", true),
        c("0 < x & x < 1 & 0 < y & y < 1 & x + y > 1 + eps", "x + y >= 1 & x <= 1 & y <= 1", true),
    ]
}

/// st(X) equals the hand formula, for every catalog entry.
pub fn suite_st(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (i, c) in st_catalog().iter().enumerate() {
        let x = c.set();
        let s = st::st_set(&x, ctx).map_err(e2s)?;
        let ok = qe::sa_equal(&s.result, &c.expected()).map_err(e2s)?;
        out.results.push(json!({ "case": i, "set": x.to_string(), "st": s.result.to_string() }));
        out.push(Certificate::new(format!("st catalog {}: st({}) = {}", i, c.set, c.st), "sa_equal against the hand formula", ok));
    }
    Ok(out)
}

/// Pairs of sets on the line and st(X) cap st(Y) by hand.
pub fn intersection_catalog() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("0 < x & x < 1", "1/2 < x & x < 2", "1/2 <= x & x <= 1"),
        ("0 < x & x < eps", "-eps < x & x < 0", "x = 0"),
        ("x = eps", "x = 2*eps", "x = 0"),
        ("0 < x & x < 1 - eps", "1 + eps < x & x < 2", "x = 1"),
        ("x^2 < eps", "x > 0", "x = 0"),
        ("x = 1/2 + eps", "x = 1/2 - eps", "2*x = 1"),
        ("0 < x & x < 1", "2 < x & x < 3", "false"),
        ("x^2 = 2 + eps", "x > 0", "x^2 = 2 & x > 0"),
        ("-1 < x & x < 1", "x^2 = eps^2", "x = 0"),
        ("(0 < x & x < 1) | (2 < x & x < 3)", "1/2 < x & x < 5/2", "(1/2 <= x & x <= 1) | (2 <= x & x <= 5/2)"),
    ]
}

/// (X, f, side, st of the unbounded locus) by hand.
pub fn locus_catalog() -> Vec<(&'static str, &'static str, Side, &'static str)> {
    vec![
        ("0 < x & x < 1", "1/x", Side::Pos, "x = 0"),
        ("eps < x & x < 1", "1/x", Side::Pos, "x = 0"),
        ("-1 < x & x < 1 & x != 0", "1/x", Side::Neg, "x = 0"),
        ("0 < x & x < 1", "x", Side::Pos, "false"),
        ("2*eps < x & x < 1", "1/(x - eps)", Side::Pos, "x = 0"),
        ("-2 < x & x < 2", "1/(x^2 + eps)", Side::Pos, "x = 0"),
        ("-2 < x & x < 2", "1/(x^2 + eps)", Side::Neg, "false"),
        ("0 < x & x < 1", "x/eps", Side::Pos, "0 <= x & x <= 1"),
    ]
}

fn pieces_closed_and_exact(s: &st::StSet) -> bool {
    let ps = match &s.pieces {
        Some(p) => p,
        None => return false,
    };
    let closed = ps.iter().all(|p| !matches!(p.lo, Ext::PosInf) && !matches!(p.hi, Ext::NegInf));
    let body = st::pieces_formula(ps, 1);
    let f = SaFormula::with_names(s.result.names.clone(), 1, body);
    closed && qe::sa_equal(&f, &s.result).unwrap_or(false)
}

/// Projection, intersection witnesses, unbounded loci, and the shape of st on the line.
pub fn suite_st_properties(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (i, c) in st_catalog().iter().enumerate() {
        let x = c.set();
        if x.nfree != 2 || !c.bounded {
            continue;
        }
        let s = st::st_set(&x, ctx).map_err(e2s)?;
        let r = st::st_project_bounded(&s, 1, ctx);
        let claim = format!("st(pi X) = pi(st X) for st catalog {}", i);
        match r {
            Ok(_) => out.push(Certificate::new(claim, "sa_equal of both projections", true)),
            Err(stpart::Error::Certificate(m)) => out.push(Certificate::new(claim, "sa_equal of both projections", false).with_detail(m)),
            Err(e) => return Err(e2s(e)),
        }
    }
    for (i, (a, b, want)) in intersection_catalog().into_iter().enumerate() {
        let (x, y) = (formula(a, &["x"]), formula(b, &["x"]));
        let claim = format!("intersection witness {}: pi(st Z) = st({}) cap st({})", i, a, b);
        match st::st_intersection_witness(&x, &y, ctx) {
            Ok(w) => {
                let ok = qe::sa_equal(&w.projected, &w.target).map_err(e2s)? && qe::sa_equal(&w.target, &formula(want, &["x"])).map_err(e2s)?;
                out.results.push(json!({ "pair": i, "z": w.z.to_string(), "width_exponent": w.width_exp }));
                out.push(Certificate::new(claim, "sa_equal with the hand intersection", ok));
            }
            Err(stpart::Error::Certificate(m)) => out.push(Certificate::new(claim, "window schedule", false).with_detail(m)),
            Err(e) => return Err(e2s(e)),
        }
    }
    for (i, (set, f, side, want)) in locus_catalog().into_iter().enumerate() {
        let x = formula(set, &["x"]);
        let t = parse_term(f, &[String::from("x")]).map_err(e2s)?;
        let s = st::st_unbounded_locus(&x, &t, side, ctx).map_err(e2s)?;
        let ok = qe::sa_equal(&s.result, &formula(want, &["x"])).map_err(e2s)?;
        let sd = if side == Side::Pos { "+" } else { "-" };
        out.push(Certificate::new(format!("unbounded locus {}: {} -> {}inf on {}", i, f, sd, set), "sa_equal against the hand locus", ok));
    }
    for (i, c) in st_catalog().iter().enumerate() {
        let x = c.set();
        if x.nfree != 1 {
            continue;
        }
        let s = st::st_set(&x, ctx).map_err(e2s)?;
        let ok = pieces_closed_and_exact(&s);
        out.results.push(json!({ "case": i, "pieces": s.pieces.as_deref().map(pieces_json) }));
        out.push(Certificate::new(format!("st catalog {} is a finite union of closed intervals and points", i), "explicit pieces equal st(X)", ok));
    }
    Ok(out)
}

/// Inputs for good decompositions: sets and an optional (term, domain).
#[derive(Clone, Copy, Debug)]
pub struct DecompCase {
    pub sets: &'static [&'static str],
    pub func: Option<(&'static str, &'static str)>,
}

impl DecompCase {
    pub fn vars(&self) -> Vec<&'static str> {
        let mut all = self.sets.join(" & ");
        if let Some((t, d)) = self.func {
            all = format!("{} & {} = 0 & {}", all, t, d);
        }
        vars_of(&all)
    }

    pub fn decompose(&self, ctx: &Ctx) -> stpart::Result<GoodDecomposition> {
        let vs = self.vars();
        let sets: Vec<SaFormula> = self.sets.iter().map(|s| formula(s, &vs)).collect();
        let f = self.func.map(|(t, d)| {
            let vn: Vec<String> = vs.iter().map(|s| s.to_string()).collect();
            FnDesc::Term { domain: formula(d, &vs), term: parse_term(t, &vn).expect("catalog term") }
        });
        good::good_decomposition_box(&sets, f.as_ref(), ctx)
    }
}

pub fn decomposition_catalog() -> Vec<DecompCase> {
    let c = |sets, func| DecompCase { sets, func };
    vec![
        c(&["eps < x & x < 1 - eps"], None),
        c(&["x = eps | 2*x = 1"], None),
        c(&["eps < x & x < 1"], Some(("1/x", "eps < x & x < 1"))),
        c(&["-1/2 < x & x < 1/2"], Some(("eps/x", "x != 0"))),
        c(&["0 < y & y < eps*x & x < 1"], None),
        c(&["4*x^2 + 4*y^2 < 1 + eps"], None),
        c(&["y = x^2 + eps & 0 <= x & 2*x <= 1"], None),
        c(&["0 < x & 2*x < 1 & 0 < y & 2*y < 1"], Some(("x + eps*y", "true"))),
        c(&["x < y & -1 < x & y < 1", "y = eps & x^2 <= 1"], None),
        c(&["x + y < eps & x > 0 & y > 0"], None),
    ]
}

pub fn decomposition_certificates(i: usize, d: &GoodDecomposition, with_fn: bool) -> R<Vec<Certificate>> {
    let c = d.certify(true).map_err(e2s)?;
    let m = "truth tables on a common CAD";
    let mut v = vec![
        Certificate::new(format!("decomposition {}: cells partition [-1, 1]^n", i), m, c.partition),
        Certificate::new(format!("decomposition {}: refines every st(X_i)", i), m, c.refines),
        Certificate::new(format!("decomposition {}: compatible with the projection", i), "sa_equal of projected cells", c.pi_compatible),
        Certificate::new(format!("decomposition {}: cells match their shapes", i), "sa_equal with the shape formula", c.shapes),
    ];
    if with_fn {
        let all = d.cells.iter().zip(&d.fn_status).all(|(cell, s)| !cell.is_open() || matches!(s, Some(FnOnCell::Misses) | Some(FnOnCell::Induces(_))));
        v.push(Certificate::new(format!("decomposition {}: each open cell misses st(graph f) or carries an induced function", i), "status per open cell", c.fn_cells && all));
    }
    Ok(v)
}

pub fn suite_decomposition(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (i, c) in decomposition_catalog().iter().enumerate() {
        let d = c.decompose(ctx).map_err(e2s)?;
        out.results.push(json!({ "case": i, "cells": d.cells.len(), "n": d.n }));
        out.certificates.extend(decomposition_certificates(i, &d, c.func.is_some())?);
    }
    Ok(out)
}

/// closure_as_st on every cell of a decomposition.
pub fn closure_certificates(i: usize, d: &GoodDecomposition, ctx: &Ctx) -> R<Vec<Certificate>> {
    let mut v = Vec::new();
    for (k, cell) in d.cells.iter().enumerate() {
        let claim = format!("decomposition {} cell {}: st(X) is the closure of the cell", i, k);
        match topology::closure_as_st(cell, ctx) {
            Ok((x, cert)) => {
                let s = st::st_set(&x, ctx).map_err(e2s)?;
                let ok = qe::sa_equal(&s.result, &cert.closure).map_err(e2s)?;
                v.push(Certificate::new(claim, "sa_equal of st(X) with the closure over Q", ok));
            }
            Err(stpart::Error::Certificate(m)) => v.push(Certificate::new(claim, "shrinking family", false).with_detail(m)),
            Err(e) => return Err(e2s(e)),
        }
    }
    Ok(v)
}

pub fn suite_closure(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (i, c) in decomposition_catalog().iter().enumerate() {
        let d = c.decompose(ctx).map_err(e2s)?;
        out.certificates.extend(closure_certificates(i, &d, ctx)?);
    }
    Ok(out)
}

pub fn normal_form_catalog() -> Vec<&'static str> {
    vec![
        "st{x: eps < x & x < 1 - eps}",
        "diff(st{x: 0 <= x & x <= 1}, st{x: x = eps})",
        "union(st{x: x = eps}, st{x: 2 < x & x < 3})",
        "compl(st{x: x^2 < 1 + eps})",
        "inter(compl(st{x: x = 0}), st{x: -1 < x & x < 1})",
        "diff(st{x, y: x^2 + y^2 < 1 + eps}, st{x, y: y = 0})",
        "proj(st{x, y: x^2 + y^2 <= 1 & y > eps})",
        "times_r(diff(st{x: -1 <= x & x <= 1}, st{x: x = 0}))",
        "diff(st{x, y: 0 <= x & x <= 1 & 0 <= y & y <= 1}, st{x, y: 0 < y & y < eps*x & x < 1})",
        "union(diff(st{x: 0 < x & x < 1}, st{x: 2*x = 1}), st{x: x = 2})",
    ]
}

pub fn normal_form_expr(text: &str) -> SetExpr {
    parse_set_expr(text, None).unwrap_or_else(|e| panic!("catalog expression `{}`: {}", text, e))
}

/// Union of st(X_j) minus st(Y_j).
pub fn union_of_differences(pairs: &[(SaFormula, SaFormula)], n: usize, ctx: &Ctx) -> stpart::Result<SaFormula> {
    let mut parts = Vec::new();
    for (x, y) in pairs {
        let sx = st::st_set(x, ctx)?.result;
        let sy = st::st_set(y, ctx)?.result;
        parts.push(qe::difference(&sx, &sy)?.body);
    }
    Ok(SaFormula::new(n, Formula::or(parts)))
}

pub fn suite_normal_form(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (i, text) in normal_form_catalog().into_iter().enumerate() {
        let e = normal_form_expr(text);
        let claim = format!("normal form {}: {}", i, text);
        match good::normal_form_ind(&e, ctx) {
            Ok(pairs) => {
                let u = union_of_differences(&pairs, e.arity(), ctx).map_err(e2s)?;
                let ok = qe::sa_equal(&u, &e.eval(ctx).map_err(e2s)?).map_err(e2s)?;
                out.results.push(json!({ "case": i, "pairs": pairs.iter().map(|(x, y)| [x.to_string(), y.to_string()]).collect::<Vec<_>>() }));
                out.push(Certificate::new(claim, "sa_equal of the union of differences with the expression", ok));
            }
            Err(stpart::Error::Certificate(m)) => out.push(Certificate::new(claim, "frontier recursion", false).with_detail(m)),
            Err(e) => return Err(e2s(e)),
        }
    }
    Ok(out)
}

/// Strongly bounded sets with connected st, and controls with disconnected st.
pub fn connected_catalog() -> (Vec<&'static str>, Vec<&'static str>) {
    (
        vec![
            "x^2 + y^2 = 1",
            "x^2 + y^2 < 1 + eps",
            "0 < y & y < eps*x & x < 1",
            "x*y = eps^2 & 0 < x & x < 1 & y < 1",
            "y = x^2 + eps & 0 <= x & x <= 1",
        ],
        vec!["x = eps | x = 1", "x^2 = 1 + eps", "x^2 + y^2 < eps | (x - 1)^2 + y^2 < eps"],
    )
}

pub fn suite_connected(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let (conn, disc) = connected_catalog();
    for text in conn {
        let x = formula(text, &vars_of(text));
        let c = topology::is_connected_st(&x, ctx).map_err(e2s)?;
        out.push(Certificate::new(format!("st({}) is connected", text), "adjacency of the cells of st(X)", c.connected));
    }
    for text in disc {
        let x = formula(text, &vars_of(text));
        let c = topology::is_connected_st(&x, ctx).map_err(e2s)?;
        let ok = match &c.witness {
            Some((a, b)) if !c.connected => separation_holds(&x, a, b, ctx).map_err(|e| e.0)?,
            _ => false,
        };
        out.push(Certificate::new(format!("st({}) is disconnected with a separating pair", text), "QE on the witness pair", ok));
    }
    Ok(out)
}

/// Sets whose measures are compared with Monte Carlo, all inside [-1, 1]^n after st.
pub fn measure_catalog() -> Vec<&'static str> {
    vec![
        "eps < x & x < 1 - eps",
        "x^2 < 2 + eps & x > 0",
        "x^2 + y^2 < 1 + eps",
        "0 < x & x < 1 & 0 < y & y < 1 & x + y > 1 + eps",
        "x^2 + y^2 < 1 & x^2 + y^2 > 1/4 - eps",
        "y > x^2 - eps & y < 1",
        "0 < y & y < eps*x & x < 1",
        "(x - eps)^2 + 4*y^2 < 1",
    ]
}

pub fn additivity_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("0 < x & x < 1/2", "1/2 + eps < x & x < 1"),
        ("x^2 + y^2 < 1/4", "x^2 + y^2 > 1/4 & x^2 + y^2 < 1"),
        ("0 < x & x < 1 & 0 < y & y < x", "0 < x & x < 1 & x < y & y < 1"),
        ("x^2 < 1 + eps & y > 0 & y < 1", "x^2 < 1 & y < 0 & y > -eps"),
        ("x^2 + y^2 < 1 & y > 0", "x^2 + y^2 < 1 & y < 0"),
    ]
}

/// (X, components of psi^-1 used to pull X back to its image, description).
pub fn invariance_catalog() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("x^2 + y^2 < 1", "x - 1/2; y + eps", "translation by (1/2, -eps)"),
        ("0 < x & x < 1 & 0 < y & y < 1", "x - 2*y; y", "shear (x + 2y, y)"),
        ("0 < x & x < 1 & 0 < y & y < x", "x; y - x", "shear (x, y + x)"),
        ("eps < x & x < 1", "x + 3 - eps", "translation by eps - 3"),
        ("x^2 + 4*y^2 < 1", "x + 3*y; y", "shear (x - 3y, y)"),
    ]
}

pub fn suite_measure(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let m = |t: &str| -> R<MeasureValue> { measure::measure_st(&formula(t, &vars_of(t)), ctx).map_err(e2s) };
    let a = m("eps < x & x < 1 - eps")?;
    out.push(Certificate::new("measure of (eps, 1 - eps) is exactly 1", "exact integration", a.exact && a.value == Rat::from_integer(1.into())));
    let d = m("x^2 + y^2 < 1 + eps")?;
    let err = (d.approx() - std::f64::consts::PI).abs();
    out.results.push(json!({ "disk": measure_json(&d) }));
    out.push(Certificate::new("measure of the disk x^2 + y^2 < 1 + eps is pi within 1e-6", "quadrature", err <= 1e-6 && d.radius_f64() <= 1e-6).with_detail(format!("error {:.3e}", err)));
    for (a, b) in additivity_catalog() {
        let vs = vars_of(&format!("{} & {}", a, b));
        let (x, y) = (formula(a, &vs), formula(b, &vs));
        let disjoint = qe::sa_empty(&qe::intersection(&x, &y).map_err(e2s)?);
        let u = qe::union(&x, &y).map_err(e2s)?;
        let (mx, my, mu) = (measure::measure_st(&x, ctx).map_err(e2s)?, measure::measure_st(&y, ctx).map_err(e2s)?, measure::measure_st(&u, ctx).map_err(e2s)?);
        let gap = (mu.approx() - mx.approx() - my.approx()).abs();
        let tol = mu.radius_f64() + mx.radius_f64() + my.radius_f64() + 1e-12;
        out.push(Certificate::new(format!("additivity on {} and {}", a, b), "measure_st within summed radii", disjoint && gap <= tol).with_detail(format!("gap {:.3e}", gap)));
    }
    for (set, inv, what) in invariance_catalog() {
        let vs = vars_of(set);
        let vn: Vec<String> = vs.iter().map(|s| s.to_string()).collect();
        let x = formula(set, &vs);
        let comps: Vec<Term> = parse_terms(inv, &vn).map_err(e2s)?;
        let img = pullback(&x, &comps);
        let (mx, my) = (measure::measure_st(&x, ctx).map_err(e2s)?, measure::measure_st(&img, ctx).map_err(e2s)?);
        let gap = (mx.approx() - my.approx()).abs();
        let tol = 2.0 * (mx.radius_f64() + my.radius_f64()) + 1e-12;
        out.push(Certificate::new(format!("invariance of {} under {}", set, what), "measure_st of the image within 2x radius", gap <= tol).with_detail(format!("gap {:.3e}", gap)));
    }
    Ok(out)
}

/// Functions (term, domain) whose induced derivatives are checked.
pub fn derivative_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("x^2 + eps*x", "-1 < x & x < 1"),
        ("x^3 - eps", "eps < x & x < 1"),
        ("eps/x", "0 < x & x < 1"),
        ("(x + eps)/(1 + x^2)", "-1 < x & x < 1"),
        ("1/(x + 2) + eps*x^2", "-1 < x & x < 1"),
        ("x/(1 + eps*x)", "-1 < x & x < 1"),
        ("(1 + eps)*x^4 - x", "-1 < x & x < 1"),
        ("x*y + eps", "-1 < x & x < 1 & -1 < y & y < 1"),
        ("x^2 - y^2 + eps*x*y", "-1 < x & x < 1 & -1 < y & y < 1"),
        ("y/(x + 2)", "-1 < x & x < 1 & -1 < y & y < 1"),
    ]
}

pub fn suite_derivative(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    for (i, (t, dom)) in derivative_catalog().into_iter().enumerate() {
        let vs = vars_of(&format!("{} = 0 & {}", t, dom));
        let vn: Vec<String> = vs.iter().map(|s| s.to_string()).collect();
        let domain = formula(dom, &vs);
        let f = FnDesc::Term { domain: domain.clone(), term: parse_term(t, &vn).map_err(e2s)? };
        let d = good::good_decomposition_box(&[domain], Some(&f), ctx).map_err(e2s)?;
        let mut checked = 0;
        for (k, cell) in d.cells.iter().enumerate() {
            if !matches!(d.fn_status[k], Some(FnOnCell::Induces(_))) {
                continue;
            }
            let r = measure::st_derivative_commutes(&f, cell, ctx).map_err(e2s)?;
            checked += 1;
            out.results.push(json!({ "function": i, "cell": cell.region.to_string(), "fd_points": r.fd_points, "fd_max_error": format!("{:.3e}", r.fd_max_error) }));
            out.push(Certificate::new(format!("function {} ({}) on cell {}: derivatives commute with st", i, t, k), "symbolic graphs and central differences at 100 points", r.ok));
        }
        if checked == 0 {
            out.push(Certificate::new(format!("function {} ({}) induces a function on some open cell", i, t), "decomposition adapted to f", false));
        }
    }
    Ok(out)
}

pub fn qbox_catalog() -> (Vec<&'static str>, Vec<&'static str>) {
    (
        vec!["eps < x & x < 1 - eps", "x^2 + y^2 < 1 + eps", "0 < x & x < 1 & 0 < y & y < 1", "0 < y & y < x & x < 1", "x^2 + y^2 > 1/4 & x^2 + y^2 < 1"],
        vec!["x = eps", "x^2 + y^2 < eps", "0 < y & y < eps*x & x < 1"],
    )
}

fn box_in_st(x: &SaFormula, b: &[(Rat, Rat)], ctx: &Ctx) -> R<bool> {
    let s = st::st_set(x, ctx).map_err(e2s)?.result;
    let n = x.nfree;
    let mut cs = Vec::new();
    for (i, (lo, hi)) in b.iter().enumerate() {
        let v = stpart::mpoly::MPoly::var(i + 1);
        cs.push(Formula::atom(v.sub(&stpart::mpoly::MPoly::constant(lo.clone())), Rel::Ge));
        cs.push(Formula::atom(v.sub(&stpart::mpoly::MPoly::constant(hi.clone())), Rel::Le));
    }
    let bx = SaFormula::new(n, Formula::and(cs));
    Ok(qe::sa_empty(&qe::difference(&bx, &s).map_err(e2s)?) && b.iter().all(|(l, h)| l < h))
}

pub fn suite_qbox(ctx: &Ctx) -> R<SuiteOutput> {
    let mut out = SuiteOutput::default();
    let (full, null) = qbox_catalog();
    for text in full {
        let x = formula(text, &vars_of(text));
        let ok = match measure::contains_qbox(&x, ctx).map_err(e2s)? {
            QBox::Found(b) => box_in_st(&x, &b, ctx)?,
            QBox::InteriorEmpty => false,
        };
        out.push(Certificate::new(format!("a rational box lies in st({})", text), "box minus st(X) is empty", ok));
    }
    for text in null {
        let x = formula(text, &vars_of(text));
        let ok = matches!(measure::contains_qbox(&x, ctx).map_err(e2s)?, QBox::InteriorEmpty);
        out.push(Certificate::new(format!("st({}) has empty interior", text), "box search reports interior empty", ok));
    }
    Ok(out)
}

pub fn run_suite(name: &str, ctx: &Ctx) -> R<SuiteOutput> {
    let one = |n: &str| -> R<SuiteOutput> {
        match n {
            "st" => suite_st(ctx),
            "st-properties" => suite_st_properties(ctx),
            "decomposition" => suite_decomposition(ctx),
            "normal-form" => suite_normal_form(ctx),
            "closure" => suite_closure(ctx),
            "connected" => suite_connected(ctx),
            "measure" => suite_measure(ctx),
            "derivative" => suite_derivative(ctx),
            "qbox" => suite_qbox(ctx),
            other => Err(format!("unknown suite `{}`; expected one of: all, {}", other, SUITES.join(", "))),
        }
    };
    if name == "all" {
        let mut out = SuiteOutput::default();
        for s in SUITES {
            let o = one(s)?;
            out.results.push(json!({ "suite": s, "results": o.results }));
            out.certificates.extend(o.certificates);
        }
        Ok(out)
    } else {
        one(name)
    }
}

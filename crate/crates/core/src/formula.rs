//! First-order formulas over the ordered ring language with rational constants and eps.
//!
//! Variable slot 0 is always `eps`; slots 1..=nfree are the free variables in declared order;
//! higher slots are bound variables.

use crate::mpoly::{MPoly, Mono};
use crate::rat::{rat_to_string, rsign, Rat};
use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_traits::{One, Signed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Rel {
    pub fn holds(self, s: i8) -> bool {
        match self {
            Rel::Lt => s < 0,
            Rel::Le => s <= 0,
            Rel::Eq => s == 0,
            Rel::Ne => s != 0,
            Rel::Ge => s >= 0,
            Rel::Gt => s > 0,
        }
    }

    /// Relation after multiplying both sides by a negative number.
    pub fn flip(self) -> Rel {
        match self {
            Rel::Lt => Rel::Gt,
            Rel::Le => Rel::Ge,
            Rel::Ge => Rel::Le,
            Rel::Gt => Rel::Lt,
            r => r,
        }
    }

    pub fn negate(self) -> Rel {
        match self {
            Rel::Lt => Rel::Ge,
            Rel::Le => Rel::Gt,
            Rel::Eq => Rel::Ne,
            Rel::Ne => Rel::Eq,
            Rel::Ge => Rel::Lt,
            Rel::Gt => Rel::Le,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn from_sign(s: i8) -> Rel {
        match s {
            x if x < 0 => Rel::Lt,
            0 => Rel::Eq,
            _ => Rel::Gt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    /// lhs rel rhs
    Atom(MPoly, Rel, MPoly),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(usize, Box<Formula>),
    Forall(usize, Box<Formula>),
}

impl Formula {
    pub fn atom(p: MPoly, r: Rel) -> Formula {
        Formula::Atom(p, r, MPoly::zero())
    }

    pub fn cmp(a: MPoly, r: Rel, b: MPoly) -> Formula {
        Formula::Atom(a, r, b)
    }

    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => *g,
            g => Formula::Not(Box::new(g)),
        }
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn and2(a: Formula, b: Formula) -> Formula {
        Formula::and(vec![a, b])
    }

    pub fn or2(a: Formula, b: Formula) -> Formula {
        Formula::or(vec![a, b])
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or2(Formula::not(a), b)
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::or2(Formula::and2(a.clone(), b.clone()), Formula::and2(Formula::not(a), Formula::not(b)))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.is_quantifier_free()),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// All atom polynomials (lhs - rhs).
    pub fn polys(&self, out: &mut Vec<MPoly>) {
        match self {
            Formula::Atom(a, _, b) => out.push(a.sub(b)),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.polys(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.polys(out)),
            _ => {}
        }
    }

    pub fn max_var(&self) -> usize {
        let mut ps = Vec::new();
        self.polys(&mut ps);
        let mut m = ps.iter().map(|p| p.nvars()).max().unwrap_or(0);
        self.visit_binders(&mut |v| m = m.max(v + 1));
        m
    }

    fn visit_binders(&self, f: &mut dyn FnMut(usize)) {
        match self {
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                f(*v);
                g.visit_binders(f)
            }
            Formula::Not(g) => g.visit_binders(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_binders(f)),
            _ => {}
        }
    }

    pub fn map_polys(&self, f: &dyn Fn(&MPoly) -> MPoly) -> Formula {
        match self {
            Formula::Atom(a, r, b) => Formula::Atom(f(a), *r, f(b)),
            Formula::Not(g) => Formula::Not(Box::new(g.map_polys(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_polys(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_polys(f)).collect()),
            Formula::Exists(v, g) => Formula::Exists(*v, Box::new(g.map_polys(f))),
            Formula::Forall(v, g) => Formula::Forall(*v, Box::new(g.map_polys(f))),
            t => t.clone(),
        }
    }

    /// Rename variable slots (binders included).
    pub fn map_vars(&self, f: &dyn Fn(usize) -> usize) -> Formula {
        match self {
            Formula::Atom(a, r, b) => Formula::Atom(a.map_vars(f), *r, b.map_vars(f)),
            Formula::Not(g) => Formula::Not(Box::new(g.map_vars(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_vars(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_vars(f)).collect()),
            Formula::Exists(v, g) => Formula::Exists(f(*v), Box::new(g.map_vars(f))),
            Formula::Forall(v, g) => Formula::Forall(f(*v), Box::new(g.map_vars(f))),
            t => t.clone(),
        }
    }

    /// Evaluate a quantifier-free formula given a sign oracle for polynomials.
    pub fn eval_qf(&self, sign: &mut dyn FnMut(&MPoly) -> i8) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a, r, b) => r.holds(sign(&a.sub(b))),
            Formula::Not(g) => !g.eval_qf(sign),
            Formula::And(gs) => gs.iter().all(|g| g.eval_qf(sign)),
            Formula::Or(gs) => gs.iter().any(|g| g.eval_qf(sign)),
            _ => panic!("eval_qf on quantified formula"),
        }
    }

    /// Negation normal form without Not nodes (quantifiers dualized).
    pub fn nnf(&self) -> Formula {
        self.nnf_inner(false)
    }

    fn nnf_inner(&self, neg: bool) -> Formula {
        match (self, neg) {
            (Formula::True, false) | (Formula::False, true) => Formula::True,
            (Formula::True, true) | (Formula::False, false) => Formula::False,
            (Formula::Atom(a, r, b), n) => Formula::Atom(a.clone(), if n { r.negate() } else { *r }, b.clone()),
            (Formula::Not(g), n) => g.nnf_inner(!n),
            (Formula::And(gs), false) => Formula::and(gs.iter().map(|g| g.nnf_inner(false)).collect()),
            (Formula::And(gs), true) => Formula::or(gs.iter().map(|g| g.nnf_inner(true)).collect()),
            (Formula::Or(gs), false) => Formula::or(gs.iter().map(|g| g.nnf_inner(false)).collect()),
            (Formula::Or(gs), true) => Formula::and(gs.iter().map(|g| g.nnf_inner(true)).collect()),
            (Formula::Exists(v, g), false) => Formula::Exists(*v, Box::new(g.nnf_inner(false))),
            (Formula::Exists(v, g), true) => Formula::Forall(*v, Box::new(g.nnf_inner(true))),
            (Formula::Forall(v, g), false) => Formula::Forall(*v, Box::new(g.nnf_inner(false))),
            (Formula::Forall(v, g), true) => Formula::Exists(*v, Box::new(g.nnf_inner(true))),
        }
    }
}

/// Quantifier prefix entry: (is_exists, variable slot).
pub type Prefix = Vec<(bool, usize)>;

/// Prenex form of an NNF formula whose bound variables are pairwise distinct and unused elsewhere.
pub fn prenex(f: &Formula) -> (Prefix, Formula) {
    let f = f.nnf();
    let mut pre = Vec::new();
    let m = pull(&f, &mut pre);
    (pre, m)
}

fn pull(f: &Formula, pre: &mut Prefix) -> Formula {
    match f {
        Formula::Exists(v, g) => {
            pre.push((true, *v));
            pull(g, pre)
        }
        Formula::Forall(v, g) => {
            pre.push((false, *v));
            pull(g, pre)
        }
        Formula::And(gs) => Formula::and(gs.iter().map(|g| pull(g, pre)).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(|g| pull(g, pre)).collect()),
        t => t.clone(),
    }
}

/// A formula together with its variable names and free-variable count.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SaFormula {
    /// names[0] = "eps"; names[1..=nfree] free; the rest bound.
    pub names: Vec<String>,
    pub nfree: usize,
    pub body: Formula,
}

pub fn default_names(n: usize) -> Vec<String> {
    let base = ["x", "y", "z", "w"];
    let mut v = vec![String::from("eps")];
    for i in 0..n {
        v.push(if i < base.len() && n <= base.len() { base[i].to_string() } else { format!("x{}", i + 1) });
    }
    v
}

impl SaFormula {
    pub fn new(n: usize, body: Formula) -> Self {
        let mut names = default_names(n);
        let mx = body.max_var();
        while names.len() < mx {
            let k = names.len();
            names.push(format!("_b{}", k));
        }
        SaFormula { names, nfree: n, body }
    }

    pub fn with_names(names: Vec<String>, nfree: usize, body: Formula) -> Self {
        let mut s = SaFormula { names, nfree, body };
        let mx = s.body.max_var();
        while s.names.len() < mx {
            let k = s.names.len();
            s.names.push(format!("_b{}", k));
        }
        s
    }

    pub fn n(&self) -> usize {
        self.nfree
    }

    pub fn uses_eps(&self) -> bool {
        let mut ps = Vec::new();
        self.body.polys(&mut ps);
        ps.iter().any(|p| p.uses_var(0))
    }

    pub fn free_names(&self) -> &[String] {
        &self.names[1..=self.nfree]
    }

    /// First unused variable slot.
    pub fn fresh_var(&self) -> usize {
        self.names.len().max(self.body.max_var()).max(self.nfree + 1)
    }
}

fn mono_key(m: &Mono) -> (u32, Vec<core::cmp::Reverse<u32>>, u32) {
    let user: u32 = m.0.iter().skip(1).sum();
    let lex: Vec<core::cmp::Reverse<u32>> = m.0.iter().skip(1).map(|&e| core::cmp::Reverse(e)).collect();
    (user, lex, m.exp(0))
}

/// Human ordering: higher user degree first, then lexicographic in the user variables, then ascending eps power.
pub fn poly_to_string(p: &MPoly, names: &[String]) -> String {
    if p.is_zero() {
        return String::from("0");
    }
    let mut terms: Vec<(&Mono, &Rat)> = p.t.iter().collect();
    terms.sort_by(|a, b| {
        let ka = mono_key(a.0);
        let kb = mono_key(b.0);
        kb.0.cmp(&ka.0).then_with(|| {
            let n = ka.1.len().max(kb.1.len());
            for i in 0..n {
                let x = ka.1.get(i).map(|r| r.0).unwrap_or(0);
                let y = kb.1.get(i).map(|r| r.0).unwrap_or(0);
                if x != y {
                    return y.cmp(&x);
                }
            }
            ka.2.cmp(&kb.2)
        })
    });
    let mut s = String::new();
    for (m, c) in terms {
        let neg = c.is_negative();
        let mag = c.abs();
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let nm = names.get(i).cloned().unwrap_or_else(|| format!("v{}", i));
            parts.push(if e == 1 { nm } else { format!("{}^{}", nm, e) });
        }
        if parts.is_empty() {
            s.push_str(&rat_to_string(&mag));
        } else {
            if !mag.is_one() {
                s.push_str(&rat_to_string(&mag));
                s.push('*');
            }
            s.push_str(&parts.join("*"));
        }
    }
    s
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Or(_) => 1,
        Formula::And(_) => 2,
        Formula::Exists(..) | Formula::Forall(..) => 0,
        _ => 3,
    }
}

pub fn formula_to_string(f: &Formula, names: &[String]) -> String {
    match f {
        Formula::True => String::from("true"),
        Formula::False => String::from("false"),
        Formula::Atom(a, r, b) => format!("{} {} {}", poly_to_string(a, names), r.symbol(), poly_to_string(b, names)),
        Formula::Not(g) => {
            let inner = formula_to_string(g, names);
            if prec(g) >= 3 && !matches!(**g, Formula::Atom(..)) {
                format!("!{}", inner)
            } else {
                format!("!({})", inner)
            }
        }
        Formula::And(gs) => gs
            .iter()
            .map(|g| if prec(g) <= 2 && !matches!(g, Formula::And(_)) || prec(g) == 0 { format!("({})", formula_to_string(g, names)) } else { formula_to_string(g, names) })
            .collect::<Vec<_>>()
            .join(" & "),
        Formula::Or(gs) => gs
            .iter()
            .map(|g| if prec(g) <= 1 && !matches!(g, Formula::And(_)) { format!("({})", formula_to_string(g, names)) } else { formula_to_string(g, names) })
            .collect::<Vec<_>>()
            .join(" | "),
        Formula::Exists(v, g) => format!("exists {}. {}", names.get(*v).cloned().unwrap_or_default(), formula_to_string(g, names)),
        Formula::Forall(v, g) => format!("forall {}. {}", names.get(*v).cloned().unwrap_or_default(), formula_to_string(g, names)),
    }
}

impl fmt::Display for SaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", formula_to_string(&self.body, &self.names))
    }
}

/// Simple atom helpers over slot indices.
pub fn var(i: usize) -> MPoly {
    MPoly::var(i)
}

pub fn cnst(r: Rat) -> MPoly {
    MPoly::constant(r)
}

/// Sign of a rational as an atom-friendly check.
pub fn sign_of(r: &Rat) -> i8 {
    rsign(r)
}

//! Text grammar for formulas, polynomials, terms, field elements and set expressions.
//!
//! ```text
//! formula := quant* disj
//! quant   := ('exists' | 'forall') var '.'
//! disj    := conj ('|' conj)*
//! conj    := lit ('&' lit)*
//! lit     := '!'* (atom | '(' formula ')' | 'true' | 'false')
//! atom    := poly rel poly
//! ```
//!
//! Polynomials use `+ - * / ^`, integer and rational literals and `eps`. Division is allowed by
//! constants and by nonzero elements of Q(eps); an atom with a denominator in eps is multiplied
//! through by it, flipping the relation when it is negative.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use stpart::fieldelem::FieldElem;
use stpart::formula::{default_names, Formula, Rel, SaFormula};
use stpart::good::SetExpr;
use stpart::mpoly::MPoly;
use stpart::term::Term;
use stpart::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

pub type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Sym(&'static str),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(r) => write!(f, "`{}`", r),
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Sym(s) => write!(f, "`{}`", s),
            Tok::End => write!(f, "end of input"),
        }
    }
}

const SYMS: [&str; 20] = ["<=", ">=", "!=", "<", ">", "=", "+", "-", "*", "/", "^", "(", ")", "&", "|", "!", ".", ",", "{", "}"];

fn lex(text: &str) -> PResult<Vec<(Tok, usize)>> {
    let cs: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    'outer: while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let col = i + 1;
        if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let mut digits: String = cs[st..i].iter().collect();
            let mut scale = 0u32;
            if i + 1 < cs.len() && cs[i] == '.' && cs[i + 1].is_ascii_digit() {
                i += 1;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    digits.push(cs[i]);
                    scale += 1;
                    i += 1;
                }
            }
            let n: BigInt = digits.parse().expect("digits");
            out.push((Tok::Num(Rat::new(n, BigInt::from(10u32).pow(scale))), col));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(cs[st..i].iter().collect()), col));
            continue;
        }
        if c == ':' {
            out.push((Tok::Sym(":"), col));
            i += 1;
            continue;
        }
        if c == ';' {
            out.push((Tok::Sym(";"), col));
            i += 1;
            continue;
        }
        for s in SYMS {
            let n = s.len();
            if i + n <= cs.len() && cs[i..i + n].iter().copied().eq(s.chars()) {
                out.push((Tok::Sym(s), col));
                i += n;
                continue 'outer;
            }
        }
        return Err(ParseError { column: col, message: format!("unexpected character `{}`", c) });
    }
    out.push((Tok::End, cs.len() + 1));
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["exists", "forall", "true", "false", "eps"];

/// Free variable names of a formula text, in x, y, z, w order and then alphabetically.
pub fn infer_vars(text: &str) -> PResult<Vec<String>> {
    let toks = lex(text)?;
    let mut bound = Vec::new();
    for w in toks.windows(2) {
        if let (Tok::Ident(q), Tok::Ident(v)) = (&w[0].0, &w[1].0) {
            if q == "exists" || q == "forall" {
                bound.push(v.clone());
            }
        }
    }
    let mut free: Vec<String> = Vec::new();
    for (t, _) in &toks {
        if let Tok::Ident(s) = t {
            if !KEYWORDS.contains(&s.as_str()) && !bound.contains(s) && !free.contains(s) {
                free.push(s.clone());
            }
        }
    }
    let rank = |s: &String| ["x", "y", "z", "w"].iter().position(|b| b == s).unwrap_or(4);
    free.sort_by(|a, b| rank(a).cmp(&rank(b)).then_with(|| a.cmp(b)));
    Ok(free)
}

/// Rational function num / den under construction.
#[derive(Clone, Debug)]
struct RatFn {
    num: MPoly,
    den: MPoly,
}

impl RatFn {
    fn poly(p: MPoly) -> Self {
        RatFn { num: p, den: MPoly::int(1) }
    }

    fn norm(self) -> Self {
        match self.den.const_value() {
            Some(c) if !c.is_one() => RatFn { num: self.num.scale(&(Rat::one() / c)), den: MPoly::int(1) },
            _ => self,
        }
    }

    fn add(&self, o: &RatFn) -> RatFn {
        if self.den == o.den {
            return RatFn { num: self.num.add(&o.num), den: self.den.clone() };
        }
        RatFn { num: self.num.mul(&o.den).add(&o.num.mul(&self.den)), den: self.den.mul(&o.den) }.norm()
    }

    fn neg(&self) -> RatFn {
        RatFn { num: self.num.neg(), den: self.den.clone() }
    }

    fn mul(&self, o: &RatFn) -> RatFn {
        RatFn { num: self.num.mul(&o.num), den: self.den.mul(&o.den) }.norm()
    }

    fn div(&self, o: &RatFn) -> Option<RatFn> {
        if o.num.is_zero() {
            return None;
        }
        Some(RatFn { num: self.num.mul(&o.den), den: self.den.mul(&o.num) }.norm())
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    /// Slot names: eps, the free variables, then bound variables as they are met.
    names: Vec<String>,
    nfree: usize,
    scope: Vec<(String, usize)>,
}

impl Parser {
    fn new(text: &str, free: &[String]) -> PResult<Self> {
        let mut names = vec![String::from("eps")];
        names.extend(free.iter().cloned());
        Ok(Parser { toks: lex(text)?, pos: 0, names, nfree: free.len(), scope: Vec::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError { column: self.col(), message: msg.into() })
    }

    fn unexpected<T>(&self, want: &str) -> PResult<T> {
        self.err(format!("expected {}, found {}", want, self.peek()))
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(t) if *t == s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.unexpected(&format!("`{}`", s))
        }
    }

    fn keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if self.keyword("exists") || self.keyword("forall") {
            let ex = self.keyword("exists");
            self.bump();
            let name = match self.bump() {
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => s,
                _ => {
                    self.pos -= 1;
                    return self.unexpected("a variable name");
                }
            };
            self.expect(".")?;
            let slot = self.names.len();
            self.names.push(name.clone());
            self.scope.push((name, slot));
            let body = self.formula()?;
            self.scope.pop();
            return Ok(if ex { Formula::Exists(slot, Box::new(body)) } else { Formula::Forall(slot, Box::new(body)) });
        }
        let mut ds = vec![self.conj()?];
        while self.eat("|") {
            ds.push(self.conj()?);
        }
        Ok(if ds.len() == 1 { ds.pop().unwrap() } else { Formula::Or(flatten(ds, true)) })
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut cs = vec![self.lit()?];
        while self.eat("&") {
            cs.push(self.lit()?);
        }
        Ok(if cs.len() == 1 { cs.pop().unwrap() } else { Formula::And(flatten(cs, false)) })
    }

    fn lit(&mut self) -> PResult<Formula> {
        if self.eat("!") {
            let g = self.lit()?;
            return Ok(Formula::not(g));
        }
        if self.keyword("true") {
            self.bump();
            return Ok(Formula::True);
        }
        if self.keyword("false") {
            self.bump();
            return Ok(Formula::False);
        }
        if self.keyword("exists") || self.keyword("forall") {
            return self.formula();
        }
        if matches!(self.peek(), Tok::Sym("(")) {
            // a parenthesised formula, unless it turns out to open a polynomial
            let save = (self.pos, self.names.len());
            self.bump();
            match self.formula() {
                Ok(f) if self.eat(")") && !self.at_rel_or_op() => return Ok(f),
                Ok(_) => {}
                Err(e) => {
                    self.pos = save.0;
                    self.names.truncate(save.1);
                    return match self.atom() {
                        Ok(a) => Ok(a),
                        Err(e2) => Err(if e2.column >= e.column { e2 } else { e }),
                    };
                }
            }
            self.pos = save.0;
            self.names.truncate(save.1);
        }
        self.atom()
    }

    fn at_rel_or_op(&self) -> bool {
        matches!(self.peek(), Tok::Sym(s) if ["<", "<=", "=", "!=", ">=", ">", "+", "-", "*", "/", "^"].contains(s))
    }

    fn rel(&mut self) -> PResult<Rel> {
        let r = match self.peek() {
            Tok::Sym("<") => Rel::Lt,
            Tok::Sym("<=") => Rel::Le,
            Tok::Sym("=") => Rel::Eq,
            Tok::Sym("!=") => Rel::Ne,
            Tok::Sym(">=") => Rel::Ge,
            Tok::Sym(">") => Rel::Gt,
            _ => return self.unexpected("a relation"),
        };
        self.bump();
        Ok(r)
    }

    fn atom(&mut self) -> PResult<Formula> {
        let col = self.col();
        let a = self.expr()?;
        let r = self.rel()?;
        let b = self.expr()?;
        atom_of(a, r, b).map_err(|m| ParseError { column: col, message: m })
    }

    fn expr(&mut self) -> PResult<RatFn> {
        let mut acc = self.term()?;
        loop {
            if self.eat("+") {
                acc = acc.add(&self.term()?);
            } else if self.eat("-") {
                acc = acc.add(&self.term()?.neg());
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<RatFn> {
        let mut acc = self.unary()?;
        loop {
            if self.eat("*") {
                acc = acc.mul(&self.unary()?);
            } else if matches!(self.peek(), Tok::Sym("/")) {
                let col = self.col();
                self.bump();
                let d = self.unary()?;
                acc = acc.div(&d).ok_or(ParseError { column: col, message: String::from("division by zero") })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> PResult<RatFn> {
        if self.eat("-") {
            return Ok(self.unary()?.neg());
        }
        let base = self.primary()?;
        if self.eat("^") {
            let e = match self.bump() {
                Tok::Num(r) if r.is_integer() && !r.is_negative() && r <= Rat::from_integer(64.into()) => {
                    r.to_integer().try_into().unwrap_or(0u32)
                }
                _ => {
                    self.pos -= 1;
                    return self.unexpected("a nonnegative integer exponent");
                }
            };
            return Ok(RatFn { num: base.num.pow(e), den: base.den.pow(e) });
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<RatFn> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.bump();
                Ok(RatFn::poly(MPoly::constant(r)))
            }
            Tok::Ident(s) => {
                if s == "eps" {
                    self.bump();
                    return Ok(RatFn::poly(MPoly::var(0)));
                }
                if KEYWORDS.contains(&s.as_str()) {
                    return self.unexpected("a polynomial");
                }
                let slot = self.lookup(&s)?;
                self.bump();
                Ok(RatFn::poly(MPoly::var(slot)))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => self.unexpected("a polynomial"),
        }
    }

    fn lookup(&self, s: &str) -> PResult<usize> {
        if let Some((_, slot)) = self.scope.iter().rev().find(|(n, _)| n == s) {
            return Ok(*slot);
        }
        if let Some(i) = self.names[1..=self.nfree].iter().position(|n| n == s) {
            return Ok(i + 1);
        }
        self.err(format!("undeclared variable `{}`", s))
    }
}

fn flatten(fs: Vec<Formula>, or: bool) -> Vec<Formula> {
    let mut out = Vec::new();
    for f in fs {
        match f {
            Formula::Or(gs) if or => out.extend(gs),
            Formula::And(gs) if !or => out.extend(gs),
            g => out.push(g),
        }
    }
    out
}

fn eps_sign(p: &MPoly) -> Option<i8> {
    p.to_upoly(0).map(|u| FieldElem::from_poly(&u).sign())
}

fn atom_of(a: RatFn, r: Rel, b: RatFn) -> Result<Formula, String> {
    if a.den == MPoly::int(1) && b.den == MPoly::int(1) {
        return Ok(Formula::cmp(a.num, r, b.num));
    }
    let d = a.den.mul(&b.den);
    match eps_sign(&d) {
        Some(s) => {
            let lhs = a.num.mul(&b.den);
            let rhs = b.num.mul(&a.den);
            Ok(if s > 0 { Formula::cmp(lhs, r, rhs) } else { Formula::cmp(rhs, r, lhs) })
        }
        None => Err(String::from("denominators in atoms may only involve eps")),
    }
}

/// Declared free variables: an explicit order, or `k` default names, or inferred from the text.
pub fn free_vars(text: &str, vars: Option<usize>, order: Option<&[String]>) -> PResult<Vec<String>> {
    match (order, vars) {
        (Some(o), Some(k)) if o.len() != k => Err(ParseError { column: 1, message: format!("--var-order names {} variables but --vars is {}", o.len(), k) }),
        (Some(o), _) => Ok(o.to_vec()),
        (None, Some(k)) => Ok(default_names(k)[1..].to_vec()),
        (None, None) => infer_vars(text),
    }
}

pub fn parse_formula_with(text: &str, free: &[String]) -> PResult<SaFormula> {
    let mut p = Parser::new(text, free)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(SaFormula::with_names(p.names, p.nfree, f))
}

/// Parse with free variables inferred from the text.
pub fn parse_formula(text: &str) -> PResult<SaFormula> {
    parse_formula_with(text, &infer_vars(text)?)
}

/// A quotient of polynomials in the given free variables.
pub fn parse_term(text: &str, free: &[String]) -> PResult<Term> {
    let mut p = Parser::new(text, free)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(Term::quot(e.num, e.den))
}

/// Terms separated by `;` or `,`.
pub fn parse_terms(text: &str, free: &[String]) -> PResult<Vec<Term>> {
    let mut p = Parser::new(text, free)?;
    let mut out = Vec::new();
    loop {
        let e = p.expr()?;
        out.push(Term::quot(e.num, e.den));
        if !(p.eat(";") || p.eat(",")) {
            break;
        }
    }
    p.finish()?;
    Ok(out)
}

/// An element of Q(eps), e.g. `eps^2*(3 + eps)/(1 - 2*eps)`.
pub fn parse_field_elem(text: &str) -> PResult<FieldElem> {
    let mut p = Parser::new(text, &[])?;
    let e = p.expr()?;
    p.finish()?;
    let n = e.num.to_upoly(0).expect("only eps is in scope");
    let d = e.den.to_upoly(0).expect("only eps is in scope");
    Ok(FieldElem::from_parts(0, n, d))
}

/// Set expressions for normal forms:
/// `st{F}`, `st{x, y: F}`, `union(A, B)`, `inter(A, B)`, `diff(A, B)`, `compl(A)`, `times_r(A)`, `proj(A)`.
pub fn parse_set_expr(text: &str, free: Option<&[String]>) -> PResult<SetExpr> {
    let mut p = Parser::new(text, &[])?;
    let e = set_expr(&mut p, text, free)?;
    p.finish()?;
    Ok(e)
}

fn set_expr(p: &mut Parser, text: &str, free: Option<&[String]>) -> PResult<SetExpr> {
    let name = match p.peek().clone() {
        Tok::Ident(s) => s,
        _ => return p.unexpected("a set expression"),
    };
    p.bump();
    if name == "st" {
        if !matches!(p.peek(), Tok::Sym("{")) {
            return p.unexpected("`{`");
        }
        let open = p.col();
        // find the matching brace by column, then parse the inside on its own
        let mut depth = 0;
        let mut close = None;
        while *p.peek() != Tok::End {
            match p.peek() {
                Tok::Sym("{") => depth += 1,
                Tok::Sym("}") => {
                    depth -= 1;
                    if depth == 0 {
                        close = Some(p.col());
                        p.bump();
                        break;
                    }
                }
                _ => {}
            }
            p.bump();
        }
        let close = match close {
            Some(c) => c,
            None => return p.unexpected("`}`"),
        };
        let inner: String = text.chars().skip(open).take(close - open - 1).collect();
        let shift = |e: ParseError| ParseError { column: e.column + open, message: e.message };
        let (vars, body) = match inner.find(':') {
            Some(i) => {
                let vs: Vec<String> = inner[..i].split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                (vs, inner[i + 1..].to_string())
            }
            None => (free.map(|f| f.to_vec()).unwrap_or(infer_vars(&inner).map_err(shift)?), inner.clone()),
        };
        let off = inner.len() - body.len();
        let f = parse_formula_with(&body, &vars).map_err(|e| ParseError { column: e.column + open + off, message: e.message })?;
        return Ok(SetExpr::St(f));
    }
    p.expect("(")?;
    let a = set_expr(p, text, free)?;
    let two = |p: &mut Parser| -> PResult<SetExpr> {
        p.expect(",")?;
        set_expr(p, text, free)
    };
    let e = match name.as_str() {
        "union" => SetExpr::Union(Box::new(a), Box::new(two(p)?)),
        "inter" => SetExpr::Inter(Box::new(a), Box::new(two(p)?)),
        "diff" => SetExpr::Diff(Box::new(a), Box::new(two(p)?)),
        "compl" => SetExpr::Compl(Box::new(a)),
        "times_r" => SetExpr::TimesR(Box::new(a)),
        "proj" => SetExpr::Proj(Box::new(a)),
        other => return Err(ParseError { column: 1, message: format!("unknown set operation `{}`", other) }),
    };
    p.expect(")")?;
    Ok(e)
}

/// Canonical text of a set expression.
pub fn set_expr_to_string(e: &SetExpr) -> String {
    match e {
        SetExpr::St(f) => format!("st{{{}: {}}}", f.free_names().join(", "), f),
        SetExpr::Union(a, b) => format!("union({}, {})", set_expr_to_string(a), set_expr_to_string(b)),
        SetExpr::Inter(a, b) => format!("inter({}, {})", set_expr_to_string(a), set_expr_to_string(b)),
        SetExpr::Diff(a, b) => format!("diff({}, {})", set_expr_to_string(a), set_expr_to_string(b)),
        SetExpr::Compl(a) => format!("compl({})", set_expr_to_string(a)),
        SetExpr::TimesR(a) => format!("times_r({})", set_expr_to_string(a)),
        SetExpr::Proj(a) => format!("proj({})", set_expr_to_string(a)),
    }
}

/// Term text reusing the formula printer.
pub fn term_to_string(t: &Term, names: &[String]) -> String {
    t.to_string_with(names)
}

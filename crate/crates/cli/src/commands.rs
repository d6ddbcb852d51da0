//! Subcommands: argument types and the dispatcher producing a RunReport.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use stpart::alg_eps::Ext;
use stpart::algebraic::{refine_to, Coord};
use stpart::ctx::Ctx;
use stpart::formula::{Formula, SaFormula};
use stpart::good::{self, FnDesc, FnOnCell, GoodDecomposition};
use stpart::measure::{self, IsoMap, MeasureValue, QBox};
use stpart::qe;
use stpart::rat::{rat_to_string, two_pow};
use stpart::st::{self, Piece};
use stpart::topology;
use stpart::Rat;

use crate::config::Config;
use crate::parse::{self, ParseError};
use crate::plot;
use crate::report::{Certificate, RunReport};
use crate::suite;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Record,
    Text,
    Svg,
}

#[derive(Debug, Parser)]
#[command(name = "stpart", version, about = "Standard parts of definable sets over Q(eps)")]
pub struct Cli {
    /// Number of free variables (named x, y, z unless --var-order is given)
    #[arg(long, global = true)]
    pub vars: Option<usize>,
    /// Free variable names in order, e.g. x,y
    #[arg(long, global = true, value_delimiter = ',')]
    pub var_order: Option<Vec<String>>,
    /// TOML file with engine limits
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the document here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Include wall-clock time in the report (breaks byte-identical output)
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Standard part of a set
    St {
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Good decomposition of the box [-1, 1]^n (or R^n) adapted to the sets
    Decompose {
        #[arg(required = true)]
        formulas: Vec<String>,
        /// Decompose R^n instead of the box
        #[arg(long)]
        rn: bool,
        /// Function term to make the decomposition adapted to
        #[arg(long = "fn", allow_hyphen_values = true)]
        func: Option<String>,
        /// Domain of the function (default: where its denominator is nonzero)
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
    },
    /// Pairs (X_j, Y_j) with the expression equal to the union of st X_j minus st Y_j
    NormalForm { expr: String },
    /// Closures of the cells of the decomposition of a set, as standard parts
    Closure {
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Connectedness of the standard part
    Connected {
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Lebesgue measure of the standard part
    Measure {
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Integral of a nonnegative function of one variable through its subgraph
    Volume {
        #[arg(allow_hyphen_values = true)]
        term: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: String,
    },
    /// Check that a map is a measure-preserving isomorphism from X to Y
    IsoCheck {
        /// Components separated by `;`
        #[arg(long, allow_hyphen_values = true)]
        map: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        /// Open set U where the map is considered (default: everywhere defined)
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
    },
    /// Compare induced derivatives with derivatives of the induced function
    DerivCheck {
        #[arg(allow_hyphen_values = true)]
        term: String,
        #[arg(long, allow_hyphen_values = true)]
        domain: Option<String>,
    },
    /// Search for a rational box inside the standard part
    Qbox {
        #[arg(allow_hyphen_values = true)]
        formula: String,
    },
    /// Run a verification suite
    Verify {
        /// st, st-properties, decomposition, normal-form, closure, connected, measure, derivative, qbox or all
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Draw sets or a decomposition (n <= 2)
    Plot {
        #[arg(required = true)]
        formulas: Vec<String>,
        #[arg(long)]
        decompose: bool,
    },
}

/// Usage or resource failure (exit code 1).
#[derive(Clone, Debug, PartialEq)]
pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<ParseError> for RunError {
    fn from(e: ParseError) -> Self {
        RunError(e.to_string())
    }
}

impl From<stpart::Error> for RunError {
    fn from(e: stpart::Error) -> Self {
        RunError(e.to_string())
    }
}

pub struct Output {
    pub report: RunReport,
    pub svg: Option<String>,
}

impl Cli {
    /// Canonical echo of the command, without output-only flags.
    pub fn echo(&self) -> Vec<String> {
        let mut v = Vec::new();
        let q = |s: &str| s.to_string();
        match &self.cmd {
            Cmd::St { formula } => v.extend([q("st"), q(formula)]),
            Cmd::Decompose { formulas, rn, func, domain } => {
                v.push(q("decompose"));
                v.extend(formulas.iter().cloned());
                if *rn {
                    v.push(q("--rn"));
                }
                if let Some(f) = func {
                    v.extend([q("--fn"), q(f)]);
                }
                if let Some(d) = domain {
                    v.extend([q("--domain"), q(d)]);
                }
            }
            Cmd::NormalForm { expr } => v.extend([q("normal-form"), q(expr)]),
            Cmd::Closure { formula } => v.extend([q("closure"), q(formula)]),
            Cmd::Connected { formula } => v.extend([q("connected"), q(formula)]),
            Cmd::Measure { formula } => v.extend([q("measure"), q(formula)]),
            Cmd::Volume { term, domain } => v.extend([q("volume"), q(term), q("--domain"), q(domain)]),
            Cmd::IsoCheck { map, x, y, domain } => {
                v.extend([q("iso-check"), q("--map"), q(map), q(x), q(y)]);
                if let Some(d) = domain {
                    v.extend([q("--domain"), q(d)]);
                }
            }
            Cmd::DerivCheck { term, domain } => {
                v.extend([q("deriv-check"), q(term)]);
                if let Some(d) = domain {
                    v.extend([q("--domain"), q(d)]);
                }
            }
            Cmd::Qbox { formula } => v.extend([q("qbox"), q(formula)]),
            Cmd::Verify { suite } => v.extend([q("verify"), q("--suite"), q(suite)]),
            Cmd::Plot { formulas, decompose } => {
                v.push(q("plot"));
                v.extend(formulas.iter().cloned());
                if *decompose {
                    v.push(q("--decompose"));
                }
            }
        }
        if let Some(k) = self.vars {
            v.extend([q("--vars"), k.to_string()]);
        }
        if let Some(o) = &self.var_order {
            v.extend([q("--var-order"), o.join(",")]);
        }
        v
    }

    fn free_vars(&self, texts: &[&str]) -> Result<Vec<String>, RunError> {
        let joined = texts.join(" & ");
        let fv = parse::free_vars(&joined, self.vars, self.var_order.as_deref())?;
        Ok(fv)
    }

    fn formula(&self, text: &str, free: &[String]) -> Result<SaFormula, RunError> {
        Ok(parse::parse_formula_with(text, free)?)
    }
}

// ---- rendering helpers ----

fn coord_text(c: &Coord) -> String {
    match c {
        Coord::Rat(r) => rat_to_string(r),
        Coord::Alg { def, .. } => {
            let mut pt = vec![Coord::Rat(Rat::from_integer(0.into())), c.clone()];
            refine_to(&mut pt, 1, &two_pow(-48));
            let names = vec![String::from("eps"), String::from("t")];
            format!("root of {} near {:.12}", stpart::formula::poly_to_string(def, &names), pt[1].approx())
        }
    }
}

fn ext_text(e: &Ext) -> String {
    match e {
        Ext::NegInf => String::from("-inf"),
        Ext::PosInf => String::from("+inf"),
        Ext::Fin(c) => coord_text(c),
    }
}

pub fn pieces_json(ps: &[Piece]) -> Value {
    Value::Array(
        ps.iter()
            .map(|p| if p.is_point() { json!({ "point": ext_text(&p.lo) }) } else { json!({ "interval": [ext_text(&p.lo), ext_text(&p.hi)] }) })
            .collect(),
    )
}

pub fn measure_json(m: &MeasureValue) -> Value {
    if m.infinite {
        return json!({ "value": "inf", "radius": "0", "exact": false, "method": "none", "note": m.note });
    }
    let method = if m.exact { "exact" } else { "tanh-sinh quadrature" };
    let mut v = json!({
        "value": format!("{:.15}", m.approx()),
        "radius": format!("{:.3e}", m.radius_f64()),
        "exact": m.exact,
        "method": method,
    });
    if m.exact {
        v["rational"] = json!(rat_to_string(&m.value));
    }
    if let Some(n) = &m.note {
        v["note"] = json!(n);
    }
    v
}

fn types_text(t: &[u8]) -> String {
    format!("({})", t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
}

/// One record per cell, top level first, with the index of the cell's projection.
pub fn decomposition_json(d: &GoodDecomposition) -> Value {
    let levels: Vec<Value> = d
        .levels()
        .iter()
        .filter(|l| l.n > 0)
        .map(|l| {
            let cells: Vec<Value> = l
                .cells
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let mut v = json!({
                        "index": i,
                        "types": types_text(&c.types),
                        "shape": c.shape_tag(),
                        "region": c.region.to_string(),
                        "base": l.base_index[i],
                    });
                    if let Some(Some(s)) = l.fn_status.get(i) {
                        v["function"] = match s {
                            FnOnCell::Misses => json!("misses st(graph f)"),
                            FnOnCell::Induces(g) => json!({ "induced_graph": g.graph_st.to_string(), "conservative": g.conservative }),
                        };
                    }
                    v
                })
                .collect();
            json!({ "n": l.n, "cells": cells, "st_sets": l.st_sets.iter().map(|s| s.to_string()).collect::<Vec<_>>() })
        })
        .collect();
    json!({ "ambient": format!("{:?}", d.ambient).to_lowercase(), "levels": levels })
}

fn certify_decomposition(d: &GoodDecomposition, report: &mut RunReport) -> Result<(), RunError> {
    let c = d.certify(true)?;
    let m = "truth tables on a common CAD";
    report.certificates.push(Certificate::new("cells partition the ambient space", m, c.partition));
    report.certificates.push(Certificate::new("each st(X_i) is a union of cells", m, c.refines));
    report.certificates.push(Certificate::new("projections of cells are cells of the base decomposition", "sa_equal of projections", c.pi_compatible));
    report.certificates.push(Certificate::new("each cell equals its recursive shape", "sa_equal with the shape formula", c.shapes));
    if d.fn_status.iter().any(|s| s.is_some()) {
        report.certificates.push(Certificate::new("every open cell misses st(graph f) or carries an induced function", "status per open cell", c.fn_cells));
    }
    Ok(())
}

/// Certificate for an engine call that signals failure through `Error::Certificate`.
fn certified<T>(r: stpart::Result<T>, claim: &str, method: &str, report: &mut RunReport) -> Result<Option<T>, RunError> {
    match r {
        Ok(t) => {
            report.certificates.push(Certificate::new(claim, method, true));
            Ok(Some(t))
        }
        Err(stpart::Error::Certificate(m)) => {
            report.certificates.push(Certificate::new(claim, method, false).with_detail(m));
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn fn_desc(cli: &Cli, term: &str, domain: Option<&str>, free: &[String]) -> Result<FnDesc, RunError> {
    let t = parse::parse_term(term, free)?;
    Ok(match domain {
        Some(d) => FnDesc::Term { domain: cli.formula(d, free)?, term: t },
        None => FnDesc::term(free.len(), t),
    })
}

/// Run a parsed command line. The returned report carries the verdicts; errors are usage errors.
pub fn run(cli: &Cli, config: &Config) -> Result<Output, RunError> {
    config.validate().map_err(RunError)?;
    let ctx = config.ctx();
    let mut report = RunReport::new(cli.echo());
    let mut svg = None;
    match &cli.cmd {
        Cmd::St { formula } => {
            let free = cli.free_vars(&[formula])?;
            let x = cli.formula(formula, &free)?;
            let s = st::st_set(&x, &ctx)?;
            let mut r = json!({ "input": x.to_string(), "st": s.result.to_string() });
            if let Some(ps) = &s.pieces {
                r["pieces"] = pieces_json(ps);
            }
            report.results.push(r);
            let again = st::st_set(&s.result, &ctx)?;
            let closed = qe::sa_equal(&again.result, &s.result)?;
            report.certificates.push(Certificate::new("st(X) is closed", "st of the result over Q equals the result", closed));
        }
        Cmd::Decompose { formulas, rn, func, domain } => {
            let mut texts: Vec<&str> = formulas.iter().map(|s| s.as_str()).collect();
            texts.extend(func.iter().map(|s| s.as_str()));
            texts.extend(domain.iter().map(|s| s.as_str()));
            let free = cli.free_vars(&texts)?;
            let sets = formulas.iter().map(|f| cli.formula(f, &free)).collect::<Result<Vec<_>, _>>()?;
            let d = if *rn {
                if func.is_some() {
                    return Err(RunError(String::from("--fn is supported for box decompositions only")));
                }
                good::good_decomposition_rn(&sets, &ctx)?
            } else {
                let f = match func {
                    Some(t) => Some(fn_desc(cli, t, domain.as_deref(), &free)?),
                    None => None,
                };
                good::good_decomposition_box(&sets, f.as_ref(), &ctx)?
            };
            report.results.push(decomposition_json(&d));
            certify_decomposition(&d, &mut report)?;
        }
        Cmd::NormalForm { expr } => {
            let free = match (cli.vars, &cli.var_order) {
                (None, None) => None,
                _ => Some(parse::free_vars("", cli.vars, cli.var_order.as_deref())?),
            };
            let e = parse::parse_set_expr(expr, free.as_deref())?;
            let pairs = certified(good::normal_form_ind(&e, &ctx), "union of st(X_j) minus st(Y_j) equals the expression", "sa_equal against direct evaluation", &mut report)?;
            let value = e.eval(&ctx)?;
            let mut r = json!({ "expression": parse::set_expr_to_string(&e), "value": value.to_string() });
            if let Some(ps) = pairs {
                r["pairs"] = Value::Array(ps.iter().map(|(x, y)| json!({ "x": x.to_string(), "y": y.to_string() })).collect());
            }
            report.results.push(r);
        }
        Cmd::Closure { formula } => {
            let free = cli.free_vars(&[formula])?;
            let x = cli.formula(formula, &free)?;
            let d = good::good_decomposition_box(&[x], None, &ctx)?;
            let mut cells = Vec::new();
            for (i, c) in d.cells.iter().enumerate() {
                let claim = format!("st(X_{}) is the closure of cell {}", i, i);
                let mut v = json!({ "index": i, "types": types_text(&c.types), "cell": c.region.to_string() });
                if let Some((xf, cert)) = certified(topology::closure_as_st(c, &ctx), &claim, "sa_equal with the closure computed over Q", &mut report)? {
                    v["x"] = json!(xf.to_string());
                    v["closure"] = json!(cert.closure.to_string());
                    v["exponent"] = json!(cert.exponent);
                    if let Some(m) = cert.monotone {
                        v["monotone"] = json!(m);
                    }
                }
                cells.push(v);
            }
            report.results.push(json!({ "cells": cells }));
        }
        Cmd::Connected { formula } => {
            let free = cli.free_vars(&[formula])?;
            let x = cli.formula(formula, &free)?;
            let c = topology::is_connected_st(&x, &ctx)?;
            let mut r = json!({
                "connected": c.connected,
                "components": c.components.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            });
            if c.connected {
                report.certificates.push(Certificate::new("st(X) is connected", "adjacency of the cells of st(X)", true));
            } else {
                let (a, b) = c.witness.clone().expect("disconnected sets carry a witness");
                r["witness"] = json!([a.to_string(), b.to_string()]);
                let ok = separation_holds(&x, &a, &b, &ctx)?;
                report.certificates.push(Certificate::new("st(X) is the disjoint union of two nonempty relatively closed sets", "QE on the witness pair", ok));
            }
            report.results.push(r);
        }
        Cmd::Measure { formula } => {
            let free = cli.free_vars(&[formula])?;
            let x = cli.formula(formula, &free)?;
            let m = measure::measure_st(&x, &ctx)?;
            report.results.push(measure_json(&m));
            report.certificates.push(Certificate::new("lambda(st X) lies within radius of value", if m.exact { "exact integration over cells" } else { "quadrature with a posteriori error" }, true));
        }
        Cmd::Volume { term, domain } => {
            let free = cli.free_vars(&[term, domain])?;
            let f = fn_desc(cli, term, Some(domain), &free)?;
            let m = measure::volume_i(&f, &ctx)?;
            report.results.push(measure_json(&m));
            report.certificates.push(Certificate::new("I(f) is the measure of st of the subgraph", "measure of the subgraph", true));
        }
        Cmd::IsoCheck { map, x, y, domain } => {
            let mut texts = vec![x.as_str(), y.as_str(), map.as_str()];
            texts.extend(domain.iter().map(|s| s.as_str()));
            let free = cli.free_vars(&texts)?;
            let xs = cli.formula(x, &free)?;
            let ys = cli.formula(y, &free)?;
            let comps = parse::parse_terms(map, &free)?;
            let u = match domain {
                Some(d) => cli.formula(d, &free)?,
                None => SaFormula::with_names(xs.names[..=free.len()].to_vec(), free.len(), Formula::True),
            };
            let psi = IsoMap { comps, domain: u.clone(), codomain: SaFormula::with_names(u.names.clone(), free.len(), Formula::True) };
            let r = measure::check_isomorphism(&psi, &xs, &ys, &ctx)?;
            let mut v = json!({ "isomorphic": r.isomorphic, "report": r.report });
            if let (Some(a), Some(b)) = (&r.measure_x, &r.measure_y) {
                v["measure_x"] = measure_json(a);
                v["measure_y"] = measure_json(b);
            }
            report.results.push(v);
            report.certificates.push(Certificate::new("X and the preimage of Y agree off a null set", "dimension of the symmetric difference", r.sets_agree));
            report.certificates.push(Certificate::new("|J psi| = 1 almost everywhere on X", "dimension of the exceptional set", r.unit_jacobian));
            match r.injective {
                Some(b) => report.certificates.push(Certificate::new("psi is injective on U", "decided by QE", b)),
                None => report.certificates.push(Certificate::skipped("psi is injective on U", "decided by QE", "decided for one variable only")),
            }
            if r.measure_x.is_some() {
                report.certificates.push(Certificate::new("measures of X and Y agree", "measure_st within radii", r.isomorphic));
            }
        }
        Cmd::DerivCheck { term, domain } => {
            let mut texts = vec![term.as_str()];
            texts.extend(domain.iter().map(|s| s.as_str()));
            let free = cli.free_vars(&texts)?;
            let f = fn_desc(cli, term, domain.as_deref(), &free)?;
            let dom = match &f {
                FnDesc::Term { domain, .. } => domain.clone(),
                FnDesc::Graph(_) => unreachable!(),
            };
            let d = good::good_decomposition_box(&[dom], Some(&f), &ctx)?;
            let mut cells = Vec::new();
            for (i, c) in d.cells.iter().enumerate() {
                if !matches!(d.fn_status[i], Some(FnOnCell::Induces(_))) {
                    continue;
                }
                let r = measure::st_derivative_commutes(&f, c, &ctx)?;
                cells.push(json!({
                    "cell": c.region.to_string(),
                    "symbolic": r.symbolic,
                    "fd_points": r.fd_points,
                    "fd_max_error": format!("{:.3e}", r.fd_max_error),
                }));
                report.certificates.push(Certificate::new(format!("derivatives commute with st on cell {}", i), "symbolic graphs and central differences (h = 1e-3, tol 1e-4)", r.ok));
            }
            report.results.push(json!({ "cells": cells }));
        }
        Cmd::Qbox { formula } => {
            let free = cli.free_vars(&[formula])?;
            let x = cli.formula(formula, &free)?;
            match measure::contains_qbox(&x, &ctx)? {
                QBox::Found(b) => {
                    report.results.push(json!({ "box": b.iter().map(|(l, h)| [rat_to_string(l), rat_to_string(h)]).collect::<Vec<_>>() }));
                    report.certificates.push(Certificate::new("the box lies in X", "forall-sentence decided by QE", true));
                }
                QBox::InteriorEmpty => {
                    report.results.push(json!({ "box": null, "note": "interior empty" }));
                    let s = st::st_set(&x, &ctx)?.result;
                    report.certificates.push(Certificate::new("st(X) has empty interior", "dimension of st(X)", qe::sa_dim(&s) < x.nfree as i32));
                }
            }
        }
        Cmd::Verify { suite: name } => {
            let out = suite::run_suite(name, &ctx).map_err(RunError)?;
            report.results.extend(out.results);
            report.certificates.extend(out.certificates);
        }
        Cmd::Plot { formulas, decompose } => {
            let texts: Vec<&str> = formulas.iter().map(|s| s.as_str()).collect();
            let free = cli.free_vars(&texts)?;
            if free.len() > 2 || free.is_empty() {
                return Err(RunError(format!("plots need 1 or 2 variables, got {}", free.len())));
            }
            let sets = formulas.iter().map(|f| cli.formula(f, &free)).collect::<Result<Vec<_>, _>>()?;
            let doc = if *decompose {
                let d = good::good_decomposition_box(&sets, None, &ctx)?;
                certify_decomposition(&d, &mut report)?;
                plot::plot_decomposition(&d)
            } else if free.len() == 1 {
                let ps = sets.iter().map(|x| Ok(st::st_set(x, &ctx)?.pieces.unwrap_or_default())).collect::<Result<Vec<_>, RunError>>()?;
                plot::plot_line(&ps)
            } else {
                let ss = sets.iter().map(|x| Ok(st::st_set(x, &ctx)?.result)).collect::<Result<Vec<_>, RunError>>()?;
                plot::plot_plane(&ss, 1.25)
            };
            report.results.push(json!({ "svg_bytes": doc.len() }));
            svg = Some(doc);
        }
    }
    Ok(Output { report, svg })
}

/// A, B nonempty, disjoint, covering st X, and neither meets the closure of the other.
pub fn separation_holds(x: &SaFormula, a: &SaFormula, b: &SaFormula, ctx: &Ctx) -> Result<bool, RunError> {
    let s = st::st_set(x, ctx)?.result;
    let cl = |f: &SaFormula| -> Result<SaFormula, RunError> { Ok(st::st_set(f, ctx)?.result) };
    let ok = !qe::sa_empty(a)
        && !qe::sa_empty(b)
        && qe::sa_empty(&qe::intersection(a, b)?)
        && qe::sa_equal(&qe::union(a, b)?, &s)?
        && qe::sa_empty(&qe::intersection(&cl(a)?, b)?)
        && qe::sa_empty(&qe::intersection(a, &cl(b)?)?);
    Ok(ok)
}

/// Render an output in the requested format.
pub fn render(cli: &Cli, out: &Output) -> Result<String, RunError> {
    let fmt = cli.format.unwrap_or(if out.svg.is_some() { Format::Svg } else { Format::Record });
    match fmt {
        Format::Record => Ok(out.report.to_record()),
        Format::Text => Ok(out.report.to_text()),
        Format::Svg => out.svg.clone().ok_or_else(|| RunError(String::from("--format svg is available for plot only"))),
    }
}

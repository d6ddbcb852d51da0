//! Acceptance run: ten criteria, each checked by the engine's own certificates and by an
//! independent floating-point or exact oracle. One PASS/FAIL line per criterion goes to stderr.

mod oracle;

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use oracle::{components, fiber, hausdorff, monte_carlo, raster, Compiled, Grid};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stpart::ctx::Ctx;
use stpart::formula::{Formula, Rel, SaFormula};
use stpart::good::{self, FnDesc, FnOnCell, GoodCell, InducedFn};
use stpart::measure::{self, QBox};
use stpart::mpoly::MPoly;
use stpart::rat::to_f64;
use stpart::{qe, st, Rat};
use stpart_cli::parse::parse_term;
use stpart_cli::suite::{self, formula, vars_of, SuiteOutput};
use stpart_cli::Config;

type Check = Result<String, String>;

/// Name, time limit in seconds, check.
type Criterion<'a> = (&'static str, Option<f64>, Box<dyn Fn() -> Check + 'a>);

fn suite_ok(name: &str, ctx: &Ctx) -> Result<SuiteOutput, String> {
    let out = suite::run_suite(name, ctx)?;
    match out.failures().first() {
        None => Ok(out),
        Some(c) => Err(format!("{} certificate violated: {}", name, c.claim)),
    }
}

fn grid_for(n: usize, line: (f64, f64), plane: (f64, f64), h: f64) -> Grid {
    let (lo, hi) = if n == 1 { line } else { plane };
    Grid::new(n, lo, hi, h)
}

fn st_catalog(ctx: &Ctx) -> Check {
    let cat = suite::st_catalog();
    let mut worst: f64 = 0.0;
    for (i, c) in cat.iter().enumerate() {
        let x = c.set();
        let s = st::st_set(&x, ctx).map_err(|e| e.to_string())?;
        if !qe::sa_equal(&s.result, &c.expected()).map_err(|e| e.to_string())? {
            return Err(format!("case {}: st({}) = {} differs from {}", i, c.set, s.result, c.st));
        }
        let g = grid_for(x.nfree, (-10.0, 10.0), (-1.5, 1.5), 1e-3);
        let slice = raster(&x.body, 1e-4, &g);
        let st_r = raster(&s.result.body, 0.0, &g);
        let d = hausdorff(&slice, &st_r, &g).ok_or_else(|| format!("case {}: one of slice and st set is empty", i))?;
        if d > 1e-2 {
            return Err(format!("case {}: Hausdorff distance {:.3e} to the slice at eps = 1e-4", i, d));
        }
        worst = worst.max(d);
    }
    Ok(format!("{} sets, max Hausdorff distance {:.3e}", cat.len(), worst))
}

fn st_properties(ctx: &Ctx) -> Check {
    let out = suite_ok("st-properties", ctx)?;
    let count = |p: &str| out.certificates.iter().filter(|c| c.claim.starts_with(p)).count();
    let (proj, wit, loc) = (count("st(pi X)"), count("intersection witness"), count("unbounded locus"));
    if wit != 10 || loc != suite::locus_catalog().len() || proj == 0 {
        return Err(format!("unexpected certificate counts: {} projections, {} witnesses, {} loci", proj, wit, loc));
    }
    // shape of st on the line, independently of the engine: finitely many closed pieces
    for c in suite::st_catalog().iter().filter(|c| c.vars().len() == 1) {
        let s = st::st_set(&c.set(), ctx).map_err(|e| e.to_string())?;
        let f = Compiled::new(&s.result.body);
        let (_, ivs) = fiber(&f, 1, &[0.0, 0.0], -1e3, 1e3);
        for (a, b) in ivs {
            let inner = |x: f64| x > -1e3 && x < 1e3;
            if (inner(a) && !f.holds(&[0.0, a])) || (inner(b) && !f.holds(&[0.0, b])) {
                return Err(format!("st({}) has an open end", c.set));
            }
        }
    }
    Ok(format!("{} projections, {} witnesses, {} loci, 1-variable shapes closed", proj, wit, loc))
}

fn dyadic(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(rng.gen_range(-(1i64 << 16)..=(1i64 << 16)).into(), (1i64 << 16).into())
}

fn decomposition(ctx: &Ctx) -> Check {
    suite_ok("decomposition", ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut probes = 0;
    for (i, c) in suite::decomposition_catalog().iter().enumerate() {
        let d = c.decompose(ctx).map_err(|e| e.to_string())?;
        let n = d.n;
        let eighths: Vec<Rat> = (-8..=8).map(|k| Rat::new(k.into(), 8.into())).collect();
        let mut pts: Vec<Vec<Rat>> = if n == 1 {
            eighths.iter().map(|a| vec![a.clone()]).collect()
        } else {
            eighths.iter().flat_map(|a| eighths.iter().map(move |b| vec![a.clone(), b.clone()])).collect()
        };
        pts.extend((0..500).map(|_| (0..n).map(|_| dyadic(&mut rng)).collect::<Vec<_>>()));
        for p in &pts {
            let hits = d.cells.iter().filter(|c| qe::holds_at(&c.region, p, None)).count();
            if hits != 1 {
                return Err(format!("decomposition {}: point {:?} lies in {} cells", i, p.iter().map(to_f64).collect::<Vec<_>>(), hits));
            }
            probes += 1;
        }
    }
    Ok(format!("suite certificates verified; {} exact probes each in exactly one cell", probes))
}

fn normal_form(ctx: &Ctx) -> Check {
    let out = suite_ok("normal-form", ctx)?;
    Ok(format!("{} round trips", out.certificates.len()))
}

fn closure(ctx: &Ctx) -> Check {
    let mut cells = 0;
    let mut worst: f64 = 0.0;
    for (i, c) in suite::decomposition_catalog().iter().enumerate() {
        let d = c.decompose(ctx).map_err(|e| e.to_string())?;
        let g = grid_for(d.n, (-1.25, 1.25), (-1.25, 1.25), if d.n == 1 { 1e-3 } else { 5e-3 });
        for (k, cell) in d.cells.iter().enumerate() {
            let tag = format!("decomposition {} cell {}", i, k);
            let (x, cert) = stpart::topology::closure_as_st(cell, ctx).map_err(|e| format!("{}: {}", tag, e))?;
            let s = st::st_set(&x, ctx).map_err(|e| e.to_string())?.result;
            if !qe::sa_equal(&s, &cert.closure).map_err(|e| e.to_string())? {
                return Err(format!("{}: st(X) differs from the closure", tag));
            }
            // st(X) is closed; it is the closure iff it contains C and stays within distance 0 of C
            if !qe::sa_empty(&qe::difference(&cell.region, &s).map_err(|e| e.to_string())?) {
                return Err(format!("{}: the cell is not inside st(X)", tag));
            }
            match hausdorff(&raster(&s.body, 0.0, &g), &raster(&cell.region.body, 0.0, &g), &g) {
                Some(h) if h <= 4.0 * g.h => worst = worst.max(h),
                Some(h) => return Err(format!("{}: st(X) reaches {:.3e} away from the cell", tag, h)),
                None if qe::sa_equal(&s, &cell.region).map_err(|e| e.to_string())? => {}
                None => return Err(format!("{}: the cell raster is empty and st(X) differs from it", tag)),
            }
            cells += 1;
        }
    }
    Ok(format!("{} cells, max raster distance {:.3e}", cells, worst))
}

fn connected(ctx: &Ctx) -> Check {
    suite_ok("connected", ctx)?;
    let (conn, disc) = suite::connected_catalog();
    let mut counts = Vec::new();
    for (text, want_one) in conn.iter().map(|t| (t, true)).chain(disc.iter().map(|t| (t, false))) {
        let x = formula(text, &vars_of(text));
        let s = st::st_set(&x, ctx).map_err(|e| e.to_string())?.result;
        let g = grid_for(x.nfree, (-3.0, 3.0), (-1.5, 1.5), if x.nfree == 1 { 1e-3 } else { 1e-2 });
        let k = components(&raster(&s.body, 0.0, &g), &g);
        if (k == 1) != want_one || k == 0 {
            return Err(format!("st({}) rasterises to {} components", text, k));
        }
        counts.push(k);
    }
    Ok(format!("raster components {:?}", counts))
}

fn measures(ctx: &Ctx) -> Check {
    suite_ok("measure", ctx)?;
    let mut worst: f64 = 0.0;
    for (i, text) in suite::measure_catalog().iter().enumerate() {
        let x = formula(text, &vars_of(text));
        let m = measure::measure_st(&x, ctx).map_err(|e| e.to_string())?.approx();
        let mc = if x.nfree == 1 { monte_carlo(&x.body, 1e-7, 1, -2.0, 2.0, 1_000_000, i as u64) } else { monte_carlo(&x.body, 1e-7, 2, -1.5, 1.5, 1000, i as u64) };
        if (m - mc).abs() > 1e-2 {
            return Err(format!("{}: measure {:.6} against Monte Carlo {:.6}", text, m, mc));
        }
        worst = worst.max((m - mc).abs());
    }
    Ok(format!("suite certificates verified; Monte Carlo max gap {:.3e}", worst))
}

/// Value of an induced function at p, read off its graph.
fn value(g: &InducedFn, p: &[f64]) -> Option<f64> {
    let n = p.len();
    let f = Compiled::new(&g.graph_st.body);
    let mut at = vec![0.0];
    at.extend_from_slice(p);
    at.push(0.0);
    let (pts, ivs) = fiber(&f, n + 1, &at, -1e3, 1e3);
    if pts.len() == 1 && ivs.is_empty() {
        Some(pts[0])
    } else {
        None
    }
}

fn cell_points(cell: &GoodCell, h: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = cell.n();
    let region = Compiled::new(&cell.region.body);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inside = |p: &[f64]| {
        let mut x = vec![0.0];
        x.extend_from_slice(p);
        region.holds(&x)
    };
    let mut pts = Vec::new();
    for _ in 0..200 * count {
        if pts.len() == count {
            break;
        }
        let p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let room = (0..n).all(|i| {
            [-h, h].iter().all(|s| {
                let mut q = p.clone();
                q[i] += s;
                inside(&q)
            })
        });
        if inside(&p) && room {
            pts.push(p);
        }
    }
    pts
}

fn derivatives(ctx: &Ctx) -> Check {
    let out = suite_ok("derivative", ctx)?;
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (i, (t, dom)) in suite::derivative_catalog().into_iter().enumerate() {
        let vs = vars_of(&format!("{} = 0 & {}", t, dom));
        let vn: Vec<String> = vs.iter().map(|s| s.to_string()).collect();
        let domain = formula(dom, &vs);
        let term = parse_term(t, &vn).map_err(|e| e.to_string())?;
        let f = FnDesc::Term { domain: domain.clone(), term: term.clone() };
        let d = good::good_decomposition_box(std::slice::from_ref(&domain), Some(&f), ctx).map_err(|e| e.to_string())?;
        for (k, cell) in d.cells.iter().enumerate() {
            let g = match &d.fn_status[k] {
                Some(FnOnCell::Induces(g)) => g,
                _ => continue,
            };
            let n = cell.n();
            let gs: Vec<InducedFn> = (1..=n)
                .map(|j| good::make_induced_fn(&FnDesc::Term { domain: domain.clone(), term: term.derivative(j) }, cell, ctx))
                .collect::<Result<_, _>>()
                .map_err(|e| format!("function {}: {}", i, e))?;
            let pts = cell_points(cell, h, 100, i as u64);
            if pts.len() < 100 {
                return Err(format!("function {} cell {}: only {} sample points", i, k, pts.len()));
            }
            for p in &pts {
                for j in 0..n {
                    let (mut a, mut b) = (p.clone(), p.clone());
                    a[j] -= h;
                    b[j] += h;
                    let fd = match (value(g, &b), value(g, &a)) {
                        (Some(u), Some(v)) => (u - v) / (2.0 * h),
                        _ => return Err(format!("function {}: graph is not single valued near {:?}", i, p)),
                    };
                    let dv = value(&gs[j], p).ok_or_else(|| format!("function {}: derivative graph not single valued at {:?}", i, p))?;
                    worst = worst.max((fd - dv).abs());
                }
            }
            checked += 1;
        }
    }
    if worst > 1e-4 {
        return Err(format!("finite differences off by {:.3e}", worst));
    }
    Ok(format!("{} certificates; {} cells at 100 points, max error {:.3e}", out.certificates.len(), checked, worst))
}

fn qboxes(ctx: &Ctx) -> Check {
    suite_ok("qbox", ctx)?;
    let (full, null) = suite::qbox_catalog();
    for text in &full {
        let x = formula(text, &vars_of(text));
        let b = match measure::contains_qbox(&x, ctx).map_err(|e| e.to_string())? {
            QBox::Found(b) => b,
            QBox::InteriorEmpty => return Err(format!("{}: no box", text)),
        };
        // the closed box lies in X itself, over Q(eps)
        let mut cs = Vec::new();
        for (i, (lo, hi)) in b.iter().enumerate() {
            let v = MPoly::var(i + 1);
            cs.push(Formula::atom(MPoly::constant(lo.clone()).sub(&v), Rel::Le));
            cs.push(Formula::atom(v.sub(&MPoly::constant(hi.clone())), Rel::Le));
        }
        let bx = SaFormula::new(x.nfree, Formula::and(cs));
        let outside = qe::difference(&bx, &x).map_err(|e| e.to_string())?;
        if !qe::sa_empty(&outside) || b.iter().any(|(l, h)| l >= h) {
            return Err(format!("{}: box {:?} is not inside the set", text, b));
        }
        // and numerically at a small eps
        let f = Compiled::new(&x.body);
        let ticks = |(l, h): &(Rat, Rat)| (0..=10).map(|k| to_f64(l) + (to_f64(h) - to_f64(l)) * k as f64 / 10.0).collect::<Vec<_>>();
        let axes: Vec<Vec<f64>> = b.iter().map(ticks).collect();
        let pts: Vec<Vec<f64>> = if axes.len() == 1 {
            axes[0].iter().map(|&a| vec![1e-9, a]).collect()
        } else {
            axes[0].iter().flat_map(|&a| axes[1].iter().map(move |&c| vec![1e-9, a, c])).collect()
        };
        if let Some(p) = pts.iter().find(|p| !f.holds(p)) {
            return Err(format!("{}: box point {:?} fails at eps = 1e-9", text, p));
        }
    }
    for text in &null {
        let x = formula(text, &vars_of(text));
        let lo = if x.nfree == 1 { -2.0 } else { -1.5 };
        let mc = monte_carlo(&x.body, 1e-9, x.nfree, lo, -lo, if x.nfree == 1 { 100_000 } else { 300 }, 7);
        if mc > 1e-3 {
            return Err(format!("{}: Monte Carlo volume {:.3e} at eps = 1e-9", text, mc));
        }
    }
    Ok(format!("{} boxes inside their sets, {} null sets", full.len(), null.len()))
}

fn determinism() -> Check {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_stpart")).args(["verify", "--suite", "all"]).output().map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    if a.status.code() != Some(0) {
        return Err(format!("verify exited with {:?}: {}", a.status.code(), String::from_utf8_lossy(&a.stderr)));
    }
    if a.stdout != b.stdout || a.status.code() != b.status.code() {
        return Err(String::from("two verify reports differ"));
    }
    Ok(format!("two reports of {} bytes, identical", a.stdout.len()))
}

#[test]
fn acceptance() {
    let ctx = Config::default().ctx();
    let criteria: Vec<Criterion> = vec![
        ("st catalog", Some(60.0), Box::new(|| st_catalog(&ctx))),
        ("projection, witnesses, loci, line shapes", Some(60.0), Box::new(|| st_properties(&ctx))),
        ("good decompositions", Some(300.0), Box::new(|| decomposition(&ctx))),
        ("normal form round trip", Some(300.0), Box::new(|| normal_form(&ctx))),
        ("closures as st", None, Box::new(|| closure(&ctx))),
        ("connectedness", None, Box::new(|| connected(&ctx))),
        ("measures", Some(120.0), Box::new(|| measures(&ctx))),
        ("derivatives commute with st", Some(60.0), Box::new(|| derivatives(&ctx))),
        ("rational boxes", Some(60.0), Box::new(|| qboxes(&ctx))),
        ("determinism", None, Box::new(determinism)),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = check();
        let secs = t.elapsed().as_secs_f64();
        let r = match (r, limit) {
            (Ok(_), Some(l)) if secs > *l => Err(format!("took {:.1} s, limit {} s", secs, l)),
            (r, _) => r,
        };
        let line = match &r {
            Ok(m) => format!("PASS {:>2} {} ({:.1} s): {}", i + 1, name, secs, m),
            Err(m) => format!("FAIL {:>2} {} ({:.1} s): {}", i + 1, name, secs, m),
        };
        // written to the raw stream so the lines show without --nocapture
        let _ = writeln!(std::io::stderr(), "{}", line);
        if r.is_err() {
            failed.push(line);
        }
    }
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}

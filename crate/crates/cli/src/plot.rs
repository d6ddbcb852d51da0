//! SVG drawings of sets and decompositions in one or two variables.
//!
//! Sets over Q are rasterised with a relaxed evaluator: equations hold within a pixel-sized
//! band, so curves and points stay visible. Output depends only on the input formulas.

use std::fmt::Write;

use stpart::alg_eps::Ext;
use stpart::formula::{Formula, Rel, SaFormula};
use stpart::good::GoodDecomposition;
use stpart::st::Piece;

const SIZE: f64 = 400.0;
const MARGIN: f64 = 30.0;
const GRID: usize = 100;

fn fmt_f(x: f64) -> String {
    let s = format!("{:.2}", x);
    if s == "-0.00" {
        String::from("0.00")
    } else {
        s
    }
}

fn relaxed(f: &Formula, x: &[f64], tol: f64) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a, r, b) => {
            let p = a.sub(b);
            let v = p.eval_f64(x);
            let grad: f64 = (1..x.len()).map(|i| p.derivative(i).eval_f64(x).abs()).sum();
            let t = tol * (grad + tol);
            match r {
                Rel::Eq => v.abs() <= t,
                Rel::Ne => v.abs() > t,
                Rel::Lt => v < 0.0,
                Rel::Le => v <= t,
                Rel::Gt => v > 0.0,
                Rel::Ge => v >= -t,
            }
        }
        Formula::Not(g) => !relaxed(g, x, tol),
        Formula::And(gs) => gs.iter().all(|g| relaxed(g, x, tol)),
        Formula::Or(gs) => gs.iter().any(|g| relaxed(g, x, tol)),
        Formula::Exists(..) | Formula::Forall(..) => false,
    }
}

struct Canvas {
    lo: f64,
    hi: f64,
    body: String,
}

impl Canvas {
    fn new(lo: f64, hi: f64, dims: usize) -> Self {
        let mut c = Canvas { lo, hi, body: String::new() };
        let (a, b) = (c.sx(lo), c.sx(hi));
        let _ = writeln!(c.body, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#999\"/>", fmt_f(a), fmt_f(MARGIN), fmt_f(b - a), fmt_f(SIZE));
        if dims == 2 {
            let y0 = c.sy(0.0);
            let _ = writeln!(c.body, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\"/>", fmt_f(a), fmt_f(y0), fmt_f(b), fmt_f(y0));
        }
        let x0 = c.sx(0.0);
        let _ = writeln!(c.body, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#999\"/>", fmt_f(x0), fmt_f(MARGIN), fmt_f(x0), fmt_f(MARGIN + SIZE));
        let _ = writeln!(c.body, "<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>", fmt_f(a), fmt_f(MARGIN + SIZE + 14.0), fmt_f(lo));
        let _ = writeln!(c.body, "<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>", fmt_f(b), fmt_f(MARGIN + SIZE + 14.0), fmt_f(hi));
        c
    }

    fn sx(&self, x: f64) -> f64 {
        MARGIN + (x - self.lo) / (self.hi - self.lo) * SIZE
    }

    fn sy(&self, y: f64) -> f64 {
        MARGIN + (self.hi - y) / (self.hi - self.lo) * SIZE
    }

    fn finish(self) -> String {
        let w = SIZE + 2.0 * MARGIN;
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n{}</svg>\n",
            self.body,
            w = w,
            h = w + 10.0
        )
    }

    /// Fill the pixels where the quantifier-free formula holds, merging runs along rows.
    fn raster(&mut self, f: &SaFormula, fill: &str, opacity: f64) {
        let step = (self.hi - self.lo) / GRID as f64;
        let px = SIZE / GRID as f64;
        let mut g = String::new();
        for j in 0..GRID {
            let y = self.hi - (j as f64 + 0.5) * step;
            let mut run: Option<usize> = None;
            for i in 0..=GRID {
                let hit = i < GRID && {
                    let x = self.lo + (i as f64 + 0.5) * step;
                    relaxed(&f.body, &[0.0, x, y], step * 0.5)
                };
                match (hit, run) {
                    (true, None) => run = Some(i),
                    (false, Some(s)) => {
                        let _ = writeln!(g, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>", fmt_f(MARGIN + s as f64 * px), fmt_f(MARGIN + j as f64 * px), fmt_f((i - s) as f64 * px), fmt_f(px));
                        run = None;
                    }
                    _ => {}
                }
            }
        }
        if !g.is_empty() {
            let _ = write!(self.body, "<g fill=\"{}\" fill-opacity=\"{}\">\n{}</g>\n", fill, opacity, g);
        }
    }
}

fn ext_f(e: &Ext, lo: f64, hi: f64) -> f64 {
    match e {
        Ext::NegInf => lo,
        Ext::PosInf => hi,
        Ext::Fin(c) => c.approx().clamp(lo, hi),
    }
}

fn colour(types: &[u8]) -> &'static str {
    match types {
        [1] => "#1f77b4",
        [0] => "#000000",
        [1, 1] => "#cfe3f7",
        [1, 0] => "#1f77b4",
        [0, 1] => "#d62728",
        _ => "#000000",
    }
}

fn view(pieces: &[&Piece]) -> (f64, f64) {
    let m = pieces
        .iter()
        .flat_map(|p| [&p.lo, &p.hi])
        .filter_map(|e| if let Ext::Fin(c) = e { Some(c.approx().abs()) } else { None })
        .fold(1.0f64, f64::max);
    let r = (m * 1.25 * 4.0).ceil() / 4.0;
    (-r, r)
}

/// Drawing of st-sets given as explicit pieces on the line.
pub fn plot_line(sets: &[Vec<Piece>]) -> String {
    let all: Vec<&Piece> = sets.iter().flatten().collect();
    let (lo, hi) = view(&all);
    let mut c = Canvas::new(lo, hi, 1);
    for (k, ps) in sets.iter().enumerate() {
        let y = MARGIN + SIZE / 2.0 + 12.0 * k as f64;
        for p in ps {
            let (a, b) = (c.sx(ext_f(&p.lo, lo, hi)), c.sx(ext_f(&p.hi, lo, hi)));
            if p.is_point() {
                let _ = writeln!(c.body, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#1f77b4\"/>", fmt_f(a), fmt_f(y));
            } else {
                let _ = writeln!(c.body, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#1f77b4\" stroke-width=\"3\"/>", fmt_f(a), fmt_f(y), fmt_f(b), fmt_f(y));
            }
        }
    }
    c.finish()
}

/// Drawing of quantifier-free sets in the plane over [-r, r]^2.
pub fn plot_plane(sets: &[SaFormula], r: f64) -> String {
    let mut c = Canvas::new(-r, r, 2);
    for s in sets {
        c.raster(s, "#1f77b4", 0.6);
    }
    c.finish()
}

/// Cells coloured by type vector; higher-dimensional cells first, st-sets outlined on top.
pub fn plot_decomposition(d: &GoodDecomposition) -> String {
    let r = 1.25;
    let mut c = Canvas::new(-r, r, d.n);
    let mut order: Vec<usize> = (0..d.cells.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(d.cells[i].types.iter().map(|&t| t as usize).sum::<usize>()));
    for i in order {
        let cell = &d.cells[i];
        if d.n == 1 {
            let f = &cell.region;
            let step = (c.hi - c.lo) / (4 * GRID) as f64;
            let y = MARGIN + SIZE / 2.0;
            let xs: Vec<f64> = (0..4 * GRID).map(|k| c.lo + (k as f64 + 0.5) * step).filter(|&x| relaxed(&f.body, &[0.0, x], step * 0.5)).collect();
            if cell.types == [0] {
                if let Some(x) = xs.get(xs.len() / 2) {
                    let _ = writeln!(c.body, "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>", fmt_f(c.sx(*x)), fmt_f(y), colour(&cell.types));
                }
            } else if let (Some(a), Some(b)) = (xs.first(), xs.last()) {
                let _ = writeln!(c.body, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>", fmt_f(c.sx(*a)), fmt_f(y), fmt_f(c.sx(*b)), fmt_f(y), colour(&cell.types));
            }
        } else {
            c.raster(&cell.region, colour(&cell.types), 1.0);
        }
    }
    if d.n == 2 {
        for s in &d.st_sets {
            c.raster(s, "#ff7f0e", 0.35);
        }
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use stpart::ctx::Ctx;
    use stpart::st::st_set;

    #[test]
    fn segment_plot() {
        let x = crate::parse::parse_formula("0 <= x & x <= 1").unwrap();
        let s = st_set(&x, &Ctx::default()).unwrap();
        let svg = plot_line(&[s.pieces.unwrap()]);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<line").count(), 2);
    }

    #[test]
    fn empty_set_has_axes_only() {
        let x = crate::parse::parse_formula("x^2 + y^2 < 0").unwrap();
        let svg = plot_plane(&[x], 1.25);
        assert!(!svg.contains("<g "));
        assert!(svg.contains("<line"));
    }

    #[test]
    fn wedge_decomposition_plot() {
        let x = crate::parse::parse_formula("0 < y & y < eps*x & x < 1").unwrap();
        let d = stpart::good::good_decomposition_box(&[x], None, &Ctx::default()).unwrap();
        let svg = plot_decomposition(&d);
        let again = plot_decomposition(&d);
        assert_eq!(svg, again);
        // open cells, graphs and vertical segments all appear
        for col in ["#cfe3f7", "#1f77b4", "#d62728"] {
            assert!(svg.contains(col), "{}", col);
        }
    }
}

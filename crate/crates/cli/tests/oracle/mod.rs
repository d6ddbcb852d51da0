//! Floating-point oracles, independent of the exact engine: fibers of quantifier-free sets at a
//! fixed eps value, grid rasters, exact Euclidean distance transforms, stratified Monte Carlo.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stpart::formula::{Formula, Rel};
use stpart::mpoly::MPoly;
use stpart::rat::to_f64;

/// A polynomial as (coefficient, exponent vector) terms.
#[derive(Clone, Debug)]
pub struct Poly(Vec<(f64, Vec<i32>)>);

impl Poly {
    pub fn new(p: &MPoly) -> Self {
        let nv = p.nvars();
        Poly(p.t.iter().map(|(m, c)| (to_f64(c), (0..nv).map(|i| m.exp(i) as i32).collect())).collect())
    }

    fn sign(&self, x: &[f64]) -> i32 {
        let (v, m) = self.0.iter().fold((0.0, 0.0), |(v, m), (c, e)| {
            let t = e.iter().enumerate().fold(*c, |a, (i, &k)| if k == 0 { a } else { a * x[i].powi(k) });
            (v + t, m + t.abs())
        });
        if v.abs() <= 1e-10 * m {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    }

    /// Coefficients (low to high) in slot v, with the other slots fixed by `at`.
    fn univariate(&self, v: usize, at: &[f64]) -> Vec<f64> {
        let mut cs: Vec<f64> = Vec::new();
        for (c, e) in &self.0 {
            let x = e.iter().enumerate().fold(*c, |a, (i, &k)| if i == v || k == 0 { a } else { a * at[i].powi(k) });
            let k = e.get(v).copied().unwrap_or(0) as usize;
            if cs.len() <= k {
                cs.resize(k + 1, 0.0);
            }
            cs[k] += x;
        }
        while cs.last() == Some(&0.0) {
            cs.pop();
        }
        cs
    }
}

/// A quantifier-free formula with f64 atoms.
#[derive(Clone, Debug)]
pub enum Set {
    Const(bool),
    Atom(usize, Rel),
    Not(Box<Set>),
    And(Vec<Set>),
    Or(Vec<Set>),
}

/// Compiled formula: the tree plus its atom polynomials.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub tree: Set,
    pub polys: Vec<Poly>,
}

impl Compiled {
    pub fn new(f: &Formula) -> Self {
        let mut polys = Vec::new();
        let tree = compile(f, &mut polys);
        Compiled { tree, polys }
    }

    /// Truth at x (x[0] is the eps value); values within rounding of zero count as zero.
    pub fn holds(&self, x: &[f64]) -> bool {
        eval(&self.tree, &self.polys, x)
    }
}

fn compile(f: &Formula, polys: &mut Vec<Poly>) -> Set {
    match f {
        Formula::True => Set::Const(true),
        Formula::False => Set::Const(false),
        Formula::Atom(a, r, b) => {
            polys.push(Poly::new(&a.sub(b)));
            Set::Atom(polys.len() - 1, *r)
        }
        Formula::Not(g) => Set::Not(Box::new(compile(g, polys))),
        Formula::And(gs) => Set::And(gs.iter().map(|g| compile(g, polys)).collect()),
        Formula::Or(gs) => Set::Or(gs.iter().map(|g| compile(g, polys)).collect()),
        Formula::Exists(..) | Formula::Forall(..) => panic!("oracle needs a quantifier-free formula"),
    }
}

fn eval(s: &Set, polys: &[Poly], x: &[f64]) -> bool {
    match s {
        Set::Const(b) => *b,
        Set::Atom(i, r) => {
            let s = polys[*i].sign(x);
            match r {
                Rel::Lt => s < 0,
                Rel::Le => s <= 0,
                Rel::Eq => s == 0,
                Rel::Ne => s != 0,
                Rel::Ge => s >= 0,
                Rel::Gt => s > 0,
            }
        }
        Set::Not(g) => !eval(g, polys, x),
        Set::And(gs) => gs.iter().all(|g| eval(g, polys, x)),
        Set::Or(gs) => gs.iter().any(|g| eval(g, polys, x)),
    }
}

fn horner(cs: &[f64], x: f64) -> f64 {
    cs.iter().rev().fold(0.0, |a, &c| a * x + c)
}

fn magnitude(cs: &[f64], x: f64) -> f64 {
    cs.iter().rev().fold(0.0, |a, &c| a * x.abs() + c.abs())
}

/// Real roots of the polynomial in [lo, hi], by splitting at critical points and bisecting.
pub fn real_roots(cs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    match cs.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -cs[0] / cs[1];
            return if lo <= r && r <= hi { vec![r] } else { Vec::new() };
        }
        _ => {}
    }
    let d: Vec<f64> = cs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect();
    let mut cuts = vec![lo];
    cuts.extend(real_roots(&d, lo, hi));
    cuts.push(hi);
    let zero = |x: f64| horner(cs, x).abs() <= 1e-12 * magnitude(cs, x);
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        if zero(a) {
            out.push(a);
            continue;
        }
        let (fa, fb) = (horner(cs, a), horner(cs, b));
        if fa.signum() * fb.signum() < 0.0 {
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if horner(cs, m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
    }
    if zero(hi) {
        out.push(hi);
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-13 * (1.0 + b.abs()));
    out
}

/// Square grid over [lo, hi]^n with spacing h.
#[derive(Clone, Copy, Debug)]
pub struct Grid {
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
}

impl Grid {
    pub fn new(n: usize, lo: f64, hi: f64, h: f64) -> Self {
        Grid { n, lo, hi, h }
    }

    pub fn side(&self) -> usize {
        ((self.hi - self.lo) / self.h).round() as usize + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.n as u32)
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.h
    }

    fn index(&self, x: f64) -> Option<usize> {
        let k = ((x - self.lo) / self.h).round();
        if k < 0.0 || k as usize >= self.side() {
            None
        } else {
            Some(k as usize)
        }
    }
}

/// The fiber of the set along slot v: its points and open intervals inside the window.
pub fn fiber(f: &Compiled, v: usize, at: &[f64], lo: f64, hi: f64) -> (Vec<f64>, Vec<(f64, f64)>) {
    let mut cuts = vec![lo, hi];
    for p in &f.polys {
        cuts.extend(real_roots(&p.univariate(v, at), lo, hi));
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut x = at.to_vec();
    let mut pts = Vec::new();
    let mut ivs = Vec::new();
    for (k, &c) in cuts.iter().enumerate() {
        x[v] = c;
        if f.holds(&x) {
            pts.push(c);
        }
        if let Some(&d) = cuts.get(k + 1) {
            x[v] = 0.5 * (c + d);
            if f.holds(&x) {
                ivs.push((c, d));
            }
        }
    }
    (pts, ivs)
}

/// Raster of the set {x : f(e, x)} in the grid: exact fibers along every grid line, snapped
/// to the nearest grid point in the fiber direction.
pub fn raster(f: &Formula, e: f64, g: &Grid) -> Vec<bool> {
    let f = Compiled::new(f);
    let s = g.side();
    let mut mask = vec![false; g.len()];
    let dirs: Vec<usize> = (1..=g.n).collect();
    for &v in &dirs {
        let lines = if g.n == 1 { 1 } else { s };
        for line in 0..lines {
            let mut at = vec![e; g.n + 1];
            if g.n == 2 {
                let other = 3 - v;
                at[other] = g.coord(line);
            }
            let (pts, ivs) = fiber(&f, v, &at, g.lo, g.hi);
            let mut mark = |k: usize| {
                let idx = if g.n == 1 {
                    k
                } else if v == 1 {
                    line * s + k
                } else {
                    k * s + line
                };
                mask[idx] = true;
            };
            for p in pts {
                if let Some(k) = g.index(p) {
                    mark(k);
                }
            }
            for (a, b) in ivs {
                let first = ((a - g.lo) / g.h).ceil().max(0.0) as usize;
                let last = (((b - g.lo) / g.h).floor() as usize).min(s - 1);
                if first > last {
                    if let Some(k) = g.index(0.5 * (a + b)) {
                        mark(k);
                    }
                } else {
                    (first..=last).for_each(&mut mark);
                }
            }
        }
    }
    mask
}

const FAR: f64 = 1e20;

/// Squared distance transform of one line (Felzenszwalb and Huttenlocher).
fn dt1(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let f: Vec<f64> = f.iter().map(|&x| x.min(FAR)).collect();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let sq = |q: usize| (q * q) as f64;
    for q in 1..n {
        let mut s = ((f[q] + sq(q)) - (f[v[k]] + sq(v[k]))) / (2.0 * (q - v[k]) as f64);
        while s <= z[k] {
            k -= 1;
            s = ((f[q] + sq(q)) - (f[v[k]] + sq(v[k]))) / (2.0 * (q - v[k]) as f64);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    (0..n)
        .map(|q| {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let d = q as f64 - v[k] as f64;
            d * d + f[v[k]]
        })
        .collect()
}

/// Exact squared Euclidean distance (in grid units) to the nearest marked point.
pub fn edt(mask: &[bool], g: &Grid) -> Vec<f64> {
    let s = g.side();
    let init: Vec<f64> = mask.iter().map(|&b| if b { 0.0 } else { FAR }).collect();
    if g.n == 1 {
        return dt1(&init);
    }
    let mut d = init;
    for r in 0..s {
        let row = dt1(&d[r * s..(r + 1) * s]);
        d[r * s..(r + 1) * s].copy_from_slice(&row);
    }
    for c in 0..s {
        let col: Vec<f64> = (0..s).map(|r| d[r * s + c]).collect();
        for (r, x) in dt1(&col).into_iter().enumerate() {
            d[r * s + c] = x;
        }
    }
    d
}

/// Hausdorff distance between two rasters; None when exactly one of them is empty.
pub fn hausdorff(a: &[bool], b: &[bool], g: &Grid) -> Option<f64> {
    let (ea, eb) = (!a.iter().any(|&x| x), !b.iter().any(|&x| x));
    if ea || eb {
        return if ea && eb { Some(0.0) } else { None };
    }
    let one_sided = |from: &[bool], to: &[bool]| {
        let d = edt(to, g);
        from.iter().zip(&d).filter(|(&m, _)| m).map(|(_, &x)| x).fold(0.0f64, f64::max)
    };
    Some(one_sided(a, b).max(one_sided(b, a)).sqrt() * g.h)
}

/// Number of 8-connected components of a raster.
pub fn components(mask: &[bool], g: &Grid) -> usize {
    let s = g.side();
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            let (r, c) = if g.n == 1 { (0, i) } else { (i / s, i % s) };
            let rows: Vec<i64> = if g.n == 1 { vec![0] } else { vec![-1, 0, 1] };
            for dr in rows {
                for dc in [-1i64, 0, 1] {
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nc as usize >= s || (g.n == 2 && nr as usize >= s) {
                        continue;
                    }
                    let j = nr as usize * s + nc as usize;
                    if mask[j] && !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

/// Stratified Monte Carlo estimate of the volume of {x : f(e, x)} inside [lo, hi]^n,
/// one uniform point per cell of a grid with `per_side` cells per axis.
pub fn monte_carlo(f: &Formula, e: f64, n: usize, lo: f64, hi: f64, per_side: usize, seed: u64) -> f64 {
    let f = Compiled::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = (hi - lo) / per_side as f64;
    let cells = per_side.pow(n as u32);
    let mut hits = 0usize;
    let mut x = vec![e; n + 1];
    for k in 0..cells {
        let mut q = k;
        for slot in x.iter_mut().skip(1) {
            let i = q % per_side;
            q /= per_side;
            *slot = lo + (i as f64 + rng.gen::<f64>()) * w;
        }
        if f.holds(&x) {
            hits += 1;
        }
    }
    hits as f64 / cells as f64 * (hi - lo).powi(n as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_cubic() {
        // (x - 1)(x + 2)(x - 1/2)
        let r = real_roots(&[1.0, -2.5, 0.5, 1.0], -5.0, 5.0);
        assert_eq!(r.len(), 3);
        for (a, b) in r.iter().zip([-2.0, 0.5, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        // double root
        assert_eq!(real_roots(&[1.0, -2.0, 1.0], -5.0, 5.0).len(), 1);
    }

    #[test]
    fn distance_transform_matches_brute_force() {
        let g = Grid::new(2, 0.0, 1.0, 0.1);
        let mut m = vec![false; g.len()];
        m[3] = true;
        m[7 * 11 + 9] = true;
        let d = edt(&m, &g);
        for (i, &got) in d.iter().enumerate() {
            let (r, c) = ((i / 11) as f64, (i % 11) as f64);
            let want = [(0.0, 3.0), (7.0, 9.0)].iter().map(|(a, b)| (r - a).powi(2) + (c - b).powi(2)).fold(f64::INFINITY, f64::min);
            assert_eq!(got, want);
        }
    }
}

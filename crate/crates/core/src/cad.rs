//! Cylindrical algebraic decomposition with Collins-style projection.
//!
//! Variable 0 is the infinitesimal parameter. Its line is never decomposed: the base is the
//! single sector (0, r) where r is the least positive root of the level-0 projection factors,
//! sampled at a dyadic e0 inside it. Truth over every cell at e0 equals truth at eps.

use crate::algebraic::{bisect, compare_coords, roots_at, sign_at, strip, Coord};
use crate::mpoly::{coprime_basis, MPoly};
use crate::rat::{ri, simplest_between, two_pow, Rat};
use crate::resultant::psc;
use crate::upoly::{chain_count, Bound};
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Zero;

#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    /// levels[k]: factors whose main variable is k.
    pub levels: Vec<Vec<MPoly>>,
}

fn reducta(f: &MPoly, v: usize) -> Vec<MPoly> {
    let mut out = Vec::new();
    let mut cs = f.coeffs(v);
    while cs.len() >= 2 {
        let g = MPoly::from_coeffs(v, &cs);
        let lc_const = cs.last().unwrap().is_const();
        out.push(g);
        if lc_const {
            break;
        }
        cs.pop();
        while cs.last().is_some_and(|c| c.is_zero()) {
            cs.pop();
        }
    }
    out
}

/// Collins projection of a level set with main variable v.
pub fn project_level(fs: &[MPoly], v: usize) -> Vec<MPoly> {
    let mut out = Vec::new();
    let red: Vec<Vec<MPoly>> = fs.iter().map(|f| reducta(f, v)).collect();
    for (f, rs) in fs.iter().zip(&red) {
        for c in f.coeffs(v) {
            out.push(c);
        }
        for r in rs {
            let d = r.deg(v) as usize;
            if d >= 2 {
                let dr = r.derivative(v);
                for j in 0..d - 1 {
                    out.push(psc(r, &dr, v, j));
                }
            }
        }
    }
    for i in 0..fs.len() {
        for k in i + 1..fs.len() {
            for r in &red[i] {
                for s in &red[k] {
                    let m = r.deg(v).min(s.deg(v)) as usize;
                    for j in 0..m {
                        out.push(psc(r, s, v, j));
                    }
                }
            }
        }
    }
    out.retain(|p| !p.is_const());
    out
}

fn with_derivatives(fs: &[MPoly], v: usize) -> Vec<MPoly> {
    let mut out = Vec::new();
    for f in fs {
        let mut g = f.clone();
        while !g.is_const() {
            out.push(g.clone());
            if g.deg(v) == 0 {
                break;
            }
            g = g.derivative(v);
        }
    }
    out
}

/// Project `polys` (variables 0..nvars) down to level 0.
/// Levels 1..=closure_upto are closed under differentiation in their main variable.
pub fn project(polys: &[MPoly], nvars: usize, closure_upto: usize) -> Projection {
    let mut levels: Vec<Vec<MPoly>> = vec![Vec::new(); nvars];
    for f in coprime_basis(polys) {
        if let Some(v) = f.main_var() {
            levels[v].push(f);
        }
    }
    for k in (0..nvars).rev() {
        let mut fs = levels[k].clone();
        if k >= 1 && k <= closure_upto {
            let ds = with_derivatives(&fs, k);
            let mut by: Vec<MPoly> = Vec::new();
            for d in coprime_basis(&ds) {
                match d.main_var() {
                    Some(v) if v == k => by.push(d),
                    Some(v) => levels[v].push(d),
                    None => {}
                }
            }
            fs = by;
        }
        fs = coprime_basis(&fs);
        levels[k] = fs.clone();
        if k == 0 {
            break;
        }
        let pr = project_level(&fs, k);
        for p in coprime_basis(&pr) {
            if let Some(v) = p.main_var() {
                levels[v].push(p);
            }
        }
        for j in 0..k {
            levels[j] = coprime_basis(&levels[j]);
        }
    }
    Projection { levels }
}

/// Dyadic e0 = 2^-k strictly below every positive root of the level-0 factors.
pub fn choose_e0(level0: &[MPoly]) -> Rat {
    let mut k = 1;
    'outer: loop {
        let e0 = two_pow(-k);
        for f in level0 {
            let u = f.to_upoly(0).expect("level-0 factor is univariate");
            let ch = u.sturm_chain();
            if u.eval(&e0).is_zero() || chain_count(&ch, &Bound::At(Rat::zero()), &Bound::At(e0.clone())) > 0 {
                k += 1;
                continue 'outer;
            }
        }
        return e0;
    }
}

#[derive(Clone, Debug)]
pub struct Cell {
    /// Index per level 1..=k: even = sector, odd = section.
    pub index: Vec<usize>,
    /// Coordinates for levels 0..=k (coordinate 0 is e0).
    pub sample: Vec<Coord>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

impl Cell {
    pub fn dim(&self) -> usize {
        self.index.iter().filter(|&&i| i % 2 == 0).count()
    }
}

#[derive(Clone, Debug)]
pub struct Cad {
    pub nvars: usize,
    pub proj: Projection,
    /// cells[k] are the cells over levels 0..=k; cells[0] is the single base cell.
    pub cells: Vec<Vec<Cell>>,
}

fn upper(pt: &[Coord], c: &Coord) -> Rat {
    let _ = pt;
    c.interval().1
}

fn lower(c: &Coord) -> Rat {
    c.interval().0
}

fn refine_one(prefix: &[Coord], c: &mut Coord) {
    let mut t: Vec<Coord> = prefix.to_vec();
    t.push(c.clone());
    let n = t.len() - 1;
    bisect(&mut t, n);
    *c = t.pop().unwrap();
}

/// Sample coordinates of the stack over `pt` for the factors at level k (ascending, sectors and sections alternate).
pub fn stack(pt: &mut [Coord], factors: &[MPoly], k: usize) -> Vec<Coord> {
    let mut roots: Vec<Coord> = Vec::new();
    for f in factors {
        let s = strip(pt, f, k);
        if s.is_zero() || s.deg(k) == 0 {
            continue;
        }
        for mut r in roots_at(pt, &s, k) {
            let mut pos = roots.len();
            let mut dup = false;
            for (i, e) in roots.iter_mut().enumerate() {
                let c = compare_coords(pt, &mut r, e);
                if c == 0 {
                    dup = true;
                    break;
                }
                if c < 0 {
                    pos = i;
                    break;
                }
            }
            if !dup {
                roots.insert(pos, r);
            }
        }
    }
    let mut out = Vec::with_capacity(2 * roots.len() + 1);
    if roots.is_empty() {
        out.push(Coord::Rat(Rat::zero()));
        return out;
    }
    out.push(Coord::Rat(lower(&roots[0]).floor() - ri(1)));
    for i in 0..roots.len() {
        out.push(roots[i].clone());
        if i + 1 < roots.len() {
            loop {
                let a = upper(pt, &roots[i]);
                let b = lower(&roots[i + 1]);
                if a < b {
                    out.push(Coord::Rat(simplest_between(&a, &b)));
                    break;
                }
                let (l, r) = roots.split_at_mut(i + 1);
                refine_one(pt, &mut l[i]);
                refine_one(pt, &mut r[0]);
                *out.last_mut().unwrap() = l[i].clone();
            }
        }
    }
    out.push(Coord::Rat(upper(pt, roots.last().unwrap()).ceil() + ri(1)));
    out
}

impl Cad {
    /// Project and lift levels 1..=lift_levels eagerly.
    pub fn build(polys: &[MPoly], nvars: usize, lift_levels: usize, closure_upto: usize) -> Cad {
        let proj = project(polys, nvars, closure_upto);
        let e0 = choose_e0(&proj.levels[0]);
        let base = Cell { index: Vec::new(), sample: vec![Coord::Rat(e0)], children: Vec::new(), parent: None };
        let mut cad = Cad { nvars, proj, cells: vec![vec![base]] };
        for k in 1..=lift_levels.min(nvars.saturating_sub(1)) {
            let mut next: Vec<Cell> = Vec::new();
            let prev_len = cad.cells[k - 1].len();
            for ci in 0..prev_len {
                let mut pt = cad.cells[k - 1][ci].sample.clone();
                let st = stack(&mut pt, &cad.proj.levels[k], k);
                cad.cells[k - 1][ci].sample = pt.clone();
                let mut kids = Vec::with_capacity(st.len());
                for (j, c) in st.into_iter().enumerate() {
                    let mut idx = cad.cells[k - 1][ci].index.clone();
                    idx.push(j);
                    let mut s = pt.clone();
                    s.push(c);
                    kids.push(next.len());
                    next.push(Cell { index: idx, sample: s, children: Vec::new(), parent: Some(ci) });
                }
                cad.cells[k - 1][ci].children = kids;
            }
            cad.cells.push(next);
        }
        cad
    }

    pub fn e0(&self) -> Rat {
        self.cells[0][0].sample[0].as_rat().unwrap().clone()
    }

    /// Number of lifted levels beyond the base.
    pub fn depth(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn leaves(&self) -> &[Cell] {
        &self.cells[self.depth()]
    }

    /// Signs of all factors at levels 1..=k at the sample of a cell on level k.
    pub fn sign_vector(&mut self, k: usize, ci: usize) -> Vec<i8> {
        let mut pt = self.cells[k][ci].sample.clone();
        let mut out = Vec::new();
        for j in 1..=k {
            for f in &self.proj.levels[j] {
                out.push(sign_at(&mut pt[..=j], f));
            }
        }
        self.cells[k][ci].sample = pt;
        out
    }

    /// Factors at levels 1..=k in sign-vector order.
    pub fn factors_upto(&self, k: usize) -> Vec<MPoly> {
        (1..=k).flat_map(|j| self.proj.levels[j].iter().cloned()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MPoly {
        MPoly::var(i)
    }

    #[test]
    fn circle_has_13_cells() {
        let c = x(1).pow(2).add(&x(2).pow(2)).sub(&MPoly::int(1));
        let cad = Cad::build(&[c], 3, 2, 0);
        assert_eq!(cad.cells[1].len(), 5);
        assert_eq!(cad.cells[2].len(), 13);
    }

    #[test]
    fn line_three_cells() {
        let cad = Cad::build(&[x(1)], 2, 1, 0);
        assert_eq!(cad.cells[1].len(), 3);
    }

    #[test]
    fn eps_sections_infinitesimal() {
        // x^2 - eps: five cells, the two sections tend to 0
        let f = x(1).pow(2).sub(&x(0));
        let mut cad = Cad::build(&[f], 2, 1, 0);
        assert_eq!(cad.cells[1].len(), 5);
        let e0 = cad.e0();
        assert!(e0 > Rat::zero());
        let sv = cad.sign_vector(1, 1);
        assert_eq!(sv, vec![0]);
    }

    #[test]
    fn e0_below_roots() {
        // level-0 factor 8e - 1 has root 1/8
        let f = x(0).scale(&ri(8)).sub(&MPoly::int(1));
        let e0 = choose_e0(&[f]);
        assert!(e0 < crate::rat::rq(1, 8));
    }
}

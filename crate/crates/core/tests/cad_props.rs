use proptest::prelude::*;
use stpart::cad::Cad;
use stpart::ctx::Ctx;
use stpart::formula::{Formula, Rel, SaFormula};
use stpart::mpoly::MPoly;
use stpart::qe::{self, cell_formulas, eliminate_quantifiers, holds_at, project_last, sa_dim};
use stpart::rat::rq;
use stpart::Rat;

fn v(i: usize) -> MPoly {
    MPoly::var(i)
}
fn c(n: i64, d: i64) -> MPoly {
    MPoly::constant(rq(n, d))
}
fn at(p: MPoly, r: Rel) -> Formula {
    Formula::atom(p, r)
}

fn plane_polys() -> Vec<MPoly> {
    vec![v(1).pow(2).add(&v(2).pow(2)).sub(&c(1, 1)), v(2).sub(&v(1)), v(1).sub(&c(1, 2))]
}

fn plane_cells() -> (Cad, Vec<SaFormula>) {
    let mut cad = Cad::build(&plane_polys(), 3, 2, 2);
    let forms = cell_formulas(&mut cad, 2).expect("sign-definable");
    let forms = forms.into_iter().map(|f| SaFormula::new(2, f)).collect();
    (cad, forms)
}

fn coord() -> impl Strategy<Value = Rat> {
    // small denominators hit sections often
    (-8i64..=8, prop::sample::select(vec![1i64, 2, 4, 3])).prop_map(|(n, d)| rq(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn every_point_in_exactly_one_cell(x in coord(), y in coord()) {
        thread_local!(static CELLS: (Cad, Vec<SaFormula>) = plane_cells());
        CELLS.with(|(cad, forms)| {
            let e0 = cad.e0();
            let hits = forms.iter().filter(|f| holds_at(f, &[x.clone(), y.clone()], Some(&e0))).count();
            assert_eq!(hits, 1);
        });
    }
}

#[test]
fn cells_project_onto_base_cells() {
    let (mut cad, forms) = plane_cells();
    let base: Vec<SaFormula> = cell_formulas(&mut cad, 1).unwrap().into_iter().map(|f| SaFormula::new(1, f)).collect();
    for (i, cell) in cad.cells[2].iter().enumerate() {
        let p = cell.parent.unwrap();
        assert!(qe::sa_equal(&project_last(&forms[i], 1), &base[p]).unwrap());
    }
    // every base cell has cells above it
    for b in &cad.cells[1] {
        assert!(!b.children.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn elimination_preserves_truth(a in coord()) {
        // exists y (x*y = 1 + eps & y^2 < 4) with x a random rational
        thread_local!(static PAIR: (SaFormula, SaFormula) = {
            let body = Formula::Exists(2, Box::new(Formula::and2(
                at(v(1).mul(&v(2)).sub(&c(1, 1)).sub(&v(0)), Rel::Eq),
                at(v(2).pow(2).sub(&c(4, 1)), Rel::Lt),
            )));
            let f = SaFormula::new(1, body);
            let g = eliminate_quantifiers(&f, &Ctx::default()).unwrap();
            (f, g)
        });
        PAIR.with(|(f, g)| {
            assert_eq!(holds_at(f, &[a.clone()], None), holds_at(g, &[a.clone()], None));
        });
    }
}

/// Numeric dimension: growth of the number of occupied grid cells between two resolutions.
fn probe_dim(f: &Formula, n: usize, e: f64) -> i32 {
    fn eval(f: &Formula, x: &[f64], tol: f64) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a, r, b) => {
                let p = a.sub(b);
                let val = p.eval_f64(x);
                let scale = 1.0 + (1..x.len()).map(|i| p.derivative(i).eval_f64(x).abs()).sum::<f64>();
                let t = tol * scale;
                match r {
                    Rel::Eq => val.abs() <= t,
                    Rel::Ne => val.abs() > t,
                    Rel::Lt => val < 0.0,
                    Rel::Le => val <= 0.0,
                    Rel::Gt => val > 0.0,
                    Rel::Ge => val >= 0.0,
                }
            }
            Formula::Not(g) => !eval(g, x, tol),
            Formula::And(gs) => gs.iter().all(|g| eval(g, x, tol)),
            Formula::Or(gs) => gs.iter().any(|g| eval(g, x, tol)),
            _ => panic!("quantifier-free formulas only"),
        }
    }
    let count = |d: f64| {
        let k = (4.0 / d).round() as i64;
        let mut hits = 0usize;
        let mut idx = vec![0i64; n];
        loop {
            let mut x = vec![e];
            x.extend(idx.iter().map(|&i| -2.0 + (i as f64 + 0.5) * d));
            if eval(f, &x, d) {
                hits += 1;
            }
            let mut j = 0;
            loop {
                if j == n {
                    return hits;
                }
                idx[j] += 1;
                if idx[j] < k {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
        }
    };
    let (a, b) = (count(1e-1) as f64, count(1e-2) as f64);
    if b == 0.0 {
        return -1;
    }
    ((b / a).log10()).round() as i32
}

#[test]
fn dimension_matches_grid_probe() {
    let x = || v(1);
    let y = || v(2);
    let e = || v(0);
    let open = |p: MPoly, q: MPoly| Formula::and2(at(p, Rel::Gt), at(q, Rel::Lt));
    let cat: Vec<(usize, Formula)> = vec![
        (1, open(x(), x().sub(&c(1, 1)))),
        (1, at(x().sub(&c(1, 2)), Rel::Eq)),
        (1, Formula::or2(at(x(), Rel::Eq), at(x().sub(&c(1, 1)), Rel::Eq))),
        (1, at(x().pow(2).sub(&c(1, 1)).sub(&e()), Rel::Lt)),
        (1, at(x().pow(2).add(&c(1, 1)), Rel::Lt)),
        (2, at(x().pow(2).add(&y().pow(2)).sub(&c(1, 1)), Rel::Lt)),
        (2, at(x().pow(2).add(&y().pow(2)).sub(&c(1, 1)).sub(&e()), Rel::Eq)),
        (2, Formula::and2(open(x(), x().sub(&c(1, 1))), at(y().sub(&x().pow(2)), Rel::Eq))),
        (2, Formula::and2(at(x(), Rel::Eq), at(y(), Rel::Eq))),
        (2, Formula::and(vec![open(x(), x().sub(&c(1, 1))), open(y(), y().sub(&c(1, 1)))])),
        (2, at(x().mul(&y()).sub(&c(1, 2)), Rel::Eq).clone()),
        (2, Formula::and2(at(y().sub(&x()), Rel::Eq), open(x().add(&c(1, 1)), x().sub(&c(1, 1))))),
        (2, at(x().pow(2).add(&y().pow(2)).add(&e()), Rel::Le)),
        (2, Formula::and2(at(x().pow(2).add(&y().pow(2)).sub(&c(1, 1)), Rel::Le), at(y(), Rel::Ge))),
        (2, Formula::and(vec![at(y().sub(&x().pow(2)), Rel::Gt), at(y().sub(&c(1, 1)), Rel::Lt)])),
    ];
    assert_eq!(cat.len(), 15);
    for (n, f) in cat {
        let s = SaFormula::new(n, f.clone());
        assert_eq!(sa_dim(&s), probe_dim(&f, n, 1e-4), "{}", s);
    }
}

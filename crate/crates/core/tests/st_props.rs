use stpart::ctx::Ctx;
use stpart::formula::{Formula, Rel, SaFormula};
use stpart::mpoly::MPoly;
use stpart::qe::{self, product};
use stpart::rat::rq;
use stpart::st::{st_onevar, st_set};

fn v(i: usize) -> MPoly {
    MPoly::var(i)
}
fn c(n: i64, d: i64) -> MPoly {
    MPoly::constant(rq(n, d))
}
fn at(p: MPoly, r: Rel) -> Formula {
    Formula::atom(p, r)
}
fn st(f: &SaFormula) -> SaFormula {
    st_set(f, &Ctx::default()).unwrap().result
}
fn subset(a: &SaFormula, b: &SaFormula) -> bool {
    qe::sa_empty(&qe::difference(a, b).unwrap())
}

fn line_catalog() -> Vec<SaFormula> {
    let x = || v(1);
    let e = || v(0);
    vec![
        Formula::and2(at(x().sub(&e()), Rel::Gt), at(x().sub(&c(1, 1)).add(&e()), Rel::Lt)),
        at(x().pow(2).sub(&e()), Rel::Lt),
        at(x().mul(&e()).sub(&c(1, 1)), Rel::Gt),
        Formula::or2(at(x().sub(&e()), Rel::Eq), at(x().sub(&c(1, 1)), Rel::Eq)),
        Formula::and2(at(x().pow(2).sub(&c(2, 1)), Rel::Lt), at(x().sub(&e()), Rel::Ne)),
        at(x().pow(3).sub(&x()).add(&e()), Rel::Gt),
        Formula::and2(at(x(), Rel::Gt), at(x().mul(&x().sub(&c(1, 1))).add(&e()), Rel::Lt)),
    ]
    .into_iter()
    .map(|f| SaFormula::new(1, f))
    .collect()
}

fn plane_catalog() -> Vec<SaFormula> {
    let x = || v(1);
    let y = || v(2);
    let e = || v(0);
    vec![
        at(x().pow(2).add(&y().pow(2)).sub(&c(1, 1)).add(&e()), Rel::Lt),
        Formula::and(vec![at(x(), Rel::Gt), at(x().sub(&c(1, 1)), Rel::Lt), at(y(), Rel::Gt), at(y().sub(&e().mul(&x())), Rel::Lt)]),
        Formula::and2(at(x().mul(&y()).sub(&e()), Rel::Eq), Formula::and2(at(x().sub(&e()), Rel::Ge), at(x().sub(&c(1, 1)), Rel::Le))),
        at(y().sub(&x().pow(2)).sub(&e()), Rel::Eq),
    ]
    .into_iter()
    .map(|f| SaFormula::new(2, f))
    .collect()
}

#[test]
fn st_sets_are_closed() {
    // for a set S over Q, st S is its closure, so S is closed exactly when st S = S
    for x in line_catalog().iter().chain(plane_catalog().iter()) {
        let s = st(x);
        assert!(qe::sa_equal(&st(&s), &s).unwrap(), "{}", x);
    }
}

#[test]
fn st_respects_unions_intersections_and_inclusions() {
    let cat = line_catalog();
    for a in &cat {
        for b in &cat {
            let u = qe::union(a, b).unwrap();
            assert!(qe::sa_equal(&st(&u), &qe::union(&st(a), &st(b)).unwrap()).unwrap());
            let i = qe::intersection(a, b).unwrap();
            assert!(subset(&st(&i), &qe::intersection(&st(a), &st(b)).unwrap()));
            assert!(subset(&st(&i), &st(a)));
        }
    }
    let cat = plane_catalog();
    let u = qe::union(&cat[0], &cat[1]).unwrap();
    assert!(qe::sa_equal(&st(&u), &qe::union(&st(&cat[0]), &st(&cat[1])).unwrap()).unwrap());
}

#[test]
fn st_of_products() {
    let cat = line_catalog();
    let bounded = [&cat[0], &cat[1], &cat[3], &cat[6]];
    for a in bounded {
        for b in bounded {
            let p = product(a, b);
            let want = product(&st(a), &st(b));
            assert!(qe::sa_equal(&st(&p), &want).unwrap(), "{} x {}", a, b);
        }
    }
}

#[test]
fn line_and_plane_routes_agree() {
    // st(X x {0}) = st(X) x {0}, computed by the planar algorithm
    let zero = SaFormula::new(1, at(v(1), Rel::Eq));
    for x in line_catalog() {
        let one = st_onevar(&x, &Ctx::default()).unwrap();
        assert!(one.pieces.is_some());
        let lifted = st(&product(&x, &zero));
        assert!(qe::sa_equal(&lifted, &product(&one.result, &zero)).unwrap(), "{}", x);
    }
}

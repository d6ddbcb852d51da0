//! Printer and parser are inverse on canonical text.

use proptest::prelude::*;
use stpart_cli::parse::{parse_formula, parse_formula_with};

const CORPUS: [&str; 50] = [
    "0 < x & x < 1 - eps",
    "eps < x & x < 1 - eps",
    "x^2 < eps^2",
    "x^2 <= 1 + eps",
    "eps*x = 1",
    "eps*x > 1 | x < eps",
    "x^2 + y^2 < 1 + eps",
    "x*y = eps^2 & 0 < x",
    "!(x = 0)",
    "!(x < 0 | x > 1)",
    "exists y. x*y = eps & 0 < x",
    "forall y. x^2 + y^2 >= 0",
    "exists y. exists z. x = y + z & y*z = 1",
    "x != 0",
    "x >= 0 | y >= 0",
    "x <= y & y <= z",
    "true",
    "false",
    "(x < 0 | x > 1) & y = 0",
    "x < 0 | x > 1 & y = 0",
    "x^3 - 2*x + 1 = 0",
    "1/2 < x & x < 3/4",
    "-x < 1",
    "x^2 - x < 0",
    "x^2 + y^2 - 2*eps*x + eps^2 < 1",
    "2*x - 3*y + 5 > 0",
    "x^4 - eps*x^2 + eps^3 > 0",
    "!(x < 0) & !(y < 0)",
    "eps*y = x & 0 < x & x < eps",
    "x^2 - 2 + eps = 0",
    "x^3 < eps^4 & x > -1",
    "0 < y & y < eps*x & x < 1",
    "y = x^2 + eps & 0 <= x & x <= 1",
    "x^2 + eps*y^2 < 1",
    "0 < x & x < 1 & 0 < y & y < 1 & x + y > 1 + eps",
    "x^2 + y^2 = eps^2",
    "x = eps | x = 1",
    "x^2 = 1 + eps",
    "x^2 + y^2 < eps | x^2 + y^2 - 2*x + 1 < eps",
    "exists y. y^2 = x & y > 0",
    "forall y. y > 0 | y <= 0",
    "exists z. x^2 + y^2 + z^2 = 1",
    "x^2 + y^2 + z^2 <= 1 & z >= 0",
    "x*y*z = eps",
    "1/3*x + 2/5*y = 7/11",
    "!(x^2 + y^2 < 1) & x^2 + y^2 < 4",
    "x < 0 & y < 0 | x > 0 & y > 0",
    "x < y | y < z | z < x",
    "eps^2*x^2 + eps*x - 1 < 0",
    "exists y. x^2 - 2*x*y + y^2 < eps",
];

fn squash(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

#[test]
fn corpus_round_trips() {
    let mut bad = Vec::new();
    for text in CORPUS {
        let printed = parse_formula(text).unwrap_or_else(|e| panic!("{}: {}", text, e)).to_string();
        if squash(&printed) != squash(text) {
            bad.push(format!("{} -> {}", text, printed));
        }
    }
    assert!(bad.is_empty(), "not canonical:\n{}", bad.join("\n"));
}

#[test]
fn printing_is_idempotent_on_raw_input() {
    for text in ["x*(x - 1) < 0", "(x - eps)^2 + y^2 < 1", "x > 1/eps", "  x<1&y  >2 ", "!!(x = 0)", "x - eps*x < 1"] {
        let once = parse_formula(text).unwrap().to_string();
        let twice = parse_formula(&once).unwrap().to_string();
        assert_eq!(once, twice, "{}", text);
    }
}

fn poly() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        Just(String::from("x")),
        Just(String::from("y")),
        Just(String::from("eps")),
        (-5i32..6).prop_map(|k| k.to_string()),
        (1i32..6, 2i32..7).prop_map(|(a, b)| format!("{}/{}", a, b)),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({}) + ({})", a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({}) - ({})", a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({})*({})", a, b)),
            (inner, 0u32..4).prop_map(|(a, k)| format!("({})^{}", a, k)),
        ]
    })
}

fn formula() -> impl Strategy<Value = String> {
    let rel = prop_oneof![Just("<"), Just("<="), Just("="), Just("!="), Just(">="), Just(">")];
    let atom = (poly(), rel, poly()).prop_map(|(a, r, b)| format!("{} {} {}", a, r, b));
    atom.prop_recursive(3, 10, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({}) & ({})", a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({}) | ({})", a, b)),
            inner.prop_map(|a| format!("!({})", a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_of_print_is_identity(text in formula()) {
        let vars = [String::from("x"), String::from("y")];
        let f = parse_formula_with(&text, &vars).unwrap();
        let printed = f.to_string();
        let g = parse_formula_with(&printed, &vars).unwrap();
        prop_assert_eq!(g.to_string(), printed.clone());
        prop_assert_eq!(g.body, f.body);
    }
}

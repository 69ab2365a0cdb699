//! Seeded random corpora for the property tests.
#![allow(dead_code)]

use std::collections::HashMap;

use nlse_core::expr::{Context, Expr, Point, Symbol, VarKind};
use nlse_core::jet::JetSpace;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

pub const SEED: u64 = 0x6e6c_7365;

pub fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(SEED),
        failure_persistence: None,
        ..Config::default()
    }
}

pub fn context() -> Context {
    let mut ctx = Context::new().with_max_order(8);
    for n in ["t", "x"] {
        ctx.declare(n, VarKind::Independent).unwrap();
    }
    for n in ["u", "v"] {
        ctx.declare(n, VarKind::Dependent).unwrap();
    }
    for n in ["beta", "gamma", "delta"] {
        ctx.declare(n, VarKind::Parameter).unwrap();
    }
    ctx
}

pub fn space() -> JetSpace {
    JetSpace::new(&["t", "x"], &["u", "v"], 8)
}

/// Six generators for the pure polynomial corpus.
pub fn poly_generators() -> Vec<Symbol> {
    vec![
        Symbol::indep("x"),
        Symbol::indep("t"),
        Symbol::jet("u", &[]),
        Symbol::jet("v", &[]),
        Symbol::jet("u", &[("x", 1)]),
        Symbol::param("beta"),
    ]
}

/// Generators of jet order at most two.
pub fn jet_generators() -> Vec<Symbol> {
    vec![
        Symbol::indep("x"),
        Symbol::indep("t"),
        Symbol::param("gamma"),
        Symbol::jet("u", &[]),
        Symbol::jet("v", &[]),
        Symbol::jet("u", &[("x", 1)]),
        Symbol::jet("v", &[("x", 1)]),
        Symbol::jet("u", &[("t", 1)]),
        Symbol::jet("v", &[("t", 1)]),
        Symbol::jet("u", &[("x", 2)]),
        Symbol::jet("v", &[("x", 2)]),
        Symbol::jet("u", &[("t", 1), ("x", 1)]),
    ]
}

pub fn rational() -> impl Strategy<Value = Expr> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Expr::rational(n, d))
}

pub fn nonzero_rational() -> impl Strategy<Value = Expr> {
    ((1i64..=6), any::<bool>(), 1i64..=4).prop_map(|(n, neg, d)| Expr::rational(if neg { -n } else { n }, d))
}

/// A monomial as exponents over `gens`, total degree at most `max_degree`.
pub fn monomial(gens: usize, max_degree: u32) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0..gens, 0..=max_degree as usize).prop_map(move |picks| {
        let mut e = vec![0; gens];
        for p in picks {
            e[p] += 1;
        }
        e
    })
}

/// Polynomial as `(coefficient, exponents)` terms.
pub type Terms = Vec<(Expr, Vec<u32>)>;

pub fn terms(gens: usize, max_degree: u32, max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((nonzero_rational(), monomial(gens, max_degree)), 1..=max_terms)
}

pub fn term_expr(gens: &[Symbol], (c, exps): &(Expr, Vec<u32>)) -> Expr {
    let mut f = vec![c.clone()];
    for (g, &k) in gens.iter().zip(exps) {
        if k > 0 {
            f.push(Expr::pow(Expr::sym(g.clone()), i64::from(k)));
        }
    }
    Expr::mul(f)
}

pub fn flat_sum(gens: &[Symbol], t: &Terms) -> Expr {
    Expr::add(t.iter().map(|term| term_expr(gens, term)))
}

/// Random trees over `gens` built from sums, products, differences, small
/// powers and, when `trig` is set, sines and cosines.
pub fn tree(gens: Vec<Symbol>, depth: u32, trig: bool) -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => prop::sample::select(gens).prop_map(Expr::sym),
        1 => rational(),
    ];
    leaf.prop_recursive(depth, 24, 3, move |inner| {
        let mut choices: Vec<(u32, BoxedStrategy<Expr>)> = vec![
            (
                3,
                prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::add).boxed(),
            ),
            (
                3,
                prop::collection::vec(inner.clone(), 2..=3).prop_map(Expr::mul).boxed(),
            ),
            (2, (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b).boxed()),
            (1, (inner.clone(), 2i64..=3).prop_map(|(b, k)| Expr::pow(b, k)).boxed()),
        ];
        if trig {
            choices.push((1, inner.clone().prop_map(Expr::sin).boxed()));
            choices.push((1, inner.prop_map(Expr::cos).boxed()));
        }
        prop::strategy::Union::new_weighted(choices)
    })
}

pub fn random_point(gens: &[Symbol], values: &[f64]) -> Point {
    let mut p: Point = HashMap::new();
    for (g, v) in gens.iter().zip(values) {
        p.insert(g.clone(), *v);
    }
    p
}

pub fn points(gens: usize, count: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.5f64..1.5, gens), count)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

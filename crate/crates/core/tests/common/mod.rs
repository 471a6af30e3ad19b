#![allow(dead_code)]

use rand::Rng;
use sirf_core::exprfn::{BinOp, Func};
use sirf_core::scenarios::{build_constant, build_example1, build_example2, Example1Spec};
use sirf_core::{parse_expr, Expr, Model};

/// Random expression tree over `R`, `k`, `pi` and small literals.
pub fn random_expr<G: Rng>(rng: &mut G, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..4) {
            0 | 1 => Expr::Var,
            2 => Expr::Param,
            _ => Expr::Num((rng.random_range(0.25..3.0) * 100.0_f64).round() / 100.0),
        };
    }
    match rng.random_range(0..10) {
        0 => Expr::neg(random_expr(rng, depth - 1)),
        1 | 2 => {
            let f = Func::ALL[rng.random_range(0..Func::ALL.len())];
            Expr::call(f, random_expr(rng, depth - 1))
        }
        3 => {
            // small integer or simple fractional powers
            let p = [2.0, 3.0, 0.5, 1.5][rng.random_range(0..4)];
            Expr::binary(BinOp::Pow, random_expr(rng, depth - 1), Expr::Num(p))
        }
        _ => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][rng.random_range(0..4)];
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
    }
}

/// Models the equilibrium and simulation checks sweep over.
pub fn corpus() -> Vec<(String, Model<f64>)> {
    let mut out = Vec::new();
    for (n, k) in [(5, 5.0), (1, 2.0), (3, 3.0)] {
        out.push((
            format!("example1 n={n} k={k}"),
            build_example1(Example1Spec::new(n, k)).unwrap(),
        ));
    }
    for k in [2.0, 3.0, 5.0, 8.0] {
        out.push((format!("example2 k={k}"), build_example2(k).unwrap()));
    }
    for (bt, k) in [(12.0, 4.0), (10.0, 5.0), (4.0, 5.0)] {
        out.push((format!("constant {bt} k={k}"), build_constant(bt, k).unwrap()));
    }
    for (text, k) in [
        ("6*exp(-2*R)", 3.0),
        ("2 + 3*sin(pi*R)^2", 2.5),
        ("k*(1 + tanh(4*(R - 0.3)))", 4.0),
        ("1 + 8*R", 3.0),
    ] {
        out.push((
            format!("expr {text} k={k}"),
            Model::from_expr(k, parse_expr(text).unwrap()).unwrap(),
        ));
    }
    out
}

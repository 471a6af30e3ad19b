use proptest::prelude::*;

use sirf_core::equilibria::{find_endemic_equilibria, Stability, DEFAULT_BISECTION_TOL, DEFAULT_GRID_INTERVALS};
use sirf_core::exprfn::{BinOp, Func};
use sirf_core::model::g_threshold_dual;
use sirf_core::scenarios::{build_constant, build_example1, Example1Spec};
use sirf_core::simulate::{integrate_2d, integrate_3d, IntegrateOptions};
use sirf_core::{parse_expr, Dual, Expr, Model, State2, State3};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        Just(Expr::Var),
        Just(Expr::Param),
        Just(Expr::Pi),
        (0u32..10_000).prop_map(|n| Expr::Num(n as f64 / 100.0)),
        (0.0f64..1e6).prop_map(Expr::Num),
    ]
}

fn expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(5, 48, 2, |inner| {
        let op = prop_oneof![
            Just(BinOp::Add),
            Just(BinOp::Sub),
            Just(BinOp::Mul),
            Just(BinOp::Div),
            Just(BinOp::Pow)
        ];
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (proptest::sample::select(Func::ALL.to_vec()), inner.clone()).prop_map(|(f, a)| Expr::call(f, a)),
            (op, inner.clone(), inner).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let text = e.to_string();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn prefixes_never_panic(e in expr()) {
        let text = e.to_string();
        for (cut, _) in text.char_indices().skip(1) {
            let prefix = &text[..cut];
            let res = parse_expr(prefix);
            let last = prefix.trim_end().chars().last().unwrap();
            if "+-*/^(".contains(last) {
                prop_assert!(res.is_err(), "{:?} parsed", prefix);
            }
            if let Err(err) = res {
                prop_assert!(err.offset().unwrap_or(0) <= prefix.len());
            }
        }
    }

    #[test]
    fn value_matches_dual_value(e in expr(), r in 0.0f64..1.0, k in 1.01f64..10.0) {
        match (e.eval(r, k), e.eval_dual(r, k)) {
            (Ok(v), Ok(d)) => prop_assert_eq!(v, d.value),
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }

    #[test]
    fn threshold_derivative_identity(k in 1.001f64..100.0, u in 0.0f64..0.999_999) {
        let r = u * (k - 1.0) / k;
        let g = g_threshold_dual(Dual::variable(r), k).unwrap();
        let want = g.value * g.value / (k - 1.0);
        prop_assert!((g.deriv - want).abs() <= 1e-12 * want);
    }

    #[test]
    fn constant_rate_root_is_analytic(beta in 0.5f64..40.0, k in 1.05f64..10.0) {
        prop_assume!((beta - k).abs() > 1e-3);
        let m = build_constant(beta, k).unwrap();
        let eqs = find_endemic_equilibria(&m, DEFAULT_GRID_INTERVALS, DEFAULT_BISECTION_TOL).unwrap();
        if beta > k {
            prop_assert_eq!(eqs.len(), 1);
            let want = (k - 1.0) * (1.0 / k - 1.0 / beta);
            prop_assert!((eqs[0].r - want).abs() < 1e-10);
            prop_assert_eq!(eqs[0].i, eqs[0].r / (k - 1.0));
            prop_assert_eq!(eqs[0].stability, Stability::Stable);
        } else {
            prop_assert!(eqs.is_empty());
        }
    }

    #[test]
    fn classification_agrees_with_jacobian(a in 0.5f64..20.0, b in -10.0f64..40.0, k in 1.1f64..8.0) {
        let m = Model::from_expr(k, parse_expr(&format!("{a} + {b}*R^2")).unwrap()).unwrap();
        prop_assume!((0..=100).all(|j| m.f(j as f64 / 100.0).unwrap().value > 0.0));
        for e in find_endemic_equilibria(&m, DEFAULT_GRID_INTERVALS, DEFAULT_BISECTION_TOL).unwrap() {
            let d = e.diagnostics;
            prop_assert!(e.r > 0.0 && e.r < m.pole());
            prop_assert!(d.residual.unwrap() <= 1e-10);
            match e.stability {
                Stability::Stable => prop_assert!(d.trace < 0.0 && d.det > 0.0 && d.eigenvalues.is_stable()),
                Stability::Saddle => prop_assert!(d.det < 0.0 && d.eigenvalues.is_saddle()),
                _ => {}
            }
        }
    }

    #[test]
    fn trajectories_stay_in_region(i0 in 0.0f64..1.0, u in 0.0f64..=1.0, beta in 1.0f64..20.0) {
        let r0 = u * (1.0 - i0);
        let m = build_constant(beta, 3.0).unwrap();
        let opts = IntegrateOptions::default().with_stride(500);
        let tr = integrate_2d(&m, State2::new(i0, r0), 20.0, &opts).unwrap();
        for y in &tr.states {
            prop_assert!(State2::from_array(*y).in_region(1e-9));
        }
        let tr = integrate_3d(&m, State3::from(State2::new(i0, r0)), 20.0, &opts).unwrap();
        for y in &tr.states {
            prop_assert!(State3::from_array(*y).in_region(1e-9));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multistable_construction_alternates(n in 1u32..7, k in 1.5f64..8.0) {
        let spec = Example1Spec::new(n, k);
        let m = build_example1(spec).unwrap();
        let eqs = find_endemic_equilibria(&m, 8192, DEFAULT_BISECTION_TOL).unwrap();
        prop_assert_eq!(eqs.len(), 2 * n as usize);
        for (idx, knot) in spec.knots().into_iter().enumerate() {
            let e = &eqs[idx];
            prop_assert!((e.r - knot).abs() < 1e-9, "root {} at {} vs {}", idx + 1, e.r, knot);
            let want = if idx % 2 == 0 { Stability::Saddle } else { Stability::Stable };
            prop_assert_eq!(e.stability, want);
        }
        prop_assert_eq!(eqs.last().unwrap().stability, Stability::Stable);
    }
}

use geored::expr::{parse, Chart, Expr, Func, ZeroTest};
use proptest::prelude::*;

fn chart() -> Chart {
    Chart::new(&["x", "y", "z"], &[(0.5, 1.5), (-1.0, 1.0), (1.0, 2.0)]).unwrap()
}

// Generated expressions stay inside the domain of every function on the box:
// log/sqrt/division only ever see strictly positive arguments.
fn positive() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (1i64..5).prop_map(Expr::int),
        Just(Expr::var("x")),
        Just(Expr::var("z")),
        Just(Expr::constant("pi")),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::div(a, b)),
            inner.clone().prop_map(Expr::sqrt),
            (inner.clone(), 1i64..3).prop_map(|(a, k)| Expr::powi(a, k)),
            general().prop_map(|g| Expr::exp(Expr::sin(g))),
        ]
    })
}

fn general() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3i64..4).prop_map(Expr::int),
        (1i64..4, 2i64..5).prop_map(|(a, b)| Expr::ratio(a, b)),
        Just(Expr::var("x")),
        Just(Expr::var("y")),
        Just(Expr::var("z")),
    ];
    leaf.prop_recursive(3, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::add(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::mul(a, b)),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            (inner.clone(), 1i64..4).prop_map(|(a, k)| Expr::powi(a, k)),
        ]
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    prop_oneof![
        general(),
        positive(),
        (general(), positive()).prop_map(|(a, b)| Expr::div(a, b)),
        positive().prop_map(Expr::log),
        (positive(), general()).prop_map(|(a, b)| Expr::pow(a, Expr::sin(b))),
    ]
}

fn central_difference(e: &Expr, chart: &Chart, point: &[f64], k: usize, h: f64) -> f64 {
    let mut plus = point.to_vec();
    let mut minus = point.to_vec();
    plus[k] += h;
    minus[k] -= h;
    let fp = e.eval(&chart.point(&plus)).unwrap();
    let fm = e.eval(&chart.point(&minus)).unwrap();
    (fp - fm) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn derivative_matches_central_difference(e in expr()) {
        let c = chart();
        let zt = ZeroTest { samples: 16, ..ZeroTest::default() };
        for (k, v) in ["x", "y", "z"].iter().enumerate() {
            let de = e.differentiate(v);
            for p in zt.points(&c) {
                let symbolic = de.eval(&c.point(&p)).unwrap();
                let numeric = central_difference(&e, &c, &p, k, 1e-5);
                let scale = 1.0 + symbolic.abs().max(numeric.abs());
                prop_assert!(
                    (symbolic - numeric).abs() <= 1e-5 * scale,
                    "d/d{} of {}: symbolic {} vs numeric {}", v, e, symbolic, numeric
                );
            }
        }
    }

    #[test]
    fn print_then_parse_is_identity(e in expr()) {
        let printed = e.to_string();
        let reparsed = parse(&printed, &chart()).unwrap();
        prop_assert_eq!(reparsed, e);
    }

    #[test]
    fn difference_with_itself_is_zero(e in expr()) {
        let c = chart();
        prop_assert!(ZeroTest::default().is_zero(&Expr::sub(e.clone(), e), &c).unwrap());
    }

    #[test]
    fn evaluation_is_finite_inside_domain(e in expr()) {
        let c = chart();
        for p in ZeroTest::default().points(&c) {
            prop_assert!(e.eval(&c.point(&p)).unwrap().is_finite());
        }
    }
}

#[test]
fn neg_is_callable_by_name() {
    let c = chart();
    let e = parse("neg(x) + x", &c).unwrap();
    assert!(ZeroTest::default().is_zero(&e, &c).unwrap());
    assert_eq!(Func::from_name("neg"), Some(Func::Neg));
}

#[test]
fn exprs_are_send_and_sync() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<Expr>();
    assert_send_sync::<Chart>();
}

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

use weil::checks::{identity_check, zero_check};
use weil::expr::{eval, parse, simplify, Env, Expr, Func, RationalRing, Ring, SamplingPolicy};
use weil::geometry::{KForm, Patch, VectorField};
use weil::lift::LiftedPatch;
use weil::weil::{FunctionalPreset, LinearFunctional, WeilAlgebra, WeilRing};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        prop::sample::select(vec!["x", "y", "z_1"]).prop_map(Expr::var),
        (-9i64..=9, 1i64..=4).prop_map(|(n, d)| Expr::ratio(n, d)),
    ]
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.sub(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(&b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.div(&b)),
            inner.clone().prop_map(|a| a.neg()),
            (inner.clone(), -3i32..=4).prop_map(|(a, k)| a.powi(k)),
            (inner, prop::sample::select(vec![Func::Sin, Func::Cos, Func::Exp])).prop_map(|(a, f)| Expr::call(f, &a)),
        ]
    })
}

/// Polynomials in `x, y` of degree at most 3 with small integer coefficients.
fn polynomial() -> impl Strategy<Value = Expr> {
    prop::collection::vec(-4i64..=4, 10).prop_map(|cs| {
        let monos = ["1", "x", "y", "x^2", "x*y", "y^2", "x^3", "x^2*y", "x*y^2", "y^3"];
        let terms: Vec<Expr> = cs.iter().zip(monos).filter(|(c, _)| **c != 0).map(|(c, m)| Expr::int(*c).mul(&parse(m).unwrap())).collect();
        Expr::sum(&terms)
    })
}

fn algebra() -> impl Strategy<Value = WeilAlgebra> {
    prop::sample::select(vec!["dual", "jet(2)", "jet(3)", "truncated(2,2)"]).prop_map(|s| s.parse::<WeilAlgebra>().unwrap())
}

fn coeffs(l: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-6i64..=6, 1i64..=3).prop_map(|(n, d)| q(n, d)), l)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn printed_expressions_parse_back(e in expr_tree()) {
        let text = e.to_string();
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(simplify(&back), simplify(&e), "{}", text);
    }

    #[test]
    fn weil_products_are_commutative_and_associative(
        (a, xs) in algebra().prop_flat_map(|a| { let l = a.dim(); (Just(a), prop::collection::vec(coeffs(l), 3)) })
    ) {
        let (x, y, z) = (&xs[0], &xs[1], &xs[2]);
        prop_assert_eq!(a.mul_rational(x, y), a.mul_rational(y, x));
        prop_assert_eq!(a.mul_rational(&a.mul_rational(x, y), z), a.mul_rational(x, &a.mul_rational(y, z)));
        prop_assert_eq!(&a.mul_rational(&a.basis_rational(0), x), x);
    }

    #[test]
    fn evaluation_at_infinitely_near_points_is_a_homomorphism(
        f in polynomial(),
        g in polynomial(),
        (a, px, py) in algebra().prop_flat_map(|a| { let l = a.dim(); (Just(a), coeffs(l), coeffs(l)) })
    ) {
        let ring = WeilRing::new(&a, RationalRing);
        let env: Env<_> = [("x".to_string(), ring.element(px).unwrap()), ("y".to_string(), ring.element(py).unwrap())].into_iter().collect();
        let (fv, gv) = (eval(&f, &env, &ring).unwrap(), eval(&g, &env, &ring).unwrap());
        prop_assert_eq!(eval(&f.mul(&g), &env, &ring).unwrap(), ring.mul(&fv, &gv));
        prop_assert_eq!(eval(&f.add(&g), &env, &ring).unwrap(), ring.add(&fv, &gv));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(f in polynomial(), g in polynomial()) {
        let p = Patch::new(&["x", "y", "z"]).unwrap();
        let w = KForm::from_terms(&p, 1, [(vec![0], f), (vec![2], g.mul(&Expr::var("z").exp()))]).unwrap();
        let dd = w.d().unwrap().d().unwrap();
        prop_assert!(zero_check("dd", &dd.coefficients(), &SamplingPolicy::default()).passed());
    }

    #[test]
    fn lifting_commutes_with_d(f in polynomial(), g in polynomial(), preset in prop::sample::select(FunctionalPreset::ALL.to_vec())) {
        let p = Patch::new(&["x", "y"]).unwrap();
        let a = WeilAlgebra::dual();
        let lp = LiftedPatch::new(&p, &a).unwrap();
        let lam = LinearFunctional::preset(&a, preset);
        let w = KForm::from_terms(&p, 1, [(vec![0], f), (vec![1], g)]).unwrap();
        let lhs = lp.lift_form(&w, &lam).unwrap().d().unwrap();
        let rhs = lp.lift_form(&w.d().unwrap(), &lam).unwrap();
        prop_assert!(zero_check("d commutes", &lhs.sub(&rhs).unwrap().coefficients(), &SamplingPolicy::default()).passed());
    }

    #[test]
    fn lifted_fields_project_to_the_base(f in polynomial(), g in polynomial()) {
        let p = Patch::new(&["x", "y"]).unwrap();
        let lp = LiftedPatch::new(&p, &WeilAlgebra::jet(2).unwrap()).unwrap();
        let x = VectorField::new(&p, vec![f, g]).unwrap();
        let down = lp.projection_pushforward(&lp.lift_vector_field(&x).unwrap()).unwrap();
        let pairs: Vec<_> = down.comps().iter().cloned().zip(x.comps().iter().cloned()).collect();
        prop_assert!(identity_check("projects", &pairs, &SamplingPolicy::default()).passed());
    }
}

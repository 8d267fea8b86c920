//! Property tests for the algebraic substrate, plus the finite-difference
//! oracle for derivatives of power sums.

use proptest::prelude::*;
use psd::polyring::{
    monomial_count, monomial_rank, monomial_unrank, rank_sorted, sym, tensor_apply, DenseTensor,
    MonomialIndex, MultisetIter, Poly, RestrictionMap, SymTensor,
};

fn sorted_multiset(n: usize, degree: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, degree).prop_map(|mut v| {
        v.sort_unstable();
        v
    })
}

fn poly_strategy(n: usize, degree: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(-10.0f64..10.0, monomial_count(n, degree))
        .prop_map(move |coeffs| Poly::new(n, degree, coeffs).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_unrank_bijection(ms in sorted_multiset(6, 4)) {
        let idx = MonomialIndex::from_sorted(ms.clone());
        let rank = monomial_rank(&idx, 6).unwrap();
        prop_assert!(rank < monomial_count(6, 4));
        let back = monomial_unrank(6, 4, rank);
        prop_assert_eq!(back.entries(), &ms[..]);
    }

    #[test]
    fn rank_respects_lex_order(a in sorted_multiset(5, 3), b in sorted_multiset(5, 3)) {
        let ra = rank_sorted(5, &a);
        let rb = rank_sorted(5, &b);
        prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
    }

    #[test]
    fn inner_product_is_bilinear(
        p in poly_strategy(4, 2),
        q in poly_strategy(4, 2),
        r in poly_strategy(4, 2),
        s in -5.0f64..5.0,
    ) {
        let lhs = p.add(&q.scaled(&s)).unwrap().inner(&r).unwrap();
        let rhs = p.inner(&r).unwrap() + s * q.inner(&r).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn mul_commutes(p in poly_strategy(3, 2), q in poly_strategy(3, 3)) {
        let a = p.mul(&q).unwrap();
        let b = q.mul(&p).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            prop_assert!((x - y).abs() <= 1e-9 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn eval_matches_tensor_pairing(p in poly_strategy(3, 3), x in prop::array::uniform3(-2.0f64..2.0)) {
        let direct = p.eval(&x).unwrap();
        let t = SymTensor::from_poly(&p);
        let paired = tensor_apply(&t, &x);
        prop_assert!((direct - paired).abs() <= 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn sym_tensor_round_trip(p in poly_strategy(4, 3)) {
        let back = SymTensor::from_poly(&p).to_poly();
        for (a, b) in p.coeffs().iter().zip(back.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn sym_is_idempotent_and_linear(v in prop::array::uniform3(-2.0f64..2.0)) {
        // sym of a rank-one cube is itself; scaling commutes with sym
        let t = DenseTensor::rank_one(&v, 3);
        let s1 = sym(&t);
        let mut t2 = t.clone();
        let data: Vec<f64> = t2.data().iter().map(|x| 2.5 * x).collect();
        t2 = DenseTensor::from_data(3, 3, data).unwrap();
        let s2 = sym(&t2);
        for (a, b) in s1.entries().iter().zip(s2.entries()) {
            prop_assert!((2.5 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn derivative_is_linear(
        p in poly_strategy(4, 3),
        q in poly_strategy(4, 3),
        s in -3.0f64..3.0,
    ) {
        let idx = MonomialIndex::new(vec![0, 2]);
        let lhs = p.add(&q.scaled(&s)).unwrap().partial_derivative(&idx).unwrap();
        let rhs = p
            .partial_derivative(&idx)
            .unwrap()
            .add(&q.partial_derivative(&idx).unwrap().scaled(&s))
            .unwrap();
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn restriction_is_projection(p in poly_strategy(5, 3)) {
        // restricting twice through the same subset equals restricting once
        let r = RestrictionMap::new(5, vec![1, 2, 4]).unwrap();
        let once = p.restrict(&r).unwrap();
        let again = once.restrict(&RestrictionMap::full(3)).unwrap();
        prop_assert_eq!(once, again);
    }
}

/// Central finite differences of P along the multiset directions approximate
/// the symbolic iterated partial derivative.
#[test]
fn finite_difference_oracle_for_power_sum_derivatives() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    let n = 5;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    // P = sum of two cubes of quadratics, degree 6
    let comp = |rng: &mut ChaCha8Rng| {
        Poly::new(
            n,
            2,
            (0..monomial_count(n, 2)).map(|_| rng.sample(StandardNormal)).collect(),
        )
        .unwrap()
    };
    let a1 = comp(&mut rng);
    let a2 = comp(&mut rng);
    let p = a1.pow(3).unwrap().add(&a2.pow(3).unwrap()).unwrap();

    let idx = MonomialIndex::new(vec![0, 3]);
    let symbolic = p.partial_derivative(&idx).unwrap();

    let h = 1e-5;
    for _ in 0..10 {
        let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        // second mixed central difference for d^2/dx0 dx3
        let eval = |d0: f64, d3: f64| {
            let mut y = x.clone();
            y[0] += d0;
            y[3] += d3;
            p.eval(&y).unwrap()
        };
        let numeric = (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4.0 * h * h);
        let exact = symbolic.eval(&x).unwrap();
        let rel = (numeric - exact).abs() / (1.0 + exact.abs());
        assert!(rel <= 1e-6, "finite difference mismatch: rel {:.3e}", rel);
    }
}

/// The multiset-derivative depends only on the multiset, not on any split
/// into successive single derivatives.
#[test]
fn derivative_multiset_independence() {
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    let n = 4;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = Poly::new(
        n,
        5,
        (0..monomial_count(n, 5)).map(|_| rng.sample(StandardNormal)).collect(),
    )
    .unwrap();
    for ms in MultisetIter::new(n, 3) {
        let all = p
            .partial_derivative(&MonomialIndex::from_sorted(ms.clone()))
            .unwrap();
        let mut step = p.clone();
        for &v in &ms {
            step = step.partial_derivative(&MonomialIndex::new(vec![v])).unwrap();
        }
        for (a, b) in all.coeffs().iter().zip(step.coeffs()) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }
    }
}

use gz_core::invariants::{finite_difference_gradient, kw_jacobian, kw_map, pfaffian, slots};
use gz_core::io::{matrix_to_json, parse_member};
use gz_core::linalg::{commutator, frobenius, max_abs, RankTol};
use gz_core::regularity::{centralizer, sreg_chain, sreg_rank};
use gz_core::sampling::{random_element, random_group_element, rng_from_seed};
use gz_core::{AlgebraContext, Family, C64};
use proptest::prelude::*;

fn family_and_size() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![
        (3usize..=8).prop_map(|n| (Family::Orthogonal, n)),
        (2usize..=6).prop_map(|n| (Family::GeneralLinear, n)),
    ]
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levels_at_or_above_i_are_invariant_under_g_i((family, n) in family_and_size(), seed: u64, pick: usize) {
        let ctx = AlgebraContext::new(family, n).unwrap();
        let mut rng = rng_from_seed(seed);
        let x = random_element(ctx.top(), &mut rng, 0.7);
        let i = ctx.first_index() + pick % (n - ctx.first_index() + 1);
        let k = random_group_element(&ctx, i, &mut rng, 0.3).unwrap();
        let y = &k * &x * k.clone().try_inverse().unwrap();
        let y = ctx.top().from_coords(&ctx.top().coords(&y));
        let (a, b) = (kw_map(&ctx, &x).unwrap(), kw_map(&ctx, &y).unwrap());
        for (s, (u, v)) in a.index.iter().zip(a.values.iter().zip(&b.values)) {
            if s.0 >= i {
                prop_assert!(rel(*u, *v) < 1e-8, "f{:?}: {} vs {}", s, u, v);
            }
        }
    }

    #[test]
    fn gz_functions_are_homogeneous((family, n) in family_and_size(), seed: u64, s in -2.0f64..2.0) {
        let ctx = AlgebraContext::new(family, n).unwrap();
        let x = random_element(ctx.top(), &mut rng_from_seed(seed), 1.0);
        let sx = &x * C64::new(s, 0.0);
        let (a, b) = (kw_map(&ctx, &x).unwrap(), kw_map(&ctx, &sx).unwrap());
        for (slot, (u, v)) in slots(&ctx).iter().zip(a.values.iter().zip(&b.values)) {
            let expected = u * s.powi(slot.degree() as i32);
            prop_assert!(rel(expected, *v) < 1e-9);
        }
    }

    #[test]
    fn jacobian_matches_finite_differences((family, n) in family_and_size(), seed: u64) {
        let ctx = AlgebraContext::new(family, n).unwrap();
        let x = random_element(ctx.top(), &mut rng_from_seed(seed), 0.5);
        let jac = kw_jacobian(&ctx, &x).unwrap();
        for (row, slot) in slots(&ctx).iter().enumerate() {
            let fd = finite_difference_gradient(&ctx, &x, slot.level, slot.j, 1e-5).unwrap();
            let scale = fd.camax().max(1.0);
            for k in 0..fd.len() {
                prop_assert!((jac[(row, k)] - fd[k]).norm() / scale < 1e-6);
            }
        }
    }

    #[test]
    fn algebra_is_closed_and_coordinates_round_trip((family, n) in family_and_size(), seed: u64) {
        let ctx = AlgebraContext::new(family, n).unwrap();
        let alg = ctx.top();
        let mut rng = rng_from_seed(seed);
        let (x, y) = (random_element(alg, &mut rng, 1.0), random_element(alg, &mut rng, 1.0));
        prop_assert!(alg.membership_residual(&commutator(&x, &y)).unwrap() < 1e-12);
        prop_assert!(max_abs(&(alg.from_coords(&alg.coords(&x)) - &x)) < 1e-13);
        let (back_ctx, back) = parse_member(&matrix_to_json(family, &x)).unwrap();
        prop_assert_eq!(back_ctx.n(), n);
        prop_assert_eq!(back, x);
    }

    #[test]
    fn theta_is_an_involutive_automorphism(n in 3usize..=9, seed: u64) {
        let ctx = AlgebraContext::new(Family::Orthogonal, n).unwrap();
        let mut rng = rng_from_seed(seed);
        let (x, y) = (random_element(ctx.top(), &mut rng, 1.0), random_element(ctx.top(), &mut rng, 1.0));
        let tx = ctx.theta(&x).unwrap();
        prop_assert!(ctx.top().membership_residual(&tx).unwrap() < 1e-12);
        prop_assert!(max_abs(&(ctx.theta(&tx).unwrap() - &x)) < 1e-12);
        let lhs = ctx.theta(&commutator(&x, &y)).unwrap();
        let rhs = commutator(&tx, &ctx.theta(&y).unwrap());
        prop_assert!(max_abs(&(lhs - rhs)) < 1e-11);
    }

    #[test]
    fn pfaffian_squares_to_determinant(l in 1usize..=5, seed: u64) {
        let ctx = AlgebraContext::new(Family::Orthogonal, 2 * l).unwrap();
        let alg = ctx.top();
        let y = random_element(alg, &mut rng_from_seed(seed), 1.0);
        let s = alg.form().unwrap().map(|v| C64::new(v, 0.0));
        let det = (s * &y).determinant();
        let pf = pfaffian(alg, &y).unwrap();
        prop_assert!(rel(pf * pf, det) < 1e-9);
    }

    #[test]
    fn generic_elements_are_strongly_regular((family, n) in family_and_size(), seed: u64) {
        let ctx = AlgebraContext::new(family, n).unwrap();
        let x = random_element(ctx.top(), &mut rng_from_seed(seed), 1.0);
        let tol = RankTol::default();
        let (a, b) = (sreg_rank(&ctx, &x, tol).unwrap(), sreg_chain(&ctx, &x, tol).unwrap());
        prop_assert!(a.holds && b.holds);
        prop_assert_eq!(centralizer(ctx.top(), &x, tol).dim(), ctx.rank());
    }

    #[test]
    fn centralizer_dimension_is_at_least_rank((family, n) in family_and_size(), seed: u64, zeros in 0usize..4) {
        let ctx = AlgebraContext::new(family, n).unwrap();
        let alg = ctx.top();
        let mut rng = rng_from_seed(seed);
        let mut eps: Vec<C64> = (0..alg.rank()).map(|_| gz_core::sampling::complex_gaussian(&mut rng)).collect();
        for e in eps.iter_mut().take(zeros) {
            *e = C64::new(0.0, 0.0);
        }
        let h = alg.cartan_element(&eps).unwrap();
        let k = random_group_element(&ctx, n, &mut rng, 0.3).unwrap();
        let x = &k * h * k.clone().try_inverse().unwrap();
        let x = alg.from_coords(&alg.coords(&x));
        prop_assume!(frobenius(&x) > 1e-3);
        prop_assert!(centralizer(alg, &x, RankTol::default()).dim() >= alg.rank());
    }
}

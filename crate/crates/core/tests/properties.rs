use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use enda_core::bijection::{classify, conjugate_by, Classification, Derivative};
use enda_core::endo::{find_standard_base, image_family, standard_endos, Endo};
use enda_core::gsolve::{reflection_check, solve_g_system, verify_candidate};
use enda_core::matrix::{conjugate_matrix_units, r1mf_factorize, Matrix, R1mfOutcome};
use enda_core::ncpoly::{Algebra, NcPoly};
use enda_core::sample::{
    conjugated_units, random_automorphism, random_recipe, rank_one_integer, unimodular_integer, RecipeKind,
};
use enda_core::{parse_ring, Ring};

fn rings() -> Vec<Ring> {
    ["Z", "Q", "F2", "F7", "F9=F3[t]/(t^2+1)", "Z[sqrt(-5)]"].iter().map(|s| parse_ring(s).unwrap()).collect()
}

fn kind() -> impl Strategy<Value = RecipeKind> {
    prop::sample::select(RecipeKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms_and_domain(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in rings() {
            let (a, b, c) = (r.random(&mut rng, 40), r.random(&mut rng, 40), r.random(&mut rng, 40));
            prop_assert_eq!(r.add(&r.add(&a, &b), &c), r.add(&a, &r.add(&b, &c)));
            prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
            prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
            prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
            prop_assert_eq!(r.add(&a, &r.zero()), a.clone());
            prop_assert_eq!(r.mul(&a, &r.one()), a.clone());
            prop_assert!(r.is_zero(&r.add(&a, &r.neg(&a))));
            if !r.is_zero(&a) && !r.is_zero(&b) {
                prop_assert!(!r.is_zero(&r.mul(&a, &b)));
            }
        }
    }

    #[test]
    fn ring_automorphisms_are_bijective_homomorphisms(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for r in rings() {
            for phi in r.automorphisms() {
                let inv = phi.inverse(&r);
                let (a, b) = (r.random(&mut rng, 40), r.random(&mut rng, 40));
                prop_assert_eq!(inv.apply(&r, &phi.apply(&r, &a)), a.clone());
                prop_assert_eq!(phi.apply(&r, &r.add(&a, &b)), r.add(&phi.apply(&r, &a), &phi.apply(&r, &b)));
                prop_assert_eq!(phi.apply(&r, &r.mul(&a, &b)), r.mul(&phi.apply(&r, &a), &phi.apply(&r, &b)));
            }
        }
    }

    #[test]
    fn quadratic_norm_is_multiplicative(a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
        let r = Ring::QuadraticRing;
        let (x, y) = (Ring::quad(a, b), Ring::quad(c, d));
        prop_assert_eq!(r.norm(&r.mul(&x, &y)).unwrap(), r.norm(&x).unwrap() * r.norm(&y).unwrap());
    }

    #[test]
    fn rank_one_factorizations_reconstruct(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = rank_one_integer(&mut rng, 6);
        match r1mf_factorize(&a).unwrap() {
            R1mfOutcome::Factored(f) => prop_assert_eq!(f.product(), a),
            other => prop_assert!(false, "not factored: {:?}", other),
        }
    }

    #[test]
    fn rank_is_invariant_under_unimodular_multiplication(seed: u64, rows in 1usize..5, cols in 1usize..5) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = Ring::Integers;
        let entries = (0..rows * cols).map(|_| z.from_i64(rng.gen_range(-3..=3))).collect();
        let a = Matrix::new(&z, rows, cols, entries).unwrap();
        let (p, q) = (unimodular_integer(&mut rng, rows), unimodular_integer(&mut rng, cols));
        prop_assert_eq!(p.mul(&a).unwrap().mul(&q).unwrap().rank(), a.rank());
    }

    #[test]
    fn unit_conjugation_postcondition(seed: u64, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fam = conjugated_units(&unimodular_integer(&mut rng, n));
        let u = conjugate_matrix_units(&fam).unwrap();
        for i in 0..n {
            for j in 0..n {
                let back = u.rho.mul(&fam[i][j]).unwrap().mul(&u.rho_inverse).unwrap();
                prop_assert_eq!(back, Matrix::unit(&Ring::Integers, n, i, j));
            }
        }
    }

    #[test]
    fn conjugated_families_keep_unit_relations(seed: u64, k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, _) = random_recipe(k, &mut rng);
        let fam = image_family(&s).unwrap();
        prop_assert_eq!(fam.unit_relation_violation().unwrap(), None);
    }

    #[test]
    fn linear_part_is_a_homomorphism(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Algebra::nilpotent(Ring::Integers, 3, 4);
        let mk = |rng: &mut ChaCha8Rng| Endo::new(&a, (0..3).map(|_| NcPoly::random(&a, rng, 4, 3)).collect()).unwrap();
        let (f, g) = (mk(&mut rng), mk(&mut rng));
        prop_assert_eq!(
            f.compose(&g).unwrap().linear_part_matrix(),
            f.linear_part_matrix().mul(&g.linear_part_matrix()).unwrap()
        );
    }

    #[test]
    fn automorphisms_have_two_sided_inverses(seed: u64, p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Algebra::nilpotent(Ring::prime_field(p).unwrap(), 3, 4);
        let f = random_automorphism(&a, &mut rng);
        prop_assert!(f.is_automorphism().unwrap());
        let g = f.inverse().unwrap().unwrap();
        prop_assert!(f.compose(&g).unwrap().is_identity());
        prop_assert!(g.compose(&f).unwrap().is_identity());
    }

    #[test]
    fn standard_bases_satisfy_all_identities(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, _) = random_recipe(RecipeKind::Inner, &mut rng);
        let fam = image_family(&s).unwrap();
        let base = find_standard_base(&fam).unwrap().expect("base exists");
        let n = s.algebra.n;
        for i in 0..n {
            for j in 0..n {
                for (m, zm) in base.z.iter().enumerate() {
                    let want = if j == m { base.z[i].clone() } else { NcPoly::zero(&s.algebra) };
                    prop_assert_eq!(fam.get(i, j).apply(zm).unwrap(), want);
                }
            }
        }
    }

    #[test]
    fn recipes_invert(seed: u64, k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, class) = random_recipe(k, &mut rng);
        prop_assert_eq!(classify(&s).unwrap(), class);
        for _ in 0..8 {
            let a = NcPoly::random(&s.algebra, &mut rng, 6, 3);
            prop_assert_eq!(s.evaluate_inverse(&s.evaluate(&a).unwrap()).unwrap(), a.clone());
            prop_assert_eq!(s.evaluate(&s.evaluate_inverse(&a).unwrap()).unwrap(), a);
        }
    }

    #[test]
    fn untwisted_recipes_are_semilinear(seed: u64, k in prop::sample::select(vec![RecipeKind::Inner, RecipeKind::SemiInner, RecipeKind::Mirror])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, class) = random_recipe(k, &mut rng);
        let ring = &s.algebra.ring;
        for _ in 0..8 {
            let a = NcPoly::random(&s.algebra, &mut rng, 4, 3);
            let b = NcPoly::random(&s.algebra, &mut rng, 4, 3);
            let xi = ring.random(&mut rng, 7);
            let (sa, sb) = (s.evaluate(&a).unwrap(), s.evaluate(&b).unwrap());
            prop_assert_eq!(s.evaluate(&a.add(&b).unwrap()).unwrap(), sa.add(&sb).unwrap());
            prop_assert_eq!(s.evaluate(&a.scale(&xi)).unwrap(), sa.scale(&s.ring_auto.apply(ring, &xi)));
            let prod = if class == Classification::Mirror { sb.mul(&sa).unwrap() } else { sa.mul(&sb).unwrap() };
            prop_assert_eq!(s.evaluate(&a.mul(&b).unwrap()).unwrap(), prod.scale(&s.scalar));
        }
    }

    #[test]
    fn conjugation_action_is_multiplicative(seed: u64, k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, _) = random_recipe(k, &mut rng);
        let a = &s.algebra;
        let mk = |rng: &mut ChaCha8Rng| Endo::new(a, (0..a.n).map(|_| NcPoly::random(a, rng, 3, 3)).collect()).unwrap();
        let (nu, mu) = (mk(&mut rng), mk(&mut rng));
        let lhs = conjugate_by(&s, &nu.compose(&mu).unwrap()).unwrap();
        let rhs = conjugate_by(&s, &nu).unwrap().compose(&conjugate_by(&s, &mu).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(conjugate_by(&s, &standard_endos(a).maps[0][0]).unwrap(), image_family(&s).unwrap().maps[0][0].clone());
    }

    #[test]
    fn derivative_operations_have_closed_forms(seed: u64, k in kind()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, _) = random_recipe(k, &mut rng);
        let d = Derivative::new(&s).unwrap();
        let ring = &s.algebra.ring;
        for _ in 0..8 {
            let a = NcPoly::random(&s.algebra, &mut rng, 4, 3);
            let b = NcPoly::random(&s.algebra, &mut rng, 4, 3);
            let xi = ring.random(&mut rng, 7);
            let mut sum = a.add(&b).unwrap();
            if let (Some(t), Some(gamma)) = (&s.twist, s.effective_gamma()) {
                sum = sum.add(&enda_core::gsolve::eval2(&t.g, &a, &b).unwrap().scale(&gamma)).unwrap();
            }
            prop_assert_eq!(d.bot(&a, &b).unwrap(), sum);
            prop_assert_eq!(d.circ(&xi, &a).unwrap(), a.scale(&s.ring_auto.apply(ring, &xi)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solver_outputs_reverify(p in prop::sample::select(vec![2u64, 3, 5]), m in 3usize..=5) {
        let space = solve_g_system(&Ring::prime_field(p).unwrap(), m).unwrap();
        for g in &space.basis {
            prop_assert!(verify_candidate(g, m).unwrap().ok);
            prop_assert!(reflection_check(g, m).unwrap().all());
        }
    }
}

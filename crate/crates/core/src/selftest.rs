//! Instance suites shared by the acceptance tests and `enda selftest`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bijection::{all_elements, build_twist, classify, verify_derivative_isomorphism, Classification, Derivative};
use crate::endo::{image_family, Endo, EndoError, SemigroupAutomorphism};
use crate::gsolve::{binomial_solution, g_algebra, reflection_check, solve_g_system, verify_candidate};
use crate::matrix::{
    conjugate_matrix_units, dedekind_a, dedekind_c, dedekind_m, dedekind_report, parse_matrix, r1mf_factorize, Matrix,
    MatrixError, R1mfOutcome,
};
use crate::ncpoly::{
    classify_distributive, distributive_space, is_distributive, parse_poly, print_poly, support_after_shift, Algebra,
    NcPoly, Shift, Word,
};
use crate::ring::{parse_ring, quadratic_elements_of_norm, Ring, RingAutomorphism};
use crate::sample::{
    conjugated_units, corrupt_units, random_automorphism, random_recipe, rank_one_integer, rank_two_integer,
    unimodular_integer, RecipeKind,
};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub failures: Vec<String>,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub const TITLES: [&str; 10] = [
    "Dedekind counterexample",
    "rank-1 factorization over Z",
    "g-system grid",
    "twist bijection",
    "matrix-unit conjugation",
    "standard-base recovery",
    "distributive classification",
    "support disjointness",
    "derivative-algebra structure",
    "parser round-trips",
];

/// Collects failed checks; the first few are kept verbatim.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.0.push(what());
        }
    }
}

/// Run suite `id` (1-based).
pub fn run(id: usize, seed: u64) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(id as u64));
    let mut c = Checks::default();
    match id {
        1 => dedekind(&mut c),
        2 => rank_one(&mut c, &mut rng),
        3 => g_grid(&mut c),
        4 => twist(&mut c, &mut rng),
        5 => unit_conjugation(&mut c, &mut rng),
        6 => standard_base(&mut c, &mut rng),
        7 => distributive(&mut c),
        8 => support(&mut c, &mut rng),
        9 => derivative(&mut c, &mut rng),
        10 => round_trips(&mut c, &mut rng),
        _ => c.check(false, || format!("no suite {id}")),
    }
    Outcome { id, title: TITLES[id - 1], failures: c.0, elapsed: start.elapsed() }
}

pub fn run_all(seed: u64) -> Vec<Outcome> {
    (1..=TITLES.len()).map(|id| run(id, seed)).collect()
}

fn dedekind(c: &mut Checks) {
    let r = Ring::QuadraticRing;
    let (m, a, cm) = (dedekind_m(), dedekind_a(), dedekind_c());
    c.check(m.det().unwrap() == r.from_i64(2), || "det m != 2".into());
    c.check(m.mul(&m).unwrap() == a.scale(&r.from_i64(2)), || "m^2 != 2a".into());
    c.check(a.det().unwrap() == r.one(), || "det a != 1".into());
    let adj = m.adjugate().unwrap();
    for i in 0..2 {
        for j in 0..2 {
            // m^-1 E m = adj(m) E m / 2 must stay integral
            let p = adj.mul(&Matrix::unit(&r, 2, i, j)).unwrap().mul(&m).unwrap();
            c.check(p.exact_div_scalar(&r.from_i64(2)).unwrap().is_some(), || format!("m^-1 E_{}{} m not integral", i + 1, j + 1));
        }
    }
    for n in [1u64, 2] {
        for x in quadratic_elements_of_norm(n) {
            let sq = r.mul(&x, &x);
            c.check(sq != r.from_i64(2) && sq != r.from_i64(-2), || format!("{}^2 = +-2", r.format_elem(&x)));
        }
    }
    c.check(cm.rank() == 1, || "rank c != 1".into());
    c.check(matches!(r1mf_factorize(&cm), Ok(R1mfOutcome::NotFactorable(_))), || "c factored".into());
    match dedekind_report() {
        Ok(rep) => c.check(rep.all_hold(), || "report has a failing item".into()),
        Err(e) => c.check(false, || e.to_string()),
    }
}

fn rank_one(c: &mut Checks, rng: &mut ChaCha8Rng) {
    for k in 0..1000 {
        let a = rank_one_integer(rng, 6);
        match r1mf_factorize(&a) {
            Ok(R1mfOutcome::Factored(f)) => c.check(f.product() == a, || format!("sample {k}: product differs")),
            other => c.check(false, || format!("sample {k}: {other:?}")),
        }
    }
    for k in 0..100 {
        let a = rank_two_integer(rng, 6);
        c.check(matches!(r1mf_factorize(&a), Err(MatrixError::RankNotOne(2))), || format!("rank-2 sample {k} accepted"));
    }
}

/// Coefficient rows of `polys` over the union of their supports.
fn coefficient_rank(polys: &[NcPoly]) -> usize {
    let Some(first) = polys.first() else { return 0 };
    let words: BTreeSet<Word> = polys.iter().flat_map(|p| p.support()).collect();
    let rows = polys.iter().map(|p| words.iter().map(|w| p.coeff(w)).collect()).collect();
    if words.is_empty() {
        return 0;
    }
    Matrix::from_rows(first.ring(), rows).unwrap().rank()
}

fn g_grid(c: &mut Checks) {
    for p in [2u64, 3, 5] {
        let ring = Ring::prime_field(p).unwrap();
        for m in 3..=6 {
            let space = match solve_g_system(&ring, m) {
                Ok(s) => s,
                Err(e) => return c.check(false, || format!("F{p} m={m}: {e}")),
            };
            let expect_nonzero = m % 2 == 0 || p == 2;
            c.check((space.dimension() > 0) == expect_nonzero, || format!("F{p} m={m}: dimension {}", space.dimension()));
            for g in &space.basis {
                let ok = verify_candidate(g, m).map(|v| v.ok).unwrap_or(false);
                let refl = reflection_check(g, m).map(|r| r.all()).unwrap_or(false);
                c.check(ok && refl, || format!("F{p} m={m}: {} fails re-verification", print_poly(g)));
            }
        }
    }
    // brute force over the 16 degree-2 candidates in x1, x2 over F2
    let f2 = Ring::PrimeField(2);
    let alg = g_algebra(&f2, 3);
    let words = Word::all(2, 2);
    let mut found = Vec::new();
    for mask in 0u32..16 {
        let g = NcPoly::from_terms(&alg, words.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| (w.clone(), f2.one())));
        if verify_candidate(&g, 3).map(|v| v.ok).unwrap_or(false) {
            found.push(g);
        }
    }
    let want = vec![NcPoly::zero(&alg), parse_poly("x1*x2 + x2*x1", &alg).unwrap()];
    c.check(found == want, || format!("F2 m=3 brute force found {:?}", found.iter().map(print_poly).collect::<Vec<_>>()));
    match solve_g_system(&f2, 3) {
        Ok(s) => c.check(s.basis == want[1..], || "F2 m=3 basis differs from x1*x2 + x2*x1".into()),
        Err(e) => c.check(false, || e.to_string()),
    }
    let f3 = Ring::PrimeField(3);
    let alg3 = g_algebra(&f3, 4);
    let (y1, y2) = (NcPoly::gen(&alg3, 0), NcPoly::gen(&alg3, 1));
    let cube = y1.add(&y2).unwrap().pow(3).unwrap().sub(&y1.pow(3).unwrap()).unwrap().sub(&y2.pow(3).unwrap()).unwrap();
    c.check(cube == binomial_solution(&f3, 4), || "binomial solution is not (x1+x2)^3 - x1^3 - x2^3".into());
    match solve_g_system(&f3, 4) {
        Ok(s) => {
            let mut with = s.basis.clone();
            with.push(cube);
            c.check(coefficient_rank(&with) == coefficient_rank(&s.basis), || "F3 m=4 space misses the cube".into());
        }
        Err(e) => c.check(false, || e.to_string()),
    }
}

/// `x -> t^-1 (nu (t x))` on generators.
fn pull_back(t: &crate::bijection::BijectionRecipe, nu: &Endo) -> Result<Endo, EndoError> {
    t.preimage(nu)
}

fn twist(c: &mut Checks, rng: &mut ChaCha8Rng) {
    let f2 = Algebra::nilpotent(Ring::PrimeField(2), 2, 3);
    let g = parse_poly("x1*x2 + x2*x1", &f2).unwrap();
    let tau = build_twist(&g, &f2.ring.one(), RingAutomorphism::Identity, &f2).unwrap();
    let all = all_elements(&f2).unwrap();
    c.check(all.len() == 64, || format!("{} elements", all.len()));
    for x in &all {
        let back = tau.evaluate(&tau.evaluate(x).unwrap()).unwrap();
        c.check(back == *x, || format!("tau^2 moves {}", print_poly(x)));
    }
    let sum = parse_poly("x1 + x2", &f2).unwrap();
    c.check(tau.evaluate(&sum).unwrap() != sum, || "tau fixes x1 + x2".into());
    c.check(classify(&tau) == Ok(Classification::PSemiInner(2)), || format!("classify gave {:?}", classify(&tau)));
    for k in 0..100 {
        let mut mk = || Endo::new(&f2, (0..2).map(|_| NcPoly::random(&f2, rng, 3, 2)).collect()).unwrap();
        let (nu, mu) = (mk(), mk());
        let lhs = pull_back(&tau, &nu.compose(&mu).unwrap()).unwrap();
        let rhs = pull_back(&tau, &nu).unwrap().compose(&pull_back(&tau, &mu).unwrap()).unwrap();
        c.check(lhs == rhs, || format!("pair {k}: conjugation does not preserve composition"));
    }
    let mut mirrored = tau.clone();
    mirrored.mirror = true;
    c.check(classify(&mirrored) == Ok(Classification::PMirror(2)), || format!("mirror classify gave {:?}", classify(&mirrored)));
    let f3 = Algebra::nilpotent(Ring::PrimeField(3), 2, 4);
    let g3 = binomial_solution(&f3.ring, 4).embed(&f3).unwrap();
    let tau3 = build_twist(&g3, &f3.ring.one(), RingAutomorphism::Identity, &f3).unwrap();
    for _ in 0..200 {
        let x = NcPoly::random(&f3, rng, 8, 3);
        let y = (0..3).fold(x.clone(), |y, _| tau3.evaluate(&y).unwrap());
        c.check(y == x, || format!("tau^3 moves {}", print_poly(&x)));
    }
}

fn unit_conjugation(c: &mut Checks, rng: &mut ChaCha8Rng) {
    let z = Ring::Integers;
    for k in 0..200 {
        let n = rng.gen_range(1..=4);
        let fam = conjugated_units(&unimodular_integer(rng, n));
        match conjugate_matrix_units(&fam) {
            Ok(u) => {
                for i in 0..n {
                    for j in 0..n {
                        let back = u.rho.mul(&fam[i][j]).unwrap().mul(&u.rho_inverse).unwrap();
                        c.check(back == Matrix::unit(&z, n, i, j), || format!("family {k}: entry ({i},{j}) not elementary"));
                    }
                }
            }
            Err(e) => c.check(false, || format!("family {k}: {e}")),
        }
    }
    for k in 0..20 {
        let n = rng.gen_range(2..=4);
        let mut fam = conjugated_units(&unimodular_integer(rng, n));
        corrupt_units(&mut fam, rng);
        c.check(matches!(conjugate_matrix_units(&fam), Err(MatrixError::NotMatrixUnits(_))), || format!("corrupted family {k} accepted"));
    }
}

fn standard_base(c: &mut Checks, rng: &mut ChaCha8Rng) {
    for k in 0..100 {
        let ring = Ring::prime_field(if k % 2 == 0 { 2 } else { 3 }).unwrap();
        let alg = Algebra::nilpotent(ring.clone(), rng.gen_range(2..=3), rng.gen_range(2..=4));
        let units = ring.small_units();
        let alpha = units[rng.gen_range(0..units.len())].clone();
        let sigma = random_automorphism(&alg, rng);
        let s = crate::bijection::BijectionRecipe::new(&alg, alpha, RingAutomorphism::Identity, sigma, false, None).unwrap();
        let fam = image_family(&s).unwrap();
        let base = match crate::endo::find_standard_base(&fam) {
            Ok(Some(b)) => b,
            other => return c.check(false, || format!("recipe {k}: {other:?}")),
        };
        let theta = Endo::new(&alg, base.z.clone()).unwrap();
        c.check(theta.is_automorphism().unwrap_or(false), || format!("recipe {k}: base is not an automorphism base"));
        for i in 0..alg.n {
            for j in 0..alg.n {
                for (m, zm) in base.z.iter().enumerate() {
                    let got = fam.get(i, j).apply(zm).unwrap();
                    let want = if j == m { base.z[i].clone() } else { NcPoly::zero(&alg) };
                    c.check(got == want, || format!("recipe {k}: e_{}{}(z_{}) wrong", i + 1, j + 1, m + 1));
                }
            }
        }
    }
}

fn distributive(c: &mut Checks) {
    for ring in [Ring::PrimeField(2), Ring::Integers] {
        match distributive_space(&ring, 4) {
            Ok(basis) => {
                let alg = basis.first().map(|p| p.algebra.clone()).unwrap_or_else(|| Algebra::free(ring.clone(), 2));
                let span = [parse_poly("x1*x2", &alg).unwrap(), parse_poly("x2*x1", &alg).unwrap()];
                let mut both = basis.clone();
                both.extend(span.iter().cloned());
                c.check(basis.len() == 2 && coefficient_rank(&both) == 2, || format!("{ring}: space has {} elements", basis.len()));
                for p in &basis {
                    c.check(classify_distributive(p).ok().flatten().is_some(), || format!("{ring}: {} not of shape", print_poly(p)));
                }
            }
            Err(e) => c.check(false, || e.to_string()),
        }
    }
    let f2 = Ring::PrimeField(2);
    let alg = Algebra::free(f2.clone(), 2);
    let words: Vec<Word> = (1..=3).flat_map(|l| Word::all(2, l)).collect();
    let mut found = BTreeSet::new();
    for mask in 0u32..1 << words.len() {
        let p = NcPoly::from_terms(&alg, words.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| (w.clone(), f2.one())));
        if is_distributive(&p).unwrap_or(false) {
            found.insert(print_poly(&p));
        }
    }
    let want: BTreeSet<String> = ["0", "x1*x2", "x2*x1", "x1*x2 + x2*x1"].into_iter().map(String::from).collect();
    c.check(found == want, || format!("brute force found {found:?}"));
}

fn support(c: &mut Checks, rng: &mut ChaCha8Rng) {
    let alg = Algebra::free(Ring::Integers, 2);
    let word = |rng: &mut ChaCha8Rng| Word((0..rng.gen_range(1..=6)).map(|_| rng.gen_range(0..2)).collect());
    let mut k = 0;
    while k < 500 {
        let (u, v) = (word(rng), word(rng));
        if u == v {
            continue;
        }
        k += 1;
        let (pu, pv) = (NcPoly::monomial(&alg, u.clone(), alg.ring.one()), NcPoly::monomial(&alg, v.clone(), alg.ring.one()));
        for shift in [Shift::First, Shift::Second] {
            let (su, sv) = (support_after_shift(&pu, shift).unwrap(), support_after_shift(&pv, shift).unwrap());
            c.check(su.is_disjoint(&sv), || format!("{u} and {v} overlap under {shift:?}"));
        }
    }
}

fn derivative(c: &mut Checks, rng: &mut ChaCha8Rng) {
    for k in 0..200 {
        let kind = RecipeKind::ALL[k % RecipeKind::ALL.len()];
        let (s, class) = random_recipe(kind, rng);
        c.check(classify(&s) == Ok(class), || format!("recipe {k}: classify {:?}, expected {class:?}", classify(&s)));
        match verify_derivative_isomorphism(&s, 200, rng) {
            Ok(rep) => c.check(rep.passed(), || format!("recipe {k}: {:?}", rep.failures.first())),
            Err(e) => return c.check(false, || format!("recipe {k}: {e}")),
        }
        let d = Derivative::new(&s).unwrap();
        let alg = &s.algebra;
        let ring = &alg.ring;
        let (x1, x2) = (NcPoly::gen(alg, 0), NcPoly::gen(alg, 1));
        let plain_on_gens = d.bot(&x1, &x2).unwrap() == x1.add(&x2).unwrap();
        c.check(plain_on_gens == s.twist.is_none(), || format!("recipe {k}: bot on generators disagrees with twist flag"));
        for _ in 0..20 {
            let a = NcPoly::random(alg, rng, 4, 3);
            let b = NcPoly::random(alg, rng, 4, 3);
            let xi = ring.random(rng, 5);
            let prod = if s.mirror { b.mul(&a).unwrap() } else { a.mul(&b).unwrap() };
            c.check(d.star(&a, &b).unwrap() == prod.scale(&s.scalar), || format!("recipe {k}: star is not the scaled product"));
            let mut sum = a.add(&b).unwrap();
            if let (Some(t), Some(gamma)) = (&s.twist, s.effective_gamma()) {
                sum = sum.add(&crate::gsolve::eval2(&t.g, &a, &b).unwrap().scale(&gamma)).unwrap();
            }
            c.check(d.bot(&a, &b).unwrap() == sum, || format!("recipe {k}: bot differs from the twisted sum"));
            let want = a.scale(&s.ring_auto.apply(ring, &xi));
            c.check(d.circ(&xi, &a).unwrap() == want, || format!("recipe {k}: circ is not phi-semilinear"));
        }
    }
}

fn round_trips(c: &mut Checks, rng: &mut ChaCha8Rng) {
    let literals = ["Z", "Q", "F2", "F7", "F4=F2[t]/(t^2+t+1)", "F9=F3[t]/(t^2+1)", "Z[sqrt(-5)]"];
    for lit in literals {
        let ring = parse_ring(lit).unwrap();
        c.check(parse_ring(&ring.to_string()).as_ref() == Ok(&ring), || format!("ring literal {lit}"));
        let alg = Algebra::nilpotent(ring.clone(), 3, 6);
        for _ in 0..1000 {
            let p = NcPoly::random(&alg, rng, 6, 5);
            let text = print_poly(&p);
            c.check(parse_poly(&text, &alg).as_ref() == Ok(&p), || format!("{lit}: poly {text}"));
        }
        for _ in 0..200 {
            let (r, k) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            let entries = (0..r * k).map(|_| ring.random(rng, 20)).collect();
            let m = Matrix::new(&ring, r, k, entries).unwrap();
            let text = m.to_literal();
            c.check(parse_matrix(&ring, &text).as_ref() == Ok(&m), || format!("{lit}: matrix {text}"));
        }
    }
}

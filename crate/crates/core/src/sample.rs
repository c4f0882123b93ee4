//! Seeded random instances for property suites and the CLI self-test.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::bijection::{BijectionRecipe, Classification};
use crate::endo::{permutations, Endo};
use crate::gsolve::binomial_solution;
use crate::matrix::Matrix;
use crate::ncpoly::{parse_poly, Algebra, NcPoly};
use crate::ring::{parse_ring, Elem, Ring, RingAutomorphism};

fn int(v: i64) -> Elem {
    Elem::Int(BigInt::from(v))
}

fn nonzero_vec(rng: &mut dyn RngCore, len: usize, bound: i64) -> Vec<Elem> {
    loop {
        let v: Vec<i64> = (0..len).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(int).collect();
        }
    }
}

/// Column times row over Z, with shape up to `max_size x max_size`.
pub fn rank_one_integer(rng: &mut dyn RngCore, max_size: usize) -> Matrix {
    let (r, c) = (rng.gen_range(1..=max_size), rng.gen_range(1..=max_size));
    let z = Ring::Integers;
    let col = Matrix::column_matrix(&z, nonzero_vec(rng, r, 6));
    let row = Matrix::row_matrix(&z, nonzero_vec(rng, c, 6));
    col.mul(&row).unwrap()
}

/// Sum of two column-row products that has rank exactly 2.
pub fn rank_two_integer(rng: &mut dyn RngCore, max_size: usize) -> Matrix {
    let z = Ring::Integers;
    loop {
        let (r, c) = (rng.gen_range(2..=max_size), rng.gen_range(2..=max_size));
        let mut acc = Matrix::zeros(&z, r, c);
        for _ in 0..2 {
            let col = Matrix::column_matrix(&z, nonzero_vec(rng, r, 6));
            let row = Matrix::row_matrix(&z, nonzero_vec(rng, c, 6));
            acc = acc.add(&col.mul(&row).unwrap()).unwrap();
        }
        if acc.rank() == 2 {
            return acc;
        }
    }
}

/// Product of random elementary row operations and a signed permutation.
pub fn unimodular_integer(rng: &mut dyn RngCore, n: usize) -> Matrix {
    let z = Ring::Integers;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut q = Matrix::zeros(&z, n, n);
    for (i, &p) in perm.iter().enumerate() {
        q.set(i, p, int(if rng.gen_bool(0.5) { 1 } else { -1 }));
    }
    for _ in 0..3 * n {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let mut e = Matrix::identity(&z, n);
        e.set(i, j, int(rng.gen_range(-3..=3)));
        q = e.mul(&q).unwrap();
    }
    q
}

/// `P_ij = Q E_ij Q^-1`.
pub fn conjugated_units(q: &Matrix) -> Vec<Vec<Matrix>> {
    let n = q.rows;
    let qi = q.inverse().unwrap().expect("invertible");
    (0..n)
        .map(|i| (0..n).map(|j| q.mul(&Matrix::unit(&q.ring, n, i, j)).unwrap().mul(&qi).unwrap()).collect())
        .collect()
}

/// Add a nonzero integer to one entry of one member.
pub fn corrupt_units(family: &mut [Vec<Matrix>], rng: &mut dyn RngCore) {
    let n = family.len();
    let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let (r, c) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let p = &mut family[i][j];
    let bump = int(if rng.gen_bool(0.5) { 1 } else { -2 });
    let v = p.ring.add(p.get(r, c), &bump);
    p.set(r, c, v);
}

/// Permutation, a unit diagonal, a unipotent shear and random higher terms.
pub fn random_automorphism(alg: &Arc<Algebra>, rng: &mut dyn RngCore) -> Endo {
    let perms = permutations(alg.n);
    let perm = &perms[rng.gen_range(0..perms.len())];
    let units = alg.ring.small_units();
    let images = (0..alg.n)
        .map(|k| {
            let u = units[rng.gen_range(0..units.len())].clone();
            let mut img = NcPoly::gen(alg, perm[k]).scale(&u);
            if k + 1 < alg.n && rng.gen_bool(0.5) {
                img = img.add(&NcPoly::gen(alg, perm[k + 1]).scale(&alg.ring.random(rng, 2))).unwrap();
            }
            img.add(&NcPoly::random(alg, rng, 2, 3).higher_part()).unwrap()
        })
        .collect();
    Endo::new(alg, images).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecipeKind {
    Inner,
    SemiInner,
    Mirror,
    PSemiInner,
    PMirror,
}

impl RecipeKind {
    pub const ALL: [RecipeKind; 5] =
        [RecipeKind::Inner, RecipeKind::SemiInner, RecipeKind::Mirror, RecipeKind::PSemiInner, RecipeKind::PMirror];
}

fn pick<'a, T>(rng: &mut dyn RngCore, xs: &'a [T]) -> &'a T {
    &xs[rng.gen_range(0..xs.len())]
}

/// A recipe of the given kind together with the class it must receive.
pub fn random_recipe(kind: RecipeKind, rng: &mut dyn RngCore) -> (BijectionRecipe, Classification) {
    let plain = ["Z", "Q", "F2", "F3", "F5"];
    let extension = ["F4=F2[t]/(t^2+t+1)", "F9=F3[t]/(t^2+1)", "F8=F2[t]/(t^3+t+1)"];
    match kind {
        RecipeKind::Inner | RecipeKind::SemiInner | RecipeKind::Mirror => {
            let lit = if kind == RecipeKind::SemiInner { pick(rng, &extension) } else { pick(rng, &plain) };
            let ring = parse_ring(lit).unwrap();
            let alg = Algebra::nilpotent(ring.clone(), rng.gen_range(2..=3), rng.gen_range(3..=4));
            let phi = match kind {
                RecipeKind::SemiInner => *pick(rng, &ring.automorphisms()[1..]),
                _ => RingAutomorphism::Identity,
            };
            let alpha = pick(rng, &ring.small_units()).clone();
            let sigma = random_automorphism(&alg, rng);
            let mirror = kind == RecipeKind::Mirror;
            let s = BijectionRecipe::new(&alg, alpha, phi, sigma, mirror, None).unwrap();
            let class = match kind {
                RecipeKind::Inner => Classification::Inner,
                RecipeKind::SemiInner => Classification::SemiInner(phi),
                _ => Classification::Mirror,
            };
            (s, class)
        }
        RecipeKind::PSemiInner | RecipeKind::PMirror => {
            let (p, m) = *pick(rng, &[(2u64, 3usize), (3, 4)]);
            let ring = Ring::prime_field(p).unwrap();
            let alg = Algebra::nilpotent(ring.clone(), rng.gen_range(2..=3), m);
            let g = if p == 2 { parse_poly("x1*x2 + x2*x1", &alg).unwrap() } else { binomial_solution(&ring, m).embed(&alg).unwrap() };
            let gamma = ring.from_i64(rng.gen_range(1..p as i64));
            let alpha = pick(rng, &ring.small_units()).clone();
            let mirror = kind == RecipeKind::PMirror;
            let s = BijectionRecipe::new(&alg, alpha, RingAutomorphism::Identity, Endo::identity(&alg), mirror, Some((g, gamma)))
                .unwrap();
            let class = if mirror { Classification::PMirror(p) } else { Classification::PSemiInner(p) };
            (s, class)
        }
    }
}

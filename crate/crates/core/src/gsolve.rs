//! The symmetric cocycle system for degree `m-1` polynomials `g(x1, x2)`:
//!
//! ```text
//! g(x1,x2) + g(x1+x2,x3) = g(x2,x3) + g(x1,x2+x3),   g(x1,-x1) = 0,   g(x1,x2) = g(x2,x1)
//! ```

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use crate::matrix::{kernel_basis, Matrix, MatrixError};
use crate::ncpoly::{print_poly, Algebra, NcPoly, PolyError, Word};
use crate::ring::{Elem, Ring};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GError {
    #[error("the cocycle system is not solved over {0}")]
    UnsupportedRing(String),
    #[error("nilpotency class must be at least 2, got {0}")]
    BadClass(usize),
    #[error("expected a homogeneous polynomial of degree {expected} in x1, x2")]
    WrongDegree { expected: usize },
    #[error("candidate does not satisfy the system: {0}")]
    PrerequisiteFailed(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// The two-generator algebra where solutions live.
pub fn g_algebra(ring: &Ring, m: usize) -> Arc<Algebra> {
    Algebra::nilpotent(ring.clone(), 2, m)
}

/// `f(a, b)` for a polynomial `f` in `x1, x2`.
pub fn eval2(f: &NcPoly, a: &NcPoly, b: &NcPoly) -> Result<NcPoly, PolyError> {
    f.substitute(&[a.clone(), b.clone()])
}

pub fn swap12(f: &NcPoly) -> NcPoly {
    f.map_words(|w| Word(w.0.iter().map(|g| match g {
        0 => 1,
        1 => 0,
        other => *other,
    }).collect()))
}

/// Left side minus right side of the cocycle identity, in three generators.
fn cocycle_defect(g: &NcPoly, alg3: &Arc<Algebra>) -> Result<NcPoly, PolyError> {
    let g = g.embed(alg3)?;
    let x: Vec<NcPoly> = NcPoly::gens(alg3);
    let x12 = x[0].add(&x[1])?;
    let x23 = x[1].add(&x[2])?;
    eval2(&g, &x[0], &x[1])?
        .add(&eval2(&g, &x12, &x[2])?)?
        .sub(&eval2(&g, &x[1], &x[2])?)?
        .sub(&eval2(&g, &x[0], &x23)?)
}

fn antipodal(g: &NcPoly) -> Result<NcPoly, PolyError> {
    let x1 = NcPoly::gen(&g.algebra, 0);
    eval2(g, &x1, &x1.neg())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSolutionSpace {
    pub ring: Ring,
    pub m: usize,
    pub basis: Vec<NcPoly>,
}

impl GSolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ring": self.ring.to_string(),
            "m": self.m,
            "dimension": self.dimension(),
            "basis": self.basis.iter().map(print_poly).collect::<Vec<_>>(),
        })
    }
}

/// Swap-orbit sums `w + swap(w)` over words of length `m-1` starting with `x1`.
pub fn symmetric_unknowns(alg: &Arc<Algebra>, m: usize) -> Vec<NcPoly> {
    let one = alg.ring.one();
    Word::all(2, m - 1)
        .into_iter()
        .filter(|w| w.0[0] == 0)
        .map(|w| {
            let p = NcPoly::monomial(alg, w, one.clone());
            p.add(&swap12(&p)).unwrap()
        })
        .collect()
}

/// Kernel basis of the linearized system over a field or Z, each element re-verified.
pub fn solve_g_system(ring: &Ring, m: usize) -> Result<GSolutionSpace, GError> {
    if m < 2 {
        return Err(GError::BadClass(m));
    }
    if *ring == Ring::QuadraticRing {
        return Err(GError::UnsupportedRing(ring.to_string()));
    }
    let alg = g_algebra(ring, m);
    let alg3 = alg.with_generators(3);
    let unknowns = symmetric_unknowns(&alg, m);
    let mut rows: BTreeMap<(u8, Word), Vec<Elem>> = BTreeMap::new();
    for (col, b) in unknowns.iter().enumerate() {
        for (tag, defect) in [(0u8, cocycle_defect(b, &alg3)?), (1u8, antipodal(b)?.embed(&alg3)?)] {
            for (w, c) in defect.terms() {
                let row = rows.entry((tag, w.clone())).or_insert_with(|| vec![ring.zero(); unknowns.len()]);
                row[col] = ring.add(&row[col], c);
            }
        }
    }
    let vectors = if rows.is_empty() {
        (0..unknowns.len())
            .map(|i| (0..unknowns.len()).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
            .collect()
    } else {
        kernel_basis(&Matrix::from_rows(ring, rows.into_values().collect())?)?
    };
    let mut basis = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut g = NcPoly::zero(&alg);
        for (c, b) in v.iter().zip(&unknowns) {
            g = g.add(&b.scale(c))?;
        }
        let verdict = verify_candidate(&g, m)?;
        if !verdict.ok {
            return Err(GError::PrerequisiteFailed(format!("kernel vector {} fails: {:?}", print_poly(&g), verdict.witness)));
        }
        basis.push(g);
    }
    Ok(GSolutionSpace { ring: ring.clone(), m, basis })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateVerdict {
    pub ok: bool,
    /// Which condition failed, and on which word.
    pub witness: Option<String>,
}

fn first_difference(lhs: &NcPoly, rhs: &NcPoly) -> Option<Word> {
    lhs.terms()
        .map(|(w, _)| w)
        .chain(rhs.terms().map(|(w, _)| w))
        .find(|w| lhs.coeff(w) != rhs.coeff(w))
        .cloned()
}

/// Symmetry, the cocycle identity and `g(x1, -x1) = 0`, checked exactly.
pub fn verify_candidate(g: &NcPoly, m: usize) -> Result<CandidateVerdict, GError> {
    if m < 2 {
        return Err(GError::BadClass(m));
    }
    let ring = g.ring().clone();
    if g.generators_used() > 2 || !g.is_homogeneous() || g.degree().is_some_and(|d| d != m - 1) {
        return Err(GError::WrongDegree { expected: m - 1 });
    }
    let alg = g_algebra(&ring, m);
    let g = g.embed(&alg)?;
    let swapped = swap12(&g);
    if let Some(w) = first_difference(&swapped, &g) {
        return Ok(CandidateVerdict { ok: false, witness: Some(format!("not symmetric: swap image differs on {w}")) });
    }
    let defect = cocycle_defect(&g, &alg.with_generators(3))?;
    if let Some((w, _)) = defect.terms().next() {
        return Ok(CandidateVerdict { ok: false, witness: Some(format!("cocycle identity fails on {w}")) });
    }
    let anti = antipodal(&g)?;
    if let Some((w, _)) = anti.terms().next() {
        return Ok(CandidateVerdict { ok: false, witness: Some(format!("g(x1,-x1) has term {w}")) });
    }
    Ok(CandidateVerdict { ok: true, witness: None })
}

/// `[[1, 1], [-1, 0]]`, acting as `(x1, x2) -> (x1 + x2, -x1)`.
pub fn reflection_matrix() -> Matrix {
    Matrix::from_i64(&Ring::Integers, &[&[1, 1], &[-1, 0]])
}

fn assert_cube_is_minus_identity() {
    static CHECKED: OnceLock<()> = OnceLock::new();
    CHECKED.get_or_init(|| {
        let l = reflection_matrix();
        let cube = l.mul(&l).unwrap().mul(&l).unwrap();
        let minus_i = Matrix::identity(&Ring::Integers, 2).scale(&Ring::Integers.from_i64(-1));
        assert_eq!(cube, minus_i, "reflection matrix must satisfy L^3 = -I");
    });
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReflectionReport {
    /// `g(x1, x2) = -g(x1 + x2, -x1)`.
    pub reflection: bool,
    /// `g = (-1)^m g`.
    pub parity: bool,
    /// `g(x1, x2) = -g(x1 + x2, -x2)`.
    pub shear: bool,
}

impl ReflectionReport {
    pub fn all(&self) -> bool {
        self.reflection && self.parity && self.shear
    }
}

pub fn reflection_check(g: &NcPoly, m: usize) -> Result<ReflectionReport, GError> {
    assert_cube_is_minus_identity();
    let verdict = verify_candidate(g, m)?;
    if !verdict.ok {
        return Err(GError::PrerequisiteFailed(verdict.witness.unwrap_or_default()));
    }
    let alg = g_algebra(g.ring(), m);
    let g = g.embed(&alg)?;
    let (x1, x2) = (NcPoly::gen(&alg, 0), NcPoly::gen(&alg, 1));
    let l = reflection_matrix();
    // images of x1, x2 under the linear substitution with matrix L (row convention on the pair)
    let lin = |row: usize| -> NcPoly {
        let ring = &alg.ring;
        let c = |j: usize| ring.from_bigint(match l.get(row, j) {
            Elem::Int(v) => v,
            _ => unreachable!(),
        });
        x1.scale(&c(0)).add(&x2.scale(&c(1))).unwrap()
    };
    let reflected = eval2(&g, &lin(0), &lin(1))?.neg();
    let sign = if m.is_multiple_of(2) { alg.ring.one() } else { alg.ring.from_i64(-1) };
    let sheared = eval2(&g, &x1.add(&x2)?, &x2.neg())?.neg();
    Ok(ReflectionReport { reflection: reflected == g, parity: g.scale(&sign) == g, shear: sheared == g })
}

/// `(x1 + x2)^(m-1) - x1^(m-1) - x2^(m-1)`.
pub fn binomial_solution(ring: &Ring, m: usize) -> NcPoly {
    let alg = g_algebra(ring, m);
    let (x1, x2) = (NcPoly::gen(&alg, 0), NcPoly::gen(&alg, 1));
    let d = m - 1;
    x1.add(&x2).unwrap().pow(d).unwrap().sub(&x1.pow(d).unwrap()).unwrap().sub(&x2.pow(d).unwrap()).unwrap()
}

//! Endomorphisms of free and nilpotent algebras, stored as generator images.
//!
//! `compose(f, g)` applies `g` first: `compose(f, g)(a) = f(g(a))`.

use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::matrix::{conjugate_matrix_units, Matrix, MatrixError};
use crate::ncpoly::{parse_poly, print_poly, Algebra, NcPoly, PolyError, Variety, Word};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EndoError {
    #[error("endomorphisms live in different algebras")]
    AlgebraMismatch,
    #[error("no decision procedure for the {0} variety")]
    UnsupportedVariety(Variety),
    #[error("family is not a system of matrix units: {0}")]
    NotMatrixUnits(String),
    #[error("cannot invert the semigroup map: {0}")]
    NotFromRecipe(String),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Matrix(MatrixError),
}

impl From<MatrixError> for EndoError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::NotMatrixUnits(s) => EndoError::NotMatrixUnits(s),
            other => EndoError::Matrix(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endo {
    pub algebra: Arc<Algebra>,
    pub images: Vec<NcPoly>,
}

impl Endo {
    pub fn new(alg: &Arc<Algebra>, images: Vec<NcPoly>) -> Result<Endo, EndoError> {
        if images.len() != alg.n || images.iter().any(|p| p.algebra != *alg) {
            return Err(EndoError::AlgebraMismatch);
        }
        Ok(Endo { algebra: alg.clone(), images })
    }

    pub fn identity(alg: &Arc<Algebra>) -> Endo {
        Endo { algebra: alg.clone(), images: NcPoly::gens(alg) }
    }

    pub fn zero(alg: &Arc<Algebra>) -> Endo {
        Endo { algebra: alg.clone(), images: vec![NcPoly::zero(alg); alg.n] }
    }

    /// The linear endomorphism whose matrix (column convention) is `m`.
    pub fn from_linear_matrix(alg: &Arc<Algebra>, m: &Matrix) -> Endo {
        let images = (0..alg.n)
            .map(|k| NcPoly::from_terms(alg, (0..alg.n).map(|i| (Word(vec![i]), m.get(i, k).clone()))))
            .collect();
        Endo { algebra: alg.clone(), images }
    }

    pub fn apply(&self, a: &NcPoly) -> Result<NcPoly, EndoError> {
        if a.algebra != self.algebra {
            return Err(EndoError::AlgebraMismatch);
        }
        Ok(a.substitute(&self.images)?)
    }

    /// `g` first, then `self`.
    pub fn compose(&self, g: &Endo) -> Result<Endo, EndoError> {
        if g.algebra != self.algebra {
            return Err(EndoError::AlgebraMismatch);
        }
        let images = g.images.iter().map(|p| self.apply(p)).collect::<Result<_, _>>()?;
        Ok(Endo { algebra: self.algebra.clone(), images })
    }

    pub fn is_identity(&self) -> bool {
        self.images == NcPoly::gens(&self.algebra)
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(NcPoly::is_zero)
    }

    /// Column convention: entry `(i, k)` is the coefficient of `x_i` in the image of `x_k`.
    pub fn linear_part_matrix(&self) -> Matrix {
        let n = self.algebra.n;
        let ring = &self.algebra.ring;
        let mut m = Matrix::zeros(ring, n, n);
        for (k, img) in self.images.iter().enumerate() {
            for i in 0..n {
                m.set(i, k, img.coeff(&Word(vec![i])));
            }
        }
        m
    }

    fn all_linear(&self) -> bool {
        self.images.iter().all(|p| p.higher_part().is_zero())
    }

    /// Invertibility for nilpotent varieties (and linear maps of free algebras).
    pub fn is_automorphism(&self) -> Result<bool, EndoError> {
        Ok(self.inverse()?.is_some())
    }

    /// Two-sided inverse by inverting the linear part and lifting degree by degree.
    pub fn inverse(&self) -> Result<Option<Endo>, EndoError> {
        let alg = &self.algebra;
        let steps = match alg.bound() {
            Some(b) => b,
            None if self.all_linear() => 1,
            None => return Err(EndoError::UnsupportedVariety(alg.variety)),
        };
        let Some(linv) = self.linear_part_matrix().inverse()? else { return Ok(None) };
        let h0 = Endo::from_linear_matrix(alg, &linv);
        let mut h = h0.clone();
        for _ in 0..steps {
            let err: Vec<NcPoly> = self
                .compose(&h)?
                .images
                .iter()
                .zip(NcPoly::gens(alg))
                .map(|(a, x)| a.sub(&x))
                .collect::<Result<_, _>>()?;
            if err.iter().all(NcPoly::is_zero) {
                break;
            }
            for (hk, ek) in h.images.iter_mut().zip(&err) {
                *hk = hk.sub(&h0.apply(ek)?)?;
            }
        }
        if self.compose(&h)?.is_identity() && h.compose(self)?.is_identity() {
            Ok(Some(h))
        } else {
            Ok(None)
        }
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.images.iter().map(|p| Value::String(print_poly(p))).collect())
    }

    pub fn from_json(alg: &Arc<Algebra>, v: &Value) -> Result<Endo, EndoError> {
        let arr = v.as_array().ok_or_else(|| EndoError::Syntax("expected a list of images".into()))?;
        let images = arr
            .iter()
            .map(|x| {
                x.as_str()
                    .ok_or_else(|| EndoError::Syntax("images must be strings".into()))
                    .and_then(|s| Ok(parse_poly(s, alg)?))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Endo::new(alg, images)
    }
}

/// `n^2` endomorphisms indexed by `(i, j)`, 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndoFamily {
    pub algebra: Arc<Algebra>,
    pub maps: Vec<Vec<Endo>>,
}

impl EndoFamily {
    pub fn n(&self) -> usize {
        self.maps.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Endo {
        &self.maps[i][j]
    }

    /// `e_ij o e_mk = delta_jm e_ik`; returns the first violated index quadruple.
    pub fn unit_relation_violation(&self) -> Result<Option<(usize, usize, usize, usize)>, EndoError> {
        let n = self.n();
        let zero = Endo::zero(&self.algebra);
        for i in 0..n {
            for j in 0..n {
                if self.maps[i][j].is_zero() {
                    return Ok(Some((i, j, i, j)));
                }
                for m in 0..n {
                    for k in 0..n {
                        let lhs = self.maps[i][j].compose(&self.maps[m][k])?;
                        let rhs = if j == m { &self.maps[i][k] } else { &zero };
                        if lhs != *rhs {
                            return Ok(Some((i, j, m, k)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn check_units(&self) -> Result<(), EndoError> {
        match self.unit_relation_violation()? {
            None => Ok(()),
            Some((i, j, m, k)) => Err(EndoError::NotMatrixUnits(format!(
                "relation fails for e_{}{} o e_{}{}",
                i + 1,
                j + 1,
                m + 1,
                k + 1
            ))),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut images = Map::new();
        for (i, row) in self.maps.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                images.insert(format!("e_{}_{}", i + 1, j + 1), e.to_json());
            }
        }
        json!({ "n": self.n(), "algebra": self.algebra.to_json(), "images": images })
    }

    pub fn from_json(v: &Value) -> Result<EndoFamily, EndoError> {
        let alg = Algebra::from_json(v.get("algebra").ok_or_else(|| EndoError::Syntax("missing `algebra`".into()))?)?;
        let n = v.get("n").and_then(Value::as_u64).unwrap_or(alg.n as u64) as usize;
        if n != alg.n {
            return Err(EndoError::Syntax("`n` disagrees with the algebra".into()));
        }
        let images = v.get("images").ok_or_else(|| EndoError::Syntax("missing `images`".into()))?;
        let mut maps = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let key = format!("e_{}_{}", i + 1, j + 1);
                let e = images.get(&key).ok_or_else(|| EndoError::Syntax(format!("missing `{key}`")))?;
                row.push(Endo::from_json(&alg, e)?);
            }
            maps.push(row);
        }
        Ok(EndoFamily { algebra: alg, maps })
    }
}

/// `e_ij(x_k) = delta_jk x_i`.
pub fn standard_endos(alg: &Arc<Algebra>) -> EndoFamily {
    let n = alg.n;
    let maps = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut images = vec![NcPoly::zero(alg); n];
                    images[j] = NcPoly::gen(alg, i);
                    Endo { algebra: alg.clone(), images }
                })
                .collect()
        })
        .collect();
    EndoFamily { algebra: alg.clone(), maps }
}

/// Entries `t_ij = family(i, j)(x_{sigma(j)})`; `sigma` is 0-based.
pub fn sigma_matrix(family: &EndoFamily, sigma: &[usize]) -> Result<Vec<Vec<NcPoly>>, EndoError> {
    let gens = NcPoly::gens(&family.algebra);
    family
        .maps
        .iter()
        .map(|row| row.iter().enumerate().map(|(j, e)| e.apply(&gens[sigma[j]])).collect())
        .collect()
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// A base on which a matrix-unit family acts by standard endomorphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardBase {
    /// Probing permutation with a nonzero linear part.
    pub sigma: Vec<usize>,
    pub rho: Matrix,
    /// Linear base conjugating the linear parts to elementary matrices.
    pub y: Vec<NcPoly>,
    pub z: Vec<NcPoly>,
}

/// Linear-part matrix of `f` in the reordered base `x_{sigma(1)}, ..., x_{sigma(n)}`.
fn linear_part_in(f: &Endo, sigma: &[usize]) -> Matrix {
    let n = f.algebra.n;
    let mut m = Matrix::zeros(&f.algebra.ring, n, n);
    for k in 0..n {
        for l in 0..n {
            m.set(l, k, f.images[sigma[k]].coeff(&Word(vec![sigma[l]])));
        }
    }
    m
}

/// Recover a base `z` with `family(i, j)(z_m) = delta_jm z_i`, if one exists.
pub fn find_standard_base(family: &EndoFamily) -> Result<Option<StandardBase>, EndoError> {
    let alg = &family.algebra;
    if alg.bound().is_none() {
        return Err(EndoError::UnsupportedVariety(alg.variety));
    }
    family.check_units()?;
    let n = family.n();
    let gens = NcPoly::gens(alg);
    let Some(sigma) = permutations(n).into_iter().find(|sigma| {
        family.maps.iter().any(|row| {
            row.iter().enumerate().any(|(j, e)| !e.images[sigma[j]].linear_part().is_zero())
        })
    }) else {
        return Ok(None);
    };
    let p: Vec<Vec<Matrix>> =
        family.maps.iter().map(|row| row.iter().map(|e| linear_part_in(e, &sigma)).collect()).collect();
    let conj = match conjugate_matrix_units(&p) {
        Ok(c) => c,
        Err(MatrixError::FactorizationFailed(_)) | Err(MatrixError::NotMatrixUnits(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let y: Vec<NcPoly> = (0..n)
        .map(|k| {
            let mut acc = NcPoly::zero(alg);
            for l in 0..n {
                acc = acc.add(&gens[sigma[l]].scale(conj.rho_inverse.get(l, k))).unwrap();
            }
            acc
        })
        .collect();
    let z: Vec<NcPoly> = (0..n).map(|i| family.get(i, 0).apply(&y[0])).collect::<Result<_, _>>()?;
    let theta = Endo::new(alg, z.clone())?;
    if !theta.is_automorphism()? {
        return Ok(None);
    }
    for i in 0..n {
        for j in 0..n {
            for (m, zm) in z.iter().enumerate() {
                let got = family.get(i, j).apply(zm)?;
                let want = if j == m { z[i].clone() } else { NcPoly::zero(alg) };
                if got != want {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(StandardBase { sigma, rho: conj.rho, y, z }))
}

/// An automorphism of the endomorphism semigroup, given with its inverse.
pub trait SemigroupAutomorphism {
    fn algebra(&self) -> &Arc<Algebra>;
    fn image(&self, nu: &Endo) -> Result<Endo, EndoError>;
    fn preimage(&self, nu: &Endo) -> Result<Endo, EndoError>;
}

/// `nu -> s nu s^-1` for an automorphism `s` of the algebra.
#[derive(Debug, Clone)]
pub struct ConjugationBy {
    pub s: Endo,
    pub s_inverse: Endo,
}

impl ConjugationBy {
    pub fn new(s: Endo) -> Result<ConjugationBy, EndoError> {
        let s_inverse = s.inverse()?.ok_or_else(|| EndoError::NotFromRecipe("not an automorphism".into()))?;
        Ok(ConjugationBy { s, s_inverse })
    }
}

impl SemigroupAutomorphism for ConjugationBy {
    fn algebra(&self) -> &Arc<Algebra> {
        &self.s.algebra
    }

    fn image(&self, nu: &Endo) -> Result<Endo, EndoError> {
        self.s.compose(nu)?.compose(&self.s_inverse)
    }

    fn preimage(&self, nu: &Endo) -> Result<Endo, EndoError> {
        self.s_inverse.compose(nu)?.compose(&self.s)
    }
}

/// The image of the standard family under a semigroup automorphism.
pub fn image_family(phi: &dyn SemigroupAutomorphism) -> Result<EndoFamily, EndoError> {
    let std = standard_endos(phi.algebra());
    let maps = std
        .maps
        .iter()
        .map(|row| row.iter().map(|e| phi.image(e)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EndoFamily { algebra: phi.algebra().clone(), maps })
}

#[derive(Debug, Clone)]
pub struct Gluing {
    pub alpha: Endo,
    /// The identity `alpha(t_ij) = alpha_i(t_ij)` holds for every `i, j`.
    pub identity_holds: bool,
    /// Some column of some X_sigma-matrix is a base, which pins `alpha` down.
    pub unique: bool,
}

/// Build `alpha = Phi(beta)` with `beta(x_i) = Phi^-1(alpha_i)(x_i)`, so that
/// `alpha(t_ij) = alpha_i(t_ij)` on the X_sigma-matrix of `Phi`.
pub fn glue_endomorphism(
    phi: &dyn SemigroupAutomorphism,
    alphas: &[Endo],
    sigma: &[usize],
) -> Result<Gluing, EndoError> {
    let alg = phi.algebra();
    let n = alg.n;
    if alphas.len() != n || sigma.len() != n {
        return Err(EndoError::AlgebraMismatch);
    }
    let gens = NcPoly::gens(alg);
    let mut y = Vec::with_capacity(n);
    for (i, a) in alphas.iter().enumerate() {
        let beta_i = phi.preimage(a).map_err(|e| EndoError::NotFromRecipe(e.to_string()))?;
        y.push(beta_i.apply(&gens[i])?);
    }
    let beta = Endo::new(alg, y)?;
    let alpha = phi.image(&beta)?;
    let family = image_family(phi)?;
    let t = sigma_matrix(&family, sigma)?;
    let mut identity_holds = true;
    for (i, row) in t.iter().enumerate() {
        for tij in row {
            identity_holds &= alpha.apply(tij)? == alphas[i].apply(tij)?;
        }
    }
    let unique = alg.bound().is_some() && has_base_column(&family)?;
    Ok(Gluing { alpha, identity_holds, unique })
}

fn has_base_column(family: &EndoFamily) -> Result<bool, EndoError> {
    let alg = &family.algebra;
    for sigma in permutations(alg.n) {
        let t = sigma_matrix(family, &sigma)?;
        for j in 0..alg.n {
            let col: Vec<NcPoly> = t.iter().map(|row| row[j].clone()).collect();
            if Endo::new(alg, col)?.is_automorphism()? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

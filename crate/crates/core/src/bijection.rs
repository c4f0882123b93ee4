//! Closed-form adjoint bijections `s: F -> F` and the derivative operations they induce.
//!
//! A recipe evaluates in four stages: the `phi`-semilinear base automorphism,
//! an optional word reversal, an optional twisted sum `a + b + gamma g(a, b)`
//! folded over the terms, and the scaling `w -> alpha^(|w|-1) w`.

use std::fmt;
use std::sync::Arc;

use rand::RngCore;
use serde_json::{json, Value};

use crate::endo::{Endo, EndoError, SemigroupAutomorphism};
use crate::gsolve::{eval2, verify_candidate, GError};
use crate::ncpoly::{parse_poly, print_poly, Algebra, NcPoly, PolyError, Variety, Word};
use crate::ring::{parse_ring, Elem, RingAutomorphism, RingError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BijectionError {
    #[error("values live in different algebras")]
    AlgebraMismatch,
    #[error("scalar {0} is not a unit")]
    NotUnit(String),
    #[error("base map is not an automorphism")]
    NotAutomorphism,
    #[error("twists need a nilpotent algebra of class at least 3, got {0}")]
    UnsupportedVariety(Variety),
    #[error("twist polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(usize),
    #[error("twist polynomial is not symmetric in x1, x2")]
    NotSymmetric,
    #[error("twist polynomial violates the cocycle system: {0}")]
    CocycleViolated(String),
    #[error("twisted sum is not compatible with scalars: {0}")]
    ScalarIncompatible(String),
    #[error("a twist over a ring of characteristic 0 has no finite power test")]
    TwistInCharZero,
    #[error("recipe: {0}")]
    Syntax(String),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Endo(#[from] EndoError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistData {
    /// Homogeneous of degree `m-1` in `x1, x2`.
    pub g: NcPoly,
    pub gamma: Elem,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BijectionRecipe {
    pub algebra: Arc<Algebra>,
    pub scalar: Elem,
    pub ring_auto: RingAutomorphism,
    pub base_auto: Endo,
    pub base_inverse: Endo,
    pub mirror: bool,
    pub twist: Option<TwistData>,
}

/// A bijection of the algebra with an inverse.
pub trait AdjointMap {
    fn algebra(&self) -> &Arc<Algebra>;
    fn apply(&self, a: &NcPoly) -> Result<NcPoly, BijectionError>;
    fn apply_inverse(&self, a: &NcPoly) -> Result<NcPoly, BijectionError>;
}

fn twist_class(alg: &Algebra) -> Result<usize, BijectionError> {
    match alg.variety {
        Variety::Nilpotent(m) if m >= 3 && alg.n >= 2 => Ok(m),
        v => Err(BijectionError::UnsupportedVariety(v)),
    }
}

/// Check that `g` defines a twisted addition on `alg`.
fn check_twist(alg: &Arc<Algebra>, g: &NcPoly, gamma: &Elem) -> Result<NcPoly, BijectionError> {
    let m = twist_class(alg)?;
    let ring = &alg.ring;
    if g.generators_used() > 2 {
        return Err(BijectionError::Poly(PolyError::GeneratorOutOfRange(g.generators_used())));
    }
    if !g.is_homogeneous() || g.degree().is_some_and(|d| d != m - 1) {
        return Err(BijectionError::NotHomogeneous(m - 1));
    }
    let g = g.embed(alg)?;
    let verdict = match verify_candidate(&g, m) {
        Ok(v) => v,
        Err(GError::Poly(e)) => return Err(e.into()),
        Err(e) => return Err(BijectionError::CocycleViolated(e.to_string())),
    };
    if let Some(w) = verdict.witness {
        return Err(if w.starts_with("not symmetric") {
            BijectionError::NotSymmetric
        } else {
            BijectionError::CocycleViolated(w)
        });
    }
    if ring.is_zero(gamma) || g.is_zero() {
        return Ok(g);
    }
    // the term-wise fold needs xi^(m-1) = xi and g(c1 x, c2 x) = 0 on all of K
    let elems = ring
        .elements()
        .ok_or_else(|| BijectionError::ScalarIncompatible(format!("{ring} is infinite, so xi^(m-1) = xi fails")))?;
    if let Some(xi) = elems.iter().find(|xi| ring.pow(xi, (m - 1) as u64) != **xi) {
        return Err(BijectionError::ScalarIncompatible(format!(
            "{}^{} != {}",
            ring.format_elem(xi),
            m - 1,
            ring.format_elem(xi)
        )));
    }
    let x1 = NcPoly::gen(alg, 0);
    for c1 in &elems {
        for c2 in &elems {
            if !eval2(&g, &x1.scale(c1), &x1.scale(c2))?.is_zero() {
                return Err(BijectionError::ScalarIncompatible(format!(
                    "g({}*x1, {}*x1) != 0",
                    ring.format_elem(c1),
                    ring.format_elem(c2)
                )));
            }
        }
    }
    Ok(g)
}

/// `a + b + gamma g(a, b)`.
fn twisted_sum(g: &NcPoly, gamma: &Elem, a: &NcPoly, b: &NcPoly) -> Result<NcPoly, PolyError> {
    a.add(b)?.add(&eval2(g, a, b)?.scale(gamma))
}

/// Fold the canonical term list through the twisted sum.
fn fold_twist(g: &NcPoly, gamma: &Elem, a: &NcPoly) -> Result<NcPoly, PolyError> {
    let mut acc = NcPoly::zero(&a.algebra);
    for (w, c) in a.terms() {
        let t = NcPoly::monomial(&a.algebra, w.clone(), c.clone());
        acc = twisted_sum(g, gamma, &acc, &t)?;
    }
    Ok(acc)
}

impl BijectionRecipe {
    pub fn identity(alg: &Arc<Algebra>) -> BijectionRecipe {
        BijectionRecipe {
            algebra: alg.clone(),
            scalar: alg.ring.one(),
            ring_auto: RingAutomorphism::Identity,
            base_auto: Endo::identity(alg),
            base_inverse: Endo::identity(alg),
            mirror: false,
            twist: None,
        }
    }

    pub fn new(
        alg: &Arc<Algebra>,
        scalar: Elem,
        ring_auto: RingAutomorphism,
        base_auto: Endo,
        mirror: bool,
        twist: Option<(NcPoly, Elem)>,
    ) -> Result<BijectionRecipe, BijectionError> {
        let ring = &alg.ring;
        if !ring.contains(&scalar) || !ring.is_unit(&scalar) {
            return Err(BijectionError::NotUnit(ring.format_elem(&scalar)));
        }
        ring_auto.validate(ring)?;
        if base_auto.algebra != *alg {
            return Err(BijectionError::AlgebraMismatch);
        }
        let base_inverse = base_auto.inverse()?.ok_or(BijectionError::NotAutomorphism)?;
        let twist = match twist {
            Some((g, gamma)) => {
                if !ring.contains(&gamma) {
                    return Err(BijectionError::AlgebraMismatch);
                }
                let g = check_twist(alg, &g, &gamma)?;
                Some(TwistData { g, gamma })
            }
            None => None,
        };
        Ok(BijectionRecipe { algebra: alg.clone(), scalar, ring_auto, base_auto, base_inverse, mirror, twist })
    }

    fn scale_words(&self, a: &NcPoly, alpha: &Elem) -> NcPoly {
        let ring = &self.algebra.ring;
        NcPoly::from_terms(
            &a.algebra,
            a.terms().map(|(w, c)| (w.clone(), ring.mul(&ring.pow(alpha, (w.len() - 1) as u64), c))),
        )
    }

    fn check(&self, a: &NcPoly) -> Result<(), BijectionError> {
        if a.algebra != self.algebra {
            Err(BijectionError::AlgebraMismatch)
        } else {
            Ok(())
        }
    }

    pub fn evaluate(&self, a: &NcPoly) -> Result<NcPoly, BijectionError> {
        self.check(a)?;
        let ring = &self.algebra.ring;
        let phi = self.ring_auto;
        let mut b = self.base_auto.apply(&a.map_coeffs(|r, c| phi.apply(r, c)))?;
        if self.mirror {
            b = b.mirror();
        }
        if let Some(t) = &self.twist {
            b = fold_twist(&t.g, &t.gamma, &b)?;
        }
        if !ring.is_one(&self.scalar) {
            b = self.scale_words(&b, &self.scalar);
        }
        Ok(b)
    }

    pub fn evaluate_inverse(&self, a: &NcPoly) -> Result<NcPoly, BijectionError> {
        self.check(a)?;
        let ring = &self.algebra.ring;
        let mut b = a.clone();
        if !ring.is_one(&self.scalar) {
            b = self.scale_words(&b, &ring.inverse(&self.scalar).unwrap());
        }
        if let Some(t) = &self.twist {
            b = fold_twist(&t.g, &ring.neg(&t.gamma), &b)?;
        }
        if self.mirror {
            b = b.mirror();
        }
        let phi_inv = self.ring_auto.inverse(ring);
        Ok(self.base_inverse.apply(&b)?.map_coeffs(|r, c| phi_inv.apply(r, c)))
    }

    /// `gamma alpha^(m-2)`, the coefficient of `g` in the derived sum.
    pub fn effective_gamma(&self) -> Option<Elem> {
        let t = self.twist.as_ref()?;
        let m = twist_class(&self.algebra).ok()?;
        let ring = &self.algebra.ring;
        Some(ring.mul(&t.gamma, &ring.pow(&self.scalar, (m - 2) as u64)))
    }

    /// `x -> s(nu(s^-1(x)))` on generators.
    pub fn conjugation_action(&self, nu: &Endo) -> Result<Endo, BijectionError> {
        conjugate_by(self, nu)
    }

    pub fn to_json(&self) -> Value {
        let ring = &self.algebra.ring;
        json!({
            "algebra": self.algebra.to_json(),
            "scalar": ring.format_elem(&self.scalar),
            "ringAuto": self.ring_auto.to_string(),
            "baseAuto": self.base_auto.to_json(),
            "mirror": self.mirror,
            "twist": self.twist.as_ref().map(|t| json!({ "g": print_poly(&t.g), "gamma": ring.format_elem(&t.gamma) })),
        })
    }

    /// Parse a recipe; `algebra` is used when the JSON carries none.
    pub fn from_json(v: &Value, algebra: Option<&Arc<Algebra>>) -> Result<BijectionRecipe, BijectionError> {
        let alg = match (v.get("algebra"), algebra) {
            (Some(a), _) => Algebra::from_json(a)?,
            (None, Some(a)) => a.clone(),
            (None, None) => return Err(BijectionError::Syntax("no algebra given".into())),
        };
        let ring = &alg.ring;
        let text = |key: &str, default: &str| -> Result<String, BijectionError> {
            match v.get(key) {
                None | Some(Value::Null) => Ok(default.to_string()),
                Some(Value::String(s)) => Ok(s.clone()),
                Some(Value::Number(n)) => Ok(n.to_string()),
                Some(other) => Err(BijectionError::Syntax(format!("`{key}` has unexpected value {other}"))),
            }
        };
        let scalar = ring.parse_elem(&text("scalar", "1")?)?;
        let ring_auto: RingAutomorphism = text("ringAuto", "identity")?.parse()?;
        let base_auto = match v.get("baseAuto") {
            None | Some(Value::Null) => Endo::identity(&alg),
            Some(b) => Endo::from_json(&alg, b)?,
        };
        let mirror = v.get("mirror").and_then(Value::as_bool).unwrap_or(false);
        let twist = match v.get("twist") {
            None | Some(Value::Null) => None,
            Some(t) => {
                let g = t.get("g").and_then(Value::as_str).ok_or_else(|| BijectionError::Syntax("twist needs `g`".into()))?;
                let gamma = match t.get("gamma") {
                    None => "1".to_string(),
                    Some(Value::String(s)) => s.clone(),
                    Some(Value::Number(n)) => n.to_string(),
                    Some(other) => return Err(BijectionError::Syntax(format!("bad gamma {other}"))),
                };
                Some((parse_poly(g, &alg)?, ring.parse_elem(&gamma)?))
            }
        };
        BijectionRecipe::new(&alg, scalar, ring_auto, base_auto, mirror, twist)
    }
}

impl AdjointMap for BijectionRecipe {
    fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    fn apply(&self, a: &NcPoly) -> Result<NcPoly, BijectionError> {
        self.evaluate(a)
    }

    fn apply_inverse(&self, a: &NcPoly) -> Result<NcPoly, BijectionError> {
        self.evaluate_inverse(a)
    }
}

impl SemigroupAutomorphism for BijectionRecipe {
    fn algebra(&self) -> &Arc<Algebra> {
        &self.algebra
    }

    fn image(&self, nu: &Endo) -> Result<Endo, EndoError> {
        conjugate_by(self, nu).map_err(|e| EndoError::NotFromRecipe(e.to_string()))
    }

    fn preimage(&self, nu: &Endo) -> Result<Endo, EndoError> {
        let images = NcPoly::gens(&self.algebra)
            .iter()
            .map(|x| {
                let v = nu.apply(&self.evaluate(x)?)?;
                self.evaluate_inverse(&v)
            })
            .collect::<Result<Vec<_>, BijectionError>>()
            .map_err(|e| EndoError::NotFromRecipe(e.to_string()))?;
        Endo::new(&self.algebra, images)
    }
}

/// `x_i -> s(nu(s^-1(x_i)))`.
pub fn conjugate_by(s: &dyn AdjointMap, nu: &Endo) -> Result<Endo, BijectionError> {
    if nu.algebra != *s.algebra() {
        return Err(BijectionError::AlgebraMismatch);
    }
    let images = NcPoly::gens(s.algebra())
        .iter()
        .map(|x| s.apply(&nu.apply(&s.apply_inverse(x)?)?))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Endo::new(s.algebra(), images)?)
}

/// The derivative operations of `s`, substituting along the base `u_i = s(x_i)`.
pub struct Derivative<'a> {
    s: &'a dyn AdjointMap,
    u: Vec<NcPoly>,
    u_inverse: Endo,
    /// `s(x1 + x2)` and `s(x1 x2)` written in the base `u`.
    sum: NcPoly,
    product: NcPoly,
}

impl<'a> Derivative<'a> {
    pub fn new(s: &'a dyn AdjointMap) -> Result<Derivative<'a>, BijectionError> {
        let alg = s.algebra();
        if alg.n < 2 {
            return Err(BijectionError::UnsupportedVariety(alg.variety));
        }
        let gens = NcPoly::gens(alg);
        let u: Vec<NcPoly> = gens.iter().map(|x| s.apply(x)).collect::<Result<_, _>>()?;
        let u_inverse = Endo::new(alg, u.clone())?.inverse()?.ok_or(BijectionError::NotAutomorphism)?;
        let sum = u_inverse.apply(&s.apply(&gens[0].add(&gens[1])?)?)?;
        let product = u_inverse.apply(&s.apply(&gens[0].mul(&gens[1])?)?)?;
        Ok(Derivative { s, u, u_inverse, sum, product })
    }

    /// Substitute `u_1 -> a`, `u_2 -> b`, keeping the other base elements.
    fn theta(&self, p: &NcPoly, a: &NcPoly, b: Option<&NcPoly>) -> Result<NcPoly, BijectionError> {
        self.substitute_base(&self.u_inverse.apply(p)?, a, b)
    }

    fn substitute_base(&self, p: &NcPoly, a: &NcPoly, b: Option<&NcPoly>) -> Result<NcPoly, BijectionError> {
        let mut imgs = self.u.clone();
        imgs[0] = a.clone();
        if let Some(b) = b {
            imgs[1] = b.clone();
        }
        Ok(p.substitute(&imgs)?)
    }

    pub fn star(&self, a: &NcPoly, b: &NcPoly) -> Result<NcPoly, BijectionError> {
        self.substitute_base(&self.product, a, Some(b))
    }

    pub fn bot(&self, a: &NcPoly, b: &NcPoly) -> Result<NcPoly, BijectionError> {
        self.substitute_base(&self.sum, a, Some(b))
    }

    pub fn circ(&self, xi: &Elem, a: &NcPoly) -> Result<NcPoly, BijectionError> {
        let x1 = NcPoly::gen(self.s.algebra(), 0);
        let p = self.s.apply(&x1.scale(xi))?;
        self.theta(&p, a, None)
    }
}

pub fn derivative_star(s: &dyn AdjointMap, a: &NcPoly, b: &NcPoly) -> Result<NcPoly, BijectionError> {
    Derivative::new(s)?.star(a, b)
}

pub fn derivative_bot(s: &dyn AdjointMap, a: &NcPoly, b: &NcPoly) -> Result<NcPoly, BijectionError> {
    Derivative::new(s)?.bot(a, b)
}

pub fn derivative_circ(s: &dyn AdjointMap, xi: &Elem, a: &NcPoly) -> Result<NcPoly, BijectionError> {
    Derivative::new(s)?.circ(xi, a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub identity: &'static str,
    pub a: String,
    pub b: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivativeReport {
    pub samples: usize,
    pub failures: Vec<Counterexample>,
}

impl DerivativeReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Check `s(ab) = s(a)*s(b)`, `s(a+b) = s(a) bot s(b)`, `s(xi a) = xi circ s(a)` on samples.
pub fn verify_derivative_isomorphism(
    s: &dyn AdjointMap,
    samples: usize,
    rng: &mut dyn RngCore,
) -> Result<DerivativeReport, BijectionError> {
    let d = Derivative::new(s)?;
    let alg = s.algebra();
    let max_len = alg.bound().map_or(3, |b| b - 1);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let a = NcPoly::random(alg, rng, 4, max_len);
        let b = NcPoly::random(alg, rng, 4, max_len);
        let xi = alg.ring.random(rng, 5);
        let (sa, sb) = (s.apply(&a)?, s.apply(&b)?);
        let checks: [(&'static str, NcPoly, NcPoly, String); 3] = [
            ("s(ab) = s(a)*s(b)", s.apply(&a.mul(&b)?)?, d.star(&sa, &sb)?, print_poly(&b)),
            ("s(a+b) = s(a) bot s(b)", s.apply(&a.add(&b)?)?, d.bot(&sa, &sb)?, print_poly(&b)),
            ("s(xi a) = xi circ s(a)", s.apply(&a.scale(&xi))?, d.circ(&xi, &sa)?, alg.ring.format_elem(&xi)),
        ];
        for (identity, lhs, rhs, other) in checks {
            if lhs != rhs {
                failures.push(Counterexample {
                    identity,
                    a: print_poly(&a),
                    b: other,
                    lhs: print_poly(&lhs),
                    rhs: print_poly(&rhs),
                });
            }
        }
    }
    Ok(DerivativeReport { samples, failures })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Inner,
    SemiInner(RingAutomorphism),
    Mirror,
    PSemiInner(u64),
    PMirror(u64),
    Other,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Inner => write!(f, "Inner"),
            Classification::SemiInner(phi) => write!(f, "SemiInner({phi})"),
            Classification::Mirror => write!(f, "Mirror"),
            Classification::PSemiInner(p) => write!(f, "PSemiInner({p})"),
            Classification::PMirror(p) => write!(f, "PMirror({p})"),
            Classification::Other => write!(f, "Other"),
        }
    }
}

/// `s^r(x1 + x2) = s^r(x1) + s^r(x2)` on the generic pair.
fn power_is_additive(s: &BijectionRecipe, r: u64) -> Result<bool, BijectionError> {
    let alg = &s.algebra;
    let (x1, x2) = (NcPoly::gen(alg, 0), NcPoly::gen(alg, 1));
    let (mut a, mut b, mut ab) = (x1.clone(), x2.clone(), x1.add(&x2)?);
    for _ in 0..r {
        a = s.evaluate(&a)?;
        b = s.evaluate(&b)?;
        ab = s.evaluate(&ab)?;
    }
    Ok(ab == a.add(&b)?)
}

pub fn classify(s: &BijectionRecipe) -> Result<Classification, BijectionError> {
    let twisted = s.twist.as_ref().is_some_and(|t| !s.algebra.ring.is_zero(&t.gamma) && !t.g.is_zero());
    if !twisted {
        return Ok(match (s.mirror, s.ring_auto.is_identity()) {
            (true, _) => Classification::Mirror,
            (false, true) => Classification::Inner,
            (false, false) => Classification::SemiInner(s.ring_auto),
        });
    }
    let p = s.algebra.ring.characteristic();
    if p == 0 {
        return Err(BijectionError::TwistInCharZero);
    }
    if power_is_additive(s, p)? && !power_is_additive(s, p - 1)? {
        Ok(if s.mirror { Classification::PMirror(p) } else { Classification::PSemiInner(p) })
    } else {
        Ok(Classification::Other)
    }
}

/// A recipe that only twists the addition (and applies `phi` to scalars).
pub fn build_twist(
    g: &NcPoly,
    gamma: &Elem,
    phi: RingAutomorphism,
    alg: &Arc<Algebra>,
) -> Result<BijectionRecipe, BijectionError> {
    BijectionRecipe::new(alg, alg.ring.one(), phi, Endo::identity(alg), false, Some((g.clone(), gamma.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerReport {
    pub p: u64,
    /// `(r, holds)` for `tau^r(a+b) = tau^r(a) + tau^r(b) + r gamma g(tau^r a, tau^r b)`.
    pub power_laws: Vec<(u64, bool)>,
    pub inverse_law: bool,
    pub power_is_identity: bool,
}

impl PowerReport {
    pub fn passed(&self) -> bool {
        self.power_laws.iter().all(|(_, ok)| *ok) && self.inverse_law && self.power_is_identity
    }
}

/// The twist stage alone, as a map fixing every monomial.
fn twist_only(s: &BijectionRecipe) -> Result<(NcPoly, Elem), BijectionError> {
    let t = s.twist.as_ref().ok_or_else(|| BijectionError::Syntax("recipe has no twist".into()))?;
    Ok((t.g.clone(), t.gamma.clone()))
}

/// Power and inverse laws of the twist, on the generic pair `(x1, x2)`.
pub fn twist_power_identity(s: &BijectionRecipe) -> Result<PowerReport, BijectionError> {
    let (g, gamma) = twist_only(s)?;
    let alg = &s.algebra;
    let ring = &alg.ring;
    let p = ring.characteristic();
    if p == 0 {
        return Err(BijectionError::TwistInCharZero);
    }
    let tau = |a: &NcPoly| fold_twist(&g, &gamma, a);
    let (x1, x2) = (NcPoly::gen(alg, 0), NcPoly::gen(alg, 1));
    let (mut a, mut b, mut ab) = (x1.clone(), x2.clone(), x1.add(&x2)?);
    let mut power_laws = Vec::new();
    for r in 1..=p {
        a = tau(&a)?;
        b = tau(&b)?;
        ab = tau(&ab)?;
        let coeff = ring.mul_int(&gamma, r as i64);
        let rhs = a.add(&b)?.add(&eval2(&g, &a, &b)?.scale(&coeff))?;
        power_laws.push((r, ab == rhs));
    }
    let power_is_identity = ab == x1.add(&x2)? && a == x1 && b == x2;
    let untwist = |v: &NcPoly| fold_twist(&g, &ring.neg(&gamma), v);
    let (ia, ib, iab) = (untwist(&x1)?, untwist(&x2)?, untwist(&x1.add(&x2)?)?);
    let coeff = ring.mul_int(&gamma, p as i64 - 1);
    let inverse_law = iab == ia.add(&ib)?.add(&eval2(&g, &ia, &ib)?.scale(&coeff))?;
    Ok(PowerReport { p, power_laws, inverse_law, power_is_identity })
}

/// Every element of a finite nilpotent algebra, as coefficient vectors on its basis words.
pub fn all_elements(alg: &Arc<Algebra>) -> Option<Vec<NcPoly>> {
    let words: Vec<Word> = alg.basis_words()?;
    let elems = alg.ring.elements()?;
    let q = elems.len();
    let total = q.checked_pow(words.len() as u32)?;
    Some(
        (0..total)
            .map(|mut idx| {
                NcPoly::from_terms(
                    alg,
                    words.iter().map(|w| {
                        let c = elems[idx % q].clone();
                        idx /= q;
                        (w.clone(), c)
                    }),
                )
            })
            .collect(),
    )
}

/// Read a ring literal and build the named algebra.
pub fn algebra_from_flags(ring: &str, n: usize, m: Option<usize>) -> Result<Arc<Algebra>, BijectionError> {
    let ring = parse_ring(ring)?;
    Ok(match m {
        Some(m) => Algebra::nilpotent(ring, n, m),
        None => Algebra::free(ring, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::endo::{find_standard_base, image_family};
    use crate::gsolve::binomial_solution;
    use crate::ring::Ring;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2n3() -> Arc<Algebra> {
        Algebra::nilpotent(Ring::PrimeField(2), 2, 3)
    }

    fn poly(t: &str, a: &Arc<Algebra>) -> NcPoly {
        parse_poly(t, a).unwrap()
    }

    fn f2_twist(mirror: bool) -> BijectionRecipe {
        let a = f2n3();
        let g = poly("x1*x2 + x2*x1", &a);
        BijectionRecipe::new(&a, a.ring.one(), RingAutomorphism::Identity, Endo::identity(&a), mirror, Some((g, a.ring.one())))
            .unwrap()
    }

    #[test]
    fn identity_and_mirror_recipes() {
        let a = Algebra::nilpotent(Ring::Integers, 2, 4);
        let id = BijectionRecipe::identity(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let f = NcPoly::random(&a, &mut rng, 5, 3);
            assert_eq!(id.evaluate(&f).unwrap(), f);
        }
        let mut m = BijectionRecipe::identity(&a);
        m.mirror = true;
        assert_eq!(m.evaluate(&poly("x1*x2", &a)).unwrap(), poly("x2*x1", &a));
    }

    #[test]
    fn twist_on_sum_of_generators() {
        let s = f2_twist(false);
        let a = &s.algebra;
        assert_eq!(s.evaluate(&poly("x1 + x2", a)).unwrap(), poly("x1 + x2 + x1*x2 + x2*x1", a));
    }

    #[test]
    fn twist_squares_to_identity_on_all_64_elements() {
        let s = f2_twist(false);
        let all = all_elements(&s.algebra).unwrap();
        assert_eq!(all.len(), 64);
        for x in &all {
            assert_eq!(s.evaluate(&s.evaluate(x).unwrap()).unwrap(), *x);
            assert_eq!(s.evaluate_inverse(x).unwrap(), s.evaluate(x).unwrap());
        }
    }

    #[test]
    fn derivative_examples() {
        let a = Algebra::nilpotent(Ring::Integers, 2, 4);
        let (x, y) = (poly("x1 + x1*x2", &a), poly("x2 - 2*x1", &a));
        let id = BijectionRecipe::identity(&a);
        assert_eq!(derivative_star(&id, &x, &y).unwrap(), x.mul(&y).unwrap());
        assert_eq!(derivative_bot(&id, &x, &y).unwrap(), x.add(&y).unwrap());
        let three = a.ring.from_i64(3);
        assert_eq!(derivative_circ(&id, &three, &x).unwrap(), x.scale(&three));
        let mut m = BijectionRecipe::identity(&a);
        m.mirror = true;
        assert_eq!(derivative_star(&m, &x, &y).unwrap(), y.mul(&x).unwrap());
        let q = Algebra::nilpotent(Ring::Rationals, 2, 4);
        let alpha = q.ring.from_i64(2);
        let s = BijectionRecipe::new(&q, alpha.clone(), RingAutomorphism::Identity, Endo::identity(&q), false, None).unwrap();
        let (x, y) = (poly("x1 + x1*x2", &q), poly("x2", &q));
        assert_eq!(derivative_star(&s, &x, &y).unwrap(), x.mul(&y).unwrap().scale(&alpha));
    }

    #[test]
    fn twist_sum_picks_up_g() {
        let s = f2_twist(false);
        let a = &s.algebra;
        let (x, y) = (poly("x1 + x1*x2", a), poly("x2 + x1", a));
        let g = &s.twist.as_ref().unwrap().g;
        let want = x.add(&y).unwrap().add(&eval2(g, &x, &y).unwrap()).unwrap();
        assert_eq!(derivative_bot(&s, &x, &y).unwrap(), want);
    }

    #[test]
    fn classification_examples() {
        let a = Algebra::nilpotent(Ring::Integers, 2, 3);
        assert_eq!(classify(&BijectionRecipe::identity(&a)).unwrap(), Classification::Inner);
        let f9 = parse_ring("F9=F3[t]/(t^2+1)").unwrap();
        let b = Algebra::nilpotent(f9, 2, 3);
        let mut s = BijectionRecipe::identity(&b);
        s.ring_auto = RingAutomorphism::Frobenius(1);
        assert_eq!(classify(&s).unwrap(), Classification::SemiInner(RingAutomorphism::Frobenius(1)));
        assert_eq!(classify(&f2_twist(false)).unwrap(), Classification::PSemiInner(2));
        assert_eq!(classify(&f2_twist(true)).unwrap(), Classification::PMirror(2));
        let twisted = f2_twist(false);
        assert!(!power_is_additive(&twisted, 1).unwrap());
        assert!(power_is_additive(&twisted, 2).unwrap());
    }

    #[test]
    fn twist_in_char_zero_is_rejected() {
        let a = Algebra::nilpotent(Ring::Integers, 2, 3);
        let g = poly("x1*x2 + x2*x1", &a);
        let built = build_twist(&g, &a.ring.one(), RingAutomorphism::Identity, &a);
        assert!(matches!(built, Err(BijectionError::CocycleViolated(w)) if w.starts_with("g(x1,-x1)")));
        // a valid cocycle over F4, where t^2 != t breaks scalar compatibility
        let f4 = Algebra::nilpotent(parse_ring("F4=F2[t]/(t^2+t+1)").unwrap(), 2, 3);
        let g4 = poly("x1*x2 + x2*x1", &f4);
        let built = build_twist(&g4, &f4.ring.one(), RingAutomorphism::Identity, &f4);
        assert!(matches!(built, Err(BijectionError::ScalarIncompatible(_))));
        let mut raw = BijectionRecipe::identity(&a);
        raw.twist = Some(TwistData { g, gamma: a.ring.one() });
        assert_eq!(classify(&raw), Err(BijectionError::TwistInCharZero));
    }

    #[test]
    fn build_twist_validation() {
        let a = f2n3();
        let zero = build_twist(&NcPoly::zero(&a), &a.ring.one(), RingAutomorphism::Identity, &a).unwrap();
        assert_eq!(classify(&zero).unwrap(), Classification::Inner);
        let e = |t: &str| build_twist(&poly(t, &a), &a.ring.one(), RingAutomorphism::Identity, &a);
        assert!(matches!(e("x1*x2"), Err(BijectionError::NotSymmetric)));
        assert!(matches!(e("x1 + x2"), Err(BijectionError::NotHomogeneous(2))));
        assert!(matches!(e("x1*x1"), Err(BijectionError::NotSymmetric)));
        assert!(matches!(e("x1*x1 + x2*x2"), Err(BijectionError::CocycleViolated(_))));
        let f3 = Algebra::nilpotent(Ring::PrimeField(3), 2, 4);
        let g = binomial_solution(&f3.ring, 4).embed(&f3).unwrap();
        let s = build_twist(&g, &f3.ring.one(), RingAutomorphism::Identity, &f3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = NcPoly::random(&f3, &mut rng, 6, 3);
            let mut y = x.clone();
            for _ in 0..3 {
                y = s.evaluate(&y).unwrap();
            }
            assert_eq!(y, x);
        }
    }

    #[test]
    fn power_laws() {
        let rep = twist_power_identity(&f2_twist(false)).unwrap();
        assert!(rep.passed(), "{rep:?}");
        let f3 = Algebra::nilpotent(Ring::PrimeField(3), 2, 4);
        let g = binomial_solution(&f3.ring, 4).embed(&f3).unwrap();
        let s = build_twist(&g, &f3.ring.from_i64(2), RingAutomorphism::Identity, &f3).unwrap();
        assert!(twist_power_identity(&s).unwrap().passed());
    }

    #[test]
    fn conjugation_of_endomorphisms() {
        let a = Algebra::nilpotent(Ring::Integers, 2, 3);
        let nu = Endo::new(&a, vec![poly("x1 + x2*x2", &a), poly("2*x1", &a)]).unwrap();
        assert_eq!(BijectionRecipe::identity(&a).conjugation_action(&nu).unwrap(), nu);
        let s = f2_twist(false);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let mk = |rng: &mut ChaCha8Rng| {
                Endo::new(&s.algebra, (0..2).map(|_| NcPoly::random(&s.algebra, rng, 3, 2)).collect()).unwrap()
            };
            let (nu, mu) = (mk(&mut rng), mk(&mut rng));
            let lhs = s.conjugation_action(&nu.compose(&mu).unwrap()).unwrap();
            let rhs = s.conjugation_action(&nu).unwrap().compose(&s.conjugation_action(&mu).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn semi_inner_family_is_standard_in_the_moved_base() {
        let a = Algebra::nilpotent(Ring::PrimeField(3), 2, 3);
        let sigma = Endo::new(&a, vec![poly("x1 + x2 + x1*x2", &a), poly("x2", &a)]).unwrap();
        let s = BijectionRecipe::new(&a, a.ring.from_i64(2), RingAutomorphism::Identity, sigma, false, None).unwrap();
        let fam = image_family(&s).unwrap();
        assert!(find_standard_base(&fam).unwrap().is_some());
    }

    #[test]
    fn recipe_json_round_trip() {
        let s = f2_twist(true);
        let v = s.to_json();
        assert_eq!(v["twist"]["g"], json!("x1*x2 + x2*x1"));
        assert_eq!(BijectionRecipe::from_json(&v, None).unwrap(), s);
    }

    struct Corrupted<'a>(&'a BijectionRecipe);

    impl AdjointMap for Corrupted<'_> {
        fn algebra(&self) -> &Arc<Algebra> {
            &self.0.algebra
        }

        fn apply(&self, a: &NcPoly) -> Result<NcPoly, BijectionError> {
            let mut v = self.0.evaluate(a)?;
            // flip the coefficient of x1*x2 whenever x1*x1 is present
            if !a.coeff(&Word(vec![0, 0])).eq(&a.ring().zero()) {
                v.add_term(Word(vec![0, 1]), a.ring().one());
            }
            Ok(v)
        }

        fn apply_inverse(&self, a: &NcPoly) -> Result<NcPoly, BijectionError> {
            self.0.evaluate_inverse(a)
        }
    }

    #[test]
    fn derivative_identities_hold_and_detect_corruption() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = f2_twist(false);
        assert!(verify_derivative_isomorphism(&s, 100, &mut rng).unwrap().passed());
        let bad = Corrupted(&s);
        let rep = verify_derivative_isomorphism(&bad, 100, &mut rng).unwrap();
        assert!(!rep.passed());
    }
}

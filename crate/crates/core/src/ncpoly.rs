//! Noncommutative polynomials over a [`Ring`], with optional nilpotent truncation.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::Rng as _;
use rand::RngCore;
use serde_json::{json, Value};

use crate::matrix::{kernel_basis, Matrix, MatrixError};
use crate::ring::{parse_ring, Elem, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomials live in different algebras")]
    AlgebraMismatch,
    #[error("generator x{0} is out of range")]
    GeneratorOutOfRange(usize),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("non-canonical coefficient: {0}")]
    NonCanonicalCoefficient(String),
    #[error(transparent)]
    Ring(RingError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

impl From<RingError> for PolyError {
    fn from(e: RingError) -> Self {
        match e {
            RingError::NonCanonical(s) => PolyError::NonCanonicalCoefficient(s),
            other => PolyError::Ring(other),
        }
    }
}

/// A word in the generators, 0-based. Ordered by length, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<usize>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// All words of exactly `len` letters over `n` generators, in canonical order.
    pub fn all(n: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word(Vec::new())];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..n).map(move |g| {
                        let mut v = w.0.clone();
                        v.push(g);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|g| format!("x{}", g + 1)).collect();
        write!(f, "{}", parts.join("*"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variety {
    Free,
    /// Products of `m` or more generators vanish.
    Nilpotent(usize),
    ZeroMultiplication,
}

impl fmt::Display for Variety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variety::Free => write!(f, "free"),
            Variety::Nilpotent(m) => write!(f, "nilpotent({m})"),
            Variety::ZeroMultiplication => write!(f, "zero"),
        }
    }
}

impl std::str::FromStr for Variety {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "free" => Ok(Variety::Free),
            "zero" => Ok(Variety::ZeroMultiplication),
            _ => s
                .strip_prefix("nilpotent(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|m| m.parse().ok())
                .filter(|m| *m >= 2)
                .map(Variety::Nilpotent)
                .ok_or_else(|| PolyError::Syntax(format!("unknown variety `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    pub ring: Ring,
    pub n: usize,
    pub variety: Variety,
    /// Whether the empty word (a unit) is allowed; off for algebras without 1.
    pub unital: bool,
}

impl Algebra {
    pub fn new(ring: Ring, n: usize, variety: Variety) -> Arc<Algebra> {
        assert!(n >= 1, "at least one generator");
        if let Variety::Nilpotent(m) = variety {
            assert!(m >= 2, "nilpotency class must be at least 2");
        }
        Arc::new(Algebra { ring, n, variety, unital: false })
    }

    pub fn free(ring: Ring, n: usize) -> Arc<Algebra> {
        Algebra::new(ring, n, Variety::Free)
    }

    pub fn nilpotent(ring: Ring, n: usize, m: usize) -> Arc<Algebra> {
        Algebra::new(ring, n, Variety::Nilpotent(m))
    }

    /// Words of this length or longer are zero.
    pub fn bound(&self) -> Option<usize> {
        match self.variety {
            Variety::Free => None,
            Variety::Nilpotent(m) => Some(m),
            Variety::ZeroMultiplication => Some(2),
        }
    }

    pub fn keeps(&self, len: usize) -> bool {
        self.bound().is_none_or(|b| len < b) && (len > 0 || self.unital)
    }

    /// Same ring and variety with a different number of generators.
    pub fn with_generators(&self, n: usize) -> Arc<Algebra> {
        Arc::new(Algebra { n, ..self.clone() })
    }

    /// Every word that survives truncation, for nilpotent varieties.
    pub fn basis_words(&self) -> Option<Vec<Word>> {
        let b = self.bound()?;
        Some((if self.unital { 0 } else { 1 }..b).flat_map(|l| Word::all(self.n, l)).collect())
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "ring": self.ring.to_string(), "n": self.n, "variety": self.variety.to_string() });
        if self.unital {
            v["unital"] = json!(true);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Arc<Algebra>, PolyError> {
        let bad = |what: &str| PolyError::Syntax(format!("algebra: missing or invalid `{what}`"));
        let ring = parse_ring(v.get("ring").and_then(Value::as_str).ok_or_else(|| bad("ring"))?)?;
        let n = v.get("n").and_then(Value::as_u64).filter(|n| *n >= 1).ok_or_else(|| bad("n"))? as usize;
        let variety: Variety = v.get("variety").and_then(Value::as_str).ok_or_else(|| bad("variety"))?.parse()?;
        let unital = v.get("unital").and_then(Value::as_bool).unwrap_or(false);
        Ok(Arc::new(Algebra { ring, n, variety, unital }))
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcPoly {
    pub algebra: Arc<Algebra>,
    terms: BTreeMap<Word, Elem>,
}

impl NcPoly {
    pub fn zero(alg: &Arc<Algebra>) -> NcPoly {
        NcPoly { algebra: alg.clone(), terms: BTreeMap::new() }
    }

    /// The generator `x_{i+1}` (0-based `i`).
    pub fn gen(alg: &Arc<Algebra>, i: usize) -> NcPoly {
        assert!(i < alg.n, "generator index out of range");
        NcPoly::monomial(alg, Word(vec![i]), alg.ring.one())
    }

    pub fn gens(alg: &Arc<Algebra>) -> Vec<NcPoly> {
        (0..alg.n).map(|i| NcPoly::gen(alg, i)).collect()
    }

    pub fn monomial(alg: &Arc<Algebra>, w: Word, c: Elem) -> NcPoly {
        let mut p = NcPoly::zero(alg);
        p.add_term(w, c);
        p
    }

    pub fn from_terms(alg: &Arc<Algebra>, terms: impl IntoIterator<Item = (Word, Elem)>) -> NcPoly {
        let mut p = NcPoly::zero(alg);
        for (w, c) in terms {
            p.add_term(w, c);
        }
        p
    }

    /// Add `c * w`, applying truncation and dropping zeros.
    pub fn add_term(&mut self, w: Word, c: Elem) {
        let alg = &self.algebra;
        if !alg.keeps(w.len()) || alg.ring.is_zero(&c) {
            return;
        }
        debug_assert!(w.0.iter().all(|g| *g < alg.n));
        let ring = &alg.ring;
        match self.terms.get_mut(&w) {
            Some(old) => {
                let v = ring.add(old, &c);
                if ring.is_zero(&v) {
                    self.terms.remove(&w);
                } else {
                    *old = v;
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.algebra.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, w: &Word) -> Elem {
        self.terms.get(w).cloned().unwrap_or_else(|| self.ring().zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest word length present, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn support(&self) -> BTreeSet<Word> {
        self.terms.keys().cloned().collect()
    }

    /// Largest generator index used, plus one.
    pub fn generators_used(&self) -> usize {
        self.terms.keys().flat_map(|w| w.0.iter()).map(|g| g + 1).max().unwrap_or(0)
    }

    fn check(&self, other: &NcPoly) -> Result<(), PolyError> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(PolyError::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &NcPoly) -> Result<NcPoly, PolyError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &NcPoly) -> Result<NcPoly, PolyError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        self.map_coeffs(|r, c| r.neg(c))
    }

    pub fn scale(&self, xi: &Elem) -> NcPoly {
        self.map_coeffs(|r, c| r.mul(xi, c))
    }

    /// Apply `f` to every coefficient, dropping terms that become zero.
    pub fn map_coeffs(&self, f: impl Fn(&Ring, &Elem) -> Elem) -> NcPoly {
        let ring = self.ring();
        NcPoly::from_terms(&self.algebra, self.terms.iter().map(|(w, c)| (w.clone(), f(ring, c))))
    }

    /// Apply `f` to every word (with truncation), keeping coefficients.
    pub fn map_words(&self, f: impl Fn(&Word) -> Word) -> NcPoly {
        NcPoly::from_terms(&self.algebra, self.terms.iter().map(|(w, c)| (f(w), c.clone())))
    }

    pub fn mul(&self, other: &NcPoly) -> Result<NcPoly, PolyError> {
        self.check(other)?;
        let ring = self.ring();
        let mut out = NcPoly::zero(&self.algebra);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if out.algebra.keeps(u.len() + v.len()) {
                    out.add_term(u.concat(v), ring.mul(a, b));
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: usize) -> Result<NcPoly, PolyError> {
        assert!(e >= 1, "no unit in algebras without 1");
        let mut acc = self.clone();
        for _ in 1..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// `a*b - b*a`.
    pub fn commutator(&self, other: &NcPoly) -> Result<NcPoly, PolyError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Image under the multiplicative linear map `x_i -> images[i]`.
    pub fn substitute(&self, images: &[NcPoly]) -> Result<NcPoly, PolyError> {
        let target = match images.first() {
            Some(p) => p.algebra.clone(),
            None => return Err(PolyError::AlgebraMismatch),
        };
        if images.iter().any(|p| p.algebra != target) || target.ring != self.algebra.ring {
            return Err(PolyError::AlgebraMismatch);
        }
        let (sb, tb) = (self.algebra.bound(), target.bound());
        if sb.is_some() && tb.is_none_or(|t| t > sb.unwrap()) {
            return Err(PolyError::AlgebraMismatch);
        }
        if let Some(g) = self.terms.keys().flat_map(|w| w.0.iter()).find(|g| **g >= images.len()) {
            return Err(PolyError::GeneratorOutOfRange(g + 1));
        }
        let mut out = NcPoly::zero(&target);
        for (w, c) in &self.terms {
            let mut prod = images[w.0[0]].clone();
            for g in &w.0[1..] {
                if prod.is_zero() {
                    break;
                }
                prod = prod.mul(&images[*g])?;
            }
            for (u, a) in prod.terms {
                out.add_term(u, target.ring.mul(c, &a));
            }
        }
        Ok(out)
    }

    /// Reverse every word.
    pub fn mirror(&self) -> NcPoly {
        self.map_words(Word::reversed)
    }

    /// Same terms in another algebra over the same ring (truncating as needed).
    pub fn embed(&self, alg: &Arc<Algebra>) -> Result<NcPoly, PolyError> {
        if alg.ring != self.algebra.ring {
            return Err(PolyError::AlgebraMismatch);
        }
        if self.generators_used() > alg.n {
            return Err(PolyError::GeneratorOutOfRange(self.generators_used()));
        }
        Ok(NcPoly::from_terms(alg, self.terms.iter().map(|(w, c)| (w.clone(), c.clone()))))
    }

    pub fn homogeneous_component(&self, k: usize) -> NcPoly {
        NcPoly::from_terms(
            &self.algebra,
            self.terms.iter().filter(|(w, _)| w.len() == k).map(|(w, c)| (w.clone(), c.clone())),
        )
    }

    pub fn linear_part(&self) -> NcPoly {
        self.homogeneous_component(1)
    }

    pub fn higher_part(&self) -> NcPoly {
        NcPoly::from_terms(
            &self.algebra,
            self.terms.iter().filter(|(w, _)| w.len() >= 2).map(|(w, c)| (w.clone(), c.clone())),
        )
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut lens = self.terms.keys().map(Word::len);
        match lens.next() {
            Some(l) => lens.all(|x| x == l),
            None => true,
        }
    }

    /// Random polynomial with up to `max_terms` terms of length `1..=max_len`.
    pub fn random(alg: &Arc<Algebra>, rng: &mut dyn RngCore, max_terms: usize, max_len: usize) -> NcPoly {
        let max_len = alg.bound().map_or(max_len, |b| max_len.min(b - 1)).max(1);
        let mut p = NcPoly::zero(alg);
        for _ in 0..rng.gen_range(0..=max_terms) {
            let len = rng.gen_range(1..=max_len);
            let w = Word((0..len).map(|_| rng.gen_range(0..alg.n)).collect());
            p.add_term(w, alg.ring.random(rng, 5));
        }
        p
    }

    /// Random homogeneous polynomial of degree `deg`.
    pub fn random_homogeneous(alg: &Arc<Algebra>, rng: &mut dyn RngCore, max_terms: usize, deg: usize) -> NcPoly {
        let mut p = NcPoly::zero(alg);
        for _ in 0..rng.gen_range(0..=max_terms) {
            let w = Word((0..deg).map(|_| rng.gen_range(0..alg.n)).collect());
            p.add_term(w, alg.ring.random(rng, 5));
        }
        p
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_poly(self))
    }
}

/// Coefficients print bare when they are plain integers or fractions.
fn coeff_text(ring: &Ring, c: &Elem) -> String {
    let s = ring.format_elem(c);
    let simple = s.split('/').all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit())) && s.matches('/').count() <= 1;
    if simple {
        s
    } else {
        format!("({s})")
    }
}

pub fn print_poly(p: &NcPoly) -> String {
    let ring = p.ring();
    let mut out = String::new();
    for (i, (w, c)) in p.terms.iter().enumerate() {
        let negative = ring.prints_negative(c);
        let c = if negative { ring.neg(c) } else { c.clone() };
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let word = w.to_string();
        if w.is_empty() {
            out.push_str(&coeff_text(ring, &c));
        } else if ring.is_one(&c) {
            out.push_str(&word);
        } else {
            out.push_str(&format!("{}*{word}", coeff_text(ring, &c)));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parse `term (('+'|'-') term)*` where a term is a `*`-product of coefficient
/// literals and generators `x<i>`. Composite coefficients are parenthesized.
pub fn parse_poly(text: &str, alg: &Arc<Algebra>) -> Result<NcPoly, PolyError> {
    let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(PolyError::Syntax("empty polynomial".into()));
    }
    let ring = &alg.ring;
    let err = |at: usize, msg: &str| PolyError::Syntax(format!("{msg} at position {at} in `{}`", text.trim()));
    let mut out = NcPoly::zero(alg);
    let mut i = 0;
    let mut first = true;
    while i < s.len() {
        let mut negative = false;
        if s[i] == '+' || s[i] == '-' {
            negative = s[i] == '-';
            i += 1;
        } else if !first {
            return Err(err(i, "expected `+` or `-`"));
        }
        first = false;
        let mut coeff = ring.one();
        let mut word = Vec::new();
        let mut saw_coeff = false;
        loop {
            if i >= s.len() {
                return Err(err(i, "expected a factor"));
            }
            match s[i] {
                '(' => {
                    let mut depth = 0;
                    let start = i + 1;
                    let mut end = None;
                    for (j, ch) in s.iter().enumerate().skip(i) {
                        match ch {
                            '(' => depth += 1,
                            ')' => {
                                depth -= 1;
                                if depth == 0 {
                                    end = Some(j);
                                    break;
                                }
                            }
                            _ => {}
                        }
                    }
                    let end = end.ok_or_else(|| err(i, "unbalanced parenthesis"))?;
                    let lit: String = s[start..end].iter().collect();
                    coeff = ring.mul(&coeff, &ring.parse_elem(&lit)?);
                    saw_coeff = true;
                    i = end + 1;
                }
                'x' => {
                    let start = i + 1;
                    i = start;
                    while i < s.len() && s[i].is_ascii_digit() {
                        i += 1;
                    }
                    let idx: usize = s[start..i]
                        .iter()
                        .collect::<String>()
                        .parse()
                        .map_err(|_| err(start, "expected generator index"))?;
                    if idx == 0 || idx > alg.n {
                        return Err(PolyError::GeneratorOutOfRange(idx));
                    }
                    word.push(idx - 1);
                }
                c if c.is_ascii_digit() || c == 't' || c == 'w' => {
                    let start = i;
                    i += 1;
                    while i < s.len() && (s[i].is_ascii_digit() || s[i] == '/' || s[i] == '^') {
                        i += 1;
                    }
                    let lit: String = s[start..i].iter().collect();
                    coeff = ring.mul(&coeff, &ring.parse_elem(&lit)?);
                    saw_coeff = true;
                }
                _ => return Err(err(i, "unexpected character")),
            }
            if i < s.len() && s[i] == '*' {
                i += 1;
            } else {
                break;
            }
        }
        if negative {
            coeff = ring.neg(&coeff);
        }
        if word.is_empty() {
            if !saw_coeff {
                return Err(err(i, "empty term"));
            }
            if !ring.is_zero(&coeff) && !alg.unital {
                return Err(PolyError::Syntax(format!(
                    "constant term in an algebra without 1 in `{}`",
                    text.trim()
                )));
            }
        }
        out.add_term(Word(word), coeff);
    }
    Ok(out)
}

/// Which argument of a two-variable polynomial receives the fresh `x3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    /// `f(x1 + x3, x2)`
    First,
    /// `f(x1, x2 + x3)`
    Second,
}

/// Lift a polynomial in `x1, x2` to an algebra with at least three generators.
fn lift_two_variable(f: &NcPoly) -> Result<(Arc<Algebra>, NcPoly), PolyError> {
    if f.generators_used() > 2 {
        return Err(PolyError::GeneratorOutOfRange(f.generators_used()));
    }
    let alg = f.algebra.with_generators(f.algebra.n.max(3));
    let lifted = f.embed(&alg)?;
    Ok((alg, lifted))
}

/// Images of the generators with `x_j -> x_j + x3` for the shifted slot.
fn shift_images(alg: &Arc<Algebra>, shift: Shift) -> Vec<NcPoly> {
    let mut imgs = NcPoly::gens(alg);
    let slot = match shift {
        Shift::First => 0,
        Shift::Second => 1,
    };
    imgs[slot] = imgs[slot].add(&NcPoly::gen(alg, 2)).unwrap();
    imgs
}

/// Support of `f(x1 + x3, x2)` (or the `x2` variant).
pub fn support_after_shift(f: &NcPoly, shift: Shift) -> Result<BTreeSet<Word>, PolyError> {
    let (alg, f) = lift_two_variable(f)?;
    Ok(f.substitute(&shift_images(&alg, shift))?.support())
}

/// `P(x1+x3, x2) = P(x1,x2) + P(x3,x2)` and `P(x1, x2+x3) = P(x1,x2) + P(x1,x3)`.
pub fn is_distributive(p: &NcPoly) -> Result<bool, PolyError> {
    let (alg, p) = lift_two_variable(p)?;
    for shift in [Shift::First, Shift::Second] {
        let lhs = p.substitute(&shift_images(&alg, shift))?;
        let mut other = NcPoly::gens(&alg);
        match shift {
            Shift::First => other[0] = NcPoly::gen(&alg, 2),
            Shift::Second => other[1] = NcPoly::gen(&alg, 2),
        }
        let rhs = p.add(&p.substitute(&other)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(alpha, beta)` with `P = alpha x1x2 + beta x2x1`, when `P` has that shape.
pub fn classify_distributive(p: &NcPoly) -> Result<Option<(Elem, Elem)>, PolyError> {
    if p.generators_used() > 2 {
        return Err(PolyError::GeneratorOutOfRange(p.generators_used()));
    }
    let (w12, w21) = (Word(vec![0, 1]), Word(vec![1, 0]));
    if p.terms().any(|(w, _)| *w != w12 && *w != w21) {
        return Ok(None);
    }
    Ok(Some((p.coeff(&w12), p.coeff(&w21))))
}

/// Basis of the distributive polynomials in `x1, x2` of degree `1..=max_deg`,
/// found as the kernel of the linear constraints on the coefficients.
pub fn distributive_space(ring: &Ring, max_deg: usize) -> Result<Vec<NcPoly>, PolyError> {
    let two = Algebra::free(ring.clone(), 2);
    let three = two.with_generators(3);
    let unknowns: Vec<Word> = (1..=max_deg).flat_map(|l| Word::all(2, l)).collect();
    let mut rows: BTreeMap<(usize, Word), Vec<Elem>> = BTreeMap::new();
    for (col, w) in unknowns.iter().enumerate() {
        let p = NcPoly::monomial(&three, w.clone(), ring.one());
        for (slot, shift) in [Shift::First, Shift::Second].into_iter().enumerate() {
            let mut other = NcPoly::gens(&three);
            other[slot] = NcPoly::gen(&three, 2);
            let defect = p.substitute(&shift_images(&three, shift))?.sub(&p)?.sub(&p.substitute(&other)?)?;
            for (u, c) in defect.terms() {
                let row = rows.entry((slot, u.clone())).or_insert_with(|| vec![ring.zero(); unknowns.len()]);
                row[col] = ring.add(&row[col], c);
            }
        }
    }
    let basis = if rows.is_empty() {
        (0..unknowns.len())
            .map(|i| (0..unknowns.len()).map(|j| if i == j { ring.one() } else { ring.zero() }).collect())
            .collect()
    } else {
        let mat = Matrix::from_rows(ring, rows.into_values().collect())?;
        kernel_basis(&mat)?
    };
    Ok(basis
        .into_iter()
        .map(|v| NcPoly::from_terms(&two, unknowns.iter().cloned().zip(v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2n3() -> Arc<Algebra> {
        Algebra::nilpotent(Ring::PrimeField(2), 2, 3)
    }

    fn p(text: &str, alg: &Arc<Algebra>) -> NcPoly {
        parse_poly(text, alg).unwrap()
    }

    fn algebras() -> Vec<Arc<Algebra>> {
        vec![
            Algebra::free(Ring::Integers, 3),
            Algebra::nilpotent(Ring::PrimeField(3), 3, 4),
            Algebra::nilpotent(Ring::QuadraticRing, 2, 5),
            Algebra::new(Ring::Rationals, 2, Variety::ZeroMultiplication),
            Algebra::nilpotent(parse_ring("F9=F3[t]/(t^2+1)").unwrap(), 2, 4),
        ]
    }

    #[test]
    fn truncated_products() {
        let a = f2n3();
        let (x1, x2) = (NcPoly::gen(&a, 0), NcPoly::gen(&a, 1));
        assert_eq!(x1.mul(&x2).unwrap(), p("x1*x2", &a));
        assert!(x1.mul(&x2).unwrap().mul(&x1).unwrap().is_zero());
        let z = Algebra::new(Ring::Integers, 2, Variety::ZeroMultiplication);
        assert!(NcPoly::gen(&z, 0).mul(&NcPoly::gen(&z, 1)).unwrap().is_zero());
        let other = Algebra::nilpotent(Ring::PrimeField(2), 2, 4);
        assert_eq!(x1.mul(&NcPoly::gen(&other, 0)), Err(PolyError::AlgebraMismatch));
    }

    #[test]
    fn commutators_and_jacobi() {
        let a = Algebra::free(Ring::Integers, 3);
        let x: Vec<NcPoly> = NcPoly::gens(&a);
        assert!(x[0].commutator(&x[0]).unwrap().is_zero());
        assert_eq!(x[0].commutator(&x[1]).unwrap(), p("x1*x2 - x2*x1", &a));
        let c = |u: &NcPoly, v: &NcPoly| u.commutator(v).unwrap();
        let jac = c(&x[0], &c(&x[1], &x[2]))
            .add(&c(&x[1], &c(&x[2], &x[0])))
            .unwrap()
            .add(&c(&x[2], &c(&x[0], &x[1])))
            .unwrap();
        assert!(jac.is_zero());
    }

    #[test]
    fn substitution_examples() {
        let a = Algebra::nilpotent(Ring::Integers, 2, 3);
        let f = p("x1*x2", &a);
        assert_eq!(f.substitute(&[p("x2", &a), p("x1", &a)]).unwrap(), p("x2*x1", &a));
        assert_eq!(f.substitute(&NcPoly::gens(&a)).unwrap(), f);
        let got = f.substitute(&[p("x1 + x2", &a), p("x1", &a)]).unwrap();
        assert_eq!(got, p("x1*x1 + x2*x1", &a));
    }

    #[test]
    fn shifted_supports() {
        let a = Algebra::free(Ring::Integers, 3);
        let s = |t: &str| support_after_shift(&p(t, &a), Shift::First).unwrap();
        assert_eq!(s("x1"), [Word(vec![0]), Word(vec![2])].into_iter().collect());
        assert_eq!(s("x1*x2"), [Word(vec![0, 1]), Word(vec![2, 1])].into_iter().collect());
        assert!(s("x1*x2").is_disjoint(&s("x2*x1")));
        assert!(matches!(support_after_shift(&p("x3", &a), Shift::First), Err(PolyError::GeneratorOutOfRange(3))));
    }

    #[test]
    fn mirror_examples() {
        let a = Algebra::free(Ring::Integers, 2);
        assert_eq!(p("x1*x2*x1*x1", &a).mirror(), p("x1*x1*x2*x1", &a));
        let (x1, x2) = (NcPoly::gen(&a, 0), NcPoly::gen(&a, 1));
        assert_eq!(x1.mul(&x2).unwrap().mirror(), x2.mirror().mul(&x1.mirror()).unwrap());
    }

    #[test]
    fn distributive_examples() {
        let a = Algebra::free(Ring::Integers, 2);
        let q = p("2*x1*x2 + 3*x2*x1", &a);
        assert!(is_distributive(&q).unwrap());
        let z = Ring::Integers;
        assert_eq!(classify_distributive(&q).unwrap(), Some((z.from_i64(2), z.from_i64(3))));
        assert!(!is_distributive(&p("x1*x2*x1", &a)).unwrap());
        assert!(!is_distributive(&p("x1", &a)).unwrap());
        assert_eq!(classify_distributive(&p("x1*x2*x1", &a)).unwrap(), None);
    }

    #[test]
    fn distributive_space_is_two_dimensional() {
        for ring in [Ring::PrimeField(2), Ring::Integers] {
            let basis = distributive_space(&ring, 4).unwrap();
            assert_eq!(basis.len(), 2, "{ring}");
            let a = Algebra::free(ring.clone(), 2);
            let expected: BTreeSet<Word> = [Word(vec![0, 1]), Word(vec![1, 0])].into_iter().collect();
            for b in &basis {
                assert!(b.support().is_subset(&expected));
                assert!(is_distributive(&b.embed(&a).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn grading_split() {
        let a = Algebra::free(Ring::Integers, 2);
        let f = p("x1 + x1*x2", &a);
        assert_eq!(f.linear_part(), p("x1", &a));
        assert_eq!(f.higher_part(), p("x1*x2", &a));
        assert!(f.homogeneous_component(3).is_zero());
    }

    #[test]
    fn parse_examples() {
        let a = f2n3();
        let g = p("x1*x2 + x2*x1", &a);
        assert_eq!(g.num_terms(), 2);
        assert!(p("0", &a).is_zero());
        let k = Algebra::nilpotent(Ring::QuadraticRing, 2, 3);
        let f = p("(1+1*w)*x1", &k);
        assert_eq!(f.coeff(&Word(vec![0])), Ring::quad(1, 1));
        assert_eq!(print_poly(&f), "(1+1*w)*x1");
        assert!(matches!(parse_poly("x3", &a), Err(PolyError::GeneratorOutOfRange(3))));
        assert!(matches!(parse_poly("x1 +", &a), Err(PolyError::Syntax(_))));
        assert!(matches!(parse_poly("5*x1", &Algebra::nilpotent(Ring::PrimeField(3), 2, 3)), Err(PolyError::NonCanonicalCoefficient(_))));
        assert!(matches!(parse_poly("1", &a), Err(PolyError::Syntax(_))));
        let q = Algebra::free(Ring::Rationals, 2);
        assert_eq!(print_poly(&p("-3/2*x1*x2 + x2", &q)), "x2 - 3/2*x1*x2");
        assert_eq!(print_poly(&p("- x1 - 2*x2", &Algebra::free(Ring::Integers, 2))), "-x1 - 2*x2");
    }

    #[test]
    fn algebra_json_round_trip() {
        for a in algebras() {
            assert_eq!(Algebra::from_json(&a.to_json()).unwrap(), a);
        }
        assert_eq!(f2n3().to_json().to_string(), r#"{"n":2,"ring":"F2","variety":"nilpotent(3)"}"#);
    }

    #[test]
    fn print_parse_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for a in algebras() {
            for _ in 0..200 {
                let f = NcPoly::random(&a, &mut rng, 6, 5);
                assert_eq!(parse_poly(&print_poly(&f), &a).unwrap(), f, "{}", print_poly(&f));
            }
        }
    }

    #[test]
    fn graded_products_and_associativity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for a in algebras() {
            for _ in 0..100 {
                let (k, l) = (rng.gen_range(1..4), rng.gen_range(1..4));
                let f = NcPoly::random_homogeneous(&a, &mut rng, 4, k);
                let g = NcPoly::random_homogeneous(&a, &mut rng, 4, l);
                let fg = f.mul(&g).unwrap();
                assert!(fg.is_zero() || (fg.is_homogeneous() && fg.degree() == Some(k + l)));
                let h = NcPoly::random(&a, &mut rng, 4, 3);
                assert_eq!(fg.mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn higher_part_is_stable_under_substitution() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for a in algebras() {
            for _ in 0..100 {
                let f = NcPoly::random(&a, &mut rng, 5, 4).higher_part();
                let imgs: Vec<NcPoly> = (0..a.n).map(|_| NcPoly::random(&a, &mut rng, 3, 3)).collect();
                assert!(f.substitute(&imgs).unwrap().linear_part().is_zero());
            }
        }
    }

    fn arb_word(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::vec(0usize..2, 1..=max_len)
    }

    proptest! {
        #[test]
        fn shifted_supports_of_distinct_monomials_are_disjoint(u in arb_word(6), v in arb_word(6)) {
            prop_assume!(u != v);
            let a = Algebra::free(Ring::Integers, 3);
            let f = NcPoly::monomial(&a, Word(u), Ring::Integers.one());
            let g = NcPoly::monomial(&a, Word(v), Ring::Integers.one());
            for shift in [Shift::First, Shift::Second] {
                let (sf, sg) = (support_after_shift(&f, shift).unwrap(), support_after_shift(&g, shift).unwrap());
                prop_assert!(sf.is_disjoint(&sg));
            }
        }

        #[test]
        fn mirror_is_an_involutive_anti_automorphism(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Algebra::nilpotent(Ring::Integers, 3, 6);
            let f = NcPoly::random(&a, &mut rng, 5, 3);
            let g = NcPoly::random(&a, &mut rng, 5, 3);
            prop_assert_eq!(f.mirror().mirror(), f.clone());
            prop_assert_eq!(f.mul(&g).unwrap().mirror(), g.mirror().mul(&f.mirror()).unwrap());
        }

        #[test]
        fn homogeneous_components_sum_to_the_polynomial(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Algebra::free(Ring::Rationals, 2);
            let f = NcPoly::random(&a, &mut rng, 8, 5);
            let mut sum = NcPoly::zero(&a);
            for k in 0..=5 {
                sum = sum.add(&f.homogeneous_component(k)).unwrap();
            }
            prop_assert_eq!(sum, f.clone());
            prop_assert_eq!(f.linear_part().add(&f.higher_part()).unwrap(), f);
        }
    }
}

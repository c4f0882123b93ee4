//! Coefficient domains.
//!
//! A [`Ring`] is a structure object: it owns the description of the domain
//! (Z, Q, F_p, F_p[t]/(f), Z[sqrt(-5)]) and performs all arithmetic on
//! [`Elem`] payloads. Payloads are kept in canonical form, so element
//! equality is structural equality of the payload.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng as _;
use rand::RngCore;

/// The fixed discriminant of the quadratic ring `Z[sqrt(-5)]`.
pub const QUADRATIC_D: i64 = -5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {modulus} is not irreducible over F{p}")]
    NotIrreducible { modulus: String, p: u64 },
    #[error("operation requires Z[sqrt(-5)]")]
    WrongRing,
    #[error("gcd is not available over {0}")]
    UnsupportedDomain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-canonical literal `{0}`")]
    NonCanonical(String),
    #[error("automorphism {auto} is not defined over {ring}")]
    BadAutomorphism { auto: String, ring: String },
}

/// `F_p[t]/(modulus)`; the modulus is stored monic, low degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaloisSpec {
    pub p: u64,
    pub k: u32,
    pub modulus: Vec<u64>,
}

impl GaloisSpec {
    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    Rationals,
    PrimeField(u64),
    GaloisField(GaloisSpec),
    /// `Z[sqrt(-5)]`, elements `a + b*w` with `w^2 = -5`.
    QuadraticRing,
}

/// Canonical element payloads. Which variant is valid depends on the ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Elem {
    Int(BigInt),
    /// Reduced fraction with positive denominator.
    Rat(BigRational),
    /// Residue in `[0, p)`.
    Res(u64),
    /// Polynomial residue, exactly `k` coefficients, low degree first.
    Gf(Vec<u64>),
    /// `a + b*sqrt(-5)`.
    Quad(BigInt, BigInt),
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

/// Remainder of `a` modulo the monic `m` over F_p (both low degree first).
fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let shift = a.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let sub = mulmod(lead, c, p);
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
        }
    }
    a
}

fn strip(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

/// Exhaustive irreducibility test: no monic factor of degree `1..=deg/2`.
fn is_irreducible(modulus: &[u64], p: u64) -> bool {
    let deg = modulus.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut rest = idx;
            for _ in 0..d {
                f.push(rest % p);
                rest /= p;
            }
            f.push(1);
            if strip(poly_rem(modulus.to_vec(), &f, p)).is_empty() {
                return false;
            }
        }
    }
    true
}

impl Ring {
    pub fn galois(p: u64, modulus: Vec<u64>) -> Result<Ring, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        let mut m: Vec<u64> = strip(modulus.into_iter().map(|c| c % p).collect());
        if m.len() < 2 {
            return Err(RingError::NotIrreducible { modulus: format!("{m:?}"), p });
        }
        let lead = *m.last().unwrap();
        let inv = powmod(lead, p - 2, p);
        for c in m.iter_mut() {
            *c = mulmod(*c, inv, p);
        }
        let k = (m.len() - 1) as u32;
        if !is_irreducible(&m, p) {
            return Err(RingError::NotIrreducible { modulus: format_t_poly(&m), p });
        }
        if k == 1 {
            return Ok(Ring::PrimeField(p));
        }
        Ok(Ring::GaloisField(GaloisSpec { p, k, modulus: m }))
    }

    pub fn prime_field(p: u64) -> Result<Ring, RingError> {
        if !is_prime(p) {
            return Err(RingError::NotPrime(p));
        }
        Ok(Ring::PrimeField(p))
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Ring::Integers | Ring::Rationals | Ring::QuadraticRing => 0,
            Ring::PrimeField(p) => *p,
            Ring::GaloisField(g) => g.p,
        }
    }

    /// Number of elements, `None` when infinite.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            Ring::PrimeField(p) => Some(*p),
            Ring::GaloisField(g) => Some(g.order()),
            _ => None,
        }
    }

    pub fn is_field(&self) -> bool {
        !matches!(self, Ring::Integers | Ring::QuadraticRing)
    }

    pub fn zero(&self) -> Elem {
        self.from_i64(0)
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Elem {
        self.from_bigint(&BigInt::from(v))
    }

    pub fn from_bigint(&self, v: &BigInt) -> Elem {
        match self {
            Ring::Integers => Elem::Int(v.clone()),
            Ring::Rationals => Elem::Rat(BigRational::from_integer(v.clone())),
            Ring::PrimeField(p) => Elem::Res(v.mod_floor(&BigInt::from(*p)).to_u64().unwrap()),
            Ring::GaloisField(g) => {
                let mut c = vec![0; g.k as usize];
                c[0] = v.mod_floor(&BigInt::from(g.p)).to_u64().unwrap();
                Elem::Gf(c)
            }
            Ring::QuadraticRing => Elem::Quad(v.clone(), BigInt::zero()),
        }
    }

    /// `a + b*sqrt(-5)`.
    pub fn quad(a: i64, b: i64) -> Elem {
        Elem::Quad(BigInt::from(a), BigInt::from(b))
    }

    /// True when `x` is a canonical payload for this ring.
    pub fn contains(&self, x: &Elem) -> bool {
        match (self, x) {
            (Ring::Integers, Elem::Int(_)) | (Ring::QuadraticRing, Elem::Quad(..)) => true,
            (Ring::Rationals, Elem::Rat(r)) => r.denom().is_positive(),
            (Ring::PrimeField(p), Elem::Res(r)) => r < p,
            (Ring::GaloisField(g), Elem::Gf(c)) => c.len() == g.k as usize && c.iter().all(|v| *v < g.p),
            _ => false,
        }
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        match x {
            Elem::Int(v) => v.is_zero(),
            Elem::Rat(v) => v.is_zero(),
            Elem::Res(v) => *v == 0,
            Elem::Gf(c) => c.iter().all(|v| *v == 0),
            Elem::Quad(a, b) => a.is_zero() && b.is_zero(),
        }
    }

    pub fn is_one(&self, x: &Elem) -> bool {
        *x == self.one()
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        match (self, x, y) {
            (_, Elem::Int(a), Elem::Int(b)) => Elem::Int(a + b),
            (_, Elem::Rat(a), Elem::Rat(b)) => Elem::Rat(a + b),
            (Ring::PrimeField(p), Elem::Res(a), Elem::Res(b)) => Elem::Res((a + b) % p),
            (Ring::GaloisField(g), Elem::Gf(a), Elem::Gf(b)) => {
                Elem::Gf(a.iter().zip(b).map(|(u, v)| (u + v) % g.p).collect())
            }
            (_, Elem::Quad(a, b), Elem::Quad(c, d)) => Elem::Quad(a + c, b + d),
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        match (self, x) {
            (_, Elem::Int(a)) => Elem::Int(-a),
            (_, Elem::Rat(a)) => Elem::Rat(-a),
            (Ring::PrimeField(p), Elem::Res(a)) => Elem::Res((p - a) % p),
            (Ring::GaloisField(g), Elem::Gf(a)) => Elem::Gf(a.iter().map(|u| (g.p - u) % g.p).collect()),
            (_, Elem::Quad(a, b)) => Elem::Quad(-a, -b),
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        match (self, x, y) {
            (_, Elem::Int(a), Elem::Int(b)) => Elem::Int(a * b),
            (_, Elem::Rat(a), Elem::Rat(b)) => Elem::Rat(a * b),
            (Ring::PrimeField(p), Elem::Res(a), Elem::Res(b)) => Elem::Res(mulmod(*a, *b, *p)),
            (Ring::GaloisField(g), Elem::Gf(a), Elem::Gf(b)) => {
                let mut prod = vec![0u64; a.len() + b.len() - 1];
                for (i, u) in a.iter().enumerate() {
                    if *u == 0 {
                        continue;
                    }
                    for (j, v) in b.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + mulmod(*u, *v, g.p)) % g.p;
                    }
                }
                let mut r = poly_rem(prod, &g.modulus, g.p);
                r.resize(g.k as usize, 0);
                Elem::Gf(r)
            }
            (_, Elem::Quad(a, b), Elem::Quad(c, d)) => {
                Elem::Quad(a * c + BigInt::from(QUADRATIC_D) * b * d, a * d + b * c)
            }
            _ => panic!("element does not belong to {self}"),
        }
    }

    pub fn pow(&self, x: &Elem, mut e: u64) -> Elem {
        let mut base = x.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// `x` times the integer `n`.
    pub fn mul_int(&self, x: &Elem, n: i64) -> Elem {
        self.mul(x, &self.from_i64(n))
    }

    pub fn is_unit(&self, x: &Elem) -> bool {
        match x {
            Elem::Int(a) => a.abs().is_one(),
            Elem::Quad(..) => self.norm(x).map(|n| n.is_one()).unwrap_or(false),
            _ => !self.is_zero(x),
        }
    }

    pub fn inverse(&self, x: &Elem) -> Option<Elem> {
        if !self.is_unit(x) {
            return None;
        }
        match (self, x) {
            (_, Elem::Int(a)) => Some(Elem::Int(a.clone())),
            (_, Elem::Rat(a)) => Some(Elem::Rat(a.recip())),
            (Ring::PrimeField(p), Elem::Res(a)) => Some(Elem::Res(powmod(*a, p - 2, *p))),
            (Ring::GaloisField(g), Elem::Gf(_)) => Some(self.pow(x, g.order() - 2)),
            (_, Elem::Quad(a, b)) => Some(Elem::Quad(a.clone(), -b)),
            _ => None,
        }
    }

    /// `q` with `x = q*y` when it exists in the ring.
    pub fn exact_div(&self, x: &Elem, y: &Elem) -> Result<Option<Elem>, RingError> {
        if self.is_zero(y) {
            return Err(RingError::DivisionByZero);
        }
        Ok(match (self, x, y) {
            (_, Elem::Int(a), Elem::Int(b)) => {
                let (q, r) = a.div_rem(b);
                r.is_zero().then_some(Elem::Int(q))
            }
            (_, Elem::Quad(a, b), Elem::Quad(c, d)) => {
                let n = c * c - BigInt::from(QUADRATIC_D) * d * d;
                // x * conj(y) / N(y)
                let re = a * c - BigInt::from(QUADRATIC_D) * b * d;
                let im = b * c - a * d;
                let (qr, rr) = re.div_rem(&n);
                let (qi, ri) = im.div_rem(&n);
                (rr.is_zero() && ri.is_zero()).then_some(Elem::Quad(qr, qi))
            }
            _ => Some(self.mul(x, &self.inverse(y).expect("nonzero field element"))),
        })
    }

    /// Nonnegative gcd over Z; over a field the gcd is 1 unless both are zero.
    pub fn gcd(&self, x: &Elem, y: &Elem) -> Result<Elem, RingError> {
        match (self, x, y) {
            (Ring::QuadraticRing, ..) => Err(RingError::UnsupportedDomain(self.to_string())),
            (_, Elem::Int(a), Elem::Int(b)) => Ok(Elem::Int(a.gcd(b))),
            _ => Ok(if self.is_zero(x) && self.is_zero(y) { self.zero() } else { self.one() }),
        }
    }

    /// `a^2 + 5 b^2` for `a + b*sqrt(-5)`.
    pub fn norm(&self, x: &Elem) -> Result<BigInt, RingError> {
        match (self, x) {
            (Ring::QuadraticRing, Elem::Quad(a, b)) => Ok(a * a - BigInt::from(QUADRATIC_D) * b * b),
            _ => Err(RingError::WrongRing),
        }
    }

    /// Every element of a finite ring, in a fixed order.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match self {
            Ring::PrimeField(p) => Some((0..*p).map(Elem::Res).collect()),
            Ring::GaloisField(g) => {
                let k = g.k as usize;
                Some(
                    (0..g.order())
                        .map(|mut idx| {
                            let mut c = Vec::with_capacity(k);
                            for _ in 0..k {
                                c.push(idx % g.p);
                                idx /= g.p;
                            }
                            Elem::Gf(c)
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Units of a finite ring, or `{1, -1}` for Z and Z[sqrt(-5)].
    pub fn small_units(&self) -> Vec<Elem> {
        match self.elements() {
            Some(all) => all.into_iter().filter(|x| self.is_unit(x)).collect(),
            None if self == &Ring::Rationals => vec![
                self.one(),
                self.from_i64(-1),
                self.from_i64(2),
                Elem::Rat(BigRational::new(BigInt::from(-1), BigInt::from(3))),
            ],
            None => vec![self.one(), self.from_i64(-1)],
        }
    }

    /// Uniform element of a finite ring; otherwise integer parts in `[-bound, bound]`.
    pub fn random(&self, rng: &mut dyn RngCore, bound: i64) -> Elem {
        match self {
            Ring::Integers => Elem::Int(BigInt::from(rng.gen_range(-bound..=bound))),
            Ring::Rationals => {
                let n = BigInt::from(rng.gen_range(-bound..=bound));
                let d = BigInt::from(rng.gen_range(1..=bound.max(1)));
                Elem::Rat(BigRational::new(n, d))
            }
            Ring::PrimeField(p) => Elem::Res(rng.gen_range(0..*p)),
            Ring::GaloisField(g) => Elem::Gf((0..g.k).map(|_| rng.gen_range(0..g.p)).collect()),
            Ring::QuadraticRing => Elem::Quad(
                BigInt::from(rng.gen_range(-bound..=bound)),
                BigInt::from(rng.gen_range(-bound..=bound)),
            ),
        }
    }

    /// Every automorphism of the ring: the listed kinds exhaust `Aut K`.
    pub fn automorphisms(&self) -> Vec<RingAutomorphism> {
        match self {
            Ring::GaloisField(g) => std::iter::once(RingAutomorphism::Identity)
                .chain((1..g.k).map(RingAutomorphism::Frobenius))
                .collect(),
            Ring::QuadraticRing => vec![RingAutomorphism::Identity, RingAutomorphism::Conjugation],
            _ => vec![RingAutomorphism::Identity],
        }
    }

    pub fn parse_elem(&self, text: &str) -> Result<Elem, RingError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(RingError::Syntax("empty element literal".into()));
        }
        match self {
            Ring::Integers => parse_int(&s).map(Elem::Int),
            Ring::Rationals => {
                let (num, den) = match s.split_once('/') {
                    Some((n, d)) => (parse_int(n)?, parse_int(d)?),
                    None => (parse_int(&s)?, BigInt::one()),
                };
                if den.is_zero() {
                    return Err(RingError::DivisionByZero);
                }
                if !den.is_positive() || !num.gcd(&den).is_one() && !num.is_zero() || num.is_zero() && !den.is_one() {
                    return Err(RingError::NonCanonical(s));
                }
                Ok(Elem::Rat(BigRational::new(num, den)))
            }
            Ring::PrimeField(p) => {
                let v = parse_int(&s)?;
                if v.abs() >= BigInt::from(*p) {
                    return Err(RingError::NonCanonical(s));
                }
                Ok(self.from_bigint(&v))
            }
            Ring::GaloisField(g) => {
                let mut c = vec![BigInt::zero(); g.k as usize];
                for (coeff, exp) in parse_symbol_sum(&s, 't')? {
                    if exp >= g.k || coeff.abs() >= BigInt::from(g.p) {
                        return Err(RingError::NonCanonical(s));
                    }
                    c[exp as usize] += coeff;
                }
                let p = BigInt::from(g.p);
                Ok(Elem::Gf(c.iter().map(|v| v.mod_floor(&p).to_u64().unwrap()).collect()))
            }
            Ring::QuadraticRing => {
                let (mut a, mut b) = (BigInt::zero(), BigInt::zero());
                for (coeff, exp) in parse_symbol_sum(&s, 'w')? {
                    match exp {
                        0 => a += coeff,
                        1 => b += coeff,
                        _ => return Err(RingError::NonCanonical(s)),
                    }
                }
                Ok(Elem::Quad(a, b))
            }
        }
    }

    pub fn format_elem(&self, x: &Elem) -> String {
        match x {
            Elem::Int(a) => a.to_string(),
            Elem::Rat(r) if r.denom().is_one() => r.numer().to_string(),
            Elem::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
            Elem::Res(a) => a.to_string(),
            Elem::Gf(c) => format_t_poly(c),
            Elem::Quad(a, b) => {
                if b.is_zero() {
                    a.to_string()
                } else if a.is_zero() {
                    format!("{b}*w")
                } else if b.is_negative() {
                    format!("{a}-{}*w", -b)
                } else {
                    format!("{a}+{b}*w")
                }
            }
        }
    }

    /// Whether a coefficient prints as `-c` with `c` simpler, for polynomial output.
    pub fn prints_negative(&self, x: &Elem) -> bool {
        match x {
            Elem::Int(a) => a.is_negative(),
            Elem::Rat(r) => r.is_negative(),
            Elem::Quad(a, b) => (b.is_zero() && a.is_negative()) || (a.is_zero() && b.is_negative()),
            _ => false,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField(p) => write!(f, "F{p}"),
            Ring::GaloisField(g) => {
                write!(f, "F{}=F{}[t]/({})", g.order(), g.p, format_t_poly(&g.modulus))
            }
            Ring::QuadraticRing => write!(f, "Z[sqrt(-5)]"),
        }
    }
}

impl FromStr for Ring {
    type Err = RingError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_ring(text)
    }
}

/// Parse a ring literal: `Z | Q | F<p> | F<q>=F<p>[t]/(<poly>) | Z[sqrt(-5)]`.
pub fn parse_ring(text: &str) -> Result<Ring, RingError> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let syntax = || RingError::Syntax(format!("unrecognized ring literal `{s}`"));
    match s.as_str() {
        "Z" => return Ok(Ring::Integers),
        "Q" => return Ok(Ring::Rationals),
        "Z[sqrt(-5)]" => return Ok(Ring::QuadraticRing),
        _ => {}
    }
    let rest = s.strip_prefix('F').ok_or_else(syntax)?;
    match rest.split_once('=') {
        None => {
            let p: u64 = rest.parse().map_err(|_| syntax())?;
            Ring::prime_field(p)
        }
        Some((q_text, def)) => {
            let q: u64 = q_text.parse().map_err(|_| syntax())?;
            let def = def.strip_prefix('F').ok_or_else(syntax)?;
            let (p_text, tail) = def.split_once("[t]/(").ok_or_else(syntax)?;
            let poly = tail.strip_suffix(')').ok_or_else(syntax)?;
            let p: u64 = p_text.parse().map_err(|_| syntax())?;
            if !is_prime(p) {
                return Err(RingError::NotPrime(p));
            }
            let terms = parse_symbol_sum(poly, 't')?;
            let deg = terms.iter().map(|(_, e)| *e).max().unwrap_or(0) as usize;
            let mut m = vec![BigInt::zero(); deg + 1];
            for (c, e) in terms {
                m[e as usize] += c;
            }
            let pb = BigInt::from(p);
            let m: Vec<u64> = m.iter().map(|v| v.mod_floor(&pb).to_u64().unwrap()).collect();
            let ring = Ring::galois(p, m)?;
            if ring.cardinality() != Some(q) {
                return Err(RingError::Syntax(format!(
                    "F{q} does not match a degree-{deg} extension of F{p}"
                )));
            }
            Ok(ring)
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt, RingError> {
    let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(RingError::Syntax(format!("expected integer, found `{s}`")));
    }
    s.parse::<BigInt>().map_err(|_| RingError::Syntax(format!("expected integer, found `{s}`")))
}

/// Parse `[+-] term ([+-] term)*` with `term := int ['*' sym ['^' int]] | sym ['^' int]`.
/// Returns `(coefficient, exponent)` pairs; input must not contain whitespace.
fn parse_symbol_sum(s: &str, sym: char) -> Result<Vec<(BigInt, u32)>, RingError> {
    let err = || RingError::Syntax(format!("malformed literal `{s}` in `{sym}`"));
    let bytes: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    if bytes.is_empty() {
        return Err(err());
    }
    while i < bytes.len() {
        let mut sign = BigInt::one();
        if bytes[i] == '+' || bytes[i] == '-' {
            if bytes[i] == '-' {
                sign = -sign;
            }
            i += 1;
        } else if i > 0 {
            return Err(err());
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff = if i > start {
            Some(bytes[start..i].iter().collect::<String>().parse::<BigInt>().map_err(|_| err())?)
        } else {
            None
        };
        let mut exp = 0u32;
        let has_sym = if coeff.is_some() {
            if i < bytes.len() && bytes[i] == '*' {
                i += 1;
                if i < bytes.len() && bytes[i] == sym {
                    true
                } else {
                    return Err(err());
                }
            } else {
                false
            }
        } else if i < bytes.len() && bytes[i] == sym {
            true
        } else {
            return Err(err());
        };
        if has_sym {
            i += 1;
            exp = 1;
            if i < bytes.len() && bytes[i] == '^' {
                i += 1;
                let st = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if st == i {
                    return Err(err());
                }
                exp = bytes[st..i].iter().collect::<String>().parse().map_err(|_| err())?;
            }
        }
        out.push((sign * coeff.unwrap_or_else(BigInt::one), exp));
        if i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
            return Err(err());
        }
    }
    Ok(out)
}

fn format_t_poly(c: &[u64]) -> String {
    let mut parts = Vec::new();
    for (e, &v) in c.iter().enumerate().rev() {
        if v == 0 {
            continue;
        }
        parts.push(match (e, v) {
            (0, v) => v.to_string(),
            (1, 1) => "t".to_string(),
            (1, v) => format!("{v}*t"),
            (e, 1) => format!("t^{e}"),
            (e, v) => format!("{v}*t^{e}"),
        });
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Automorphisms of the supported coefficient domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingAutomorphism {
    Identity,
    /// `x -> x^(p^j)` on `F_{p^k}`, `0 < j < k`.
    Frobenius(u32),
    /// `a + b*w -> a - b*w` on `Z[sqrt(-5)]`.
    Conjugation,
}

impl RingAutomorphism {
    pub fn validate(&self, ring: &Ring) -> Result<(), RingError> {
        let ok = match (self, ring) {
            (RingAutomorphism::Identity, _) => true,
            (RingAutomorphism::Frobenius(j), Ring::GaloisField(g)) => *j > 0 && *j < g.k,
            (RingAutomorphism::Conjugation, Ring::QuadraticRing) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(RingError::BadAutomorphism { auto: self.to_string(), ring: ring.to_string() })
        }
    }

    pub fn apply(&self, ring: &Ring, x: &Elem) -> Elem {
        match (self, ring, x) {
            (RingAutomorphism::Frobenius(j), Ring::GaloisField(g), _) => ring.pow(x, g.p.pow(*j)),
            (RingAutomorphism::Conjugation, _, Elem::Quad(a, b)) => Elem::Quad(a.clone(), -b),
            _ => x.clone(),
        }
    }

    pub fn inverse(&self, ring: &Ring) -> RingAutomorphism {
        match (self, ring) {
            (RingAutomorphism::Frobenius(j), Ring::GaloisField(g)) => RingAutomorphism::Frobenius(g.k - j),
            _ => *self,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, RingAutomorphism::Identity)
    }

    /// Order of the automorphism in `Aut K`.
    pub fn order(&self, ring: &Ring) -> u32 {
        match (self, ring) {
            (RingAutomorphism::Identity, _) => 1,
            (RingAutomorphism::Frobenius(j), Ring::GaloisField(g)) => g.k / (*j).gcd(&g.k),
            _ => 2,
        }
    }
}

impl fmt::Display for RingAutomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingAutomorphism::Identity => write!(f, "identity"),
            RingAutomorphism::Frobenius(j) => write!(f, "frobenius^{j}"),
            RingAutomorphism::Conjugation => write!(f, "conjugation"),
        }
    }
}

impl FromStr for RingAutomorphism {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "identity" => Ok(RingAutomorphism::Identity),
            "conjugation" => Ok(RingAutomorphism::Conjugation),
            "frobenius" => Ok(RingAutomorphism::Frobenius(1)),
            other => other
                .strip_prefix("frobenius^")
                .and_then(|j| j.parse().ok())
                .map(|j| if j == 0 { RingAutomorphism::Identity } else { RingAutomorphism::Frobenius(j) })
                .ok_or_else(|| RingError::Syntax(format!("unknown ring automorphism `{other}`"))),
        }
    }
}

/// Quadratic elements of norm exactly `n`: all `(a, b)` with `a^2 + 5b^2 = n`.
pub fn quadratic_elements_of_norm(n: u64) -> Vec<Elem> {
    let mut out = Vec::new();
    let mut b = 0i64;
    while 5 * (b * b) as u64 <= n {
        let rest = n - 5 * (b * b) as u64;
        let a = (rest as f64).sqrt().round() as i64;
        for a in [a - 1, a, a + 1] {
            if a >= 0 && (a * a) as u64 == rest {
                for sa in if a == 0 { vec![0] } else { vec![a, -a] } {
                    for sb in if b == 0 { vec![0] } else { vec![b, -b] } {
                        out.push(Ring::quad(sa, sb));
                    }
                }
            }
        }
        b += 1;
    }
    out.sort_by_key(|x| match x {
        Elem::Quad(a, b) => (b.clone(), a.clone()),
        _ => unreachable!(),
    });
    out.dedup();
    out
}

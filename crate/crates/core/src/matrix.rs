//! Dense exact matrices over a [`Ring`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::ring::{quadratic_elements_of_norm, Elem, Ring, RingError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("matrix literal: {0}")]
    Syntax(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a rank-1 matrix, found rank {0}")]
    RankNotOne(usize),
    #[error("operation not supported over {0}")]
    UnsupportedRing(String),
    #[error("family is not a system of matrix units: {0}")]
    NotMatrixUnits(String),
    #[error("rank-1 factorization failed: {0}")]
    FactorizationFailed(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    pub ring: Ring,
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub entries: Vec<Elem>,
}

impl Matrix {
    pub fn new(ring: &Ring, rows: usize, cols: usize, entries: Vec<Elem>) -> Result<Matrix, MatrixError> {
        if entries.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !ring.contains(e)) {
            return Err(MatrixError::DimensionMismatch(format!("entry {bad:?} is not in {ring}")));
        }
        Ok(Matrix { ring: ring.clone(), rows, cols, entries })
    }

    pub fn from_rows(ring: &Ring, rows: Vec<Vec<Elem>>) -> Result<Matrix, MatrixError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MatrixError::DimensionMismatch("ragged rows".into()));
        }
        Matrix::new(ring, r, c, rows.into_iter().flatten().collect())
    }

    /// Integer entries, mapped into the ring.
    pub fn from_i64(ring: &Ring, rows: &[&[i64]]) -> Matrix {
        let vals = rows.iter().map(|r| r.iter().map(|v| ring.from_i64(*v)).collect()).collect();
        Matrix::from_rows(ring, vals).expect("well-formed rows")
    }

    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Matrix {
        Matrix { ring: ring.clone(), rows, cols, entries: vec![ring.zero(); rows * cols] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, ring.one());
        }
        m
    }

    /// The matrix unit `E_ij` (0-based indices).
    pub fn unit(ring: &Ring, n: usize, i: usize, j: usize) -> Matrix {
        let mut m = Matrix::zeros(ring, n, n);
        m.set(i, j, ring.one());
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Elem> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn column_matrix(ring: &Ring, v: Vec<Elem>) -> Matrix {
        let n = v.len();
        Matrix { ring: ring.clone(), rows: n, cols: 1, entries: v }
    }

    pub fn row_matrix(ring: &Ring, v: Vec<Elem>) -> Matrix {
        let n = v.len();
        Matrix { ring: ring.clone(), rows: 1, cols: n, entries: v }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| self.ring.is_zero(e))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.ring, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != other.rows || self.ring != other.ring {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let r = &self.ring;
        let mut out = Matrix::zeros(r, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if r.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = r.add(out.get(i, j), &r.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip(other, |r, a, b| r.add(a, b))
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip(other, |r, a, b| r.sub(a, b))
    }

    fn zip(&self, other: &Matrix, f: impl Fn(&Ring, &Elem, &Elem) -> Elem) -> Result<Matrix, MatrixError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(MatrixError::DimensionMismatch("shapes differ".into()));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| f(&self.ring, a, b)).collect();
        Ok(Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, s: &Elem) -> Matrix {
        let entries = self.entries.iter().map(|e| self.ring.mul(s, e)).collect();
        Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries }
    }

    /// Divide every entry by `s`; `None` unless all divisions are exact.
    pub fn exact_div_scalar(&self, s: &Elem) -> Result<Option<Matrix>, MatrixError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            match self.ring.exact_div(e, s)? {
                Some(q) => entries.push(q),
                None => return Ok(None),
            }
        }
        Ok(Some(Matrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, entries }))
    }

    /// Apply `f` to every entry, possibly changing the ring.
    pub fn map(&self, ring: &Ring, f: impl Fn(&Elem) -> Elem) -> Matrix {
        Matrix { ring: ring.clone(), rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// Rank over the fraction field, by fraction-free elimination.
    pub fn rank(&self) -> usize {
        self.bareiss().0
    }

    /// Fraction-free (Bareiss) row echelon form: returns `(rank, sign, echelon)`.
    /// Every intermediate division is exact in an integral domain.
    fn bareiss(&self) -> (usize, bool, Vec<Vec<Elem>>) {
        let r = &self.ring;
        let mut a: Vec<Vec<Elem>> = (0..self.rows).map(|i| self.row(i)).collect();
        let mut prev = r.one();
        let mut rank = 0;
        let mut negated = false;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&i| !r.is_zero(&a[i][c])) else { continue };
            if p != rank {
                a.swap(p, rank);
                negated = !negated;
            }
            let pivot = a[rank][c].clone();
            for i in rank + 1..self.rows {
                let lead = a[i][c].clone();
                for j in c..self.cols {
                    let num = r.sub(&r.mul(&pivot, &a[i][j]), &r.mul(&lead, &a[rank][j]));
                    a[i][j] = r
                        .exact_div(&num, &prev)
                        .expect("nonzero pivot")
                        .expect("Bareiss division is exact in a domain");
                }
            }
            prev = pivot;
            rank += 1;
        }
        (rank, negated, a)
    }

    pub fn det(&self) -> Result<Elem, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let r = &self.ring;
        if self.rows == 0 {
            return Ok(r.one());
        }
        let (rank, negated, a) = self.bareiss();
        if rank < self.rows {
            return Ok(r.zero());
        }
        let d = a[self.rows - 1][self.cols - 1].clone();
        Ok(if negated { r.neg(&d) } else { d })
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> Matrix {
        let mut entries = Vec::new();
        for i in (0..self.rows).filter(|&i| i != skip_r) {
            for j in (0..self.cols).filter(|&j| j != skip_c) {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { ring: self.ring.clone(), rows: self.rows - 1, cols: self.cols - 1, entries }
    }

    /// Classical adjoint, so that `A * adj(A) = det(A) * I`.
    pub fn adjugate(&self) -> Result<Matrix, MatrixError> {
        if !self.is_square() {
            return Err(MatrixError::DimensionMismatch("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        let r = &self.ring;
        if n == 1 {
            return Ok(Matrix::identity(r, 1));
        }
        let mut adj = Matrix::zeros(r, n, n);
        for i in 0..n {
            for j in 0..n {
                let m = self.minor(i, j).det()?;
                adj.set(j, i, if (i + j) % 2 == 0 { m } else { r.neg(&m) });
            }
        }
        Ok(adj)
    }

    /// Inverse over the ring itself; `None` when the determinant is not a unit.
    pub fn inverse(&self) -> Result<Option<Matrix>, MatrixError> {
        let d = self.det()?;
        match self.ring.inverse(&d) {
            Some(inv) => Ok(Some(self.adjugate()?.scale(&inv))),
            None => Ok(None),
        }
    }

    /// JSON array-of-arrays; integers become JSON numbers, everything else strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array(self.row(i).iter().map(|e| elem_json(&self.ring, e)).collect()))
                .collect(),
        )
    }

    /// The literal form: every entry a string.
    pub fn to_literal(&self) -> String {
        let rows: Vec<Value> = (0..self.rows)
            .map(|i| Value::Array(self.row(i).iter().map(|e| Value::String(self.ring.format_elem(e))).collect()))
            .collect();
        Value::Array(rows).to_string()
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

fn elem_json(ring: &Ring, e: &Elem) -> Value {
    match e {
        Elem::Int(v) => match v.to_i64() {
            Some(x) => json!(x),
            None => Value::String(v.to_string()),
        },
        _ => Value::String(ring.format_elem(e)),
    }
}

/// Parse a JSON array-of-arrays of element literals (strings or integers).
pub fn parse_matrix(ring: &Ring, text: &str) -> Result<Matrix, MatrixError> {
    let v: Value = serde_json::from_str(text).map_err(|e| MatrixError::Syntax(e.to_string()))?;
    matrix_from_json(ring, &v)
}

pub fn matrix_from_json(ring: &Ring, v: &Value) -> Result<Matrix, MatrixError> {
    let rows = v.as_array().ok_or_else(|| MatrixError::Syntax("expected an array of rows".into()))?;
    if rows.is_empty() {
        return Err(MatrixError::Syntax("empty matrix".into()));
    }
    let mut out = Vec::new();
    for row in rows {
        let row = row.as_array().ok_or_else(|| MatrixError::Syntax("expected each row to be an array".into()))?;
        let mut parsed = Vec::new();
        for cell in row {
            let text = match cell {
                Value::String(s) => s.clone(),
                Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
                other => return Err(MatrixError::Syntax(format!("bad entry {other}"))),
            };
            parsed.push(ring.parse_elem(&text)?);
        }
        out.push(parsed);
    }
    if out[0].is_empty() {
        return Err(MatrixError::Syntax("empty row".into()));
    }
    Matrix::from_rows(ring, out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1Factorization {
    /// n x 1
    pub column: Matrix,
    /// 1 x m
    pub row: Matrix,
}

impl Rank1Factorization {
    pub fn product(&self) -> Matrix {
        self.column.mul(&self.row).expect("compatible shapes")
    }

    pub fn to_json(&self) -> Value {
        json!({ "column": self.column.to_json(), "row": self.row.to_json() })
    }
}

/// One rejected choice of the pivot-row column entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectedCandidate {
    pub candidate: String,
    pub reason: String,
}

/// Exhaustive evidence that a rank-1 matrix over Z[sqrt(-5)] is not column x row.
///
/// In any factorization `A = c d` the entry `c_r` of the first nonzero row `r`
/// divides every `a_rj`, so its norm divides the gcd of the nonzero norms in
/// row `r`. That candidate set is finite, and each candidate fixes `d` and
/// then `c` by exact division, so rejecting all of them is a proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonFactorizationCertificate {
    pub matrix: Matrix,
    pub pivot_row: usize,
    pub norm_gcd: BigInt,
    pub search_bound: String,
    pub rejected: Vec<RejectedCandidate>,
}

impl NonFactorizationCertificate {
    pub fn to_json(&self) -> Value {
        json!({
            "matrix": self.matrix.to_json(),
            "pivotRow": self.pivot_row,
            "normGcd": self.norm_gcd.to_string(),
            "searchBound": self.search_bound,
            "rejected": self.rejected,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum R1mfOutcome {
    Factored(Rank1Factorization),
    NotFactorable(NonFactorizationCertificate),
}

impl R1mfOutcome {
    pub fn factorization(&self) -> Option<&Rank1Factorization> {
        match self {
            R1mfOutcome::Factored(f) => Some(f),
            R1mfOutcome::NotFactorable(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            R1mfOutcome::Factored(f) => f.to_json(),
            R1mfOutcome::NotFactorable(c) => json!({ "certificate": c.to_json() }),
        }
    }
}

/// Write a rank-1 matrix as column x row.
pub fn r1mf_factorize(a: &Matrix) -> Result<R1mfOutcome, MatrixError> {
    let rank = a.rank();
    if rank != 1 {
        return Err(MatrixError::RankNotOne(rank));
    }
    let r = &a.ring;
    let pivot_row = (0..a.rows).find(|&i| a.row(i).iter().any(|e| !r.is_zero(e))).unwrap();
    let outcome = match r {
        Ring::QuadraticRing => return quadratic_search(a, pivot_row),
        Ring::Integers => {
            let mut row = a.row(pivot_row);
            let g = row.iter().fold(r.zero(), |g, e| r.gcd(&g, e).unwrap());
            let j0 = row.iter().position(|e| !r.is_zero(e)).unwrap();
            let sign = if r.prints_negative(&row[j0]) { r.from_i64(-1) } else { r.one() };
            let g = r.mul(&g, &sign);
            row = row.iter().map(|e| r.exact_div(e, &g).unwrap().unwrap()).collect();
            column_from_row(a, row, j0)?
        }
        _ => {
            let row = a.row(pivot_row);
            let j0 = row.iter().position(|e| !r.is_zero(e)).unwrap();
            column_from_row(a, row, j0)?
        }
    };
    match &outcome {
        Some(f) if f.product() == *a => Ok(R1mfOutcome::Factored(f.clone())),
        _ => Err(MatrixError::FactorizationFailed(format!("reconstruction failed over {r}"))),
    }
}

/// Given a candidate row, solve for the column by exact division in column `j0`.
fn column_from_row(a: &Matrix, row: Vec<Elem>, j0: usize) -> Result<Option<Rank1Factorization>, MatrixError> {
    let r = &a.ring;
    let mut col = Vec::with_capacity(a.rows);
    for k in 0..a.rows {
        match r.exact_div(a.get(k, j0), &row[j0])? {
            Some(c) => col.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(Rank1Factorization { column: Matrix::column_matrix(r, col), row: Matrix::row_matrix(r, row) }))
}

fn divisors(n: &BigInt) -> Vec<u64> {
    let n = n.to_u64().expect("norm gcd fits in u64");
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

fn quadratic_search(a: &Matrix, pivot_row: usize) -> Result<R1mfOutcome, MatrixError> {
    let r = &a.ring;
    let row = a.row(pivot_row);
    let g = row
        .iter()
        .filter(|e| !r.is_zero(e))
        .map(|e| r.norm(e).unwrap())
        .fold(BigInt::zero(), |g, n| g.gcd(&n));
    let norms = divisors(&g);
    let mut rejected = Vec::new();
    for n in &norms {
        for cand in quadratic_elements_of_norm(*n) {
            let label = r.format_elem(&cand);
            // d_j = a_rj / c_r
            let mut d = Vec::with_capacity(a.cols);
            let mut failed = None;
            for (j, e) in row.iter().enumerate() {
                match r.exact_div(e, &cand)? {
                    Some(q) => d.push(q),
                    None => {
                        failed = Some(format!("{} / {label} is not in the ring (column {})", r.format_elem(e), j + 1));
                        break;
                    }
                }
            }
            if let Some(reason) = failed {
                rejected.push(RejectedCandidate { candidate: label, reason });
                continue;
            }
            let j0 = d.iter().position(|e| !r.is_zero(e)).unwrap();
            match column_from_row(a, d.clone(), j0)? {
                Some(f) if f.product() == *a => return Ok(R1mfOutcome::Factored(f)),
                Some(_) => rejected.push(RejectedCandidate {
                    candidate: label,
                    reason: "column x row does not reproduce the matrix".into(),
                }),
                None => {
                    let k = (0..a.rows)
                        .find(|&k| r.exact_div(a.get(k, j0), &d[j0]).ok().flatten().is_none())
                        .unwrap();
                    rejected.push(RejectedCandidate {
                        candidate: label,
                        reason: format!(
                            "row {}: {} / {} is not in the ring",
                            k + 1,
                            r.format_elem(a.get(k, j0)),
                            r.format_elem(&d[j0])
                        ),
                    });
                }
            }
        }
    }
    let listed: Vec<String> = norms.iter().map(u64::to_string).collect();
    Ok(R1mfOutcome::NotFactorable(NonFactorizationCertificate {
        matrix: a.clone(),
        pivot_row,
        norm_gcd: g.clone(),
        search_bound: format!(
            "all c with N(c) dividing gcd of nonzero norms in row {} = {g} (norms {})",
            pivot_row + 1,
            listed.join(", ")
        ),
        rejected,
    }))
}

/// Tester for the 2x2 case: does this rank-1 matrix split as column x row?
pub fn r1mf_2x2_test(a: &Matrix) -> Result<bool, MatrixError> {
    if (a.rows, a.cols) != (2, 2) {
        return Err(MatrixError::DimensionMismatch("expected a 2x2 matrix".into()));
    }
    Ok(matches!(r1mf_factorize(a)?, R1mfOutcome::Factored(_)))
}

/// Result of conjugating a matrix-unit family to the elementary matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitConjugation {
    pub rho: Matrix,
    pub rho_inverse: Matrix,
    /// Index of the basis vector `e_k` used to probe `P_11`.
    pub probe: usize,
}

fn check_units(family: &[Vec<Matrix>]) -> Result<(Ring, usize), MatrixError> {
    let n = family.len();
    if n == 0 || family.iter().any(|row| row.len() != n) {
        return Err(MatrixError::NotMatrixUnits("family must be indexed by n x n pairs".into()));
    }
    let ring = family[0][0].ring.clone();
    for (i, row) in family.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if (p.rows, p.cols) != (n, n) || p.ring != ring {
                return Err(MatrixError::NotMatrixUnits(format!("P_{}{} has the wrong shape", i + 1, j + 1)));
            }
            if p.is_zero() {
                return Err(MatrixError::NotMatrixUnits(format!("P_{}{} = 0", i + 1, j + 1)));
            }
        }
    }
    let zero = Matrix::zeros(&ring, n, n);
    for i in 0..n {
        for j in 0..n {
            for m in 0..n {
                for k in 0..n {
                    let lhs = family[i][j].mul(&family[m][k])?;
                    let rhs = if j == m { &family[i][k] } else { &zero };
                    if lhs != *rhs {
                        return Err(MatrixError::NotMatrixUnits(format!(
                            "P_{}{} P_{}{} != {}",
                            i + 1,
                            j + 1,
                            m + 1,
                            k + 1,
                            if j == m { format!("P_{}{}", i + 1, k + 1) } else { "0".into() }
                        )));
                    }
                }
            }
        }
    }
    Ok((ring, n))
}

/// Find an invertible `rho` with `rho P_ij rho^-1 = E_ij` for a matrix-unit family.
pub fn conjugate_matrix_units(family: &[Vec<Matrix>]) -> Result<UnitConjugation, MatrixError> {
    let (r, n) = check_units(family)?;
    if r == Ring::QuadraticRing {
        return Err(MatrixError::FactorizationFailed(format!("no factorization path over {r}")));
    }
    let probe = (0..n).find(|&k| family[0][0].column(k).iter().any(|e| !r.is_zero(e))).unwrap();
    let u1 = Matrix::column_matrix(&r, family[0][0].column(probe));
    let mut basis = Vec::with_capacity(n * n);
    for row in family.iter() {
        basis.extend(row[0].mul(&u1)?.entries);
    }
    let basis = Matrix::new(&r, n, n, basis)?.transpose();
    if basis.rank() != n {
        return Err(MatrixError::NotMatrixUnits("the vectors P_i1 u do not span".into()));
    }
    // P_ii = a^i b_i, and the relations force B A = I.
    let mut a_cols = Vec::with_capacity(n);
    let mut b_rows = Vec::with_capacity(n);
    for (i, row) in family.iter().enumerate() {
        let f = match r1mf_factorize(&row[i]) {
            Ok(R1mfOutcome::Factored(f)) => f,
            Ok(R1mfOutcome::NotFactorable(_)) => {
                return Err(MatrixError::FactorizationFailed(format!("P_{}{} has no column x row form", i + 1, i + 1)))
            }
            Err(MatrixError::RankNotOne(k)) => {
                return Err(MatrixError::NotMatrixUnits(format!("P_{}{} has rank {k}", i + 1, i + 1)))
            }
            Err(e) => return Err(e),
        };
        a_cols.push(f.column.entries);
        b_rows.push(f.row.entries);
    }
    let a = Matrix::from_rows(&r, a_cols)?.transpose();
    let b = Matrix::from_rows(&r, b_rows)?;
    if b.mul(&a)? != Matrix::identity(&r, n) {
        return Err(MatrixError::NotMatrixUnits("idempotent factors are not dual".into()));
    }
    // B P_i1 A = d_i1 E_i1 with d_i1 a unit.
    let mut d_inv = Matrix::zeros(&r, n, n);
    let mut d = Matrix::zeros(&r, n, n);
    for (i, row) in family.iter().enumerate() {
        let q = b.mul(&row[0])?.mul(&a)?;
        let dij = q.get(i, 0).clone();
        let inv = r
            .inverse(&dij)
            .ok_or_else(|| MatrixError::NotMatrixUnits(format!("scalar d_{}1 is not a unit", i + 1)))?;
        d.set(i, i, dij);
        d_inv.set(i, i, inv);
    }
    let rho = d_inv.mul(&b)?;
    let rho_inverse = a.mul(&d)?;
    for (i, row) in family.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            if rho.mul(p)?.mul(&rho_inverse)? != Matrix::unit(&r, n, i, j) {
                return Err(MatrixError::NotMatrixUnits(format!("conjugation fails on P_{}{}", i + 1, j + 1)));
            }
        }
    }
    Ok(UnitConjugation { rho, rho_inverse, probe })
}

/// Solve `A x = b` exactly. Over Z the solution must be integral.
pub fn linear_solve(a: &Matrix, b: &[Elem]) -> Result<Option<Vec<Elem>>, MatrixError> {
    if b.len() != a.rows {
        return Err(MatrixError::DimensionMismatch("right-hand side length".into()));
    }
    match &a.ring {
        Ring::QuadraticRing => Err(MatrixError::UnsupportedRing(a.ring.to_string())),
        Ring::Integers => Ok(integer_solve(a, b)),
        _ => Ok(field_solve(a, b)),
    }
}

/// Reduced row echelon form over a field; returns the pivot columns.
fn rref(a: &mut [Vec<Elem>], ring: &Ring, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&i| !ring.is_zero(&a[i][c])) else { continue };
        a.swap(p, row);
        let inv = ring.inverse(&a[row][c]).unwrap();
        for v in a[row].iter_mut() {
            *v = ring.mul(v, &inv);
        }
        for i in 0..a.len() {
            if i != row && !ring.is_zero(&a[i][c]) {
                let f = a[i][c].clone();
                for j in 0..a[i].len() {
                    let v = ring.sub(&a[i][j], &ring.mul(&f, &a[row][j]));
                    a[i][j] = v;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

fn field_solve(a: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    let r = &a.ring;
    let mut aug: Vec<Vec<Elem>> = (0..a.rows)
        .map(|i| {
            let mut row = a.row(i);
            row.push(b[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut aug, r, a.cols);
    if aug[pivots.len()..].iter().any(|row| !r.is_zero(&row[a.cols])) {
        return None;
    }
    let mut x = vec![r.zero(); a.cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = aug[i][a.cols].clone();
    }
    Some(x)
}

fn int(e: &Elem) -> &BigInt {
    match e {
        Elem::Int(v) => v,
        other => panic!("expected an integer, found {other:?}"),
    }
}

/// Column Hermite reduction: unimodular `V` with `A V` in column echelon form.
fn integer_solve(a: &Matrix, b: &[Elem]) -> Option<Vec<Elem>> {
    let (rows, cols) = (a.rows, a.cols);
    let mut h: Vec<Vec<BigInt>> = (0..rows).map(|i| (0..cols).map(|j| int(a.get(i, j)).clone()).collect()).collect();
    let mut v: Vec<Vec<BigInt>> =
        (0..cols).map(|i| (0..cols).map(|j| BigInt::from((i == j) as i64)).collect()).collect();
    let col_op = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let t = &row[src] * q;
            row[dst] -= t;
        }
    };
    let swap = |m: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut pivots = Vec::new();
    let mut cur = 0;
    for i in 0..rows {
        if cur == cols {
            break;
        }
        loop {
            let best = (cur..cols).filter(|&j| !h[i][j].is_zero()).min_by_key(|&j| h[i][j].abs());
            let Some(best) = best else { break };
            swap(&mut h, cur, best);
            swap(&mut v, cur, best);
            let mut done = true;
            for j in cur + 1..cols {
                if !h[i][j].is_zero() {
                    let q = h[i][j].div_floor(&h[i][cur]);
                    col_op(&mut h, j, cur, &q);
                    col_op(&mut v, j, cur, &q);
                    done &= h[i][j].is_zero();
                }
            }
            if done {
                pivots.push((i, cur));
                cur += 1;
                break;
            }
        }
    }
    let mut y = vec![BigInt::zero(); cols];
    for &(i, c) in &pivots {
        let acc: BigInt = (0..c).map(|s| &h[i][s] * &y[s]).sum();
        let rest = int(&b[i]) - acc;
        let (q, rem) = rest.div_rem(&h[i][c]);
        if !rem.is_zero() {
            return None;
        }
        y[c] = q;
    }
    for i in 0..rows {
        let lhs: BigInt = (0..cols).map(|s| &h[i][s] * &y[s]).sum();
        if &lhs != int(&b[i]) {
            return None;
        }
    }
    Some(
        (0..cols)
            .map(|i| Elem::Int((0..cols).map(|s| &v[i][s] * &y[s]).sum()))
            .collect(),
    )
}

/// Kernel basis of `A`. Over Z, rational kernel vectors scaled to primitive integers.
pub fn kernel_basis(a: &Matrix) -> Result<Vec<Vec<Elem>>, MatrixError> {
    match &a.ring {
        Ring::QuadraticRing => Err(MatrixError::UnsupportedRing(a.ring.to_string())),
        Ring::Integers => {
            let q = Ring::Rationals;
            let rat = a.map(&q, |e| Elem::Rat(BigRational::from_integer(int(e).clone())));
            Ok(field_kernel(&rat).into_iter().map(|v| primitive_integer(&v)).collect())
        }
        _ => Ok(field_kernel(a)),
    }
}

fn field_kernel(a: &Matrix) -> Vec<Vec<Elem>> {
    let r = &a.ring;
    let mut m: Vec<Vec<Elem>> = (0..a.rows).map(|i| a.row(i)).collect();
    let pivots = rref(&mut m, r, a.cols);
    let mut basis = Vec::new();
    for free in (0..a.cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![r.zero(); a.cols];
        v[free] = r.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = r.neg(&m[i][free]);
        }
        basis.push(v);
    }
    basis
}

/// Clear denominators and divide by the content; first nonzero entry positive.
pub fn primitive_integer(v: &[Elem]) -> Vec<Elem> {
    let rats: Vec<&BigRational> = v
        .iter()
        .map(|e| match e {
            Elem::Rat(r) => r,
            other => panic!("expected a rational, found {other:?}"),
        })
        .collect();
    let l = rats.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|r| (*r * BigRational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return ints.into_iter().map(Elem::Int).collect();
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map_or(BigInt::one(), |x| x.signum());
    ints.into_iter().map(|x| Elem::Int(x / &g * &sign)).collect()
}

/// One asserted item of the Dedekind-domain report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportItem {
    pub id: usize,
    pub claim: String,
    pub holds: bool,
    pub witnesses: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct DedekindReport {
    pub ring: String,
    pub items: Vec<ReportItem>,
}

impl DedekindReport {
    pub fn all_hold(&self) -> bool {
        self.items.iter().all(|i| i.holds)
    }
}

/// `[[1+w, -2], [-2, 1-w]]` with `w = sqrt(-5)`.
pub fn dedekind_m() -> Matrix {
    let k = Ring::QuadraticRing;
    Matrix::from_rows(&k, vec![vec![Ring::quad(1, 1), Ring::quad(-2, 0)], vec![Ring::quad(-2, 0), Ring::quad(1, -1)]])
        .unwrap()
}

/// `[[w, -2], [-2, -w]]`, the matrix with `m^2 = 2a`.
pub fn dedekind_a() -> Matrix {
    let k = Ring::QuadraticRing;
    Matrix::from_rows(&k, vec![vec![Ring::quad(0, 1), Ring::quad(-2, 0)], vec![Ring::quad(-2, 0), Ring::quad(0, -1)]])
        .unwrap()
}

/// `[[1+w, 2], [3, 1-w]]`, rank 1 without a column x row form.
pub fn dedekind_c() -> Matrix {
    let k = Ring::QuadraticRing;
    Matrix::from_rows(&k, vec![vec![Ring::quad(1, 1), Ring::quad(2, 0)], vec![Ring::quad(3, 0), Ring::quad(1, -1)]])
        .unwrap()
}

/// Exact verification of the Z[sqrt(-5)] example: conjugation by `m` is an
/// automorphism of the 2x2 matrix semigroup that is not inner over the ring.
pub fn dedekind_report() -> Result<DedekindReport, MatrixError> {
    let k = Ring::QuadraticRing;
    let m = dedekind_m();
    let adj = m.adjugate()?;
    let two = k.from_i64(2);
    let mut items = Vec::new();

    let det_m = m.det()?;
    let m_adj = m.mul(&adj)?;
    items.push(ReportItem {
        id: 1,
        claim: "det m = 2 and m^-1 = (1/2) [[1-w, 2], [2, 1+w]]".into(),
        holds: det_m == two && m_adj == Matrix::identity(&k, 2).scale(&two) && adj == Matrix::from_rows(
            &k,
            vec![vec![Ring::quad(1, -1), two.clone()], vec![two.clone(), Ring::quad(1, 1)]],
        )?,
        witnesses: json!({ "det": k.format_elem(&det_m), "adjugate": adj.to_json(), "m_times_adjugate": m_adj.to_json() }),
    });

    let mut conj = Vec::new();
    let mut integral = true;
    for i in 0..2 {
        for j in 0..2 {
            let num = adj.mul(&Matrix::unit(&k, 2, i, j))?.mul(&m)?;
            match num.exact_div_scalar(&two)? {
                Some(q) => conj.push(json!({ "unit": format!("E_{}{}", i + 1, j + 1), "conjugate": q.to_json() })),
                None => {
                    integral = false;
                    conj.push(json!({ "unit": format!("E_{}{}", i + 1, j + 1), "conjugate": null }));
                }
            }
        }
    }
    items.push(ReportItem {
        id: 2,
        claim: "m^-1 E_ij m has entries in the ring for all four matrix units".into(),
        holds: integral,
        witnesses: Value::Array(conj),
    });

    let a = dedekind_a();
    let m2 = m.mul(&m)?;
    let det_a = a.det()?;
    let a_inv = a.inverse()?;
    items.push(ReportItem {
        id: 3,
        claim: "m^2 = 2a with a = [[w, -2], [-2, -w]] and det a = 1".into(),
        holds: m2 == a.scale(&two) && k.is_one(&det_a) && a_inv.is_some(),
        witnesses: json!({
            "m_squared": m2.to_json(),
            "a": a.to_json(),
            "det_a": k.format_elem(&det_a),
            "a_inverse": a_inv.map(|x| x.to_json()),
        }),
    });

    // alpha^2 = +-2 forces N(alpha)^2 = 4, so a^2 + 5 b^2 = 2; search a^2 + 5 b^2 <= 2.
    let mut searched = Vec::new();
    let mut found = false;
    for n in 0..=2u64 {
        for alpha in quadratic_elements_of_norm(n) {
            let sq = k.mul(&alpha, &alpha);
            found |= sq == two || sq == k.neg(&two);
            searched.push(json!({ "alpha": k.format_elem(&alpha), "alpha_squared": k.format_elem(&sq) }));
        }
    }
    items.push(ReportItem {
        id: 4,
        claim: "no alpha in the ring has alpha^2 = 2 or alpha^2 = -2".into(),
        holds: !found && quadratic_elements_of_norm(2).is_empty(),
        witnesses: json!({ "search": "a^2 + 5b^2 <= 2", "candidates": searched }),
    });

    let c = dedekind_c();
    let rank_c = c.rank();
    let outcome = r1mf_factorize(&c)?;
    items.push(ReportItem {
        id: 5,
        claim: "rank c = 1 but c is not a column times a row".into(),
        holds: rank_c == 1 && matches!(outcome, R1mfOutcome::NotFactorable(_)),
        witnesses: json!({ "c": c.to_json(), "rank": rank_c, "outcome": outcome.to_json() }),
    });

    Ok(DedekindReport { ring: k.to_string(), items })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::parse_ring;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(&Ring::Integers, rows)
    }

    /// Oracle: rank via Gaussian elimination over Q.
    fn rational_rank(a: &Matrix) -> usize {
        let q = Ring::Rationals;
        let m = a.map(&q, |e| Elem::Rat(BigRational::from_integer(int(e).clone())));
        let mut rows: Vec<Vec<Elem>> = (0..m.rows).map(|i| m.row(i)).collect();
        rref(&mut rows, &q, m.cols).len()
    }

    fn random_z(rng: &mut ChaCha8Rng, r: usize, c: usize, bound: i64) -> Matrix {
        let entries = (0..r * c).map(|_| Elem::Int(BigInt::from(rng.gen_range(-bound..=bound)))).collect();
        Matrix::new(&Ring::Integers, r, c, entries).unwrap()
    }

    fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let r = Ring::Integers;
        let mut q = Matrix::identity(&r, n);
        for _ in 0..3 * n {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i == j {
                continue;
            }
            let f = rng.gen_range(-2..=2i64);
            for c in 0..n {
                let v = r.add(q.get(i, c), &r.mul_int(q.get(j, c), f));
                q.set(i, c, v);
            }
        }
        q
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Matrix::identity(&Ring::Integers, 3).rank(), 3);
        assert_eq!(Matrix::zeros(&Ring::Integers, 2, 4).rank(), 0);
        assert_eq!(dedekind_c().rank(), 1);
        assert_eq!(z(&[&[0, 1, 2], &[0, 2, 4], &[1, 0, 0]]).rank(), 2);
    }

    #[test]
    fn bareiss_rank_matches_rational_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let (r, c) = (rng.gen_range(1..6), rng.gen_range(1..6));
            let mut a = random_z(&mut rng, r, c, 3);
            // bias toward deficient rank
            if r > 1 && rng.gen_bool(0.5) {
                let f = rng.gen_range(-3..=3i64);
                for j in 0..c {
                    let v = Ring::Integers.mul_int(a.get(0, j), f);
                    a.set(r - 1, j, v);
                }
            }
            assert_eq!(a.rank(), rational_rank(&a), "{a}");
        }
    }

    #[test]
    fn rank_invariant_under_invertible_multiplication() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.gen_range(1..5);
            let a = random_z(&mut rng, n, n, 2);
            let p = unimodular(&mut rng, n);
            let q = unimodular(&mut rng, n);
            assert_eq!(p.mul(&a).unwrap().mul(&q).unwrap().rank(), a.rank());
        }
    }

    #[test]
    fn det_and_adjugate() {
        let a = z(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.det().unwrap(), Elem::Int(BigInt::from(1)));
        assert_eq!(a.adjugate().unwrap(), z(&[&[4, -1], &[-7, 2]]));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(1..5);
            let a = random_z(&mut rng, n, n, 4);
            let d = a.det().unwrap();
            let lhs = a.mul(&a.adjugate().unwrap()).unwrap();
            assert_eq!(lhs, Matrix::identity(&Ring::Integers, n).scale(&d));
        }
    }

    #[test]
    fn factor_integer_example() {
        let f = r1mf_factorize(&z(&[&[2, 4], &[3, 6]])).unwrap();
        let f = f.factorization().unwrap();
        assert_eq!(f.column, z(&[&[2], &[3]]));
        assert_eq!(f.row, z(&[&[1, 2]]));
        assert_eq!(f.to_json().to_string(), r#"{"column":[[2],[3]],"row":[[1,2]]}"#);
    }

    #[test]
    fn factor_integer_matches_divisor_brute_force() {
        // oracle: every (c, d) with small entries reproducing [[2,4],[3,6]] has d = +-(1,2)
        let target = [[2, 4], [3, 6]];
        let mut hits = Vec::new();
        for c0 in -6i64..=6 {
            for c1 in -6i64..=6 {
                for d0 in -6i64..=6 {
                    for d1 in -6i64..=6 {
                        if [[c0 * d0, c0 * d1], [c1 * d0, c1 * d1]] == target {
                            hits.push((c0, c1, d0, d1));
                        }
                    }
                }
            }
        }
        assert!(hits.contains(&(2, 3, 1, 2)));
        assert!(hits.iter().all(|h| h.2.abs() == 1));
    }

    #[test]
    fn factor_rejects_other_ranks() {
        assert_eq!(r1mf_factorize(&z(&[&[0, 0], &[0, 0]])), Err(MatrixError::RankNotOne(0)));
        assert_eq!(r1mf_factorize(&z(&[&[1, 0], &[0, 1]])), Err(MatrixError::RankNotOne(2)));
    }

    #[test]
    fn factor_over_fields() {
        let f5 = Ring::PrimeField(5);
        let a = Matrix::from_i64(&f5, &[&[0, 0], &[2, 3], &[4, 1]]);
        let f = r1mf_factorize(&a).unwrap();
        assert_eq!(f.factorization().unwrap().product(), a);
        let q = Ring::Rationals;
        let a = Matrix::from_i64(&q, &[&[3, 6], &[1, 2]]);
        assert_eq!(r1mf_factorize(&a).unwrap().factorization().unwrap().product(), a);
    }

    #[test]
    fn quadratic_certificate_for_c() {
        let out = r1mf_factorize(&dedekind_c()).unwrap();
        let R1mfOutcome::NotFactorable(cert) = out else { panic!("expected a certificate") };
        assert_eq!(cert.norm_gcd, BigInt::from(2));
        let cands: Vec<&str> = cert.rejected.iter().map(|r| r.candidate.as_str()).collect();
        assert_eq!(cands, vec!["-1", "1"]);
    }

    #[test]
    fn quadratic_search_finds_real_factorizations() {
        let k = Ring::QuadraticRing;
        let col = Matrix::column_matrix(&k, vec![Ring::quad(1, 1), Ring::quad(2, 0)]);
        let row = Matrix::row_matrix(&k, vec![Ring::quad(1, -1), Ring::quad(3, 1)]);
        let a = col.mul(&row).unwrap();
        let f = r1mf_factorize(&a).unwrap();
        assert_eq!(f.factorization().expect("factorable").product(), a);
    }

    #[test]
    fn unit_conjugation_of_elementary_family() {
        let r = Ring::Integers;
        let fam: Vec<Vec<Matrix>> = (0..3).map(|i| (0..3).map(|j| Matrix::unit(&r, 3, i, j)).collect()).collect();
        let c = conjugate_matrix_units(&fam).unwrap();
        assert_eq!(c.rho.mul(&c.rho_inverse).unwrap(), Matrix::identity(&r, 3));
    }

    #[test]
    fn unit_conjugation_recovers_random_unimodular() {
        let r = Ring::Integers;
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..30 {
            let n = rng.gen_range(1..4);
            let q = unimodular(&mut rng, n);
            let qi = q.inverse().unwrap().unwrap();
            let fam: Vec<Vec<Matrix>> = (0..n)
                .map(|i| (0..n).map(|j| q.mul(&Matrix::unit(&r, n, i, j)).unwrap().mul(&qi).unwrap()).collect())
                .collect();
            let c = conjugate_matrix_units(&fam).unwrap();
            for i in 0..n {
                for j in 0..n {
                    assert_eq!(c.rho.mul(&fam[i][j]).unwrap().mul(&c.rho_inverse).unwrap(), Matrix::unit(&r, n, i, j));
                }
            }
        }
    }

    #[test]
    fn unit_conjugation_rejects_broken_relation() {
        let r = Ring::Integers;
        let mut fam: Vec<Vec<Matrix>> = (0..2).map(|i| (0..2).map(|j| Matrix::unit(&r, 2, i, j)).collect()).collect();
        fam[0][1] = fam[0][1].scale(&r.from_i64(2));
        assert!(matches!(conjugate_matrix_units(&fam), Err(MatrixError::NotMatrixUnits(_))));
    }

    #[test]
    fn solve_and_kernel() {
        let r = Ring::Integers;
        assert_eq!(linear_solve(&z(&[&[2]]), &[r.from_i64(3)]).unwrap(), None);
        assert_eq!(linear_solve(&z(&[&[2]]), &[r.from_i64(4)]).unwrap(), Some(vec![r.from_i64(2)]));
        assert!(kernel_basis(&Matrix::identity(&r, 3)).unwrap().is_empty());
        let f2 = Ring::PrimeField(2);
        assert_eq!(kernel_basis(&Matrix::from_i64(&f2, &[&[1, 1]])).unwrap(), vec![vec![f2.one(), f2.one()]]);
        assert!(matches!(
            linear_solve(&dedekind_c(), &[Ring::quad(0, 0), Ring::quad(0, 0)]),
            Err(MatrixError::UnsupportedRing(_))
        ));
        let k = kernel_basis(&z(&[&[2, 3, 0]])).unwrap();
        assert_eq!(k, vec![vec![r.from_i64(3), r.from_i64(-2), r.zero()], vec![r.zero(), r.zero(), r.one()]]);
    }

    #[test]
    fn integer_solve_agrees_with_brute_force() {
        let r = Ring::Integers;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let a = random_z(&mut rng, 2, 2, 4);
            let b: Vec<Elem> = (0..2).map(|_| r.from_i64(rng.gen_range(-6..=6))).collect();
            let got = linear_solve(&a, &b).unwrap();
            if let Some(x) = &got {
                let ax = a.mul(&Matrix::column_matrix(&r, x.clone())).unwrap();
                assert_eq!(ax.entries, b);
            } else if a.det().unwrap() != r.zero() {
                // unique rational solution: oracle searches a bounded box of integers
                let mut found = false;
                for x0 in -40i64..=40 {
                    for x1 in -40i64..=40 {
                        let x = Matrix::column_matrix(&r, vec![r.from_i64(x0), r.from_i64(x1)]);
                        found |= a.mul(&x).unwrap().entries == b;
                    }
                }
                assert!(!found, "{a} {b:?}");
            }
        }
    }

    #[test]
    fn matrix_literal_round_trip() {
        let k = Ring::QuadraticRing;
        let m = parse_matrix(&k, r#"[["1+1*w","2"],["3","1-1*w"]]"#).unwrap();
        assert_eq!(m, dedekind_c());
        assert_eq!(parse_matrix(&k, &m.to_literal()).unwrap(), m);
        let f9 = parse_ring("F9=F3[t]/(t^2+1)").unwrap();
        let m = parse_matrix(&f9, r#"[["t","2*t+1"]]"#).unwrap();
        assert_eq!(parse_matrix(&f9, &m.to_literal()).unwrap(), m);
        assert!(parse_matrix(&Ring::Integers, "[[1,2],[3]]").is_err());
        assert!(parse_matrix(&Ring::Integers, "[[1,").is_err());
    }

    #[test]
    fn dedekind_report_holds() {
        let rep = dedekind_report().unwrap();
        assert_eq!(rep.items.len(), 5);
        for item in &rep.items {
            assert!(item.holds, "item {} failed: {}", item.id, item.witnesses);
        }
        // independent re-derivation of det m: (1+w)(1-w) - 4 = 6 - 4
        let k = Ring::QuadraticRing;
        let d = k.sub(&k.mul(&Ring::quad(1, 1), &Ring::quad(1, -1)), &k.from_i64(4));
        assert_eq!(d, k.from_i64(2));
    }
}

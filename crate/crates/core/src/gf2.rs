//! Dense linear algebra over GF(2).
//!
//! Vectors are bit-packed into `u64` words (bit `i` lives in word `i / 64`),
//! so block lengths are unbounded and row operations are whole-word XORs.
//! Every operation is a pure function of its inputs; pivoting always picks
//! the lowest column index so echelon forms are canonical.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default cap on the rank of spaces that are enumerated exhaustively.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryVector {
    len: usize,
    words: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector whose bit `i` is bit `i` of `value` (`len <= 64`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit.
    pub fn lowest_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BinaryVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BinaryVector) -> BinaryVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Componentwise product (Schur product).
    pub fn and(&self, other: &BinaryVector) -> BinaryVector {
        debug_assert_eq!(self.len, other.len);
        BinaryVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Size of the overlap of the two supports.
    pub fn overlap(&self, other: &BinaryVector) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BinaryVector) -> bool {
        let parity = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        parity.count_ones() & 1 == 1
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryVector({})", self.to_bit_string())
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | '_' => {}
                other => {
                    return Err(Error::MatrixParse {
                        line: 1,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
        }
        Ok(BinaryVector::from_bits(bits))
    }
}

impl serde::Serialize for BinaryVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

/// A binary matrix stored as a list of bit-packed rows.
///
/// A matrix with zero rows is the generator of the trivial space `{0}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<BinaryVector>,
}

/// Reduced row echelon form together with rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    /// Same shape as the input; the first `rank` rows are nonzero.
    pub reduced: BinaryMatrix,
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
}

impl BinaryMatrix {
    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BinaryVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BinaryVector::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<BinaryVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                found: bad.len(),
            });
        }
        Ok(Self { cols, rows })
    }

    /// Parses rows given as bit strings, e.g. `["110", "011"]`.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.as_ref().parse::<BinaryVector>())
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed
            .first()
            .map(BinaryVector::len)
            .ok_or_else(|| Error::MatrixParse {
                line: 0,
                message: "no rows; width unknown".into(),
            })?;
        Self::from_rows(cols, parsed)
    }

    /// Parses the plain-text matrix format: one row per line of `0`/`1`
    /// characters, optionally separated by single spaces. Lines starting
    /// with `#` and blank lines are skipped; all rows must share a width.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut cols = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut bits = Vec::with_capacity(line.len());
            let mut prev_space = false;
            for c in line.chars() {
                match c {
                    '0' | '1' => {
                        bits.push(c == '1');
                        prev_space = false;
                    }
                    ' ' if !prev_space && !bits.is_empty() => prev_space = true,
                    other => {
                        return Err(Error::MatrixParse {
                            line: line_no,
                            message: format!("unexpected character {other:?}"),
                        })
                    }
                }
            }
            match cols {
                None => cols = Some(bits.len()),
                Some(c) if c != bits.len() => {
                    return Err(Error::MatrixParse {
                        line: line_no,
                        message: format!("row has {} bits, expected {c}", bits.len()),
                    })
                }
                _ => {}
            }
            rows.push(BinaryVector::from_bits(bits));
        }
        let cols = cols.ok_or(Error::MatrixParse {
            line: 0,
            message: "no rows".into(),
        })?;
        Ok(Self { cols, rows })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            s.push_str(&r.to_bit_string());
            s.push('\n');
        }
        s
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BinaryVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BinaryVector] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        self.rows[r].set(c, bit)
    }

    pub fn push_row(&mut self, row: BinaryVector) -> Result<()> {
        self.check_len(&row)?;
        self.rows.push(row);
        Ok(())
    }

    /// Vertical concatenation `[self; other]`.
    pub fn stack(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        self.check_width(other)?;
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(Self {
            cols: self.cols,
            rows,
        })
    }

    pub fn select_rows(&self, indices: &[usize]) -> BinaryMatrix {
        Self {
            cols: self.cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut out = BinaryMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.iter_ones() {
                out.rows[c].set(r, true);
            }
        }
        out
    }

    /// `self · vᵀ`: one output bit per row.
    pub fn mul_vec(&self, v: &BinaryVector) -> Result<BinaryVector> {
        self.check_len(v)?;
        Ok(BinaryVector::from_bits(self.rows.iter().map(|r| r.dot(v))))
    }

    /// `self · otherᵀ` (row-by-row inner products).
    pub fn mul_transpose(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        self.check_width(other)?;
        let rows = self
            .rows
            .iter()
            .map(|a| BinaryVector::from_bits(other.rows.iter().map(|b| a.dot(b))))
            .collect();
        Ok(Self {
            cols: other.rows.len(),
            rows,
        })
    }

    /// Ordinary product `self · other`.
    pub fn mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.rows.len() {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: other.rows.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BinaryVector::zeros(other.cols);
                for i in r.iter_ones() {
                    acc.xor_assign(&other.rows[i]);
                }
                acc
            })
            .collect();
        Ok(Self {
            cols: other.cols,
            rows,
        })
    }

    /// `coeffs · self` for a coefficient vector of length `n_rows`.
    pub fn combine(&self, coeffs: &BinaryVector) -> Result<BinaryVector> {
        if coeffs.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                expected: self.rows.len(),
                found: coeffs.len(),
            });
        }
        let mut acc = BinaryVector::zeros(self.cols);
        for i in coeffs.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        Ok(acc)
    }

    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, found);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        Rref {
            reduced: Self {
                cols: self.cols,
                rows,
            },
            rank,
            pivot_cols: pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn inverse(&self) -> Option<BinaryMatrix> {
        let n = self.rows.len();
        if n != self.cols {
            return None;
        }
        let augmented: Vec<BinaryVector> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                BinaryVector::from_bits(
                    (0..2 * n).map(|c| if c < n { r.get(c) } else { c - n == i }),
                )
            })
            .collect();
        let Rref {
            reduced,
            rank,
            pivot_cols,
        } = BinaryMatrix {
            cols: 2 * n,
            rows: augmented,
        }
        .rref();
        if rank < n || pivot_cols.iter().any(|&p| p >= n) {
            return None;
        }
        let rows = reduced
            .rows
            .iter()
            .map(|r| BinaryVector::from_bits((n..2 * n).map(|c| r.get(c))))
            .collect();
        Some(BinaryMatrix { cols: n, rows })
    }

    /// The nonzero rows of the reduced row echelon form.
    pub fn row_basis(&self) -> BinaryMatrix {
        let Rref {
            mut reduced, rank, ..
        } = self.rref();
        reduced.rows.truncate(rank);
        reduced
    }

    /// Keeps rows in input order, dropping any row dependent on earlier ones.
    pub fn independent_rows(&self) -> BinaryMatrix {
        let mut ech = RowEchelon::new(self.cols);
        let rows = self
            .rows
            .iter()
            .filter(|r| ech.insert(r))
            .cloned()
            .collect();
        Self {
            cols: self.cols,
            rows,
        }
    }

    /// Generator of `{v : self · vᵀ = 0}`, one row per free column.
    pub fn nullspace(&self) -> BinaryMatrix {
        let Rref {
            reduced,
            rank,
            pivot_cols,
        } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivot_cols {
            is_pivot[p] = true;
        }
        let mut out = Vec::with_capacity(self.cols - rank);
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BinaryVector::unit(self.cols, free);
            for (i, &p) in pivot_cols.iter().enumerate() {
                if reduced.rows[i].get(free) {
                    v.set(p, true);
                }
            }
            out.push(v);
        }
        Self {
            cols: self.cols,
            rows: out,
        }
    }

    pub fn echelon(&self) -> RowEchelon {
        let mut ech = RowEchelon::new(self.cols);
        for r in &self.rows {
            ech.insert(r);
        }
        ech
    }

    pub fn rowspace_contains(&self, v: &BinaryVector) -> Result<bool> {
        self.check_len(v)?;
        Ok(self.echelon().contains(v))
    }

    /// Whether every row of `self` lies in the row space of `other`.
    pub fn is_subspace_of(&self, other: &BinaryMatrix) -> Result<bool> {
        Ok(self.first_row_outside(other)?.is_none())
    }

    /// First row of `self` not in the row space of `other`, if any.
    pub fn first_row_outside(&self, other: &BinaryMatrix) -> Result<Option<(usize, BinaryVector)>> {
        self.check_width(other)?;
        let ech = other.echelon();
        Ok(self
            .rows
            .iter()
            .enumerate()
            .find(|(_, r)| !ech.contains(r))
            .map(|(i, r)| (i, r.clone())))
    }

    /// Whether the two matrices generate the same row space.
    pub fn same_rowspace(&self, other: &BinaryMatrix) -> Result<bool> {
        self.check_width(other)?;
        Ok(self.row_basis() == other.row_basis())
    }

    /// All `2^rank` vectors of the row space, each exactly once, in Gray-code
    /// order over the reduced basis.
    pub fn enumerate_rowspace(&self, limit: usize) -> Result<Vec<BinaryVector>> {
        let basis = self.row_basis();
        let rank = basis.n_rows();
        if rank > limit {
            return Err(Error::RankExceedsLimit { rank, limit });
        }
        let mut out = Vec::with_capacity(1 << rank);
        gray_walk(&basis.rows, self.cols, |v| out.push(v.clone()));
        Ok(out)
    }

    fn check_len(&self, v: &BinaryVector) -> Result<()> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok(())
    }

    fn check_width(&self, other: &BinaryMatrix) -> Result<()> {
        if other.cols != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

impl serde::Serialize for BinaryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.rows.len()))?;
        for r in &self.rows {
            seq.serialize_element(&r.to_bit_string())?;
        }
        seq.end()
    }
}

/// Visits every vector of the span of `basis` once, Gray-code order.
/// `basis` must be linearly independent.
pub fn gray_walk<F: FnMut(&BinaryVector)>(basis: &[BinaryVector], len: usize, mut visit: F) {
    let mut v = BinaryVector::zeros(len);
    visit(&v);
    let total: u64 = 1u64 << basis.len();
    for i in 1..total {
        v.xor_assign(&basis[i.trailing_zeros() as usize]);
        visit(&v);
    }
}

/// Incrementally built echelon basis keyed by lowest set bit; supports
/// membership tests and reduction modulo the spanned space.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    len: usize,
    // sorted by pivot, ascending
    rows: Vec<(usize, BinaryVector)>,
}

impl RowEchelon {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Residual of `v` after eliminating every pivot; zero iff `v` is in the span.
    pub fn reduce(&self, v: &BinaryVector) -> BinaryVector {
        let mut r = v.clone();
        for (p, row) in &self.rows {
            if r.get(*p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BinaryVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Whether `a - b` lies in the span.
    pub fn congruent(&self, a: &BinaryVector, b: &BinaryVector) -> bool {
        self.contains(&a.xor(b))
    }

    /// Adds `v` to the basis; returns false if it was already in the span.
    pub fn insert(&mut self, v: &BinaryVector) -> bool {
        let r = self.reduce(v);
        match r.lowest_one() {
            None => false,
            Some(p) => {
                let at = self.rows.partition_point(|(q, _)| *q < p);
                self.rows.insert(at, (p, r));
                true
            }
        }
    }

    pub fn basis(&self) -> Vec<BinaryVector> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }
}

/// Representatives of the quotient `rowspace(c1) / rowspace(c2perp)`.
///
/// Rows of `c1` are scanned in input order and kept whenever they are
/// independent of `c2perp` and of the rows already kept, so the result is
/// made of original rows of `c1`.
pub fn quotient_basis(c1: &BinaryMatrix, c2perp: &BinaryMatrix) -> Result<BinaryMatrix> {
    if let Some((_, witness)) = c2perp.first_row_outside(c1)? {
        return Err(Error::NotContained { witness });
    }
    let mut ech = c2perp.echelon();
    let rows = c1.rows.iter().filter(|r| ech.insert(r)).cloned().collect();
    Ok(BinaryMatrix {
        cols: c1.cols,
        rows,
    })
}

/// Weight distribution of the row space: entry `w` counts vectors of weight `w`.
pub fn weight_enumerator(m: &BinaryMatrix) -> Result<Vec<u128>> {
    weight_enumerator_with_limit(m, DEFAULT_ENUMERATION_LIMIT)
}

/// Enumerates directly when `rank <= limit`, otherwise enumerates the dual
/// and applies the MacWilliams transform.
pub fn weight_enumerator_with_limit(m: &BinaryMatrix, limit: usize) -> Result<Vec<u128>> {
    let basis = m.row_basis();
    let rank = basis.n_rows();
    if rank <= limit {
        return Ok(direct_weight_enumerator(&basis));
    }
    let dual = m.nullspace();
    let dual_rank = dual.n_rows();
    if dual_rank <= limit {
        let dual_enum = direct_weight_enumerator(&dual);
        return macwilliams(&dual_enum, dual_rank);
    }
    Err(Error::EnumeratorInfeasible {
        rank,
        dual_rank,
        limit,
    })
}

/// Weight distribution of the span of an independent row set, by enumeration.
pub fn direct_weight_enumerator(basis: &BinaryMatrix) -> Vec<u128> {
    let mut counts = vec![0u128; basis.n_cols() + 1];
    gray_walk(basis.rows(), basis.n_cols(), |v| counts[v.weight()] += 1);
    counts
}

/// Weight distribution of `C⊥` from that of `C`, where `dim C = rank`:
/// `B_w = 2^-rank · Σ_i A_i K_w(i)` with Krawtchouk polynomials `K_w`.
pub fn macwilliams(enumerator: &[u128], rank: usize) -> Result<Vec<u128>> {
    let n = enumerator.len() - 1;
    let binom = binomial_table(n);
    let scale = BigInt::from(1u8) << rank;
    let mut out = Vec::with_capacity(n + 1);
    for w in 0..=n {
        let mut sum = BigInt::zero();
        for (i, &a) in enumerator.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let mut k = BigInt::zero();
            for j in 0..=w.min(i) {
                if w - j > n - i {
                    continue;
                }
                let term = &binom[i][j] * &binom[n - i][w - j];
                if j % 2 == 0 {
                    k += term;
                } else {
                    k -= term;
                }
            }
            sum += k * BigInt::from(a);
        }
        debug_assert!((&sum % &scale).is_zero());
        let value = sum / &scale;
        out.push(value.to_u128().ok_or(Error::EnumeratorOverflow)?);
    }
    Ok(out)
}

fn binomial_table(n: usize) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut row = vec![BigInt::from(1u8); i + 1];
        for j in 1..i {
            row[j] = &t[i - 1][j - 1] + &t[i - 1][j];
        }
        t.push(row);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&str]) -> BinaryMatrix {
        BinaryMatrix::from_bit_strings(rows).unwrap()
    }

    #[test]
    fn rref_identity() {
        let id = BinaryMatrix::identity(3);
        let r = id.rref();
        assert_eq!(r.reduced, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivot_cols, vec![0, 1, 2]);
    }

    #[test]
    fn rref_dependent_rows() {
        let r = m(&["110", "011", "101"]).rref();
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivot_cols, vec![0, 1]);
        assert_eq!(r.reduced, m(&["101", "011", "000"]));
    }

    #[test]
    fn nullspace_of_repetition_check() {
        let ns = m(&["111"]).nullspace();
        assert_eq!(ns.n_rows(), 2);
        assert!(ns.same_rowspace(&m(&["110", "011"])).unwrap());
        assert_eq!(BinaryMatrix::identity(4).nullspace().n_rows(), 0);
    }

    #[test]
    fn membership() {
        let a = m(&["110", "011"]);
        assert!(a.rowspace_contains(&"000".parse().unwrap()).unwrap());
        // 110 + 011 = 101; 111 is not in the span
        assert!(a.rowspace_contains(&"101".parse().unwrap()).unwrap());
        assert!(!a.rowspace_contains(&"111".parse().unwrap()).unwrap());
        assert!(!a.rowspace_contains(&"100".parse().unwrap()).unwrap());
        assert!(matches!(
            a.rowspace_contains(&"1111".parse().unwrap()),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn subspace_relation() {
        assert!(BinaryMatrix::empty(3).is_subspace_of(&m(&["101"])).unwrap());
        assert!(m(&["110"]).is_subspace_of(&m(&["110", "011"])).unwrap());
        assert!(!m(&["100"]).is_subspace_of(&m(&["110", "011"])).unwrap());
        assert!(m(&["10"]).is_subspace_of(&m(&["101"])).is_err());
    }

    #[test]
    fn enumerate_small_spaces() {
        let zero = BinaryMatrix::empty(3).enumerate_rowspace(24).unwrap();
        assert_eq!(zero, vec![BinaryVector::zeros(3)]);
        let mut all: Vec<String> = m(&["10", "01"])
            .enumerate_rowspace(24)
            .unwrap()
            .iter()
            .map(|v| v.to_bit_string())
            .collect();
        all.sort();
        assert_eq!(all, vec!["00", "01", "10", "11"]);
        let err = BinaryMatrix::identity(5).enumerate_rowspace(4).unwrap_err();
        assert!(matches!(err, Error::RankExceedsLimit { rank: 5, limit: 4 }));
    }

    #[test]
    fn quotient_of_space_by_itself_is_empty() {
        let a = m(&["110", "011"]);
        assert_eq!(quotient_basis(&a, &a).unwrap().n_rows(), 0);
        let err = quotient_basis(&m(&["110"]), &m(&["001"])).unwrap_err();
        assert!(matches!(err, Error::NotContained { .. }));
    }

    #[test]
    fn small_enumerators() {
        assert_eq!(
            weight_enumerator(&BinaryMatrix::empty(3)).unwrap(),
            vec![1, 0, 0, 0]
        );
        assert_eq!(weight_enumerator(&m(&["11"])).unwrap(), vec![1, 0, 1]);
        // [7,4] Hamming code via the dual route
        let h = m(&["1010101", "0110011", "0001111"]);
        let hamming = h.nullspace();
        let direct = weight_enumerator(&hamming).unwrap();
        assert_eq!(direct, vec![1, 0, 0, 7, 7, 0, 0, 1]);
        let via_dual = weight_enumerator_with_limit(&hamming, 3).unwrap();
        assert_eq!(via_dual, direct);
        assert!(matches!(
            weight_enumerator_with_limit(&hamming, 2),
            Err(Error::EnumeratorInfeasible { .. })
        ));
    }

    #[test]
    fn parse_text_format() {
        let text = "# comment\n\n1 0 1\n011\n";
        let a = BinaryMatrix::parse_text(text).unwrap();
        assert_eq!(a, m(&["101", "011"]));
        assert!(BinaryMatrix::parse_text("101\n01\n").is_err());
        assert!(BinaryMatrix::parse_text("1x1\n").is_err());
        assert!(BinaryMatrix::parse_text("1  0\n").is_err());
    }

    #[test]
    fn multiword_rows() {
        let n = 158;
        let mut v = BinaryVector::zeros(n);
        v.set(0, true);
        v.set(64, true);
        v.set(157, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 64, 157]);
        assert_eq!(BinaryVector::ones(n).weight(), n);
        let a = BinaryMatrix::from_rows(n, vec![v.clone(), BinaryVector::ones(n)]).unwrap();
        assert_eq!(a.rank(), 2);
        assert_eq!(a.nullspace().n_rows(), n - 2);
        assert!(a
            .nullspace()
            .mul_transpose(&a)
            .unwrap()
            .rows()
            .iter()
            .all(|r| r.is_zero()));
    }
}

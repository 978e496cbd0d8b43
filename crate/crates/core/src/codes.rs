//! Classical, CSS, triorthogonal and mirrored codes.
//!
//! Stabilizer convention: X-type stabilizers generate `C2⊥` and Z-type
//! stabilizers generate `C1⊥`. For a triorthogonal matrix `G = [G1; G0]`
//! this gives X-stabilizers `G0` and Z-stabilizers `G⊥`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{quotient_basis, BinaryMatrix, BinaryVector, DEFAULT_ENUMERATION_LIMIT};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalCode {
    gen: BinaryMatrix,
}

impl ClassicalCode {
    /// Dependent rows are dropped; the remaining rows keep their input order.
    pub fn new(gen: BinaryMatrix) -> Self {
        Self {
            gen: gen.independent_rows(),
        }
    }

    pub fn full_space(n: usize) -> Self {
        Self {
            gen: BinaryMatrix::identity(n),
        }
    }

    pub fn gen(&self) -> &BinaryMatrix {
        &self.gen
    }

    pub fn n(&self) -> usize {
        self.gen.n_cols()
    }

    pub fn k(&self) -> usize {
        self.gen.n_rows()
    }

    pub fn contains(&self, v: &BinaryVector) -> Result<bool> {
        self.gen.rowspace_contains(v)
    }
}

/// CSS(C1, C2) with `C2⊥ ⊆ C1`.
#[derive(Clone, Debug)]
pub struct CssCode {
    n: usize,
    k: usize,
    c1: ClassicalCode,
    c2: ClassicalCode,
    x_stab: BinaryMatrix,
    z_stab: BinaryMatrix,
    map_a: BinaryMatrix,
}

impl CssCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c1(&self) -> &ClassicalCode {
        &self.c1
    }

    pub fn c2(&self) -> &ClassicalCode {
        &self.c2
    }

    /// Generator of `C2⊥`; these supports carry X-type stabilizers.
    pub fn x_stab(&self) -> &BinaryMatrix {
        &self.x_stab
    }

    /// Generator of `C1⊥`; these supports carry Z-type stabilizers.
    pub fn z_stab(&self) -> &BinaryMatrix {
        &self.z_stab
    }

    /// Mapping matrix: logical label `ψ` encodes as coset `ψ·A + C2⊥`.
    pub fn map_a(&self) -> &BinaryMatrix {
        &self.map_a
    }

    /// Coset representative `x_ψ = ψ·A`.
    pub fn encode(&self, psi: &BinaryVector) -> Result<BinaryVector> {
        self.map_a.combine(psi)
    }

    /// Replaces the mapping matrix after checking it still represents
    /// `C1 / C2⊥`.
    pub fn with_map_a(self, map_a: BinaryMatrix) -> Result<Self> {
        if map_a.n_cols() != self.n || map_a.n_rows() != self.k {
            return Err(Error::ShapeMismatch(format!(
                "mapping matrix must be {}x{}, got {}x{}",
                self.k,
                self.n,
                map_a.n_rows(),
                map_a.n_cols()
            )));
        }
        if let Some((_, witness)) = map_a.first_row_outside(self.c1.gen())? {
            return Err(Error::NotContained { witness });
        }
        let mut ech = self.x_stab.echelon();
        if !map_a.rows().iter().all(|r| ech.insert(r)) {
            return Err(Error::DependentLogicalRows);
        }
        Ok(self.with_map_a_unchecked(map_a))
    }

    /// Replaces the mapping matrix without validation. Used to build
    /// deliberately broken codes for negative-control checks.
    pub fn with_map_a_unchecked(mut self, map_a: BinaryMatrix) -> Self {
        self.map_a = map_a;
        self
    }

    pub fn describe(&self, distance: Option<usize>) -> CodeDescription {
        CodeDescription {
            n: self.n,
            k: self.k,
            distance,
            x_stab: self.x_stab.clone(),
            z_stab: self.z_stab.clone(),
            map_a: self.map_a.clone(),
        }
    }

    /// Row-space equality of both classical codes and both stabilizer groups.
    pub fn same_spaces(&self, other: &CssCode) -> Result<bool> {
        Ok(self.n == other.n
            && self.c1.gen.same_rowspace(&other.c1.gen)?
            && self.c2.gen.same_rowspace(&other.c2.gen)?
            && self.x_stab.same_rowspace(&other.x_stab)?
            && self.z_stab.same_rowspace(&other.z_stab)?)
    }
}

/// JSON shape for emitted code descriptions.
#[derive(Clone, Debug, Serialize)]
pub struct CodeDescription {
    pub n: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distance: Option<usize>,
    pub x_stab: BinaryMatrix,
    pub z_stab: BinaryMatrix,
    pub map_a: BinaryMatrix,
}

pub fn build_css(c1: &ClassicalCode, c2: &ClassicalCode) -> Result<CssCode> {
    if c1.n() != c2.n() {
        return Err(Error::LengthMismatch {
            expected: c1.n(),
            found: c2.n(),
        });
    }
    let n = c1.n();
    let x_stab = c2.gen.nullspace();
    if let Some((_, witness)) = x_stab.first_row_outside(&c1.gen)? {
        return Err(Error::DualContainment { witness });
    }
    let z_stab = c1.gen.nullspace();
    let k = c1.k() + c2.k() - n;
    if k == 0 {
        return Err(Error::NoLogicalQubits);
    }
    let map_a = quotient_basis(&c1.gen, &x_stab)?;
    debug_assert_eq!(map_a.n_rows(), k);
    Ok(CssCode {
        n,
        k,
        c1: c1.clone(),
        c2: c2.clone(),
        x_stab,
        z_stab,
        map_a,
    })
}

/// CSS(C2, C1): X and Z stabilizers exchanged.
///
/// The mirrored mapping matrix `B` is the dual basis of `A` under the
/// inner product (`A·Bᵀ = I`), which pairs logical qubit `i` of the source
/// with logical qubit `i` of the mirror. `B` spans the same quotient
/// `C2 / C1⊥` as `quotient_basis(C2, C1⊥)`.
pub fn mirror(q: &CssCode) -> CssCode {
    let raw = quotient_basis(&q.c2.gen, &q.z_stab)
        .expect("C1⊥ ⊆ C2 holds for every constructed CSS code");
    let pairing = q
        .map_a
        .mul_transpose(&raw)
        .expect("mapping matrices share the block length");
    let inv = pairing
        .inverse()
        .expect("the logical pairing of a CSS code is nondegenerate");
    let map_b = inv.transpose().mul(&raw).expect("k x k times k x n");
    CssCode {
        n: q.n,
        k: q.k,
        c1: q.c2.clone(),
        c2: q.c1.clone(),
        x_stab: q.z_stab.clone(),
        z_stab: q.x_stab.clone(),
        map_a: map_b,
    }
}

/// Outcome of an exhaustive triorthogonality test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriReport {
    pub is_triorthogonal: bool,
    pub pair_violations: Vec<(usize, usize)>,
    pub triple_violations: Vec<(usize, usize, usize)>,
    pub odd_rows: Vec<usize>,
    pub even_rows: Vec<usize>,
}

/// Tests every pair and every triple of rows for even overlap.
pub fn check_triorthogonal(g: &BinaryMatrix) -> TriReport {
    let m = g.n_rows();
    let rows = g.rows();
    let mut pair_violations = Vec::new();
    let mut triple_violations = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            let ab = rows[a].and(&rows[b]);
            if ab.weight() % 2 == 1 {
                pair_violations.push((a, b));
            }
            for (c, row) in rows.iter().enumerate().skip(b + 1) {
                if ab.overlap(row) % 2 == 1 {
                    triple_violations.push((a, b, c));
                }
            }
        }
    }
    let (odd_rows, even_rows) = (0..m).partition(|&i| rows[i].weight() % 2 == 1);
    TriReport {
        is_triorthogonal: pair_violations.is_empty() && triple_violations.is_empty(),
        pair_violations,
        triple_violations,
        odd_rows,
        even_rows,
    }
}

/// A CSS code generated by a triorthogonal matrix `G = [G1; G0]`.
#[derive(Clone, Debug)]
pub struct TriorthogonalCode {
    base: CssCode,
    g1: BinaryMatrix,
    g0: BinaryMatrix,
}

impl TriorthogonalCode {
    pub fn base(&self) -> &CssCode {
        &self.base
    }

    /// Odd-weight rows; row `i` is the X-logical of logical qubit `i`.
    pub fn g1(&self) -> &BinaryMatrix {
        &self.g1
    }

    /// Even-weight rows.
    pub fn g0(&self) -> &BinaryMatrix {
        &self.g0
    }

    pub fn generator(&self) -> BinaryMatrix {
        self.g1.stack(&self.g0).expect("same width")
    }

    pub fn mirror(&self) -> CssCode {
        mirror(&self.base)
    }
}

impl AsRef<CssCode> for TriorthogonalCode {
    fn as_ref(&self) -> &CssCode {
        &self.base
    }
}

/// C1 = rowspace(G), C2 = rowspace(G0⊥); rows are split by weight parity.
pub fn build_triorthogonal(g: &BinaryMatrix) -> Result<TriorthogonalCode> {
    let report = check_triorthogonal(g);
    if !report.is_triorthogonal {
        return Err(Error::NotTriorthogonal(Box::new(report)));
    }
    if report.odd_rows.is_empty() {
        return Err(Error::NoLogicalQubits);
    }
    let g1 = g.select_rows(&report.odd_rows);
    let g0 = g.select_rows(&report.even_rows).independent_rows();
    let stacked = g1.stack(&g0)?;
    let c1 = ClassicalCode::new(stacked.clone());
    if c1.k() != g1.n_rows() + g0.n_rows() {
        return Err(Error::DependentLogicalRows);
    }
    let n = g.n_cols();
    let c2 = ClassicalCode {
        gen: g0.nullspace(),
    };
    let k = g1.n_rows();
    debug_assert_eq!(c1.k() + c2.k() - n, k);
    let base = CssCode {
        n,
        k,
        z_stab: stacked.nullspace(),
        x_stab: g0.clone(),
        map_a: g1.clone(),
        c1,
        c2,
    };
    Ok(TriorthogonalCode { base, g1, g0 })
}

/// Generator of the punctured first-order Reed–Muller code of length 15:
/// the all-ones row followed by four weight-8 rows, where column `j` of the
/// weight-8 rows is the 4-bit binary label `j + 1`.
pub fn builtin_15_1_3_generator() -> BinaryMatrix {
    let n = 15;
    let mut rows = vec![BinaryVector::ones(n)];
    for bit in 0..4 {
        rows.push(BinaryVector::from_bits(
            (0..n).map(|j| ((j + 1) >> bit) & 1 == 1),
        ));
    }
    BinaryMatrix::from_rows(n, rows).expect("static shape")
}

/// The [[15,1,3]] triorthogonal code.
pub fn builtin_15_1_3() -> TriorthogonalCode {
    build_triorthogonal(&builtin_15_1_3_generator()).expect("built-in generator is triorthogonal")
}

/// Minimum weights of `C1 \ C2⊥` and `C2 \ C1⊥`, by enumeration.
pub fn distance_sides(q: &CssCode, limit: usize) -> Result<(usize, usize)> {
    let side = |code: &ClassicalCode, stab: &BinaryMatrix| -> Result<usize> {
        let rank = code.k();
        if rank > limit {
            return Err(Error::RankExceedsLimit { rank, limit });
        }
        let ech = stab.echelon();
        let mut best = usize::MAX;
        crate::gf2::gray_walk(code.gen.rows(), q.n, |v| {
            let w = v.weight();
            if w > 0 && w < best && !ech.contains(v) {
                best = w;
            }
        });
        Ok(best)
    };
    Ok((side(&q.c1, &q.x_stab)?, side(&q.c2, &q.z_stab)?))
}

/// `min` over nontrivial logical operators of both types.
pub fn code_distance(q: &CssCode) -> Result<usize> {
    let (a, b) = distance_sides(q, DEFAULT_ENUMERATION_LIMIT)?;
    Ok(a.min(b))
}

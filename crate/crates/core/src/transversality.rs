//! Transversality checks between CSS code blocks.
//!
//! Two kinds of checks live here. The `check_*` functions test algebraic
//! subspace conditions on the generator and mapping matrices. The
//! `verify_*` functions are ground truth: they expand the logical basis
//! states `|ψ⟩_L = Σ_{y ∈ C2⊥} |ψ·A + y⟩` and compare the action of the
//! physical transversal gate with the intended logical gate, coset by coset.
//!
//! All loops run in a fixed order (logical labels lexicographically, then
//! coset elements) and stop at the first violation, so witnesses are
//! reproducible.

use serde::Serialize;

use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{BinaryMatrix, BinaryVector, RowEchelon, DEFAULT_ENUMERATION_LIMIT};

/// Three code blocks: two controls and a target.
#[derive(Clone, Debug)]
pub struct HybridSystem {
    blocks: [CssCode; 3],
}

impl HybridSystem {
    pub fn new(control1: CssCode, control2: CssCode, target: CssCode) -> Result<Self> {
        let n = control1.n();
        let k = control1.k();
        for (i, b) in [&control2, &target].into_iter().enumerate() {
            if b.n() != n || b.k() != k {
                return Err(Error::ShapeMismatch(format!(
                    "block {} is [[{}, {}]], block 1 is [[{n}, {k}]]",
                    i + 2,
                    b.n(),
                    b.k()
                )));
            }
        }
        Ok(Self {
            blocks: [control1, control2, target],
        })
    }

    /// `(Q, Q, mirror(Q))`.
    pub fn from_code(code: &CssCode) -> Self {
        let target = crate::codes::mirror(code);
        Self {
            blocks: [code.clone(), code.clone(), target],
        }
    }

    pub fn blocks(&self) -> &[CssCode; 3] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &CssCode {
        &self.blocks[i]
    }

    pub fn n(&self) -> usize {
        self.blocks[0].n()
    }

    pub fn k(&self) -> usize {
        self.blocks[0].k()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Codes encode different numbers of logical qubits.
    DimensionMismatch { k_a: usize, k_b: usize },
    /// `row` lies in the first named space but not in the second.
    NotSubspace {
        clause: &'static str,
        row_index: usize,
        row: BinaryVector,
    },
    /// Logical row `index` of the control is not congruent to the target's.
    MapMisaligned {
        index: usize,
        control_row: BinaryVector,
        target_row: BinaryVector,
    },
    /// `A·Bᵀ` differs from the identity.
    PairingNotIdentity { product: BinaryMatrix },
    /// Target block leaves the coset labelled `ψa ⊕ ψb`.
    CnotCoset {
        psi_a: BinaryVector,
        psi_b: BinaryVector,
        y_a: BinaryVector,
        output: BinaryVector,
        expected: BinaryVector,
    },
    /// Physical CZ phase `u·v` differs from the logical phase `ψa·ψb`.
    CzPhase {
        psi_a: BinaryVector,
        psi_b: BinaryVector,
        u: BinaryVector,
        v: BinaryVector,
        physical: u8,
        logical: u8,
    },
    /// Weight mod 8 of `x_ψ + y` is not the value the logical T demands.
    TPhase {
        psi: BinaryVector,
        y: BinaryVector,
        weight_mod8: u8,
        reference_mod8: u8,
        reason: &'static str,
    },
    /// `(x1 + y1) ∘ (x2 + y2)` is not in the target coset of `ψ1 ∘ ψ2`.
    Toffoli {
        psi1: BinaryVector,
        psi2: BinaryVector,
        y1: BinaryVector,
        y2: BinaryVector,
        product: BinaryVector,
        expected: BinaryVector,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityVerdict {
    pub gate: &'static str,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub induced_sign: Option<i8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub checks_performed: u64,
}

impl TransversalityVerdict {
    fn pass(gate: &'static str, checks: u64) -> Self {
        Self {
            gate,
            holds: true,
            induced_sign: None,
            reduction: None,
            witness: None,
            checks_performed: checks,
        }
    }

    fn fail(gate: &'static str, witness: Witness, checks: u64) -> Self {
        Self {
            gate,
            holds: false,
            induced_sign: None,
            reduction: None,
            witness: Some(witness),
            checks_performed: checks,
        }
    }
}

fn same_length(a: &CssCode, b: &CssCode) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::ShapeMismatch(format!(
            "block lengths {} and {} differ",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// All labels in `F₂ᵏ`, lexicographic with component 0 most significant.
pub fn logical_labels(k: usize) -> impl Iterator<Item = BinaryVector> {
    (0u64..1u64 << k)
        .map(move |i| BinaryVector::from_bits((0..k).map(|j| (i >> (k - 1 - j)) & 1 == 1)))
}

fn encoded_labels(q: &CssCode, limit: usize) -> Result<Vec<(BinaryVector, BinaryVector)>> {
    if q.k() > limit {
        return Err(Error::RankExceedsLimit { rank: q.k(), limit });
    }
    logical_labels(q.k())
        .map(|psi| {
            let x = q.encode(&psi)?;
            Ok((psi, x))
        })
        .collect()
}

/// Control `qa`, target `qb`: quotients aligned row by row modulo the
/// target's X-stabilizers, and `C2ᵃ⊥ ⊆ C4ᵇ⊥`.
pub fn check_cnot_condition(qa: &CssCode, qb: &CssCode) -> Result<TransversalityVerdict> {
    const GATE: &str = "cnot";
    same_length(qa, qb)?;
    if qa.k() != qb.k() {
        return Ok(TransversalityVerdict::fail(
            GATE,
            Witness::DimensionMismatch {
                k_a: qa.k(),
                k_b: qb.k(),
            },
            0,
        ));
    }
    let target_stab = qb.x_stab().echelon();
    let mut checks = 0;
    for (i, row) in qa.x_stab().rows().iter().enumerate() {
        checks += 1;
        if !target_stab.contains(row) {
            return Ok(TransversalityVerdict::fail(
                GATE,
                Witness::NotSubspace {
                    clause: "C2a_perp in C4b_perp",
                    row_index: i,
                    row: row.clone(),
                },
                checks,
            ));
        }
    }
    for i in 0..qa.k() {
        checks += 1;
        let (ra, rb) = (qa.map_a().row(i), qb.map_a().row(i));
        if !target_stab.congruent(ra, rb) {
            return Ok(TransversalityVerdict::fail(
                GATE,
                Witness::MapMisaligned {
                    index: i,
                    control_row: ra.clone(),
                    target_row: rb.clone(),
                },
                checks,
            ));
        }
    }
    Ok(TransversalityVerdict::pass(GATE, checks))
}

/// Sufficient CZ conditions: `A`'s rows in `C4`, `C3 ⊆ C2`, `A·Bᵀ = I`.
pub fn check_cz_condition(qa: &CssCode, qb: &CssCode) -> Result<TransversalityVerdict> {
    const GATE: &str = "cz";
    same_length(qa, qb)?;
    if qa.k() != qb.k() {
        return Ok(TransversalityVerdict::fail(
            GATE,
            Witness::DimensionMismatch {
                k_a: qa.k(),
                k_b: qb.k(),
            },
            0,
        ));
    }
    let mut checks = 0;
    let c4 = qb.c2().gen().echelon();
    for (i, row) in qa.map_a().rows().iter().enumerate() {
        checks += 1;
        if !c4.contains(row) {
            return Ok(TransversalityVerdict::fail(
                GATE,
                Witness::NotSubspace {
                    clause: "C1a/C2a_perp in C4b",
                    row_index: i,
                    row: row.clone(),
                },
                checks,
            ));
        }
    }
    let c2 = qa.c2().gen().echelon();
    for (i, row) in qb.c1().gen().rows().iter().enumerate() {
        checks += 1;
        if !c2.contains(row) {
            return Ok(TransversalityVerdict::fail(
                GATE,
                Witness::NotSubspace {
                    clause: "C3b in C2a",
                    row_index: i,
                    row: row.clone(),
                },
                checks,
            ));
        }
    }
    checks += 1;
    let product = qa.map_a().mul_transpose(qb.map_a())?;
    if product != BinaryMatrix::identity(qa.k()) {
        return Ok(TransversalityVerdict::fail(
            GATE,
            Witness::PairingNotIdentity { product },
            checks,
        ));
    }
    Ok(TransversalityVerdict::pass(GATE, checks))
}

pub fn verify_cnot_coset(qa: &CssCode, qb: &CssCode) -> Result<TransversalityVerdict> {
    verify_cnot_coset_with_limit(qa, qb, DEFAULT_ENUMERATION_LIMIT)
}

/// For every `ψa, ψb` and `ya ∈ C2ᵃ⊥`, the target update
/// `x_ψa + ya + x'_ψb` must be congruent to `x'_{ψa⊕ψb}` modulo the
/// target's X-stabilizers. Summing over `yb` cannot change the coset, so it
/// is not enumerated.
pub fn verify_cnot_coset_with_limit(
    qa: &CssCode,
    qb: &CssCode,
    limit: usize,
) -> Result<TransversalityVerdict> {
    const GATE: &str = "cnot";
    same_length(qa, qb)?;
    if qa.k() != qb.k() {
        return Ok(TransversalityVerdict::fail(
            GATE,
            Witness::DimensionMismatch {
                k_a: qa.k(),
                k_b: qb.k(),
            },
            0,
        ));
    }
    let ya_all = qa.x_stab().enumerate_rowspace(limit)?;
    let la = encoded_labels(qa, limit)?;
    let lb = encoded_labels(qb, limit)?;
    let target_stab = qb.x_stab().echelon();
    let mut checks = 0;
    for (psi_a, xa) in &la {
        for (psi_b, xb) in &lb {
            let expected = qb.encode(&psi_a.xor(psi_b))?;
            for ya in &ya_all {
                checks += 1;
                let mut output = xa.xor(ya);
                output.xor_assign(xb);
                if !target_stab.congruent(&output, &expected) {
                    return Ok(TransversalityVerdict::fail(
                        GATE,
                        Witness::CnotCoset {
                            psi_a: psi_a.clone(),
                            psi_b: psi_b.clone(),
                            y_a: ya.clone(),
                            output,
                            expected,
                        },
                        checks,
                    ));
                }
            }
        }
    }
    Ok(TransversalityVerdict::pass(GATE, checks))
}

pub fn verify_cz_phase(qa: &CssCode, qb: &CssCode) -> Result<TransversalityVerdict> {
    verify_cz_phase_with_limit(qa, qb, DEFAULT_ENUMERATION_LIMIT)
}

/// Physical CZ⊗n multiplies `|u⟩|v⟩` by `(-1)^{u·v}`; logical CZ⊗k
/// multiplies `|ψa⟩|ψb⟩` by `(-1)^{ψa·ψb}`. Every basis pair of the two
/// coset expansions must agree.
pub fn verify_cz_phase_with_limit(
    qa: &CssCode,
    qb: &CssCode,
    limit: usize,
) -> Result<TransversalityVerdict> {
    const GATE: &str = "cz";
    same_length(qa, qb)?;
    if qa.k() != qb.k() {
        return Ok(TransversalityVerdict::fail(
            GATE,
            Witness::DimensionMismatch {
                k_a: qa.k(),
                k_b: qb.k(),
            },
            0,
        ));
    }
    let ya_all = qa.x_stab().enumerate_rowspace(limit)?;
    let yb_all = qb.x_stab().enumerate_rowspace(limit)?;
    let la = encoded_labels(qa, limit)?;
    let lb = encoded_labels(qb, limit)?;
    let mut checks = 0;
    for (psi_a, xa) in &la {
        for (psi_b, xb) in &lb {
            let logical = psi_a.dot(psi_b) as u8;
            for ya in &ya_all {
                let u = xa.xor(ya);
                for yb in &yb_all {
                    checks += 1;
                    let v = xb.xor(yb);
                    let physical = u.dot(&v) as u8;
                    if physical != logical {
                        return Ok(TransversalityVerdict::fail(
                            GATE,
                            Witness::CzPhase {
                                psi_a: psi_a.clone(),
                                psi_b: psi_b.clone(),
                                u,
                                v,
                                physical,
                                logical,
                            },
                            checks,
                        ));
                    }
                }
            }
        }
    }
    Ok(TransversalityVerdict::pass(GATE, checks))
}

pub fn verify_t_transversality(q: &CssCode) -> Result<TransversalityVerdict> {
    verify_t_transversality_with_limit(q, DEFAULT_ENUMERATION_LIMIT)
}

/// Physical T⊗n multiplies `|v⟩` by `ω^{wt(v)}` with `ω = e^{iπ/4}`. The
/// code is T-transversal when `wt(x_ψ + y) mod 8` is constant on each coset
/// and, relative to the `ψ = 0` coset, equals `s·|ψ| mod 8` for a single
/// sign `s`; `s = -1` means the physical gate acts as logical T†.
pub fn verify_t_transversality_with_limit(
    q: &CssCode,
    limit: usize,
) -> Result<TransversalityVerdict> {
    const GATE: &str = "t";
    let ys = q.x_stab().enumerate_rowspace(limit)?;
    let labels = encoded_labels(q, limit)?;
    let mut checks = 0;
    let mut reference = None;
    let (mut plus_ok, mut minus_ok) = (true, true);
    for (psi, x) in &labels {
        let first = (x.xor(&ys[0]).weight() % 8) as u8;
        for y in &ys {
            checks += 1;
            let w = (x.xor(y).weight() % 8) as u8;
            if w != first {
                return Ok(TransversalityVerdict::fail(
                    GATE,
                    Witness::TPhase {
                        psi: psi.clone(),
                        y: y.clone(),
                        weight_mod8: w,
                        reference_mod8: first,
                        reason: "weight mod 8 not constant on coset",
                    },
                    checks,
                ));
            }
        }
        let base = *reference.get_or_insert(first);
        let rel = (first + 8 - base) % 8;
        let ones = (psi.weight() % 8) as u8;
        plus_ok &= rel == ones;
        minus_ok &= rel == (8 - ones) % 8;
        if !plus_ok && !minus_ok {
            return Ok(TransversalityVerdict::fail(
                GATE,
                Witness::TPhase {
                    psi: psi.clone(),
                    y: ys[0].clone(),
                    weight_mod8: first,
                    reference_mod8: base,
                    reason: "relative phase is not a uniform T or T-dagger",
                },
                checks,
            ));
        }
    }
    let mut verdict = TransversalityVerdict::pass(GATE, checks);
    verdict.induced_sign = Some(if plus_ok { 1 } else { -1 });
    Ok(verdict)
}

/// T_X = HTH on the mirror of `source`. Transversal Hadamards map the
/// mirror's stabilizers and logical operators onto the source's, so the
/// question reduces to T-transversality of the source.
pub fn verify_tx_transversality(
    q_mirror: &CssCode,
    source: &CssCode,
) -> Result<TransversalityVerdict> {
    if q_mirror.n() != source.n() || q_mirror.k() != source.k() {
        return Err(Error::NotMirror("block shapes differ".into()));
    }
    if !q_mirror.x_stab().same_rowspace(source.z_stab())? {
        return Err(Error::NotMirror(
            "X-stabilizers of the mirror must equal Z-stabilizers of the source".into(),
        ));
    }
    if !q_mirror.z_stab().same_rowspace(source.x_stab())? {
        return Err(Error::NotMirror(
            "Z-stabilizers of the mirror must equal X-stabilizers of the source".into(),
        ));
    }
    let mut verdict = verify_t_transversality(source)?;
    verdict.gate = "tx";
    verdict.reduction = Some("hadamard_conjugation_to_source_t");
    Ok(verdict)
}

pub fn verify_toffoli_transversality(sys: &HybridSystem) -> Result<TransversalityVerdict> {
    verify_toffoli_transversality_with_limit(sys, DEFAULT_ENUMERATION_LIMIT)
}

/// Physical Toffoli⊗n maps `|u⟩|v⟩|w⟩ → |u⟩|v⟩|w ⊕ u∘v⟩`. For all labels
/// and all `y1, y2` of the control cosets, `(x_ψ1 + y1) ∘ (x_ψ2 + y2)` must
/// be congruent to `x''_{ψ1∘ψ2}` modulo the target's X-stabilizers.
pub fn verify_toffoli_transversality_with_limit(
    sys: &HybridSystem,
    limit: usize,
) -> Result<TransversalityVerdict> {
    const GATE: &str = "toffoli";
    let [b1, b2, b3] = sys.blocks();
    let y1_all = b1.x_stab().enumerate_rowspace(limit)?;
    let y2_all = b2.x_stab().enumerate_rowspace(limit)?;
    let l1 = encoded_labels(b1, limit)?;
    let l2 = encoded_labels(b2, limit)?;
    let target_stab: RowEchelon = b3.x_stab().echelon();
    let mut checks = 0;
    for (psi1, x1) in &l1 {
        for (psi2, x2) in &l2 {
            let expected = b3.encode(&psi1.and(psi2))?;
            for y1 in &y1_all {
                let u = x1.xor(y1);
                for y2 in &y2_all {
                    checks += 1;
                    let product = u.and(&x2.xor(y2));
                    if !target_stab.congruent(&product, &expected) {
                        return Ok(TransversalityVerdict::fail(
                            GATE,
                            Witness::Toffoli {
                                psi1: psi1.clone(),
                                psi2: psi2.clone(),
                                y1: y1.clone(),
                                y2: y2.clone(),
                                product,
                                expected,
                            },
                            checks,
                        ));
                    }
                }
            }
        }
    }
    Ok(TransversalityVerdict::pass(GATE, checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_triorthogonal, builtin_15_1_3, mirror};

    #[test]
    fn labels_are_lexicographic() {
        let all: Vec<String> = logical_labels(2).map(|v| v.to_bit_string()).collect();
        assert_eq!(all, vec!["00", "01", "10", "11"]);
        assert_eq!(logical_labels(0).count(), 1);
    }

    #[test]
    fn self_cnot_holds() {
        let q = builtin_15_1_3().base().clone();
        assert!(check_cnot_condition(&q, &q).unwrap().holds);
        assert!(verify_cnot_coset(&q, &q).unwrap().holds);
    }

    #[test]
    fn cnot_direction() {
        let code = builtin_15_1_3();
        let (q, m) = (code.base(), code.mirror());
        let forward = check_cnot_condition(q, &m).unwrap();
        assert!(forward.holds);
        let coset = verify_cnot_coset(q, &m).unwrap();
        assert!(coset.holds);
        assert_eq!(coset.checks_performed, 4 * 16);
        let reverse = check_cnot_condition(&m, q).unwrap();
        assert!(!reverse.holds);
        assert!(matches!(
            reverse.witness,
            Some(Witness::NotSubspace {
                clause: "C2a_perp in C4b_perp",
                ..
            })
        ));
        assert!(!verify_cnot_coset(&m, q).unwrap().holds);
    }

    #[test]
    fn corrupted_target_map_fails_coset_check() {
        let code = builtin_15_1_3();
        let m = code.mirror();
        let mut bad = m.map_a().clone();
        let flipped = !bad.get(0, 0);
        bad.set(0, 0, flipped);
        let broken = m.with_map_a_unchecked(bad);
        let v = verify_cnot_coset(code.base(), &broken).unwrap();
        assert!(!v.holds);
        match v.witness.unwrap() {
            Witness::CnotCoset {
                output, expected, ..
            } => {
                assert!(!broken
                    .x_stab()
                    .rowspace_contains(&output.xor(&expected))
                    .unwrap());
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn cz_between_code_and_mirror() {
        let code = builtin_15_1_3();
        let (q, m) = (code.base(), code.mirror());
        assert!(check_cz_condition(q, &m).unwrap().holds);
        let phase = verify_cz_phase(q, &m).unwrap();
        assert!(phase.holds);
        assert_eq!(phase.checks_performed, 4 * 16 * 1024);
    }

    #[test]
    fn cz_within_the_15_qubit_code() {
        // G0 is self-orthogonal and |G1| is odd, so the 15-qubit code also
        // has a transversal CZ with itself.
        let q = builtin_15_1_3().base().clone();
        assert!(check_cz_condition(&q, &q).unwrap().holds);
        assert!(verify_cz_phase(&q, &q).unwrap().holds);
    }

    #[test]
    fn cz_fails_between_two_mirrors() {
        let m = builtin_15_1_3().mirror();
        let cond = check_cz_condition(&m, &m).unwrap();
        assert!(!cond.holds);
        let phase = verify_cz_phase(&m, &m).unwrap();
        assert!(!phase.holds);
        match phase.witness.unwrap() {
            Witness::CzPhase {
                u,
                v,
                physical,
                logical,
                ..
            } => {
                assert_eq!(u.dot(&v) as u8, physical);
                assert_ne!(physical, logical);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn cz_single_row_pairing() {
        let g = BinaryMatrix::from_bit_strings(&["111"]).unwrap();
        let q = build_triorthogonal(&g).unwrap().base().clone();
        // A·Aᵀ = 3 mod 2 = 1
        assert!(check_cz_condition(&q, &q).unwrap().holds);
        // A·Aᵀ = [[0,1],[1,0]] for these rows
        let g = BinaryMatrix::from_bit_strings(&["1100", "0110"]).unwrap();
        let c1 = crate::codes::ClassicalCode::new(g.clone());
        let c2 = crate::codes::ClassicalCode::full_space(4);
        let q2 = crate::codes::build_css(&c1, &c2).unwrap();
        let v = check_cz_condition(&q2, &q2).unwrap();
        assert!(!v.holds);
        assert!(matches!(
            v.witness,
            Some(Witness::PairingNotIdentity { .. })
        ));
        assert!(!verify_cz_phase(&q2, &q2).unwrap().holds);
    }

    #[test]
    fn t_on_builtin_is_t_dagger() {
        let v = verify_t_transversality(builtin_15_1_3().base()).unwrap();
        assert!(v.holds);
        assert_eq!(v.induced_sign, Some(-1));
        assert_eq!(v.checks_performed, 2 * 16);
    }

    #[test]
    fn t_fails_on_three_qubit_code() {
        let g = BinaryMatrix::from_bit_strings(&["111"]).unwrap();
        let q = build_triorthogonal(&g).unwrap();
        let v = verify_t_transversality(q.base()).unwrap();
        assert!(!v.holds);
        assert!(matches!(
            v.witness,
            Some(Witness::TPhase { weight_mod8: 3, .. })
        ));
        let tx = verify_tx_transversality(&q.mirror(), q.base()).unwrap();
        assert!(!tx.holds);
    }

    #[test]
    fn tx_on_mirror() {
        let code = builtin_15_1_3();
        let v = verify_tx_transversality(&code.mirror(), code.base()).unwrap();
        assert!(v.holds);
        assert_eq!(v.gate, "tx");
        let other =
            build_triorthogonal(&BinaryMatrix::from_bit_strings(&["111"]).unwrap()).unwrap();
        assert!(matches!(
            verify_tx_transversality(&other.mirror(), code.base()),
            Err(Error::NotMirror(_))
        ));
        // the code is not its own mirror
        assert!(verify_tx_transversality(code.base(), code.base()).is_err());
    }

    #[test]
    fn toffoli_hybrid_holds_and_homogeneous_fails() {
        let code = builtin_15_1_3();
        let q = code.base().clone();
        let sys = HybridSystem::from_code(&q);
        let v = verify_toffoli_transversality(&sys).unwrap();
        assert!(v.holds);
        assert_eq!(v.checks_performed, 4 * 16 * 16);

        let homogeneous = HybridSystem::new(q.clone(), q.clone(), q).unwrap();
        let v = verify_toffoli_transversality(&homogeneous).unwrap();
        assert!(!v.holds);
        match v.witness.unwrap() {
            Witness::Toffoli {
                psi1,
                psi2,
                product,
                expected,
                ..
            } => {
                // first violation is already in the ψ1 = ψ2 = 0 sector
                assert!(psi1.is_zero() && psi2.is_zero());
                assert!(expected.is_zero());
                assert_eq!(product.weight(), 4);
            }
            w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn hybrid_shape_checks() {
        let q = builtin_15_1_3().base().clone();
        let small = build_triorthogonal(&BinaryMatrix::from_bit_strings(&["111"]).unwrap())
            .unwrap()
            .base()
            .clone();
        assert!(HybridSystem::new(q.clone(), q.clone(), small.clone()).is_err());
        assert!(check_cnot_condition(&q, &small).is_err());
        let _ = mirror(&q);
    }
}

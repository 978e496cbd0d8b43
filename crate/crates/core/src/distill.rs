//! Post-selected Toffoli-state distillation under i.i.d. Z noise.
//!
//! Every qubit of every block suffers a Z error with probability `p` after
//! the transversal Toffoli round. A round is accepted when all three blocks
//! show a trivial X-stabilizer syndrome; an accepted block is faulty when its
//! error lies outside the Z-stabilizer group.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{weight_enumerator, BinaryVector, RowEchelon, DEFAULT_ENUMERATION_LIMIT};
use crate::transversality::HybridSystem;

pub const MAX_LEVELS: usize = 32;
pub const MC_CHUNK: u64 = 65_536;
pub const RNG_DESCRIPTION: &str =
    "ChaCha8Rng; chunk i of 65536 trials uses seed_from_u64(seed) with set_stream(i)";

const THRESHOLD_LO: f64 = 1e-6;
const THRESHOLD_HI: f64 = 0.5;
const THRESHOLD_TOL: f64 = 1e-6;
const THRESHOLD_SCAN_STEPS: usize = 5000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorModel {
    pub p: f64,
}

impl ErrorModel {
    pub fn new(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self { p })
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    Ok(())
}

/// `x_stab · eᵀ`.
pub fn z_syndrome(q: &CssCode, e: &BinaryVector) -> Result<BinaryVector> {
    q.x_stab().mul_vec(e)
}

/// True when `e` has trivial syndrome but is not a Z stabilizer.
pub fn is_logical_z(q: &CssCode, e: &BinaryVector) -> Result<bool> {
    if !z_syndrome(q, e)?.is_zero() {
        return Err(Error::NonzeroSyndrome);
    }
    Ok(!q.z_stab().rowspace_contains(e)?)
}

const COMBINATION_LIMIT: u128 = 1 << 28;

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Counts weight-`w` errors with trivial syndrome, and how many of those act
/// logically. Walks all `C(n, w)` supports when that is small enough,
/// otherwise the trivial-syndrome space itself.
pub fn count_undetectable(q: &CssCode, w: usize) -> Result<(u128, u128)> {
    let n = q.n();
    let stabilizers = q.z_stab().echelon();
    let x_rows = q.x_stab().rows();
    let mut trivial = 0u128;
    let mut logical = 0u128;
    let mut tally = |e: &BinaryVector| {
        if x_rows.iter().all(|r| !r.dot(e)) {
            trivial += 1;
            if !stabilizers.contains(e) {
                logical += 1;
            }
        }
    };
    if binomial(n, w) <= COMBINATION_LIMIT {
        for support in (0..n).combinations(w) {
            let mut e = BinaryVector::zeros(n);
            for i in support {
                e.set(i, true);
            }
            tally(&e);
        }
    } else {
        let space = q.x_stab().nullspace();
        if space.n_rows() > DEFAULT_ENUMERATION_LIMIT {
            return Err(Error::RankExceedsLimit {
                rank: space.n_rows(),
                limit: DEFAULT_ENUMERATION_LIMIT,
            });
        }
        crate::gf2::gray_walk(space.rows(), n, |e| {
            if e.weight() == w {
                tally(e);
            }
        });
    }
    Ok((trivial, logical))
}

/// Acceptance and output-error probabilities as functions of `p`.
pub trait ErrorMap {
    fn accept_prob(&self, p: f64) -> Result<f64>;
    fn output_error(&self, p: f64) -> Result<f64>;
}

/// Weight distributions of the trivial-syndrome errors and of the logical
/// ones among them, for one block.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockAnalysis {
    pub n: usize,
    pub accept_poly_coeffs: Vec<u128>,
    pub fail_poly_coeffs: Vec<u128>,
}

pub fn analyze_block(q: &CssCode) -> Result<BlockAnalysis> {
    let accept = weight_enumerator(&q.x_stab().nullspace())?;
    let harmless = weight_enumerator(q.z_stab())?;
    let fail = accept.iter().zip(&harmless).map(|(a, h)| a - h).collect();
    Ok(BlockAnalysis {
        n: q.n(),
        accept_poly_coeffs: accept,
        fail_poly_coeffs: fail,
    })
}

/// `Σ_w c_w p^w (1−p)^(n−w)`
fn evaluate(coeffs: &[u128], p: f64) -> f64 {
    let n = coeffs.len() - 1;
    let q = 1.0 - p;
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(w, &c)| c as f64 * p.powi(w as i32) * q.powi((n - w) as i32))
        .sum()
}

impl BlockAnalysis {
    /// Lowest weight with a logical trivial-syndrome error.
    pub fn fail_degree(&self) -> Option<usize> {
        self.fail_poly_coeffs.iter().position(|&c| c != 0)
    }
}

pub fn exact_accept_prob(b: &BlockAnalysis, p: f64) -> f64 {
    evaluate(&b.accept_poly_coeffs, p)
}

pub fn exact_output_error(b: &BlockAnalysis, p: f64) -> f64 {
    let accept = evaluate(&b.accept_poly_coeffs, p);
    if accept == 0.0 {
        return 0.0;
    }
    evaluate(&b.fail_poly_coeffs, p) / accept
}

impl ErrorMap for BlockAnalysis {
    fn accept_prob(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(exact_accept_prob(self, p))
    }

    fn output_error(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(exact_output_error(self, p))
    }
}

/// Output error truncated to `coeff · p^degree`; acceptance is still exact.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeadingOrder {
    pub coeff: f64,
    pub degree: u32,
    pub block: BlockAnalysis,
}

impl LeadingOrder {
    pub fn from_block(block: &BlockAnalysis) -> Option<Self> {
        let degree = block.fail_degree()?;
        Some(Self {
            coeff: block.fail_poly_coeffs[degree] as f64,
            degree: degree as u32,
            block: block.clone(),
        })
    }
}

impl ErrorMap for LeadingOrder {
    fn accept_prob(&self, p: f64) -> Result<f64> {
        self.block.accept_prob(p)
    }

    fn output_error(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(self.coeff * p.powi(self.degree as i32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FamilyRates {
    pub accept: f64,
    pub output_error: f64,
}

/// First-order rates of the `[[3k+8, k, 2]]` family.
pub fn family_3k8(k: usize, p: f64) -> Result<FamilyRates> {
    if k == 0 {
        return Err(Error::InvalidBlockSize(k));
    }
    check_probability(p)?;
    let product = (3 * k + 8) as f64 * p;
    if product >= 1.0 {
        return Err(Error::OutsideValidityWindow { k, p, product });
    }
    Ok(FamilyRates {
        accept: (1.0 - product).max(0.0),
        output_error: (1 + 3 * k) as f64 * p * p,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Family3k8 {
    pub k: usize,
}

impl ErrorMap for Family3k8 {
    fn accept_prob(&self, p: f64) -> Result<f64> {
        Ok(family_3k8(self.k, p)?.accept)
    }

    fn output_error(&self, p: f64) -> Result<f64> {
        Ok(family_3k8(self.k, p)?.output_error)
    }
}

/// Smallest `p* > 0` with `output_error(p*) = p*` in `(1e-6, 0.5)`, to
/// absolute precision `1e-6`.
pub fn find_threshold<M: ErrorMap + ?Sized>(model: &M) -> Result<f64> {
    let gap = |p: f64| model.output_error(p).map(|e| e - p);
    let step = (THRESHOLD_HI - THRESHOLD_LO) / THRESHOLD_SCAN_STEPS as f64;
    let mut degenerate = true;
    let mut lo = THRESHOLD_LO;
    let mut g_lo = gap(lo)?;
    if g_lo.abs() > 1e-12 * lo {
        degenerate = false;
    }
    if g_lo >= 0.0 && !degenerate {
        return Err(Error::NoThresholdCrossing);
    }
    for i in 1..=THRESHOLD_SCAN_STEPS {
        let hi = THRESHOLD_LO + step * i as f64;
        let g_hi = match gap(hi) {
            Ok(g) => g,
            Err(Error::OutsideValidityWindow { .. }) => break,
            Err(e) => return Err(e),
        };
        if g_hi.abs() > 1e-12 * hi {
            degenerate = false;
        }
        if !degenerate && g_lo < 0.0 && g_hi >= 0.0 {
            let (mut a, mut b) = (lo, hi);
            while b - a > THRESHOLD_TOL {
                let mid = 0.5 * (a + b);
                if gap(mid)? < 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
        g_lo = g_hi;
    }
    if degenerate {
        Err(Error::DegenerateThreshold)
    } else {
        Err(Error::NoThresholdCrossing)
    }
}

/// `3 p (1 − p)²`: probability that exactly one of the three Toffoli-state
/// qubits is faulty.
pub fn toffoli_threshold(p_eps: f64) -> Result<f64> {
    check_probability(p_eps)?;
    Ok(3.0 * p_eps * (1.0 - p_eps).powi(2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StdErrors {
    pub accept_prob: f64,
    pub output_error_per_block: [f64; 3],
    pub combined_output_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistillationReport {
    pub mode: Mode,
    pub p: f64,
    pub accept_prob: f64,
    pub output_error_per_block: [f64; 3],
    /// Probability that at least one block is faulty, given acceptance.
    pub combined_output_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<StdErrors>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<&'static str>,
}

pub fn exact_report(sys: &HybridSystem, model: ErrorModel) -> Result<DistillationReport> {
    let mut accept = 1.0;
    let mut errors = [0.0; 3];
    for (i, block) in sys.blocks().iter().enumerate() {
        let b = analyze_block(block)?;
        accept *= exact_accept_prob(&b, model.p);
        errors[i] = exact_output_error(&b, model.p);
    }
    Ok(DistillationReport {
        mode: Mode::Exact,
        p: model.p,
        accept_prob: accept,
        output_error_per_block: errors,
        combined_output_error: 1.0 - errors.iter().map(|e| 1.0 - e).product::<f64>(),
        trials: None,
        seed: None,
        std_error: None,
        rng: None,
    })
}

struct BlockChecker {
    n: usize,
    x_rows: Vec<BinaryVector>,
    stabilizers: RowEchelon,
}

impl BlockChecker {
    fn new(q: &CssCode) -> Self {
        Self {
            n: q.n(),
            x_rows: q.x_stab().rows().to_vec(),
            stabilizers: q.z_stab().echelon(),
        }
    }

    fn trivial_syndrome(&self, e: &BinaryVector) -> bool {
        self.x_rows.iter().all(|r| !r.dot(e))
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    trials: u64,
    accepted: u64,
    faulty: [u64; 3],
    any_faulty: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.accepted += o.accepted;
        for i in 0..3 {
            self.faulty[i] += o.faulty[i];
        }
        self.any_faulty += o.any_faulty;
        self
    }
}

fn run_chunk(checkers: &[BlockChecker; 3], p: f64, seed: u64, chunk: u64, trials: u64) -> Tally {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut tally = Tally {
        trials,
        ..Tally::default()
    };
    let mut errors: Vec<BinaryVector> = checkers.iter().map(|c| BinaryVector::zeros(c.n)).collect();
    for _ in 0..trials {
        for (e, c) in errors.iter_mut().zip(checkers) {
            *e = BinaryVector::zeros(c.n);
            for i in 0..c.n {
                if rng.gen::<f64>() < p {
                    e.set(i, true);
                }
            }
        }
        if !errors
            .iter()
            .zip(checkers)
            .all(|(e, c)| c.trivial_syndrome(e))
        {
            continue;
        }
        tally.accepted += 1;
        let mut any = false;
        for (i, (e, c)) in errors.iter().zip(checkers).enumerate() {
            if !c.stabilizers.contains(e) {
                tally.faulty[i] += 1;
                any = true;
            }
        }
        tally.any_faulty += any as u64;
    }
    tally
}

/// Sampled distillation statistics. Chunks are seeded independently of how
/// they are scheduled, so results do not depend on the worker count.
pub fn monte_carlo(
    sys: &HybridSystem,
    model: ErrorModel,
    trials: u64,
    seed: u64,
) -> Result<DistillationReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let checkers = [
        BlockChecker::new(sys.block(0)),
        BlockChecker::new(sys.block(1)),
        BlockChecker::new(sys.block(2)),
    ];
    let n_chunks = trials.div_ceil(MC_CHUNK);
    let tally = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let size = MC_CHUNK.min(trials - chunk * MC_CHUNK);
            run_chunk(&checkers, model.p, seed, chunk, size)
        })
        .reduce(Tally::default, Tally::merge);

    let rate = |hits: u64, out_of: u64| {
        if out_of == 0 {
            (0.0, 0.0)
        } else {
            let r = hits as f64 / out_of as f64;
            (r, (r * (1.0 - r) / out_of as f64).sqrt())
        }
    };
    let (accept, accept_se) = rate(tally.accepted, tally.trials);
    let per_block: Vec<(f64, f64)> = tally
        .faulty
        .iter()
        .map(|&f| rate(f, tally.accepted))
        .collect();
    let (combined, combined_se) = rate(tally.any_faulty, tally.accepted);
    Ok(DistillationReport {
        mode: Mode::MonteCarlo,
        p: model.p,
        accept_prob: accept,
        output_error_per_block: [per_block[0].0, per_block[1].0, per_block[2].0],
        combined_output_error: combined,
        trials: Some(trials),
        seed: Some(seed),
        std_error: Some(StdErrors {
            accept_prob: accept_se,
            output_error_per_block: [per_block[0].1, per_block[1].1, per_block[2].1],
            combined_output_error: combined_se,
        }),
        rng: Some(RNG_DESCRIPTION),
    })
}

/// Runs [`monte_carlo`] on a dedicated pool of `workers` threads.
pub fn monte_carlo_with_workers(
    sys: &HybridSystem,
    model: ErrorModel,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<DistillationReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| monte_carlo(sys, model, trials, seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelTrace {
    pub level: usize,
    pub input_error: f64,
    pub output_error: f64,
    pub accept_prob: f64,
}

/// Feeds each level's output error into the next until it is at most
/// `target`.
pub fn iterate_levels<M: ErrorMap + ?Sized>(
    p0: f64,
    target: f64,
    model: &M,
) -> Result<Vec<LevelTrace>> {
    check_probability(p0)?;
    check_probability(target)?;
    if p0 <= target {
        return Ok(Vec::new());
    }
    match find_threshold(model) {
        Ok(threshold) if p0 >= threshold => return Err(Error::AboveThreshold { p: p0, threshold }),
        Ok(_) | Err(Error::NoThresholdCrossing) | Err(Error::DegenerateThreshold) => {}
        Err(e) => return Err(e),
    }
    let mut trace = Vec::new();
    let mut p = p0;
    while p > target {
        if trace.len() == MAX_LEVELS {
            return Err(Error::LevelCap(MAX_LEVELS));
        }
        let out = model.output_error(p)?;
        if out >= p {
            return Err(Error::AboveThreshold { p, threshold: p });
        }
        trace.push(LevelTrace {
            level: trace.len() + 1,
            input_error: p,
            output_error: out,
            accept_prob: model.accept_prob(p)?,
        });
        p = out;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::build_css;
    use crate::codes::{builtin_15_1_3, ClassicalCode};

    fn builtin_block() -> BlockAnalysis {
        analyze_block(builtin_15_1_3().base()).unwrap()
    }

    #[test]
    fn syndromes_of_builtin() {
        let code = builtin_15_1_3();
        let q = code.base();
        assert!(z_syndrome(q, &BinaryVector::zeros(15)).unwrap().is_zero());
        for r in q.z_stab().rows() {
            assert!(z_syndrome(q, r).unwrap().is_zero());
            assert!(!is_logical_z(q, r).unwrap());
        }
        for i in 0..15 {
            assert!(!z_syndrome(q, &BinaryVector::unit(15, i)).unwrap().is_zero());
        }
        assert!(is_logical_z(q, &BinaryVector::ones(15)).unwrap());
        assert!(matches!(
            is_logical_z(q, &BinaryVector::unit(15, 0)),
            Err(Error::NonzeroSyndrome)
        ));
        assert!(matches!(
            z_syndrome(q, &BinaryVector::zeros(14)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn undetectable_counts() {
        let code = builtin_15_1_3();
        assert_eq!(count_undetectable(code.base(), 1).unwrap(), (0, 0));
        assert_eq!(count_undetectable(code.base(), 2).unwrap(), (0, 0));
        assert_eq!(count_undetectable(code.base(), 3).unwrap(), (35, 35));
        let b = builtin_block();
        for w in 0..=15 {
            let (t, l) = count_undetectable(code.base(), w).unwrap();
            assert_eq!(
                (t, l),
                (b.accept_poly_coeffs[w], b.fail_poly_coeffs[w]),
                "w = {w}"
            );
        }
    }

    #[test]
    fn builtin_block_polynomials() {
        let b = builtin_block();
        assert_eq!(b.accept_poly_coeffs[0], 1);
        assert_eq!(b.fail_poly_coeffs[0], 0);
        assert_eq!(b.accept_poly_coeffs[3], 35);
        assert_eq!(b.fail_poly_coeffs[3], 35);
        assert_eq!(b.accept_poly_coeffs.iter().sum::<u128>(), 2048);
        assert_eq!(b.fail_poly_coeffs.iter().sum::<u128>(), 1024);
        assert!(b
            .accept_poly_coeffs
            .iter()
            .zip(&b.fail_poly_coeffs)
            .all(|(a, f)| f <= a));
        assert_eq!(exact_accept_prob(&b, 0.0), 1.0);
        assert_eq!(exact_output_error(&b, 0.0), 0.0);
        let p: f64 = 0.01;
        let acc = exact_accept_prob(&b, p);
        assert!((acc - 0.8601).abs() < 5e-4, "{acc}");
        assert!(acc > (1.0 - p).powi(15) + 35.0 * p.powi(3) * (1.0 - p).powi(12) - 1e-15);
        let out = exact_output_error(&b, p);
        assert!((out / 3.5e-5 - 1.0).abs() < 0.05, "{out}");
    }

    #[test]
    fn accept_series_coefficients() {
        let b = builtin_block();
        let p = 1e-4;
        let series = 1.0 - 15.0 * p + 105.0 * p * p;
        assert!((exact_accept_prob(&b, p) - series).abs() < 600.0 * p.powi(3));
    }

    #[test]
    fn mirror_block_is_well_protected() {
        let code = builtin_15_1_3();
        let b = analyze_block(&code.mirror()).unwrap();
        assert_eq!(b.fail_degree(), Some(7));
        assert!(b.fail_poly_coeffs[..7].iter().all(|&c| c == 0));
    }

    #[test]
    fn full_space_block() {
        let n = 5;
        let full = ClassicalCode::full_space(n);
        let q = build_css(&full, &full).unwrap();
        let b = analyze_block(&q).unwrap();
        assert_eq!(b.accept_poly_coeffs, vec![1, 5, 10, 10, 5, 1]);
        assert_eq!(b.fail_poly_coeffs, vec![0, 5, 10, 10, 5, 1]);
    }

    #[test]
    fn threshold_of_builtin() {
        let p = find_threshold(&builtin_block()).unwrap();
        assert!((p - 0.141).abs() < 0.005, "{p}");
    }

    #[test]
    fn threshold_of_truncated_model() {
        let lead = LeadingOrder::from_block(&builtin_block()).unwrap();
        assert_eq!((lead.coeff, lead.degree), (35.0, 3));
        let p = find_threshold(&lead).unwrap();
        assert!((p - 1.0 / 35f64.sqrt()).abs() < 2e-6);
    }

    struct Identity;

    impl ErrorMap for Identity {
        fn accept_prob(&self, _: f64) -> Result<f64> {
            Ok(1.0)
        }
        fn output_error(&self, p: f64) -> Result<f64> {
            Ok(p)
        }
    }

    #[test]
    fn degenerate_threshold() {
        assert!(matches!(
            find_threshold(&Identity),
            Err(Error::DegenerateThreshold)
        ));
    }

    #[test]
    fn family_fixed_point_lies_outside_validity_window() {
        // 1/(1+3k) > 1/(3k+8) for every k
        for k in [1, 2, 13, 50] {
            assert!(matches!(
                find_threshold(&Family3k8 { k }),
                Err(Error::NoThresholdCrossing)
            ));
        }
        let trace = iterate_levels(1e-2, 1e-10, &Family3k8 { k: 2 }).unwrap();
        assert!((trace[0].output_error - 7e-4).abs() < 1e-15);
        assert!(trace.last().unwrap().output_error <= 1e-10);
    }

    #[test]
    fn toffoli_threshold_values() {
        assert_eq!(toffoli_threshold(0.0).unwrap(), 0.0);
        assert_eq!(toffoli_threshold(1.0).unwrap(), 0.0);
        assert!((toffoli_threshold(0.141).unwrap() - 0.312).abs() < 1e-3);
        assert!(toffoli_threshold(1.5).is_err());
    }

    #[test]
    fn family_rates() {
        let r = family_3k8(1, 0.0).unwrap();
        assert_eq!((r.accept, r.output_error), (1.0, 0.0));
        let r = family_3k8(1, 1e-2).unwrap();
        assert!((r.accept - 0.89).abs() < 1e-12 && (r.output_error - 4e-4).abs() < 1e-15);
        let r = family_3k8(13, 1e-2).unwrap();
        assert!((r.accept - 0.53).abs() < 1e-12 && (r.output_error - 4e-3).abs() < 1e-15);
        assert!(matches!(
            family_3k8(50, 0.01),
            Err(Error::OutsideValidityWindow { .. })
        ));
        assert!(matches!(
            family_3k8(0, 0.01),
            Err(Error::InvalidBlockSize(0))
        ));
    }

    #[test]
    fn levels_with_truncated_model() {
        let lead = LeadingOrder::from_block(&builtin_block()).unwrap();
        let trace = iterate_levels(1e-2, 1e-12, &lead).unwrap();
        assert!((trace[0].output_error - 3.5e-5).abs() < 1e-12);
        assert!((trace[1].output_error - 35.0 * 3.5e-5f64.powi(3)).abs() < 1e-20);
        assert_eq!(
            trace.iter().map(|t| t.level).collect::<Vec<_>>(),
            (1..=trace.len()).collect::<Vec<_>>()
        );
        assert!(iterate_levels(1e-3, 1e-3, &lead).unwrap().is_empty());
        assert!(matches!(
            iterate_levels(0.2, 1e-12, &builtin_block()),
            Err(Error::AboveThreshold { .. })
        ));
    }

    #[test]
    fn levels_cap() {
        struct Slow;
        impl ErrorMap for Slow {
            fn accept_prob(&self, _: f64) -> Result<f64> {
                Ok(1.0)
            }
            fn output_error(&self, p: f64) -> Result<f64> {
                Ok(0.9 * p)
            }
        }
        assert!(matches!(
            iterate_levels(0.1, 1e-12, &Slow),
            Err(Error::LevelCap(32))
        ));
    }

    #[test]
    fn monte_carlo_zero_noise() {
        let sys = HybridSystem::from_code(builtin_15_1_3().base());
        let r = monte_carlo(&sys, ErrorModel::new(0.0).unwrap(), 1000, 1).unwrap();
        assert_eq!(r.accept_prob, 1.0);
        assert_eq!(r.output_error_per_block, [0.0; 3]);
        assert_eq!(r.combined_output_error, 0.0);
    }

    #[test]
    fn monte_carlo_is_deterministic_across_workers() {
        let sys = HybridSystem::from_code(builtin_15_1_3().base());
        let m = ErrorModel::new(0.05).unwrap();
        let a = monte_carlo_with_workers(&sys, m, 200_000, 9, 1).unwrap();
        let b = monte_carlo_with_workers(&sys, m, 200_000, 9, 4).unwrap();
        assert_eq!(a, b);
        let c = monte_carlo(&sys, m, 200_000, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn exact_report_combines_blocks() {
        let sys = HybridSystem::from_code(builtin_15_1_3().base());
        let r = exact_report(&sys, ErrorModel::new(0.05).unwrap()).unwrap();
        let b = builtin_block();
        assert_eq!(r.output_error_per_block[0], exact_output_error(&b, 0.05));
        assert_eq!(r.output_error_per_block[0], r.output_error_per_block[1]);
        assert!(r.output_error_per_block[2] < r.output_error_per_block[0]);
        assert!(r.combined_output_error >= r.output_error_per_block[0]);
        assert!(ErrorModel::new(-0.1).is_err());
    }
}

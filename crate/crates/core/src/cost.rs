//! Expected qubit cost of multi-level Toffoli-state distillation.
//!
//! Three routes are compared:
//! * `direct15`: the hybrid `[[15,1,3]]` system distilling Toffoli states,
//!   `(3·15^m + 45(m−1)) / p_suc` with `p_suc` the product over levels of the
//!   three blocks' acceptance;
//! * `magic15`: seven 15-to-1 T states per Toffoli, `7·15^m / p_suc`, each T
//!   state retried independently so `p_suc` is one block's acceptance per level;
//! * `family3k8`: `[[3k+8,k,2]]` blocks with
//!   `Q_m = 3(3k_m+8)/k_m · Q_{m−1} / p_s(m)³`, `Q_0 = 1`.

use serde::Serialize;

use crate::codes::builtin_15_1_3;
use crate::distill::{
    analyze_block, exact_accept_prob, exact_output_error, family_3k8, find_threshold,
    BlockAnalysis, LevelTrace, MAX_LEVELS,
};
use crate::error::{Error, Result};

pub const MAX_K: usize = 50;
pub const MAX_OPTIMIZED_LEVELS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Direct15,
    Magic15,
    Family3k8,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Direct15 => "direct15",
            Protocol::Magic15 => "magic15",
            Protocol::Family3k8 => "family3k8",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostPlan {
    pub protocol: Protocol,
    pub p0: f64,
    pub target: f64,
    pub levels: Vec<LevelTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_schedule: Option<Vec<usize>>,
    /// Qubits consumed when every level accepts.
    pub numerator: f64,
    pub p_suc: f64,
    pub expected_qubits: f64,
    pub achieved_error: f64,
    pub retry_model: &'static str,
}

const RETRY_MODEL: &str = "independent_retry";

pub fn direct15_numerator(m: usize) -> f64 {
    3.0 * 15f64.powi(m as i32) + 45.0 * (m as f64 - 1.0)
}

pub fn magic15_numerator(m: usize) -> f64 {
    7.0 * 15f64.powi(m as i32)
}

/// Exact block analyses of the built-in code and its mirror.
#[derive(Clone, Debug)]
pub struct Fifteen {
    pub t_block: BlockAnalysis,
    pub mirror_block: BlockAnalysis,
    pub threshold: f64,
}

impl Fifteen {
    pub fn builtin() -> Self {
        let code = builtin_15_1_3();
        let t_block = analyze_block(code.base()).expect("built-in block is small");
        let mirror_block = analyze_block(&code.mirror()).expect("built-in block is small");
        let threshold = find_threshold(&t_block).expect("built-in code has a threshold");
        Self {
            t_block,
            mirror_block,
            threshold,
        }
    }

    /// Exactly `m` levels of the T-block error map starting from `p0`.
    pub fn levels(&self, m: usize, p0: f64) -> Result<Vec<LevelTrace>> {
        if !(0.0..=1.0).contains(&p0) {
            return Err(Error::InvalidProbability(p0));
        }
        if p0 >= self.threshold {
            return Err(Error::AboveThreshold {
                p: p0,
                threshold: self.threshold,
            });
        }
        let mut p = p0;
        Ok((1..=m)
            .map(|level| {
                let out = exact_output_error(&self.t_block, p);
                let t = LevelTrace {
                    level,
                    input_error: p,
                    output_error: out,
                    accept_prob: exact_accept_prob(&self.t_block, p),
                };
                p = out;
                t
            })
            .collect())
    }

    /// Smallest number of levels reaching `target`.
    pub fn levels_to(&self, p0: f64, target: f64) -> Result<usize> {
        let mut p = p0;
        for m in 0..=MAX_LEVELS {
            if p <= target {
                return Ok(m);
            }
            if p >= self.threshold {
                return Err(Error::AboveThreshold {
                    p,
                    threshold: self.threshold,
                });
            }
            p = exact_output_error(&self.t_block, p);
        }
        Err(Error::LevelCap(MAX_LEVELS))
    }

    fn direct_p_suc(&self, levels: &[LevelTrace]) -> f64 {
        levels
            .iter()
            .map(|l| l.accept_prob.powi(2) * exact_accept_prob(&self.mirror_block, l.input_error))
            .product()
    }

    fn magic_p_suc(&self, levels: &[LevelTrace]) -> f64 {
        levels.iter().map(|l| l.accept_prob).product()
    }

    pub fn cost_direct15(&self, m: usize, p0: f64) -> Result<f64> {
        Ok(self
            .plan(Protocol::Direct15, m, p0, f64::NAN)?
            .expected_qubits)
    }

    pub fn cost_magic15(&self, m: usize, p0: f64) -> Result<f64> {
        Ok(self
            .plan(Protocol::Magic15, m, p0, f64::NAN)?
            .expected_qubits)
    }

    fn plan(&self, protocol: Protocol, m: usize, p0: f64, target: f64) -> Result<CostPlan> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "at least one level is required".into(),
            ));
        }
        let levels = self.levels(m, p0)?;
        let (numerator, p_suc) = match protocol {
            Protocol::Direct15 => (direct15_numerator(m), self.direct_p_suc(&levels)),
            Protocol::Magic15 => (magic15_numerator(m), self.magic_p_suc(&levels)),
            Protocol::Family3k8 => unreachable!("family plans use cost_family3k8"),
        };
        Ok(CostPlan {
            protocol,
            p0,
            target,
            achieved_error: levels.last().map_or(p0, |l| l.output_error),
            levels,
            k_schedule: None,
            numerator,
            p_suc,
            expected_qubits: numerator / p_suc,
            retry_model: RETRY_MODEL,
        })
    }

    /// Cheapest plan for `protocol` (one of the 15-qubit routes) reaching
    /// `target`: the minimal number of levels.
    pub fn plan_to_target(&self, protocol: Protocol, p0: f64, target: f64) -> Result<CostPlan> {
        let m = self.levels_to(p0, target)?;
        if m == 0 {
            return Ok(trivial_plan(protocol, p0, target));
        }
        self.plan(protocol, m, p0, target)
    }
}

fn trivial_plan(protocol: Protocol, p0: f64, target: f64) -> CostPlan {
    CostPlan {
        protocol,
        p0,
        target,
        levels: Vec::new(),
        k_schedule: (protocol == Protocol::Family3k8).then(Vec::new),
        numerator: 1.0,
        p_suc: 1.0,
        expected_qubits: 1.0,
        achieved_error: p0,
        retry_model: RETRY_MODEL,
    }
}

/// Per-level state of a family schedule.
#[derive(Clone, Copy)]
struct FamilyStep {
    trace: LevelTrace,
    factor: f64,
}

fn family_step(level: usize, k: usize, p: f64) -> Result<FamilyStep> {
    if !(1..=MAX_K).contains(&k) {
        return Err(Error::InvalidBlockSize(k));
    }
    let r = family_3k8(k, p)?;
    Ok(FamilyStep {
        trace: LevelTrace {
            level,
            input_error: p,
            output_error: r.output_error,
            accept_prob: r.accept,
        },
        factor: 3.0 * (3 * k + 8) as f64 / k as f64 / r.accept.powi(3),
    })
}

/// Cost of a fixed k schedule. Fails when the schedule does not reach
/// `target` or leaves the validity window.
pub fn cost_family3k8(k_schedule: &[usize], p0: f64, target: f64) -> Result<CostPlan> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability(p0));
    }
    if k_schedule.len() > MAX_LEVELS {
        return Err(Error::LevelCap(MAX_LEVELS));
    }
    let mut p = p0;
    let mut q = 1.0;
    let mut numerator = 1.0;
    let mut p_suc = 1.0;
    let mut levels = Vec::with_capacity(k_schedule.len());
    for (i, &k) in k_schedule.iter().enumerate() {
        let step = family_step(i + 1, k, p)?;
        q *= step.factor;
        numerator *= 3.0 * (3 * k + 8) as f64 / k as f64;
        p_suc *= step.trace.accept_prob.powi(3);
        p = step.trace.output_error;
        levels.push(step.trace);
    }
    if p > target {
        return Err(Error::Unreachable { p0, target });
    }
    Ok(CostPlan {
        protocol: Protocol::Family3k8,
        p0,
        target,
        levels,
        k_schedule: Some(k_schedule.to_vec()),
        numerator,
        p_suc,
        expected_qubits: q,
        achieved_error: p,
        retry_model: RETRY_MODEL,
    })
}

/// Repeats one `k` until `target` is reached.
pub fn uniform_family_plan(k: usize, p0: f64, target: f64) -> Result<CostPlan> {
    let mut schedule = Vec::new();
    let mut p = p0;
    while p > target {
        if schedule.len() == MAX_LEVELS {
            return Err(Error::LevelCap(MAX_LEVELS));
        }
        let next = family_3k8(k, p)?.output_error;
        if next >= p {
            return Err(Error::Unreachable { p0, target });
        }
        schedule.push(k);
        p = next;
    }
    cost_family3k8(&schedule, p0, target)
}

struct Search {
    target: f64,
    best: Option<(f64, Vec<usize>)>,
}

impl Search {
    fn better(&self, cost: f64, schedule: &[usize]) -> bool {
        match &self.best {
            None => true,
            Some((c, s)) => {
                cost < *c || (cost == *c && (schedule.len(), schedule) < (s.len(), s.as_slice()))
            }
        }
    }

    fn visit(&mut self, schedule: &mut Vec<usize>, p: f64, q: f64) {
        for k in 1..=MAX_K {
            let Ok(step) = family_step(schedule.len() + 1, k, p) else {
                continue;
            };
            if step.trace.output_error >= p {
                continue;
            }
            let cost = q * step.factor;
            // every further level multiplies the cost by more than 9
            if self.best.as_ref().is_some_and(|(c, _)| cost > *c) {
                continue;
            }
            schedule.push(k);
            if step.trace.output_error <= self.target {
                if self.better(cost, schedule) {
                    self.best = Some((cost, schedule.clone()));
                }
            } else if schedule.len() < MAX_OPTIMIZED_LEVELS {
                self.visit(schedule, step.trace.output_error, cost);
            }
            schedule.pop();
        }
    }
}

/// Cheapest k schedule (at most 6 levels, `k ∈ 1..=50`) reaching `target`.
/// Ties go to fewer levels, then the lexicographically smaller schedule.
pub fn optimize_k(p0: f64, target: f64) -> Result<CostPlan> {
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidProbability(p0));
    }
    if p0 <= target {
        return Ok(trivial_plan(Protocol::Family3k8, p0, target));
    }
    let mut search = Search { target, best: None };
    search.visit(&mut Vec::new(), p0, 1.0);
    let (_, schedule) = search.best.ok_or(Error::Unreachable { p0, target })?;
    cost_family3k8(&schedule, p0, target)
}

/// Twelve log-spaced targets from `1e-3` down to `1e-14`.
pub fn default_target_grid() -> Vec<f64> {
    (3..=14).map(|e| 10f64.powi(-e)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub target: f64,
    pub protocol: Protocol,
    /// `None` marks an unreachable target.
    pub plan: Option<CostPlan>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostCurve {
    pub p0: f64,
    pub targets: Vec<f64>,
    pub points: Vec<CurvePoint>,
}

pub fn cost_curves(p0: f64, targets: &[f64]) -> Result<CostCurve> {
    if targets.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "targets must be strictly decreasing".into(),
        ));
    }
    let fifteen = Fifteen::builtin();
    let mut points = Vec::new();
    for &target in targets {
        for protocol in [Protocol::Direct15, Protocol::Magic15, Protocol::Family3k8] {
            let plan = match protocol {
                Protocol::Family3k8 => optimize_k(p0, target),
                _ => fifteen.plan_to_target(protocol, p0, target),
            };
            points.push(CurvePoint {
                target,
                protocol,
                plan: plan.ok(),
            });
        }
    }
    Ok(CostCurve {
        p0,
        targets: targets.to_vec(),
        points,
    })
}

fn schedule_text(s: &[usize]) -> String {
    s.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// `target_error,protocol,expected_qubits,levels,k_schedule`; unreachable
/// points leave the last three fields empty.
pub fn fig5_csv(curve: &CostCurve) -> String {
    let mut out = String::from("target_error,protocol,expected_qubits,levels,k_schedule\n");
    for pt in &curve.points {
        match &pt.plan {
            Some(plan) => out.push_str(&format!(
                "{:e},{},{},{},{}\n",
                pt.target,
                pt.protocol.name(),
                plan.expected_qubits,
                plan.levels.len(),
                plan.k_schedule
                    .as_deref()
                    .map(schedule_text)
                    .unwrap_or_default()
            )),
            None => out.push_str(&format!("{:e},{},,,\n", pt.target, pt.protocol.name())),
        }
    }
    out
}

/// Uniform-k costs for every reachable `(target, k)` pair.
pub fn fig6_rows(p0: f64, targets: &[f64]) -> Vec<(f64, usize, f64)> {
    let mut rows = Vec::new();
    for &target in targets {
        for k in 1..=MAX_K {
            if let Ok(plan) = uniform_family_plan(k, p0, target) {
                rows.push((target, k, plan.expected_qubits));
            }
        }
    }
    rows
}

/// `target_error,k,expected_qubits`
pub fn fig6_csv(p0: f64, targets: &[f64]) -> String {
    let mut out = String::from("target_error,k,expected_qubits\n");
    for (t, k, q) in fig6_rows(p0, targets) {
        out.push_str(&format!("{t:e},{k},{q}\n"));
    }
    out
}

/// Values of `k` whose uniform schedule costs at most `slack` times the
/// cheapest uniform schedule at `target`.
pub fn competitive_band(p0: f64, target: f64, slack: f64) -> Vec<usize> {
    let costs: Vec<(usize, f64)> = (1..=MAX_K)
        .filter_map(|k| {
            uniform_family_plan(k, p0, target)
                .ok()
                .map(|p| (k, p.expected_qubits))
        })
        .collect();
    let Some(best) = costs.iter().map(|c| c.1).reduce(f64::min) else {
        return Vec::new();
    };
    costs
        .into_iter()
        .filter(|c| c.1 <= slack * best)
        .map(|c| c.0)
        .collect()
}

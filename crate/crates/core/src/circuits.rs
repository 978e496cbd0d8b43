//! Small circuits and an exact dense state-vector simulator.
//!
//! Basis index bit `q` holds the value of qubit `q` (qubit 0 is the least
//! significant bit). Simulation is limited to [`MAX_QUBITS`] qubits.
//!
//! The teleportation gadget measures the two control inputs in the Z basis
//! and the target input in the X basis. Its feedback table, with `m0, m1`
//! the control outcomes and `m2` the target outcome:
//!
//! | guard | gates            |
//! |-------|------------------|
//! | `m2`  | `Z 2`, `CZ 0 1`  |
//! | `m0`  | `CNOT 1 2`, `X 0`|
//! | `m1`  | `CNOT 0 2`, `X 1`|
//!
//! applied in that order. For every input basis state and every outcome
//! triple the ancilla register ends in `|a, b, ab ⊕ c⟩`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 12;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    T,
    TDag,
    /// `H·T·H`
    TX,
    TXDag,
    X,
    Z,
    S,
    Cnot,
    Cz,
    Ccx,
    Ccz,
    MeasX,
    MeasZ,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            GateKind::Ccx | GateKind::Ccz => 3,
            _ => 1,
        }
    }

    pub fn is_measurement(self) -> bool {
        matches!(self, GateKind::MeasX | GateKind::MeasZ)
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::T => "T",
            GateKind::TDag => "T_DAG",
            GateKind::TX => "TX",
            GateKind::TXDag => "TX_DAG",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::S => "S",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Ccx => "CCX",
            GateKind::Ccz => "CCZ",
            GateKind::MeasX => "MEAS_X",
            GateKind::MeasZ => "MEAS_Z",
        }
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "H" => GateKind::H,
            "T" => GateKind::T,
            "T_DAG" => GateKind::TDag,
            "TX" => GateKind::TX,
            "TX_DAG" => GateKind::TXDag,
            "X" => GateKind::X,
            "Z" => GateKind::Z,
            "S" => GateKind::S,
            "CNOT" => GateKind::Cnot,
            "CZ" => GateKind::Cz,
            "CCX" => GateKind::Ccx,
            "CCZ" => GateKind::Ccz,
            "MEAS_X" => GateKind::MeasX,
            "MEAS_Z" => GateKind::MeasZ,
            other => return Err(format!("unknown gate {other:?}")),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    /// Controls first, target last.
    pub qubits: Vec<usize>,
    /// Classical bit written by a measurement.
    pub cbit: Option<usize>,
    /// Classical bit that must be 1 for the gate to fire.
    pub guard: Option<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Self {
            kind,
            qubits: qubits.to_vec(),
            cbit: None,
            guard: None,
        }
    }

    pub fn measure(kind: GateKind, qubit: usize, cbit: usize) -> Self {
        Self {
            kind,
            qubits: vec![qubit],
            cbit: Some(cbit),
            guard: None,
        }
    }

    pub fn guarded(kind: GateKind, qubits: &[usize], guard: usize) -> Self {
        Self {
            kind,
            qubits: qubits.to_vec(),
            cbit: None,
            guard: Some(guard),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        if let Some(c) = self.cbit {
            write!(f, " -> {c}")?;
        }
        if let Some(g) = self.guard {
            write!(f, " ?{g}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_cbits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_cbits: usize) -> Self {
        Self {
            n_qubits,
            n_cbits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn add(&mut self, kind: GateKind, qubits: &[usize]) -> &mut Self {
        self.push(Gate::new(kind, qubits))
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    /// Checks arity, register bounds, distinct operands, and that every
    /// guard reads a bit some earlier measurement wrote.
    pub fn validate(&self) -> Result<()> {
        let mut written = vec![false; self.n_cbits];
        for (index, g) in self.gates.iter().enumerate() {
            let bad = |message: String| Error::InvalidGate { index, message };
            if g.qubits.len() != g.kind.arity() {
                return Err(bad(format!(
                    "{} takes {} qubits, got {}",
                    g.kind.name(),
                    g.kind.arity(),
                    g.qubits.len()
                )));
            }
            for (i, &q) in g.qubits.iter().enumerate() {
                if q >= self.n_qubits {
                    return Err(bad(format!("qubit {q} out of range")));
                }
                if g.qubits[..i].contains(&q) {
                    return Err(bad(format!("qubit {q} repeated")));
                }
            }
            if let Some(guard) = g.guard {
                if guard >= self.n_cbits || !written[guard] {
                    return Err(bad(format!("guard bit {guard} read before it is written")));
                }
            }
            match (g.kind.is_measurement(), g.cbit) {
                (true, Some(c)) if c < self.n_cbits => written[c] = true,
                (true, _) => return Err(bad("measurement needs a valid classical bit".into())),
                (false, Some(_)) => {
                    return Err(bad("only measurements write classical bits".into()))
                }
                (false, None) => {}
            }
        }
        Ok(())
    }

    /// One gate per line: `KIND q0 [q1 [q2]] [-> cbit | ?cbit]`, preceded by
    /// a `# qubits N cbits M` header.
    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits {} cbits {}\n", self.n_qubits, self.n_cbits);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    /// Parses [`Circuit::to_text`] output. Without a header, register sizes
    /// are inferred from the largest indices used.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut gates = Vec::new();
        let mut header: Option<(usize, usize)> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            let err = |message: String| Error::CircuitParse {
                line: line_no,
                message,
            };
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let t: Vec<&str> = rest.split_whitespace().collect();
                if let ["qubits", q, "cbits", c] = t.as_slice() {
                    let q = q.parse().map_err(|_| err("bad qubit count".into()))?;
                    let c = c.parse().map_err(|_| err("bad cbit count".into()))?;
                    header = Some((q, c));
                }
                continue;
            }
            let mut tokens = line.split_whitespace();
            let kind: GateKind = tokens
                .next()
                .expect("non-empty line")
                .parse()
                .map_err(err)?;
            let mut gate = Gate::new(kind, &[]);
            let mut expect_cbit = false;
            for tok in tokens {
                if expect_cbit {
                    gate.cbit = Some(tok.parse().map_err(|_| err(format!("bad cbit {tok:?}")))?);
                    expect_cbit = false;
                } else if tok == "->" {
                    expect_cbit = true;
                } else if let Some(g) = tok.strip_prefix('?') {
                    gate.guard = Some(g.parse().map_err(|_| err(format!("bad guard {tok:?}")))?);
                } else {
                    gate.qubits
                        .push(tok.parse().map_err(|_| err(format!("bad qubit {tok:?}")))?);
                }
            }
            if expect_cbit {
                return Err(err("missing classical bit after '->'".into()));
            }
            gates.push(gate);
        }
        let (n_qubits, n_cbits) = header.unwrap_or_else(|| {
            let q = gates
                .iter()
                .flat_map(|g| g.qubits.iter())
                .max()
                .map_or(0, |m| m + 1);
            let c = gates
                .iter()
                .flat_map(|g| g.cbit.iter().chain(g.guard.iter()))
                .max()
                .map_or(0, |m| m + 1);
            (q, c)
        });
        let c = Circuit {
            n_qubits,
            n_cbits,
            gates,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Normalized amplitude vector of `2^n` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes the given amplitudes.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidArgument(
                "amplitude count must be a power of two".into(),
            ));
        }
        check_size(n_qubits)?;
        let mut s = Self { n_qubits, amps };
        let norm = s.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero state".into()));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn scale(&mut self, f: f64) {
        for a in &mut self.amps {
            *a *= f;
        }
    }

    fn apply_1q(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Flips `target` on basis states where all `controls` are 1.
    fn apply_controlled_x(&mut self, controls: &[usize], target: usize) {
        let cmask: usize = controls.iter().map(|&c| 1 << c).sum();
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask == cmask && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// Negates basis states where all `qubits` are 1.
    fn apply_controlled_z(&mut self, qubits: &[usize]) {
        let mask: usize = qubits.iter().map(|&c| 1 << c).sum();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a = -*a;
            }
        }
    }

    fn apply_unitary(&mut self, g: &Gate) {
        let q = &g.qubits;
        match g.kind {
            GateKind::H => self.apply_1q(q[0], hadamard()),
            GateKind::T => self.apply_1q(q[0], phase(std::f64::consts::FRAC_PI_4)),
            GateKind::TDag => self.apply_1q(q[0], phase(-std::f64::consts::FRAC_PI_4)),
            GateKind::TX => self.apply_1q(q[0], conjugate_by_h(phase(std::f64::consts::FRAC_PI_4))),
            GateKind::TXDag => {
                self.apply_1q(q[0], conjugate_by_h(phase(-std::f64::consts::FRAC_PI_4)))
            }
            GateKind::S => self.apply_1q(q[0], phase(std::f64::consts::FRAC_PI_2)),
            GateKind::X => self.apply_controlled_x(&[], q[0]),
            GateKind::Z => self.apply_controlled_z(&[q[0]]),
            GateKind::Cnot => self.apply_controlled_x(&q[..1], q[1]),
            GateKind::Ccx => self.apply_controlled_x(&q[..2], q[2]),
            GateKind::Cz | GateKind::Ccz => self.apply_controlled_z(q),
            GateKind::MeasX | GateKind::MeasZ => unreachable!("measurements handled by the caller"),
        }
    }

    /// Probability that `qubit` reads 1 in the Z basis.
    fn prob_one(&self, qubit: usize) -> f64 {
        let bit = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn project(&mut self, qubit: usize, outcome: bool, prob: f64) {
        let bit = 1usize << qubit;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & bit != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.scale(1.0 / prob.sqrt());
    }

    /// Amplitudes of the register `keep` (an ascending list of qubits) after
    /// projecting every other qubit onto `other`, an `n - |keep|`-qubit
    /// state ordered the same way. Unnormalized.
    pub fn project_out(&self, keep: &[usize], other: &DenseState) -> Vec<Complex64> {
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        assert_eq!(other.n_qubits, rest.len());
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << keep.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let k = keep
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            let r = rest
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &q)| acc | (((i >> q) & 1) << j));
            out[k] += other.amps[r].conj() * a;
        }
        out
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            qubits: n_qubits,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hadamard() -> [[Complex64; 2]; 2] {
    let h = FRAC_1_SQRT_2;
    [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]
}

fn phase(theta: f64) -> [[Complex64; 2]; 2] {
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
    ]
}

fn conjugate_by_h(m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let h = hadamard();
    let mul = |a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]| {
        let mut r = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        r
    };
    mul(mul(h, m), h)
}

/// Square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = c(1.0, 0.0);
        }
        Self { dim, data }
    }

    /// Matrix of a classical reversible map on basis indices.
    pub fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut data = vec![c(0.0, 0.0); dim * dim];
        for col in 0..dim {
            data[f(col) * dim + col] = c(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = c(0.0, 0.0);
                for k in 0..n {
                    s += self.get(k, i).conj() * self.get(k, j);
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Largest entry-wise deviation after dividing each matrix by the phase
    /// of its first nonzero entry (row-major scan).
    pub fn max_deviation_up_to_phase(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        let phase_of = |m: &ComplexMatrix| {
            m.data
                .iter()
                .find(|a| a.norm() > 1e-12)
                .map(|a| a / a.norm())
                .unwrap_or(c(1.0, 0.0))
        };
        let (pa, pb) = (phase_of(self), phase_of(other));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a / pa - b / pb).norm())
            .fold(0.0, f64::max)
    }
}

/// CCX on three qubits with controls 0, 1 and target 2.
pub fn ccx_matrix() -> ComplexMatrix {
    ComplexMatrix::permutation(8, |i| if i & 0b011 == 0b011 { i ^ 0b100 } else { i })
}

/// Exact unitary of a measurement-free circuit; column `j` is the image of
/// basis state `j`.
pub fn simulate_unitary(circuit: &Circuit) -> Result<ComplexMatrix> {
    check_size(circuit.n_qubits)?;
    circuit.validate()?;
    if let Some(index) = circuit
        .gates
        .iter()
        .position(|g| g.kind.is_measurement() || g.guard.is_some())
    {
        return Err(Error::MeasurementInUnitary { index });
    }
    let dim = 1usize << circuit.n_qubits;
    let mut data = vec![c(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut s = DenseState::basis(circuit.n_qubits, col)?;
        for g in &circuit.gates {
            s.apply_unitary(g);
        }
        for (row, a) in s.amps.iter().enumerate() {
            data[row * dim + col] = *a;
        }
    }
    Ok(ComplexMatrix { dim, data })
}

#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: Vec<bool>,
    pub probability: f64,
    pub state: DenseState,
    pub cbits: Vec<bool>,
}

/// Runs the circuit, asking `choose(prob_one)` for each measurement outcome.
/// Returns `None` when a chosen outcome has zero probability.
fn run<F>(circuit: &Circuit, input: &DenseState, mut choose: F) -> Result<Option<Branch>>
where
    F: FnMut(usize, f64) -> bool,
{
    check_size(circuit.n_qubits)?;
    circuit.validate()?;
    if input.n_qubits != circuit.n_qubits {
        return Err(Error::LengthMismatch {
            expected: circuit.n_qubits,
            found: input.n_qubits,
        });
    }
    let mut state = input.clone();
    let mut cbits = vec![false; circuit.n_cbits];
    let mut outcomes = Vec::new();
    let mut probability = 1.0;
    for g in &circuit.gates {
        if let Some(guard) = g.guard {
            if !cbits[guard] {
                continue;
            }
        }
        match g.kind {
            GateKind::MeasZ | GateKind::MeasX => {
                let q = g.qubits[0];
                if g.kind == GateKind::MeasX {
                    state.apply_1q(q, hadamard());
                }
                let p1 = state.prob_one(q).clamp(0.0, 1.0);
                let outcome = choose(outcomes.len(), p1);
                let p = if outcome { p1 } else { 1.0 - p1 };
                if p < 1e-15 {
                    return Ok(None);
                }
                state.project(q, outcome, p);
                if g.kind == GateKind::MeasX {
                    state.apply_1q(q, hadamard());
                }
                probability *= p;
                outcomes.push(outcome);
                cbits[g.cbit.expect("validated")] = outcome;
            }
            _ => state.apply_unitary(g),
        }
    }
    Ok(Some(Branch {
        outcomes,
        probability,
        state,
        cbits,
    }))
}

/// Born-rule sampling with a ChaCha8 stream seeded by `seed`.
pub fn simulate_with_measurements(
    circuit: &Circuit,
    input: &DenseState,
    seed: u64,
) -> Result<(DenseState, Vec<bool>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let branch = run(circuit, input, |_, p1| rng.gen::<f64>() < p1)?
        .expect("sampled outcomes have positive probability");
    Ok((branch.state, branch.cbits))
}

/// Runs one branch with forced measurement outcomes (in measurement order).
pub fn simulate_branch(
    circuit: &Circuit,
    input: &DenseState,
    outcomes: &[bool],
) -> Result<Option<Branch>> {
    let n_meas = circuit
        .gates
        .iter()
        .filter(|g| g.kind.is_measurement())
        .count();
    if outcomes.len() != n_meas {
        return Err(Error::LengthMismatch {
            expected: n_meas,
            found: outcomes.len(),
        });
    }
    run(circuit, input, |i, _| outcomes[i])
}

/// Every measurement branch with nonzero probability.
pub fn enumerate_branches(circuit: &Circuit, input: &DenseState) -> Result<Vec<Branch>> {
    let n_meas = circuit
        .gates
        .iter()
        .filter(|g| g.kind.is_measurement())
        .count();
    let mut out = Vec::new();
    for mask in 0u32..1 << n_meas {
        let outcomes: Vec<bool> = (0..n_meas).map(|i| (mask >> i) & 1 == 1).collect();
        if let Some(b) = simulate_branch(circuit, input, &outcomes)? {
            out.push(b);
        }
    }
    Ok(out)
}

/// Toffoli as `H(2) · CCZ · H(2)` with the CCZ split into 7 T/T† and 6 CNOT.
/// Qubits 0, 1 are controls and 2 is the target.
pub fn toffoli_decomposition_standard() -> Circuit {
    use GateKind::*;
    let mut c = Circuit::new(3, 0);
    c.add(H, &[2])
        .add(Cnot, &[1, 2])
        .add(TDag, &[2])
        .add(Cnot, &[0, 2])
        .add(T, &[2])
        .add(Cnot, &[1, 2])
        .add(TDag, &[2])
        .add(Cnot, &[0, 2])
        .add(T, &[1])
        .add(T, &[2])
        .add(H, &[2])
        .add(Cnot, &[0, 1])
        .add(T, &[0])
        .add(TDag, &[1])
        .add(Cnot, &[0, 1]);
    c
}

/// The standard decomposition with both target Hadamards pushed through the
/// target wire: T/T† on the target become TX/TX† and CNOTs onto the target
/// become CZ.
pub fn toffoli_decomposition_hybrid() -> Circuit {
    let standard = toffoli_decomposition_standard();
    let target = 2;
    let mut c = Circuit::new(3, 0);
    for g in standard.gates {
        let on_target = g.qubits.last() == Some(&target);
        let kind = match (g.kind, on_target) {
            (GateKind::H, true) => continue,
            (GateKind::T, true) => GateKind::TX,
            (GateKind::TDag, true) => GateKind::TXDag,
            (GateKind::Cnot, true) => GateKind::Cz,
            (k, _) => k,
        };
        c.push(Gate { kind, ..g });
    }
    c
}

/// Prepares `CCX|+⟩|+⟩|0⟩` on qubits 0–2 and teleports a Toffoli onto the
/// input `|a, b, c⟩` held on qubits 3–5. The result lands on qubits 0–2.
pub fn toffoli_gadget() -> Circuit {
    use GateKind::*;
    let mut c = Circuit::new(6, 3);
    // ancilla Toffoli state
    c.add(H, &[0]).add(H, &[1]).add(Ccx, &[0, 1, 2]);
    // coupling
    c.add(Cnot, &[0, 3]).add(Cnot, &[1, 4]).add(Cnot, &[5, 2]);
    c.push(Gate::measure(MeasZ, 3, 0))
        .push(Gate::measure(MeasZ, 4, 1))
        .push(Gate::measure(MeasX, 5, 2));
    // feedback
    c.push(Gate::guarded(Z, &[2], 2))
        .push(Gate::guarded(Cz, &[0, 1], 2))
        .push(Gate::guarded(Cnot, &[1, 2], 0))
        .push(Gate::guarded(X, &[0], 0))
        .push(Gate::guarded(Cnot, &[0, 2], 1))
        .push(Gate::guarded(X, &[1], 1));
    c
}

/// `|0,0,0⟩` on the ancilla register and `|a,b,c⟩` on qubits 3–5.
pub fn gadget_input(a: bool, b: bool, c: bool) -> DenseState {
    let index = (a as usize) << 3 | (b as usize) << 4 | (c as usize) << 5;
    DenseState::basis(6, index).expect("6 qubits")
}

/// Post-measurement state of the input register for a gadget branch.
fn gadget_measured_register(branch: &Branch) -> DenseState {
    let (m0, m1, m2) = (branch.cbits[0], branch.cbits[1], branch.cbits[2]);
    let h = FRAC_1_SQRT_2;
    let mut amps = vec![c(0.0, 0.0); 8];
    let base = m0 as usize | (m1 as usize) << 1;
    amps[base] = c(h, 0.0);
    amps[base | 4] = c(if m2 { -h } else { h }, 0.0);
    DenseState { n_qubits: 3, amps }
}

/// Normalized ancilla-register state of a gadget branch.
pub fn gadget_output(branch: &Branch) -> Vec<Complex64> {
    let mut out = branch
        .state
        .project_out(&[0, 1, 2], &gadget_measured_register(branch));
    let norm: f64 = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut out {
        *a /= norm;
    }
    out
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
}

/// Runs the decomposition and gadget identities at tolerance `1e-10`.
pub fn identity_suite() -> Result<Vec<IdentityCheck>> {
    const TOL: f64 = 1e-10;
    let ccx = ccx_matrix();
    let mut out = Vec::new();
    for (name, circuit) in [
        ("fig2_standard_equals_ccx", toffoli_decomposition_standard()),
        ("fig3_hybrid_equals_ccx", toffoli_decomposition_hybrid()),
    ] {
        let u = simulate_unitary(&circuit)?;
        let dev = u.max_deviation_up_to_phase(&ccx);
        out.push(IdentityCheck {
            name,
            passed: dev < TOL,
            max_deviation: dev,
        });
        let dev = u.unitarity_deviation();
        out.push(IdentityCheck {
            name: if name.starts_with("fig2") {
                "fig2_unitary"
            } else {
                "fig3_unitary"
            },
            passed: dev < TOL,
            max_deviation: dev,
        });
    }
    let gadget = toffoli_gadget();
    let mut worst: f64 = 0.0;
    for input in 0..8usize {
        let (a, b, cc) = (input & 1 == 1, input & 2 == 2, input & 4 == 4);
        let expected = (a as usize) | (b as usize) << 1 | (((a && b) ^ cc) as usize) << 2;
        let mut total = 0.0;
        for branch in enumerate_branches(&gadget, &gadget_input(a, b, cc))? {
            total += branch.probability;
            let got = gadget_output(&branch);
            for (i, amp) in got.iter().enumerate() {
                let want = if i == expected { 1.0 } else { 0.0 };
                worst = worst.max((amp - want).norm());
            }
        }
        worst = worst.max((total - 1.0).abs());
    }
    out.push(IdentityCheck {
        name: "fig4_gadget_all_branches",
        passed: worst < TOL,
        max_deviation: worst,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-10;

    #[test]
    fn empty_circuit_is_identity() {
        let u = simulate_unitary(&Circuit::new(2, 0)).unwrap();
        assert_eq!(u, ComplexMatrix::identity(4));
    }

    #[test]
    fn single_hadamard() {
        let mut c = Circuit::new(1, 0);
        c.add(GateKind::H, &[0]);
        let u = simulate_unitary(&c).unwrap();
        let h = FRAC_1_SQRT_2;
        for (r, col, v) in [(0, 0, h), (0, 1, h), (1, 0, h), (1, 1, -h)] {
            assert!((u.get(r, col) - v).norm() < 1e-15);
        }
    }

    #[test]
    fn tx_is_hth() {
        let mut a = Circuit::new(1, 0);
        a.add(GateKind::TX, &[0]);
        let mut b = Circuit::new(1, 0);
        b.add(GateKind::H, &[0])
            .add(GateKind::T, &[0])
            .add(GateKind::H, &[0]);
        let (ua, ub) = (simulate_unitary(&a).unwrap(), simulate_unitary(&b).unwrap());
        assert!(ua.max_deviation_up_to_phase(&ub) < 1e-14);
    }

    #[test]
    fn standard_decomposition() {
        let c = toffoli_decomposition_standard();
        assert_eq!(c.gates.len(), 15);
        assert_eq!(c.count(GateKind::Cnot), 6);
        assert_eq!(c.count(GateKind::H), 2);
        assert_eq!(c.count(GateKind::T) + c.count(GateKind::TDag), 7);
        let u = simulate_unitary(&c).unwrap();
        assert!(u.max_deviation_up_to_phase(&ccx_matrix()) < TOL);
        assert!(u.unitarity_deviation() < TOL);
    }

    #[test]
    fn standard_decomposition_with_controls_swapped() {
        let mut c = toffoli_decomposition_standard();
        for g in &mut c.gates {
            for q in &mut g.qubits {
                *q = match *q {
                    0 => 1,
                    1 => 0,
                    x => x,
                };
            }
        }
        let u = simulate_unitary(&c).unwrap();
        assert!(u.max_deviation_up_to_phase(&ccx_matrix()) < TOL);
    }

    #[test]
    fn hybrid_decomposition() {
        let c = toffoli_decomposition_hybrid();
        assert_eq!(c.count(GateKind::H), 0);
        let allowed = [
            GateKind::T,
            GateKind::TDag,
            GateKind::TX,
            GateKind::TXDag,
            GateKind::Cnot,
            GateKind::Cz,
        ];
        assert!(c.gates.iter().all(|g| allowed.contains(&g.kind)));
        for g in &c.gates {
            if g.qubits.contains(&2) {
                assert!(
                    matches!(g.kind, GateKind::TX | GateKind::TXDag | GateKind::Cz),
                    "{g}"
                );
            } else {
                assert!(
                    matches!(g.kind, GateKind::T | GateKind::TDag | GateKind::Cnot),
                    "{g}"
                );
            }
        }
        let u = simulate_unitary(&c).unwrap();
        assert!(u.max_deviation_up_to_phase(&ccx_matrix()) < TOL);
        let s = simulate_unitary(&toffoli_decomposition_standard()).unwrap();
        assert!(u.max_deviation_up_to_phase(&s) < TOL);
    }

    #[test]
    fn measurement_basics() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::measure(GateKind::MeasZ, 0, 0));
        for seed in 0..5 {
            let (_, bits) =
                simulate_with_measurements(&c, &DenseState::zero(1).unwrap(), seed).unwrap();
            assert_eq!(bits, vec![false]);
        }
        let mut c = Circuit::new(1, 1);
        c.add(GateKind::H, &[0]);
        c.push(Gate::measure(GateKind::MeasX, 0, 0));
        for seed in 0..5 {
            let (s, bits) =
                simulate_with_measurements(&c, &DenseState::zero(1).unwrap(), seed).unwrap();
            assert_eq!(bits, vec![false]);
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_sampling_is_seeded() {
        let mut c = Circuit::new(3, 3);
        for q in 0..3 {
            c.add(GateKind::H, &[q]);
        }
        for q in 0..3 {
            c.push(Gate::measure(GateKind::MeasZ, q, q));
        }
        let input = DenseState::zero(3).unwrap();
        let a = simulate_with_measurements(&c, &input, 7).unwrap();
        let b = simulate_with_measurements(&c, &input, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_rejects_measurements_and_large_registers() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::measure(GateKind::MeasZ, 0, 0));
        assert!(matches!(
            simulate_unitary(&c),
            Err(Error::MeasurementInUnitary { index: 0 })
        ));
        assert!(matches!(
            simulate_unitary(&Circuit::new(13, 0)),
            Err(Error::TooManyQubits { .. })
        ));
    }

    #[test]
    fn validation_rejects_bad_gates() {
        let mut c = Circuit::new(2, 1);
        c.add(GateKind::Cnot, &[0, 0]);
        assert!(c.validate().is_err());
        let mut c = Circuit::new(2, 1);
        c.push(Gate::guarded(GateKind::X, &[0], 0));
        assert!(c.validate().is_err());
        let mut c = Circuit::new(2, 1);
        c.add(GateKind::Ccx, &[0, 1]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn gadget_on_basis_inputs() {
        let gadget = toffoli_gadget();
        gadget.validate().unwrap();
        for input in 0..8usize {
            let (a, b, cc) = (input & 1 == 1, input & 2 == 2, input & 4 == 4);
            let expected = (a as usize) | (b as usize) << 1 | (((a && b) ^ cc) as usize) << 2;
            let branches = enumerate_branches(&gadget, &gadget_input(a, b, cc)).unwrap();
            assert_eq!(branches.len(), 8);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for br in &branches {
                let out = gadget_output(br);
                for (i, amp) in out.iter().enumerate() {
                    let want = if i == expected { 1.0 } else { 0.0 };
                    assert!(
                        (amp - want).norm() < TOL,
                        "input {input} branch {:?}",
                        br.outcomes
                    );
                }
            }
        }
    }

    #[test]
    fn gadget_is_coherent_on_superpositions() {
        let gadget = toffoli_gadget();
        let coeffs: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(0.3 + 0.1 * i as f64, 0.05 * (i as f64 - 3.0)))
            .collect();
        let mut amps = vec![c(0.0, 0.0); 64];
        for (i, a) in coeffs.iter().enumerate() {
            amps[i << 3] = *a;
        }
        let input = DenseState::from_amplitudes(amps).unwrap();
        let norm: f64 = coeffs.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut expected = vec![c(0.0, 0.0); 8];
        for (i, a) in coeffs.iter().enumerate() {
            let j = if i & 3 == 3 { i ^ 4 } else { i };
            expected[j] = a / norm;
        }
        let want = ComplexMatrix {
            dim: 1,
            data: expected.clone(),
        };
        for br in enumerate_branches(&gadget, &input).unwrap() {
            let got = ComplexMatrix {
                dim: 1,
                data: gadget_output(&br),
            };
            assert!(got.max_deviation_up_to_phase(&want) < TOL);
        }
    }

    #[test]
    fn gadget_sampled_runs() {
        let gadget = toffoli_gadget();
        for seed in 0..16 {
            let (state, bits) =
                simulate_with_measurements(&gadget, &gadget_input(true, true, false), seed)
                    .unwrap();
            let branch = Branch {
                outcomes: bits.clone(),
                probability: 1.0,
                state,
                cbits: bits,
            };
            let out = gadget_output(&branch);
            assert!((out[0b111].norm() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn text_format_round_trip() {
        for c in [
            toffoli_decomposition_standard(),
            toffoli_decomposition_hybrid(),
            toffoli_gadget(),
        ] {
            let parsed = Circuit::parse_text(&c.to_text()).unwrap();
            assert_eq!(parsed, c);
        }
        let c = Circuit::parse_text("MEAS_Z 3 -> 0\nX 1 ?0\n").unwrap();
        assert_eq!((c.n_qubits, c.n_cbits), (4, 1));
        assert!(Circuit::parse_text("FOO 1\n").is_err());
        assert!(Circuit::parse_text("MEAS_Z 1 ->\n").is_err());
    }

    #[test]
    fn identity_suite_passes() {
        for check in identity_suite().unwrap() {
            assert!(
                check.passed,
                "{} deviation {}",
                check.name, check.max_deviation
            );
        }
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use htof::circuits::{
    identity_suite, toffoli_decomposition_hybrid, toffoli_decomposition_standard, toffoli_gadget,
};
use htof::codes::{
    build_css, build_triorthogonal, builtin_15_1_3, check_triorthogonal, code_distance, mirror,
    ClassicalCode, CssCode,
};
use htof::cost::{
    cost_curves, default_target_grid, fig5_csv, fig6_csv, optimize_k, CostPlan, Fifteen, Protocol,
};
use htof::distill::{
    analyze_block, exact_report, find_threshold, iterate_levels, monte_carlo, toffoli_threshold,
    ErrorMap, ErrorModel, Family3k8, LeadingOrder,
};
use htof::gf2::BinaryMatrix;
use htof::transversality::{
    check_cnot_condition, check_cz_condition, verify_t_transversality,
    verify_toffoli_transversality, verify_tx_transversality, HybridSystem,
};

#[derive(Parser)]
#[command(
    name = "htof",
    version,
    about = "Hybrid-code transversal Toffoli toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build CSS(C1, C2) from generator files, or a triorthogonal code from G
    BuildCss {
        #[arg(long, requires = "c2", conflicts_with = "generator")]
        c1: Option<PathBuf>,
        #[arg(long)]
        c2: Option<PathBuf>,
        /// Triorthogonal generator matrix
        #[arg(long)]
        generator: Option<PathBuf>,
        /// Emit the mirrored code instead
        #[arg(long)]
        mirror: bool,
        /// Compute the code distance
        #[arg(long)]
        distance: bool,
    },
    /// Check a matrix for triorthogonality
    CheckTri { file: PathBuf },
    /// Verify a transversal gate on code operands
    ///
    /// Operands are `builtin15`, a triorthogonal generator FILE, or either
    /// prefixed with `mirror:`. `cnot` and `cz` take two operands, `t` and
    /// `tx` one, `toffoli` one (Q, Q, mirror Q) or three.
    Verify {
        #[arg(long, value_enum)]
        gate: Gate,
        #[arg(required = true)]
        operands: Vec<String>,
    },
    /// Emit or check the Toffoli circuits
    Circuit {
        #[arg(long, value_enum, required_unless_present = "check")]
        which: Option<Which>,
        #[arg(long, requires = "which")]
        emit: bool,
        #[arg(long)]
        check: bool,
    },
    /// Distillation statistics of the hybrid system
    Distill {
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value = "builtin15")]
        code: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Fixed point of the output-error map
    Threshold {
        #[arg(long, default_value = "builtin15")]
        code: String,
    },
    /// Iterate distillation levels until the target error is reached
    Levels {
        #[arg(long)]
        p0: f64,
        #[arg(long)]
        target: f64,
        /// `builtin15`, a generator FILE, or `3k8:K`
        #[arg(long, default_value = "builtin15")]
        code: String,
        #[arg(long, value_enum, default_value_t = LevelModel::Exact)]
        model: LevelModel,
    },
    /// Expected qubit cost of a protocol
    Cost {
        #[arg(long)]
        p0: f64,
        #[arg(long, value_enum, default_value_t = CostProtocol::All)]
        protocol: CostProtocol,
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        target: Option<f64>,
        /// CSV over the default target grid
        #[arg(long)]
        grid: bool,
    },
    /// Write fig5.csv and fig6.csv
    PlotData {
        #[arg(long, default_value_t = 1e-2)]
        p0: f64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Gate {
    Cnot,
    Cz,
    T,
    Tx,
    Toffoli,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Fig2,
    Fig3,
    Gadget,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelModel {
    Exact,
    Leading,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CostProtocol {
    Direct15,
    Magic15,
    #[value(name = "3k8")]
    Family3k8,
    All,
}

fn read_matrix(path: &Path) -> Result<BinaryMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    BinaryMatrix::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A code operand together with the code it mirrors, if any.
struct Operand {
    code: CssCode,
    source: Option<CssCode>,
}

fn base_code(token: &str) -> Result<CssCode> {
    if token == "builtin15" {
        return Ok(builtin_15_1_3().base().clone());
    }
    let g = read_matrix(Path::new(token))?;
    Ok(build_triorthogonal(&g)?.base().clone())
}

fn operand(token: &str) -> Result<Operand> {
    match token.strip_prefix("mirror:") {
        Some(inner) => {
            let source = base_code(inner)?;
            Ok(Operand {
                code: mirror(&source),
                source: Some(source),
            })
        }
        None => Ok(Operand {
            code: base_code(token)?,
            source: None,
        }),
    }
}

/// Writes to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn verify(gate: Gate, operands: &[String]) -> Result<()> {
    let ops = operands
        .iter()
        .map(|t| operand(t))
        .collect::<Result<Vec<_>>>()?;
    let arity_error =
        |want: &str| anyhow::anyhow!("this gate takes {want} operand(s), got {}", ops.len());
    let verdict = match gate {
        Gate::Cnot | Gate::Cz => {
            let [a, b] = ops.as_slice() else {
                return Err(arity_error("2"));
            };
            if matches!(gate, Gate::Cnot) {
                check_cnot_condition(&a.code, &b.code)?
            } else {
                check_cz_condition(&a.code, &b.code)?
            }
        }
        Gate::T => {
            let [a] = ops.as_slice() else {
                return Err(arity_error("1"));
            };
            verify_t_transversality(&a.code)?
        }
        Gate::Tx => {
            let [a] = ops.as_slice() else {
                return Err(arity_error("1"));
            };
            let Some(source) = &a.source else {
                bail!("tx needs a mirror:SOURCE operand");
            };
            verify_tx_transversality(&a.code, source)?
        }
        Gate::Toffoli => {
            let sys = match ops.as_slice() {
                [q] => HybridSystem::from_code(&q.code),
                [a, b, c] => HybridSystem::new(a.code.clone(), b.code.clone(), c.code.clone())?,
                _ => return Err(arity_error("1 or 3")),
            };
            verify_toffoli_transversality(&sys)?
        }
    };
    print_json(&verdict)
}

#[derive(Serialize)]
struct CheckLine {
    name: &'static str,
    passed: bool,
    max_deviation: f64,
}

fn circuit(which: Option<Which>, want_text: bool, check: bool) -> Result<bool> {
    if let Some(w) = which {
        if want_text || !check {
            let c = match w {
                Which::Fig2 => toffoli_decomposition_standard(),
                Which::Fig3 => toffoli_decomposition_hybrid(),
                Which::Gadget => toffoli_gadget(),
            };
            emit(&c.to_text())?;
        }
    }
    if check {
        let results: Vec<CheckLine> = identity_suite()?
            .into_iter()
            .map(|c| CheckLine {
                name: c.name,
                passed: c.passed,
                max_deviation: c.max_deviation,
            })
            .collect();
        let ok = results.iter().all(|c| c.passed);
        print_json(&results)?;
        return Ok(ok);
    }
    Ok(true)
}

#[derive(Serialize)]
struct ThresholdOut {
    p_star: f64,
    toffoli_threshold: f64,
}

fn level_model(code: &str, model: LevelModel) -> Result<Box<dyn ErrorMap>> {
    if let Some(k) = code.strip_prefix("3k8:") {
        let k: usize = k.parse().with_context(|| format!("bad block size {k:?}"))?;
        return Ok(Box::new(Family3k8 { k }));
    }
    let block = analyze_block(&base_code(code)?)?;
    Ok(match model {
        LevelModel::Exact => Box::new(block),
        LevelModel::Leading => Box::new(
            LeadingOrder::from_block(&block)
                .context("code has no logical trivial-syndrome errors")?,
        ),
    })
}

fn cost(p0: f64, protocol: CostProtocol, target: Option<f64>, grid: bool) -> Result<()> {
    let wanted = |p: Protocol| match protocol {
        CostProtocol::All => true,
        CostProtocol::Direct15 => p == Protocol::Direct15,
        CostProtocol::Magic15 => p == Protocol::Magic15,
        CostProtocol::Family3k8 => p == Protocol::Family3k8,
    };
    if grid {
        let mut curve = cost_curves(p0, &default_target_grid())?;
        curve.points.retain(|pt| wanted(pt.protocol));
        emit(&fig5_csv(&curve))?;
        return Ok(());
    }
    let target = target.expect("clap requires --target without --grid");
    let fifteen = Fifteen::builtin();
    let mut plans: Vec<CostPlan> = Vec::new();
    for p in [Protocol::Direct15, Protocol::Magic15, Protocol::Family3k8] {
        if wanted(p) {
            plans.push(match p {
                Protocol::Family3k8 => optimize_k(p0, target)?,
                _ => fifteen.plan_to_target(p, p0, target)?,
            });
        }
    }
    if plans.len() == 1 {
        print_json(&plans[0])
    } else {
        print_json(&plans)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::BuildCss {
            c1,
            c2,
            generator,
            mirror: want_mirror,
            distance,
        } => {
            let code = match (c1, c2, generator) {
                (Some(c1), Some(c2), None) => build_css(
                    &ClassicalCode::new(read_matrix(&c1)?),
                    &ClassicalCode::new(read_matrix(&c2)?),
                )?,
                (None, None, Some(g)) => build_triorthogonal(&read_matrix(&g)?)?.base().clone(),
                _ => bail!("pass either --c1 and --c2, or --generator"),
            };
            let code = if want_mirror { mirror(&code) } else { code };
            let d = if distance {
                Some(code_distance(&code)?)
            } else {
                None
            };
            print_json(&code.describe(d))?;
        }
        Command::CheckTri { file } => {
            let report = check_triorthogonal(&read_matrix(&file)?);
            print_json(&report)?;
        }
        Command::Verify { gate, operands } => verify(gate, &operands)?,
        Command::Circuit { which, emit, check } => return circuit(which, emit, check),
        Command::Distill {
            mode,
            code,
            p,
            trials,
            seed,
        } => {
            let sys = HybridSystem::from_code(&base_code(&code)?);
            let model = ErrorModel::new(p)?;
            let report = match mode {
                Mode::Exact => exact_report(&sys, model)?,
                Mode::Mc => monte_carlo(&sys, model, trials, seed)?,
            };
            print_json(&report)?;
        }
        Command::Threshold { code } => {
            let p_star = find_threshold(&analyze_block(&base_code(&code)?)?)?;
            print_json(&ThresholdOut {
                p_star,
                toffoli_threshold: toffoli_threshold(p_star)?,
            })?;
        }
        Command::Levels {
            p0,
            target,
            code,
            model,
        } => {
            let m = level_model(&code, model)?;
            print_json(&iterate_levels(p0, target, m.as_ref())?)?;
        }
        Command::Cost {
            p0,
            protocol,
            target,
            grid,
        } => cost(p0, protocol, target, grid)?,
        Command::PlotData { p0, out } => {
            let grid = default_target_grid();
            fs::create_dir_all(&out)?;
            fs::write(out.join("fig5.csv"), fig5_csv(&cost_curves(p0, &grid)?))?;
            fs::write(out.join("fig6.csv"), fig6_csv(p0, &grid))?;
            emit(&format!(
                "{}\n{}\n",
                out.join("fig5.csv").display(),
                out.join("fig6.csv").display()
            ))?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

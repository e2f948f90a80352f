//! Command-line front end.
//!
//! Commands: `plan`, `simulate`, `verify`, `compile`, `check-compile`.
//! Exit codes: 0 on success, 1 on verification failure, 2 on usage or
//! format errors, so the tool can gate CI scripts.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::compiler;
use crate::dense::{self, to_dense};
use crate::error::Error;
use crate::identities::{self, IdentityId, IdentityReport};
use crate::pauli::{factors_from_string, OperatorSum, ProductTerm};
use crate::planner::{self, ExperimentSpec, Scheme};
use crate::serial;

/// Default residual tolerance at the CLI; looser than the library internals
/// to absorb compilation phase arithmetic.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Writes a line to stdout, tolerating a closed pipe (e.g. `| head`).
fn emit(line: impl std::fmt::Display) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

#[derive(Parser)]
#[command(
    name = "pureprep",
    version,
    about = "Build, simulate, verify and compile temporal-averaging preparation plans \
             for effective pure states in n-spin-1/2 ensembles"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a preparation plan and write it as JSON
    Plan {
        /// Spin count
        #[arg(short = 'n', long = "spins")]
        n: usize,
        /// Preparation scheme: general | logical-label
        #[arg(long, default_value = "general")]
        scheme: Scheme,
        /// Output path; stdout when omitted
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Replace integer weights > 1 by unit-weight repetitions
        #[arg(long)]
        expand_repetitions: bool,
        /// Emit the summary as JSON
        #[arg(long)]
        json: bool,
    },
    /// Simulate a plan file and compare against its stored target
    Simulate {
        plan_file: PathBuf,
        /// Residual tolerance
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Run one identity check from the verification suite
    Verify {
        /// Identity id: eq3 eq4 eq5 eq8 eq9 eq10 eq11 eq13 eq17 parity eq18
        #[arg(long)]
        identity: String,
        /// Spin count
        #[arg(short = 'n', long = "spins")]
        n: usize,
        /// Basis product term as an EXYZ factor string, spin 1 leftmost
        #[arg(long)]
        sigma: Option<String>,
        /// Residual tolerance (default 1e-9)
        #[arg(long)]
        tol: Option<f64>,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Lower every experiment of a plan file to the one-qubit +
    /// two-qubit-diagonal gate set
    Compile {
        plan_file: PathBuf,
        /// Output path; stdout when omitted
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Emit the summary as JSON
        #[arg(long)]
        json: bool,
    },
    /// Recompose a compiled file and verify every sequence against its steps
    CheckCompile {
        gates_file: PathBuf,
        /// Residual tolerance
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Emit the reports as JSON
        #[arg(long)]
        json: bool,
    },
}

/// Parses arguments from the process environment and runs; returns the exit
/// code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = err.exit_code();
            let _ = err.print();
            return if code == 0 { 0 } else { 2 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Plan {
            n,
            scheme,
            out,
            expand_repetitions,
            json,
        } => cmd_plan(n, scheme, out.as_deref(), expand_repetitions, json),
        Command::Simulate {
            plan_file,
            tol,
            json,
        } => cmd_simulate(&plan_file, tol, json),
        Command::Verify {
            identity,
            n,
            sigma,
            tol,
            json,
        } => cmd_verify(&identity, n, sigma.as_deref(), tol, json),
        Command::Compile {
            plan_file,
            out,
            json,
        } => cmd_compile(&plan_file, out.as_deref(), json),
        Command::CheckCompile {
            gates_file,
            tol,
            json,
        } => cmd_check_compile(&gates_file, tol, json),
    }
}

fn build_plan(n: usize, scheme: Scheme) -> Result<planner::PreparationPlan, String> {
    let plan = match scheme {
        Scheme::General => planner::general_plan(n),
        Scheme::LogicalLabel => planner::logical_label_plan(n),
    };
    plan.map_err(|e| e.to_string())
}

fn cmd_plan(
    n: usize,
    scheme: Scheme,
    out: Option<&Path>,
    expand: bool,
    json: bool,
) -> Result<i32, String> {
    let mut plan = build_plan(n, scheme)?;
    if expand {
        plan = planner::expand_repetitions(&plan);
    }
    let file = serial::plan_to_file(&plan);
    let body = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| e.to_string())?;
            if json {
                emit(serde_json::json!({
                    "n": n,
                    "scheme": scheme.as_str(),
                    "experiments": plan.experiments.len(),
                    "path": path.display().to_string(),
                }));
            } else {
                emit(format!("experiments: {}", plan.experiments.len()));
                emit(format!("wrote {}", path.display()));
            }
        }
        None => {
            emit(&body);
            eprintln!("experiments: {}", plan.experiments.len());
        }
    }
    Ok(0)
}

fn read_plan(path: &Path) -> Result<planner::PreparationPlan, String> {
    let body = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let file: serial::PlanFile = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    serial::plan_from_file(&file).map_err(|e| e.to_string())
}

fn format_diagonal(diag: &[Complex64]) -> String {
    let parts: Vec<String> = diag
        .iter()
        .map(|c| {
            if c.im.abs() < 1e-12 {
                format!("{:.6}", c.re)
            } else {
                format!("{:.6}{:+.6}i", c.re, c.im)
            }
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn cmd_simulate(plan_file: &Path, tol: f64, json: bool) -> Result<i32, String> {
    if tol <= 0.0 {
        return Err("tolerance must be positive".into());
    }
    let plan = read_plan(plan_file)?;
    let (avg, report) = planner::simulate_plan(&plan, tol).map_err(|e| e.to_string())?;
    let diag = to_dense(&avg).diagonal();
    if json {
        let mut value = serde_json::to_value(&report).map_err(|e| e.to_string())?;
        value["diagonal"] = serde_json::to_value(&diag).map_err(|e| e.to_string())?;
        emit(serde_json::to_string_pretty(&value).map_err(|e| e.to_string())?);
    } else {
        emit(report.summary());
        emit(format!("diagonal: {}", format_diagonal(&diag)));
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn parse_sigma(sigma: &str, n: usize) -> Result<ProductTerm, String> {
    let factors = factors_from_string(sigma)
        .ok_or_else(|| format!("bad factor string `{sigma}`: use characters E, X, Y, Z"))?;
    if factors.len() != n {
        return Err(format!(
            "factor string `{sigma}` has length {}, expected {n}",
            factors.len()
        ));
    }
    Ok(ProductTerm::from_real(1.0, factors))
}

fn default_alpha(n: usize) -> f64 {
    PI / (3.0 * (1u64 << n) as f64)
}

fn cmd_verify(
    identity: &str,
    n: usize,
    sigma: Option<&str>,
    tol: Option<f64>,
    json: bool,
) -> Result<i32, String> {
    let id = IdentityId::from_token(identity)
        .ok_or_else(|| format!("unknown identity id `{identity}`"))?;
    let tol = tol.unwrap_or(DEFAULT_TOL);
    if tol <= 0.0 {
        return Err("tolerance must be positive".into());
    }

    let sigma_term = match sigma {
        Some(s) => Some(parse_sigma(s, n)?),
        None => None,
    };
    let sigma_sum = |fallback: crate::error::Result<OperatorSum>| -> Result<OperatorSum, String> {
        match &sigma_term {
            Some(term) => Ok(OperatorSum::from_term(term)),
            None => fallback.map_err(|e| e.to_string()),
        }
    };
    let sigma_basis = |fallback_all: crate::pauli::Axis| -> ProductTerm {
        sigma_term.clone().unwrap_or_else(|| {
            let all: Vec<usize> = (1..=n).collect();
            ProductTerm::on_spins(1.0, &all, fallback_all, n).expect("valid spins")
        })
    };

    let report: Result<IdentityReport, Error> = match id {
        IdentityId::OnesConjugation => {
            let sum = sigma_sum(planner::start_state(n))?;
            identities::check_ones_conjugation(&sum, default_alpha(n), n, tol)
        }
        IdentityId::OnesClosedForm => identities::check_ones_closed_form(default_alpha(n), n, tol),
        IdentityId::OnesSandwich => {
            let sum = sigma_sum(planner::start_state(n))?;
            identities::check_ones_sandwich(&to_dense(&sum), tol)
        }
        IdentityId::OnesDecomposition => identities::check_ones_decomposition(n, tol),
        IdentityId::RotatedFrameExpansion => {
            let sum = sigma_sum(planner::start_state(n))?;
            identities::check_rotated_frame_expansion(&sum, default_alpha(n), n, tol)
        }
        IdentityId::BalanceIdentity | IdentityId::PhaseFlipDifference => {
            let fallback = if id == IdentityId::BalanceIdentity {
                crate::pauli::Axis::X
            } else {
                crate::pauli::Axis::Y
            };
            identities::check_phase_flip_branch(&sigma_basis(fallback), n, tol)
        }
        IdentityId::ReflectionAnticommutator => {
            identities::check_reflection_anticommutator(&sigma_basis(crate::pauli::Axis::Y), n, tol)
        }
        IdentityId::CoherenceCaseTable => identities::check_coherence_case_table(n, tol),
        IdentityId::EvenSpinConversion => {
            identities::check_even_spin_conversion(n, identities::conversion_angle(n), tol)
        }
        IdentityId::PoleProjection => identities::check_pole_projection(n, tol),
        IdentityId::PlanGeneral | IdentityId::PlanLogicalLabel | IdentityId::Compilation => {
            return Err(format!(
                "identity id `{identity}` is produced by simulate/check-compile, not verify"
            ));
        }
    };
    let report = report.map_err(|e| e.to_string())?;
    if json {
        emit(serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?);
    } else {
        emit(report.summary());
    }
    Ok(if report.passed { 0 } else { 1 })
}

fn cmd_compile(plan_file: &Path, out: Option<&Path>, json: bool) -> Result<i32, String> {
    let plan = read_plan(plan_file)?;
    let sequences = compiler::compile_plan(&plan).map_err(|e| e.to_string())?;
    let file = serial::compiled_to_file(&plan, &sequences);
    let body = serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?;
    let total_gates: usize = sequences.iter().map(|s| s.gate_count()).sum();
    match out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| e.to_string())?;
            if json {
                emit(serde_json::json!({
                    "n": plan.n,
                    "sequences": sequences.len(),
                    "total_gates": total_gates,
                    "path": path.display().to_string(),
                }));
            } else {
                emit(format!("sequences: {}", sequences.len()));
                emit(format!("total gates: {total_gates}"));
                emit(format!("wrote {}", path.display()));
            }
        }
        None => {
            emit(&body);
            eprintln!("sequences: {}", sequences.len());
        }
    }
    Ok(0)
}

fn cmd_check_compile(gates_file: &Path, tol: f64, json: bool) -> Result<i32, String> {
    if tol <= 0.0 {
        return Err("tolerance must be positive".into());
    }
    let body = std::fs::read_to_string(gates_file).map_err(|e| e.to_string())?;
    let file: serial::CompiledFile = serde_json::from_str(&body).map_err(|e| e.to_string())?;
    if file.version != serial::FORMAT_VERSION {
        return Err(format!("unsupported file version {}", file.version));
    }
    dense::DenseOperator::check_cap(file.n).map_err(|e| e.to_string())?;

    let mut reports = Vec::new();
    let mut all_passed = true;
    for (index, entry) in file.experiments.iter().enumerate() {
        let exp = ExperimentSpec {
            weight: entry.weight,
            steps: entry.steps.clone(),
        };
        let source = planner::experiment_unitary(&exp, file.n).map_err(|e| e.to_string())?;
        let seq = serial::sequence_from_dto(&entry.gate_sequence).map_err(|e| e.to_string())?;
        if seq.n != file.n {
            return Err(format!(
                "experiment {index}: sequence spin count {} does not match file {}",
                seq.n, file.n
            ));
        }
        let report = compiler::verify_sequence(&source, &seq, tol).map_err(|e| e.to_string())?;
        all_passed &= report.passed;
        reports.push(report);
    }
    if json {
        emit(serde_json::to_string_pretty(&reports).map_err(|e| e.to_string())?);
    } else {
        for (index, report) in reports.iter().enumerate() {
            emit(format!("experiment {index}: {}", report.summary()));
        }
    }
    Ok(if all_passed { 0 } else { 1 })
}

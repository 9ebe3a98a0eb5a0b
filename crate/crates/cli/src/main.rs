//! Command-line front end: synthesise the matrix-element oracle, simulate
//! gate-list files, verify against the classical mirror, and report
//! resources and spectra.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qfem_core::circuit::{parse_circuit, write_circuit, BitString, Circuit};
use qfem_core::estimate::{estimate_resources, AdderKind, EstimateParams};
use qfem_core::fem::spectrum_check;
use qfem_core::fixedpoint::FixedPointFormat;
use qfem_core::geometry::Layout;
use qfem_core::mulpoly::{build_mul, build_poly};
use qfem_core::newton::{build_exp, build_inmul, build_rec, build_sqrt};
use qfem_core::oracle::{build_oracle_theta, verify_oracle};
use qfem_core::series::SeriesVariant;

use config::{parse_config, RunConfig};

#[derive(Parser)]
#[command(name = "qfem", about = "Reversible-circuit oracles for 1D elastic FEM matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum LayoutArg {
    Serial,
    Parallel,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesArg {
    Standard,
    Paper,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesise the oracle circuit into a gate-list file.
    Synth {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        layout: Option<LayoutArg>,
        #[arg(long)]
        series: Option<SeriesArg>,
        /// Lower multi-controlled gates to Toffolis over an appended pool.
        #[arg(long)]
        lower_mcx: bool,
    },
    /// Apply a gate-list file to a basis state.
    Simulate {
        circuit: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Sweep banded matrix elements against the classical mirror.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        layout: Option<LayoutArg>,
        #[arg(long)]
        series: Option<SeriesArg>,
        #[arg(long, default_value_t = 12)]
        seed: u64,
    },
    /// Predicted versus built resource counts.
    Resources {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        layout: Option<LayoutArg>,
        #[arg(long)]
        series: Option<SeriesArg>,
    },
    /// Eigenvalue sanity check of the assembled matrix.
    Spectrum {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    // die quietly when the output pipe closes (e.g. piping into head)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(
    path: &PathBuf,
    layout: Option<LayoutArg>,
    series: Option<SeriesArg>,
) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(l) = layout {
        cfg.oracle.layout = match l {
            LayoutArg::Serial => Layout::Serial,
            LayoutArg::Parallel => Layout::Parallel,
        };
    }
    if let Some(s) = series {
        cfg.oracle.series = match s {
            SeriesArg::Standard => SeriesVariant::Standard,
            SeriesArg::Paper => SeriesVariant::PaperPrinted,
        };
    }
    Ok(cfg)
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Synth {
            config,
            out,
            layout,
            series,
            lower_mcx,
        } => {
            let cfg = load(&config, layout, series)?;
            let oracle = build_oracle_theta(&cfg.problem, &cfg.oracle)?;
            let circuit = if lower_mcx {
                lower_with_pool(&oracle.circuit)?
            } else {
                oracle.circuit
            };
            let text = write_circuit(&circuit);
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { circuit, input } => {
            let text = std::fs::read_to_string(&circuit)
                .with_context(|| format!("reading circuit {}", circuit.display()))?;
            let parsed = parse_circuit(&text)?;
            let bits: BitString = input
                .parse()
                .map_err(|e| anyhow!("bad input bitstring: {e}"))?;
            let out = parsed.simulate(&bits)?;
            println!("{out}");
            for reg in parsed.registers() {
                let code = out.register_code(reg);
                match reg.format() {
                    Some(fmt) => println!(
                        "{} = {} (code {})",
                        reg.name(),
                        fmt.value_from_code(code).decode_f64(),
                        code
                    ),
                    None => println!("{} = {}", reg.name(), code),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check {
            config,
            layout,
            series,
            seed,
        } => {
            let cfg = load(&config, layout, series)?;
            let oracle = build_oracle_theta(&cfg.problem, &cfg.oracle)?;
            let report = verify_oracle(&oracle, 8, seed)?;
            println!("   i    j  sign  theta_code      theta  match  |theta - acos(sqrt|H'|)|");
            for c in &report.pairs {
                println!(
                    "{:4} {:4}  {:>4}  {:>10}  {:>9.6}  {:>5}  {}",
                    c.i,
                    c.j,
                    c.sign as u8,
                    c.theta_code,
                    c.theta,
                    if c.matches_reference && c.workspace_clean {
                        "yes"
                    } else {
                        "NO"
                    },
                    c.deviation
                        .map(|d| format!("{d:.6}"))
                        .unwrap_or_else(|| "-".into()),
                );
            }
            println!("max deviation over physical rows: {:.6}", report.max_deviation);
            println!("pairs={} all_match={} all_clean={}", report.pairs.len(), report.all_match, report.all_clean);
            if report.ok() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Resources {
            config,
            layout,
            series,
        } => {
            let cfg = load(&config, layout, series)?;
            print_resources(&cfg)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Spectrum { config } => {
            let cfg = load(&config, None, None)?;
            let report = spectrum_check(&cfg.problem);
            println!("flag value          = {}", report.flag);
            println!("flagged rows        = {}", report.flagged_rows);
            println!("flag multiplicity   = {}", report.flag_multiplicity);
            println!("max physical eigen  = {}", report.max_physical);
            println!("symmetric           = {}", report.symmetric);
            println!("ok                  = {}", report.ok);
            Ok(if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

/// Append a clean pool register big enough for the widest gate and lower.
fn lower_with_pool(circuit: &Circuit) -> Result<Circuit> {
    let max_controls = circuit
        .gates()
        .iter()
        .map(|g| g.controls().len())
        .max()
        .unwrap_or(0);
    let need = max_controls.saturating_sub(2).max(1) as u32;
    let mut text = write_circuit(circuit);
    let n = circuit.num_qubits();
    text = text.replacen(
        &format!("qubits {n}\n"),
        &format!(
            "qubits {}\nreg mcx_pool {}..{} ancilla\n",
            n + need,
            n,
            n + need - 1
        ),
        1,
    );
    let widened = parse_circuit(&text)?;
    let pool: Vec<u32> = (n..n + need).collect();
    Ok(widened.lower_mcx(&pool)?)
}

fn print_resources(cfg: &RunConfig) -> Result<()> {
    let oracle = build_oracle_theta(&cfg.problem, &cfg.oracle)?;
    let params = EstimateParams {
        r: cfg.oracle.r as u64,
        p: cfg.oracle.p as u64,
        k_order: cfg.oracle.k_order as u64,
        l_iterations: cfg.oracle.newton.iterations as u64,
        n_geo: 1,
        n_dirichlet: cfg.problem.dirichlet().len() as u64,
        index_bits: cfg.problem.index_bits() as u64,
        layout: cfg.oracle.layout,
        adder: AdderKind::CarryRipple,
    };
    let rows = estimate_resources(&params);

    // build the components at the same parameters for the actual column
    let fmt_s = cfg.oracle.fmt_signed();
    let fmt_u = cfg.oracle.fmt_unsigned();
    let newton = &cfg.oracle.newton;
    let spec = cfg.oracle.series_spec()?;
    let actual = |name: &str| -> Option<u64> {
        match name {
            "add (carry-ripple)" => {
                Some(qfem_core::adders::build_add(FixedPointFormat::unsigned(params.r as u32, 0).unwrap()).num_qubits() as u64)
            }
            "mul" => Some(build_mul(fmt_s).num_qubits() as u64),
            "poly" => Some(build_poly(&spec).num_qubits() as u64),
            "rsqrt" => Some(qfem_core::newton::build_rsqrt(fmt_u, newton).num_qubits() as u64),
            "sqrt" => Some(build_sqrt(fmt_u, newton).num_qubits() as u64),
            "rec" => Some(build_rec(fmt_u, newton).num_qubits() as u64),
            "inmul" => Some(build_inmul(fmt_u, newton).num_qubits() as u64),
            "insq (built)" => Some(qfem_core::newton::build_insq(fmt_u, newton).num_qubits() as u64),
            "exp" => Some(build_exp(fmt_u, newton, None).num_qubits() as u64),
            "sig" => qfem_core::newton::build_sig(0.0, &[(1, 1.0), (2, 0.25)], 2, fmt_u, newton)
                .ok()
                .map(|c| c.num_qubits() as u64),
            "eq (lowered)" => {
                let r = params.r as u32;
                let mut cb = qfem_core::CircuitBuilder::new();
                let a = cb.allocate_register("a", r, None, false).unwrap();
                let b = cb.allocate_register("b", r, None, false).unwrap();
                let flag = cb.allocate_register("flag", 1, None, false).unwrap();
                cb.allocate_register("pool", r - 2, None, true).unwrap();
                qfem_core::logic::emit_eq_flip(&mut cb, &a.bits(), &b.bits(), flag.bit(0));
                Some(cb.build().num_qubits() as u64)
            }
            "gt" => Some(
                qfem_core::logic::build_gt(FixedPointFormat::unsigned(params.r as u32, 0).unwrap())
                    .num_qubits() as u64,
            ),
            "oracle total" => Some(oracle.circuit.num_qubits() as u64),
            _ => None,
        }
    };

    println!("{:<22} {:>10} {:>10} {:>6}  runtime", "component", "predicted", "built", "match");
    for row in &rows {
        let built = actual(&row.name);
        let match_col = match (row.exact, built) {
            (true, Some(b)) => {
                if b == row.qubits {
                    "yes"
                } else {
                    "NO"
                }
            }
            _ => "-",
        };
        println!(
            "{:<22} {:>10} {:>10} {:>6}  {}",
            row.name,
            row.qubits,
            built.map(|b| b.to_string()).unwrap_or_else(|| "-".into()),
            match_col,
            row.runtime
        );
    }
    let res = oracle.circuit.resources();
    println!();
    for row in &rows {
        println!(
            "formula.{}={} exact={}",
            row.name.replace(' ', "_"),
            row.qubits,
            row.exact
        );
    }
    println!("oracle.qubits={}", res.qubits);
    println!("oracle.ancillas={}", res.ancillas);
    println!("oracle.gates={}", res.total_gates());
    println!("oracle.depth={}", res.depth);
    for (kind, count) in &res.gate_counts {
        println!("oracle.gates.{}={}", kind.name(), count);
    }
    Ok(())
}

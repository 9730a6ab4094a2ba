//! Thin command-line front end over the library. Exit codes: 0 pass,
//! 1 assertion failure, 2 usage error.

use clap::{Parser, Subcommand, ValueEnum};
use mpqw::circuit::CircuitIR;
use mpqw::compiler::Variant;
use mpqw::harness::{
    self, records_to_csv, records_to_json, run_cd_scan, run_gate_scan,
    verify_truncation_experiment,
};
use mpqw::io::{to_dot, GraphJson};
use mpqw::scattering::{check_block_form, s_matrix_from_blocks, SMatrixMethod};
use mpqw::two_particle::{solve_two_particle, InteractionModel, Statistics};
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mpqw", about = "multi-particle quantum walk simulator and compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Onsite,
    Nn,
}

#[derive(Clone, Copy, ValueEnum)]
enum StatsArg {
    Boson,
    Fermion,
    Dist,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Gamma,
    Q,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// S-matrix of a gadget graph at one momentum.
    Smatrix {
        /// JSON graph file with inputs/outputs terminal lists.
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        momentum: f64,
        #[arg(long, value_enum, default_value = "gamma")]
        method: MethodArg,
    },
    /// Two-particle reflection/transmission and exchange phases.
    Theta {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, short = 'U', allow_hyphen_values = true)]
        u: f64,
        #[arg(long, allow_hyphen_values = true)]
        p1: f64,
        #[arg(long, allow_hyphen_values = true)]
        p2: f64,
    },
    /// Compile a circuit into a walk graph layout.
    Compile {
        /// Circuit JSON ({"qubit_count": n, "gates": [...]}).
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, short = 'L', default_value_t = 16)]
        l: usize,
        #[arg(long)]
        planar: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Interaction phase used when expanding controlled-phase gates.
        #[arg(long, default_value_t = -PI / 2.0, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Transport fidelity scan of a gate gadget over packet lengths.
    GateScan {
        #[arg(long, default_value = "phase_gate")]
        gate: String,
        #[arg(long, allow_hyphen_values = true)]
        momentum: Option<f64>,
        #[arg(long, short = 'L', value_delimiter = ',', default_values_t = vec![16usize, 32, 64])]
        l: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Interaction-phase measurement on the two-switch graph.
    CdScan {
        #[arg(long, value_enum, default_value = "onsite")]
        model: ModelArg,
        #[arg(long, short = 'U', default_value_t = 2.0 + std::f64::consts::SQRT_2, allow_hyphen_values = true)]
        u: f64,
        #[arg(long, value_enum, default_value = "boson")]
        stats: StatsArg,
        #[arg(long, short = 'L', value_delimiter = ',', default_values_t = vec![16usize])]
        l: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compile and simulate a circuit end to end, reading out bit
    /// probabilities.
    Run {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long, short = 'L', default_value_t = 16)]
        l: usize,
        #[arg(long, value_enum, default_value = "onsite")]
        model: ModelArg,
        #[arg(long, short = 'U', default_value_t = 2.0 + std::f64::consts::SQRT_2, allow_hyphen_values = true)]
        u: f64,
        #[arg(long, value_enum, default_value = "boson")]
        stats: StatsArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Input bitstring, e.g. 01.
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 20_000_000)]
        cap: usize,
    },
    /// Check the truncation bound on random instances.
    VerifyTruncation {
        #[arg(long, default_value_t = 20260210)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        trials: usize,
    },
    /// DOT rendering of a gadget or compiled graph.
    ExportDot {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_model(model: ModelArg, u: f64) -> InteractionModel {
    match model {
        ModelArg::Onsite => InteractionModel::Onsite { u },
        ModelArg::Nn => InteractionModel::NearestNeighbor { u },
    }
}

fn parse_stats(s: StatsArg) -> Statistics {
    match s {
        StatsArg::Boson => Statistics::Boson,
        StatsArg::Fermion => Statistics::Fermion,
        StatsArg::Dist => Statistics::Distinguishable,
    }
}

fn write_or_print(path: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<bool, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Smatrix {
            graph,
            momentum,
            method,
        } => {
            let text = std::fs::read_to_string(graph)?;
            let gadget = GraphJson::parse(&text)?.to_gadget()?;
            let blocks = mpqw::partition_adjacency(&gadget);
            let method = match method {
                MethodArg::Gamma => SMatrixMethod::Gamma,
                MethodArg::Q => SMatrixMethod::QForm,
            };
            let sol = s_matrix_from_blocks(&blocks, momentum, method)?;
            let n = sol.s.nrows();
            let entries: Vec<serde_json::Value> = (0..n)
                .flat_map(|i| {
                    let s = &sol.s;
                    (0..n).map(move |j| {
                        serde_json::json!({
                            "row": i, "col": j,
                            "re": s[(i, j)].re, "im": s[(i, j)].im,
                        })
                    })
                })
                .collect();
            let split = gadget.inputs.len().max(1).min(n.saturating_sub(1)).max(1);
            let block = if n >= 2 {
                let bf = check_block_form(&sol, split);
                serde_json::json!({
                    "split": split,
                    "perfect_transmission": bf.is_perfect_transmission,
                    "reflection_norm": bf.reflection_norm,
                })
            } else {
                serde_json::json!(null)
            };
            let out = serde_json::json!({
                "momentum": momentum,
                "energy": sol.energy,
                "condition": sol.condition,
                "entries": entries,
                "block_form": block,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Theta { model, u, p1, p2 } => {
            let m = parse_model(model, u);
            let sol = solve_two_particle(&m, p1, p2)?;
            let out = serde_json::json!({
                "p1": p1, "p2": p2,
                "reflection": {"re": sol.reflection.re, "im": sol.reflection.im},
                "transmission": {"re": sol.transmission.re, "im": sol.transmission.im},
                "theta_plus": sol.theta_plus,
                "theta_minus": sol.theta_minus,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(true)
        }
        Command::Compile {
            circuit,
            l,
            planar,
            out,
            theta,
        } => {
            let text = std::fs::read_to_string(circuit)?;
            let circ: CircuitIR = serde_json::from_str(&text)?;
            let variant = if planar {
                Variant::Planar
            } else {
                Variant::Standard
            };
            let layout = harness::compile_circuit(&circ, l, variant, theta)?;
            let graph_json = GraphJson::from_graph(&layout.graph);
            let doc = serde_json::json!({
                "graph": graph_json,
                "distances": layout.distances,
                "schedule": layout.schedule,
                "total_time": layout.total_time,
                "packet_specs": layout.packet_specs.iter()
                    .map(|((q, v), s)| serde_json::json!({"encoded": q, "value": v, "spec": s}))
                    .collect::<Vec<_>>(),
                "readout_windows": layout.readout_windows,
                "rails": layout.rails.iter()
                    .map(|((q, v), r)| serde_json::json!({"encoded": q, "value": v, "vertices": r}))
                    .collect::<Vec<_>>(),
            });
            write_or_print(&out, &serde_json::to_string_pretty(&doc)?)?;
            eprintln!(
                "compiled: {} vertices, {} blocks, total time {:.6}",
                layout.graph.vertex_count(),
                layout.plan.blocks.len(),
                layout.total_time
            );
            Ok(true)
        }
        Command::GateScan {
            gate,
            momentum,
            l,
            tol,
            seed,
            format,
            out,
        } => {
            let k = momentum.unwrap_or_else(|| {
                if gate.starts_with("hadamard") {
                    -PI / 2.0
                } else {
                    -PI / 4.0
                }
            });
            let records = run_gate_scan(&gate, k, &l, tol, seed)?;
            let text = match format {
                FormatArg::Csv => records_to_csv(&records),
                FormatArg::Json => records_to_json(&records),
            };
            write_or_print(&out, &text)?;
            // errors should not grow with L
            let errs: Vec<f64> = records
                .iter()
                .filter(|r| r.name.ends_with("state_error"))
                .map(|r| r.measured)
                .collect();
            Ok(errs.windows(2).all(|w| w[1] <= w[0] + 1e-9))
        }
        Command::CdScan {
            model,
            u,
            stats,
            l,
            tol,
            out,
        } => {
            let m = parse_model(model, u);
            let points = run_cd_scan(&m, parse_stats(stats), &l, tol)?;
            let text = serde_json::to_string_pretty(&points)?;
            write_or_print(&out, &text)?;
            let ok = points
                .windows(2)
                .all(|w| w[1].phase_error <= w[0].phase_error + 0.02);
            Ok(ok)
        }
        Command::Run {
            circuit,
            l,
            model,
            u,
            stats,
            tol,
            input,
            cap,
        } => {
            let text = std::fs::read_to_string(circuit)?;
            let circ: CircuitIR = serde_json::from_str(&text)?;
            let m = parse_model(model, u);
            let statistics = parse_stats(stats);
            let sol = solve_two_particle(&m, PI / 4.0, 3.0 * PI / 8.0)?;
            let theta = match statistics {
                Statistics::Boson => sol.theta_plus,
                Statistics::Fermion => sol.theta_minus,
                Statistics::Distinguishable => sol.transmission.arg(),
            };
            let layout = harness::compile_circuit(&circ, l, Variant::Standard, theta)?;
            let bits: Vec<u8> = if input.is_empty() {
                vec![0; circ.qubit_count]
            } else {
                input.bytes().map(|b| b - b'0').collect()
            };
            let native = mpqw::decompose_to_native(&circ, theta, 0.05, 64)?;
            let outcome = harness::run_circuit_sim(
                &layout, &native, &m, statistics, &bits, tol, theta, cap,
            )?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
            Ok(true)
        }
        Command::VerifyTruncation { seed, trials } => {
            let report = verify_truncation_experiment(seed, trials);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.passed())
        }
        Command::ExportDot { graph, out } => {
            let text = std::fs::read_to_string(graph)?;
            let gadget = GraphJson::parse(&text)?.to_gadget()?;
            let dot = to_dot(&gadget.graph, &gadget.inputs, &gadget.outputs, "gadget");
            write_or_print(&out, &dot)?;
            Ok(true)
        }
    }
}

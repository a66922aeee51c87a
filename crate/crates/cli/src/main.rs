use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use mcsv::bench::{oracle_disagreements, run_suite, summary_to_tsv, write_report, SuiteConfig};
use mcsv::generators::{generate, GenSpec, Generated, Series, DEFAULT_SEED};
use mcsv::modelgen::{emit_model, parse_solver_solution};
use mcsv::quantize::{quantize_real, QuantizationSpec};
use mcsv::reductions::{certify, parse_x3c};
use mcsv::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "mcsv", version, about = "Maximum cardinality subset of vectors toolkit")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve an instance exactly with the dynamic program.
    Solve {
        instance: PathBuf,
        /// Cross-check against brute-force enumeration (small N only).
        #[arg(long)]
        oracle: bool,
        /// Write per-layer sizes and timings to this file.
        #[arg(long)]
        stats: Option<PathBuf>,
        #[arg(long)]
        max_states: Option<u64>,
        #[arg(long)]
        dense_cell_limit: Option<u64>,
        #[arg(long)]
        timeout_ms: Option<u64>,
    },
    /// Generate a seeded instance.
    Gen {
        #[arg(long)]
        series: Series,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        alpha: Option<Alpha>,
        /// Quantize real-valued series at this scale instead of writing reals.
        #[arg(long)]
        scale: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Reduce an exact-cover-by-3-sets instance and label it with the true answer.
    ReduceX3c {
        x3c: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the quadratic binary model of an instance in LP format.
    EmitModel {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate an external solver's assignment against an instance.
    CheckSolution { instance: PathBuf, solution: PathBuf },
    /// Run a benchmark suite described by a TOML file.
    Bench {
        config: PathBuf,
        #[arg(long, default_value = "bench_out")]
        out: PathBuf,
    },
    /// Convert a real-valued instance to integers.
    Quantize {
        real: PathBuf,
        #[arg(long, default_value_t = 100)]
        scale: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

fn outcome_json(out: &SolveOutcome) -> Value {
    match out.solution() {
        Some(s) => json!({
            "feasible": true,
            "cardinality": s.cardinality(),
            "indices": s.indices(),
            "sum": s.sum(),
        }),
        None => json!({ "feasible": false, "cardinality": 0 }),
    }
}

fn outcome_text(out: &SolveOutcome) -> String {
    match out.solution() {
        Some(s) => format!(
            "feasible {}\nindices {}\nsum {}\n",
            s.cardinality(),
            join(s.indices()),
            join(s.sum())
        ),
        None => "infeasible\n".to_string(),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Solve {
            instance,
            oracle,
            stats,
            max_states,
            dense_cell_limit,
            timeout_ms,
        } => {
            let inst = parse_instance(&read(&instance)?)?;
            let mut opts = DpOptions::default();
            if let Some(m) = max_states {
                opts.max_states = m;
            }
            if let Some(m) = dense_cell_limit {
                opts.dense_cell_limit = m;
            }
            if let Some(t) = timeout_ms {
                opts = opts.with_timeout(Duration::from_millis(t));
            }
            let (out, st) = dp_solve_with(&inst, &opts)?;
            if let Some(p) = stats {
                fs::write(p, st.report())?;
            }
            let checked = if oracle {
                let o = brute_solve(&inst)?;
                Some((o.is_feasible() == out.is_feasible() && o.cardinality() == out.cardinality(), o))
            } else {
                None
            };
            if json {
                let mut v = outcome_json(&out);
                v["peak_states"] = json!(st.peak_states);
                v["layer_sizes"] = json!(st.layer_sizes);
                if let Some((agree, o)) = &checked {
                    v["oracle"] = json!({ "cardinality": o.cardinality(), "agrees": agree });
                }
                println!("{v}");
            } else {
                print!("{}", outcome_text(&out));
                println!("peak_states {}", st.peak_states);
                println!("layer_sizes {}", join(&st.layer_sizes));
                if let Some((agree, o)) = &checked {
                    println!("oracle {} {}", o.cardinality(), if *agree { "agrees" } else { "DISAGREES" });
                }
            }
            if checked.is_some_and(|(agree, _)| !agree) {
                return Err(Error::Solution("dynamic program and oracle disagree".into()));
            }
            Ok(if out.is_feasible() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Gen {
            series,
            seed,
            n,
            q,
            alpha,
            scale,
            output,
        } => {
            let mut spec = GenSpec::new(series, seed);
            if let Some(n) = n {
                spec.n = n;
            }
            if let Some(q) = q {
                spec.q = q;
            }
            if let Some(a) = alpha {
                spec.alpha = a;
            }
            let text = match (generate(&spec)?, scale) {
                (Generated::Integer(i), _) => write_instance(&i),
                (Generated::Real(r), None) => write_real(&r),
                (Generated::Real(r), Some(s)) => write_instance(&quantize_real(&r, QuantizationSpec::new(s)?)?),
            };
            emit(&output, &text)?;
            if json {
                eprintln!("{}", json!({ "series": series.name(), "seed": seed, "n": spec.n, "q": spec.q }));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::ReduceX3c { x3c, output } => {
            let cert = certify(&parse_x3c(&read(&x3c)?)?)?;
            emit(&output, &cert.to_text())?;
            if json {
                let v = json!({ "truth": cert.truth, "cover": cert.cover, "n": cert.mcsv.len(), "q": cert.mcsv.dim() });
                if output.is_some() {
                    println!("{v}");
                } else {
                    eprintln!("{v}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::EmitModel { instance, output } => {
            let inst = parse_instance(&read(&instance)?)?;
            emit(&output, &emit_model(&inst).text)?;
            if json && output.is_some() {
                println!("{}", json!({ "variables": inst.len() }));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::CheckSolution { instance, solution } => {
            let inst = parse_instance(&read(&instance)?)?;
            let out = parse_solver_solution(&read(&solution)?, &inst)?;
            let best = dp_solve(&inst)?.0.cardinality();
            let optimal = out.cardinality() == best;
            if json {
                let mut v = outcome_json(&out);
                v["optimal"] = json!(optimal);
                v["dp_cardinality"] = json!(best);
                println!("{v}");
            } else {
                print!("{}", outcome_text(&out));
                println!("dp_cardinality {best}");
                println!("{}", if optimal { "optimal" } else { "suboptimal" });
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Bench { config, out } => {
            let cfg = SuiteConfig::parse(&read(&config)?)?;
            let specs = cfg.specs()?;
            let report = run_suite(&specs, &cfg.bench_config(Some(&out))?)?;
            let paths = write_report(&out, &report)?;
            if json {
                println!(
                    "{}",
                    json!({
                        "records": report.records.len(),
                        "files": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                    })
                );
            } else {
                print!("{}", summary_to_tsv(&report.summary));
            }
            let bad = oracle_disagreements(&report.records);
            if !bad.is_empty() {
                return Err(Error::Solution(format!(
                    "{} records disagree with the oracle, first {}",
                    bad.len(),
                    bad[0].instance_id
                )));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Quantize { real, scale, output } => {
            let inst = quantize_real(&parse_real(&read(&real)?)?, QuantizationSpec::new(scale)?)?;
            emit(&output, &write_instance(&inst))?;
            if json && output.is_some() {
                println!("{}", json!({ "n": inst.len(), "q": inst.dim(), "bound": inst.bound() }));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if json {
                eprintln!("{}", json!({ "error": e.to_string() }));
            } else {
                eprintln!("mcsv: {e}");
            }
            ExitCode::from(2)
        }
    }
}

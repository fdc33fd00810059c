//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 when a checked property is violated, could
//! not be certified, or a suite reports incorrect verdicts, 2 on usage and
//! input-parse errors. Diagnostics go to stderr; machine-readable output
//! goes to stdout or the requested files.

use arrabs::analysis::{array_inventory, loop_facts};
use arrabs::bmc::BmcConfig;
use arrabs::generator::{gen_program, GenLimits, GenProfile};
use arrabs::interp::{run_original, RunStatus};
use arrabs::oracle::{
    check_precision_empirical, check_represents, check_soundness, DiffVerdict, OracleOpts,
    RepresentsMode, VerdictStatus,
};
use arrabs::parser::parse;
use arrabs::precision::classify_precision;
use arrabs::printer::{emit, emit_with, EmitConfig};
use arrabs::suite::{parse_manifest, run_suite, SuiteConfig};
use arrabs::transform::{transform_program, TransformConfig};
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "arrabs",
    version,
    about = "Rewrites array-manipulating programs into array-free, loop-free form for bounded model checking"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rewrite a program and print or write the result.
    Transform {
        input: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Name to print for nd() calls.
        #[arg(long, default_value = "nd")]
        nd_call: String,
        /// Name to print for nd(l,u) calls; defaults to the nd() name.
        #[arg(long)]
        nd_range_call: Option<String>,
        /// Write the per-rule application counts as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        int_width: u32,
    },
    /// Dump loop facts and the precision classification.
    Facts {
        input: PathBuf,
        /// Emit one machine-readable JSON document instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// Check a differential property of the transformation concretely.
    Oracle {
        #[arg(value_enum)]
        property: PropertyArg,
        /// Program file; omit it and pass --seed to check a generated
        /// program instead.
        input: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Enumeration cap (total transformed executions).
        #[arg(long, default_value_t = 100_000)]
        cap: u64,
        /// Step budget for concrete runs.
        #[arg(long, default_value_t = 200_000)]
        fuel: u64,
        /// Represents mode: require agreement on havocked locations too.
        #[arg(long)]
        strict: bool,
        /// Write counterexamples (program + nd assignment) here.
        #[arg(long)]
        cex_dir: Option<PathBuf>,
    },
    /// Transform and verify a directory of programs with an external
    /// checker, aggregating result categories.
    Suite {
        dir: PathBuf,
        /// Checker command with a {file} placeholder; falls back to the
        /// ARRABS_BMC environment variable, then to `cbmc {file}`.
        #[arg(long)]
        bmc: Option<String>,
        #[arg(long, default_value_t = 30)]
        timeout: u64,
        /// Two-column expectation manifest: `<name> safe|unsafe`.
        #[arg(long)]
        expect: Option<PathBuf>,
        /// Write the CSV report here (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        json_out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Use recorded tool runs from this directory instead of running
        /// the tool.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Record tool runs into this directory.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Generate seeded random programs.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory to write the programs into.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ProfileArg::Mixed)]
        profile: ProfileArg,
        /// Also write an expectation manifest derived from concrete runs.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        max_array_size: i64,
        #[arg(long, default_value_t = 4)]
        max_loop_bound: i64,
        #[arg(long, default_value_t = 3)]
        max_const: i64,
        #[arg(long, default_value_t = 12)]
        max_stmts: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Soundness,
    Precision,
    Represents,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Mixed,
    Safe,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load_program(path: &Path) -> Result<arrabs::Program, String> {
    let source =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse(&source).map_err(|diags| {
        let mut msg = format!("{} does not parse:", path.display());
        for d in diags.iter().take(5) {
            msg.push_str(&format!("\n  {d}"));
        }
        msg
    })
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Cmd::Transform {
            input,
            output,
            nd_call,
            nd_range_call,
            report,
            int_width,
        } => {
            let program = load_program(&input)?;
            let config = TransformConfig { int_width };
            let (transformed, trace) =
                transform_program(&program, &config).map_err(|e| e.to_string())?;
            let emit_config = EmitConfig::with_names(
                &nd_call,
                nd_range_call.as_deref().unwrap_or(&nd_call),
            );
            let text = emit_with(&transformed, &emit_config);
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => print!("{text}"),
            }
            if let Some(path) = report {
                let json = serde_json::to_string_pretty(&trace).expect("report serializes");
                std::fs::write(&path, json)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Facts { input, json } => {
            let program = load_program(&input)?;
            let arrays = array_inventory(&program);
            let loops = loop_facts(&program);
            let precision = classify_precision(&program);
            if json {
                let doc = serde_json::json!({
                    "arrays": arrays,
                    "loops": loops,
                    "precision": precision,
                });
                println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
            } else {
                for a in &arrays {
                    let elem = match &a.elem {
                        arrabs::ast::ElemType::Scalar(t) => t.to_string(),
                        arrabs::ast::ElemType::Record(tag) => format!("struct {tag}"),
                    };
                    println!("array: name={} size={} elem={}", a.name, a.size, elem);
                }
                for l in &loops {
                    let bounds = l
                        .bounds
                        .map(|(lo, hi)| format!("lower={lo} upper={hi}"))
                        .unwrap_or_else(|| "lower=? upper=?".to_string());
                    println!(
                        "loop: span={} iterator={} {} full={} defs_scalars={} defs_arrays={}",
                        l.span,
                        l.iterator,
                        bounds,
                        join_or_dash(&l.full_access),
                        join_or_dash(&l.defs.scalars.iter().cloned().collect::<Vec<_>>()),
                        join_or_dash(&l.defs.arrays.iter().cloned().collect::<Vec<_>>()),
                    );
                }
                for a in &precision.asserts {
                    println!(
                        "assert: span={} ordinal={} in_loop={} qualifies={} relaxed={} violated={} contributing={}",
                        a.span,
                        a.ordinal,
                        a.in_loop,
                        a.qualifies,
                        a.relaxation_applied,
                        join_or_dash(
                            &a.violated.iter().map(|r| r.to_string()).collect::<Vec<_>>()
                        ),
                        join_or_dash(
                            &a.contributing_loops
                                .iter()
                                .map(|s| s.to_string())
                                .collect::<Vec<_>>()
                        ),
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Cmd::Oracle {
            property,
            input,
            seed,
            cap,
            fuel,
            strict,
            cex_dir,
        } => {
            let program = match (&input, seed) {
                (Some(path), _) => load_program(path)?,
                (None, Some(seed)) => gen_program(&GenLimits::with_seed(seed)),
                (None, None) => {
                    return Err("pass a program file or --seed".to_string());
                }
            };
            let opts = OracleOpts {
                fuel,
                exec_cap: cap,
                ..OracleOpts::default()
            };
            let verdict = match property {
                PropertyArg::Soundness => check_soundness(&program, &opts),
                PropertyArg::Precision => check_precision_empirical(&program, &opts),
                PropertyArg::Represents => check_represents(
                    &program,
                    &opts,
                    if strict {
                        RepresentsMode::Strict
                    } else {
                        RepresentsMode::Exempting
                    },
                ),
            };
            report_verdict(&verdict, cex_dir.as_deref())?;
            Ok(match verdict.status {
                VerdictStatus::Holds | VerdictStatus::OutOfClass => ExitCode::SUCCESS,
                VerdictStatus::Violated | VerdictStatus::Inconclusive => ExitCode::from(1),
            })
        }

        Cmd::Suite {
            dir,
            bmc,
            timeout,
            expect,
            out,
            json_out,
            jobs,
            replay,
            record,
        } => {
            let mut bmc_config = bmc
                .map(|cmd| BmcConfig::from_command(&cmd, timeout))
                .or_else(BmcConfig::from_env)
                .unwrap_or_default();
            bmc_config.timeout_secs = timeout;
            let mut config = SuiteConfig {
                bmc: bmc_config,
                replay_dir: replay,
                record_dir: record,
                ..SuiteConfig::default()
            };
            if let Some(j) = jobs {
                config.jobs = j.max(1);
            }
            let expectations = match expect {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                    parse_manifest(&text)
                }
                None => Default::default(),
            };
            let report = run_suite(&dir, &config, &expectations)
                .map_err(|e| format!("cannot read {}: {e}", dir.display()))?;
            let csv = report.csv();
            match out {
                Some(path) => std::fs::write(&path, &csv)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
                None => print!("{csv}"),
            }
            if let Some(path) = json_out {
                let json = serde_json::to_string_pretty(&report).expect("report serializes");
                std::fs::write(&path, json)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            let c = &report.counts;
            eprintln!(
                "programs={} correct-true={} correct-false={} incorrect-true={} incorrect-false={} no-result={}",
                c.programs,
                c.correct_true,
                c.correct_false,
                c.incorrect_true,
                c.incorrect_false,
                c.no_result
            );
            Ok(if c.incorrect_true + c.incorrect_false > 0 {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }

        Cmd::Gen {
            seed,
            out,
            count,
            profile,
            manifest,
            max_array_size,
            max_loop_bound,
            max_const,
            max_stmts,
        } => {
            std::fs::create_dir_all(&out)
                .map_err(|e| format!("cannot create {}: {e}", out.display()))?;
            let mut manifest_lines = String::new();
            for k in 0..count {
                let limits = GenLimits {
                    seed: seed + k as u64,
                    max_array_size,
                    max_loop_bound,
                    max_const,
                    max_stmts,
                    profile: match profile {
                        ProfileArg::Mixed => GenProfile::Mixed,
                        ProfileArg::Safe => GenProfile::SafeInvariants,
                    },
                    ..GenLimits::default()
                };
                let program = gen_program(&limits);
                let name = format!("gen_{:06}.c", seed + k as u64);
                std::fs::write(out.join(&name), emit(&program))
                    .map_err(|e| format!("cannot write {name}: {e}"))?;
                if manifest.is_some() {
                    match run_original(&program, 1_000_000).status {
                        RunStatus::AllPass => {
                            manifest_lines.push_str(&format!("{name} safe\n"));
                        }
                        RunStatus::AssertFailed { .. } => {
                            manifest_lines.push_str(&format!("{name} unsafe\n"));
                        }
                        RunStatus::Inconclusive { .. } => {}
                    }
                }
            }
            if let Some(path) = manifest {
                std::fs::write(&path, manifest_lines)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn join_or_dash(items: &[String]) -> String {
    if items.is_empty() {
        "-".to_string()
    } else {
        items.join(",")
    }
}

fn report_verdict(verdict: &DiffVerdict, cex_dir: Option<&Path>) -> Result<(), String> {
    println!(
        "{}",
        serde_json::to_string_pretty(verdict).expect("verdict serializes")
    );
    eprintln!("{:?}: {:?} — {}", verdict.property, verdict.status, verdict.detail);
    if let (Some(dir), Some(cex)) = (cex_dir, &verdict.counterexample) {
        std::fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
        std::fs::write(dir.join("original.c"), &cex.original_source)
            .map_err(|e| e.to_string())?;
        std::fs::write(dir.join("transformed.c"), &cex.transformed_source)
            .map_err(|e| e.to_string())?;
        let assignment = serde_json::json!({
            "nd_assignment": cex.nd_assignment,
            "array_default": cex.array_default,
            "witness_value_vars": cex.witness_value_vars,
            "detail": cex.detail,
        });
        std::fs::write(
            dir.join("assignment.json"),
            serde_json::to_string_pretty(&assignment).expect("serializes"),
        )
        .map_err(|e| e.to_string())?;
        eprintln!("counterexample written to {}", dir.display());
    }
    Ok(())
}

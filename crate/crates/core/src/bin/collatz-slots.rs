//! Command-line surface. Every subcommand emits a single structured
//! report document (JSON with stable key names); `--format csv` is
//! offered for element lists only. Exit codes: 0 success, 1 mathematical
//! verification failure, 2 usage error, 3 orbit cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use collatz_slots::io::{
    read_checkpoint, read_levelset, write_checkpoint, write_levelset, ReportDocument,
};
use collatz_slots::levels::{self, LevelSet};
use collatz_slots::orbit::{trajectory, DEFAULT_CAP};
use collatz_slots::scan::{scan_min_sigma, MinEntry, ScanDomain, ScanMode};
use collatz_slots::slots::{check_slot_conditions, slot_bounds};
use collatz_slots::steadiness::{
    identity_with, sigma_literal, sigma_telescoping, IdentityVerdict, SteadinessValue,
};
use collatz_slots::verify::{random_identity_check, run_suites};
use collatz_slots::{
    assign_and_verify, clusters_by_gap, clusters_by_kappa, compare_partitions, level_stats,
    Error, ExactRatio,
};

const CACHE_DIR_ENV: &str = "COLLATZ_SLOTS_CACHE_DIR";

#[derive(Parser)]
#[command(name = "collatz-slots", version, about = "Collatz level sets, orbit steadiness, and slot/cluster structure", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Literal,
    Telescoping,
    Both,
}

impl ModeArg {
    fn scan_mode(self) -> ScanMode {
        match self {
            ModeArg::Literal => ScanMode::Literal,
            ModeArg::Telescoping => ScanMode::Telescoping,
            ModeArg::Both => ScanMode::Both,
        }
    }

    fn as_str(self) -> &'static str {
        self.scan_mode().as_str()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Report,
    Csv,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the report (or CSV) here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; csv is available for element lists only.
    #[arg(long, value_enum, default_value = "report")]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// Generate level sets L_0..L_nu and report cardinalities.
    Levels {
        #[arg(long)]
        nu: u32,
        /// Include count/min/max and the kappa histogram of L_nu.
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exact orbit steadiness of a single n, in both variants.
    Sigma {
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Running-minimum steadiness scan (sigma_0 estimate). The domain is
    /// n in [1, --n] (integer mode, tree membership tested per input) or
    /// the elements of L_0..L_--nu (level mode).
    Sigma0 {
        /// Upper end of the integer scan range [1, n].
        #[arg(long, conflicts_with = "nu")]
        n: Option<String>,
        /// Level-range mode: scan the elements of L_0..L_nu.
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Checkpoint file to write (and to resume from with --resume).
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from the checkpoint file instead of starting fresh.
        #[arg(long, requires = "checkpoint")]
        resume: bool,
        /// Worker threads; 1 is the sequential reference every other
        /// count must match bit-exactly.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Slot assignment and containment verdict for L_nu.
    Slots {
        #[arg(long)]
        nu: u32,
        /// Exact sigma_0 as <num>/<den>; defaults to the scanned literal
        /// minimum over L_0..L_nu.
        #[arg(long)]
        sigma0: Option<String>,
        /// Also write (kappa, slot bounds) plot records next to --out.
        #[arg(long)]
        emit_plot_data: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Cluster detection on L_nu, by kappa and by gap, cross-validated.
    Clusters {
        #[arg(long)]
        nu: u32,
        /// Gap threshold as <num>/<den>; a new cluster starts when an
        /// element exceeds factor times its predecessor.
        #[arg(long, default_value = "5/2")]
        gap_factor: String,
        /// Also write (element, cluster index) plot records next to --out.
        #[arg(long)]
        emit_plot_data: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Run the invariant suites over L_0..L_nu.
    Verify {
        #[arg(long, default_value_t = 25)]
        nu: u32,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Seed for the randomized identity check (echoed in the report).
        #[arg(long, default_value_t = 20201220)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::OrbitCapExceeded { .. } => ExitCode::from(3),
                Error::VerificationFailed(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn parse_biguint(s: &str) -> Result<BigUint, Error> {
    BigUint::from_str(s).map_err(|_| Error::InvalidInput(format!("not a positive integer: {s:?}")))
}

fn sigma_json(v: &SteadinessValue) -> Value {
    json!({
        "num": v.exact.num().to_string(),
        "den": v.exact.den().to_string(),
        "log2_approx": v.log2_approx,
        "value_approx": v.exact.to_f64(),
    })
}

fn min_entry_json(entry: &Option<MinEntry>) -> Value {
    match entry {
        Some(e) => json!({
            "num": e.value.num().to_string(),
            "den": e.value.den().to_string(),
            "value_approx": e.value.to_f64(),
            "log2_approx": e.log2_approx,
            "argmin": e.argmin.to_string(),
        }),
        None => Value::Null,
    }
}

fn emit(doc: &ReportDocument, out: Option<&Path>) -> Result<(), Error> {
    let text = doc.to_json();
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

/// Loads L_nu from the cache directory when `COLLATZ_SLOTS_CACHE_DIR`
/// is set (populating it on a miss), otherwise generates it.
fn load_level(nu: u32) -> Result<(LevelSet, Option<PathBuf>), Error> {
    match std::env::var_os(CACHE_DIR_ENV) {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            fs::create_dir_all(&dir)?;
            let path = dir.join(format!("L{nu}.levelset"));
            if path.exists() {
                let level = read_levelset(&path)?;
                if level.nu != nu {
                    return Err(Error::Integrity(format!(
                        "cache file {} holds level {}, expected {nu}",
                        path.display(),
                        level.nu
                    )));
                }
                Ok((level, Some(path)))
            } else {
                let level = levels::level(nu);
                write_levelset(&level, &path)?;
                Ok((level, Some(path)))
            }
        }
        None => Ok((levels::level(nu), None)),
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    let started = Instant::now();
    match command {
        Command::Levels { nu, stats, output } => {
            let mut doc = ReportDocument::new(
                "levels",
                json!({"nu": nu, "stats": stats, "format": if output.format == FormatArg::Csv {"csv"} else {"report"}}),
            );
            let mut cardinalities = Vec::new();
            let mut last: Option<LevelSet> = None;
            levels::generate_levels(nu, |l| {
                cardinalities.push(l.len() as u64);
                if l.nu == nu {
                    last = Some(l.clone());
                }
                Ok(())
            })?;
            let level = last.expect("nu level emitted");
            if output.format == FormatArg::Csv {
                let mut csv = String::from("element\n");
                for e in &level.elements {
                    csv.push_str(&e.to_string());
                    csv.push('\n');
                }
                match &output.out {
                    Some(path) => fs::write(path, csv)?,
                    None => print!("{csv}"),
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut results = json!({
                "nu": nu,
                "cardinalities": cardinalities,
                "count": level.len() as u64,
            });
            if stats {
                let s = level_stats(&level)?;
                let histogram: serde_json::Map<String, Value> = s
                    .kappa_histogram
                    .iter()
                    .map(|(k, v)| (k.to_string(), json!(v)))
                    .collect();
                results["min"] = json!(s.min.to_string());
                results["max"] = json!(s.max.to_string());
                results["kappa_histogram"] = Value::Object(histogram);
            }
            doc.results = results;
            doc.timing_ms = started.elapsed().as_millis() as u64;
            emit(&doc, output.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Sigma { n, mode, cap, output } => {
            let n = parse_biguint(&n)?;
            let rec = trajectory(&n, cap)?;
            let mut doc = ReportDocument::new(
                "sigma",
                json!({"n": n.to_string(), "mode": mode.as_str(), "cap": cap}),
            );
            let mut results = json!({
                "n": n.to_string(),
                "nu": rec.nu,
                "kappa": rec.kappa,
            });
            let literal = sigma_literal(&rec);
            let telescoping = sigma_telescoping(&rec);
            if mode != ModeArg::Telescoping {
                results["literal"] = sigma_json(&literal);
            }
            if mode != ModeArg::Literal {
                results["telescoping"] = sigma_json(&telescoping);
                let verdict = identity_with(&rec, &telescoping.exact);
                results["identity_telescoping"] = json!(verdict.holds());
            }
            if mode == ModeArg::Both {
                match identity_with(&rec, &literal.exact) {
                    IdentityVerdict::Holds => {
                        results["identity_literal"] = json!(true);
                    }
                    IdentityVerdict::Fails { lhs, rhs } => {
                        results["identity_literal"] = json!(false);
                        doc.warnings.push(format!(
                            "the literal steadiness does not satisfy n = (2^nu/6^kappa)*sigma for n = {n} \
                             (cross-multiplied sides {lhs} != {rhs}); the telescoping product does. \
                             The two definitions differ on orbit elements = 4 (mod 6) entered by halving, \
                             including the cycle element 4."
                        ));
                    }
                }
            }
            doc.results = results;
            doc.timing_ms = started.elapsed().as_millis() as u64;
            emit(&doc, output.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Sigma0 {
            n,
            nu,
            mode,
            cap,
            checkpoint,
            resume,
            workers,
            output,
        } => {
            let domain = match (&n, nu) {
                (Some(n), None) => ScanDomain::Integers {
                    lo: BigUint::from(1u32),
                    hi: parse_biguint(n)?,
                },
                (None, Some(nu)) => ScanDomain::Levels { nu_max: nu },
                _ => {
                    return Err(Error::InvalidInput(
                        "sigma0 requires exactly one of --n (integer range) or --nu (level range)"
                            .into(),
                    ))
                }
            };
            let checkpoint_in = if resume {
                let path = checkpoint.as_ref().expect("clap requires");
                Some(read_checkpoint(path)?)
            } else {
                None
            };
            let cp = scan_min_sigma(&domain, mode.scan_mode(), cap, checkpoint_in.as_ref(), workers)?;
            if let Some(path) = &checkpoint {
                write_checkpoint(&cp, path)?;
            }
            let mut doc = ReportDocument::new(
                "sigma0",
                json!({
                    "n": n,
                    "nu": nu,
                    "mode": mode.as_str(),
                    "cap": cap,
                    "workers": workers,
                    "resume": resume,
                    "checkpoint": checkpoint.as_ref().map(|p| p.display().to_string()),
                }),
            );
            doc.results = json!({
                "domain": serde_json::to_value(&cp.domain).expect("domain serializes"),
                "mode": cp.mode.as_str(),
                "processed_count": cp.processed_count,
                "skipped_cap_exceeded_count": cp.skipped_cap_exceeded.len(),
                "min_literal": min_entry_json(&cp.min_literal),
                "min_telescoping": min_entry_json(&cp.min_telescoping),
            });
            if mode == ModeArg::Both {
                doc.warnings.push(
                    "literal and telescoping steadiness are different functions with different \
                     minima; both are reported and neither is assumed to be 0.5152."
                        .into(),
                );
            }
            doc.timing_ms = started.elapsed().as_millis() as u64;
            emit(&doc, output.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Slots {
            nu,
            sigma0,
            emit_plot_data,
            output,
        } => {
            let (level, cache_file) = load_level(nu)?;
            let sigma0 = match sigma0 {
                Some(s) => ExactRatio::from_str(&s)?,
                None => {
                    // Scanned literal minimum over the elements of L_0..L_nu.
                    let cp = scan_min_sigma(
                        &ScanDomain::Levels { nu_max: nu },
                        ScanMode::Literal,
                        DEFAULT_CAP,
                        None,
                        1,
                    )?;
                    cp.min_literal.expect("level domains are non-empty").value
                }
            };
            let assignment = assign_and_verify(&level, &sigma0)?;
            let conditions = check_slot_conditions(&sigma0)?;
            let kappa_max = assignment.entries.iter().map(|e| e.kappa).max().unwrap_or(0);
            let slots: Vec<Value> = (0..=kappa_max as u32)
                .map(|kappa| {
                    let slot = slot_bounds(nu, kappa, &sigma0)?;
                    Ok(json!({
                        "kappa": kappa,
                        "lower": slot.lower.to_string(),
                        "upper": slot.upper.to_string(),
                        "lower_approx": slot.lower.to_f64(),
                        "upper_approx": slot.upper.to_f64(),
                    }))
                })
                .collect::<Result<_, Error>>()?;
            let violations: Vec<String> = assignment
                .entries
                .iter()
                .filter(|e| !e.in_slot)
                .map(|e| e.n.to_string())
                .collect();
            let mut doc = ReportDocument::new(
                "slots",
                json!({"nu": nu, "sigma0": sigma0.to_string(), "emit_plot_data": emit_plot_data}),
            );
            doc.results = json!({
                "nu": nu,
                "sigma0": {"num": sigma0.num().to_string(), "den": sigma0.den().to_string()},
                "contained": assignment.contained,
                "conditions": {"disjoint": conditions.disjoint, "separated": conditions.separated},
                "element_count": assignment.entries.len(),
                "violations": violations,
                "slots": slots,
                "cache_file": cache_file.map(|p| p.display().to_string()),
            });
            doc.timing_ms = started.elapsed().as_millis() as u64;
            if emit_plot_data {
                let plot_path = plot_path(output.out.as_deref(), "slots")?;
                let mut csv = String::from("kappa,lower,upper\n");
                for (kappa, entry) in (0..=kappa_max).zip(slots_iter(&doc.results)) {
                    csv.push_str(&format!("{kappa},{},{}\n", entry.0, entry.1));
                }
                fs::write(plot_path, csv)?;
            }
            emit(&doc, output.out.as_deref())?;
            if assignment.contained {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!(
                    "containment violated for L_{nu} at sigma0 = {}",
                    doc.options["sigma0"].as_str().unwrap_or_default()
                );
                Ok(ExitCode::from(1))
            }
        }

        Command::Clusters {
            nu,
            gap_factor,
            emit_plot_data,
            output,
        } => {
            let factor = ExactRatio::from_str(&gap_factor)?;
            let (level, _) = load_level(nu)?;
            let by_kappa = clusters_by_kappa(&level)?;
            let by_gap = clusters_by_gap(&level, &factor)?;
            let comparison = compare_partitions(&by_kappa, &by_gap)?;
            let mut doc = ReportDocument::new(
                "clusters",
                json!({"nu": nu, "gap_factor": factor.to_string(), "emit_plot_data": emit_plot_data}),
            );
            doc.results = json!({
                "nu": nu,
                "by_kappa_sizes": by_kappa.sizes(),
                "by_gap_sizes": by_gap.sizes(),
                "partitions_equal": comparison.equal,
                "first_difference": comparison.first_difference,
                "interleaved": by_kappa.interleaved,
                "clusters": by_gap
                    .clusters
                    .iter()
                    .map(|c| c.iter().map(|e| e.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            });
            if by_kappa.interleaved {
                doc.warnings.push(format!(
                    "kappa groups of L_{nu} interleave in value order; the cluster pattern is \
                     dissolving at this level"
                ));
            }
            doc.timing_ms = started.elapsed().as_millis() as u64;
            if emit_plot_data {
                let plot_path = plot_path(output.out.as_deref(), "clusters")?;
                let mut csv = String::from("element,cluster\n");
                for (idx, cluster) in by_gap.clusters.iter().enumerate() {
                    for e in cluster {
                        csv.push_str(&format!("{e},{idx}\n"));
                    }
                }
                fs::write(plot_path, csv)?;
            }
            emit(&doc, output.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify { nu, cap, seed, output } => {
            let summary = run_suites(nu, cap)?;
            let random = random_identity_check(1000, 1_000_000_000, seed, cap)?;
            let passed = summary.passed && random.passed;
            let mut doc = ReportDocument::new(
                "verify",
                json!({"nu": nu, "cap": cap, "seed": seed}),
            );
            let mut checks = summary.checks.clone();
            checks.push(random);
            doc.results = json!({
                "nu_max": nu,
                "passed": passed,
                "checks": serde_json::to_value(&checks).expect("checks serialize"),
                "seed": seed,
            });
            doc.timing_ms = started.elapsed().as_millis() as u64;
            emit(&doc, output.out.as_deref())?;
            if passed {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("verification failed; see report");
                Ok(ExitCode::from(1))
            }
        }
    }
}

/// Plot records go next to the report: `<out>.plot.csv`.
fn plot_path(out: Option<&Path>, kind: &str) -> Result<PathBuf, Error> {
    match out {
        Some(path) => {
            let mut name = path.as_os_str().to_os_string();
            name.push(".plot.csv");
            Ok(PathBuf::from(name))
        }
        None => Err(Error::InvalidInput(format!(
            "--emit-plot-data for {kind} requires --out to name the plot file"
        ))),
    }
}

fn slots_iter(results: &Value) -> Vec<(String, String)> {
    results["slots"]
        .as_array()
        .map(|arr| {
            arr.iter()
                .map(|s| {
                    (
                        s["lower"].as_str().unwrap_or_default().to_string(),
                        s["upper"].as_str().unwrap_or_default().to_string(),
                    )
                })
                .collect()
        })
        .unwrap_or_default()
}

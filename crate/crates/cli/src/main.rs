//! Batch front end: evaluate secrecy rates, run optimizations and SNR
//! sweeps, reproduce the bundled comparison table, and execute the
//! randomized property suites.
//!
//! Exit codes: 0 success/PASS, 1 usage or configuration error, 2 property or
//! acceptance FAIL.

mod io;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

use io::SummaryRow;
use wiretap_core::exec;
use wiretap_core::properties::{run_scope, Scope};
use wiretap_core::rates::{self, RateUnit};
use wiretap_core::signal::{self, ChannelPair};
use wiretap_core::solver::{
    maximize_general, maximize_proper, ConvergenceTrace, Method, PowerBudget, SolverConfig,
};

#[derive(Parser)]
#[command(name = "wiretap", version, about = "Secrecy-rate toolkit for complex MIMO wiretap channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the secrecy rate of a given covariance on a given channel.
    Rate {
        /// Channel JSON file with keys "H_r", "H_e" ([re, im] entry pairs)
        #[arg(long)]
        channel: PathBuf,
        /// Covariance JSON file with key "K" and optional "K_tilde"
        #[arg(long)]
        covariance: PathBuf,
        /// Output unit: nats or bits
        #[arg(long, default_value = "nats")]
        unit: String,
    },
    /// Run one covariance optimization and report the terminal rate.
    Optimize {
        #[arg(long, conflicts_with = "builtin")]
        channel: Option<PathBuf>,
        /// Use the bundled 2x2 example channel
        #[arg(long)]
        builtin: bool,
        /// SNR in dB (power recovered as P = 2 * 10^(SNR/10))
        #[arg(long, conflicts_with = "power")]
        snr_db: Option<f64>,
        /// Transmit power budget P (alternative to --snr-db)
        #[arg(long)]
        power: Option<f64>,
        /// Signaling mode: proper or general
        #[arg(long, default_value = "proper")]
        mode: String,
        /// Solver method: pg (projected gradient) or dc (DC iteration)
        #[arg(long, default_value = "pg")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Start from a seeded random feasible point
        #[arg(long)]
        random_start: bool,
        /// Stop when the per-iteration objective increase drops below this
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Write the per-iteration objective trace CSV here
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long, default_value = "nats")]
        unit: String,
    },
    /// Run a grid of (SNR, mode, seed) optimizations; write traces and a summary CSV.
    Sweep {
        #[arg(long, conflicts_with = "builtin")]
        channel: Option<PathBuf>,
        #[arg(long)]
        builtin: bool,
        /// SNR list in dB
        #[arg(long, num_args = 1.., required = true)]
        snr_db: Vec<f64>,
        /// Signaling mode: proper, general, or both
        #[arg(long, default_value = "both")]
        mode: String,
        #[arg(long, default_value = "pg")]
        method: String,
        #[arg(long, num_args = 1.., default_values_t = [0u64])]
        seeds: Vec<u64>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        /// Output directory for trace CSVs and summary.csv
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value = "nats")]
        unit: String,
    },
    /// Reproduce the bundled comparison experiment and print a PASS/FAIL verdict.
    ReproduceTable {
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Run the randomized identity/inequality suites.
    CheckProperties {
        /// Restrict to one suite (e.g. determinant-inequality, dominance)
        #[arg(long)]
        scope: Option<String>,
        /// Instances per suite (defaults to each suite's standard count)
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Test hook: force one synthetic failure to exercise failure paths
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are success, not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn parse_unit(s: &str) -> Result<RateUnit, String> {
    s.parse::<RateUnit>().map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse::<Method>().map_err(|e| e.to_string())
}

fn parse_modes(s: &str) -> Result<Vec<&'static str>, String> {
    match s {
        "proper" => Ok(vec!["proper"]),
        "general" => Ok(vec!["general"]),
        "both" => Ok(vec!["proper", "general"]),
        other => Err(format!("unknown mode '{other}' (expected proper, general, or both)")),
    }
}

fn resolve_channel(channel: &Option<PathBuf>, builtin: bool) -> Result<ChannelPair, String> {
    match (channel, builtin) {
        (Some(path), false) => io::load_channel(path),
        (None, true) => Ok(signal::reference_channel()),
        (None, false) => Err("provide --channel <file> or --builtin".into()),
        (Some(_), true) => unreachable!("clap conflicts_with"),
    }
}

fn resolve_budget(snr_db: Option<f64>, power: Option<f64>) -> Result<(PowerBudget, f64), String> {
    match (snr_db, power) {
        (Some(snr), None) => Ok((PowerBudget::from_snr_db(snr).map_err(|e| e.to_string())?, snr)),
        (None, Some(p)) => {
            let b = PowerBudget::new(p).map_err(|e| e.to_string())?;
            // report the equivalent SNR for the summary row
            Ok((b, 10.0 * (p / 2.0).log10()))
        }
        (None, None) => Err("provide --snr-db or --power".into()),
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
}

struct RunResult {
    rate_nats: f64,
    trace: ConvergenceTrace,
}

fn run_one(
    ch: &ChannelPair,
    mode: &str,
    budget: &PowerBudget,
    cfg: &SolverConfig,
) -> Result<RunResult, String> {
    match mode {
        "proper" => {
            let sol = maximize_proper(ch, budget, cfg).map_err(|e| e.to_string())?;
            Ok(RunResult { rate_nats: sol.rate.in_nats(), trace: sol.trace })
        }
        "general" => {
            let sol = maximize_general(ch, budget, cfg).map_err(|e| e.to_string())?;
            Ok(RunResult { rate_nats: sol.rate.in_nats(), trace: sol.trace })
        }
        other => Err(format!("unknown mode '{other}'")),
    }
}

fn in_unit(nats: f64, unit: RateUnit) -> f64 {
    rates::RateValue::nats(nats).in_unit(unit)
}

fn run(cmd: Cmd) -> Result<i32, String> {
    match cmd {
        Cmd::Rate { channel, covariance, unit } => {
            let unit = parse_unit(&unit)?;
            let ch = io::load_channel(&channel)?;
            let aug = io::load_covariance(&covariance)?;
            let general = rates::general_rate(&ch, &aug).map_err(|e| e.to_string())?;
            println!("general_rate,{:.12},{}", general.in_unit(unit), unit.label());
            if aug.is_proper(1e-12) {
                let proper = rates::proper_rate(&ch, aug.k()).map_err(|e| e.to_string())?;
                println!("proper_rate,{:.12},{}", proper.in_unit(unit), unit.label());
            }
            Ok(0)
        }
        Cmd::Optimize {
            channel,
            builtin,
            snr_db,
            power,
            mode,
            method,
            seed,
            random_start,
            tol,
            trace_out,
            unit,
        } => {
            let unit = parse_unit(&unit)?;
            let ch = resolve_channel(&channel, builtin)?;
            let (budget, snr) = resolve_budget(snr_db, power)?;
            let modes = parse_modes(&mode)?;
            if modes.len() != 1 {
                return Err("optimize takes a single mode (proper or general)".into());
            }
            let cfg = SolverConfig {
                method: parse_method(&method)?,
                tol_increase: tol,
                seed,
                random_start,
                ..Default::default()
            };
            let res = run_one(&ch, modes[0], &budget, &cfg)?;
            if let Some(path) = trace_out {
                std::fs::write(&path, io::trace_csv(&res.trace, unit))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            let row = SummaryRow {
                mode: modes[0].into(),
                solver: cfg.method.label().into(),
                snr_db: snr,
                rate: in_unit(res.rate_nats, unit),
                unit,
                iterations: res.trace.iterations(),
                converged: res.trace.converged,
            };
            println!("{}", io::SUMMARY_HEADER);
            println!("{}", row.csv_line());
            Ok(0)
        }
        Cmd::Sweep {
            channel,
            builtin,
            snr_db,
            mode,
            method,
            seeds,
            tol,
            out_dir,
            unit,
        } => {
            let unit = parse_unit(&unit)?;
            let ch = resolve_channel(&channel, builtin)?;
            let method = parse_method(&method)?;
            let modes = parse_modes(&mode)?;
            if snr_db.is_empty() {
                return Err("SNR list must be non-empty".into());
            }
            std::fs::create_dir_all(&out_dir)
                .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;
            let mut points = Vec::new();
            for &snr in &snr_db {
                for &m in &modes {
                    for &seed in &seeds {
                        points.push((snr, m, seed));
                    }
                }
            }
            // sweep points are independent; run them with the crate's
            // data-parallel map and write files afterwards
            let results: Vec<Result<(SummaryRow, PathBuf, String), String>> =
                exec::map_indexed(points.len(), |i| {
                    let (snr, m, seed) = points[i];
                    let budget = PowerBudget::from_snr_db(snr).map_err(|e| e.to_string())?;
                    let cfg = SolverConfig {
                        method,
                        tol_increase: tol,
                        seed,
                        random_start: seed != 0,
                        ..Default::default()
                    };
                    let res = run_one(&ch, m, &budget, &cfg)?;
                    let row = SummaryRow {
                        mode: m.into(),
                        solver: method.label().into(),
                        snr_db: snr,
                        rate: in_unit(res.rate_nats, unit),
                        unit,
                        iterations: res.trace.iterations(),
                        converged: res.trace.converged,
                    };
                    let name = format!("trace_{m}_{}_snr{snr}_seed{seed}.csv", method.label());
                    Ok((row, out_dir.join(name), io::trace_csv(&res.trace, unit)))
                });
            let mut rows = Vec::new();
            for r in results {
                let (row, path, csv) = r?;
                std::fs::write(&path, csv)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                rows.push(row);
            }
            let summary = io::summary_csv(&rows);
            std::fs::write(out_dir.join("summary.csv"), &summary)
                .map_err(|e| format!("cannot write summary.csv: {e}"))?;
            print!("{summary}");
            Ok(0)
        }
        Cmd::ReproduceTable { tol } => reproduce_table(tol),
        Cmd::CheckProperties { scope, instances, seed, inject_fault } => {
            let scopes: Vec<Scope> = match scope {
                Some(s) => vec![s.parse::<Scope>().map_err(|e| e.to_string())?],
                None => Scope::all().to_vec(),
            };
            let mut any_failed = false;
            for sc in scopes {
                let n = instances.unwrap_or_else(|| sc.default_instances());
                let rep = run_scope(sc, n, seed, inject_fault);
                let status = if rep.passed() { "PASS" } else { "FAIL" };
                println!(
                    "{:<24} instances={:<6} failures={:<4} worst_gap={:.3e}  {status}",
                    rep.name, rep.instances, rep.failures, rep.worst_gap
                );
                any_failed |= !rep.passed();
            }
            Ok(if any_failed { 2 } else { 0 })
        }
    }
}

/// Run both solver methods in both signaling modes at 6 and 12 dB on the
/// bundled channel, print the comparison table, resolve the reporting unit by
/// measurement against the reference values, and emit a PASS/FAIL verdict.
fn reproduce_table(tol: f64) -> Result<i32, String> {
    let ch = signal::reference_channel();
    let targets = [(6.0_f64, 1.936_f64), (12.0, 2.054)];
    let mut failures: Vec<String> = Vec::new();

    // eigenvalue check on the channel gap
    let gap = rates::degradedness(&ch);
    println!(
        "channel gap eigenvalues: min {:.4}, max {:.4} (reference -2.6117 / 4.7017)",
        gap.min_eig, gap.max_eig
    );
    if (gap.min_eig + 2.6117).abs() >= 1e-3 || (gap.max_eig - 4.7017).abs() >= 1e-3 {
        failures.push("channel gap eigenvalues outside 1e-3 of reference".into());
    }

    let mut rates_nats = Vec::new();
    println!("{}", io::SUMMARY_HEADER);
    for (snr, _) in targets {
        let budget = PowerBudget::from_snr_db(snr).map_err(|e| e.to_string())?;
        for method in [Method::ProjectedGradient, Method::DcIteration] {
            let cfg = SolverConfig { method, tol_increase: tol, ..Default::default() };
            for mode in ["proper", "general"] {
                let res = run_one(&ch, mode, &budget, &cfg)?;
                let row = SummaryRow {
                    mode: mode.into(),
                    solver: method.label().into(),
                    snr_db: snr,
                    rate: res.rate_nats,
                    unit: RateUnit::Nats,
                    iterations: res.trace.iterations(),
                    converged: res.trace.converged,
                };
                println!("{}", row.csv_line());
                rates_nats.push((snr, method, mode, res.rate_nats));
            }
        }
    }

    // unit resolution by measurement: compare one terminal value against the
    // reference in both candidate units and keep the one that matches
    let probe = rates_nats
        .iter()
        .find(|(snr, m, mode, _)| *snr == 6.0 && *m == Method::ProjectedGradient && *mode == "proper")
        .map(|&(_, _, _, r)| r)
        .expect("probe run present");
    let resolved = if (probe - 1.936).abs() < 5e-3 {
        Some(RateUnit::Nats)
    } else if (probe / std::f64::consts::LN_2 - 1.936).abs() < 5e-3 {
        Some(RateUnit::Bits)
    } else {
        None
    };
    match resolved {
        Some(u) => println!("resolved rate unit: {}", u.label()),
        None => failures.push(format!("terminal rate {probe:.6} matches neither unit")),
    }

    if let Some(unit) = resolved {
        for &(snr, method, mode, r) in &rates_nats {
            let value = in_unit(r, unit);
            let target = targets.iter().find(|(s, _)| *s == snr).unwrap().1;
            if (value - target).abs() >= 5e-3 {
                failures.push(format!(
                    "{mode}/{} at {snr} dB: {value:.6} vs reference {target}",
                    method.label()
                ));
            }
        }
        for (snr, _) in targets {
            for method in [Method::ProjectedGradient, Method::DcIteration] {
                let get = |mode: &str| {
                    rates_nats
                        .iter()
                        .find(|(s, m, md, _)| *s == snr && *m == method && *md == mode)
                        .map(|&(_, _, _, r)| r)
                        .unwrap()
                };
                let diff = (get("proper") - get("general")).abs();
                if diff > 1e-4 {
                    failures.push(format!(
                        "proper/general disagreement {diff:.2e} at {snr} dB ({})",
                        method.label()
                    ));
                }
            }
        }
    }

    if failures.is_empty() {
        println!("verdict: PASS");
        Ok(0)
    } else {
        for f in &failures {
            println!("violation: {f}");
        }
        println!("verdict: FAIL");
        Ok(2)
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mvba_core::harness::{fit, run_campaign, CampaignConfig, CampaignReport, Claim, Protocol, Scenario};
use mvba_core::netsim::{AdversaryKind, SchedulerKind};
use mvba_core::suites::{self, Suite};

/// Simulate asynchronous validated Byzantine agreement protocols.
#[derive(Parser)]
#[command(name = "mvba", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report.
    Run {
        #[arg(long)]
        protocol: Protocol,
        #[arg(long)]
        n: usize,
        /// Fault budget; defaults to the protocol's largest tolerated value.
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 1024)]
        msg_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "none")]
        adversary: AdversaryKind,
        #[arg(long, default_value = "random")]
        scheduler: SchedulerKind,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        #[arg(long)]
        step_limit: Option<u64>,
        /// Leaf group size of the tree (rmvba).
        #[arg(long)]
        leaf_size: Option<usize>,
        /// Commitment digest bits (hash).
        #[arg(long)]
        kappa: Option<usize>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-run table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run every scenario of a JSON configuration.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Fit a complexity claim against a report.
    Fit {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        claim: Claim,
    },
    /// Run a sub-protocol property suite over all adversaries and schedulers.
    Suite {
        #[arg(long)]
        name: String,
        /// Network sizes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "4,7,10,13")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            protocol,
            n,
            t,
            msg_size,
            seed,
            adversary,
            scheduler,
            runs,
            step_limit,
            leaf_size,
            kappa,
            out,
            csv,
        } => {
            let scenario = Scenario {
                seed,
                adversary,
                scheduler,
                runs,
                step_limit,
                leaf_size,
                kappa,
                ..Scenario::new(protocol, n, t.unwrap_or(protocol.max_faults(n)), msg_size)
            };
            let report = run_campaign(&[scenario])?;
            finish(&report, &out, csv.as_deref())
        }
        Command::Campaign { config, out, csv } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let config: CampaignConfig =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
            let scenarios = config.scenarios();
            if scenarios.is_empty() {
                bail!("configuration lists no scenarios");
            }
            let report = run_campaign(&scenarios)?;
            finish(&report, &out, csv.as_deref())
        }
        Command::Fit { report, claim } => {
            let text = fs::read_to_string(&report).with_context(|| format!("reading {}", report.display()))?;
            let report: CampaignReport = serde_json::from_str(&text)?;
            let f = fit(&report, claim)?;
            println!(
                "{}: c = {:.6}, relative residual = {:.4}",
                f.claim, f.coefficient, f.relative_residual
            );
            for (n, x, y) in &f.points {
                println!("  n={n:<4} expr={x:<14.1} measured={y:<14.1} ratio={:.4}", y / x);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Suite { name, sizes, seeds } => {
            let suite = Suite::ALL
                .into_iter()
                .find(|s| s.name() == name)
                .with_context(|| format!("unknown suite {name:?}"))?;
            let report = suites::campaign(suite, &sizes, seeds)?;
            println!(
                "{suite}: {} runs ({} with liveness asserted), {} violating, mean coins {:.2}",
                report.runs, report.live_runs, report.violating_runs, report.mean_coins
            );
            for e in &report.examples {
                eprintln!("violation: {e}");
            }
            Ok(if report.violating_runs == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn finish(report: &CampaignReport, out: &Path, csv: Option<&Path>) -> Result<ExitCode> {
    fs::write(out, report.to_json()).with_context(|| format!("writing {}", out.display()))?;
    if let Some(path) = csv {
        fs::write(path, report.to_csv()?).with_context(|| format!("writing {}", path.display()))?;
    }
    for a in &report.aggregates {
        let elections = a
            .mean_election_rounds
            .map(|e| format!(" election_rounds={e:.2}"))
            .unwrap_or_default();
        let chain = a
            .mean_chain_coins
            .map(|c| format!(" chain_coins={c:.1}"))
            .unwrap_or_default();
        println!(
            "{} n={} t={} runs={} bits={:.0} msgs={:.0} rounds={:.1} coins={:.1}{chain}{elections}",
            a.protocol, a.n, a.t, a.runs, a.mean_bits, a.mean_msgs, a.mean_rounds, a.mean_coins
        );
    }
    let lines = report.violation_lines();
    for l in &lines {
        eprintln!("violation: {l}");
    }
    if report.violations > 0 {
        eprintln!(
            "{} of {} runs violated a property",
            report.violations,
            report.runs.len()
        );
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}

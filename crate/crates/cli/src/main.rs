use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use medsim_core::report::{emit_analysis, emit_reports, read_trials, Format};
use medsim_core::{analyze, parse_config, run_sweep, ConfigOverrides, PolicyId, SweepConfig, SweepResult, TriageWeights};

/// Monte Carlo sweep of medical-response mission policies.
#[derive(Debug, Parser)]
#[command(name = "medsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the sweep and write trials, summary, rollup, pareto and manifest files.
    Run {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Table format for trials, rollup and pareto files.
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Recompute summaries, rollup and pareto files from a trials file.
    Report {
        /// Trials file written by `run` (.csv or .json).
        #[arg(long)]
        trials: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Check a configuration and print the resolved values.
    Validate {
        #[command(flatten)]
        sweep: SweepArgs,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Configuration file (.toml or .json). Flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Trials per (δ, load) condition.
    #[arg(long)]
    trials: Option<u32>,
    /// Degradation levels, comma separated (e.g. 0,0.5,1).
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    /// Patient loads, comma separated.
    #[arg(long, value_delimiter = ',')]
    loads: Option<Vec<u32>>,
    /// Policies, comma separated (pi1_teleop, pi2_auto, pi3_geodt).
    #[arg(long, value_delimiter = ',')]
    policies: Option<Vec<PolicyId>>,
    /// Service window for the windowed rate, minutes.
    #[arg(long)]
    tau_c: Option<f64>,
    /// Workload weight on task switching.
    #[arg(long)]
    alpha: Option<f64>,
    /// Workload weight on interventions.
    #[arg(long)]
    beta: Option<f64>,
    /// Triage severity weight.
    #[arg(long)]
    w_s: Option<f64>,
    /// Triage urgency weight.
    #[arg(long)]
    w_u: Option<f64>,
    /// Triage accessibility weight.
    #[arg(long)]
    w_a: Option<f64>,
    /// Triage urgency scale, minutes.
    #[arg(long)]
    delta0: Option<f64>,
}

impl SweepArgs {
    fn resolve(&self) -> Result<SweepConfig> {
        let mut overrides = ConfigOverrides {
            master_seed: self.seed,
            trials_per_condition: self.trials,
            degradation_levels: self.deltas.clone(),
            patient_loads: self.loads.clone(),
            policies: self.policies.clone(),
            tau_c: self.tau_c,
            alpha: self.alpha,
            beta: self.beta,
            triage: None,
        };
        let triage_flags = [self.w_s, self.w_u, self.w_a, self.delta0];
        if triage_flags.iter().any(Option::is_some) {
            // start from the file's weights so single flags only touch one field
            let base = parse_config(self.config.as_deref(), &ConfigOverrides::default())?.triage;
            overrides.triage = Some(TriageWeights {
                w_s: self.w_s.unwrap_or(base.w_s),
                w_u: self.w_u.unwrap_or(base.w_u),
                w_a: self.w_a.unwrap_or(base.w_a),
                delta0: self.delta0.unwrap_or(base.delta0),
            });
        }
        Ok(parse_config(self.config.as_deref(), &overrides)?)
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

fn print_cells(result: &SweepResult) {
    println!("{:<11} {:>5} {:>5} {:>9} {:>6} {:>6} {:>6}", "policy", "delta", "load", "T_int", "rho", "R_fail", "W");
    for s in &result.summaries {
        let v = &s.vector;
        println!(
            "{:<11} {:>5.2} {:>5} {:>9} {:>6.3} {:>6.3} {:>6.3}",
            s.policy.as_str(),
            s.delta,
            s.load,
            fmt_opt(v.t_int_mean),
            v.rho,
            v.r_fail,
            v.w_mean
        );
    }
}

fn print_rollup(result: &SweepResult) {
    println!();
    println!("{:<11} {:>8} {:>9} {:>6} {:>6} {:>6} {:>9}", "policy", "missions", "T_int", "rho", "R_fail", "W", "time");
    for r in &result.rollup {
        println!(
            "{:<11} {:>8} {:>9} {:>6.3} {:>6.3} {:>6.3} {:>9.2}",
            r.policy.as_str(),
            r.missions,
            fmt_opt(r.t_int_mean),
            r.rho,
            r.r_fail,
            r.w_mean,
            r.mission_time
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            sweep,
            out,
            format,
            workers,
        } => {
            let config = sweep.resolve()?;
            let start = Instant::now();
            let result = run_sweep(&config, workers)?;
            let wall = start.elapsed().as_secs_f64();
            print_cells(&result);
            print_rollup(&result);
            let bundle = emit_reports(&result, &config, format, &out, wall)
                .with_context(|| format!("writing reports to {}", out.display()))?;
            eprintln!(
                "{} missions in {wall:.2}s; manifest at {}",
                result.records.len(),
                bundle.manifest.display()
            );
        }
        Command::Report { trials, out, format } => {
            let records = read_trials(&trials).with_context(|| format!("reading {}", trials.display()))?;
            let result = analyze(records)?;
            print_rollup(&result);
            emit_analysis(&result, format, &out).with_context(|| format!("writing reports to {}", out.display()))?;
        }
        Command::Validate { sweep } => {
            let config = sweep.resolve()?;
            print!("{}", config.to_toml_string()?);
            eprintln!(
                "ok: {} conditions x {} policies x {} trials = {} missions",
                config.conditions().len(),
                config.policies.len(),
                config.trials_per_condition,
                config.total_missions()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use wpcc_core::acceptance::{run_acceptance, AcceptanceOptions};
use wpcc_core::analytic::{outage_cf, throughput_cf};
use wpcc_core::optimizer::optimal_tau_with;
use wpcc_core::montecarlo::MIN_SAMPLES;
use wpcc_core::scenario::{fmt_sig, preset, run_all, Fading, ScenarioConfig, SweepTable};
use wpcc_core::{Backend, ProtocolKind, RelayMode, Simulator};

/// Outage and throughput of wireless-powered cooperative relaying.
#[derive(Parser)]
#[command(name = "wpcc", version)]
struct Cli {
    /// Run every loop on one thread.
    #[arg(long, global = true)]
    serial: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the sweep(s) of a config file and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output CSV; falls back to the config's `output`, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate one of the bundled figure tables.
    Figure {
        #[arg(value_parser = ["fig3", "fig4", "fig5", "fig6"])]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the Monte Carlo block count of the preset.
        #[arg(long)]
        n: Option<u64>,
        /// Override the Monte Carlo seed of the preset.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Grid-search the optimal energy-transfer fraction at the config's base point.
    OptimizeTau {
        #[arg(long)]
        config: PathBuf,
        /// Grid step; defaults to the config's `tau_resolution`.
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// Run the acceptance suite; exits with status 1 if any criterion fails.
    Accept {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo outage of one protocol, next to its closed form.
    Simulate {
        #[arg(long)]
        protocol: ProtocolKind,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "exact")]
        mode: RelayMode,
        /// Take the scenario from the first entry of this config file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 30.0)]
        p_a_dbm: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 5.0)]
        d_ar: f64,
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[arg(long, default_value_t = 2.0)]
        rate: f64,
    },
}

/// Failures carrying their own exit status.
#[derive(Debug)]
struct AcceptanceFailed;

impl std::fmt::Display for AcceptanceFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("acceptance suite reported failures")
    }
}

impl std::error::Error for AcceptanceFailed {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if err.downcast_ref::<AcceptanceFailed>().is_some() {
                return ExitCode::from(1);
            }
            eprintln!("error: {err:#}");
            let config_error = err
                .chain()
                .any(|e| matches!(e.downcast_ref::<wpcc_core::Error>(), Some(wpcc_core::Error::Config { .. })));
            ExitCode::from(if config_error { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let backend = if cli.serial { Backend::Serial } else { Backend::default() };
    match cli.command {
        Command::Sweep { config, out } => {
            let configs = ScenarioConfig::load(&config)?;
            let table = run_all(&configs, backend)?;
            let out = out.or_else(|| configs.iter().find_map(|c| c.output.as_ref().map(PathBuf::from)));
            emit_table(&table, out.as_deref(), &seeds(&configs))
        }
        Command::Figure { name, out, n, seed } => {
            let mut configs = preset(&name)?;
            for c in &mut configs {
                if let Some(mc) = c.mc.as_mut() {
                    mc.n = n.unwrap_or(mc.n);
                    mc.seed = seed.unwrap_or(mc.seed);
                }
                c.validate()?;
            }
            let table = run_all(&configs, backend)?;
            emit_table(&table, out.as_deref(), &seeds(&configs))
        }
        Command::OptimizeTau { config, resolution } => {
            let configs = ScenarioConfig::load(&config)?;
            println!("series,protocol,tau_star,psi_star,grid_resolution");
            for c in &configs {
                let c = ScenarioConfig {
                    tau_resolution: resolution.unwrap_or(c.tau_resolution),
                    optimize_tau: true,
                    ..c.clone()
                };
                c.validate()?;
                let params = c.params_at(None, 0.0)?;
                for &kind in &c.protocols {
                    let r = optimal_tau_with(backend, kind, &params, c.tau_resolution)?;
                    println!(
                        "{},{},{},{},{}",
                        c.series_label(),
                        kind,
                        fmt_sig(r.tau_star),
                        fmt_sig(r.psi_star),
                        r.grid_resolution
                    );
                }
            }
            Ok(())
        }
        Command::Accept { seed, out } => {
            let report = run_acceptance(&AcceptanceOptions { seed, backend });
            let text = report.render();
            print!("{text}");
            if let Some(path) = out {
                std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
            }
            if report.passed() {
                Ok(())
            } else {
                Err(AcceptanceFailed.into())
            }
        }
        Command::Simulate {
            protocol,
            n,
            seed,
            mode,
            config,
            p_a_dbm,
            m,
            d_ar,
            tau,
            rate,
        } => {
            let scenario = match config {
                Some(path) => ScenarioConfig::load(&path)?.remove(0),
                None => {
                    let mut c = ScenarioConfig::parse_many(
                        r#"{"p_a_dbm": 30, "tau": 0.5, "rate": 2, "d_ar": 5, "m": 1}"#,
                    )?
                    .remove(0);
                    c.p_a_dbm = p_a_dbm;
                    c.tau = tau;
                    c.rate = rate;
                    c.d_ar = d_ar;
                    c.m = Fading::Uniform(m);
                    c
                }
            };
            if n < MIN_SAMPLES {
                return Err(wpcc_core::Error::Config {
                    field: "n".into(),
                    msg: format!("must be >= {MIN_SAMPLES}, got {n}"),
                }
                .into());
            }
            let params = scenario.params_at(None, 0.0)?;
            let est = Simulator::new(backend).estimate_outage(protocol, &params, n, seed, mode)?;
            println!("# seed = {seed}, n = {n}, mode = {mode}, backend = {}", backend.name());
            println!("protocol,mc_outage,mc_stderr,mc_throughput,analytic_outage,analytic_throughput,analytic_kind");
            println!(
                "{},{},{},{},{},{},{}",
                protocol,
                fmt_sig(est.p_hat),
                fmt_sig(est.stderr),
                fmt_sig(est.throughput(&params)),
                fmt_sig(outage_cf(protocol, &params)?),
                fmt_sig(throughput_cf(protocol, &params)?),
                if protocol.closed_form_is_exact() { "exact" } else { "approx" }
            );
            Ok(())
        }
    }
}

fn seeds(configs: &[ScenarioConfig]) -> Vec<u64> {
    let mut s: Vec<u64> = configs.iter().filter_map(|c| c.mc.map(|mc| mc.seed)).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn emit_table(table: &SweepTable, out: Option<&Path>, seeds: &[u64]) -> Result<()> {
    let seed_note = if seeds.is_empty() {
        "analytic only".to_string()
    } else {
        format!("seed = {}", seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(", "))
    };
    let csv = table.to_csv();
    match out {
        Some(path) => {
            std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("# {seed_note}; {} rows written to {}", table.rows.len(), path.display());
        }
        None => {
            eprintln!("# {seed_note}");
            std::io::stdout().write_all(csv.as_bytes())?;
        }
    }
    Ok(())
}

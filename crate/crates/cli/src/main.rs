use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use xlsched::harness::{
    bench_csv, benchmark_timing, bound_csv, emit_csv, emit_plot_script, run_campaign, summarize,
    summary_csv, write_text, BoundSweep, CampaignConfig, Preset, DEFAULT_SPACING,
};
use xlsched::nearfield::{AngleModel, CrossingLevel};
use xlsched::{ArrayConfig, ChannelModel, Method};

#[derive(Parser)]
#[command(name = "xlsched", version, about = "Near-field XL-MIMO user scheduling simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo campaign and write one CSV row per scheduler run.
    Simulate {
        #[command(flatten)]
        campaign: CampaignArgs,
        /// Also write per-grid-point means and deviations.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Also write a matplotlib script that plots the campaign CSV.
        #[arg(long)]
        plot_script: Option<PathBuf>,
    },
    /// Time the schedulers on a single thread.
    Bench {
        #[command(flatten)]
        campaign: CampaignArgs,
    },
    /// Tabulate the semi-orthogonality probability bound against Monte-Carlo.
    Bound(BoundArgs),
}

#[derive(Args)]
struct CampaignArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Comma-separated subset of dbs,dbs_s,sus,mrt.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// Comma-separated subset of sw,pw.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ChannelModel>>,
    /// desk or paper; sets array sizes, user count and trials.
    #[arg(long)]
    preset: Option<Preset>,
    /// Worker threads (simulate only).
    #[arg(long)]
    workers: Option<usize>,
}

impl CampaignArgs {
    fn load(&self) -> Result<CampaignConfig> {
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::from_file(path)
                .with_context(|| format!("reading config {}", path.display()))?,
            None => CampaignConfig::default(),
        };
        if let Some(p) = self.preset {
            cfg.apply_preset(p);
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(m) = &self.methods {
            cfg.methods = m.clone();
        }
        if let Some(m) = &self.models {
            cfg.models = m.clone();
        }
        if let Some(w) = self.workers {
            cfg.workers = Some(w);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct BoundArgs {
    /// Comma-separated thresholds.
    #[arg(long, value_delimiter = ',', required = true)]
    alpha: Vec<f64>,
    /// Comma-separated effective apertures (odd).
    #[arg(long = "m-prime", value_delimiter = ',', required = true)]
    m_prime: Vec<usize>,
    #[arg(long)]
    out: PathBuf,
    /// Distance of the served user (m).
    #[arg(long, default_value_t = 20.0)]
    r_k: f64,
    /// Distance of the interfered user (m).
    #[arg(long, default_value_t = 60.0)]
    r_j: f64,
    #[arg(long, default_value_t = 256)]
    num_antennas: usize,
    #[arg(long, default_value_t = DEFAULT_SPACING)]
    element_spacing: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// half-pi or quarter-pi.
    #[arg(long, default_value = "half-pi")]
    angle_model: AngleModel,
    /// Use the lower partition edge for the crossings (under-estimates).
    #[arg(long)]
    lower_edge: bool,
    /// Read alpha as a multiple of beta0 / (||a_k|| r_k r_j).
    #[arg(long)]
    relative: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate {
            campaign,
            summary,
            plot_script,
        } => {
            let cfg = campaign.load()?;
            let result = run_campaign(&cfg)?;
            for f in &result.failures {
                eprintln!(
                    "failed: M={} snr={} model={} method={} trial={}: {}",
                    f.m, f.snr_db, f.model, f.method, f.trial, f.message
                );
            }
            if result.rows.is_empty() {
                bail!("every run failed");
            }
            emit_csv(&result.rows, &campaign.out)?;
            if let Some(path) = summary {
                write_text(&path, &summary_csv(&summarize(&result.rows)))?;
            }
            if let Some(path) = plot_script {
                emit_plot_script(&result.rows, &campaign.out, &plot_prefix(&campaign.out), &path)?;
            }
            eprintln!("{} rows written to {}", result.rows.len(), campaign.out.display());
            Ok(if result.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            })
        }
        Command::Bench { campaign } => {
            let cfg = campaign.load()?;
            let rows = benchmark_timing(&cfg)?;
            write_text(&campaign.out, &bench_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound(args) => {
            let array = ArrayConfig::half_wavelength(args.num_antennas, args.element_spacing)?;
            let sweep = BoundSweep {
                r_k: args.r_k,
                r_j: args.r_j,
                angle_model: args.angle_model,
                level: if args.lower_edge {
                    CrossingLevel::LowerEdge
                } else {
                    CrossingLevel::UpperEdge
                },
                samples: args.samples,
                seed: args.seed,
                relative_alpha: args.relative,
            };
            let rows = sweep.run(&args.alpha, &args.m_prime, &array)?;
            write_text(&args.out, &bound_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn plot_prefix(csv: &Path) -> String {
    csv.with_extension("").to_string_lossy().into_owned()
}

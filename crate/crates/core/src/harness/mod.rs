//! Monte-Carlo campaigns over array size, SNR, channel model and scheduler,
//! timing benchmarks, and CSV/plot-script output.

mod bench;
mod bound;
mod campaign;
mod config;
mod csvio;
mod plot;
mod scenario;

pub use bench::{benchmark_timing, BenchRow, MIN_REPETITIONS, WARMUP_CALLS};
pub use bound::{BoundRow, BoundSweep};
pub use campaign::{
    mean_std, median, run_campaign, run_trial, summarize, CampaignResult, SummaryRow,
    TrialFailure, TrialRow,
};
pub use config::{CampaignConfig, Preset, DEFAULT_SPACING};
pub use csvio::{
    bench_csv, bound_csv, campaign_csv, emit_csv, fmt_float, parse_campaign_csv,
    read_campaign_csv, summary_csv, write_text, BENCH_HEADER, BOUND_HEADER, CAMPAIGN_HEADER,
    SUMMARY_HEADER,
};
pub use plot::emit_plot_script;
pub use scenario::{generate_scenario, scenario_rng, Scenario};

use rayon::prelude::*;

use super::config::CampaignConfig;
use super::scenario::{generate_scenario, Scenario};
use crate::array::{ChannelMatrix, ChannelModel};
use crate::error::{Error, Result};
use crate::scheduling::{schedule, Method, ScheduleInput};

/// One scheduler run.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRow {
    pub snr_db: f64,
    pub m: usize,
    pub model: ChannelModel,
    pub method: Method,
    pub trial: u64,
    pub sum_rate: f64,
    pub served_users: usize,
    pub elapsed_ms: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialFailure {
    pub snr_db: f64,
    pub m: usize,
    pub model: ChannelModel,
    pub method: Method,
    pub trial: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CampaignResult {
    /// Ordered by array size, SNR, model, method and trial, following the
    /// configuration lists.
    pub rows: Vec<TrialRow>,
    pub failures: Vec<TrialFailure>,
}

/// Runs one scheduler on one scenario.
pub fn run_trial(
    scenario: &Scenario,
    method: Method,
    model: ChannelModel,
    snr_db: f64,
    cfg: &CampaignConfig,
) -> Result<TrialRow> {
    let channels = scenario.channels(model)?;
    run_on_channels(scenario, &channels, method, snr_db, cfg)
}

fn run_on_channels(
    scenario: &Scenario,
    channels: &ChannelMatrix,
    method: Method,
    snr_db: f64,
    cfg: &CampaignConfig,
) -> Result<TrialRow> {
    let attach = |e: Error| Error::Trial {
        trial: scenario.trial_id,
        num_antennas: scenario.num_antennas,
        snr_db,
        source: Box::new(e),
    };
    let array = cfg.array_config(scenario.num_antennas, snr_db).map_err(attach)?;
    let input = ScheduleInput::new(&scenario.users, channels, &array).map_err(attach)?;
    let res = schedule(method, &input, cfg.stopping_rule(), cfg.sus_alpha).map_err(attach)?;
    Ok(TrialRow {
        snr_db,
        m: scenario.num_antennas,
        model: channels.model(),
        method,
        trial: scenario.trial_id,
        sum_rate: res.report.sum_rate,
        served_users: res.report.served_count,
        elapsed_ms: res.elapsed.as_secs_f64() * 1e3,
        iterations: res.iterations,
    })
}

type Key = (usize, usize, usize, usize, u64);
type UnitOutput = (Vec<(Key, TrialRow)>, Vec<(Key, TrialFailure)>);

/// Every `(M, trial)` pair is a work unit; channels are built once per model
/// and reused across the SNR grid. Failed runs are collected and the
/// campaign carries on.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignResult> {
    cfg.validate()?;
    let units: Vec<(usize, u64)> = (0..cfg.antenna_counts.len())
        .flat_map(|mi| (0..cfg.trials).map(move |t| (mi, t)))
        .collect();
    let run = || {
        units
            .par_iter()
            .map(|&(mi, trial)| run_unit(cfg, mi, trial))
            .collect::<Vec<_>>()
    };
    let outputs = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    };

    let mut rows: Vec<(Key, TrialRow)> = Vec::with_capacity(cfg.row_count());
    let mut failures: Vec<(Key, TrialFailure)> = Vec::new();
    for out in outputs {
        rows.extend(out.0);
        failures.extend(out.1);
    }
    rows.sort_by_key(|(k, _)| *k);
    failures.sort_by_key(|(k, _)| *k);
    Ok(CampaignResult {
        rows: rows.into_iter().map(|(_, r)| r).collect(),
        failures: failures.into_iter().map(|(_, f)| f).collect(),
    })
}

fn run_unit(
    cfg: &CampaignConfig,
    mi: usize,
    trial: u64,
) -> UnitOutput {
    let m = cfg.antenna_counts[mi];
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let fail = |si: usize, model: ChannelModel, method: Method, e: Error| TrialFailure {
        snr_db: cfg.snr_grid_db[si],
        m,
        model,
        method,
        trial,
        message: e.to_string(),
    };
    let scenario = match generate_scenario(cfg, m, trial) {
        Ok(s) => s,
        Err(e) => {
            let msg = e.to_string();
            for (si, _) in cfg.snr_grid_db.iter().enumerate() {
                for (oi, &model) in cfg.models.iter().enumerate() {
                    for (ai, &method) in cfg.methods.iter().enumerate() {
                        let f = fail(si, model, method, Error::InvalidParameter(msg.clone()));
                        failures.push(((mi, si, oi, ai, trial), f));
                    }
                }
            }
            return (rows, failures);
        }
    };
    for (oi, &model) in cfg.models.iter().enumerate() {
        let channels = match scenario.channels(model) {
            Ok(h) => h,
            Err(e) => {
                let msg = e.to_string();
                for si in 0..cfg.snr_grid_db.len() {
                    for (ai, &method) in cfg.methods.iter().enumerate() {
                        let f = fail(si, model, method, Error::InvalidParameter(msg.clone()));
                        failures.push(((mi, si, oi, ai, trial), f));
                    }
                }
                continue;
            }
        };
        for (si, &snr) in cfg.snr_grid_db.iter().enumerate() {
            for (ai, &method) in cfg.methods.iter().enumerate() {
                let key = (mi, si, oi, ai, trial);
                match run_on_channels(&scenario, &channels, method, snr, cfg) {
                    Ok(row) => rows.push((key, row)),
                    Err(e) => failures.push((key, fail(si, model, method, e))),
                }
            }
        }
    }
    (rows, failures)
}

/// Mean and spread over trials for one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub snr_db: f64,
    pub m: usize,
    pub model: ChannelModel,
    pub method: Method,
    pub trials: usize,
    pub mean_sum_rate: f64,
    pub std_sum_rate: f64,
    pub mean_served_users: f64,
    pub std_served_users: f64,
    pub median_elapsed_ms: f64,
}

/// Groups consecutive rows sharing a grid point, so `rows` must be in the
/// order produced by [`run_campaign`]. Standard deviations are sample
/// deviations (zero for a single trial).
pub fn summarize(rows: &[TrialRow]) -> Vec<SummaryRow> {
    let same = |a: &TrialRow, b: &TrialRow| {
        a.snr_db == b.snr_db && a.m == b.m && a.model == b.model && a.method == b.method
    };
    rows.chunk_by(|a, b| same(a, b))
        .map(|group| {
            let rates: Vec<f64> = group.iter().map(|r| r.sum_rate).collect();
            let served: Vec<f64> = group.iter().map(|r| r.served_users as f64).collect();
            let mut times: Vec<f64> = group.iter().map(|r| r.elapsed_ms).collect();
            let (mr, sr) = mean_std(&rates);
            let (ms, ss) = mean_std(&served);
            SummaryRow {
                snr_db: group[0].snr_db,
                m: group[0].m,
                model: group[0].model,
                method: group[0].method,
                trials: group.len(),
                mean_sum_rate: mr,
                std_sum_rate: sr,
                mean_served_users: ms,
                std_served_users: ss,
                median_elapsed_ms: median(&mut times),
            }
        })
        .collect()
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

use std::time::Duration;

use super::campaign::median;
use super::config::CampaignConfig;
use super::scenario::generate_scenario;
use crate::array::ChannelModel;
use crate::error::{Error, Result};
use crate::scheduling::{schedule, Method, ScheduleInput};

/// Discarded calls per (SNR, method) before timing.
pub const WARMUP_CALLS: usize = 3;
/// Lower bound on timed repetitions.
pub const MIN_REPETITIONS: u64 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub m: usize,
    pub model: ChannelModel,
    pub snr_db: f64,
    pub median_ms: f64,
    pub mean_sum_rate: f64,
    pub mean_served_users: f64,
    pub repetitions: u64,
}

/// Median scheduler wall time per (M, model, SNR, method), on the calling
/// thread. Each repetition uses a fresh scenario; there are
/// `max(trials, 20)` of them.
pub fn benchmark_timing(cfg: &CampaignConfig) -> Result<Vec<BenchRow>> {
    cfg.validate()?;
    if let Some(n) = cfg.workers.filter(|&n| n != 1) {
        return Err(Error::InvalidParameter(format!(
            "timing runs sequentially; workers = {n} is not allowed"
        )));
    }
    for needed in [Method::Dbs, Method::Sus] {
        if !cfg.methods.contains(&needed) {
            return Err(Error::InvalidParameter(format!("timing needs method {needed}")));
        }
    }
    let reps = cfg.trials.max(MIN_REPETITIONS);
    let stop = cfg.stopping_rule();
    let mut out = Vec::new();
    for &m in &cfg.antenna_counts {
        let arrays = cfg
            .snr_grid_db
            .iter()
            .map(|&s| cfg.array_config(m, s))
            .collect::<Result<Vec<_>>>()?;
        for &model in &cfg.models {
            let cells = cfg.snr_grid_db.len() * cfg.methods.len();
            let mut times: Vec<Vec<f64>> = vec![Vec::with_capacity(reps as usize); cells];
            let mut rates = vec![0.0; cells];
            let mut served = vec![0.0; cells];
            for rep in 0..reps {
                let scenario = generate_scenario(cfg, m, rep)?;
                let channels = scenario.channels(model)?;
                for (si, array) in arrays.iter().enumerate() {
                    let input = ScheduleInput::new(&scenario.users, &channels, array)?;
                    for (ai, &method) in cfg.methods.iter().enumerate() {
                        if rep == 0 {
                            for _ in 0..WARMUP_CALLS {
                                schedule(method, &input, stop, cfg.sus_alpha)?;
                            }
                        }
                        let res = schedule(method, &input, stop, cfg.sus_alpha)?;
                        let cell = si * cfg.methods.len() + ai;
                        times[cell].push(ms(res.elapsed));
                        rates[cell] += res.report.sum_rate;
                        served[cell] += res.report.served_count as f64;
                    }
                }
            }
            for (si, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
                for (ai, &method) in cfg.methods.iter().enumerate() {
                    let cell = si * cfg.methods.len() + ai;
                    out.push(BenchRow {
                        method,
                        m,
                        model,
                        snr_db,
                        median_ms: median(&mut times[cell]),
                        mean_sum_rate: rates[cell] / reps as f64,
                        mean_served_users: served[cell] / reps as f64,
                        repetitions: reps,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

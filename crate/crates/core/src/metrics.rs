//! SINR and sum-rate under the full inter-user interference model.
//!
//! `powers[j]` is the power (not amplitude) given to the `j`-th precoder:
//! the useful term of user `k` is `p_k |f_k^H a_k|^2` and user `j` leaks
//! `p_j |f_j^H a_k|^2` into it.

use crate::array::ChannelMatrix;
use crate::error::{Error, Result};
use crate::precoding::{dot, PrecoderSet};

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub per_user_sinr: Vec<f64>,
    pub per_user_rate: Vec<f64>,
    pub sum_rate: f64,
    pub served_count: usize,
}

impl RateReport {
    pub fn empty() -> Self {
        RateReport {
            per_user_sinr: Vec::new(),
            per_user_rate: Vec::new(),
            sum_rate: 0.0,
            served_count: 0,
        }
    }
}

fn check(precoders: &PrecoderSet, powers: &[f64], channels: &ChannelMatrix, noise: f64) -> Result<()> {
    precoders.check_against(channels)?;
    if powers.len() != precoders.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} powers for {} precoders",
            powers.len(),
            precoders.len()
        )));
    }
    if !(noise > 0.0) {
        return Err(Error::InvalidParameter(format!("noise power must be positive, got {noise}")));
    }
    Ok(())
}

/// `|f_j^H a_{id_k}|^2` for every scheduled pair, row `k`, column `j`.
fn coupling(precoders: &PrecoderSet, channels: &ChannelMatrix) -> Vec<Vec<f64>> {
    precoders
        .user_ids()
        .iter()
        .map(|&k| {
            let a = channels.column(k);
            (0..precoders.len())
                .map(|j| dot(precoders.column(j), a).norm_sqr())
                .collect()
        })
        .collect()
}

fn sinr_row(row: &[f64], k: usize, powers: &[f64], noise: f64) -> f64 {
    let interference: f64 = row
        .iter()
        .zip(powers)
        .enumerate()
        .filter(|(j, _)| *j != k)
        .map(|(_, (c, p))| c * p)
        .sum();
    powers[k] * row[k] / (noise + interference)
}

/// SINR of the `k`-th scheduled user (position in `precoders`).
pub fn sinr(
    k: usize,
    precoders: &PrecoderSet,
    powers: &[f64],
    channels: &ChannelMatrix,
    noise: f64,
) -> Result<f64> {
    check(precoders, powers, channels, noise)?;
    if k >= precoders.len() {
        return Err(Error::DimensionMismatch(format!("user position {k} not scheduled")));
    }
    let a = channels.column(precoders.user_ids()[k]);
    let row: Vec<f64> = (0..precoders.len())
        .map(|j| dot(precoders.column(j), a).norm_sqr())
        .collect();
    Ok(sinr_row(&row, k, powers, noise))
}

/// Per-user SINRs and rates plus their sum.
pub fn rate_report(
    precoders: &PrecoderSet,
    powers: &[f64],
    channels: &ChannelMatrix,
    noise: f64,
) -> Result<RateReport> {
    check(precoders, powers, channels, noise)?;
    let coupling = coupling(precoders, channels);
    let per_user_sinr: Vec<f64> = coupling
        .iter()
        .enumerate()
        .map(|(k, row)| sinr_row(row, k, powers, noise))
        .collect();
    let per_user_rate: Vec<f64> = per_user_sinr.iter().map(|s| (1.0 + s).log2()).collect();
    Ok(RateReport {
        sum_rate: per_user_rate.iter().sum(),
        served_count: powers.iter().filter(|&&p| p > 0.0).count(),
        per_user_sinr,
        per_user_rate,
    })
}

pub fn sum_rate(
    precoders: &PrecoderSet,
    powers: &[f64],
    channels: &ChannelMatrix,
    noise: f64,
) -> Result<f64> {
    rate_report(precoders, powers, channels, noise).map(|r| r.sum_rate)
}

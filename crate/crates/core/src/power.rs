//! Waterfilling over parallel interference-free channels.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PowerAllocation {
    pub powers: Vec<f64>,
    pub water_level: f64,
}

impl PowerAllocation {
    pub fn active_count(&self) -> usize {
        self.powers.iter().filter(|&&p| p > 0.0).count()
    }
}

/// Maximizes `sum_k log2(1 + p_k g_k / noise)` subject to `sum_k p_k = budget`.
///
/// Users are ranked by their floor `noise / g_k`; the weakest is dropped while
/// the water level implied by the remaining users does not exceed its floor.
pub fn waterfill(gains: &[f64], noise: f64, budget: f64) -> Result<PowerAllocation> {
    if gains.is_empty() {
        return Err(Error::Empty("gain list"));
    }
    if let Some((index, &gain)) = gains
        .iter()
        .enumerate()
        .find(|(_, g)| !(g.is_finite() && **g > 0.0))
    {
        return Err(Error::NonPositiveGain { index, gain });
    }
    if !(noise.is_finite() && noise > 0.0) {
        return Err(Error::InvalidParameter(format!("noise power must be positive, got {noise}")));
    }
    if !(budget.is_finite() && budget > 0.0) {
        return Err(Error::InvalidParameter(format!("power budget must be positive, got {budget}")));
    }

    let floors: Vec<f64> = gains.iter().map(|g| noise / g).collect();
    let mut order: Vec<usize> = (0..gains.len()).collect();
    order.sort_by(|&a, &b| floors[a].total_cmp(&floors[b]).then(a.cmp(&b)));

    let mut active = order.len();
    let mut floor_sum: f64 = floors.iter().sum();
    let mut level = (budget + floor_sum) / active as f64;
    while active > 1 && level <= floors[order[active - 1]] {
        active -= 1;
        floor_sum -= floors[order[active]];
        level = (budget + floor_sum) / active as f64;
    }

    let mut powers = vec![0.0; gains.len()];
    for &k in &order[..active] {
        powers[k] = level - floors[k];
    }
    // level - floor cancels when floors dwarf the budget; spread the residual
    let shift = (budget - powers.iter().sum::<f64>()) / active as f64;
    level += shift;
    for &k in &order[..active] {
        powers[k] = (powers[k] + shift).max(0.0);
    }
    Ok(PowerAllocation {
        powers,
        water_level: level,
    })
}

/// `sum_k log2(1 + p_k g_k / noise)`
pub fn parallel_rate(gains: &[f64], powers: &[f64], noise: f64) -> f64 {
    gains
        .iter()
        .zip(powers)
        .map(|(g, p)| (1.0 + p * g / noise).log2())
        .sum()
}

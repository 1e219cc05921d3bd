//! User schedulers: distance-based (DBS), its simplified variant (DBS-s),
//! greedy semi-orthogonal selection with zero-forcing (SUS) and matched-filter
//! transmission to everybody (MRT), plus an exhaustive search used as a test
//! oracle.
//!
//! The three greedy schedulers share the same admission step: the candidate
//! is appended to the zero-forcing set, power is waterfilled over the
//! zero-forcing gains and the candidate is kept only if the sum-rate grows.
//! They differ in how the next candidate is picked.

mod dbs;
mod exhaustive;
mod mrt;
mod sus;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use num_complex::Complex64;

use crate::array::{ArrayConfig, ChannelMatrix, UserPosition};
use crate::error::{Error, Result};
use crate::metrics::RateReport;
use crate::power::{parallel_rate, waterfill, PowerAllocation};
use crate::precoding::{dot, PrecoderSet, ZfEngine};

pub use dbs::{dbs_s_schedule, dbs_schedule};
pub use exhaustive::{exhaustive_schedule, ENUMERATION_CAP};
pub use mrt::mrt_schedule;
pub use sus::sus_schedule;

/// Everything a scheduler needs for one channel realization.
#[derive(Clone, Copy, Debug)]
pub struct ScheduleInput<'a> {
    pub users: &'a [UserPosition],
    pub channels: &'a ChannelMatrix,
    pub cfg: &'a ArrayConfig,
}

impl<'a> ScheduleInput<'a> {
    pub fn new(
        users: &'a [UserPosition],
        channels: &'a ChannelMatrix,
        cfg: &'a ArrayConfig,
    ) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::Empty("user set"));
        }
        if channels.num_users() != users.len() || channels.num_antennas() != cfg.num_antennas() {
            return Err(Error::DimensionMismatch(format!(
                "{} users, channel matrix {}x{}, array of {}",
                users.len(),
                channels.num_antennas(),
                channels.num_users(),
                cfg.num_antennas()
            )));
        }
        Ok(ScheduleInput {
            users,
            channels,
            cfg,
        })
    }
}

/// When the greedy schedulers stop admitting users.
///
/// The set never grows beyond the number of antennas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingRule {
    /// Stop (and drop the candidate) as soon as admitting it does not raise
    /// the sum-rate.
    pub rate_reduction: bool,
    /// Stop once the selected candidate's ranking distance exceeds this many
    /// meters. DBS ranks by equivalent distance and DBS-s by physical
    /// distance; SUS has no distance ranking and ignores it.
    pub max_equivalent_distance: Option<f64>,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            rate_reduction: true,
            max_equivalent_distance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleResult {
    /// Served user ids in admission order.
    pub served: Vec<usize>,
    pub precoders: PrecoderSet,
    /// Aligned with `served`.
    pub powers: PowerAllocation,
    pub report: RateReport,
    /// Accepted admissions (for the exhaustive oracle: subsets evaluated).
    pub iterations: usize,
    /// Equivalent-distance evaluations (DBS only).
    pub distance_updates: usize,
    /// Sum-rate after each accepted admission.
    pub trajectory: Vec<f64>,
    /// Wall time of the scheduling decision, precoder and power computation.
    pub elapsed: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Dbs,
    DbsS,
    Sus,
    Mrt,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Dbs, Method::DbsS, Method::Sus, Method::Mrt];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Dbs => "dbs",
            Method::DbsS => "dbs_s",
            Method::Sus => "sus",
            Method::Mrt => "mrt",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dbs" => Ok(Method::Dbs),
            "dbs_s" | "dbs-s" => Ok(Method::DbsS),
            "sus" => Ok(Method::Sus),
            "mrt" => Ok(Method::Mrt),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

/// Runs `method` on `input`.
pub fn schedule(
    method: Method,
    input: &ScheduleInput<'_>,
    stop: StoppingRule,
    sus_alpha: f64,
) -> Result<ScheduleResult> {
    match method {
        Method::Dbs => dbs_schedule(input, stop),
        Method::DbsS => dbs_s_schedule(input, stop),
        Method::Sus => sus_schedule(input, stop, sus_alpha),
        Method::Mrt => mrt_schedule(input),
    }
}

/// Distance of a user at `distance` inflated by the interference it receives
/// through `precoders`; infinite when the interference saturates it.
pub fn equivalent_distance(
    distance: f64,
    channel: &[Complex64],
    precoders: &PrecoderSet,
    num_antennas: usize,
) -> f64 {
    let interference: f64 = (0..precoders.len())
        .map(|j| dot(precoders.column(j), channel).norm_sqr())
        .sum();
    equivalent_distance_from(distance, interference, num_antennas)
}

#[inline]
pub(crate) fn equivalent_distance_from(distance: f64, interference: f64, num_antennas: usize) -> f64 {
    let arg = 1.0 - distance * distance / num_antennas as f64 * interference;
    if arg > 0.0 {
        distance / arg.sqrt()
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, PartialEq, Eq)]
pub(crate) enum Admission {
    Accepted,
    Infeasible,
    RateDrop,
}

/// Zero-forcing set with waterfilled powers and the admission rule.
pub(crate) struct Greedy<'a> {
    pub(crate) engine: ZfEngine<'a>,
    noise: f64,
    budget: f64,
    num_antennas: usize,
    rate_reduction: bool,
    rate: f64,
    powers: Option<PowerAllocation>,
    trajectory: Vec<f64>,
}

impl<'a> Greedy<'a> {
    pub(crate) fn new(input: &ScheduleInput<'a>, stop: StoppingRule) -> Self {
        Greedy {
            engine: ZfEngine::new(input.channels),
            noise: input.cfg.noise_power(),
            budget: input.cfg.tx_power(),
            num_antennas: input.cfg.num_antennas(),
            rate_reduction: stop.rate_reduction,
            rate: 0.0,
            powers: None,
            trajectory: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.engine.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.engine.len() >= self.num_antennas
    }

    pub(crate) fn try_admit(&mut self, k: usize) -> Admission {
        if self.engine.push(k).is_err() {
            return Admission::Infeasible;
        }
        let gains = self.engine.gains();
        let alloc = match waterfill(&gains, self.noise, self.budget) {
            Ok(a) => a,
            Err(_) => {
                self.engine.pop();
                return Admission::Infeasible;
            }
        };
        let rate = parallel_rate(&gains, &alloc.powers, self.noise);
        if self.rate_reduction && !self.trajectory.is_empty() && rate <= self.rate {
            self.engine.pop();
            return Admission::RateDrop;
        }
        self.rate = rate;
        self.powers = Some(alloc);
        self.trajectory.push(rate);
        Admission::Accepted
    }

    /// Builds the precoders; the rate report is filled in by [`finalize`].
    pub(crate) fn into_partial(self, distance_updates: usize) -> Partial {
        let precoders = self.engine.precoders();
        Partial {
            served: self.engine.members().to_vec(),
            precoders,
            powers: self.powers.unwrap_or(PowerAllocation {
                powers: Vec::new(),
                water_level: 0.0,
            }),
            iterations: self.trajectory.len(),
            distance_updates,
            trajectory: self.trajectory,
        }
    }
}

pub(crate) struct Partial {
    served: Vec<usize>,
    precoders: PrecoderSet,
    powers: PowerAllocation,
    iterations: usize,
    distance_updates: usize,
    trajectory: Vec<f64>,
}

/// Evaluates the full-interference rate report, outside the timed region.
pub(crate) fn finalize(
    partial: Partial,
    input: &ScheduleInput<'_>,
    elapsed: Duration,
) -> Result<ScheduleResult> {
    let report = if partial.served.is_empty() {
        RateReport::empty()
    } else {
        crate::metrics::rate_report(
            &partial.precoders,
            &partial.powers.powers,
            input.channels,
            input.cfg.noise_power(),
        )?
    };
    Ok(ScheduleResult {
        served: partial.served,
        precoders: partial.precoders,
        powers: partial.powers,
        report,
        iterations: partial.iterations,
        distance_updates: partial.distance_updates,
        trajectory: partial.trajectory,
        elapsed,
    })
}

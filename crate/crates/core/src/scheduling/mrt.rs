use std::time::Instant;

use super::{finalize, Partial, ScheduleInput, ScheduleResult};
use crate::error::Result;
use crate::power::waterfill;
use crate::precoding::{mrt_precoder, norm_sqr, PrecoderSet};

/// Matched-filter precoding towards every user, powers waterfilled over the
/// matched-filter gains `||a_k||^2`. The rate report accounts for the full
/// interference; users that waterfilling switches off are not counted as
/// served.
pub fn mrt_schedule(input: &ScheduleInput<'_>) -> Result<ScheduleResult> {
    let start = Instant::now();
    let channels = input.channels;
    let mut columns = Vec::with_capacity(channels.num_antennas() * channels.num_users());
    let mut gains = Vec::with_capacity(channels.num_users());
    for a in channels.columns() {
        gains.push(norm_sqr(a));
        columns.extend(mrt_precoder(a)?);
    }
    let served: Vec<usize> = (0..channels.num_users()).collect();
    let precoders = PrecoderSet::new(channels.num_antennas(), served.clone(), columns)?;
    let powers = waterfill(&gains, input.cfg.noise_power(), input.cfg.tx_power())?;
    let elapsed = start.elapsed();
    finalize(
        Partial {
            served,
            precoders,
            powers,
            iterations: 1,
            distance_updates: 0,
            trajectory: Vec::new(),
        },
        input,
        elapsed,
    )
}

use std::time::Instant;

use super::{finalize, Admission, Greedy, ScheduleInput, ScheduleResult, StoppingRule};
use crate::error::{Error, Result};
use crate::power::{parallel_rate, waterfill};
use crate::precoding::zf_precoders;

/// Largest user count accepted by [`exhaustive_schedule`].
pub const ENUMERATION_CAP: usize = 16;

/// Best zero-forcing subset by exhaustive enumeration, each subset served
/// with waterfilled power. Rank-deficient subsets are skipped.
pub fn exhaustive_schedule(input: &ScheduleInput<'_>) -> Result<ScheduleResult> {
    let k = input.users.len();
    if k > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            users: k,
            cap: ENUMERATION_CAP,
        });
    }
    let start = Instant::now();
    let noise = input.cfg.noise_power();
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut evaluated = 0;
    for mask in 1u32..(1u32 << k) {
        if mask.count_ones() as usize > input.cfg.num_antennas() {
            continue;
        }
        let subset: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let Ok(f) = zf_precoders(&input.channels.select(&subset)) else {
            continue;
        };
        evaluated += 1;
        let gains: Vec<f64> = (0..f.len())
            .map(|j| {
                let col = f.column(j);
                crate::precoding::dot(col, input.channels.column(subset[j])).norm_sqr()
            })
            .collect();
        let p = waterfill(&gains, noise, input.cfg.tx_power())?;
        let rate = parallel_rate(&gains, &p.powers, noise);
        if best.as_ref().is_none_or(|(r, _)| rate > *r) {
            best = Some((rate, subset));
        }
    }
    let (_, subset) = best.ok_or(Error::Empty("feasible subset"))?;

    // rebuild the winning set through the shared admission path
    let mut greedy = Greedy::new(
        input,
        StoppingRule {
            rate_reduction: false,
            max_equivalent_distance: None,
        },
    );
    for &u in &subset {
        if greedy.try_admit(u) != Admission::Accepted {
            return Err(Error::RankDeficient { user: u });
        }
    }
    let mut partial = greedy.into_partial(0);
    partial.iterations = evaluated;
    partial.trajectory = partial.trajectory.split_off(partial.trajectory.len() - 1);
    let elapsed = start.elapsed();
    finalize(partial, input, elapsed)
}

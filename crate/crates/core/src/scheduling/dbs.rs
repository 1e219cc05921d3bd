use std::time::Instant;

use super::{
    equivalent_distance_from, finalize, Admission, Greedy, ScheduleInput, ScheduleResult,
    StoppingRule,
};
use crate::error::Result;

/// Distance-based scheduling.
///
/// Every candidate carries an equivalent distance that starts at its physical
/// distance. In each round the closest candidate is re-evaluated against the
/// current zero-forcing set; if it is still the closest after its update it is
/// admitted, otherwise the new closest one is re-evaluated. A candidate is
/// evaluated at most once per round, since its value only depends on the
/// served set. Candidates whose equivalent distance diverges, or that would
/// make the set rank deficient, are dropped.
pub fn dbs_schedule(input: &ScheduleInput<'_>, stop: StoppingRule) -> Result<ScheduleResult> {
    let start = Instant::now();
    let num_antennas = input.cfg.num_antennas();
    let distances: Vec<f64> = input.users.iter().map(|u| u.distance()).collect();
    let mut r_eq = distances.clone();
    // served-set size the stored r_eq was computed against
    let mut stamp = vec![0usize; distances.len()];
    let mut pool: Vec<usize> = (0..distances.len()).collect();
    let mut greedy = Greedy::new(input, stop);
    let mut updates = 0usize;

    'outer: while !pool.is_empty() && !greedy.is_full() {
        let n = greedy.len();
        let pos = loop {
            let pos = closest(&pool, &r_eq);
            let k = pool[pos];
            if stamp[k] == n {
                break pos;
            }
            let interference = greedy.engine.interference(k);
            r_eq[k] = equivalent_distance_from(distances[k], interference, num_antennas);
            stamp[k] = n;
            updates += 1;
            if r_eq[k].is_infinite() {
                pool.swap_remove(pos);
                if pool.is_empty() {
                    break 'outer;
                }
            }
        };
        let k = pool[pos];
        if stop.max_equivalent_distance.is_some_and(|cap| r_eq[k] > cap) {
            break;
        }
        match greedy.try_admit(k) {
            Admission::Accepted => {
                pool.swap_remove(pos);
            }
            Admission::Infeasible => {
                r_eq[k] = f64::INFINITY;
                pool.swap_remove(pos);
            }
            Admission::RateDrop => break,
        }
    }

    let partial = greedy.into_partial(updates);
    let elapsed = start.elapsed();
    finalize(partial, input, elapsed)
}

/// Simplified distance-based scheduling: candidates are taken in order of
/// physical distance, skipping those that make the set rank deficient.
pub fn dbs_s_schedule(input: &ScheduleInput<'_>, stop: StoppingRule) -> Result<ScheduleResult> {
    let start = Instant::now();
    let mut order: Vec<usize> = (0..input.users.len()).collect();
    order.sort_by(|&a, &b| {
        input.users[a]
            .distance()
            .total_cmp(&input.users[b].distance())
            .then(a.cmp(&b))
    });
    let mut greedy = Greedy::new(input, stop);
    for k in order {
        if greedy.is_full()
            || stop
                .max_equivalent_distance
                .is_some_and(|cap| input.users[k].distance() > cap)
        {
            break;
        }
        match greedy.try_admit(k) {
            Admission::Accepted | Admission::Infeasible => {}
            Admission::RateDrop => break,
        }
    }
    let partial = greedy.into_partial(0);
    let elapsed = start.elapsed();
    finalize(partial, input, elapsed)
}

/// Position in `pool` of the smallest distance, lowest id on ties.
#[inline]
fn closest(pool: &[usize], r_eq: &[f64]) -> usize {
    let mut best = 0;
    for (pos, &k) in pool.iter().enumerate().skip(1) {
        let b = pool[best];
        if r_eq[k] < r_eq[b] || (r_eq[k] == r_eq[b] && k < b) {
            best = pos;
        }
    }
    best
}

use std::time::Instant;

use num_complex::Complex64;

use super::{finalize, Admission, Greedy, ScheduleInput, ScheduleResult, StoppingRule};
use crate::error::{Error, Result};
use crate::precoding::{dot, norm_sqr, RANK_TOLERANCE};

/// Greedy zero-forcing with semi-orthogonal user selection.
///
/// At each step the candidate with the largest channel component orthogonal
/// to the already selected channels is tried. After an admission, candidates
/// whose normalized correlation with the new orthogonal direction reaches
/// `alpha` leave the pool; `alpha = 1` keeps everything but exact collinear
/// channels.
pub fn sus_schedule(
    input: &ScheduleInput<'_>,
    stop: StoppingRule,
    alpha: f64,
) -> Result<ScheduleResult> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "semi-orthogonality threshold must lie in (0, 1], got {alpha}"
        )));
    }
    let start = Instant::now();
    let channels = input.channels;
    let norms: Vec<f64> = channels.columns().map(norm_sqr).collect();
    let mut residual = norms.clone();
    let mut pool: Vec<usize> = (0..channels.num_users()).collect();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    let mut greedy = Greedy::new(input, stop);

    while !pool.is_empty() && !greedy.is_full() {
        let pos = strongest(&pool, &residual);
        let k = pool[pos];
        if !(residual[k] > RANK_TOLERANCE * norms[k]) {
            pool.swap_remove(pos);
            continue;
        }
        match greedy.try_admit(k) {
            Admission::Accepted => {}
            Admission::Infeasible => {
                pool.swap_remove(pos);
                continue;
            }
            Admission::RateDrop => break,
        }
        pool.swap_remove(pos);

        let mut q = channels.column(k).to_vec();
        for b in &basis {
            let c = dot(b, &q);
            for (x, y) in q.iter_mut().zip(b) {
                *x -= y * c;
            }
        }
        let scale = 1.0 / norm_sqr(&q).sqrt();
        q.iter_mut().for_each(|x| *x *= scale);

        pool.retain(|&j| {
            let c = dot(&q, channels.column(j)).norm_sqr();
            residual[j] -= c;
            c < alpha * alpha * norms[j]
        });
        basis.push(q);
    }

    let partial = greedy.into_partial(0);
    let elapsed = start.elapsed();
    finalize(partial, input, elapsed)
}

#[inline]
fn strongest(pool: &[usize], residual: &[f64]) -> usize {
    let mut best = 0;
    for (pos, &k) in pool.iter().enumerate().skip(1) {
        let b = pool[best];
        if residual[k] > residual[b] || (residual[k] == residual[b] && k < b) {
            best = pos;
        }
    }
    best
}

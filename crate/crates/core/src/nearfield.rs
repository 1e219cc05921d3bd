//! Near-field power concentration and the probability of finding
//! semi-orthogonal users.
//!
//! A user close to a large array receives most of its channel power through a
//! few central elements (the effective aperture `M'`). Over that aperture the
//! interference it sees from a matched filter towards user `k` behaves like a
//! Dirichlet kernel of the other user's angle,
//!
//! ```text
//! i(theta) = beta0 / (||a_k|| r_k r_j) * |sin(pi d M' sin(theta) / lambda) / sin(pi d sin(theta) / lambda)|
//! ```
//!
//! whose zeros split `[0, pi/2]` into partitions. Inside each partition the
//! event `i(theta) < alpha` is confined to two intervals hugging the zeros,
//! which yields a closed-form bound on `P{i(theta) < alpha}` that is checked
//! against Monte-Carlo sampling.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::str::FromStr;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::array::{steering_vector_sw, ArrayConfig, UserPosition};
use crate::error::{Error, Result};
use crate::precoding::norm_sqr;

/// Angle subtended by the array aperture as seen from the user, in `[0, pi]`.
pub fn aperture_phi(user: &UserPosition, cfg: &ArrayConfig) -> f64 {
    let (r, t) = (user.distance(), user.angle());
    let md = cfg.num_antennas() as f64 * cfg.element_spacing();
    let den = 2.0 * r * t.cos();
    ((md - 2.0 * r * t.sin()) / den).atan() + ((md + 2.0 * r * t.sin()) / den).atan()
}

/// Closed-form approximation of `||a||^2` from the aperture angle.
pub fn channel_norm_sqr_approx(user: &UserPosition, cfg: &ArrayConfig) -> f64 {
    cfg.ref_power() * aperture_phi(user, cfg)
        / (user.distance() * cfg.element_spacing() * user.angle().cos())
}

/// Grid position of the element closest to the user.
pub fn nearest_element(user: &UserPosition, cfg: &ArrayConfig) -> usize {
    let foot = user.distance() * user.angle().sin() / cfg.element_spacing();
    let pos = (foot + (cfg.num_antennas() as f64 - 1.0) / 2.0).round();
    pos.clamp(0.0, cfg.num_antennas() as f64 - 1.0) as usize
}

/// Ratio between the mean per-element power and the strongest element's
/// power. Close to one when power is spread evenly, small when it
/// concentrates on a few elements.
pub fn concentration_metric(user: &UserPosition, cfg: &ArrayConfig) -> f64 {
    let m = cfg.element_offset(nearest_element(user, cfg));
    let dk = cfg.element_spacing() / user.distance();
    let rn_sqr = user.distance().powi(2) * (1.0 - 2.0 * m * dk * user.angle().sin() + dk * dk * m * m);
    rn_sqr * aperture_phi(user, cfg)
        / (cfg.num_antennas() as f64 * user.distance() * cfg.element_spacing() * user.angle().cos())
}

/// Smallest odd number of strongest elements that carries at least `eta` of
/// the channel power, never above `M`.
pub fn effective_aperture(user: &UserPosition, cfg: &ArrayConfig, eta: f64) -> Result<usize> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidParameter(format!("power fraction must lie in (0, 1), got {eta}")));
    }
    let mut power: Vec<f64> = steering_vector_sw(user, cfg).iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    power.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut count = power.len();
    for (i, p) in power.iter().enumerate() {
        acc += p;
        if acc >= eta * total {
            count = i + 1;
            break;
        }
    }
    let odd = count | 1;
    let m = cfg.num_antennas();
    Ok(if odd <= m { odd } else if m % 2 == 1 { m } else { m - 1 })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApertureReport {
    pub phi: f64,
    pub concentration: f64,
    pub effective_count: usize,
}

pub fn aperture_report(user: &UserPosition, cfg: &ArrayConfig, eta: f64) -> Result<ApertureReport> {
    Ok(ApertureReport {
        phi: aperture_phi(user, cfg),
        concentration: concentration_metric(user, cfg),
        effective_count: effective_aperture(user, cfg, eta)?,
    })
}

/// Far-field interference from a matched filter towards a broadside user `k`
/// onto a farther user `j`, restricted to `M'` central elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterferenceKernel {
    scale: f64,
    m_prime: usize,
    spacing_ratio: f64,
}

impl InterferenceKernel {
    /// `||a_k||` is the norm of user `k`'s full spherical-wavefront response
    /// at `(r_k, 0)`.
    pub fn new(r_k: f64, r_j: f64, m_prime: usize, cfg: &ArrayConfig) -> Result<Self> {
        if m_prime == 0 || m_prime > cfg.num_antennas() {
            return Err(Error::InvalidParameter(format!(
                "effective aperture {m_prime} outside 1..={}",
                cfg.num_antennas()
            )));
        }
        if !(r_j > r_k) {
            return Err(Error::InvalidParameter(format!(
                "interfered user must be farther: r_j = {r_j}, r_k = {r_k}"
            )));
        }
        let user_k = UserPosition::new(r_k, 0.0)?;
        let norm_k = norm_sqr(&steering_vector_sw(&user_k, cfg)).sqrt();
        Ok(InterferenceKernel {
            scale: cfg.ref_power() / (norm_k * r_k * r_j),
            m_prime,
            spacing_ratio: cfg.element_spacing() / cfg.wavelength(),
        })
    }

    pub fn m_prime(&self) -> usize {
        self.m_prime
    }

    /// `beta0 / (||a_k|| r_k r_j)`
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Kernel value at broadside, its maximum.
    pub fn peak(&self) -> f64 {
        self.scale * self.m_prime as f64
    }

    /// Threshold in units of the Dirichlet ratio: `alpha / scale`.
    pub fn alpha_prime(&self, alpha: f64) -> f64 {
        alpha / self.scale
    }

    pub fn eval(&self, theta_j: f64) -> f64 {
        self.scale * dirichlet(PI * self.spacing_ratio * theta_j.sin(), self.m_prime)
    }
}

/// `|sin(n x) / sin(x)|`, continuous across the zeros of `sin(x)`.
fn dirichlet(x: f64, n: usize) -> f64 {
    let n_f = n as f64;
    let s = x.sin();
    if s.abs() < 1e-9 {
        // sin(x) ~ +-(x - k pi): the ratio tends to n cos(n x) / cos(x)
        return (n_f * (n_f * x).cos() / x.cos()).abs();
    }
    ((n_f * x).sin() / s).abs()
}

pub fn interference_kernel(
    theta_j: f64,
    r_k: f64,
    r_j: f64,
    m_prime: usize,
    cfg: &ArrayConfig,
) -> Result<f64> {
    Ok(InterferenceKernel::new(r_k, r_j, m_prime, cfg)?.eval(theta_j))
}

/// Which bound on `sin(pi d sin(theta) / lambda)` over a partition is used to
/// turn `i(theta) < alpha` into a condition on the numerator alone.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CrossingLevel {
    /// Largest value of the denominator on the partition. The resulting
    /// intervals contain the event, so the probability is bounded from above.
    /// Adds the closing partition that reaches `pi/2`.
    #[default]
    UpperEdge,
    /// Smallest value of the denominator (`sin(pi q / M')`). The intervals are
    /// contained in the event, so this under-estimates the probability, and
    /// the first partition contributes nothing.
    LowerEdge,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionRow {
    pub q: usize,
    /// Kernel zero opening the partition.
    pub lower: f64,
    /// Kernel zero closing the partition (`pi/2` for the closing partition).
    pub upper: f64,
    pub crossing_lower: f64,
    pub crossing_upper: f64,
    /// Denominator bound used for the crossings.
    pub denominator: f64,
    /// The crossing level reached the lobe peak; the whole partition counts.
    pub clamped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionTable {
    pub rows: Vec<PartitionRow>,
    pub alpha_prime: f64,
    pub level: CrossingLevel,
}

fn check_spacing(cfg_ratio: f64) -> Result<()> {
    if (cfg_ratio - 0.5).abs() > 1e-9 {
        return Err(Error::UnsupportedSpacing(cfg_ratio));
    }
    Ok(())
}

/// Partitions of `[0, pi/2]` between consecutive kernel zeros and the angles
/// where the numerator `|sin(pi d M' sin(theta) / lambda)|` crosses
/// `alpha' * denominator`.
pub fn partition_table(
    alpha: f64,
    kernel: &InterferenceKernel,
    level: CrossingLevel,
) -> Result<PartitionTable> {
    let mp = kernel.m_prime;
    if mp < 3 || mp.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "effective aperture must be odd and at least 3, got {mp}"
        )));
    }
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("threshold must be nonnegative, got {alpha}")));
    }
    check_spacing(kernel.spacing_ratio)?;
    let alpha_prime = kernel.alpha_prime(alpha);
    // lambda / (d M')
    let step = 1.0 / (kernel.spacing_ratio * mp as f64);
    let mp_f = mp as f64;
    let last = match level {
        CrossingLevel::UpperEdge => (mp - 1) / 2,
        CrossingLevel::LowerEdge => (mp - 3) / 2,
    };
    let rows = (0..=last)
        .map(|q| {
            let q_f = q as f64;
            let closing = q == (mp - 1) / 2;
            let denominator = match level {
                CrossingLevel::UpperEdge => (PI * (q_f + 1.0) / mp_f).min(FRAC_PI_2).sin(),
                CrossingLevel::LowerEdge => (PI * q_f / mp_f).sin(),
            };
            let c = alpha_prime * denominator;
            let clamped = c >= 1.0;
            let shift = c.min(1.0).asin() / PI * step;
            let lower = (step * q_f).min(1.0).asin();
            let crossing_lower = (step * q_f + shift).min(1.0).asin();
            let (upper, crossing_upper) = if closing {
                (FRAC_PI_2, FRAC_PI_2)
            } else {
                let upper = (step * (q_f + 1.0)).asin();
                (upper, (step * (q_f + 1.0) - shift).asin())
            };
            PartitionRow {
                q,
                lower,
                upper,
                crossing_lower,
                crossing_upper,
                denominator,
                clamped,
            }
        })
        .collect();
    Ok(PartitionTable {
        rows,
        alpha_prime,
        level,
    })
}

/// Distribution of the interfered user's angle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleModel {
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
}

impl AngleModel {
    pub const HALF_PI: AngleModel = AngleModel::Uniform {
        half_width: FRAC_PI_2,
    };
    pub const QUARTER_PI: AngleModel = AngleModel::Uniform {
        half_width: FRAC_PI_4,
    };

    fn validate(&self) -> Result<()> {
        match *self {
            AngleModel::Uniform { half_width } if half_width > 0.0 && half_width <= FRAC_PI_2 => {
                Ok(())
            }
            AngleModel::Uniform { half_width } => Err(Error::InvalidParameter(format!(
                "uniform angle half-width must lie in (0, pi/2], got {half_width}"
            ))),
        }
    }

    /// `P{theta in [a, b]}` for `0 <= a <= b`.
    pub fn probability(&self, a: f64, b: f64) -> f64 {
        match *self {
            AngleModel::Uniform { half_width } => {
                (b.min(half_width) - a.min(half_width)).max(0.0) / (2.0 * half_width)
            }
        }
    }

    fn sampler(&self) -> Uniform<f64> {
        match *self {
            AngleModel::Uniform { half_width } => {
                Uniform::new_inclusive(-half_width, half_width).expect("validated half-width")
            }
        }
    }
}

impl Default for AngleModel {
    fn default() -> Self {
        AngleModel::HALF_PI
    }
}

impl FromStr for AngleModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "half-pi" => Ok(AngleModel::HALF_PI),
            "quarter-pi" => Ok(AngleModel::QUARTER_PI),
            other => Err(Error::InvalidParameter(format!(
                "unknown angle model '{other}' (expected half-pi or quarter-pi)"
            ))),
        }
    }
}

/// Closed-form probability that the kernel stays below `alpha`, built from
/// the partition table. With the default [`CrossingLevel::UpperEdge`] it is an
/// upper bound. An aperture of a single element has no partitions and
/// returns zero.
pub fn semiorth_prob_bound(
    alpha: f64,
    kernel: &InterferenceKernel,
    angle_model: AngleModel,
    level: CrossingLevel,
) -> Result<f64> {
    angle_model.validate()?;
    if kernel.m_prime == 1 {
        return Ok(0.0);
    }
    let table = partition_table(alpha, kernel, level)?;
    let half: f64 = match level {
        // rows tile [0, pi/2]: subtract the gaps between crossings so that
        // fully clamped tables give exactly one
        CrossingLevel::UpperEdge => {
            angle_model.probability(0.0, FRAC_PI_2)
                - table
                    .rows
                    .iter()
                    .filter(|row| !row.clamped)
                    .map(|row| angle_model.probability(row.crossing_lower, row.crossing_upper))
                    .sum::<f64>()
        }
        CrossingLevel::LowerEdge => table
            .rows
            .iter()
            .map(|row| {
                angle_model.probability(row.lower, row.crossing_lower)
                    + angle_model.probability(row.crossing_upper, row.upper)
            })
            .sum(),
    };
    Ok((2.0 * half).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
}

/// Minimum number of Monte-Carlo draws.
pub const MIN_MC_SAMPLES: u64 = 10_000;
const SHARD: u64 = 8192;

/// Fraction of angles drawn from `angle_model` with `i(theta) < alpha`.
///
/// Draws are split into fixed-size shards, shard `s` using ChaCha stream `s`
/// of `seed`, so the estimate does not depend on the thread count.
pub fn semiorth_prob_mc(
    alpha: f64,
    kernel: &InterferenceKernel,
    angle_model: AngleModel,
    samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    angle_model.validate()?;
    if samples < MIN_MC_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_MC_SAMPLES} samples, got {samples}"
        )));
    }
    let dist = angle_model.sampler();
    let shards = samples.div_ceil(SHARD);
    let hits: u64 = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let n = SHARD.min(samples - s * SHARD);
            (0..n)
                .filter(|_| kernel.eval(dist.sample(&mut rng)) < alpha)
                .count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

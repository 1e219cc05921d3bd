//! Uniform linear array geometry and line-of-sight array response vectors.
//!
//! The array lies on the ordinate axis, centered at the origin. Element `i`
//! (for `i` in `0..M`) sits at `y_i = d * (i - (M - 1) / 2)`, so the signed
//! element index `m = i - (M - 1) / 2` is half-integer when `M` is even.
//! Users are described in polar coordinates `(r, theta)` measured from the
//! array center with `theta` taken from the abscissa.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Radio and geometry constants of the base-station array.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrayConfig {
    num_antennas: usize,
    element_spacing: f64,
    wavelength: f64,
    ref_power: f64,
    noise_power: f64,
    tx_power: f64,
}

impl ArrayConfig {
    pub fn new(
        num_antennas: usize,
        element_spacing: f64,
        wavelength: f64,
        ref_power: f64,
        noise_power: f64,
        tx_power: f64,
    ) -> Result<Self> {
        let cfg = ArrayConfig {
            num_antennas,
            element_spacing,
            wavelength,
            ref_power,
            noise_power,
            tx_power,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Half-wavelength array with unit reference power, unit noise and unit
    /// transmit power.
    pub fn half_wavelength(num_antennas: usize, element_spacing: f64) -> Result<Self> {
        Self::new(num_antennas, element_spacing, 2.0 * element_spacing, 1.0, 1.0, 1.0)
    }

    /// Sets the noise power so that the transmit SNR `ref_power / noise_power`
    /// equals `snr_db`.
    pub fn with_snr_db(mut self, snr_db: f64) -> Result<Self> {
        self.noise_power = self.ref_power * 10f64.powf(-snr_db / 10.0);
        self.validate()?;
        Ok(self)
    }

    pub fn with_tx_power(mut self, tx_power: f64) -> Result<Self> {
        self.tx_power = tx_power;
        self.validate()?;
        Ok(self)
    }

    pub fn with_ref_power(mut self, ref_power: f64) -> Result<Self> {
        self.ref_power = ref_power;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise_power(mut self, noise_power: f64) -> Result<Self> {
        self.noise_power = noise_power;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if self.num_antennas == 0 {
            return Err(Error::InvalidConfig("num_antennas must be at least 1".into()));
        }
        positive("element_spacing", self.element_spacing)?;
        positive("wavelength", self.wavelength)?;
        positive("ref_power", self.ref_power)?;
        positive("noise_power", self.noise_power)?;
        positive("tx_power", self.tx_power)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn element_spacing(&self) -> f64 {
        self.element_spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn ref_power(&self) -> f64 {
        self.ref_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * (self.ref_power / self.noise_power).log10()
    }

    /// Signed index `m` of element `i`, in units of the element spacing.
    #[inline]
    pub fn element_offset(&self, i: usize) -> f64 {
        i as f64 - (self.num_antennas as f64 - 1.0) / 2.0
    }

    pub fn element_offsets(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.num_antennas).map(move |i| self.element_offset(i))
    }

    /// Maps a signed index back to its position in `0..M`, if it is on the grid.
    pub fn grid_position(&self, m: f64) -> Option<usize> {
        let pos = m + (self.num_antennas as f64 - 1.0) / 2.0;
        let rounded = pos.round();
        if (pos - rounded).abs() > 1e-9 || rounded < 0.0 || rounded >= self.num_antennas as f64 {
            None
        } else {
            Some(rounded as usize)
        }
    }

    /// Near-field / far-field boundary `9 M d`.
    pub fn critical_distance(&self) -> f64 {
        critical_distance(self)
    }
}

/// Position of a single-antenna user relative to the array center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UserPosition {
    distance: f64,
    angle: f64,
}

impl UserPosition {
    pub fn new(distance: f64, angle: f64) -> Result<Self> {
        if !(distance.is_finite() && distance > 0.0 && angle.abs() < FRAC_PI_2) {
            return Err(Error::InvalidUser { distance, angle });
        }
        Ok(UserPosition { distance, angle })
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelModel {
    /// Exact per-element distances.
    Spherical,
    /// Far-field linear-phase approximation.
    Planar,
}

impl ChannelModel {
    pub const ALL: [ChannelModel; 2] = [ChannelModel::Spherical, ChannelModel::Planar];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelModel::Spherical => "sw",
            ChannelModel::Planar => "pw",
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sw" => Ok(ChannelModel::Spherical),
            "pw" => Ok(ChannelModel::Planar),
            other => Err(Error::InvalidParameter(format!("unknown channel model '{other}'"))),
        }
    }
}

/// Distance from `user` to the element with signed index `m`.
pub fn element_distance(user: &UserPosition, cfg: &ArrayConfig, m: f64) -> Result<f64> {
    if cfg.grid_position(m).is_none() {
        return Err(Error::IndexOffGrid(m));
    }
    Ok(element_distance_unchecked(user, cfg.element_spacing, m))
}

#[inline]
fn element_distance_unchecked(user: &UserPosition, spacing: f64, m: f64) -> f64 {
    let dk = spacing / user.distance;
    user.distance * (1.0 - 2.0 * m * dk * user.angle.sin() + dk * dk * m * m).sqrt()
}

/// Spherical-wavefront array response of `user`.
pub fn steering_vector_sw(user: &UserPosition, cfg: &ArrayConfig) -> Vec<Complex64> {
    let amp = cfg.ref_power.sqrt();
    let k = 2.0 * PI / cfg.wavelength;
    cfg.element_offsets()
        .map(|m| {
            let r = element_distance_unchecked(user, cfg.element_spacing, m);
            Complex64::from_polar(amp / r, -k * r)
        })
        .collect()
}

/// Plane-wave (far-field) array response of `user`.
pub fn steering_vector_pw(user: &UserPosition, cfg: &ArrayConfig) -> Vec<Complex64> {
    let amp = cfg.ref_power.sqrt() / user.distance;
    let k = 2.0 * PI / cfg.wavelength;
    let sin_t = user.angle.sin();
    cfg.element_offsets()
        .map(|m| {
            Complex64::from_polar(amp, -k * (user.distance - m * cfg.element_spacing * sin_t))
        })
        .collect()
}

pub fn steering_vector(user: &UserPosition, cfg: &ArrayConfig, model: ChannelModel) -> Vec<Complex64> {
    match model {
        ChannelModel::Spherical => steering_vector_sw(user, cfg),
        ChannelModel::Planar => steering_vector_pw(user, cfg),
    }
}

pub fn critical_distance(cfg: &ArrayConfig) -> f64 {
    9.0 * cfg.num_antennas as f64 * cfg.element_spacing
}

/// Column-major stack of array responses, one column per user.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelMatrix {
    num_antennas: usize,
    num_users: usize,
    data: Vec<Complex64>,
    model: ChannelModel,
}

impl ChannelMatrix {
    pub fn build(users: &[UserPosition], cfg: &ArrayConfig, model: ChannelModel) -> Self {
        let m = cfg.num_antennas();
        let mut data = Vec::with_capacity(m * users.len());
        for user in users {
            data.extend(steering_vector(user, cfg, model));
        }
        ChannelMatrix {
            num_antennas: m,
            num_users: users.len(),
            data,
            model,
        }
    }

    pub fn from_columns(model: ChannelModel, columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let num_antennas = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != num_antennas) {
            return Err(Error::DimensionMismatch("columns have different lengths".into()));
        }
        let num_users = columns.len();
        Ok(ChannelMatrix {
            num_antennas,
            num_users,
            data: columns.into_iter().flatten().collect(),
            model,
        })
    }

    /// Sub-matrix with the given columns, in the given order.
    pub fn select(&self, users: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.num_antennas * users.len());
        for &k in users {
            data.extend_from_slice(self.column(k));
        }
        ChannelMatrix {
            num_antennas: self.num_antennas,
            num_users: users.len(),
            data,
            model: self.model,
        }
    }

    #[inline]
    pub fn column(&self, k: usize) -> &[Complex64] {
        &self.data[k * self.num_antennas..(k + 1) * self.num_antennas]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.num_antennas.max(1)).take(self.num_users)
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn model(&self) -> ChannelModel {
        self.model
    }
}

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::array::{ArrayConfig, ChannelModel};
use crate::error::{Error, Result};
use crate::scheduling::{Method, StoppingRule};

/// Element spacing used unless configured otherwise (meters, half a
/// wavelength at 2.4 GHz).
pub const DEFAULT_SPACING: f64 = 0.0628;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// M in {64, 128, 256}, K = 200, 100 trials.
    Desk,
    /// M = 1000, K = 1000, 1000 trials.
    Paper,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset '{other}' (expected desk or paper)"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Desk => "desk",
            Preset::Paper => "paper",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub num_users: usize,
    pub antenna_counts: Vec<usize>,
    pub snr_grid_db: Vec<f64>,
    /// `[r_min, r_max]` in meters. `None` picks a range per array size, see
    /// [`CampaignConfig::distance_range_for`].
    pub distance_range: Option<(f64, f64)>,
    /// `[theta_min, theta_max]` in radians.
    pub angle_range: (f64, f64),
    pub trials: u64,
    pub seed: u64,
    pub models: Vec<ChannelModel>,
    pub methods: Vec<Method>,
    pub sus_alpha: f64,
    pub aperture_eta: f64,
    pub element_spacing: f64,
    pub rate_reduction: bool,
    pub max_equivalent_distance: Option<f64>,
    /// Worker threads for trials; `None` uses all cores.
    pub workers: Option<usize>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig::preset(Preset::Desk)
    }
}

impl CampaignConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut cfg = CampaignConfig {
            num_users: 200,
            antenna_counts: vec![64, 128, 256],
            snr_grid_db: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            distance_range: None,
            angle_range: (-FRAC_PI_4, FRAC_PI_4),
            trials: 100,
            seed: 1,
            models: ChannelModel::ALL.to_vec(),
            methods: Method::ALL.to_vec(),
            sus_alpha: 1.0,
            aperture_eta: 0.95,
            element_spacing: DEFAULT_SPACING,
            rate_reduction: true,
            max_equivalent_distance: None,
            workers: None,
        };
        cfg.apply_preset(preset);
        cfg
    }

    /// Overwrites the scale parameters (array sizes, user count, trials).
    pub fn apply_preset(&mut self, preset: Preset) {
        match preset {
            Preset::Desk => {
                self.num_users = 200;
                self.antenna_counts = vec![64, 128, 256];
                self.trials = 100;
            }
            Preset::Paper => {
                self.num_users = 1000;
                self.antenna_counts = vec![1000];
                self.trials = 1000;
            }
        }
    }

    /// Reads a `key = value` file on top of the desk preset.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses `key = value` lines. `#` starts a comment. A `preset` key resets
    /// the scale parameters at the point where it appears.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = CampaignConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigParse {
                line: i + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            cfg.set(key.trim(), value.trim()).map_err(|e| Error::ConfigParse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "preset" => self.apply_preset(value.parse()?),
            "num_users" => self.num_users = parse_value(key, value)?,
            "antenna_counts" => self.antenna_counts = parse_list(key, value)?,
            "snr_grid_db" => self.snr_grid_db = parse_list(key, value)?,
            "distance_range" => {
                self.distance_range = if value == "auto" {
                    None
                } else {
                    Some(parse_pair(key, value)?)
                }
            }
            "angle_range" => self.angle_range = parse_pair(key, value)?,
            "trials" => self.trials = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "models" => self.models = parse_list(key, value)?,
            "methods" => self.methods = parse_list(key, value)?,
            "sus_alpha" => self.sus_alpha = parse_value(key, value)?,
            "aperture_eta" => self.aperture_eta = parse_value(key, value)?,
            "element_spacing" => self.element_spacing = parse_value(key, value)?,
            "rate_reduction" => self.rate_reduction = parse_value(key, value)?,
            "max_equivalent_distance" => {
                self.max_equivalent_distance = if value == "none" {
                    None
                } else {
                    Some(parse_value(key, value)?)
                }
            }
            "workers" => {
                self.workers = if value == "auto" {
                    None
                } else {
                    Some(parse_value(key, value)?)
                }
            }
            other => return Err(Error::InvalidParameter(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.num_users == 0 {
            return bad("num_users must be at least 1".into());
        }
        if self.antenna_counts.is_empty() || self.antenna_counts.contains(&0) {
            return bad("antenna_counts must be a nonempty list of positive counts".into());
        }
        if self.antenna_counts.iter().any(|&m| m as u64 > u32::MAX as u64) {
            return bad("antenna counts must fit in 32 bits".into());
        }
        if self.snr_grid_db.is_empty() || self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return bad("snr_grid_db must be a nonempty list of finite values".into());
        }
        if self.trials == 0 || self.trials > u32::MAX as u64 {
            return bad(format!("trials must lie in 1..=2^32-1, got {}", self.trials));
        }
        if let Some((lo, hi)) = self.distance_range {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return bad(format!("distance_range must satisfy 0 < r_min < r_max, got [{lo}, {hi}]"));
            }
        }
        let (a, b) = self.angle_range;
        if !(a > -FRAC_PI_2 && b < FRAC_PI_2 && a <= b) {
            return bad(format!("angle_range must lie inside (-pi/2, pi/2), got [{a}, {b}]"));
        }
        if self.models.is_empty() || self.methods.is_empty() {
            return bad("models and methods must be nonempty".into());
        }
        if !(self.sus_alpha > 0.0 && self.sus_alpha <= 1.0) {
            return bad(format!("sus_alpha must lie in (0, 1], got {}", self.sus_alpha));
        }
        if !(self.aperture_eta > 0.0 && self.aperture_eta < 1.0) {
            return bad(format!("aperture_eta must lie in (0, 1), got {}", self.aperture_eta));
        }
        if !(self.element_spacing > 0.0 && self.element_spacing.is_finite()) {
            return bad(format!("element_spacing must be positive, got {}", self.element_spacing));
        }
        if self.max_equivalent_distance.is_some_and(|c| !(c > 0.0)) {
            return bad("max_equivalent_distance must be positive".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        Ok(())
    }

    pub fn array_config(&self, num_antennas: usize, snr_db: f64) -> Result<ArrayConfig> {
        ArrayConfig::half_wavelength(num_antennas, self.element_spacing)?.with_snr_db(snr_db)
    }

    /// `[40, 2 r_cri - 40]` m when the critical distance exceeds 40 m,
    /// otherwise `[r_cri / 2, 3 r_cri / 2]`, unless a range is configured.
    pub fn distance_range_for(&self, num_antennas: usize) -> (f64, f64) {
        if let Some(range) = self.distance_range {
            return range;
        }
        let r_cri = 9.0 * num_antennas as f64 * self.element_spacing;
        if r_cri > 40.0 {
            (40.0, 2.0 * r_cri - 40.0)
        } else {
            (0.5 * r_cri, 1.5 * r_cri)
        }
    }

    pub fn stopping_rule(&self) -> StoppingRule {
        StoppingRule {
            rate_reduction: self.rate_reduction,
            max_equivalent_distance: self.max_equivalent_distance,
        }
    }

    /// Number of rows a full campaign produces.
    pub fn row_count(&self) -> usize {
        self.snr_grid_db.len()
            * self.antenna_counts.len()
            * self.models.len()
            * self.methods.len()
            * self.trials as usize
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("{key}: cannot parse '{value}': {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn parse_pair(key: &str, value: &str) -> Result<(f64, f64)> {
    match parse_list::<f64>(key, value)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(Error::InvalidParameter(format!("{key}: expected two values, got '{value}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let text = "\
# campaign
num_users = 12
antenna_counts = 16, 32
snr_grid_db = 0,10
distance_range = 5, 50
angle_range = -0.5, 0.5   # radians
trials = 3
seed = 99
models = sw
methods = dbs, dbs_s, sus
sus_alpha = 0.8
aperture_eta = 0.9
element_spacing = 0.05
rate_reduction = false
max_equivalent_distance = 120
workers = 2
";
        let cfg = CampaignConfig::parse(text).unwrap();
        assert_eq!(cfg.num_users, 12);
        assert_eq!(cfg.antenna_counts, vec![16, 32]);
        assert_eq!(cfg.snr_grid_db, vec![0.0, 10.0]);
        assert_eq!(cfg.distance_range, Some((5.0, 50.0)));
        assert_eq!(cfg.angle_range, (-0.5, 0.5));
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.models, vec![ChannelModel::Spherical]);
        assert_eq!(cfg.methods, vec![Method::Dbs, Method::DbsS, Method::Sus]);
        assert_eq!(cfg.sus_alpha, 0.8);
        assert_eq!(cfg.aperture_eta, 0.9);
        assert_eq!(cfg.element_spacing, 0.05);
        assert!(!cfg.rate_reduction);
        assert_eq!(cfg.max_equivalent_distance, Some(120.0));
        assert_eq!(cfg.workers, Some(2));
        assert_eq!(cfg.row_count(), 2 * 2 * 1 * 3 * 3);
    }

    #[test]
    fn unknown_key_is_an_error() {
        let err = CampaignConfig::parse("num_users = 4\nfoo = 1\n").unwrap_err();
        assert!(matches!(err, Error::ConfigParse { line: 2, .. }), "{err}");
    }

    #[test]
    fn malformed_lines_rejected() {
        assert!(CampaignConfig::parse("num_users 4").is_err());
        assert!(CampaignConfig::parse("trials = many").is_err());
        assert!(CampaignConfig::parse("trials = 0").is_err());
        assert!(CampaignConfig::parse("distance_range = 50, 5").is_err());
        assert!(CampaignConfig::parse("distance_range = 5").is_err());
        assert!(CampaignConfig::parse("angle_range = -2, 0").is_err());
        assert!(CampaignConfig::parse("methods = zf").is_err());
        assert!(CampaignConfig::parse("models = sw, xw").is_err());
    }

    #[test]
    fn presets() {
        let paper = CampaignConfig::parse("preset = paper\nseed = 3").unwrap();
        assert_eq!(paper.antenna_counts, vec![1000]);
        assert_eq!((paper.num_users, paper.trials, paper.seed), (1000, 1000, 3));
        let desk = CampaignConfig::default();
        assert_eq!(desk.antenna_counts, vec![64, 128, 256]);
        assert_eq!((desk.num_users, desk.trials), (200, 100));
        assert_eq!(desk.snr_grid_db, vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0]);
    }

    #[test]
    fn default_distance_range() {
        let cfg = CampaignConfig::default();
        let (lo, hi) = cfg.distance_range_for(1000);
        assert_eq!(lo, 40.0);
        assert!((hi - 1090.4).abs() < 1e-9);
        // critical distance below 40 m
        let (lo, hi) = cfg.distance_range_for(64);
        let r_cri = 9.0 * 64.0 * DEFAULT_SPACING;
        assert!((lo - r_cri / 2.0).abs() < 1e-12 && (hi - 1.5 * r_cri).abs() < 1e-12);
    }
}

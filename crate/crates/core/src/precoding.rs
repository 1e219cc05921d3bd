//! Zero-forcing and maximum-ratio precoders.
//!
//! Zero-forcing uses the Gram system of the scheduled channels: with `G` the
//! `M x n` matrix whose columns are the channels, the unnormalized precoders
//! are `G (G^H G)^-1`, so that `f_j^H a_k = 0` for every `j != k`. The
//! schedulers grow the scheduled set one user at a time, so the Gram system
//! is kept as the inverse of its Cholesky factor and extended by one row per
//! admitted user.

use num_complex::Complex64;

use crate::array::ChannelMatrix;
use crate::error::{Error, Result};

/// Smallest admissible ratio between a user's zero-forcing gain and its
/// matched-filter gain `||a_k||^2`. Below it the set is treated as rank
/// deficient.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// `a^H b`
#[inline]
pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Unit-norm precoders, one column per scheduled user.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecoderSet {
    num_antennas: usize,
    columns: Vec<Complex64>,
    user_ids: Vec<usize>,
}

impl PrecoderSet {
    pub fn new(num_antennas: usize, user_ids: Vec<usize>, columns: Vec<Complex64>) -> Result<Self> {
        if columns.len() != num_antennas * user_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for {} users of length {num_antennas}",
                columns.len(),
                user_ids.len()
            )));
        }
        Ok(PrecoderSet {
            num_antennas,
            columns,
            user_ids,
        })
    }

    pub fn empty(num_antennas: usize) -> Self {
        PrecoderSet {
            num_antennas,
            columns: Vec::new(),
            user_ids: Vec::new(),
        }
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.columns[j * self.num_antennas..(j + 1) * self.num_antennas]
    }

    pub fn user_ids(&self) -> &[usize] {
        &self.user_ids
    }

    pub fn len(&self) -> usize {
        self.user_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.user_ids.is_empty()
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    /// Checks that every scheduled id indexes into `channels` and that the
    /// antenna counts agree.
    pub(crate) fn check_against(&self, channels: &ChannelMatrix) -> Result<()> {
        if channels.num_antennas() != self.num_antennas {
            return Err(Error::DimensionMismatch(format!(
                "precoders have {} antennas, channels {}",
                self.num_antennas,
                channels.num_antennas()
            )));
        }
        let mut seen = vec![false; channels.num_users()];
        for &k in &self.user_ids {
            if k >= channels.num_users() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::DimensionMismatch(format!(
                    "user id {k} is out of range or repeated"
                )));
            }
        }
        Ok(())
    }
}

/// Incrementally maintained zero-forcing solution for a growing user set.
///
/// Holds the rows of `L^-1`, where `L L^H = G^H G`, and the diagonal of
/// `(G^H G)^-1`. The zero-forcing gain of member `j` is `1 / [(G^H G)^-1]_jj`.
pub(crate) struct ZfEngine<'a> {
    channels: &'a ChannelMatrix,
    members: Vec<usize>,
    norms: Vec<f64>,
    // cross[k][i] = a_{members[i]}^H a_k, filled lazily
    cross: Vec<Vec<Complex64>>,
    linv: Vec<Vec<Complex64>>,
    inv_diag: Vec<f64>,
    saved_inv_diag: Vec<Vec<f64>>,
}

impl<'a> ZfEngine<'a> {
    pub(crate) fn new(channels: &'a ChannelMatrix) -> Self {
        let k = channels.num_users();
        ZfEngine {
            channels,
            members: Vec::new(),
            norms: vec![f64::NAN; k],
            cross: vec![Vec::new(); k],
            linv: Vec::new(),
            inv_diag: Vec::new(),
            saved_inv_diag: Vec::new(),
        }
    }

    pub(crate) fn members(&self) -> &[usize] {
        &self.members
    }

    pub(crate) fn len(&self) -> usize {
        self.members.len()
    }

    pub(crate) fn norm_sqr(&mut self, k: usize) -> f64 {
        if self.norms[k].is_nan() {
            self.norms[k] = norm_sqr(self.channels.column(k));
        }
        self.norms[k]
    }

    /// Inner products of user `k` with every current member.
    pub(crate) fn cross(&mut self, k: usize) -> &[Complex64] {
        let n = self.members.len();
        let cached = &mut self.cross[k];
        cached.truncate(n);
        let ak = self.channels.column(k);
        for &j in &self.members[cached.len()..] {
            cached.push(dot(self.channels.column(j), ak));
        }
        &self.cross[k]
    }

    /// `(G^H G)^-1 h`
    fn gram_solve(&self, h: &[Complex64]) -> Vec<Complex64> {
        let n = self.members.len();
        let y: Vec<Complex64> = (0..n)
            .map(|i| self.linv[i].iter().zip(h).map(|(l, x)| l * x).sum())
            .collect();
        (0..n)
            .map(|j| (j..n).map(|i| self.linv[i][j].conj() * y[i]).sum())
            .collect()
    }

    /// Received interference `sum_j |f_j^H a_k|^2` of a non-member `k` under
    /// the current normalized zero-forcing precoders.
    pub(crate) fn interference(&mut self, k: usize) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        let h = self.cross(k).to_vec();
        self.gram_solve(&h)
            .iter()
            .zip(&self.inv_diag)
            .map(|(w, d)| w.norm_sqr() / d)
            .sum()
    }

    /// Appends user `k`. On rank deficiency the engine is left unchanged.
    pub(crate) fn push(&mut self, k: usize) -> Result<()> {
        let n = self.members.len();
        let c = self.norm_sqr(k);
        let b = self.cross(k).to_vec();
        // l = L^-1 b
        let l: Vec<Complex64> = (0..n)
            .map(|i| self.linv[i].iter().zip(&b).map(|(x, y)| x * y).sum())
            .collect();
        let pivot = c - l.iter().map(|x| x.norm_sqr()).sum::<f64>();
        if !(pivot > RANK_TOLERANCE * c) {
            return Err(Error::RankDeficient { user: k });
        }
        let delta = pivot.sqrt();
        let mut row = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, li) in l.iter().enumerate() {
            let s = li.conj() / delta;
            for (r, x) in row.iter_mut().zip(&self.linv[i]) {
                *r -= s * x;
            }
        }
        row[n] = Complex64::new(1.0 / delta, 0.0);

        self.saved_inv_diag.push(self.inv_diag.clone());
        for (d, r) in self.inv_diag.iter_mut().zip(&row) {
            *d += r.norm_sqr();
        }
        self.inv_diag.push(1.0 / pivot);
        self.linv.push(row);
        self.members.push(k);

        // member norms are always cached by the time they were pushed
        let worst = self
            .members
            .iter()
            .zip(&self.inv_diag)
            .map(|(&j, d)| 1.0 / (d * self.norms[j]))
            .fold(f64::INFINITY, f64::min);
        if !(worst >= RANK_TOLERANCE) {
            self.pop();
            return Err(Error::RankDeficient { user: k });
        }
        Ok(())
    }

    /// Removes the most recently pushed member.
    pub(crate) fn pop(&mut self) {
        if self.members.pop().is_some() {
            self.linv.pop();
            self.inv_diag = self.saved_inv_diag.pop().unwrap_or_default();
        }
    }

    /// Zero-forcing gains `|f_j^H a_j|^2`, in member order.
    pub(crate) fn gains(&self) -> Vec<f64> {
        self.inv_diag.iter().map(|d| 1.0 / d).collect()
    }

    /// Normalized zero-forcing precoders for the current members.
    pub(crate) fn precoders(&self) -> PrecoderSet {
        let n = self.members.len();
        let m = self.channels.num_antennas();
        // W = (G^H G)^-1 = L^-H L^-1
        let mut w = vec![Complex64::new(0.0, 0.0); n * n];
        for a in 0..n {
            for b in 0..n {
                w[a * n + b] = (a.max(b)..n)
                    .map(|i| self.linv[i][a].conj() * self.linv[i][b])
                    .sum();
            }
        }
        let mut columns = vec![Complex64::new(0.0, 0.0); m * n];
        for b in 0..n {
            let col = &mut columns[b * m..(b + 1) * m];
            for (a, &user) in self.members.iter().enumerate() {
                let coef = w[a * n + b];
                for (f, g) in col.iter_mut().zip(self.channels.column(user)) {
                    *f += g * coef;
                }
            }
            let scale = 1.0 / norm_sqr(col).sqrt();
            col.iter_mut().for_each(|f| *f *= scale);
        }
        PrecoderSet {
            num_antennas: m,
            columns,
            user_ids: self.members.clone(),
        }
    }
}

/// Normalized zero-forcing precoders for all columns of `channels`, in order.
///
/// Returned user ids are column indices of `channels`.
pub fn zf_precoders(channels: &ChannelMatrix) -> Result<PrecoderSet> {
    if channels.num_users() > channels.num_antennas() {
        return Err(Error::RankDeficient {
            user: channels.num_antennas(),
        });
    }
    let mut engine = ZfEngine::new(channels);
    for k in 0..channels.num_users() {
        engine.push(k)?;
    }
    Ok(engine.precoders())
}

/// Matched-filter direction `a / ||a||`.
pub fn mrt_precoder(channel: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = norm_sqr(channel).sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::InvalidParameter("zero-norm channel has no MRT direction".into()));
    }
    Ok(channel.iter().map(|x| x / norm).collect())
}

/// Per-user gains `|f_k^H a_k|^2` where `channels` holds every user and the
/// precoder ids index into it.
pub fn effective_gains(precoders: &PrecoderSet, channels: &ChannelMatrix) -> Result<Vec<f64>> {
    precoders.check_against(channels)?;
    Ok(precoders
        .user_ids()
        .iter()
        .enumerate()
        .map(|(j, &k)| dot(precoders.column(j), channels.column(k)).norm_sqr())
        .collect())
}

use crate::array::ArrayConfig;
use crate::error::Result;
use crate::nearfield::{
    semiorth_prob_bound, semiorth_prob_mc, AngleModel, CrossingLevel, InterferenceKernel,
};

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRow {
    pub alpha: f64,
    pub m_prime: usize,
    pub r_k: f64,
    pub r_j: f64,
    pub bound: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub mc_samples: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundSweep {
    pub r_k: f64,
    pub r_j: f64,
    pub angle_model: AngleModel,
    pub level: CrossingLevel,
    pub samples: u64,
    pub seed: u64,
    /// Thresholds are multiples of `beta0 / (||a_k|| r_k r_j)` rather than
    /// absolute values.
    pub relative_alpha: bool,
}

impl BoundSweep {
    /// Bound and Monte-Carlo estimate for every `(M', alpha)` pair. Every
    /// point uses the same sampling seed.
    pub fn run(&self, alphas: &[f64], m_primes: &[usize], array: &ArrayConfig) -> Result<Vec<BoundRow>> {
        let mut rows = Vec::with_capacity(alphas.len() * m_primes.len());
        for &mp in m_primes {
            let kernel = InterferenceKernel::new(self.r_k, self.r_j, mp, array)?;
            for &a in alphas {
                let alpha = if self.relative_alpha { a * kernel.scale() } else { a };
                let bound = semiorth_prob_bound(alpha, &kernel, self.angle_model, self.level)?;
                let mc = semiorth_prob_mc(alpha, &kernel, self.angle_model, self.samples, self.seed)?;
                rows.push(BoundRow {
                    alpha,
                    m_prime: mp,
                    r_k: self.r_k,
                    r_j: self.r_j,
                    bound,
                    mc_estimate: mc.estimate,
                    mc_stderr: mc.stderr,
                    mc_samples: mc.samples,
                });
            }
        }
        Ok(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_covers_grid() {
        let array = ArrayConfig::half_wavelength(64, 0.0628).unwrap();
        let sweep = BoundSweep {
            r_k: 5.0,
            r_j: 15.0,
            angle_model: AngleModel::default(),
            level: CrossingLevel::default(),
            samples: 10_000,
            seed: 1,
            relative_alpha: true,
        };
        let rows = sweep.run(&[0.1, 1.0], &[1, 9], &array).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].bound, 0.0);
        assert!(rows[3].bound >= rows[3].mc_estimate - 3.0 * rows[3].mc_stderr);
        assert!(sweep.run(&[0.1], &[8], &array).is_err());
    }
}

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::linalg::{dot, factor_with_jitter, Cholesky, Matrix};
use crate::error::{Error, Result};

/// Constant prior mean of the process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PriorMean {
    /// Zero mean: the predictive mean is exactly `K_* K⁻¹ y`.
    Zero,
    /// Targets are centred on their sample mean before regression.
    #[default]
    Empirical,
}

/// `K[i][j] = k(x_i, x_j) + noise·[i = j]`.
pub fn covariance_matrix(spec: &KernelSpec, xs: &[f64]) -> Matrix {
    Matrix::from_fn(xs.len(), |i, j| {
        let k = spec.eval(xs[i], xs[j]);
        if i == j {
            k + spec.noise
        } else {
            k
        }
    })
}

/// Cholesky factor of the training covariance, with jitter escalation.
pub fn factor_covariance(spec: &KernelSpec, xs: &[f64]) -> Result<(Cholesky, f64)> {
    if xs.is_empty() {
        return Err(Error::InsufficientData("covariance of an empty round list".into()));
    }
    factor_with_jitter(&covariance_matrix(spec, xs)).ok_or_else(|| {
        Error::Numeric(format!("covariance not positive definite after jitter escalation ({:?})", spec.family))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
}

impl Prediction {
    /// Draw from `Normal(mean, variance)`; exact mean when the variance is 0.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.variance <= 0.0 {
            return self.mean;
        }
        let z: f64 = StandardNormal.sample(rng);
        self.mean + self.variance.sqrt() * z
    }
}

/// One fitted output dimension.
#[derive(Debug, Clone)]
pub struct GpOutput {
    spec: KernelSpec,
    targets: Vec<f64>,
    offset: f64,
    factor: Cholesky,
    /// `K⁻¹ (y - offset)`.
    weights: Vec<f64>,
    jitter: f64,
}

impl GpOutput {
    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn factor(&self) -> &Cholesky {
        &self.factor
    }

    /// `ln p(y | X)` of the centred targets under this spec.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let centred: Vec<f64> = self.targets.iter().map(|y| y - self.offset).collect();
        let n = centred.len() as f64;
        -0.5 * dot(&centred, &self.weights)
            - 0.5 * self.factor.log_det()
            - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Independent Gaussian processes, one per output dimension, sharing the
/// training rounds. Immutable once fitted.
#[derive(Debug, Clone)]
pub struct GpModel {
    rounds: Vec<f64>,
    outputs: Vec<GpOutput>,
}

impl GpModel {
    /// Fit one process per target series; `targets[d][i]` is dimension `d` at `rounds[i]`.
    pub fn fit(rounds: Vec<f64>, targets: Vec<Vec<f64>>, specs: Vec<KernelSpec>, mean: PriorMean) -> Result<Self> {
        if rounds.is_empty() {
            return Err(Error::InsufficientData("a GP needs at least one training round".into()));
        }
        if rounds.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("training rounds must be strictly increasing".into()));
        }
        if targets.is_empty() || targets.len() != specs.len() {
            return Err(Error::Config(format!("{} target series for {} kernel specs", targets.len(), specs.len())));
        }
        let outputs = targets
            .into_iter()
            .zip(specs)
            .map(|(y, spec)| fit_output(&rounds, y, spec, mean))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { rounds, outputs })
    }

    /// Single-output convenience constructor.
    pub fn fit_single(rounds: Vec<f64>, targets: Vec<f64>, spec: KernelSpec, mean: PriorMean) -> Result<Self> {
        Self::fit(rounds, vec![targets], vec![spec], mean)
    }

    pub fn rounds(&self) -> &[f64] {
        &self.rounds
    }

    pub fn outputs(&self) -> &[GpOutput] {
        &self.outputs
    }

    pub fn dims(&self) -> usize {
        self.outputs.len()
    }

    /// Predictive mean and variance of every output at round `x_star`.
    pub fn predict(&self, x_star: f64) -> Vec<Prediction> {
        self.outputs.iter().map(|o| self.predict_output(o, x_star)).collect()
    }

    fn predict_output(&self, out: &GpOutput, x_star: f64) -> Prediction {
        let k_star: Vec<f64> = self.rounds.iter().map(|x| out.spec.eval(x_star, *x)).collect();
        let mean = out.offset + dot(&k_star, &out.weights);
        let v = out.factor.solve_lower(&k_star);
        let raw = out.spec.eval(x_star, x_star) - dot(&v, &v);
        // Tiny negative variances are rounding noise.
        Prediction { mean, variance: raw.max(0.0) }
    }

    /// One independent normal draw per output at `x_star`.
    pub fn sample<R: Rng + ?Sized>(&self, x_star: f64, rng: &mut R) -> Vec<f64> {
        self.predict(x_star).iter().map(|p| p.sample(rng)).collect()
    }
}

fn fit_output(rounds: &[f64], targets: Vec<f64>, spec: KernelSpec, mean: PriorMean) -> Result<GpOutput> {
    spec.validate()?;
    if targets.len() != rounds.len() {
        return Err(Error::Config(format!("{} targets for {} rounds", targets.len(), rounds.len())));
    }
    if targets.iter().any(|y| !y.is_finite()) {
        return Err(Error::Numeric("non-finite GP target".into()));
    }
    let offset = match mean {
        PriorMean::Zero => 0.0,
        PriorMean::Empirical => targets.iter().sum::<f64>() / targets.len() as f64,
    };
    let (factor, jitter) = factor_covariance(&spec, rounds)?;
    let centred: Vec<f64> = targets.iter().map(|y| y - offset).collect();
    let weights = factor.solve(&centred);
    Ok(GpOutput { spec, targets, offset, factor, weights, jitter })
}

pub fn gp_predict(model: &GpModel, x_star: f64) -> Vec<Prediction> {
    model.predict(x_star)
}

pub fn gp_sample<R: Rng + ?Sized>(model: &GpModel, x_star: f64, rng: &mut R) -> Vec<f64> {
    model.sample(x_star, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::KernelFamily;
    use crate::rng::seeded;

    fn rbf_noise_free() -> KernelSpec {
        KernelSpec::default_for(KernelFamily::Rbf).with_noise(0.0)
    }

    #[test]
    fn single_point_matrix() {
        let spec = KernelSpec::default_for(KernelFamily::Matern).with_noise(0.25);
        let k = covariance_matrix(&spec, &[4.0]);
        assert_eq!(k.rows(), vec![vec![1.25]]);
    }

    #[test]
    fn covariance_is_exactly_symmetric() {
        for family in KernelFamily::ALL {
            let spec = KernelSpec::default_for(family);
            assert!(covariance_matrix(&spec, &[1.0, 2.5, 7.0]).is_symmetric());
        }
    }

    #[test]
    fn interpolates_single_training_point() {
        let m = GpModel::fit_single(vec![3.0], vec![2.5], rbf_noise_free(), PriorMean::Zero).unwrap();
        let p = m.predict(3.0)[0];
        assert!((p.mean - 2.5).abs() < 1e-12);
        assert!(p.variance.abs() < 1e-12);
    }

    #[test]
    fn two_point_system_by_hand() {
        // K = [[1, e], [e, 1]], e = exp(-1/2); k* = (f, f), f = exp(-1/8).
        // K⁻¹ y with y = (0, 1): (-e, 1) / (1 - e²).
        // mean = f (1 - e) / (1 - e²) = f / (1 + e); var = 1 - 2 f² / (1 + e).
        let e = (-0.5f64).exp();
        let f = (-0.125f64).exp();
        let m = GpModel::fit_single(vec![1.0, 2.0], vec![0.0, 1.0], rbf_noise_free(), PriorMean::Zero).unwrap();
        let p = m.predict(1.5)[0];
        assert!((p.mean - f / (1.0 + e)).abs() < 1e-12);
        assert!((p.variance - (1.0 - 2.0 * f * f / (1.0 + e))).abs() < 1e-12);
    }

    #[test]
    fn empirical_mean_centres_targets() {
        let m = GpModel::fit_single(vec![1.0, 2.0, 3.0], vec![5.0; 3], rbf_noise_free(), PriorMean::Empirical).unwrap();
        for x in [0.0, 4.0, 100.0] {
            assert!((m.predict(x)[0].mean - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reverts_to_prior_far_away() {
        let spec = KernelSpec { signal_variance: 2.0, ..KernelSpec::default_for(KernelFamily::RationalQuadratic) };
        let m = GpModel::fit_single(vec![1.0, 2.0, 3.0], vec![1.0, 3.0, 2.0], spec, PriorMean::Empirical).unwrap();
        let p = m.predict(1e5)[0];
        assert!((p.variance - 2.0).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_rounds() {
        let spec = rbf_noise_free();
        assert!(GpModel::fit_single(vec![], vec![], spec, PriorMean::Zero).is_err());
        assert!(GpModel::fit_single(vec![2.0, 1.0], vec![0.0, 0.0], spec, PriorMean::Zero).is_err());
        assert!(GpModel::fit_single(vec![1.0, 1.0], vec![0.0, 0.0], spec, PriorMean::Zero).is_err());
    }

    #[test]
    fn zero_variance_sample_is_mean() {
        let m = GpModel::fit_single(vec![1.0], vec![0.75], rbf_noise_free(), PriorMean::Zero).unwrap();
        let mut rng = seeded(0);
        assert_eq!(m.sample(1.0, &mut rng), vec![m.predict(1.0)[0].mean]);
    }

    #[test]
    fn samples_follow_predictive_distribution() {
        let spec = KernelSpec::default_for(KernelFamily::Rbf).with_noise(0.1);
        let m = GpModel::fit_single(vec![1.0, 2.0, 4.0], vec![0.0, 1.0, 0.5], spec, PriorMean::Empirical).unwrap();
        let p = m.predict(3.0)[0];
        let mut rng = seeded(9);
        let draws: Vec<f64> = (0..10_000).map(|_| m.sample(3.0, &mut rng)[0]).collect();
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / draws.len() as f64;
        assert!((mean - p.mean).abs() < 4.0 * p.variance.sqrt() / 100.0);
        assert!((var - p.variance).abs() < 0.1 * p.variance);
    }

    #[test]
    fn equal_seeds_equal_draws() {
        let spec = KernelSpec::default_for(KernelFamily::Rbf).with_noise(0.1);
        let m = GpModel::fit(
            vec![1.0, 2.0],
            vec![vec![0.0, 1.0], vec![3.0, 2.0]],
            vec![spec, spec],
            PriorMean::Empirical,
        )
        .unwrap();
        assert_eq!(m.sample(5.0, &mut seeded(4)), m.sample(5.0, &mut seeded(4)));
    }
}

//! Conditional demonstration: a 1-nearest-neighbor predictor versus the
//! known Bayes predictor on synthetic supervised data, tracking the
//! empirical risk ratio against the 2α ceiling.
//!
//! Covariates are 1-D (uniform on [0,1]) so the neighbor search is a
//! binary search over a sorted array.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as RandDistribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::LossKernel;
use crate::mc::{self, stream};
use crate::risk::{RiskEstimate, RATIO_GUARD};
use crate::space::{Point, SampleSpace};

/// Label-flip probability as a function of the covariate; values must stay
/// in [0, 0.5].
#[derive(Debug, Clone, PartialEq)]
pub enum FlipProb {
    Constant { p: f64 },
    /// intercept + slope·x, clamped to [0, 0.5].
    Linear { intercept: f64, slope: f64 },
}

impl FlipProb {
    fn at(&self, x: f64) -> f64 {
        match self {
            FlipProb::Constant { p } => *p,
            FlipProb::Linear { intercept, slope } => (intercept + slope * x).clamp(0.0, 0.5),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            FlipProb::Constant { p } => {
                if (0.0..=0.5).contains(p) {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "flip probability must lie in [0, 0.5], got {p}"
                    )))
                }
            }
            FlipProb::Linear { intercept, slope } => {
                if intercept.is_finite() && slope.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter("non-finite flip ramp".into()))
                }
            }
        }
    }
}

/// Regression mean function m(x).
#[derive(Debug, Clone, PartialEq)]
pub enum MeanFn {
    /// amplitude · sin(2π · frequency · x)
    Sine { amplitude: f64, frequency: f64 },
    Linear { intercept: f64, slope: f64 },
}

impl MeanFn {
    fn at(&self, x: f64) -> f64 {
        match self {
            MeanFn::Sine {
                amplitude,
                frequency,
            } => amplitude * (2.0 * std::f64::consts::PI * frequency * x).sin(),
            MeanFn::Linear { intercept, slope } => intercept + slope * x,
        }
    }
}

/// Conditional law of the response given the covariate.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionalLaw {
    /// Binary labels 1(x ≥ 1/2), flipped with probability flip_prob(x).
    NoisyLabel { flip_prob: FlipProb },
    /// y = m(x) + σ·Z.
    GaussianRegression { mean: MeanFn, noise_sd: f64 },
}

/// A supervised task with uniform covariates and a known Bayes predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticTask {
    law: ConditionalLaw,
}

impl SyntheticTask {
    pub fn new(law: ConditionalLaw) -> Result<Self> {
        match &law {
            ConditionalLaw::NoisyLabel { flip_prob } => flip_prob.validate()?,
            ConditionalLaw::GaussianRegression { noise_sd, .. } => {
                if !noise_sd.is_finite() || *noise_sd < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "noise sd must be nonnegative, got {noise_sd}"
                    )));
                }
            }
        }
        Ok(SyntheticTask { law })
    }

    pub fn law(&self) -> &ConditionalLaw {
        &self.law
    }

    /// The space responses (and predictions) live in.
    pub fn response_space(&self) -> SampleSpace {
        match self.law {
            ConditionalLaw::NoisyLabel { .. } => SampleSpace::DiscreteLabels { label_count: 2 },
            ConditionalLaw::GaussianRegression { .. } => SampleSpace::RealLine,
        }
    }

    fn base_label(x: f64) -> u32 {
        u32::from(x >= 0.5)
    }

    fn draw_response(&self, x: f64, rng: &mut ChaCha8Rng) -> Point {
        match &self.law {
            ConditionalLaw::NoisyLabel { flip_prob } => {
                let base = Self::base_label(x);
                let u: f64 = rng.gen();
                let label = if u < flip_prob.at(x) { 1 - base } else { base };
                Point::Label(label)
            }
            ConditionalLaw::GaussianRegression { mean, noise_sd } => {
                let noise = if *noise_sd > 0.0 {
                    Normal::new(0.0, *noise_sd).unwrap().sample(rng)
                } else {
                    0.0
                };
                Point::Real(mean.at(x) + noise)
            }
        }
    }

    /// Closed-form Bayes prediction at covariate x.
    fn bayes_predict(&self, x: f64) -> Point {
        match &self.law {
            ConditionalLaw::NoisyLabel { .. } => Point::Label(Self::base_label(x)),
            ConditionalLaw::GaussianRegression { mean, .. } => Point::Real(mean.at(x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NNReport {
    pub n_train: usize,
    pub n_test: usize,
    pub loss: String,
    pub bayes_risk: RiskEstimate,
    pub nn_risk: RiskEstimate,
    /// nn / bayes; absent when the Bayes risk is at the guard.
    pub ratio: Option<f64>,
}

struct SortedTrain {
    /// (covariate, original index into the responses) sorted by covariate.
    xs: Vec<(f64, usize)>,
    responses: Vec<Point>,
}

impl SortedTrain {
    fn build(pairs: Vec<(f64, Point)>) -> Self {
        let responses: Vec<Point> = pairs.iter().map(|(_, y)| y.clone()).collect();
        let mut xs: Vec<(f64, usize)> = pairs
            .iter()
            .enumerate()
            .map(|(i, (x, _))| (*x, i))
            .collect();
        xs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        SortedTrain { xs, responses }
    }

    /// 1-NN response; distance ties break toward the lowest original index.
    fn predict(&self, x: f64) -> &Point {
        let i = self.xs.partition_point(|(t, _)| *t < x);
        let right = self.xs.get(i);
        let left = if i > 0 { self.xs.get(i - 1) } else { None };
        let chosen = match (left, right) {
            (Some(l), Some(r)) => {
                let dl = (x - l.0).abs();
                let dr = (r.0 - x).abs();
                if dl < dr || (dl == dr && l.1 < r.1) {
                    l
                } else {
                    r
                }
            }
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!("nonempty training set"),
        };
        &self.responses[chosen.1]
    }
}

/// Draw a training and a test set, score the 1-NN predictor and the Bayes
/// predictor on the same test draws (paired, common random numbers).
pub fn run_nn_experiment(
    task: &SyntheticTask,
    loss: &LossKernel,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<NNReport> {
    if !loss.certified_negdef() {
        return Err(Error::UncertifiedKernel);
    }
    if n_train == 0 || n_test == 0 {
        return Err(Error::InvalidParameter(
            "n_train and n_test must be at least 1".into(),
        ));
    }
    let response_space = task.response_space();
    if loss.space() != &response_space {
        return Err(Error::SpaceMismatch(format!(
            "loss on {} vs responses on {}",
            loss.space(),
            response_space
        )));
    }

    let train_pairs: Vec<(f64, Point)> = mc::generate(n_train, seed, stream::NN_TRAIN, |rng| {
        let x: f64 = rng.gen();
        let y = task.draw_response(x, rng);
        (x, y)
    });
    let train = SortedTrain::build(train_pairs);

    let test: Vec<(f64, Point)> = mc::generate(n_test, seed, stream::NN_TEST, |rng| {
        let x: f64 = rng.gen();
        let y = task.draw_response(x, rng);
        (x, y)
    });

    let nn = mc::chunked_mean_se(&test, |(x, y)| loss.eval_raw(train.predict(*x), y));
    let bayes = mc::chunked_mean_se(&test, |(x, y)| loss.eval_raw(&task.bayes_predict(*x), y));

    let bayes_risk = RiskEstimate::monte_carlo(bayes);
    let nn_risk = RiskEstimate::monte_carlo(nn);
    let ratio = (bayes_risk.value > RATIO_GUARD).then(|| nn_risk.value / bayes_risk.value);
    Ok(NNReport {
        n_train,
        n_test,
        loss: loss.name(),
        bayes_risk,
        nn_risk,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KernelFamily, KernelSpec};

    fn misclass2() -> LossKernel {
        LossKernel::make(KernelSpec {
            space: SampleSpace::DiscreteLabels { label_count: 2 },
            family: KernelFamily::Misclassification,
        })
        .unwrap()
    }

    fn squared() -> LossKernel {
        LossKernel::make(KernelSpec {
            space: SampleSpace::RealLine,
            family: KernelFamily::PowerDistance { q: 2.0 },
        })
        .unwrap()
    }

    #[test]
    fn noiseless_labels_are_learned() {
        let task = SyntheticTask::new(ConditionalLaw::NoisyLabel {
            flip_prob: FlipProb::Constant { p: 0.0 },
        })
        .unwrap();
        let rep = run_nn_experiment(&task, &misclass2(), 1000, 10_000, 1).unwrap();
        assert_eq!(rep.bayes_risk.value, 0.0);
        assert!(rep.nn_risk.value <= 0.01, "nn risk {}", rep.nn_risk.value);
        assert_eq!(rep.ratio, None);
    }

    #[test]
    fn constant_noise_ratio_near_asymptote() {
        let task = SyntheticTask::new(ConditionalLaw::NoisyLabel {
            flip_prob: FlipProb::Constant { p: 0.1 },
        })
        .unwrap();
        let rep = run_nn_experiment(&task, &misclass2(), 10_000, 100_000, 2).unwrap();
        assert!((rep.bayes_risk.value - 0.1).abs() < 0.01);
        let ratio = rep.ratio.unwrap();
        assert!(
            (1.6..=2.0).contains(&ratio),
            "ratio {ratio} outside [1.6, 2.0]"
        );
    }

    #[test]
    fn regression_ratio_below_ceiling() {
        let task = SyntheticTask::new(ConditionalLaw::GaussianRegression {
            mean: MeanFn::Sine {
                amplitude: 1.0,
                frequency: 1.0,
            },
            noise_sd: 0.3,
        })
        .unwrap();
        let rep = run_nn_experiment(&task, &squared(), 10_000, 100_000, 3).unwrap();
        assert!((rep.bayes_risk.value - 0.09).abs() < 0.01);
        let ratio = rep.ratio.unwrap();
        assert!(ratio <= 2.15, "ratio {ratio}");
        assert!(ratio >= 1.0 - 0.05, "ratio {ratio}");
    }

    #[test]
    fn nn_risk_improves_with_training_data() {
        // Regression has a bias term that shrinks with n_train. Averaging
        // paired replications tests the expectation, not one realization.
        let task = SyntheticTask::new(ConditionalLaw::GaussianRegression {
            mean: MeanFn::Sine {
                amplitude: 1.0,
                frequency: 2.0,
            },
            noise_sd: 0.3,
        })
        .unwrap();
        let k = squared();
        let reps = 20u64;
        let risks: Vec<(f64, f64)> = [100usize, 1000, 10_000]
            .iter()
            .map(|n| {
                let vals: Vec<f64> = (0..reps)
                    .map(|r| {
                        run_nn_experiment(&task, &k, *n, 20_000, 100 + r)
                            .unwrap()
                            .nn_risk
                            .value
                    })
                    .collect();
                let mean = vals.iter().sum::<f64>() / reps as f64;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (reps as f64 - 1.0);
                (mean, (var / reps as f64).sqrt())
            })
            .collect();
        for w in risks.windows(2) {
            let (prev, prev_se) = w[0];
            let (next, next_se) = w[1];
            let tol = 2.0 * (prev_se.powi(2) + next_se.powi(2)).sqrt();
            assert!(next <= prev + tol, "risk rose from {prev} to {next}");
        }
    }

    #[test]
    fn uncertified_loss_refused() {
        let bad = LossKernel::make(KernelSpec {
            space: SampleSpace::RealLine,
            family: KernelFamily::PowerDistance { q: 3.0 },
        })
        .unwrap();
        let task = SyntheticTask::new(ConditionalLaw::GaussianRegression {
            mean: MeanFn::Linear {
                intercept: 0.0,
                slope: 1.0,
            },
            noise_sd: 0.1,
        })
        .unwrap();
        assert!(matches!(
            run_nn_experiment(&task, &bad, 10, 10, 0),
            Err(Error::UncertifiedKernel)
        ));
    }

    #[test]
    fn replay_is_deterministic() {
        let task = SyntheticTask::new(ConditionalLaw::NoisyLabel {
            flip_prob: FlipProb::Constant { p: 0.2 },
        })
        .unwrap();
        let a = run_nn_experiment(&task, &misclass2(), 500, 5000, 8).unwrap();
        let b = run_nn_experiment(&task, &misclass2(), 500, 5000, 8).unwrap();
        assert_eq!(a, b);
    }
}

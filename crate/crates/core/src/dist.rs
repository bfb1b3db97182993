//! The distribution catalogue: samplable laws with optional closed-form
//! structure.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as RandDistribution, Normal};

use crate::error::{Error, Result};
use crate::mc::{self, stream};
use crate::space::{l2_norm, PExponent, Point, SampleSpace};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Mixture component for 1-D Gaussian mixtures.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Law {
    /// Probabilities over labels `0..k`.
    FinitePmf { weights: Vec<f64> },
    GaussianR { mean: f64, sd: f64 },
    /// Isotropic Gaussian on d-dimensional real space.
    GaussianRd { mean: Vec<f64>, sd: f64 },
    TwoPoint { a: f64, b: f64, prob_a: f64 },
    MixtureGaussR { components: Vec<MixtureComponent> },
    /// Uniform on the unit sphere.
    SphereUniform,
    /// Uniform over a finite list of points.
    Empirical { points: Vec<Point> },
}

/// A samplable law bound to its sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    space: SampleSpace,
    law: Law,
}

impl Distribution {
    pub fn new(space: SampleSpace, law: Law) -> Result<Self> {
        space.validate()?;
        match (&space, &law) {
            (SampleSpace::DiscreteLabels { label_count }, Law::FinitePmf { weights }) => {
                if weights.len() != *label_count as usize {
                    return Err(Error::SpaceMismatch(format!(
                        "pmf over {} labels in a space of {label_count}",
                        weights.len()
                    )));
                }
                check_weights(weights)?;
            }
            (SampleSpace::RealLine, Law::GaussianR { sd, .. }) => check_sd(*sd)?,
            (SampleSpace::RealVector { dim, .. }, Law::GaussianRd { mean, sd }) => {
                check_sd(*sd)?;
                if mean.len() != *dim {
                    return Err(Error::SpaceMismatch(format!(
                        "mean vector of length {} in space of dim {dim}",
                        mean.len()
                    )));
                }
            }
            (SampleSpace::RealLine, Law::TwoPoint { a, b, prob_a }) => {
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidParameter("two-point atoms must be finite".into()));
                }
                if !(0.0..=1.0).contains(prob_a) {
                    return Err(Error::InvalidParameter(format!(
                        "prob_a must lie in [0, 1], got {prob_a}"
                    )));
                }
            }
            (SampleSpace::RealLine, Law::MixtureGaussR { components }) => {
                if components.is_empty() {
                    return Err(Error::InvalidParameter("mixture needs components".into()));
                }
                let weights: Vec<f64> = components.iter().map(|c| c.weight).collect();
                check_weights(&weights)?;
                for c in components {
                    check_sd(c.sd)?;
                    if !c.mean.is_finite() {
                        return Err(Error::InvalidParameter("mixture mean must be finite".into()));
                    }
                }
            }
            (SampleSpace::Sphere { .. }, Law::SphereUniform) => {}
            (_, Law::Empirical { points }) => {
                if points.is_empty() {
                    return Err(Error::InvalidParameter(
                        "empirical distribution needs at least one point".into(),
                    ));
                }
                for p in points {
                    space.check_point(p)?;
                }
            }
            _ => {
                return Err(Error::SpaceMismatch(format!(
                    "law {law:?} does not live on {space}"
                )))
            }
        }
        Ok(Distribution { space, law })
    }

    pub fn finite_pmf(weights: Vec<f64>) -> Result<Self> {
        let space = SampleSpace::DiscreteLabels {
            label_count: weights.len() as u32,
        };
        Self::new(space, Law::FinitePmf { weights })
    }

    pub fn gaussian_r(mean: f64, sd: f64) -> Result<Self> {
        Self::new(SampleSpace::RealLine, Law::GaussianR { mean, sd })
    }

    pub fn gaussian_rd(mean: Vec<f64>, sd: f64, p: PExponent) -> Result<Self> {
        let space = SampleSpace::RealVector { dim: mean.len(), p };
        Self::new(space, Law::GaussianRd { mean, sd })
    }

    pub fn two_point(a: f64, b: f64, prob_a: f64) -> Result<Self> {
        Self::new(SampleSpace::RealLine, Law::TwoPoint { a, b, prob_a })
    }

    pub fn mixture_gauss_r(components: Vec<MixtureComponent>) -> Result<Self> {
        Self::new(SampleSpace::RealLine, Law::MixtureGaussR { components })
    }

    pub fn sphere_uniform(dim: usize) -> Result<Self> {
        Self::new(SampleSpace::Sphere { dim }, Law::SphereUniform)
    }

    pub fn empirical(space: SampleSpace, points: Vec<Point>) -> Result<Self> {
        Self::new(space, Law::Empirical { points })
    }

    /// Point mass at `y`.
    pub fn dirac(space: SampleSpace, y: Point) -> Result<Self> {
        Self::empirical(space, vec![y])
    }

    /// A default sampling law for a space: uniform labels, standard
    /// Gaussian, or uniform on the sphere. Used to draw certification
    /// point sets.
    pub fn standard_for(space: &SampleSpace) -> Result<Self> {
        match space {
            SampleSpace::DiscreteLabels { label_count } => {
                let k = *label_count as usize;
                Self::finite_pmf(vec![1.0 / k as f64; k])
            }
            SampleSpace::RealLine => Self::gaussian_r(0.0, 1.0),
            SampleSpace::RealVector { dim, p } => Self::gaussian_rd(vec![0.0; *dim], 1.0, *p),
            SampleSpace::Sphere { dim } => Self::sphere_uniform(*dim),
        }
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn law(&self) -> &Law {
        &self.law
    }

    /// Finite support with zero-probability atoms dropped, when the law has
    /// one. Enables exact (standard-error-free) expectations.
    pub fn finite_support(&self) -> Option<Vec<(f64, Point)>> {
        match &self.law {
            Law::FinitePmf { weights } => Some(
                weights
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| **w > 0.0)
                    .map(|(i, w)| (*w, Point::Label(i as u32)))
                    .collect(),
            ),
            Law::TwoPoint { a, b, prob_a } => {
                let mut support = Vec::new();
                if *prob_a > 0.0 {
                    support.push((*prob_a, Point::Real(*a)));
                }
                if *prob_a < 1.0 {
                    support.push((1.0 - prob_a, Point::Real(*b)));
                }
                Some(support)
            }
            Law::Empirical { points } => {
                let w = 1.0 / points.len() as f64;
                Some(points.iter().map(|p| (w, p.clone())).collect())
            }
            _ => None,
        }
    }

    /// One draw from the given generator.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Point {
        match &self.law {
            Law::FinitePmf { weights } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return Point::Label(i as u32);
                    }
                }
                Point::Label((weights.len() - 1) as u32)
            }
            Law::GaussianR { mean, sd } => {
                let normal = Normal::new(*mean, *sd).expect("validated sd");
                Point::Real(normal.sample(rng))
            }
            Law::GaussianRd { mean, sd } => {
                let normal = Normal::new(0.0, *sd).expect("validated sd");
                Point::Vector(mean.iter().map(|m| m + normal.sample(rng)).collect())
            }
            Law::TwoPoint { a, b, prob_a } => {
                let u: f64 = rng.gen();
                Point::Real(if u < *prob_a { *a } else { *b })
            }
            Law::MixtureGaussR { components } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = &components[components.len() - 1];
                for c in components {
                    acc += c.weight;
                    if u < acc {
                        chosen = c;
                        break;
                    }
                }
                let normal = Normal::new(chosen.mean, chosen.sd).expect("validated sd");
                Point::Real(normal.sample(rng))
            }
            Law::SphereUniform => {
                let SampleSpace::Sphere { dim } = &self.space else {
                    unreachable!("validated pairing");
                };
                let normal = Normal::new(0.0, 1.0).unwrap();
                loop {
                    let v: Vec<f64> = (0..*dim).map(|_| normal.sample(rng)).collect();
                    let norm = l2_norm(&v);
                    if norm > 1e-8 {
                        return Point::Vector(v.iter().map(|x| x / norm).collect());
                    }
                }
            }
            Law::Empirical { points } => {
                let i = rng.gen_range(0..points.len());
                points[i].clone()
            }
        }
    }

    /// n i.i.d. draws; byte-identical for identical (law, n, seed) and
    /// independent of worker count.
    pub fn sample(&self, n: usize, seed: u64) -> Vec<Point> {
        self.sample_stream(n, seed, stream::SAMPLE)
    }

    /// Draws on a named substream of the seed.
    pub fn sample_stream(&self, n: usize, seed: u64, stream: u64) -> Vec<Point> {
        mc::generate(n, seed, stream, |rng| self.draw(rng))
    }
}

fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParameter(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "weights must sum to 1 within {WEIGHT_SUM_TOL}, got {total}"
        )));
    }
    Ok(())
}

fn check_sd(sd: f64) -> Result<()> {
    if sd.is_finite() && sd > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "standard deviation must be positive, got {sd}"
        )))
    }
}

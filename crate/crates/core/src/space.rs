//! Sample spaces and the points that live in them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the unit-norm check on sphere points.
pub const SPHERE_NORM_TOL: f64 = 1e-12;

/// An extended positive real exponent for ℓp (quasi-)norms.
///
/// Infinity is an explicit sentinel, never a large float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PExponent {
    Finite(f64),
    Inf,
}

impl PExponent {
    pub fn is_valid(self) -> bool {
        match self {
            PExponent::Finite(p) => p.is_finite() && p > 0.0,
            PExponent::Inf => true,
        }
    }

    /// True when the exponent is ≤ `x` (infinity compares greater than
    /// every finite value).
    pub fn le(self, x: f64) -> bool {
        match self {
            PExponent::Finite(p) => p <= x,
            PExponent::Inf => false,
        }
    }

    /// True when the exponent is ≥ `x`.
    pub fn ge(self, x: f64) -> bool {
        match self {
            PExponent::Finite(p) => p >= x,
            PExponent::Inf => true,
        }
    }
}

impl fmt::Display for PExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PExponent::Finite(p) => write!(f, "{p}"),
            PExponent::Inf => write!(f, "inf"),
        }
    }
}

/// The domain Ω a loss kernel is defined on.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleSpace {
    /// Finitely many labels `0..label_count`.
    DiscreteLabels { label_count: u32 },
    /// The real line.
    RealLine,
    /// d-dimensional real space under an ℓp (quasi-)norm.
    RealVector { dim: usize, p: PExponent },
    /// The unit sphere embedded in d-dimensional real space.
    Sphere { dim: usize },
}

impl SampleSpace {
    pub fn validate(&self) -> Result<()> {
        match self {
            SampleSpace::DiscreteLabels { label_count } => {
                if *label_count == 0 {
                    return Err(Error::InvalidParameter(
                        "label_count must be positive".into(),
                    ));
                }
            }
            SampleSpace::RealLine => {}
            SampleSpace::RealVector { dim, p } => {
                if *dim < 2 {
                    return Err(Error::InvalidParameter(
                        "real vector space requires dim >= 2".into(),
                    ));
                }
                if !p.is_valid() {
                    return Err(Error::InvalidParameter(format!(
                        "norm exponent p must lie in (0, inf], got {p}"
                    )));
                }
            }
            SampleSpace::Sphere { dim } => {
                if *dim < 2 {
                    return Err(Error::InvalidParameter(
                        "sphere requires ambient dim >= 2".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Verify a point belongs to this space.
    pub fn check_point(&self, y: &Point) -> Result<()> {
        match (self, y) {
            (SampleSpace::DiscreteLabels { label_count }, Point::Label(l)) => {
                if l < label_count {
                    Ok(())
                } else {
                    Err(Error::SpaceMismatch(format!(
                        "label {l} out of range 0..{label_count}"
                    )))
                }
            }
            (SampleSpace::RealLine, Point::Real(x)) => {
                if x.is_finite() {
                    Ok(())
                } else {
                    Err(Error::SpaceMismatch("non-finite real point".into()))
                }
            }
            (SampleSpace::RealVector { dim, .. }, Point::Vector(v)) => {
                if v.len() != *dim {
                    Err(Error::SpaceMismatch(format!(
                        "vector of length {} in space of dim {dim}",
                        v.len()
                    )))
                } else if v.iter().any(|x| !x.is_finite()) {
                    Err(Error::SpaceMismatch("non-finite vector component".into()))
                } else {
                    Ok(())
                }
            }
            (SampleSpace::Sphere { dim }, Point::Vector(v)) => {
                if v.len() != *dim {
                    return Err(Error::SpaceMismatch(format!(
                        "sphere point of length {} in ambient dim {dim}",
                        v.len()
                    )));
                }
                let norm = l2_norm(v);
                if (norm - 1.0).abs() <= SPHERE_NORM_TOL {
                    Ok(())
                } else {
                    Err(Error::SpaceMismatch(format!(
                        "sphere point has norm {norm}, expected 1 within {SPHERE_NORM_TOL}"
                    )))
                }
            }
            _ => Err(Error::SpaceMismatch(format!(
                "point {y:?} does not belong to {self:?}"
            ))),
        }
    }
}

impl fmt::Display for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleSpace::DiscreteLabels { label_count } => {
                write!(f, "labels({label_count})")
            }
            SampleSpace::RealLine => write!(f, "real_line"),
            SampleSpace::RealVector { dim, p } => write!(f, "real_vector(d={dim}, p={p})"),
            SampleSpace::Sphere { dim } => write!(f, "sphere(d={dim})"),
        }
    }
}

/// A point in a sample space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Label(u32),
    Real(f64),
    Vector(Vec<f64>),
}

impl Point {
    pub fn as_label(&self) -> Option<u32> {
        match self {
            Point::Label(l) => Some(*l),
            _ => None,
        }
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Point::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&[f64]> {
        match self {
            Point::Vector(v) => Some(v),
            _ => None,
        }
    }
}

pub fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// ℓp norm (p ≥ 1) or quasi-norm (0 < p < 1): (Σ|vᵢ|^p)^{1/p}; max-norm for p = ∞.
pub fn lp_norm(v: &[f64], p: PExponent) -> f64 {
    match p {
        PExponent::Inf => v.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        PExponent::Finite(p) if p == 1.0 => v.iter().map(|x| x.abs()).sum(),
        PExponent::Finite(p) if p == 2.0 => l2_norm(v),
        PExponent::Finite(p) => v
            .iter()
            .map(|x| x.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lp_norm_special_cases() {
        let v = [3.0, -4.0];
        assert_eq!(lp_norm(&v, PExponent::Finite(1.0)), 7.0);
        assert_eq!(lp_norm(&v, PExponent::Finite(2.0)), 5.0);
        assert_eq!(lp_norm(&v, PExponent::Inf), 4.0);
        // quasi-norm: (1 + 1)^{1/0.5} = 4
        assert!((lp_norm(&[1.0, 1.0], PExponent::Finite(0.5)) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_points_checked_to_tolerance() {
        let s = SampleSpace::Sphere { dim: 3 };
        s.check_point(&Point::Vector(vec![1.0, 0.0, 0.0])).unwrap();
        assert!(s
            .check_point(&Point::Vector(vec![1.0 + 1e-6, 0.0, 0.0]))
            .is_err());
    }

    #[test]
    fn space_validation() {
        assert!(SampleSpace::DiscreteLabels { label_count: 0 }.validate().is_err());
        assert!(SampleSpace::RealVector {
            dim: 1,
            p: PExponent::Finite(2.0)
        }
        .validate()
        .is_err());
        assert!(SampleSpace::RealVector {
            dim: 2,
            p: PExponent::Finite(-1.0)
        }
        .validate()
        .is_err());
        assert!(SampleSpace::RealVector {
            dim: 2,
            p: PExponent::Inf
        }
        .validate()
        .is_ok());
    }
}

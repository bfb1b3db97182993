//! Numerical certifiers for metric axioms and negative definiteness.
//!
//! Certificates are evidence about the sampled points only: a pass verdict
//! means "not falsified on these points", never "proven".

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::LossKernel;
use crate::space::Point;

/// Point-count ceiling for the cubic triple scan.
pub const MAX_METRIC_POINTS: usize = 512;
/// Point-count ceiling for the eigendecomposition check.
pub const MAX_NEGDEF_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Outcome of the exhaustive metric-axiom scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricCertificate {
    pub points_tested: usize,
    pub verdict: Verdict,
    /// min over ordered triples of L(y,y′) + L(y′,y″) − L(y,y″).
    pub worst_triangle_slack: f64,
    pub worst_symmetry_gap: f64,
    pub worst_self_distance: f64,
    pub witness: Option<[Point; 3]>,
    pub tolerance: f64,
}

/// Outcome of the centered-matrix eigenvalue check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NegDefCertificate {
    pub points_tested: usize,
    pub verdict: Verdict,
    pub max_centered_eigenvalue: f64,
    /// On fail: coefficients a with Σaᵢ = 0 and aᵀLa > 0.
    pub witness_coefficients: Option<Vec<f64>>,
    /// aᵀLa for the stored witness.
    pub witness_quadratic_form: Option<f64>,
    pub tolerance: f64,
}

/// Scale-aware default tolerance for the eigenvalue check.
pub fn default_negdef_tolerance(n: usize, max_abs_entry: f64) -> f64 {
    1e-8 * n as f64 * max_abs_entry
}

/// Default tolerance for metric-axiom slack.
pub fn default_metric_tolerance(max_abs_entry: f64) -> f64 {
    1e-9 * max_abs_entry.max(1.0)
}

fn loss_matrix(kernel: &LossKernel, points: &[Point]) -> Result<Vec<Vec<f64>>> {
    for p in points {
        kernel.space().check_point(p)?;
    }
    let n = points.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = kernel.eval_raw(&points[i], &points[j]);
        }
    }
    Ok(m)
}

/// Largest |L(yᵢ,yⱼ)| over the point set; the scale factor in the default
/// tolerance rules.
pub fn max_abs_loss(kernel: &LossKernel, points: &[Point]) -> Result<f64> {
    let l = loss_matrix(kernel, points)?;
    Ok(l.iter()
        .flatten()
        .fold(0.0_f64, |acc, x| acc.max(x.abs())))
}

/// Exhaustively check self-distance, symmetry over all pairs, and the
/// triangle inequality over all ordered triples.
pub fn check_metric(
    kernel: &LossKernel,
    points: &[Point],
    tolerance: f64,
) -> Result<MetricCertificate> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    if n > MAX_METRIC_POINTS {
        return Err(Error::TooManyPoints {
            got: n,
            max: MAX_METRIC_POINTS,
        });
    }
    let l = loss_matrix(kernel, points)?;

    let mut worst_self = 0.0_f64;
    let mut self_witness = 0usize;
    for (i, row) in l.iter().enumerate() {
        if row[i].abs() > worst_self {
            worst_self = row[i].abs();
            self_witness = i;
        }
    }

    let mut worst_sym = 0.0_f64;
    let mut sym_witness = (0usize, 0usize);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (l[i][j] - l[j][i]).abs();
            if gap > worst_sym {
                worst_sym = gap;
                sym_witness = (i, j);
            }
        }
    }

    let mut worst_slack = f64::INFINITY;
    let mut slack_witness = (0usize, 0usize, 0usize);
    for i in 0..n {
        for j in 0..n {
            let lij = l[i][j];
            for k in 0..n {
                let slack = lij + l[j][k] - l[i][k];
                if slack < worst_slack {
                    worst_slack = slack;
                    slack_witness = (i, j, k);
                }
            }
        }
    }

    let triangle_fail = worst_slack < -tolerance;
    let sym_fail = worst_sym > tolerance;
    let self_fail = worst_self > tolerance;
    let verdict = if triangle_fail || sym_fail || self_fail {
        Verdict::Fail
    } else {
        Verdict::Pass
    };
    let witness = if triangle_fail {
        let (i, j, k) = slack_witness;
        Some([points[i].clone(), points[j].clone(), points[k].clone()])
    } else if sym_fail {
        let (i, j) = sym_witness;
        Some([points[i].clone(), points[j].clone(), points[j].clone()])
    } else if self_fail {
        let p = points[self_witness].clone();
        Some([p.clone(), p.clone(), p])
    } else {
        None
    };

    Ok(MetricCertificate {
        points_tested: n,
        verdict,
        worst_triangle_slack: worst_slack,
        worst_symmetry_gap: worst_sym,
        worst_self_distance: worst_self,
        witness,
        tolerance,
    })
}

/// Negative definiteness over sum-zero coefficient vectors, checked through
/// the doubly centered matrix M = H L H with H = I − (1/n)𝟙𝟙ᵀ: the quadratic
/// form aᵀLa is ≤ 0 for every sum-zero a iff M is negative semidefinite.
pub fn check_negdef(
    kernel: &LossKernel,
    points: &[Point],
    tolerance: f64,
) -> Result<NegDefCertificate> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two points".into()));
    }
    if n > MAX_NEGDEF_POINTS {
        return Err(Error::TooManyPoints {
            got: n,
            max: MAX_NEGDEF_POINTS,
        });
    }
    let l = loss_matrix(kernel, points)?;

    let nf = n as f64;
    let row_means: Vec<f64> = l.iter().map(|r| r.iter().sum::<f64>() / nf).collect();
    let col_means: Vec<f64> = (0..n)
        .map(|j| l.iter().map(|r| r[j]).sum::<f64>() / nf)
        .collect();
    let grand = row_means.iter().sum::<f64>() / nf;

    // Doubly centered, then symmetrized.
    let centered = DMatrix::from_fn(n, n, |i, j| {
        let m_ij = l[i][j] - row_means[i] - col_means[j] + grand;
        let m_ji = l[j][i] - row_means[j] - col_means[i] + grand;
        0.5 * (m_ij + m_ji)
    });

    let eig = centered.symmetric_eigen();
    let mut max_eig = f64::NEG_INFINITY;
    let mut max_idx = 0;
    for (i, ev) in eig.eigenvalues.iter().enumerate() {
        if *ev > max_eig {
            max_eig = *ev;
            max_idx = i;
        }
    }

    let verdict = if max_eig > tolerance {
        Verdict::Fail
    } else {
        Verdict::Pass
    };

    let (witness, form) = if verdict == Verdict::Fail {
        // Top eigenvector, re-centered to sum zero.
        let v = eig.eigenvectors.column(max_idx);
        let mean = v.iter().sum::<f64>() / nf;
        let a: Vec<f64> = v.iter().map(|x| x - mean).collect();
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                q += a[i] * a[j] * l[i][j];
            }
        }
        (Some(a), Some(q))
    } else {
        (None, None)
    };

    Ok(NegDefCertificate {
        points_tested: n,
        verdict,
        max_centered_eigenvalue: max_eig,
        witness_coefficients: witness,
        witness_quadratic_form: form,
        tolerance,
    })
}

/// Evaluate the quadratic form ΣΣ aᵢaⱼ L(yᵢ,yⱼ) for a stored witness; used
/// by callers to re-verify fail certificates.
pub fn quadratic_form(kernel: &LossKernel, points: &[Point], coeffs: &[f64]) -> Result<f64> {
    if points.len() != coeffs.len() {
        return Err(Error::InvalidParameter(
            "coefficient and point counts differ".into(),
        ));
    }
    let l = loss_matrix(kernel, points)?;
    let mut q = 0.0;
    for (i, ai) in coeffs.iter().enumerate() {
        for (j, aj) in coeffs.iter().enumerate() {
            q += ai * aj * l[i][j];
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::kernel::{KernelFamily, KernelSpec};
    use crate::space::SampleSpace;

    fn power(q: f64) -> LossKernel {
        LossKernel::make(KernelSpec {
            space: SampleSpace::RealLine,
            family: KernelFamily::PowerDistance { q },
        })
        .unwrap()
    }

    fn reals(xs: &[f64]) -> Vec<Point> {
        xs.iter().map(|x| Point::Real(*x)).collect()
    }

    #[test]
    fn misclassification_is_a_metric() {
        let k = LossKernel::make(KernelSpec {
            space: SampleSpace::DiscreteLabels { label_count: 3 },
            family: KernelFamily::Misclassification,
        })
        .unwrap();
        let pts: Vec<Point> = (0..3).map(Point::Label).collect();
        let cert = check_metric(&k, &pts, 1e-12).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(cert.worst_triangle_slack >= 0.0);
    }

    #[test]
    fn squared_loss_fails_triangle_on_0_1_2() {
        let cert = check_metric(&power(2.0), &reals(&[0.0, 1.0, 2.0]), 1e-12).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert_eq!(cert.worst_triangle_slack, -2.0);
        let w = cert.witness.unwrap();
        assert_eq!(w[0], Point::Real(0.0));
        assert_eq!(w[1], Point::Real(1.0));
        assert_eq!(w[2], Point::Real(2.0));
    }

    #[test]
    fn geodesic_passes_on_random_sphere_points() {
        let k = LossKernel::make(KernelSpec {
            space: SampleSpace::Sphere { dim: 3 },
            family: KernelFamily::Geodesic,
        })
        .unwrap();
        let pts = Distribution::sphere_uniform(3).unwrap().sample(64, 2024);
        let cert = check_metric(&k, &pts, default_metric_tolerance(std::f64::consts::PI)).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
    }

    #[test]
    fn squared_distance_is_negative_definite() {
        let pts = Distribution::gaussian_r(0.0, 1.0).unwrap().sample(32, 11);
        let tol = default_negdef_tolerance(32, 50.0);
        let cert = check_negdef(&power(2.0), &pts, tol).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
    }

    #[test]
    fn cubed_distance_fails_with_self_verifying_witness() {
        let pts = reals(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let k = power(3.0);
        let tol = default_negdef_tolerance(5, 64.0);
        let cert = check_negdef(&k, &pts, tol).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        let a = cert.witness_coefficients.unwrap();
        assert!(a.iter().sum::<f64>().abs() < 1e-12);
        let q = quadratic_form(&k, &pts, &a).unwrap();
        assert!(q > tol / 2.0);
        assert!((q - cert.witness_quadratic_form.unwrap()).abs() < 1e-9);
    }

    #[test]
    fn misclassification_centered_matrix_not_positive() {
        let k = LossKernel::make(KernelSpec {
            space: SampleSpace::DiscreteLabels { label_count: 10 },
            family: KernelFamily::Misclassification,
        })
        .unwrap();
        let pts: Vec<Point> = (0..10).map(Point::Label).collect();
        let cert = check_negdef(&k, &pts, default_negdef_tolerance(10, 1.0)).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
    }

    #[test]
    fn point_count_limits() {
        let pts = reals(&vec![0.0; 600]);
        assert!(matches!(
            check_metric(&power(1.0), &pts, 1e-9),
            Err(Error::TooManyPoints { .. })
        ));
        let pts = reals(&vec![0.0; 300]);
        assert!(matches!(
            check_negdef(&power(1.0), &pts, 1e-9),
            Err(Error::TooManyPoints { .. })
        ));
    }
}

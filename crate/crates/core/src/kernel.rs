//! The loss-kernel catalogue and the convex-cone combinator.
//!
//! Every kernel is symmetric, nonnegative, and vanishes on the diagonal.
//! Construction records two certification flags: `certified_negdef` is true
//! exactly when the parameters fall in the known negative-definiteness
//! region for the family on its space, and `certified_metric` when the
//! family is a metric for those parameters. Out-of-region parameters still
//! construct a kernel (with the flag false) so counterexample experiments
//! can exercise them.

use crate::error::{Error, Result};
use crate::space::{l2_norm, lp_norm, PExponent, Point, SampleSpace};

/// A kernel family together with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    /// 1(y ≠ y′) on discrete labels.
    Misclassification,
    /// |y − y′|^q on the real line.
    PowerDistance { q: f64 },
    /// ‖y − y′‖_p^q on d-dimensional real space.
    LpPower { p: PExponent, q: f64 },
    /// Great-circle distance arccos⟨y, y′⟩ on the unit sphere.
    Geodesic,
    /// Nonnegative weighted sum of kernels on a shared space.
    ConeCombination { terms: Vec<(f64, KernelFamily)> },
}

impl KernelFamily {
    fn describe(&self) -> String {
        match self {
            KernelFamily::Misclassification => "misclassification".into(),
            KernelFamily::PowerDistance { q } => format!("power_distance(q={q})"),
            KernelFamily::LpPower { p, q } => format!("lp_power(p={p}, q={q})"),
            KernelFamily::Geodesic => "geodesic".into(),
            KernelFamily::ConeCombination { terms } => {
                let inner: Vec<String> = terms
                    .iter()
                    .map(|(w, f)| format!("{w}*{}", f.describe()))
                    .collect();
                format!("cone[{}]", inner.join(" + "))
            }
        }
    }
}

/// A kernel family bound to a sample space.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    pub space: SampleSpace,
    pub family: KernelFamily,
}

/// A constructed loss function with certification metadata.
#[derive(Debug, Clone)]
pub struct LossKernel {
    spec: KernelSpec,
    certified_negdef: bool,
    certified_metric: bool,
}

impl LossKernel {
    /// Build a kernel from a spec, validating parameters and family/space
    /// compatibility, and setting the certification flags.
    pub fn make(spec: KernelSpec) -> Result<Self> {
        spec.space.validate()?;
        validate_family(&spec.space, &spec.family)?;
        let certified_negdef = negdef_region(&spec.space, &spec.family);
        let certified_metric = metric_region(&spec.space, &spec.family);
        Ok(LossKernel {
            spec,
            certified_negdef,
            certified_metric,
        })
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn space(&self) -> &SampleSpace {
        &self.spec.space
    }

    pub fn certified_negdef(&self) -> bool {
        self.certified_negdef
    }

    pub fn certified_metric(&self) -> bool {
        self.certified_metric
    }

    pub fn name(&self) -> String {
        self.spec.family.describe()
    }

    /// Evaluate the loss, verifying both points belong to the space.
    pub fn evaluate(&self, y: &Point, y2: &Point) -> Result<f64> {
        self.spec.space.check_point(y)?;
        self.spec.space.check_point(y2)?;
        Ok(self.eval_raw(y, y2))
    }

    /// Evaluate without point checks. The hot path for estimation loops,
    /// where the sampler guarantees membership.
    pub fn eval_raw(&self, y: &Point, y2: &Point) -> f64 {
        eval_family(&self.spec.family, y, y2)
    }
}

/// Weighted sum of kernels on one space; certification flags are the
/// conjunction of the children's flags.
pub fn cone_combine(terms: &[(f64, LossKernel)]) -> Result<LossKernel> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::InvalidParameter(
            "cone combination needs at least one term".into(),
        ));
    };
    let space = first.space().clone();
    let mut families = Vec::with_capacity(terms.len());
    for (w, k) in terms {
        if k.space() != &space {
            return Err(Error::SpaceMismatch(
                "cone combination terms must share one space".into(),
            ));
        }
        families.push((*w, k.spec.family.clone()));
    }
    LossKernel::make(KernelSpec {
        space,
        family: KernelFamily::ConeCombination { terms: families },
    })
}

fn validate_family(space: &SampleSpace, family: &KernelFamily) -> Result<()> {
    match family {
        KernelFamily::Misclassification => match space {
            SampleSpace::DiscreteLabels { .. } => Ok(()),
            _ => Err(Error::SpaceMismatch(format!(
                "misclassification requires discrete labels, got {space}"
            ))),
        },
        KernelFamily::PowerDistance { q } => {
            if !matches!(space, SampleSpace::RealLine) {
                return Err(Error::SpaceMismatch(format!(
                    "power distance requires the real line, got {space}"
                )));
            }
            check_q(*q)
        }
        KernelFamily::LpPower { p, q } => {
            let SampleSpace::RealVector { p: space_p, .. } = space else {
                return Err(Error::SpaceMismatch(format!(
                    "lp power requires a real vector space, got {space}"
                )));
            };
            if !p.is_valid() {
                return Err(Error::InvalidParameter(format!(
                    "lp exponent p must lie in (0, inf], got {p}"
                )));
            }
            if p != space_p {
                return Err(Error::SpaceMismatch(format!(
                    "kernel exponent p={p} disagrees with the space norm p={space_p}"
                )));
            }
            check_q(*q)
        }
        KernelFamily::Geodesic => match space {
            SampleSpace::Sphere { .. } => Ok(()),
            _ => Err(Error::SpaceMismatch(format!(
                "geodesic requires the unit sphere, got {space}"
            ))),
        },
        KernelFamily::ConeCombination { terms } => {
            if terms.is_empty() {
                return Err(Error::InvalidParameter(
                    "cone combination needs at least one term".into(),
                ));
            }
            let mut any_positive = false;
            for (w, child) in terms {
                if !w.is_finite() || *w < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "cone weight must be finite and nonnegative, got {w}"
                    )));
                }
                any_positive |= *w > 0.0;
                if matches!(child, KernelFamily::ConeCombination { .. }) {
                    // Nested combinations flatten mathematically; reject for a
                    // simpler serialized form.
                    return Err(Error::InvalidParameter(
                        "nested cone combinations are not supported; flatten the terms".into(),
                    ));
                }
                validate_family(space, child)?;
            }
            if !any_positive {
                return Err(Error::InvalidParameter(
                    "cone combination needs at least one positive weight".into(),
                ));
            }
            Ok(())
        }
    }
}

fn check_q(q: f64) -> Result<()> {
    if q.is_finite() && q > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "exponent q must lie in (0, inf), got {q}"
        )))
    }
}

/// The negative-definiteness region, a pure function of (space, family,
/// parameters).
fn negdef_region(space: &SampleSpace, family: &KernelFamily) -> bool {
    match family {
        KernelFamily::Misclassification => true,
        KernelFamily::PowerDistance { q } => *q <= 2.0,
        KernelFamily::LpPower { p, q } => {
            let SampleSpace::RealVector { dim, .. } = space else {
                return false;
            };
            let low_p = p.le(2.0) && *q <= match p {
                PExponent::Finite(pv) => *pv,
                PExponent::Inf => unreachable!("p <= 2 excludes inf"),
            };
            if *dim == 2 {
                // Planar case admits high p with small q.
                (p.ge(2.0) && !p.le(2.0) && *q <= 1.0) || low_p
            } else {
                low_p
            }
        }
        KernelFamily::Geodesic => true,
        KernelFamily::ConeCombination { terms } => {
            terms.iter().all(|(_, f)| negdef_region(space, f))
        }
    }
}

/// The metric region: misclassification, geodesic, power families with
/// q ≤ 1 and p ≥ 1, and nonnegative combinations thereof.
fn metric_region(space: &SampleSpace, family: &KernelFamily) -> bool {
    match family {
        KernelFamily::Misclassification => true,
        KernelFamily::PowerDistance { q } => *q <= 1.0,
        KernelFamily::LpPower { p, q } => *q <= 1.0 && p.ge(1.0),
        KernelFamily::Geodesic => true,
        KernelFamily::ConeCombination { terms } => {
            terms.iter().all(|(_, f)| metric_region(space, f))
        }
    }
}

fn eval_family(family: &KernelFamily, y: &Point, y2: &Point) -> f64 {
    match family {
        KernelFamily::Misclassification => {
            let (Point::Label(a), Point::Label(b)) = (y, y2) else {
                panic!("misclassification kernel applied to non-label points");
            };
            if a != b {
                1.0
            } else {
                0.0
            }
        }
        KernelFamily::PowerDistance { q } => {
            let (Point::Real(a), Point::Real(b)) = (y, y2) else {
                panic!("power distance applied to non-real points");
            };
            power(q_abs(a - b), *q)
        }
        KernelFamily::LpPower { p, q } => {
            let (Point::Vector(a), Point::Vector(b)) = (y, y2) else {
                panic!("lp power applied to non-vector points");
            };
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, z)| x - z).collect();
            power(lp_norm(&diff, *p), *q)
        }
        KernelFamily::Geodesic => {
            let (Point::Vector(a), Point::Vector(b)) = (y, y2) else {
                panic!("geodesic applied to non-vector points");
            };
            geodesic(a, b)
        }
        KernelFamily::ConeCombination { terms } => terms
            .iter()
            .map(|(w, f)| w * eval_family(f, y, y2))
            .sum(),
    }
}

fn q_abs(d: f64) -> f64 {
    d.abs()
}

fn power(base: f64, q: f64) -> f64 {
    if q == 1.0 {
        base
    } else if q == 2.0 {
        base * base
    } else {
        base.powf(q)
    }
}

/// Great-circle distance with the inner product clamped to [−1, 1].
/// Near-identical unit vectors go through the chord length 2·asin(‖y−y′‖/2),
/// where arccos loses precision.
fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, z)| x * z).sum();
    let dot = dot.clamp(-1.0, 1.0);
    if dot > 0.99 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, z)| x - z).collect();
        2.0 * (l2_norm(&diff) / 2.0).asin()
    } else {
        dot.acos()
    }
}

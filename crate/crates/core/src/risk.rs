//! Risk estimation: the single-draw risk β, the Bayes risk α with its act,
//! and the report verifying α ≤ β ≤ 2α.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::kernel::{KernelFamily, LossKernel};
use crate::mc::{self, stream, MeanSe};
use crate::optim;
use crate::space::{l2_norm, Point, SampleSpace};

/// Ratios are suppressed when α falls at or below this guard (0/0 hygiene).
pub const RATIO_GUARD: f64 = 1e-10;

/// Absolute slack granted on top of the 3·SE band, covering float noise in
/// closed-form (zero-SE) comparisons.
const FLOAT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    MonteCarlo,
}

/// An estimated expectation with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub method: Method,
}

impl RiskEstimate {
    pub fn closed_form(value: f64) -> Self {
        RiskEstimate {
            value,
            std_error: 0.0,
            n_samples: 0,
            method: Method::ClosedForm,
        }
    }

    pub fn monte_carlo(m: MeanSe) -> Self {
        RiskEstimate {
            value: m.mean,
            std_error: m.std_error,
            n_samples: m.n,
            method: Method::MonteCarlo,
        }
    }
}

/// Search configuration for the Bayes-act optimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Coarse grid resolution for 1-D searches.
    pub grid_points: usize,
    /// Golden-section width, relative to the search range.
    pub x_tol_rel: f64,
    /// Coordinate-descent restarts for vector spaces.
    pub restarts: usize,
    /// Cap on sample points scanned as sphere candidates.
    pub sphere_candidates: usize,
    /// Coordinate-descent sweep limit.
    pub max_sweeps: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            grid_points: 257,
            x_tol_rel: 1e-6,
            restarts: 8,
            sphere_candidates: 256,
            max_sweeps: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Satisfied,
    Violated,
    Inconclusive,
}

/// Verdict record for α ≤ β ≤ 2α on one kernel–distribution pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverHartReport {
    pub alpha: RiskEstimate,
    pub beta: RiskEstimate,
    pub bayes_act: Point,
    pub ratio: Option<f64>,
    pub bound_status: BoundStatus,
}

fn check_compat(kernel: &LossKernel, dist: &Distribution) -> Result<()> {
    if kernel.space() == dist.space() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!(
            "kernel on {} vs distribution on {}",
            kernel.space(),
            dist.space()
        )))
    }
}

/// E|Z|^q for a standard normal Z.
fn std_normal_abs_moment(q: f64) -> f64 {
    2.0_f64.powf(q / 2.0) * gamma((q + 1.0) / 2.0) / std::f64::consts::PI.sqrt()
}

/// E|Y − Y′|^q for Y, Y′ iid N(μ, σ²): the difference is N(0, 2σ²).
fn gaussian_power_beta(sd: f64, q: f64) -> f64 {
    (2.0 * sd * sd).powf(q / 2.0) * std_normal_abs_moment(q)
}

/// β = E L(Y, Y′): exact for finite-support laws and for power losses of a
/// 1-D Gaussian; Monte Carlo over independent pairs otherwise.
pub fn estimate_beta(
    kernel: &LossKernel,
    dist: &Distribution,
    n: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    check_compat(kernel, dist)?;
    if let Some(support) = dist.finite_support() {
        let mut total = 0.0;
        for (wi, yi) in &support {
            for (wj, yj) in &support {
                total += wi * wj * kernel.eval_raw(yi, yj);
            }
        }
        return Ok(RiskEstimate::closed_form(total));
    }
    if let crate::dist::Law::GaussianR { sd, .. } = dist.law() {
        if let Some(beta) = gaussian_closed_beta(kernel.spec().family.clone(), *sd) {
            return Ok(RiskEstimate::closed_form(beta));
        }
    }
    let m = mc::mc_mean(n, seed, stream::BETA, |rng| {
        let y = dist.draw(rng);
        let y2 = dist.draw(rng);
        kernel.eval_raw(&y, &y2)
    });
    Ok(RiskEstimate::monte_carlo(m))
}

fn gaussian_closed_beta(family: KernelFamily, sd: f64) -> Option<f64> {
    match family {
        KernelFamily::PowerDistance { q } => Some(gaussian_power_beta(sd, q)),
        KernelFamily::ConeCombination { terms } => {
            let mut total = 0.0;
            for (w, f) in terms {
                total += w * gaussian_closed_beta(f, sd)?;
            }
            Some(total)
        }
        _ => None,
    }
}

/// α = inf_y E L(y, Y′) with its minimizing act.
///
/// Exact for finite-support laws (the objective is an exact weighted sum);
/// otherwise a fixed common-random-number sample of size `n` is drawn once
/// and reused for every candidate act, making the objective deterministic
/// during the search.
pub fn estimate_alpha(
    kernel: &LossKernel,
    dist: &Distribution,
    n: usize,
    seed: u64,
    opt: &OptimizerConfig,
) -> Result<(Point, RiskEstimate)> {
    check_compat(kernel, dist)?;
    if let Some(support) = dist.finite_support() {
        if support.len() == 1 {
            return Ok((support[0].1.clone(), RiskEstimate::closed_form(0.0)));
        }
        if let (
            crate::dist::Law::TwoPoint { a, b, prob_a },
            KernelFamily::PowerDistance { q },
        ) = (dist.law(), &kernel.spec().family)
        {
            let (act, alpha) = two_point_power_alpha(*a, *b, *prob_a, *q);
            return Ok((Point::Real(act), RiskEstimate::closed_form(alpha)));
        }
        let points: Vec<Point> = support.iter().map(|(_, p)| p.clone()).collect();
        let obj = |y: &Point| -> f64 {
            support
                .iter()
                .map(|(w, x)| w * kernel.eval_raw(y, x))
                .sum()
        };
        let act = minimize_over_space(kernel.space(), &points, &obj, opt)?;
        let value = obj(&act);
        if !value.is_finite() {
            return Err(Error::OptimizerDiverged);
        }
        return Ok((act, RiskEstimate::closed_form(value)));
    }

    let sample = dist.sample_stream(n, seed, stream::ALPHA);
    let obj = |y: &Point| -> f64 { mc::chunked_mean(&sample, |s| kernel.eval_raw(y, s)) };
    let act = minimize_over_space(kernel.space(), &sample, &obj, opt)?;
    let m = mc::chunked_mean_se(&sample, |s| kernel.eval_raw(&act, s));
    if !m.mean.is_finite() {
        return Err(Error::OptimizerDiverged);
    }
    Ok((act, RiskEstimate::monte_carlo(m)))
}

/// Closed-form Bayes act for |y − y′|^q against a two-point law.
/// For q > 1 the interior stationary point of the convex objective; for
/// q ≤ 1 the better of the two atoms.
fn two_point_power_alpha(a: f64, b: f64, prob_a: f64, q: f64) -> (f64, f64) {
    if a == b {
        return (a, 0.0);
    }
    let (lo, hi, p_lo, p_hi) = if a < b {
        (a, b, prob_a, 1.0 - prob_a)
    } else {
        (b, a, 1.0 - prob_a, prob_a)
    };
    let d = hi - lo;
    if q > 1.0 && p_lo > 0.0 && p_hi > 0.0 {
        let r = (p_hi / p_lo).powf(1.0 / (q - 1.0));
        let y = (lo + r * hi) / (1.0 + r);
        let alpha = p_lo * (y - lo).powf(q) + p_hi * (hi - y).powf(q);
        (y, alpha)
    } else {
        // Endpoint optimum: the atom with more mass.
        let at_lo = p_hi * d.powf(q);
        let at_hi = p_lo * d.powf(q);
        if at_lo <= at_hi {
            (lo, at_lo)
        } else {
            (hi, at_hi)
        }
    }
}

fn minimize_over_space<F>(
    space: &SampleSpace,
    points: &[Point],
    obj: &F,
    opt: &OptimizerConfig,
) -> Result<Point>
where
    F: Fn(&Point) -> f64,
{
    match space {
        SampleSpace::DiscreteLabels { label_count } => {
            let mut best = (Point::Label(0), f64::INFINITY);
            for l in 0..*label_count {
                let y = Point::Label(l);
                let v = obj(&y);
                if !v.is_finite() {
                    return Err(Error::OptimizerDiverged);
                }
                if v < best.1 {
                    best = (y, v);
                }
            }
            Ok(best.0)
        }
        SampleSpace::RealLine => {
            let mut xs: Vec<f64> = points.iter().filter_map(Point::as_real).collect();
            xs.sort_by(f64::total_cmp);
            let (lo, hi) = optim::search_range(&xs);
            let x_tol = opt.x_tol_rel * (hi - lo);
            let (x, _) = optim::grid_then_golden(
                |y| obj(&Point::Real(y)),
                lo,
                hi,
                opt.grid_points,
                x_tol,
            )?;
            Ok(Point::Real(x))
        }
        SampleSpace::RealVector { dim, .. } => {
            // Per-coordinate sorted samples give ranges and quantile starts.
            let mut coords: Vec<Vec<f64>> = vec![Vec::with_capacity(points.len()); *dim];
            for p in points {
                let v = p.as_vector().expect("vector space");
                for (j, x) in v.iter().enumerate() {
                    coords[j].push(*x);
                }
            }
            for c in &mut coords {
                c.sort_by(f64::total_cmp);
            }
            let ranges: Vec<(f64, f64)> = coords.iter().map(|c| optim::search_range(c)).collect();
            let vec_obj = |v: &[f64]| obj(&Point::Vector(v.to_vec()));
            let mut best: Option<(Vec<f64>, f64)> = None;
            let restarts = opt.restarts.max(1);
            for r in 0..restarts {
                let level = (r as f64 + 0.5) / restarts as f64;
                let start: Vec<f64> = coords
                    .iter()
                    .map(|c| optim::quantile_sorted(c, level))
                    .collect();
                let (x, fx) = optim::coordinate_descent(
                    vec_obj,
                    &start,
                    &ranges,
                    opt.grid_points,
                    opt.x_tol_rel,
                    opt.max_sweeps,
                )?;
                if best.as_ref().map_or(true, |(_, bf)| fx < *bf) {
                    best = Some((x, fx));
                }
            }
            Ok(Point::Vector(best.expect("restarts >= 1").0))
        }
        SampleSpace::Sphere { .. } => {
            let stride = (points.len() / opt.sphere_candidates.max(1)).max(1);
            let mut best: Option<(Vec<f64>, f64)> = None;
            for p in points.iter().step_by(stride) {
                let v = obj(p);
                if !v.is_finite() {
                    return Err(Error::OptimizerDiverged);
                }
                if best.as_ref().map_or(true, |(_, bf)| v < *bf) {
                    best = Some((p.as_vector().expect("sphere point").to_vec(), v));
                }
            }
            let u = best
                .ok_or_else(|| Error::InvalidParameter("empty candidate set".into()))?
                .0;
            let refined = refine_on_sphere(obj, u, opt)?;
            Ok(Point::Vector(refined))
        }
    }
}

/// Local refinement on the sphere: golden-section line searches along a
/// tangent basis, renormalizing after each move.
fn refine_on_sphere<F>(obj: &F, mut u: Vec<f64>, opt: &OptimizerConfig) -> Result<Vec<f64>>
where
    F: Fn(&Point) -> f64,
{
    let theta_tol = opt.x_tol_rel * std::f64::consts::PI;
    for _ in 0..2 {
        for t in tangent_basis(&u) {
            let f = |theta: f64| obj(&Point::Vector(rotate_toward(&u, &t, theta)));
            let (theta, _) = optim::grid_then_golden(f, -0.8, 0.8, 33, theta_tol)?;
            u = rotate_toward(&u, &t, theta);
        }
    }
    Ok(u)
}

fn rotate_toward(u: &[f64], t: &[f64], theta: f64) -> Vec<f64> {
    let (c, s) = (theta.cos(), theta.sin());
    let v: Vec<f64> = u.iter().zip(t).map(|(a, b)| c * a + s * b).collect();
    let norm = l2_norm(&v);
    v.iter().map(|x| x / norm).collect()
}

/// Orthonormal basis of the tangent space at `u`, from Gram-Schmidt on the
/// standard basis.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let d = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for i in 0..d {
        let mut v = vec![0.0; d];
        v[i] = 1.0;
        let dot_u: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
        for (x, ux) in v.iter_mut().zip(u) {
            *x -= dot_u * ux;
        }
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (x, bx) in v.iter_mut().zip(b) {
                *x -= dot * bx;
            }
        }
        let norm = l2_norm(&v);
        if norm > 1e-6 {
            for x in &mut v {
                *x /= norm;
            }
            basis.push(v);
            if basis.len() == d - 1 {
                break;
            }
        }
    }
    basis
}

/// Run α and β on disjoint seed substreams and judge α ≤ β ≤ 2α.
pub fn cover_hart_report(
    kernel: &LossKernel,
    dist: &Distribution,
    n: usize,
    seed: u64,
    opt: &OptimizerConfig,
) -> Result<CoverHartReport> {
    let (bayes_act, alpha) = estimate_alpha(kernel, dist, n, seed, opt)?;
    let beta = estimate_beta(kernel, dist, n, seed)?;
    let (ratio, bound_status) = judge_bounds(&alpha, &beta);
    Ok(CoverHartReport {
        alpha,
        beta,
        bayes_act,
        ratio,
        bound_status,
    })
}

pub(crate) fn judge_bounds(
    alpha: &RiskEstimate,
    beta: &RiskEstimate,
) -> (Option<f64>, BoundStatus) {
    let a = alpha.value;
    let b = beta.value;
    let ratio = (a > RATIO_GUARD).then(|| b / a);
    if !a.is_finite() || !b.is_finite() {
        return (None, BoundStatus::Inconclusive);
    }
    let combined = (alpha.std_error.powi(2) + beta.std_error.powi(2)).sqrt();
    let eps = 3.0 * combined + FLOAT_SLACK * a.abs().max(b.abs()).max(1.0);
    let deviation = (a - b).max(b - 2.0 * a);
    let status = if deviation <= eps {
        BoundStatus::Satisfied
    } else {
        BoundStatus::Violated
    };
    (ratio, status)
}

//! Kernel scores: proper scoring rules S(P,y′) = E_P L(Y,y′) − ½E_P L(Y,Y′)
//! built from certified negative definite kernels, their divergence, and the
//! exact scoring analogue β = 2α.

use serde::{Deserialize, Serialize};

use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::kernel::LossKernel;
use crate::mc::{self, stream};
use crate::risk::{Method, RiskEstimate, RATIO_GUARD};

const FLOAT_SLACK: f64 = 1e-12;

/// A kernel score. Construction normally requires a certified negative
/// definite base kernel; `new_unchecked` admits uncertified kernels for
/// counterexample experiments and marks every report "unguaranteed".
#[derive(Debug, Clone)]
pub struct ScoringRule {
    kernel: LossKernel,
    guaranteed: bool,
}

impl ScoringRule {
    pub fn new(kernel: LossKernel) -> Result<Self> {
        if !kernel.certified_negdef() {
            return Err(Error::UncertifiedKernel);
        }
        Ok(ScoringRule {
            kernel,
            guaranteed: true,
        })
    }

    /// Admit any kernel; propriety is no longer guaranteed.
    pub fn new_unchecked(kernel: LossKernel) -> Self {
        let guaranteed = kernel.certified_negdef();
        ScoringRule { kernel, guaranteed }
    }

    pub fn kernel(&self) -> &LossKernel {
        &self.kernel
    }

    pub fn guaranteed(&self) -> bool {
        self.guaranteed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualityStatus {
    Holds,
    Violated,
    Inconclusive,
}

/// Verdict record for the scoring analogue α = E S(P,Y′), β = E S(δ_Y,Y′),
/// β = 2α.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub alpha: RiskEstimate,
    pub beta: RiskEstimate,
    pub ratio: Option<f64>,
    pub equality_status: EqualityStatus,
    /// False when the base kernel was admitted without certification.
    pub guaranteed: bool,
}

/// One challenger's divergence from the forecast under test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProprietyEntry {
    pub challenger_index: usize,
    pub divergence: RiskEstimate,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProprietyReport {
    pub entries: Vec<ProprietyEntry>,
    pub all_pass: bool,
    pub guaranteed: bool,
}

fn check_compat(rule: &ScoringRule, dist: &Distribution) -> Result<()> {
    if rule.kernel.space() == dist.space() {
        Ok(())
    } else {
        Err(Error::SpaceMismatch(format!(
            "scoring kernel on {} vs distribution on {}",
            rule.kernel.space(),
            dist.space()
        )))
    }
}

/// Exact E L(Y, y′) and E L(Y, Y′) over a finite support.
fn exact_expectations(
    kernel: &LossKernel,
    support: &[(f64, crate::space::Point)],
    y_obs: &crate::space::Point,
) -> (f64, f64) {
    let mut cross = 0.0;
    let mut self_term = 0.0;
    for (wi, yi) in support {
        cross += wi * kernel.eval_raw(yi, y_obs);
        for (wj, yj) in support {
            self_term += wi * wj * kernel.eval_raw(yi, yj);
        }
    }
    (cross, self_term)
}

/// S(P, y′) = E_P L(Y, y′) − ½ E_P L(Y, Y′). Exact for finite-support
/// forecasts; Monte Carlo otherwise. A Dirac forecast yields exactly
/// L(y, y′).
pub fn kernel_score(
    rule: &ScoringRule,
    forecast: &Distribution,
    y_obs: &crate::space::Point,
    n: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    check_compat(rule, forecast)?;
    rule.kernel.space().check_point(y_obs)?;
    if let Some(support) = forecast.finite_support() {
        let (cross, self_term) = exact_expectations(&rule.kernel, &support, y_obs);
        return Ok(RiskEstimate::closed_form(cross - 0.5 * self_term));
    }
    let k = &rule.kernel;
    let m = mc::mc_mean(n, seed, stream::SCORE_VALUE, |rng| {
        let y = forecast.draw(rng);
        let y2 = forecast.draw(rng);
        k.eval_raw(&y, y_obs) - 0.5 * k.eval_raw(&y, &y2)
    });
    Ok(RiskEstimate::monte_carlo(m))
}

/// d(P,Q) = E L(Z,Y′) − ½ E L(Y,Y′) − ½ E L(Z,Z′) with Y,Y′ ~ P and
/// Z,Z′ ~ Q, all independent. Equals the expected score gap between
/// forecasting Q and forecasting P, so d ≥ 0 certifies propriety on the
/// pair.
pub fn divergence(
    rule: &ScoringRule,
    p: &Distribution,
    q: &Distribution,
    n: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    check_compat(rule, p)?;
    check_compat(rule, q)?;
    let k = &rule.kernel;
    if let (Some(sp), Some(sq)) = (p.finite_support(), q.finite_support()) {
        let mut cross = 0.0;
        for (wz, z) in &sq {
            for (wy, y) in &sp {
                cross += wz * wy * k.eval_raw(z, y);
            }
        }
        let mut self_p = 0.0;
        for (wi, yi) in &sp {
            for (wj, yj) in &sp {
                self_p += wi * wj * k.eval_raw(yi, yj);
            }
        }
        let mut self_q = 0.0;
        for (wi, zi) in &sq {
            for (wj, zj) in &sq {
                self_q += wi * wj * k.eval_raw(zi, zj);
            }
        }
        return Ok(RiskEstimate::closed_form(
            cross - 0.5 * self_p - 0.5 * self_q,
        ));
    }
    let m = mc::mc_mean(n, seed, stream::DIVERGENCE, |rng| {
        let zc = q.draw(rng);
        let yc = p.draw(rng);
        let y1 = p.draw(rng);
        let y2 = p.draw(rng);
        let z1 = q.draw(rng);
        let z2 = q.draw(rng);
        k.eval_raw(&zc, &yc) - 0.5 * k.eval_raw(&y1, &y2) - 0.5 * k.eval_raw(&z1, &z2)
    });
    Ok(RiskEstimate::monte_carlo(m))
}

/// Divergence of each challenger against `p`; pass iff d ≥ −3·SE.
pub fn check_propriety(
    rule: &ScoringRule,
    p: &Distribution,
    challengers: &[Distribution],
    n: usize,
    seed: u64,
) -> Result<ProprietyReport> {
    if challengers.is_empty() {
        return Err(Error::InvalidParameter(
            "propriety check needs at least one challenger".into(),
        ));
    }
    let mut entries = Vec::with_capacity(challengers.len());
    let mut all_pass = true;
    for (i, q) in challengers.iter().enumerate() {
        let d = divergence(rule, p, q, n, mc::mix(seed ^ (i as u64 + 1)))?;
        let tol = 3.0 * d.std_error + FLOAT_SLACK * d.value.abs().max(1.0);
        let pass = d.value >= -tol;
        all_pass &= pass;
        entries.push(ProprietyEntry {
            challenger_index: i,
            divergence: d,
            pass,
        });
    }
    Ok(ProprietyReport {
        entries,
        all_pass,
        guaranteed: rule.guaranteed,
    })
}

/// α = E S(P,Y′) and β = E S(δ_Y,Y′); under a kernel score β collapses to
/// E L(Y,Y′) and α to half of it. α is assembled from two independent
/// estimators of E L(Y,Y′) rather than assuming the identity.
pub fn chp_report(
    rule: &ScoringRule,
    dist: &Distribution,
    n: usize,
    seed: u64,
) -> Result<ScoreReport> {
    check_compat(rule, dist)?;
    let k = &rule.kernel;
    let (alpha, beta) = if let Some(support) = dist.finite_support() {
        let mut self_term = 0.0;
        for (wi, yi) in &support {
            for (wj, yj) in &support {
                self_term += wi * wj * k.eval_raw(yi, yj);
            }
        }
        (
            RiskEstimate::closed_form(0.5 * self_term),
            RiskEstimate::closed_form(self_term),
        )
    } else {
        let pair = |rng: &mut rand_chacha::ChaCha8Rng| {
            let y = dist.draw(rng);
            let y2 = dist.draw(rng);
            k.eval_raw(&y, &y2)
        };
        let a1 = mc::mc_mean(n, seed, stream::SCORE_ALPHA_1, pair);
        let a2 = mc::mc_mean(n, seed, stream::SCORE_ALPHA_2, pair);
        let b = mc::mc_mean(n, seed, stream::SCORE_BETA, pair);
        let alpha = RiskEstimate {
            value: a1.mean - 0.5 * a2.mean,
            std_error: (a1.std_error.powi(2) + 0.25 * a2.std_error.powi(2)).sqrt(),
            n_samples: a1.n + a2.n,
            method: Method::MonteCarlo,
        };
        (alpha, RiskEstimate::monte_carlo(b))
    };

    let ratio = (alpha.value > RATIO_GUARD).then(|| beta.value / alpha.value);
    let equality_status = if !alpha.value.is_finite() || !beta.value.is_finite() {
        EqualityStatus::Inconclusive
    } else {
        let combined = (beta.std_error.powi(2) + 4.0 * alpha.std_error.powi(2)).sqrt();
        let tol = 3.0 * combined + FLOAT_SLACK * beta.value.abs().max(1.0);
        if (beta.value - 2.0 * alpha.value).abs() <= tol {
            EqualityStatus::Holds
        } else {
            EqualityStatus::Violated
        }
    };
    Ok(ScoreReport {
        alpha,
        beta,
        ratio,
        equality_status,
        guaranteed: rule.guaranteed,
    })
}

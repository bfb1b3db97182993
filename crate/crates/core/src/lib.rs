//! Loss kernels in the Cover-Hart class, numerical class-membership
//! certifiers, and Monte-Carlo verification of the risk inequality
//! α ≤ β ≤ 2α and its scoring-rule analogue β = 2α.
//!
//! The crate is organized around five pieces:
//!
//! * [`space`] / [`kernel`] — sample spaces and the kernel catalogue
//!   (misclassification, |y−y′|^q, ‖y−y′‖_p^q, great-circle distance),
//!   with exact parameter-region certification and the convex-cone
//!   combinator.
//! * [`membership`] — certifiers for the metric axioms (exhaustive triple
//!   scan) and negative definiteness (centered-matrix eigencheck), with
//!   self-verifying violation witnesses.
//! * [`dist`] / [`risk`] — the distribution catalogue, a block-seeded
//!   Monte-Carlo engine, a common-random-number Bayes-act optimizer, and
//!   the α ≤ β ≤ 2α report.
//! * [`scoring`] — kernel scores (Brier, CRPS as special cases), propriety
//!   via the energy-distance divergence, and the β = 2α equality report.
//! * [`nn`] — a 1-nearest-neighbor harness tracking the empirical risk
//!   ratio against the 2α ceiling on synthetic tasks.
//!
//! Estimation loops are data-parallel under the `parallel` feature
//! (enabled by default); results are byte-identical with or without it,
//! and independent of worker count, via fixed-size seeded blocks.

pub mod dist;
pub mod error;
pub mod kernel;
pub mod mc;
pub mod membership;
pub mod nn;
pub mod optim;
pub mod risk;
pub mod scoring;
pub mod space;

pub use dist::{Distribution, Law, MixtureComponent};
pub use error::{Error, Result};
pub use kernel::{cone_combine, KernelFamily, KernelSpec, LossKernel};
pub use membership::{
    check_metric, check_negdef, default_metric_tolerance, default_negdef_tolerance, max_abs_loss,
    MetricCertificate, NegDefCertificate, Verdict,
};
pub use nn::{run_nn_experiment, ConditionalLaw, FlipProb, MeanFn, NNReport, SyntheticTask};
pub use risk::{
    cover_hart_report, estimate_alpha, estimate_beta, BoundStatus, CoverHartReport, Method,
    OptimizerConfig, RiskEstimate, RATIO_GUARD,
};
pub use scoring::{
    check_propriety, chp_report, divergence, kernel_score, EqualityStatus, ProprietyReport,
    ScoreReport, ScoringRule,
};
pub use space::{PExponent, Point, SampleSpace};

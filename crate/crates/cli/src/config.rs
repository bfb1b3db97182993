//! Strict JSON experiment configs.
//!
//! Parsing is hand-rolled over `serde_json::Value` so that unknown fields
//! are hard errors at every nesting level — a silent typo in a config would
//! otherwise corrupt a reproduction. After validation the config is
//! re-emitted in canonical form (defaults filled in, `output` stripped) so
//! a report can embed exactly the config that reproduces it.

use serde_json::{json, Map, Value};

use coverhart::{
    cone_combine, ConditionalLaw, Distribution, FlipProb, KernelFamily, KernelSpec, LossKernel,
    MeanFn, MixtureComponent, OptimizerConfig, PExponent, Point, SampleSpace, SyntheticTask,
};

pub const SCHEMA_VERSION: u64 = 1;

/// A fully validated experiment, plus the canonical JSON that recreates it.
pub struct ExperimentConfig {
    pub id: String,
    pub seed: u64,
    pub expect: String,
    pub output: Option<String>,
    pub experiment: Experiment,
    /// Canonical config (defaults resolved, `output` removed).
    pub resolved: Value,
}

pub enum Experiment {
    CoverHart {
        kernel: LossKernel,
        dist: Distribution,
        n_samples: usize,
        optimizer: OptimizerConfig,
    },
    Membership {
        kernel: LossKernel,
        check: CheckKind,
        n_points: usize,
        tolerance: Option<f64>,
    },
    Scoring {
        kernel: LossKernel,
        dist: Distribution,
        n_samples: usize,
        allow_uncertified: bool,
    },
    Propriety {
        kernel: LossKernel,
        dist: Distribution,
        challengers: Vec<Distribution>,
        n_samples: usize,
        allow_uncertified: bool,
    },
    Nn {
        task: SyntheticTask,
        loss: LossKernel,
        n_train: usize,
        n_test: usize,
        ratio_allowance: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    NegDef,
    Metric,
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::CoverHart { .. } => "cover_hart",
            Experiment::Membership { .. } => "membership",
            Experiment::Scoring { .. } => "scoring",
            Experiment::Propriety { .. } => "propriety",
            Experiment::Nn { .. } => "nn",
        }
    }

    /// The verdict string meaning "the theory held".
    pub fn default_expect(&self) -> &'static str {
        match self {
            Experiment::CoverHart { .. } => "satisfied",
            Experiment::Membership { .. } => "pass",
            Experiment::Scoring { .. } => "holds",
            Experiment::Propriety { .. } => "pass",
            Experiment::Nn { .. } => "satisfied",
        }
    }
}

/// A JSON object being consumed field by field; leftovers are errors.
struct Obj {
    ctx: String,
    map: Map<String, Value>,
}

type PResult<T> = Result<T, String>;

impl Obj {
    fn new(ctx: &str, v: Value) -> PResult<Self> {
        match v {
            Value::Object(map) => Ok(Obj {
                ctx: ctx.to_string(),
                map,
            }),
            other => Err(format!("{ctx}: expected an object, got {other}")),
        }
    }

    fn take(&mut self, key: &str) -> Option<Value> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> PResult<Value> {
        self.take(key)
            .ok_or_else(|| format!("{}: missing required field `{key}`", self.ctx))
    }

    fn str_field(&mut self, key: &str) -> PResult<String> {
        match self.required(key)? {
            Value::String(s) => Ok(s),
            other => Err(format!("{}.{key}: expected a string, got {other}", self.ctx)),
        }
    }

    fn f64_field(&mut self, key: &str) -> PResult<f64> {
        match self.required(key)? {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| format!("{}.{key}: not a finite number", self.ctx)),
            other => Err(format!("{}.{key}: expected a number, got {other}", self.ctx)),
        }
    }

    fn u64_field(&mut self, key: &str) -> PResult<u64> {
        match self.required(key)? {
            Value::Number(n) => n
                .as_u64()
                .ok_or_else(|| format!("{}.{key}: expected a nonnegative integer", self.ctx)),
            other => Err(format!("{}.{key}: expected an integer, got {other}", self.ctx)),
        }
    }

    fn opt_u64(&mut self, key: &str, default: u64) -> PResult<u64> {
        match self.take(key) {
            None => Ok(default),
            Some(Value::Number(n)) => n
                .as_u64()
                .ok_or_else(|| format!("{}.{key}: expected a nonnegative integer", self.ctx)),
            Some(other) => Err(format!("{}.{key}: expected an integer, got {other}", self.ctx)),
        }
    }

    fn opt_f64(&mut self, key: &str) -> PResult<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Number(n)) => n
                .as_f64()
                .map(Some)
                .ok_or_else(|| format!("{}.{key}: not a finite number", self.ctx)),
            Some(other) => Err(format!("{}.{key}: expected a number, got {other}", self.ctx)),
        }
    }

    fn opt_bool(&mut self, key: &str, default: bool) -> PResult<bool> {
        match self.take(key) {
            None => Ok(default),
            Some(Value::Bool(b)) => Ok(b),
            Some(other) => Err(format!("{}.{key}: expected a boolean, got {other}", self.ctx)),
        }
    }

    fn opt_str(&mut self, key: &str) -> PResult<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(format!("{}.{key}: expected a string, got {other}", self.ctx)),
        }
    }

    fn arr_field(&mut self, key: &str) -> PResult<Vec<Value>> {
        match self.required(key)? {
            Value::Array(a) => Ok(a),
            other => Err(format!("{}.{key}: expected an array, got {other}", self.ctx)),
        }
    }

    fn finish(self) -> PResult<()> {
        if self.map.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.map.keys().map(String::as_str).collect();
            Err(format!("{}: unknown field(s): {}", self.ctx, keys.join(", ")))
        }
    }
}

fn num_f64(v: &Value, ctx: &str) -> PResult<f64> {
    v.as_f64()
        .ok_or_else(|| format!("{ctx}: expected a number, got {v}"))
}

fn parse_p(v: Value, ctx: &str) -> PResult<PExponent> {
    match v {
        Value::String(s) if s == "inf" => Ok(PExponent::Inf),
        Value::Number(n) => n
            .as_f64()
            .map(PExponent::Finite)
            .ok_or_else(|| format!("{ctx}: not a finite number")),
        other => Err(format!("{ctx}: expected a number or \"inf\", got {other}")),
    }
}

fn p_to_value(p: PExponent) -> Value {
    match p {
        PExponent::Finite(x) => json!(x),
        PExponent::Inf => json!("inf"),
    }
}

fn parse_space(v: Value, ctx: &str) -> PResult<SampleSpace> {
    let mut o = Obj::new(ctx, v)?;
    let kind = o.str_field("kind")?;
    let space = match kind.as_str() {
        "discrete_labels" => SampleSpace::DiscreteLabels {
            label_count: o.u64_field("label_count")? as u32,
        },
        "real_line" => SampleSpace::RealLine,
        "real_vector" => SampleSpace::RealVector {
            dim: o.u64_field("dim")? as usize,
            p: parse_p(o.required("p")?, &format!("{ctx}.p"))?,
        },
        "sphere" => SampleSpace::Sphere {
            dim: o.u64_field("dim")? as usize,
        },
        other => return Err(format!("{ctx}.kind: unknown space kind `{other}`")),
    };
    o.finish()?;
    Ok(space)
}

fn space_to_value(space: &SampleSpace) -> Value {
    match space {
        SampleSpace::DiscreteLabels { label_count } => {
            json!({"kind": "discrete_labels", "label_count": label_count})
        }
        SampleSpace::RealLine => json!({"kind": "real_line"}),
        SampleSpace::RealVector { dim, p } => {
            json!({"kind": "real_vector", "dim": dim, "p": p_to_value(*p)})
        }
        SampleSpace::Sphere { dim } => json!({"kind": "sphere", "dim": dim}),
    }
}

fn parse_family(v: Value, ctx: &str) -> PResult<KernelFamily> {
    let mut o = Obj::new(ctx, v)?;
    let name = o.str_field("name")?;
    let family = match name.as_str() {
        "misclassification" => KernelFamily::Misclassification,
        "power_distance" => KernelFamily::PowerDistance {
            q: o.f64_field("q")?,
        },
        "lp_power" => KernelFamily::LpPower {
            p: parse_p(o.required("p")?, &format!("{ctx}.p"))?,
            q: o.f64_field("q")?,
        },
        "geodesic" => KernelFamily::Geodesic,
        "cone_combination" => {
            let mut terms = Vec::new();
            for (i, t) in o.arr_field("terms")?.into_iter().enumerate() {
                let tctx = format!("{ctx}.terms[{i}]");
                let mut to = Obj::new(&tctx, t)?;
                let weight = to.f64_field("weight")?;
                let inner = parse_family(to.required("family")?, &format!("{tctx}.family"))?;
                to.finish()?;
                terms.push((weight, inner));
            }
            KernelFamily::ConeCombination { terms }
        }
        other => return Err(format!("{ctx}.name: unknown kernel family `{other}`")),
    };
    o.finish()?;
    Ok(family)
}

fn family_to_value(family: &KernelFamily) -> Value {
    match family {
        KernelFamily::Misclassification => json!({"name": "misclassification"}),
        KernelFamily::PowerDistance { q } => json!({"name": "power_distance", "q": q}),
        KernelFamily::LpPower { p, q } => {
            json!({"name": "lp_power", "p": p_to_value(*p), "q": q})
        }
        KernelFamily::Geodesic => json!({"name": "geodesic"}),
        KernelFamily::ConeCombination { terms } => {
            let terms: Vec<Value> = terms
                .iter()
                .map(|(w, f)| json!({"weight": w, "family": family_to_value(f)}))
                .collect();
            json!({"name": "cone_combination", "terms": terms})
        }
    }
}

fn parse_kernel(v: Value, ctx: &str) -> PResult<LossKernel> {
    let mut o = Obj::new(ctx, v)?;
    let space = parse_space(o.required("space")?, &format!("{ctx}.space"))?;
    let family = parse_family(o.required("family")?, &format!("{ctx}.family"))?;
    o.finish()?;
    build_kernel(space, family, ctx)
}

fn build_kernel(space: SampleSpace, family: KernelFamily, ctx: &str) -> PResult<LossKernel> {
    if let KernelFamily::ConeCombination { terms } = &family {
        let mut built = Vec::new();
        for (w, f) in terms {
            let k = LossKernel::make(KernelSpec {
                space: space.clone(),
                family: f.clone(),
            })
            .map_err(|e| format!("{ctx}: {e}"))?;
            built.push((*w, k));
        }
        return cone_combine(&built).map_err(|e| format!("{ctx}: {e}"));
    }
    LossKernel::make(KernelSpec { space, family }).map_err(|e| format!("{ctx}: {e}"))
}

fn kernel_to_value(kernel: &LossKernel) -> Value {
    json!({
        "space": space_to_value(kernel.space()),
        "family": family_to_value(&kernel.spec().family),
    })
}

fn parse_point(v: &Value, space: &SampleSpace, ctx: &str) -> PResult<Point> {
    let point = match space {
        SampleSpace::DiscreteLabels { .. } => Point::Label(
            v.as_u64()
                .ok_or_else(|| format!("{ctx}: expected a label index"))? as u32,
        ),
        SampleSpace::RealLine => Point::Real(num_f64(v, ctx)?),
        SampleSpace::RealVector { .. } | SampleSpace::Sphere { .. } => {
            let arr = v
                .as_array()
                .ok_or_else(|| format!("{ctx}: expected a coordinate array"))?;
            let mut coords = Vec::with_capacity(arr.len());
            for (i, c) in arr.iter().enumerate() {
                coords.push(num_f64(c, &format!("{ctx}[{i}]"))?);
            }
            Point::Vector(coords)
        }
    };
    space.check_point(&point).map_err(|e| format!("{ctx}: {e}"))?;
    Ok(point)
}

fn point_to_value(p: &Point) -> Value {
    match p {
        Point::Label(l) => json!(l),
        Point::Real(x) => json!(x),
        Point::Vector(v) => json!(v),
    }
}

fn parse_distribution(v: Value, space: &SampleSpace, ctx: &str) -> PResult<Distribution> {
    let mut o = Obj::new(ctx, v)?;
    let law = o.str_field("law")?;
    let dist = match law.as_str() {
        "finite_pmf" => {
            let mut weights = Vec::new();
            for (i, w) in o.arr_field("weights")?.into_iter().enumerate() {
                weights.push(num_f64(&w, &format!("{ctx}.weights[{i}]"))?);
            }
            Distribution::finite_pmf(weights)
        }
        "gaussian_r" => Distribution::gaussian_r(o.f64_field("mean")?, o.f64_field("sd")?),
        "gaussian_rd" => {
            let mut mean = Vec::new();
            for (i, m) in o.arr_field("mean")?.into_iter().enumerate() {
                mean.push(num_f64(&m, &format!("{ctx}.mean[{i}]"))?);
            }
            let sd = o.f64_field("sd")?;
            let p = match space {
                SampleSpace::RealVector { p, .. } => *p,
                _ => return Err(format!("{ctx}: gaussian_rd needs a real_vector space")),
            };
            Distribution::gaussian_rd(mean, sd, p)
        }
        "two_point" => Distribution::two_point(
            o.f64_field("a")?,
            o.f64_field("b")?,
            o.f64_field("prob_a")?,
        ),
        "mixture_gauss_r" => {
            let mut components = Vec::new();
            for (i, c) in o.arr_field("components")?.into_iter().enumerate() {
                let cctx = format!("{ctx}.components[{i}]");
                let mut co = Obj::new(&cctx, c)?;
                components.push(MixtureComponent {
                    weight: co.f64_field("weight")?,
                    mean: co.f64_field("mean")?,
                    sd: co.f64_field("sd")?,
                });
                co.finish()?;
            }
            Distribution::mixture_gauss_r(components)
        }
        "sphere_uniform" => {
            let dim = match space {
                SampleSpace::Sphere { dim } => *dim,
                _ => return Err(format!("{ctx}: sphere_uniform needs a sphere space")),
            };
            Distribution::sphere_uniform(dim)
        }
        "empirical" => {
            let mut points = Vec::new();
            for (i, p) in o.arr_field("points")?.into_iter().enumerate() {
                points.push(parse_point(&p, space, &format!("{ctx}.points[{i}]"))?);
            }
            Distribution::empirical(space.clone(), points)
        }
        "dirac" => {
            let point = parse_point(&o.required("point")?, space, &format!("{ctx}.point"))?;
            Distribution::dirac(space.clone(), point)
        }
        other => return Err(format!("{ctx}.law: unknown law `{other}`")),
    }
    .map_err(|e| format!("{ctx}: {e}"))?;
    o.finish()?;
    if dist.space() != space {
        return Err(format!(
            "{ctx}: distribution lives on {} but the kernel is on {}",
            dist.space(),
            space
        ));
    }
    Ok(dist)
}

fn distribution_to_value(dist: &Distribution) -> Value {
    use coverhart::Law;
    match dist.law() {
        Law::FinitePmf { weights } => json!({"law": "finite_pmf", "weights": weights}),
        Law::GaussianR { mean, sd } => json!({"law": "gaussian_r", "mean": mean, "sd": sd}),
        Law::GaussianRd { mean, sd } => json!({"law": "gaussian_rd", "mean": mean, "sd": sd}),
        Law::TwoPoint { a, b, prob_a } => {
            json!({"law": "two_point", "a": a, "b": b, "prob_a": prob_a})
        }
        Law::MixtureGaussR { components } => {
            let comps: Vec<Value> = components
                .iter()
                .map(|c| json!({"weight": c.weight, "mean": c.mean, "sd": c.sd}))
                .collect();
            json!({"law": "mixture_gauss_r", "components": comps})
        }
        Law::SphereUniform => json!({"law": "sphere_uniform"}),
        Law::Empirical { points } => {
            let pts: Vec<Value> = points.iter().map(point_to_value).collect();
            json!({"law": "empirical", "points": pts})
        }
    }
}

fn parse_optimizer(v: Option<Value>, ctx: &str) -> PResult<OptimizerConfig> {
    let mut cfg = OptimizerConfig::default();
    if let Some(v) = v {
        let mut o = Obj::new(ctx, v)?;
        cfg.grid_points = o.opt_u64("grid_points", cfg.grid_points as u64)? as usize;
        cfg.x_tol_rel = o.opt_f64("x_tol_rel")?.unwrap_or(cfg.x_tol_rel);
        cfg.restarts = o.opt_u64("restarts", cfg.restarts as u64)? as usize;
        cfg.sphere_candidates = o.opt_u64("sphere_candidates", cfg.sphere_candidates as u64)? as usize;
        cfg.max_sweeps = o.opt_u64("max_sweeps", cfg.max_sweeps as u64)? as usize;
        o.finish()?;
    }
    Ok(cfg)
}

fn optimizer_to_value(opt: &OptimizerConfig) -> Value {
    json!({
        "grid_points": opt.grid_points,
        "x_tol_rel": opt.x_tol_rel,
        "restarts": opt.restarts,
        "sphere_candidates": opt.sphere_candidates,
        "max_sweeps": opt.max_sweeps,
    })
}

fn parse_flip_prob(v: Value, ctx: &str) -> PResult<FlipProb> {
    let mut o = Obj::new(ctx, v)?;
    let kind = o.str_field("kind")?;
    let fp = match kind.as_str() {
        "constant" => FlipProb::Constant {
            p: o.f64_field("p")?,
        },
        "linear" => FlipProb::Linear {
            intercept: o.f64_field("intercept")?,
            slope: o.f64_field("slope")?,
        },
        other => return Err(format!("{ctx}.kind: unknown flip_prob kind `{other}`")),
    };
    o.finish()?;
    Ok(fp)
}

fn flip_prob_to_value(fp: &FlipProb) -> Value {
    match fp {
        FlipProb::Constant { p } => json!({"kind": "constant", "p": p}),
        FlipProb::Linear { intercept, slope } => {
            json!({"kind": "linear", "intercept": intercept, "slope": slope})
        }
    }
}

fn parse_mean_fn(v: Value, ctx: &str) -> PResult<MeanFn> {
    let mut o = Obj::new(ctx, v)?;
    let kind = o.str_field("kind")?;
    let m = match kind.as_str() {
        "sine" => MeanFn::Sine {
            amplitude: o.f64_field("amplitude")?,
            frequency: o.f64_field("frequency")?,
        },
        "linear" => MeanFn::Linear {
            intercept: o.f64_field("intercept")?,
            slope: o.f64_field("slope")?,
        },
        other => return Err(format!("{ctx}.kind: unknown mean kind `{other}`")),
    };
    o.finish()?;
    Ok(m)
}

fn mean_fn_to_value(m: &MeanFn) -> Value {
    match m {
        MeanFn::Sine {
            amplitude,
            frequency,
        } => json!({"kind": "sine", "amplitude": amplitude, "frequency": frequency}),
        MeanFn::Linear { intercept, slope } => {
            json!({"kind": "linear", "intercept": intercept, "slope": slope})
        }
    }
}

fn parse_task(v: Value, ctx: &str) -> PResult<SyntheticTask> {
    let mut o = Obj::new(ctx, v)?;
    let kind = o.str_field("kind")?;
    let law = match kind.as_str() {
        "noisy_label" => ConditionalLaw::NoisyLabel {
            flip_prob: parse_flip_prob(o.required("flip_prob")?, &format!("{ctx}.flip_prob"))?,
        },
        "gaussian_regression" => ConditionalLaw::GaussianRegression {
            mean: parse_mean_fn(o.required("mean")?, &format!("{ctx}.mean"))?,
            noise_sd: o.f64_field("noise_sd")?,
        },
        other => return Err(format!("{ctx}.kind: unknown task kind `{other}`")),
    };
    o.finish()?;
    SyntheticTask::new(law).map_err(|e| format!("{ctx}: {e}"))
}

fn task_to_value(task: &SyntheticTask) -> Value {
    match task.law() {
        ConditionalLaw::NoisyLabel { flip_prob } => {
            json!({"kind": "noisy_label", "flip_prob": flip_prob_to_value(flip_prob)})
        }
        ConditionalLaw::GaussianRegression { mean, noise_sd } => json!({
            "kind": "gaussian_regression",
            "mean": mean_fn_to_value(mean),
            "noise_sd": noise_sd,
        }),
    }
}

/// Parse, validate, and canonicalize one experiment config.
///
/// `fallback_id` (normally the config file stem) supplies the id when the
/// config omits one; `seed_override` comes from `--seed`.
pub fn parse_config(
    text: &str,
    fallback_id: &str,
    seed_override: Option<u64>,
) -> PResult<ExperimentConfig> {
    let root: Value =
        serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
    let mut o = Obj::new("config", root)?;

    let version = o.u64_field("schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(format!(
            "config.schema_version: expected {SCHEMA_VERSION}, got {version}"
        ));
    }
    let id = o.opt_str("id")?.unwrap_or_else(|| fallback_id.to_string());
    let kind = o.str_field("experiment")?;
    let seed = seed_override.unwrap_or(o.opt_u64("seed", 0)?);
    let expect = o.opt_str("expect")?;
    let output = o.opt_str("output")?;

    let (experiment, body) = match kind.as_str() {
        "cover_hart" => {
            let kernel = parse_kernel(o.required("kernel")?, "config.kernel")?;
            let dist = parse_distribution(
                o.required("distribution")?,
                kernel.space(),
                "config.distribution",
            )?;
            let n_samples = o.opt_u64("n_samples", 100_000)? as usize;
            let optimizer = parse_optimizer(o.take("optimizer"), "config.optimizer")?;
            let body = json!({
                "kernel": kernel_to_value(&kernel),
                "distribution": distribution_to_value(&dist),
                "n_samples": n_samples,
                "optimizer": optimizer_to_value(&optimizer),
            });
            (
                Experiment::CoverHart {
                    kernel,
                    dist,
                    n_samples,
                    optimizer,
                },
                body,
            )
        }
        "membership" => {
            let kernel = parse_kernel(o.required("kernel")?, "config.kernel")?;
            let check = match o.str_field("check")?.as_str() {
                "negdef" => CheckKind::NegDef,
                "metric" => CheckKind::Metric,
                other => return Err(format!("config.check: unknown check `{other}`")),
            };
            let n_points = o.opt_u64("n_points", 32)? as usize;
            let tolerance = o.opt_f64("tolerance")?;
            let mut body = json!({
                "kernel": kernel_to_value(&kernel),
                "check": if check == CheckKind::NegDef { "negdef" } else { "metric" },
                "n_points": n_points,
            });
            if let Some(t) = tolerance {
                body["tolerance"] = json!(t);
            }
            (
                Experiment::Membership {
                    kernel,
                    check,
                    n_points,
                    tolerance,
                },
                body,
            )
        }
        "scoring" => {
            let kernel = parse_kernel(o.required("kernel")?, "config.kernel")?;
            let dist = parse_distribution(
                o.required("distribution")?,
                kernel.space(),
                "config.distribution",
            )?;
            let n_samples = o.opt_u64("n_samples", 100_000)? as usize;
            let allow_uncertified = o.opt_bool("allow_uncertified", false)?;
            let body = json!({
                "kernel": kernel_to_value(&kernel),
                "distribution": distribution_to_value(&dist),
                "n_samples": n_samples,
                "allow_uncertified": allow_uncertified,
            });
            (
                Experiment::Scoring {
                    kernel,
                    dist,
                    n_samples,
                    allow_uncertified,
                },
                body,
            )
        }
        "propriety" => {
            let kernel = parse_kernel(o.required("kernel")?, "config.kernel")?;
            let dist = parse_distribution(
                o.required("distribution")?,
                kernel.space(),
                "config.distribution",
            )?;
            let mut challengers = Vec::new();
            for (i, c) in o.arr_field("challengers")?.into_iter().enumerate() {
                challengers.push(parse_distribution(
                    c,
                    kernel.space(),
                    &format!("config.challengers[{i}]"),
                )?);
            }
            let n_samples = o.opt_u64("n_samples", 100_000)? as usize;
            let allow_uncertified = o.opt_bool("allow_uncertified", false)?;
            let body = json!({
                "kernel": kernel_to_value(&kernel),
                "distribution": distribution_to_value(&dist),
                "challengers": challengers.iter().map(distribution_to_value).collect::<Vec<_>>(),
                "n_samples": n_samples,
                "allow_uncertified": allow_uncertified,
            });
            (
                Experiment::Propriety {
                    kernel,
                    dist,
                    challengers,
                    n_samples,
                    allow_uncertified,
                },
                body,
            )
        }
        "nn" => {
            let task = parse_task(o.required("task")?, "config.task")?;
            let loss_family = parse_family(o.required("loss")?, "config.loss")?;
            let loss = build_kernel(task.response_space(), loss_family, "config.loss")?;
            let n_train = o.u64_field("n_train")? as usize;
            let n_test = o.u64_field("n_test")? as usize;
            let ratio_allowance = o.opt_f64("ratio_allowance")?.unwrap_or(0.15);
            let body = json!({
                "task": task_to_value(&task),
                "loss": family_to_value(&loss.spec().family),
                "n_train": n_train,
                "n_test": n_test,
                "ratio_allowance": ratio_allowance,
            });
            (
                Experiment::Nn {
                    task,
                    loss,
                    n_train,
                    n_test,
                    ratio_allowance,
                },
                body,
            )
        }
        other => return Err(format!("config.experiment: unknown experiment `{other}`")),
    };
    o.finish()?;

    let expect = expect.unwrap_or_else(|| experiment.default_expect().to_string());
    let mut resolved = body;
    let obj = resolved.as_object_mut().expect("body is an object");
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("id".into(), json!(id));
    obj.insert("experiment".into(), json!(experiment.kind()));
    obj.insert("seed".into(), json!(seed));
    obj.insert("expect".into(), json!(expect));

    Ok(ExperimentConfig {
        id,
        seed,
        expect,
        output,
        experiment,
        resolved,
    })
}

//! Certifier behavior over the full kernel catalogue: in-region parameters
//! survive repeated random point sets, out-of-region parameters fail with
//! self-verifying witnesses, and an independent randomized probe agrees
//! with the eigenvalue check.

use rand::Rng;

use coverhart::membership::quadratic_form;
use coverhart::{
    check_metric, check_negdef, default_metric_tolerance, default_negdef_tolerance, max_abs_loss,
    mc, Distribution, KernelFamily, KernelSpec, LossKernel, PExponent, Point, SampleSpace, Verdict,
};

fn make(space: SampleSpace, family: KernelFamily) -> LossKernel {
    LossKernel::make(KernelSpec { space, family }).unwrap()
}

/// Representative in-region parameters for all five catalogue rows.
fn certified_rows() -> Vec<LossKernel> {
    vec![
        make(
            SampleSpace::DiscreteLabels { label_count: 8 },
            KernelFamily::Misclassification,
        ),
        make(SampleSpace::RealLine, KernelFamily::PowerDistance { q: 1.5 }),
        make(
            SampleSpace::RealVector {
                dim: 2,
                p: PExponent::Finite(3.0),
            },
            KernelFamily::LpPower {
                p: PExponent::Finite(3.0),
                q: 1.0,
            },
        ),
        make(
            SampleSpace::RealVector {
                dim: 3,
                p: PExponent::Finite(1.5),
            },
            KernelFamily::LpPower {
                p: PExponent::Finite(1.5),
                q: 1.0,
            },
        ),
        make(SampleSpace::Sphere { dim: 3 }, KernelFamily::Geodesic),
    ]
}

/// Independent cross-check: max of aᵀLa over random sum-zero coefficient
/// vectors. Does not share any code with the eigendecomposition path.
fn rayleigh_probe(kernel: &LossKernel, points: &[Point], draws: usize, seed: u64) -> f64 {
    let n = points.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            l[i][j] = kernel.eval_raw(&points[i], &points[j]);
        }
    }
    let mut rng = mc::block_rng(seed, 77, 0);
    let mut max_form = f64::NEG_INFINITY;
    for _ in 0..draws {
        let mut a: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        let mean = a.iter().sum::<f64>() / n as f64;
        let norm: f64 = a.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>().sqrt();
        for x in &mut a {
            *x = (*x - mean) / norm;
        }
        let mut form = 0.0;
        for i in 0..n {
            for j in 0..n {
                form += a[i] * a[j] * l[i][j];
            }
        }
        max_form = max_form.max(form);
    }
    max_form
}

#[test]
fn certified_kernels_survive_fifty_random_point_sets() {
    for kernel in certified_rows() {
        assert!(kernel.certified_negdef(), "{}", kernel.name());
        let sampler = Distribution::standard_for(kernel.space()).unwrap();
        for set in 0..50u64 {
            let points = sampler.sample(32, 9000 + set);
            let scale = max_abs_loss(&kernel, &points).unwrap();
            let tol = default_negdef_tolerance(points.len(), scale);
            let cert = check_negdef(&kernel, &points, tol).unwrap();
            assert_eq!(
                cert.verdict,
                Verdict::Pass,
                "{} failed on set {set}: max eig {}",
                kernel.name(),
                cert.max_centered_eigenvalue
            );
        }
    }
}

#[test]
fn out_of_region_probes_fail_with_self_verifying_witnesses() {
    let probes = vec![
        (
            make(SampleSpace::RealLine, KernelFamily::PowerDistance { q: 2.5 }),
            32usize,
        ),
        // The ℓ₃ violation in ℝ³ is invisible on small point clouds; 128
        // points make it show up reliably.
        (
            make(
                SampleSpace::RealVector {
                    dim: 3,
                    p: PExponent::Finite(3.0),
                },
                KernelFamily::LpPower {
                    p: PExponent::Finite(3.0),
                    q: 1.0,
                },
            ),
            128,
        ),
    ];
    for (kernel, n_points) in probes {
        assert!(!kernel.certified_negdef());
        let sampler = Distribution::standard_for(kernel.space()).unwrap();
        let mut failed = false;
        for set in 0..50u64 {
            let points = sampler.sample(n_points, 500 + set);
            let scale = max_abs_loss(&kernel, &points).unwrap();
            let tol = default_negdef_tolerance(points.len(), scale);
            let cert = check_negdef(&kernel, &points, tol).unwrap();
            if cert.verdict == Verdict::Fail {
                failed = true;
                let a = cert.witness_coefficients.expect("fail carries witness");
                assert!(a.iter().sum::<f64>().abs() < 1e-12);
                let form = quadratic_form(&kernel, &points, &a).unwrap();
                assert!(
                    form > tol / 2.0,
                    "{}: witness form {form} not above {tol}/2",
                    kernel.name()
                );
            }
        }
        assert!(failed, "{} never failed across 50 sets", kernel.name());
    }
}

#[test]
fn rayleigh_probe_agrees_with_eigencheck() {
    // Certified case: probe stays below tolerance.
    let good = make(SampleSpace::RealLine, KernelFamily::PowerDistance { q: 2.0 });
    let points = Distribution::gaussian_r(0.0, 1.0).unwrap().sample(24, 3);
    let scale = max_abs_loss(&good, &points).unwrap();
    let tol = default_negdef_tolerance(points.len(), scale);
    assert!(rayleigh_probe(&good, &points, 10_000, 1) <= tol);

    // Violating case: the probe independently finds a positive form.
    let bad = make(SampleSpace::RealLine, KernelFamily::PowerDistance { q: 3.0 });
    let pts: Vec<Point> = [0.0, 1.0, 2.0, 3.0, 4.0]
        .iter()
        .map(|x| Point::Real(*x))
        .collect();
    let cert = check_negdef(&bad, &pts, 1e-6).unwrap();
    assert_eq!(cert.verdict, Verdict::Fail);
    assert!(rayleigh_probe(&bad, &pts, 10_000, 2) > 0.0);
}

#[test]
fn power_losses_split_by_exponent_regime() {
    let pts = Distribution::gaussian_r(0.0, 1.0).unwrap().sample(48, 77);
    // q <= 1: metric and negative definite.
    for q in [0.5, 1.0] {
        let k = make(SampleSpace::RealLine, KernelFamily::PowerDistance { q });
        let scale = max_abs_loss(&k, &pts).unwrap();
        let m = check_metric(&k, &pts, default_metric_tolerance(scale)).unwrap();
        assert_eq!(m.verdict, Verdict::Pass, "q={q} metric");
        let nd = check_negdef(&k, &pts, default_negdef_tolerance(pts.len(), scale)).unwrap();
        assert_eq!(nd.verdict, Verdict::Pass, "q={q} negdef");
    }
    // 1 < q <= 2: negative definite but not a metric; collinear triples
    // break the triangle inequality.
    for q in [1.5, 2.0] {
        let k = make(SampleSpace::RealLine, KernelFamily::PowerDistance { q });
        let collinear: Vec<Point> = [0.0, 1.0, 2.0].iter().map(|x| Point::Real(*x)).collect();
        let m = check_metric(&k, &collinear, 1e-9).unwrap();
        assert_eq!(m.verdict, Verdict::Fail, "q={q} should break the triangle");
        assert!(m.witness.is_some());
        let scale = max_abs_loss(&k, &pts).unwrap();
        let nd = check_negdef(&k, &pts, default_negdef_tolerance(pts.len(), scale)).unwrap();
        assert_eq!(nd.verdict, Verdict::Pass, "q={q} negdef");
    }
}

#[test]
fn geodesic_metric_on_sixty_four_points() {
    let k = make(SampleSpace::Sphere { dim: 3 }, KernelFamily::Geodesic);
    let pts = Distribution::sphere_uniform(3).unwrap().sample(64, 12);
    let cert = check_metric(&k, &pts, default_metric_tolerance(std::f64::consts::PI)).unwrap();
    assert_eq!(cert.verdict, Verdict::Pass);
}

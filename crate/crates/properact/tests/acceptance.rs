//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use properact::cartan::{
    self, cartan_projection, kak_decompose, AmbientGroup, GroupKind, SubgroupSpec,
};
use properact::catzero::{
    asymptotic_ray, comparison_check, property_s_witness, Cat0Model, CPoint, GeodesicRay,
    HypBoundary, RayDirection,
};
use properact::flats::{
    hbi_check_sampled, hbi_decide, separating_witness, StructuredSet,
};
use properact::numerics::{DenseMatrix, TolerancePolicy, Vector};
use properact::properness::{
    self, calabi_markus, cross_validate, decide, theorem_suite, Budgets, Mode, PropernessProblem,
    SuiteConfig, Verdict,
};
use properact::quotient::{
    orbit_section_scan, verify_lemma_neighborhoods, verify_nonexpanding_conditions,
    MetricGSpaceModel,
};
use properact::sample::Sampler;
use nalgebra::Complex;

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

struct Criterion {
    name: &'static str,
    failed: bool,
    detail: String,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Criterion {
            name,
            failed: false,
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: &str) {
        if !ok {
            self.failed = true;
            if !self.detail.is_empty() {
                self.detail.push_str("; ");
            }
            self.detail.push_str(what);
        }
    }

    fn finish(self) {
        if self.failed {
            println!("acceptance {}: FAIL ({})", self.name, self.detail);
            panic!("acceptance {}: {}", self.name, self.detail);
        }
        println!("acceptance {}: pass", self.name);
    }
}

#[test]
fn kak_reconstruction() {
    let t = tol();
    let mut c = Criterion::new("kak-reconstruction");
    let started = Instant::now();
    for n in 2..=6 {
        let mut rng = Sampler::new(n as u64);
        for _ in 0..1000 {
            let g = rng.random_sl(n);
            let (k1, x, k2) = kak_decompose(&g, &t).unwrap();
            let recon = &k1 * DMatrix::from_diagonal(&x.diagonal().map(f64::exp)) * &k2;
            c.check(
                (&recon - &g).norm() <= 1e-9 * (1.0 + g.norm()),
                "reconstruction residual",
            );
            let id = DMatrix::identity(n, n);
            c.check(
                (k1.transpose() * &k1 - &id).norm() <= 1e-10
                    && (k2.transpose() * &k2 - &id).norm() <= 1e-10,
                "factor orthogonality",
            );
        }
    }
    c.check(started.elapsed().as_secs_f64() < 10.0, "runtime >= 10 s");
    c.finish();
}

#[test]
fn cartan_projection_laws() {
    let t = tol();
    let mut c = Criterion::new("cartan-projection-laws");
    let mut rng = Sampler::new(11);
    for _ in 0..1000 {
        let n = 2 + rng.index(3);
        let g = rng.random_sl(n);
        let h = rng.random_sl(n);
        let mu_g = cartan_projection(&g, &t).unwrap();
        // Inverse law: mu(g^-1) = reverse(-mu(g)).
        let mu_inv = cartan_projection(&g.clone().try_inverse().unwrap(), &t).unwrap();
        let expected: Vector = DVector::from_iterator(n, mu_g.iter().rev().map(|v| -v));
        c.check((mu_inv - expected).amax() <= 1e-8, "inverse law");
        // Bi-K-invariance.
        let k1 = rng.random_orthogonal(n);
        let k2 = rng.random_orthogonal(n);
        let mu_k = cartan_projection(&(&k1 * &g * &k2), &t).unwrap();
        c.check((&mu_k - &mu_g).amax() <= 1e-9, "bi-K-invariance");
        // Lipschitz law.
        let mu_gh = cartan_projection(&(&g * &h), &t).unwrap();
        let mu_h = cartan_projection(&h, &t).unwrap();
        c.check(
            (&mu_gh - &mu_g).norm() <= mu_h.norm() + 1e-9,
            "Lipschitz law",
        );
    }
    c.finish();
}

/// A random union-of-subspaces instance with aligned clouds: the clouds
/// contain explicit rays of every component, and any shared direction (the
/// exact witness) is planted into both clouds so the sampled layer sees it.
fn hbi_instance(
    rng: &mut Sampler,
    d: usize,
    t: &TolerancePolicy,
) -> (StructuredSet, StructuredSet, Vec<Vector>, Vec<Vector>, properact::flats::HbiCertificate) {
    let radii: Vec<f64> = (1..=25).map(|k| 1000.0_f64.powf(k as f64 / 25.0)).collect();
    loop {
        let shared = rng.uniform() < 0.4;
        let v_shared = rng.unit_vector(d);
        let mut make_side = |rng: &mut Sampler| -> Vec<DenseMatrix> {
            let n_comp = 1 + rng.index(2);
            (0..n_comp)
                .map(|i| {
                    let k = 1 + rng.index(2);
                    if shared && i == 0 {
                        // Orthonormal basis containing the shared direction.
                        let mut b = DMatrix::zeros(d, k);
                        b.set_column(0, &v_shared);
                        for j in 1..k {
                            let mut w = rng.gaussian_vector(d);
                            for l in 0..j {
                                let col = b.column(l).into_owned();
                                w -= &col * col.dot(&w);
                            }
                            b.set_column(j, &(&w / w.norm()));
                        }
                        b
                    } else {
                        rng.random_subspace_basis(d, k)
                    }
                })
                .collect()
        };
        let bases1 = make_side(rng);
        let bases2 = make_side(rng);
        let c1 = StructuredSet::subspaces(bases1.clone());
        let c2 = StructuredSet::subspaces(bases2.clone());
        let cert = hbi_decide(&c1, &c2, t).unwrap();
        if cert.verdict && cert.gap.unwrap() < 0.25 {
            // Nearly-degenerate instance: the sampled layer cannot be
            // expected to resolve it at finite resolution.
            continue;
        }
        let cloud_of = |bases: &[DenseMatrix], rng: &mut Sampler| -> Vec<Vector> {
            let mut pts = vec![DVector::zeros(d)];
            for b in bases {
                for _ in 0..5 {
                    let u = rng.unit_vector(b.ncols());
                    let dir = b * u;
                    for &r in &radii {
                        pts.push(&dir * r);
                        pts.push(&dir * -r);
                    }
                }
            }
            pts
        };
        let mut p1 = cloud_of(&bases1, rng);
        let mut p2 = cloud_of(&bases2, rng);
        if let Some(w) = &cert.witness {
            let dir = &w.vector / w.vector.norm();
            for &r in &radii {
                p1.push(&dir * r);
                p2.push(&dir * r);
            }
        }
        return (c1, c2, p1, p2, cert);
    }
}

#[test]
fn exact_vs_sampled_hbi() {
    let t = tol();
    let mut c = Criterion::new("exact-vs-sampled-hbi");
    let mut rng = Sampler::new(23);
    for i in 0..200 {
        let d = if i % 2 == 0 { 3 } else { 4 };
        let (_c1, _c2, p1, p2, cert) = hbi_instance(&mut rng, d, &t);
        for &r in &[1.0, 10.0, 100.0] {
            let sampled = hbi_check_sampled(&p1, &p2, r, 1000.0, 0.5).unwrap();
            c.check(
                sampled.is_hbi == cert.verdict,
                "exact and sampled verdicts disagree",
            );
            if let Some(gap) = cert.gap {
                c.check(
                    sampled.max_capture_norm <= r / gap.sin() + 1e-6,
                    "quantitative capture bound violated",
                );
            }
        }
    }
    c.finish();
}

#[test]
fn separating_witness_classes() {
    let t = tol();
    let mut c = Criterion::new("separating-witness");
    let mut rng = Sampler::new(31);
    let radii = [1.0, 10.0, 100.0, 1000.0];
    let mut done = 0;
    while done < 50 {
        let d = 3 + rng.index(2);
        let u = rng.unit_vector(d);
        let v = rng.unit_vector(d);
        let c1 = StructuredSet::subspaces(vec![DMatrix::from_column_slice(d, 1, u.as_slice())]);
        let c2 = StructuredSet::subspaces(vec![DMatrix::from_column_slice(d, 1, v.as_slice())]);
        let cert = hbi_decide(&c1, &c2, &t).unwrap();
        if !cert.verdict || cert.gap.unwrap() < 0.1 {
            continue; // not a (robustly) non-equivalent pair
        }
        done += 1;
        // Points p_0 .. p_n of C1 with dist(p_k, C2) > k: at radius r the
        // capture against C2 is a strict prefix of the cloud, while against
        // C1 the whole unbounded cloud is captured at radius 0.
        let n_points = 2500usize;
        let witness = separating_witness(&c1, &c2, n_points, &t).unwrap();
        let max_norm = witness.iter().map(|p| p.norm()).fold(0.0, f64::max);
        for &r in &radii {
            let captured_c1: f64 = witness
                .iter()
                .filter(|p| properact::flats::dist_to_set(p, &c1, &t).unwrap() <= r)
                .map(|p| p.norm())
                .fold(0.0, f64::max);
            c.check(
                captured_c1 >= max_norm * (1.0 - 1e-9),
                "witness cloud should escape with C1",
            );
            let captured_c2: f64 = witness
                .iter()
                .filter(|p| properact::flats::dist_to_set(p, &c2, &t).unwrap() <= r)
                .map(|p| p.norm())
                .fold(0.0, f64::max);
            c.check(
                captured_c2 <= 0.5 * max_norm,
                "witness cloud should be bounded against C2",
            );
        }
    }
    c.finish();
}

#[test]
fn nonexpanding_suite() {
    let t = tol();
    let mut c = Criterion::new("orbit-map-suite");
    let models = [
        MetricGSpaceModel::EuclideanOrth { n: 3 },
        MetricGSpaceModel::PosDefConj { n: 2 },
        MetricGSpaceModel::PosDefConj { n: 3 },
    ];
    for model in &models {
        let mut rng = Sampler::new(41);
        let rep = verify_nonexpanding_conditions(model, 1000, &mut rng, &t).unwrap();
        c.check(
            rep.max_condition1_violation <= 1e-8,
            "condition (1) violation",
        );
        c.check(
            rep.max_condition2_residual <= 1e-8,
            "condition (2) residual",
        );
        let points: Vec<_> = (0..4).map(|_| model.sample_point(&mut rng, 1.0)).collect();
        let rep = verify_lemma_neighborhoods(model, &points, 0.5, 500, &mut rng, &t).unwrap();
        c.check(
            rep.counterexample.is_none(),
            "neighborhood equation counterexample",
        );
    }
    // The four saturated HBI conditions agree on random configurations.
    let rep = theorem_suite(
        &SuiteConfig {
            n: 2,
            samples: 50,
            configs: 100,
            r: 0.5,
            seed: 43,
        },
        &t,
    )
    .unwrap();
    c.check(rep.condition_disagreements == 0, "HBI condition disagreement");
    c.finish();
}

#[test]
fn saturation_suite() {
    let t = tol();
    let mut c = Criterion::new("saturation-suite");
    let rep = theorem_suite(
        &SuiteConfig {
            n: 2,
            samples: 1000,
            configs: 10,
            r: 0.5,
            seed: 47,
        },
        &t,
    )
    .unwrap();
    c.check(
        rep.saturation_forward_defect <= 1e-6,
        "forward inclusion defect",
    );
    c.check(
        rep.saturation_converse_defect <= 1e-6,
        "converse factorization excess",
    );
    c.check(
        rep.tau_observed <= rep.tau_predicted + 1e-6,
        "neighborhood constant exceeds prediction",
    );
    c.finish();
}

fn cat0_models() -> Vec<Cat0Model> {
    vec![
        Cat0Model::Euclidean { n: 3 },
        Cat0Model::HyperbolicPlane,
        Cat0Model::PosDef { n: 2 },
        Cat0Model::Product(vec![Cat0Model::Euclidean { n: 2 }, Cat0Model::HyperbolicPlane]),
    ]
}

fn random_cpoint(model: &Cat0Model, rng: &mut Sampler, scale: f64) -> CPoint {
    match model {
        Cat0Model::Euclidean { n } => CPoint::Euclidean(rng.gaussian_vector(*n) * scale),
        Cat0Model::HyperbolicPlane => CPoint::Hyp(Complex::new(
            rng.uniform_in(-scale, scale),
            rng.uniform_in(-1.5, 1.5).exp(),
        )),
        Cat0Model::PosDef { n } => {
            let t = tol();
            let x = rng.random_symmetric(*n, scale.min(1.5));
            CPoint::Spd(properact::numerics::sym_exp(&x, &t).unwrap())
        }
        Cat0Model::Product(models) => {
            CPoint::Product(models.iter().map(|m| random_cpoint(m, rng, scale)).collect())
        }
    }
}

fn random_direction(model: &Cat0Model, rng: &mut Sampler) -> RayDirection {
    match model {
        Cat0Model::Euclidean { n } => RayDirection::Euclidean(rng.unit_vector(*n)),
        Cat0Model::HyperbolicPlane => {
            if rng.uniform() < 0.25 {
                RayDirection::Hyp(HypBoundary::Infinity)
            } else {
                RayDirection::Hyp(HypBoundary::Real(rng.uniform_in(-3.0, 3.0)))
            }
        }
        Cat0Model::PosDef { n } => {
            let x = rng.random_symmetric(*n, 1.0);
            RayDirection::Spd(&x / x.norm())
        }
        Cat0Model::Product(models) => {
            let mut ws: Vec<f64> = models.iter().map(|_| rng.uniform_in(0.2, 1.0)).collect();
            let rss: f64 = ws.iter().map(|w| w * w).sum::<f64>().sqrt();
            ws.iter_mut().for_each(|w| *w /= rss);
            RayDirection::Product(
                models
                    .iter()
                    .zip(ws)
                    .map(|(m, w)| (random_direction(m, rng), w))
                    .collect(),
            )
        }
    }
}

#[test]
fn cat0_comparison_and_rays() {
    let t = tol();
    let mut c = Criterion::new("cat0-comparison");
    for model in cat0_models() {
        let mut rng = Sampler::new(53);
        for _ in 0..10_000 {
            let x1 = random_cpoint(&model, &mut rng, 2.0);
            let x2 = random_cpoint(&model, &mut rng, 2.0);
            let x3 = random_cpoint(&model, &mut rng, 2.0);
            let s = rng.uniform();
            let margin = comparison_check(&model, &x1, &x2, &x3, s, &t).unwrap();
            c.check(margin >= -1e-9, "comparison margin negative");
            if matches!(model, Cat0Model::Euclidean { .. }) {
                c.check(margin <= 1e-9, "flat model not flat");
            }
        }
    }
    // Asymptotic rays diverge no faster than their basepoints, out to t = 100.
    for model in cat0_models() {
        if matches!(model, Cat0Model::PosDef { .. }) {
            continue; // direction transport not defined on this model
        }
        let mut rng = Sampler::new(59);
        for _ in 0..500 {
            let p = random_cpoint(&model, &mut rng, 2.0);
            let p2 = random_cpoint(&model, &mut rng, 2.0);
            let ray = GeodesicRay {
                base: p.clone(),
                direction: random_direction(&model, &mut rng),
            };
            let moved = asymptotic_ray(&model, &ray, &p2).unwrap();
            let bound = model.dist(&p, &p2, &t).unwrap();
            for &s in &[0.5, 5.0, 50.0, 100.0] {
                let a = ray.at(&model, s, &t).unwrap();
                let b = moved.at(&model, s, &t).unwrap();
                c.check(
                    model.dist(&a, &b, &t).unwrap() <= bound + 1e-6,
                    "asymptotic ray bound violated",
                );
            }
        }
    }
    c.finish();
}

#[test]
fn property_s() {
    let t = tol();
    let mut c = Criterion::new("property-s");
    let models = [
        Cat0Model::Euclidean { n: 3 },
        Cat0Model::HyperbolicPlane,
        Cat0Model::Product(vec![Cat0Model::Euclidean { n: 2 }, Cat0Model::HyperbolicPlane]),
    ];
    for model in &models {
        let mut rng = Sampler::new(61);
        for _ in 0..500 {
            let p = random_cpoint(model, &mut rng, 2.0);
            let p0 = random_cpoint(model, &mut rng, 2.0);
            let q = random_cpoint(model, &mut rng, 2.0);
            let w = property_s_witness(model, &p0, &p, &q, &t).unwrap();
            let gp = w.g.apply(&p).unwrap();
            c.check(
                model.dist(&gp, &p0, &t).unwrap() <= 1e-9,
                "witness does not move the basepoint correctly",
            );
            let gq = w.g.apply(&q).unwrap();
            let moved = model.dist(&q, &gq, &t).unwrap();
            c.check(moved <= w.r + 2.0 * w.b + 1e-6, "displacement bound violated");
            if matches!(model, Cat0Model::Euclidean { .. }) {
                c.check(
                    (moved - w.r).abs() <= 1e-10,
                    "flat displacement not exactly r",
                );
            }
        }
    }
    c.finish();
}

#[test]
fn section_invariant() {
    let t = tol();
    let mut c = Criterion::new("section-invariant");
    for n in 2..=4 {
        let model = MetricGSpaceModel::PosDefConj { n };
        let section = model.section().unwrap();
        let mut rng = Sampler::new(67);
        for _ in 0..100 {
            let mut p = rng.gaussian_vector(n);
            let mean = p.sum() / n as f64;
            for i in 0..n {
                p[i] -= mean;
            }
            let scan = orbit_section_scan(&section, &p, 1e-2, 50, &mut rng, &t).unwrap();
            c.check(
                scan.max_deviation_from_w_orbit <= 1e-2,
                "stray orbit-section intersection",
            );
        }
    }
    c.finish();
}

#[test]
fn end_to_end_goldens() {
    let t = tol();
    let mut c = Criterion::new("end-to-end-goldens");
    let started = Instant::now();

    let one_param = |diag: &[f64]| SubgroupSpec::OneParameter {
        x: DMatrix::from_diagonal(&DVector::from_vec(diag.to_vec())),
    };
    let sl3 = AmbientGroup::new(GroupKind::Sl, 3).unwrap();
    let sl2 = AmbientGroup::new(GroupKind::Sl, 2).unwrap();

    // Transverse lines in SL(3): proper.
    let p = PropernessProblem {
        ambient: sl3.clone(),
        h1: one_param(&[1.0, 1.0, -2.0]),
        h2: one_param(&[1.0, -1.0, 0.0]),
        mode: Mode::Auto,
        budgets: Budgets::default(),
    };
    c.check(
        matches!(decide(&p, &t).unwrap(), Verdict::Proper { .. }),
        "SL(3) transverse pair should be Proper",
    );

    // The same one-parameter subgroup twice: not proper, with a witness.
    let p2 = PropernessProblem {
        h2: one_param(&[1.0, 1.0, -2.0]),
        ..p.clone()
    };
    match decide(&p2, &t).unwrap() {
        Verdict::NotProper { witness, .. } => {
            c.check(witness.norm() > 0.0, "empty non-properness witness")
        }
        _ => c.check(false, "identical pair should be NotProper"),
    }

    // Equal ranks: only finite groups act properly discontinuously.
    let rank = calabi_markus(&sl2, &one_param(&[1.0, -1.0]), &t).unwrap();
    c.check(
        rank.ambient_rank == rank.subgroup_rank && !rank.admits_infinite_discontinuous_group,
        "rank-equal report mismatch",
    );
    let rank = calabi_markus(&sl3, &one_param(&[1.0, -1.0, 0.0]), &t).unwrap();
    c.check(
        rank.admits_infinite_discontinuous_group,
        "rank-deficient report mismatch",
    );

    // Cross-validation agreement on the SL(2) goldens with bounded budgets.
    let budgets = Budgets {
        word_length: 4,
        radius: 50.0,
        rho: 0.2,
        mesh: 0.2,
    };
    let net = cartan::group_ball_net(&sl2, budgets.rho, budgets.mesh, &t).unwrap();
    c.check(net.elements.len() <= 10_000, "net budget exceeded");
    let goldens = [
        (
            one_param(&[1.0, -1.0]),
            one_param(&[1.0, -1.0]),
            "NotProper",
        ),
        (
            one_param(&[1.0, -1.0]),
            SubgroupSpec::ElementList {
                elements: vec![DMatrix::identity(2, 2)],
            },
            "Proper",
        ),
    ];
    for (h1, h2, expect) in goldens {
        let p = PropernessProblem {
            ambient: sl2.clone(),
            h1,
            h2,
            mode: Mode::Auto,
            budgets,
        };
        let rep = cross_validate(&p, &t).unwrap();
        c.check(rep.consistent, "cross-validation layers disagree");
        c.check(
            rep.exact_kind.as_deref() == Some(expect),
            "golden verdict mismatch",
        );
        if let Some(b) = &rep.brute_force {
            c.check(b.net_size <= 10_000, "net budget exceeded");
        }
    }
    // Discrete (word-ball) layer on a sampled golden.
    let lam = 2.0f64;
    let p = PropernessProblem {
        ambient: sl2.clone(),
        h1: SubgroupSpec::Discrete {
            generators: vec![DMatrix::from_diagonal(&DVector::from_vec(vec![
                lam,
                1.0 / lam,
            ]))],
        },
        h2: one_param(&[1.0, -1.0]),
        mode: Mode::Sampled,
        budgets,
    };
    match decide(&p, &t).unwrap() {
        Verdict::EmpiricalNotProper { word_length, .. } => {
            c.check(word_length == 4, "budget not echoed")
        }
        v => c.check(false, &format!("expected EmpiricalNotProper, got {}", v.kind())),
    }

    c.check(
        started.elapsed().as_secs_f64() < 300.0,
        "golden suite exceeded five minutes",
    );
    // Keep the quotient description used by the empirical layer honest.
    let _ = properness::Mode::Sampled;
    c.finish();
}

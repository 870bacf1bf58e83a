//! Orbit quotients `K \ M` with the quotient metric, sections, the
//! saturation operator, and the non-expanding-map calculus, instantiated on
//! two concrete models:
//!
//! * `EuclideanOrth`: `O(n)` acting linearly on `R^n`; orbits are spheres,
//!   the section is the ray `R . e_1`, and the generalized Weyl group is
//!   `{+-1}` acting on the line coordinate.
//! * `PosDefConj`: `SO(n)` acting by congruence on determinant-one SPD
//!   matrices; orbits are spectra, the section is the diagonal flat, and the
//!   generalized Weyl group is the coordinate permutation group.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};

use crate::cartan::{self, AmbientGroup, GroupKind, SubgroupSpec};
use crate::flats::{FlatSpace, SetVariant, StructuredSet};
use crate::numerics::{
    spd_log, sym_eig, sym_exp, DenseMatrix, TolerancePolicy, Vector,
};
use crate::sample::Sampler;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricGSpaceModel {
    EuclideanOrth { n: usize },
    PosDefConj { n: usize },
}

/// A point of the model space.
#[derive(Debug, Clone)]
pub enum Point {
    Vector(Vector),
    Spd(DenseMatrix),
}

impl Point {
    fn as_vector(&self) -> Result<&Vector> {
        match self {
            Point::Vector(v) => Ok(v),
            Point::Spd(_) => Err(Error::Contract("expected a vector point".into())),
        }
    }

    fn as_spd(&self) -> Result<&DenseMatrix> {
        match self {
            Point::Spd(m) => Ok(m),
            Point::Vector(_) => Err(Error::Contract("expected an SPD point".into())),
        }
    }
}

/// A `K`-orbit with its canonical invariant.
#[derive(Debug, Clone)]
pub struct OrbitPoint {
    pub representative: Point,
    /// EuclideanOrth: the single coordinate `|x|`.  PosDefConj: descending
    /// log-eigenvalues.
    pub canonical: Vector,
}

impl MetricGSpaceModel {
    pub fn n(&self) -> usize {
        match self {
            MetricGSpaceModel::EuclideanOrth { n } | MetricGSpaceModel::PosDefConj { n } => *n,
        }
    }

    pub fn base_point(&self) -> Point {
        match self {
            MetricGSpaceModel::EuclideanOrth { n } => Point::Vector(DVector::zeros(*n)),
            MetricGSpaceModel::PosDefConj { n } => Point::Spd(DMatrix::identity(*n, *n)),
        }
    }

    /// The model metric.
    pub fn dist(&self, p: &Point, q: &Point, tol: &TolerancePolicy) -> Result<f64> {
        match self {
            MetricGSpaceModel::EuclideanOrth { .. } => {
                Ok((p.as_vector()? - q.as_vector()?).norm())
            }
            MetricGSpaceModel::PosDefConj { .. } => pdist(p.as_spd()?, q.as_spd()?, tol),
        }
    }

    /// The orbit map.
    pub fn orbit_of(&self, p: &Point, tol: &TolerancePolicy) -> Result<OrbitPoint> {
        let canonical = match self {
            MetricGSpaceModel::EuclideanOrth { .. } => {
                DVector::from_vec(vec![p.as_vector()?.norm()])
            }
            MetricGSpaceModel::PosDefConj { .. } => {
                let (_, lam) = sym_eig(p.as_spd()?, tol)?;
                if lam.iter().any(|&l| l <= tol.eps_rank) {
                    return Err(Error::Domain("orbit_of: point is not positive definite".into()));
                }
                lam.map(f64::ln)
            }
        };
        Ok(OrbitPoint {
            representative: p.clone(),
            canonical,
        })
    }

    /// Random point of the model.
    pub fn sample_point(&self, rng: &mut Sampler, scale: f64) -> Point {
        match self {
            MetricGSpaceModel::EuclideanOrth { n } => {
                Point::Vector(rng.gaussian_vector(*n) * scale)
            }
            MetricGSpaceModel::PosDefConj { n } => Point::Spd(rng.random_spd_det1(*n, scale)),
        }
    }

    /// The section with its generalized Weyl group, as a flat space in
    /// section coordinates (EuclideanOrth: the line coordinate; PosDefConj:
    /// the sum-zero diagonal-log coordinates).
    pub fn section(&self) -> Result<SectionModel> {
        let space = match self {
            MetricGSpaceModel::EuclideanOrth { .. } => FlatSpace {
                ambient_dim: 1,
                constraint: None,
                group: vec![DMatrix::identity(1, 1), -DMatrix::identity(1, 1)],
            },
            MetricGSpaceModel::PosDefConj { n } => cartan::permutation_flat_space(*n, true)?,
        };
        Ok(SectionModel {
            model: *self,
            space,
        })
    }
}

/// The affine-invariant distance on SPD matrices:
/// `d(p, q) = |log(p^{-1/2} q p^{-1/2})|_F`.
pub fn pdist(p: &DenseMatrix, q: &DenseMatrix, tol: &TolerancePolicy) -> Result<f64> {
    let (qp, lam) = sym_eig(p, tol)?;
    if lam.iter().any(|&l| l <= tol.eps_rank) {
        return Err(Error::Domain("pdist: first argument is not positive definite".into()));
    }
    let inv_sqrt = &qp * DMatrix::from_diagonal(&lam.map(|l| 1.0 / l.sqrt())) * qp.transpose();
    let conj = &inv_sqrt * q * &inv_sqrt;
    let lg = spd_log(&((&conj + conj.transpose()) * 0.5), tol)
        .map_err(|_| Error::Domain("pdist: second argument is not positive definite".into()))?;
    Ok(lg.norm())
}

/// The quotient metric `d^K(O1, O2) = min over the orbits`.
pub fn quotient_distance(
    model: &MetricGSpaceModel,
    o1: &OrbitPoint,
    o2: &OrbitPoint,
) -> Result<f64> {
    if o1.canonical.len() != o2.canonical.len() {
        return Err(Error::Contract("quotient_distance: model mismatch".into()));
    }
    match model {
        MetricGSpaceModel::EuclideanOrth { .. } => Ok((o1.canonical[0] - o2.canonical[0]).abs()),
        MetricGSpaceModel::PosDefConj { n } => {
            // Minimum over permutations; equals the sorted-against-sorted
            // distance, but the enumeration keeps the defining formula honest.
            let lam = &o1.canonical;
            let mu = &o2.canonical;
            let mut best = f64::INFINITY;
            for perm in (0..*n).permutations(*n) {
                let d2: f64 = (0..*n).map(|i| (lam[i] - mu[perm[i]]).powi(2)).sum();
                best = best.min(d2.sqrt());
            }
            Ok(best)
        }
    }
}

/// The section of the orbit space: an embedded flat with its generalized
/// Weyl group.
#[derive(Debug, Clone)]
pub struct SectionModel {
    pub model: MetricGSpaceModel,
    /// Section coordinates with the W-action (line with {+-1}, or the
    /// sum-zero slice with the permutation group).
    pub space: FlatSpace,
}

impl SectionModel {
    /// The isometric embedding of section coordinates into the model.
    pub fn embed(&self, x: &Vector, tol: &TolerancePolicy) -> Result<Point> {
        match self.model {
            MetricGSpaceModel::EuclideanOrth { n } => {
                if x.len() != 1 {
                    return Err(Error::Contract("section coordinate must be scalar".into()));
                }
                let mut v = DVector::zeros(n);
                v[0] = x[0];
                Ok(Point::Vector(v))
            }
            MetricGSpaceModel::PosDefConj { n } => {
                if x.len() != n {
                    return Err(Error::Contract("section coordinate has wrong length".into()));
                }
                if x.sum().abs() > tol.eps_geom * (1.0 + x.norm()) {
                    return Err(Error::Contract(
                        "section coordinate must sum to zero (det-1 slice)".into(),
                    ));
                }
                Ok(Point::Spd(DMatrix::from_diagonal(&x.map(f64::exp))))
            }
        }
    }

    /// Nearest section coordinate of a model point (the canonical form read
    /// back into coordinates).
    pub fn coordinates_of(&self, p: &Point, tol: &TolerancePolicy) -> Result<Vector> {
        let orbit = self.model.orbit_of(p, tol)?;
        Ok(orbit.canonical.clone())
    }
}

/// The saturation operator on subsets of the section:
/// `Theta(C) = eta^{-1}(eta(C)) = W . C`.
pub fn theta(
    c: &StructuredSet,
    section: &SectionModel,
    tol: &TolerancePolicy,
) -> Result<StructuredSet> {
    crate::flats::symmetrize(c, &section.space, tol)
}

/// `(K . p) ∩ Sigma = W . p` for a section point given in coordinates.
pub fn orbit_section_intersection(section: &SectionModel, p: &Vector) -> Vec<Vector> {
    match section.model {
        MetricGSpaceModel::EuclideanOrth { .. } => {
            if p.norm() < 1e-14 {
                vec![p.clone()]
            } else {
                vec![p.clone(), -p]
            }
        }
        MetricGSpaceModel::PosDefConj { .. } => cartan::weyl_orbit(p),
    }
}

/// Report of a scan of the orbit `K . p` for section points: every sample of
/// the orbit lying near the section must lie near `W . p`.
#[derive(Debug, Clone)]
pub struct SectionScanReport {
    pub samples_near_section: usize,
    pub max_deviation_from_w_orbit: f64,
}

/// Scan `K . p` with nets/samples of K at resolution `mesh`: hits near the
/// section are compared against the finite set `W . p`.
///
/// Rotations are drawn both uniformly and as perturbations of the
/// W-aligners (signed permutation matrices), since the latter are exactly
/// the rotations sending the diagonal flat to itself.
pub fn orbit_section_scan(
    section: &SectionModel,
    p: &Vector,
    mesh: f64,
    samples: usize,
    rng: &mut Sampler,
    tol: &TolerancePolicy,
) -> Result<SectionScanReport> {
    let w_orbit = orbit_section_intersection(section, p);
    let mut near = 0usize;
    let mut worst = 0.0f64;
    match section.model {
        MetricGSpaceModel::EuclideanOrth { n } => {
            let embedded = section.embed(p, tol)?;
            let x = embedded.as_vector()?.clone();
            for _ in 0..samples {
                let k = rng.random_orthogonal(n);
                let y = &k * &x;
                // Near the section means nearly a multiple of e1.
                let off: f64 = (1..n).map(|i| y[i] * y[i]).sum::<f64>().sqrt();
                if off <= mesh {
                    near += 1;
                    let coord = DVector::from_vec(vec![y[0]]);
                    let d = w_orbit
                        .iter()
                        .map(|w| (w - &coord).norm())
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(d);
                }
            }
        }
        MetricGSpaceModel::PosDefConj { n } => {
            let embedded = section.embed(p, tol)?;
            let spd = embedded.as_spd()?.clone();
            let aligners = rotation_aligners(n);
            for i in 0..samples {
                let k = if i % 2 == 0 {
                    rng.random_rotation(n)
                } else {
                    // Small perturbation of a W-aligner: the regime where
                    // stray near-section hits would appear if the invariant
                    // failed.
                    let base = &aligners[rng.index(aligners.len())];
                    let delta = rng.random_skew(n) * rng.uniform_in(0.0, mesh);
                    base * rotation_exp(&delta)
                };
                let q = &k * &spd * k.transpose();
                let lg = spd_log(&((&q + q.transpose()) * 0.5), tol)?;
                let mut off = 0.0f64;
                for r in 0..n {
                    for c in 0..n {
                        if r != c {
                            off += lg[(r, c)] * lg[(r, c)];
                        }
                    }
                }
                let off = off.sqrt();
                if off <= mesh {
                    near += 1;
                    let diag = DVector::from_iterator(n, (0..n).map(|r| lg[(r, r)]));
                    let d = w_orbit
                        .iter()
                        .map(|w| (w - &diag).norm())
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(d);
                }
            }
        }
    }
    Ok(SectionScanReport {
        samples_near_section: near,
        max_deviation_from_w_orbit: worst,
    })
}

/// The rotation (det +1) representatives of the generalized Weyl group:
/// permutation matrices with a sign fix on the first row when needed.
fn rotation_aligners(n: usize) -> Vec<DenseMatrix> {
    let mut out = Vec::new();
    for perm in (0..n).permutations(n) {
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        if m.determinant() < 0.0 {
            for j in 0..n {
                m[(0, j)] = -m[(0, j)];
            }
        }
        out.push(m);
    }
    out
}

fn rotation_exp(skew: &DenseMatrix) -> DenseMatrix {
    // Rodrigues-free exponential by scaling and squaring; the inputs are
    // small so a short Taylor series suffices.
    let n = skew.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=12 {
        term = &term * skew / k as f64;
        sum += &term;
    }
    sum
}

/// Report of the Condition (1)/(2) sweep.
#[derive(Debug, Clone)]
pub struct NonExpandingReport {
    pub samples: usize,
    pub max_condition1_violation: f64,
    pub max_condition2_residual: f64,
}

/// Verify that the orbit map is non-expanding (Condition (1)) and admits
/// exact realizers (Condition (2)) on random pairs, by constructing for each
/// `(x, y')` a point `y` in the orbit `y'` with `d(x, y) = d^K`.
pub fn verify_nonexpanding_conditions(
    model: &MetricGSpaceModel,
    samples: usize,
    rng: &mut Sampler,
    tol: &TolerancePolicy,
) -> Result<NonExpandingReport> {
    if samples == 0 {
        return Err(Error::Contract("verify_nonexpanding_conditions: samples >= 1".into()));
    }
    let mut max1 = 0.0f64;
    let mut max2 = 0.0f64;
    for _ in 0..samples {
        let x = model.sample_point(rng, 1.0);
        let y = model.sample_point(rng, 1.0);
        let d = model.dist(&x, &y, tol)?;
        let ox = model.orbit_of(&x, tol)?;
        let oy = model.orbit_of(&y, tol)?;
        let dq = quotient_distance(model, &ox, &oy)?;
        max1 = max1.max(dq - d);

        let realizer = realize(model, &x, &oy, tol)?;
        let dr = model.dist(&x, &realizer, tol)?;
        max2 = max2.max((dr - dq).abs());
    }
    Ok(NonExpandingReport {
        samples,
        max_condition1_violation: max1,
        max_condition2_residual: max2,
    })
}

/// A point of the orbit `o` at distance exactly `d^K` from `x`
/// (Condition (2) realizer).
pub fn realize(
    model: &MetricGSpaceModel,
    x: &Point,
    o: &OrbitPoint,
    tol: &TolerancePolicy,
) -> Result<Point> {
    match model {
        MetricGSpaceModel::EuclideanOrth { n } => {
            let xv = x.as_vector()?;
            let r = o.canonical[0];
            if xv.norm() < 1e-14 {
                let mut v = DVector::zeros(*n);
                v[0] = r;
                Ok(Point::Vector(v))
            } else {
                Ok(Point::Vector(xv * (r / xv.norm())))
            }
        }
        MetricGSpaceModel::PosDefConj { .. } => {
            // Rotate the target spectrum into the eigenbasis of x, matching
            // sorted orders; commuting matrices realize the quotient
            // distance.
            let (q, _) = sym_eig(x.as_spd()?, tol)?;
            let mu = cartan::chamber_representative(&o.canonical);
            let y = &q * DMatrix::from_diagonal(&mu.map(f64::exp)) * q.transpose();
            Ok(Point::Spd(y))
        }
    }
}

/// Report of the neighborhood-equation sweep.
#[derive(Debug, Clone)]
pub struct NeighborhoodReport {
    pub probes: usize,
    pub max_defect: f64,
    pub counterexample: Option<String>,
}

/// Verify both inclusions of the two equations
/// `eta^{-1}(N_r(C')) = N_r(eta^{-1}(C'))` and `eta(N_r(C)) = N_r(eta(C))`
/// on sampled probe points, for a finite set `C` of model points.
pub fn verify_lemma_neighborhoods(
    model: &MetricGSpaceModel,
    c: &[Point],
    r: f64,
    probes: usize,
    rng: &mut Sampler,
    tol: &TolerancePolicy,
) -> Result<NeighborhoodReport> {
    if c.is_empty() {
        return Err(Error::Contract("verify_lemma_neighborhoods: empty C".into()));
    }
    if r < 0.0 {
        return Err(Error::Contract("verify_lemma_neighborhoods: r >= 0".into()));
    }
    let orbits: Vec<OrbitPoint> = c
        .iter()
        .map(|p| model.orbit_of(p, tol))
        .collect::<Result<_>>()?;
    let allowed = tol.eps_geom * 10.0;
    let mut max_defect = 0.0f64;
    let mut counterexample = None;

    for i in 0..probes {
        let x = model.sample_point(rng, 1.0);
        let ox = model.orbit_of(&x, tol)?;
        // d^K(eta(x), C') and the best realizer distance d(x, eta^{-1}(C')).
        let mut dq_min = f64::INFINITY;
        let mut real_min = f64::INFINITY;
        for o in &orbits {
            let dq = quotient_distance(model, &ox, o)?;
            dq_min = dq_min.min(dq);
            let y = realize(model, &x, o, tol)?;
            real_min = real_min.min(model.dist(&x, &y, tol)?);
        }
        // Equation 1, both inclusions: membership of x on each side agrees
        // because the two distances coincide.
        let defect = (dq_min - real_min).abs();
        max_defect = max_defect.max(defect);
        if defect > allowed && counterexample.is_none() {
            counterexample = Some(format!(
                "probe {i}: d^K = {dq_min:.12e} but realizer distance = {real_min:.12e}"
            ));
        }

        // Equation 2, forward inclusion: a probe inside N_r(C) maps inside
        // N_r(eta(C)).
        if real_min <= r && dq_min > r + allowed && counterexample.is_none() {
            counterexample = Some(format!(
                "probe {i}: x in N_r(C)-orbit but eta(x) outside N_r(eta(C))"
            ));
        }
    }

    // Equation 2, reverse inclusion: points of N_r(eta(C)) are images of
    // points of N_r(union of orbits); constructive check on perturbed
    // realizers around each C point.
    for (i, o) in orbits.iter().enumerate() {
        for _ in 0..(probes / orbits.len()).max(1) {
            let x = perturb_within(model, &c[i], r, rng, tol)?;
            let ox = model.orbit_of(&x, tol)?;
            let dq = quotient_distance(model, &ox, o)?;
            if dq > r + allowed {
                max_defect = max_defect.max(dq - r);
                if counterexample.is_none() {
                    counterexample = Some(format!(
                        "perturbation of C[{i}] at distance <= {r} has quotient distance {dq:.12e}"
                    ));
                }
            }
        }
    }

    Ok(NeighborhoodReport {
        probes,
        max_defect,
        counterexample,
    })
}

/// A random point at model distance at most `r` from `p`.
fn perturb_within(
    model: &MetricGSpaceModel,
    p: &Point,
    r: f64,
    rng: &mut Sampler,
    tol: &TolerancePolicy,
) -> Result<Point> {
    match model {
        MetricGSpaceModel::EuclideanOrth { n } => {
            let dir = rng.unit_vector(*n);
            let step = rng.uniform_in(0.0, r);
            Ok(Point::Vector(p.as_vector()? + dir * step))
        }
        MetricGSpaceModel::PosDefConj { n } => {
            // Geodesic step: p^{1/2} exp(t X) p^{1/2} with |X|_F = 1 moves
            // distance exactly t.
            let (q, lam) = sym_eig(p.as_spd()?, tol)?;
            let sqrt_p = &q * DMatrix::from_diagonal(&lam.map(f64::sqrt)) * q.transpose();
            let mut x = rng.random_symmetric(*n, 1.0);
            // Traceless so the determinant-one slice is preserved.
            let tr = x.trace() / *n as f64;
            for i in 0..*n {
                x[(i, i)] -= tr;
            }
            if x.norm() < 1e-14 {
                return Ok(p.clone());
            }
            let x = &x / x.norm();
            let step = rng.uniform_in(0.0, r);
            let e = sym_exp(&(x * step), tol)?;
            Ok(Point::Spd(&sqrt_p * e * &sqrt_p))
        }
    }
}

/// The orbit map of the ambient group: `g -> K . (g g^T)`, canonical form
/// `2 mu_cartan(g)`.
pub fn mu(g: &DenseMatrix, model: &MetricGSpaceModel, tol: &TolerancePolicy) -> Result<OrbitPoint> {
    let MetricGSpaceModel::PosDefConj { n } = model else {
        return Err(Error::Contract("mu: PosDefConj model required".into()));
    };
    if g.nrows() != *n || g.ncols() != *n {
        return Err(Error::Contract("mu: size mismatch".into()));
    }
    let p = g * g.transpose();
    let point = Point::Spd((&p + p.transpose()) * 0.5);
    model.orbit_of(&point, tol)
}

/// The section image of a subgroup: `Sigma(H)` in section coordinates,
/// equal to the W-saturated Cartan image with the factor-2 eigenvalue
/// convention of the orbit map applied.
pub fn sigma_of_subgroup(
    ambient: &AmbientGroup,
    spec: &SubgroupSpec,
    word_length: usize,
    tol: &TolerancePolicy,
) -> Result<StructuredSet> {
    if ambient.kind != GroupKind::Sl {
        return Err(Error::Contract("sigma_of_subgroup: SL ambient required".into()));
    }
    let a_set = cartan::a_of_subgroup(ambient, spec, word_length, tol)?;
    // Orbit eigenvalues are twice the Cartan coordinates; subspaces and
    // cones are scale-invariant, clouds are scaled pointwise.
    let variant = match a_set.variant {
        SetVariant::Cloud(points) => {
            SetVariant::Cloud(points.into_iter().map(|p| p * 2.0).collect())
        }
        other => other,
    };
    Ok(StructuredSet {
        variant,
        w_saturated: a_set.w_saturated,
    })
}

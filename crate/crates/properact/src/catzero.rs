//! CAT(0) model spaces and the metric-comparison toolkit: Euclidean space,
//! the hyperbolic plane (upper half-plane, curvature -1), the
//! determinant-one SPD manifold, and finite products with the
//! root-sum-square metric.  Provides comparison-triangle checks, asymptotic
//! rays, ray distances, and the explicit Property-(S) witness construction.

use nalgebra::{Complex, DMatrix};

use crate::numerics::{spd_log, sym_eig, sym_exp, DenseMatrix, TolerancePolicy, Vector};
use crate::quotient::pdist;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cat0Model {
    Euclidean { n: usize },
    HyperbolicPlane,
    PosDef { n: usize },
    Product(Vec<Cat0Model>),
}

/// A point of a model space.
#[derive(Debug, Clone)]
pub enum CPoint {
    Euclidean(Vector),
    /// Upper half-plane, `im > 0`.
    Hyp(Complex<f64>),
    Spd(DenseMatrix),
    Product(Vec<CPoint>),
}

impl CPoint {
    pub fn hyp(re: f64, im: f64) -> Self {
        CPoint::Hyp(Complex::new(re, im))
    }

    fn as_euclidean(&self) -> Result<&Vector> {
        match self {
            CPoint::Euclidean(v) => Ok(v),
            _ => Err(Error::Contract("expected a Euclidean point".into())),
        }
    }

    fn as_hyp(&self) -> Result<Complex<f64>> {
        match self {
            CPoint::Hyp(z) => Ok(*z),
            _ => Err(Error::Contract("expected a hyperbolic point".into())),
        }
    }

    fn as_spd(&self) -> Result<&DenseMatrix> {
        match self {
            CPoint::Spd(m) => Ok(m),
            _ => Err(Error::Contract("expected an SPD point".into())),
        }
    }

    fn as_product(&self) -> Result<&[CPoint]> {
        match self {
            CPoint::Product(ps) => Ok(ps),
            _ => Err(Error::Contract("expected a product point".into())),
        }
    }
}

fn check_hyp(z: Complex<f64>) -> Result<Complex<f64>> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im <= 0.0 {
        return Err(Error::Domain(format!(
            "hyperbolic point must have positive imaginary part, got {z}"
        )));
    }
    Ok(z)
}

impl Cat0Model {
    /// The model metric.
    pub fn dist(&self, p: &CPoint, q: &CPoint, tol: &TolerancePolicy) -> Result<f64> {
        match self {
            Cat0Model::Euclidean { .. } => Ok((p.as_euclidean()? - q.as_euclidean()?).norm()),
            Cat0Model::HyperbolicPlane => {
                let a = check_hyp(p.as_hyp()?)?;
                let b = check_hyp(q.as_hyp()?)?;
                let num = (a.re - b.re).powi(2) + (a.im - b.im).powi(2);
                Ok((1.0 + num / (2.0 * a.im * b.im)).acosh())
            }
            Cat0Model::PosDef { .. } => pdist(p.as_spd()?, q.as_spd()?, tol),
            Cat0Model::Product(models) => {
                let ps = p.as_product()?;
                let qs = q.as_product()?;
                if ps.len() != models.len() || qs.len() != models.len() {
                    return Err(Error::Contract("product point arity mismatch".into()));
                }
                let mut sum = 0.0;
                for ((m, a), b) in models.iter().zip(ps).zip(qs) {
                    sum += m.dist(a, b, tol)?.powi(2);
                }
                Ok(sum.sqrt())
            }
        }
    }

    /// The point at affine parameter `t in [0,1]` on the geodesic from `p`
    /// to `q`.
    pub fn geodesic(&self, p: &CPoint, q: &CPoint, t: f64, tol: &TolerancePolicy) -> Result<CPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Contract("geodesic: t must lie in [0, 1]".into()));
        }
        match self {
            Cat0Model::Euclidean { .. } => {
                let a = p.as_euclidean()?;
                let b = q.as_euclidean()?;
                Ok(CPoint::Euclidean(a * (1.0 - t) + b * t))
            }
            Cat0Model::HyperbolicPlane => {
                let a = check_hyp(p.as_hyp()?)?;
                let b = check_hyp(q.as_hyp()?)?;
                Ok(CPoint::Hyp(hyp_geodesic_point(a, b, t)))
            }
            Cat0Model::PosDef { .. } => {
                let pm = p.as_spd()?;
                let qm = q.as_spd()?;
                let (e, lam) = sym_eig(pm, tol)?;
                if lam.iter().any(|&l| l <= tol.eps_rank) {
                    return Err(Error::Domain("geodesic: point not positive definite".into()));
                }
                let sqrt = &e * DMatrix::from_diagonal(&lam.map(f64::sqrt)) * e.transpose();
                let isqrt = &e * DMatrix::from_diagonal(&lam.map(|l| 1.0 / l.sqrt())) * e.transpose();
                let mid = &isqrt * qm * &isqrt;
                let x = spd_log(&((&mid + mid.transpose()) * 0.5), tol)?;
                let step = sym_exp(&(x * t), tol)?;
                let out = &sqrt * step * &sqrt;
                Ok(CPoint::Spd((&out + out.transpose()) * 0.5))
            }
            Cat0Model::Product(models) => {
                let ps = p.as_product()?;
                let qs = q.as_product()?;
                let mut parts = Vec::with_capacity(models.len());
                for ((m, a), b) in models.iter().zip(ps).zip(qs) {
                    parts.push(m.geodesic(a, b, t, tol)?);
                }
                Ok(CPoint::Product(parts))
            }
        }
    }
}

/// Geodesic point in the upper half-plane at affine parameter `t`.
fn hyp_geodesic_point(a: Complex<f64>, b: Complex<f64>, t: f64) -> Complex<f64> {
    if (a - b).norm() < 1e-15 {
        return a;
    }
    if (a.re - b.re).abs() < 1e-13 * (1.0 + a.norm() + b.norm()) {
        // Vertical line: geometric interpolation of heights.
        let im = a.im.powf(1.0 - t) * b.im.powf(t);
        return Complex::new(a.re, im);
    }
    // Circle orthogonal to the real axis through a and b.
    let c0 = (a.norm_sqr() - b.norm_sqr()) / (2.0 * (a.re - b.re));
    let r = (a - Complex::new(c0, 0.0)).norm();
    let theta_a = (a.im).atan2(a.re - c0);
    let theta_b = (b.im).atan2(b.re - c0);
    // Arclength coordinate s(theta) = ln tan(theta / 2) is the unit-speed
    // parameter; interpolate there.
    let sa = (theta_a / 2.0).tan().ln();
    let sb = (theta_b / 2.0).tan().ln();
    let s = sa * (1.0 - t) + sb * t;
    let theta = 2.0 * s.exp().atan();
    Complex::new(c0 + r * theta.cos(), r * theta.sin())
}

/// Boundary point of the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HypBoundary {
    Real(f64),
    Infinity,
}

/// Direction data of a geodesic ray.
#[derive(Debug, Clone)]
pub enum RayDirection {
    /// Unit vector.
    Euclidean(Vector),
    /// Ideal endpoint.
    Hyp(HypBoundary),
    /// Unit-Frobenius symmetric matrix: tangent direction at the base.
    Spd(DenseMatrix),
    /// Per-factor directions with speed weights of unit root-sum-square.
    Product(Vec<(RayDirection, f64)>),
}

/// A unit-speed geodesic ray.
#[derive(Debug, Clone)]
pub struct GeodesicRay {
    pub base: CPoint,
    pub direction: RayDirection,
}

impl GeodesicRay {
    /// The ray point at parameter `t >= 0`.
    pub fn at(&self, model: &Cat0Model, t: f64, tol: &TolerancePolicy) -> Result<CPoint> {
        if t < 0.0 {
            return Err(Error::Contract("ray parameter must be nonnegative".into()));
        }
        match (model, &self.direction) {
            (Cat0Model::Euclidean { .. }, RayDirection::Euclidean(dir)) => {
                Ok(CPoint::Euclidean(self.base.as_euclidean()? + dir * t))
            }
            (Cat0Model::HyperbolicPlane, RayDirection::Hyp(xi)) => {
                let z = check_hyp(self.base.as_hyp()?)?;
                match xi {
                    HypBoundary::Infinity => Ok(CPoint::Hyp(Complex::new(z.re, z.im * t.exp()))),
                    HypBoundary::Real(x) => {
                        // Conjugate the endpoint to infinity by w = -1/(z - x),
                        // run the vertical ray, and map back.
                        let w = -Complex::new(1.0, 0.0) / (z - Complex::new(*x, 0.0));
                        let w_t = Complex::new(w.re, w.im * t.exp());
                        Ok(CPoint::Hyp(Complex::new(*x, 0.0) - Complex::new(1.0, 0.0) / w_t))
                    }
                }
            }
            (Cat0Model::PosDef { .. }, RayDirection::Spd(x)) => {
                let p = self.base.as_spd()?;
                let (e, lam) = sym_eig(p, tol)?;
                let sqrt = &e * DMatrix::from_diagonal(&lam.map(f64::sqrt)) * e.transpose();
                let step = sym_exp(&(x * t), tol)?;
                let out = &sqrt * step * &sqrt;
                Ok(CPoint::Spd((&out + out.transpose()) * 0.5))
            }
            (Cat0Model::Product(models), RayDirection::Product(dirs)) => {
                let bases = self.base.as_product()?;
                let mut parts = Vec::with_capacity(models.len());
                for ((m, b), (d, speed)) in models.iter().zip(bases).zip(dirs) {
                    let factor_ray = GeodesicRay {
                        base: b.clone(),
                        direction: d.clone(),
                    };
                    parts.push(factor_ray.at(m, t * speed, tol)?);
                }
                Ok(CPoint::Product(parts))
            }
            _ => Err(Error::Contract("ray direction does not match the model".into())),
        }
    }
}

/// Comparison-triangle margin at the point `p = geodesic(x2, x3, s)`:
/// the Euclidean comparison distance minus the model distance.  CAT(0)
/// means the margin is nonnegative for every triangle and every `s`.
pub fn comparison_check(
    model: &Cat0Model,
    x1: &CPoint,
    x2: &CPoint,
    x3: &CPoint,
    s: f64,
    tol: &TolerancePolicy,
) -> Result<f64> {
    let d12 = model.dist(x1, x2, tol)?;
    let d13 = model.dist(x1, x3, tol)?;
    let d23 = model.dist(x2, x3, tol)?;
    let eps = tol.eps_geom * 10.0 * (1.0 + d12 + d13 + d23);
    if d12 > d13 + d23 + eps || d13 > d12 + d23 + eps || d23 > d12 + d13 + eps {
        return Err(Error::Numerical(
            "comparison_check: input distances violate the triangle inequality".into(),
        ));
    }
    // Degenerate triangles short-circuit.
    if d23 < tol.eps_geom || d12 < tol.eps_geom || d13 < tol.eps_geom {
        return Ok(0.0);
    }
    let p = model.geodesic(x2, x3, s, tol)?;
    let d1p = model.dist(x1, &p, tol)?;
    // Comparison triangle: x2' at the origin, x3' on the axis, x1' above.
    let u = (d12 * d12 + d23 * d23 - d13 * d13) / (2.0 * d23);
    let v2 = (d12 * d12 - u * u).max(0.0);
    let x1c = (u, v2.sqrt());
    let pc = (s * d23, 0.0);
    let comparison = ((x1c.0 - pc.0).powi(2) + (x1c.1 - pc.1).powi(2)).sqrt();
    Ok(comparison - d1p)
}

/// The unique ray from `p_new` asymptotic to `c` (same ideal endpoint).
pub fn asymptotic_ray(model: &Cat0Model, c: &GeodesicRay, p_new: &CPoint) -> Result<GeodesicRay> {
    match (model, &c.direction) {
        (Cat0Model::Euclidean { .. }, RayDirection::Euclidean(_)) => Ok(GeodesicRay {
            base: p_new.clone(),
            direction: c.direction.clone(),
        }),
        (Cat0Model::HyperbolicPlane, RayDirection::Hyp(_)) => Ok(GeodesicRay {
            base: p_new.clone(),
            direction: c.direction.clone(),
        }),
        (Cat0Model::Product(models), RayDirection::Product(dirs)) => {
            let bases = p_new.as_product()?;
            let mut parts = Vec::with_capacity(models.len());
            for ((m, b), (d, speed)) in models.iter().zip(bases).zip(dirs) {
                let factor = asymptotic_ray(
                    m,
                    &GeodesicRay {
                        base: b.clone(),
                        direction: d.clone(),
                    },
                    b,
                )?;
                parts.push((factor.direction, *speed));
            }
            Ok(GeodesicRay {
                base: p_new.clone(),
                direction: RayDirection::Product(parts),
            })
        }
        (Cat0Model::PosDef { .. }, _) => Err(Error::Unsupported(
            "asymptotic rays on the SPD manifold are not provided".into(),
        )),
        _ => Err(Error::Contract("ray direction does not match the model".into())),
    }
}

/// Result of minimizing `t -> d(q, c(t))` over `[0, t_max]`.
#[derive(Debug, Clone, Copy)]
pub struct RayDistance {
    pub d: f64,
    pub t_star: f64,
    /// True when the minimum sits at the search horizon.
    pub horizon_limited: bool,
}

/// Ternary-search minimization of the convex ray-distance function.
pub fn ray_distance(
    model: &Cat0Model,
    q: &CPoint,
    c: &GeodesicRay,
    t_max: f64,
    tol: &TolerancePolicy,
) -> Result<RayDistance> {
    if t_max <= 0.0 {
        return Err(Error::Contract("ray_distance: t_max > 0 required".into()));
    }
    let f = |t: f64| -> Result<f64> { model.dist(q, &c.at(model, t, tol)?, tol) };
    let mut lo = 0.0f64;
    let mut hi = t_max;
    while hi - lo > tol.eps_geom {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1)? <= f(m2)? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t_star = 0.5 * (lo + hi);
    Ok(RayDistance {
        d: f(t_star)?,
        t_star,
        horizon_limited: t_star >= t_max - 100.0 * tol.eps_geom,
    })
}

/// Description of the witnessing isometry.
#[derive(Debug, Clone)]
pub enum IsometryDesc {
    /// Euclidean translation.
    Translation(Vector),
    /// Hyperbolic-plane isometry fixing a boundary point: conjugate the
    /// fixed point to infinity, apply `z -> a z + beta` (`a > 0`), conjugate
    /// back.  `fixed = None` means the fixed point is already infinity.
    Mobius {
        fixed: Option<f64>,
        a: f64,
        beta: f64,
    },
    Product(Vec<IsometryDesc>),
}

impl IsometryDesc {
    pub fn apply(&self, p: &CPoint) -> Result<CPoint> {
        match self {
            IsometryDesc::Translation(v) => Ok(CPoint::Euclidean(p.as_euclidean()? + v)),
            IsometryDesc::Mobius { fixed, a, beta } => {
                let z = check_hyp(p.as_hyp()?)?;
                let w = match fixed {
                    None => z,
                    Some(xi) => -Complex::new(1.0, 0.0) / (z - Complex::new(*xi, 0.0)),
                };
                let w2 = w * *a + Complex::new(*beta, 0.0);
                let out = match fixed {
                    None => w2,
                    Some(xi) => Complex::new(*xi, 0.0) - Complex::new(1.0, 0.0) / w2,
                };
                Ok(CPoint::Hyp(out))
            }
            IsometryDesc::Product(parts) => {
                let ps = p.as_product()?;
                if ps.len() != parts.len() {
                    return Err(Error::Contract("product isometry arity mismatch".into()));
                }
                let mut out = Vec::with_capacity(parts.len());
                for (g, x) in parts.iter().zip(ps) {
                    out.push(g.apply(x)?);
                }
                Ok(CPoint::Product(out))
            }
        }
    }
}

/// A Property-(S) witness: an isometry `g` with `g p = p0` whose
/// displacement of `q` is bounded by `r + 2 b`.
#[derive(Debug, Clone)]
pub struct PropertySWitness {
    pub g: IsometryDesc,
    /// Distance from `q` to the chosen ray.
    pub b: f64,
    /// `d(p, p0)`.
    pub r: f64,
    /// `r + 2 b`.
    pub bound: f64,
}

/// Construct the Property-(S) witness for the basepoint move `p -> p0`
/// bounding the displacement of `q`.
pub fn property_s_witness(
    model: &Cat0Model,
    p0: &CPoint,
    p: &CPoint,
    q: &CPoint,
    tol: &TolerancePolicy,
) -> Result<PropertySWitness> {
    let r = model.dist(p, p0, tol)?;
    match model {
        Cat0Model::Euclidean { .. } => {
            let v = p0.as_euclidean()? - p.as_euclidean()?;
            Ok(PropertySWitness {
                g: IsometryDesc::Translation(v),
                b: 0.0,
                r,
                bound: r,
            })
        }
        Cat0Model::HyperbolicPlane => {
            let zp = check_hyp(p.as_hyp()?)?;
            let zp0 = check_hyp(p0.as_hyp()?)?;
            let zq = check_hyp(q.as_hyp()?)?;
            // Ideal endpoint of the ray from p through q (any ray when q = p).
            let xi = if (zq - zp).norm() < 1e-13 {
                HypBoundary::Infinity
            } else {
                ray_endpoint_through(zp, zq)
            };
            // Conjugate xi to infinity; there the stabilizer is affine.
            let conj = |z: Complex<f64>| -> Complex<f64> {
                match xi {
                    HypBoundary::Infinity => z,
                    HypBoundary::Real(x) => -Complex::new(1.0, 0.0) / (z - Complex::new(x, 0.0)),
                }
            };
            let wp = conj(zp);
            let wp0 = conj(zp0);
            let a = wp0.im / wp.im;
            let beta = wp0.re - a * wp.re;
            let fixed = match xi {
                HypBoundary::Infinity => None,
                HypBoundary::Real(x) => Some(x),
            };
            let b = 0.0; // q lies on the chosen ray by construction
            Ok(PropertySWitness {
                g: IsometryDesc::Mobius { fixed, a, beta },
                b,
                r,
                bound: r + 2.0 * b,
            })
        }
        Cat0Model::Product(models) => {
            let ps = p.as_product()?;
            let p0s = p0.as_product()?;
            let qs = q.as_product()?;
            let mut parts = Vec::with_capacity(models.len());
            let mut bound_sq = 0.0;
            let mut b_sq = 0.0;
            for ((m, (pi, p0i)), qi) in models.iter().zip(ps.iter().zip(p0s)).zip(qs) {
                let w = property_s_witness(m, p0i, pi, qi, tol)?;
                bound_sq += w.bound * w.bound;
                b_sq += w.b * w.b;
                parts.push(w.g);
            }
            Ok(PropertySWitness {
                g: IsometryDesc::Product(parts),
                b: b_sq.sqrt(),
                r,
                bound: bound_sq.sqrt(),
            })
        }
        Cat0Model::PosDef { .. } => Err(Error::Unsupported(
            "Property-(S) witnesses on the SPD manifold are not provided".into(),
        )),
    }
}

/// Ideal endpoint of the geodesic ray from `p` through `q` (`p != q`).
fn ray_endpoint_through(p: Complex<f64>, q: Complex<f64>) -> HypBoundary {
    if (p.re - q.re).abs() < 1e-13 * (1.0 + p.norm() + q.norm()) {
        if q.im > p.im {
            HypBoundary::Infinity
        } else {
            HypBoundary::Real(p.re)
        }
    } else {
        let c0 = (p.norm_sqr() - q.norm_sqr()) / (2.0 * (p.re - q.re));
        let r = (p - Complex::new(c0, 0.0)).norm();
        let theta_p = p.im.atan2(p.re - c0);
        let theta_q = q.im.atan2(q.re - c0);
        if theta_q < theta_p {
            HypBoundary::Real(c0 + r)
        } else {
            HypBoundary::Real(c0 - r)
        }
    }
}

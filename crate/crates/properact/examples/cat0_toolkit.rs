//! CAT(0) model spaces: distances, geodesics, comparison triangles, and
//! asymptotic rays.

use nalgebra::DVector;
use properact::catzero::{
    asymptotic_ray, comparison_check, ray_distance, Cat0Model, CPoint, GeodesicRay, HypBoundary,
    RayDirection,
};
use properact::numerics::TolerancePolicy;

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();

    // Upper half-plane: distance and a geodesic midpoint on a circle arc.
    let h = Cat0Model::HyperbolicPlane;
    let a = CPoint::hyp(-1.0, 1.0);
    let b = CPoint::hyp(1.0, 1.0);
    println!("hyperbolic distance: {:.6}", h.dist(&a, &b, &tol)?);
    if let CPoint::Hyp(m) = h.geodesic(&a, &b, 0.5, &tol)? {
        println!("midpoint: {:.4} + {:.4}i (bulges upward)", m.re, m.im);
    }

    // Comparison margin: nonnegative in CAT(0) spaces, zero in flat ones.
    let c = CPoint::hyp(0.0, 3.0);
    let margin = comparison_check(&h, &c, &a, &b, 0.5, &tol)?;
    println!("comparison margin of a hyperbolic triangle: {margin:.6}");

    // A product of a flat plane and the hyperbolic plane is again CAT(0).
    let prod = Cat0Model::Product(vec![Cat0Model::Euclidean { n: 2 }, Cat0Model::HyperbolicPlane]);
    let p = CPoint::Product(vec![
        CPoint::Euclidean(DVector::from_vec(vec![0.0, 0.0])),
        CPoint::hyp(0.0, 1.0),
    ]);
    let q = CPoint::Product(vec![
        CPoint::Euclidean(DVector::from_vec(vec![3.0, 4.0])),
        CPoint::hyp(0.0, std::f64::consts::E.powi(2)),
    ]);
    println!("product distance (5 and 2 combine): {:.6}", prod.dist(&p, &q, &tol)?);

    // Asymptotic rays stay within the distance of their basepoints.
    let ray = GeodesicRay {
        base: CPoint::hyp(0.0, 1.0),
        direction: RayDirection::Hyp(HypBoundary::Infinity),
    };
    let moved = asymptotic_ray(&h, &ray, &CPoint::hyp(2.0, 1.0))?;
    let bound = h.dist(&ray.base, &moved.base, &tol)?;
    for t in [1.0, 10.0, 100.0] {
        let d = h.dist(&ray.at(&h, t, &tol)?, &moved.at(&h, t, &tol)?, &tol)?;
        println!("t = {t:>5}: d(c(t), c'(t)) = {d:.6} <= {bound:.6}");
    }

    // Distance from a point to a ray, by convex minimization.
    let rd = ray_distance(&h, &CPoint::hyp(1.0, 1.0), &ray, 100.0, &tol)?;
    println!("point-to-ray distance {:.6} at t = {:.6}", rd.d, rd.t_star);
    Ok(())
}

//! Explicit basepoint-move isometries with controlled displacement of a
//! third point, on the hyperbolic plane and on a flat-times-hyperbolic
//! product.

use nalgebra::DVector;
use properact::catzero::{property_s_witness, Cat0Model, CPoint};
use properact::numerics::TolerancePolicy;

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();

    let h = Cat0Model::HyperbolicPlane;
    let p = CPoint::hyp(0.0, 1.0);
    let p0 = CPoint::hyp(0.5, 1.2);
    let q = CPoint::hyp(3.0, 0.4);

    // An isometry g with g·p = p0 moving q by at most r + 2b, where
    // r = d(p, p0) and b is the distance from q to the ray chosen through
    // p and q.
    let w = property_s_witness(&h, &p0, &p, &q, &tol)?;
    let gp = w.g.apply(&p)?;
    let gq = w.g.apply(&q)?;
    println!("r = {:.6}, b = {:.6}, bound = {:.6}", w.r, w.b, w.bound);
    println!("basepoint residual d(g p, p0) = {:.3e}", h.dist(&gp, &p0, &tol)?);
    println!("third-point move  d(q, g q)   = {:.6}", h.dist(&q, &gq, &tol)?);

    // The product case combines per-factor witnesses.
    let prod = Cat0Model::Product(vec![Cat0Model::Euclidean { n: 2 }, Cat0Model::HyperbolicPlane]);
    let pp = CPoint::Product(vec![
        CPoint::Euclidean(DVector::from_vec(vec![0.0, 0.0])),
        CPoint::hyp(0.0, 1.0),
    ]);
    let pp0 = CPoint::Product(vec![
        CPoint::Euclidean(DVector::from_vec(vec![1.0, 0.0])),
        CPoint::hyp(0.2, 0.9),
    ]);
    let qq = CPoint::Product(vec![
        CPoint::Euclidean(DVector::from_vec(vec![-2.0, 5.0])),
        CPoint::hyp(-1.0, 2.0),
    ]);
    let w = property_s_witness(&prod, &pp0, &pp, &qq, &tol)?;
    let gq = w.g.apply(&qq)?;
    println!(
        "product: bound {:.6}, actual move {:.6}",
        w.bound,
        prod.dist(&qq, &gq, &tol)?
    );
    Ok(())
}

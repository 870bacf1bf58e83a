//! Exact and sampled bounded-intersection checks on subspace unions.

use nalgebra::DVector;
use properact::flats::{hbi_check_sampled, hbi_decide, StructuredSet};
use properact::numerics::TolerancePolicy;

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();

    // Two lines in the sum-zero plane of R^3, Weyl-saturated.
    let c1 = StructuredSet::line(&DVector::from_vec(vec![1.0, 1.0, -2.0]));
    let c2 = StructuredSet::line(&DVector::from_vec(vec![1.0, -1.0, 0.0]));

    let cert = hbi_decide(&c1, &c2, &tol)?;
    println!("bounded intersections: {}", cert.verdict);
    if let Some(gap) = cert.gap {
        println!("principal-angle gap: {gap:.4} rad");
        // Quantitative form: points of C1 within r of C2 have norm <= r / sin(gap).
        let r = 10.0;
        println!("capture bound at r = {r}: {:.2}", r / gap.sin());
    }

    // A shared direction kills the property and produces a witness.
    let cert = hbi_decide(&c1, &c1, &tol)?;
    println!("same line vs itself: {}", cert.verdict);
    if let Some(w) = cert.witness {
        let v = w.vector;
        println!("witness direction: ({:.3}, {:.3}, {:.3})", v[0], v[1], v[2]);
    }

    // The sampled layer reaches the same verdict from point clouds.
    let sample_line = |dir: &DVector<f64>| -> Vec<DVector<f64>> {
        (-200..=200).map(|k| dir * (k as f64 * 5.0)).collect()
    };
    let p1 = sample_line(&DVector::from_vec(vec![1.0, 1.0, -2.0]));
    let p2 = sample_line(&DVector::from_vec(vec![1.0, -1.0, 0.0]));
    let sampled = hbi_check_sampled(&p1, &p2, 10.0, 1000.0, 0.5)?;
    println!(
        "sampled verdict: {} (max captured norm {:.2})",
        sampled.is_hbi, sampled.max_capture_norm
    );
    Ok(())
}

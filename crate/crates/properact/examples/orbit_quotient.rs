//! Orbit quotients of the positive-definite cone under conjugation:
//! sections, the quotient metric, and the non-expanding map conditions.

use nalgebra::DVector;
use properact::numerics::TolerancePolicy;
use properact::quotient::{
    orbit_section_scan, quotient_distance, verify_nonexpanding_conditions, MetricGSpaceModel,
};
use properact::sample::Sampler;

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();
    let model = MetricGSpaceModel::PosDefConj { n: 3 };
    let mut rng = Sampler::new(7);

    // Quotient distance between two random orbits: minimum over the
    // rotation group, computed from sorted log-eigenvalues.
    let p = model.sample_point(&mut rng, 1.0);
    let q = model.sample_point(&mut rng, 1.0);
    let (op, oq) = (model.orbit_of(&p, &tol)?, model.orbit_of(&q, &tol)?);
    println!("ambient distance:  {:.6}", model.dist(&p, &q, &tol)?);
    println!("quotient distance: {:.6}", quotient_distance(&model, &op, &oq)?);

    // The section (diagonal matrices) meets each orbit in a Weyl orbit and
    // nothing else: scan K·p for stray intersections.
    let section = model.section()?;
    let coords = DVector::from_vec(vec![0.8, 0.1, -0.9]);
    let scan = orbit_section_scan(&section, &coords, 1e-2, 200, &mut rng, &tol)?;
    println!(
        "section scan: {} hits near the section, worst deviation from W-orbit {:.3e}",
        scan.samples_near_section, scan.max_deviation_from_w_orbit
    );

    // Condition (1): the orbit map does not expand distances.
    // Condition (2): quotient distances are realized by actual orbit points.
    let report = verify_nonexpanding_conditions(&model, 500, &mut rng, &tol)?;
    println!(
        "non-expanding violation {:.3e}, realizer residual {:.3e} over {} samples",
        report.max_condition1_violation, report.max_condition2_residual, report.samples
    );
    Ok(())
}

//! Exact, sampled, and brute-force decision layers on the same SL(2)
//! problem, compared for agreement.

use nalgebra::{DMatrix, DVector};
use properact::cartan::{AmbientGroup, GroupKind, SubgroupSpec};
use properact::numerics::TolerancePolicy;
use properact::properness::{cross_validate, Budgets, Mode, PropernessProblem};

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();
    let sl2 = AmbientGroup::new(GroupKind::Sl, 2)?;
    let flow = SubgroupSpec::OneParameter {
        x: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])),
    };
    let budgets = Budgets {
        word_length: 4,
        radius: 50.0,
        rho: 0.2,
        mesh: 0.2,
    };

    // The diagonal flow against itself: never a proper pair.
    let problem = PropernessProblem {
        ambient: sl2.clone(),
        h1: flow.clone(),
        h2: flow.clone(),
        mode: Mode::Auto,
        budgets,
    };
    let report = cross_validate(&problem, &tol)?;
    println!("flow vs itself: {}", report.detail);
    println!("  exact: {:?}, sampled: {}", report.exact_kind, report.sampled_kind);
    if let Some(b) = &report.brute_force {
        println!(
            "  brute force: {}/{} ball elements captured, frontier |mu| {:.2}",
            b.captured_count, b.ball1_size, b.frontier_mu
        );
    }

    // The flow against a compact subgroup: proper, and the group-side
    // enumeration sees captures bounded away from the ball frontier.
    let problem = PropernessProblem {
        h2: SubgroupSpec::ElementList {
            elements: vec![DMatrix::identity(2, 2)],
        },
        ..problem
    };
    let report = cross_validate(&problem, &tol)?;
    println!("flow vs compact: {}", report.detail);
    if let Some(b) = &report.brute_force {
        println!(
            "  brute force: max captured |mu| {:.2} vs frontier {:.2}",
            b.max_captured_mu, b.frontier_mu
        );
    }
    Ok(())
}

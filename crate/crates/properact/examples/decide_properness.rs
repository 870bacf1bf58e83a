//! Decide properness and coarse equivalence for pairs of one-parameter
//! subgroups, and print the rank-criterion report.

use nalgebra::{DMatrix, DVector};
use properact::cartan::{AmbientGroup, GroupKind, SubgroupSpec};
use properact::numerics::TolerancePolicy;
use properact::properness::{
    calabi_markus, decide, decide_equivalence, Budgets, Mode, PropernessProblem, Verdict,
};

fn one_param(diag: &[f64]) -> SubgroupSpec {
    SubgroupSpec::OneParameter {
        x: DMatrix::from_diagonal(&DVector::from_vec(diag.to_vec())),
    }
}

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();
    let sl3 = AmbientGroup::new(GroupKind::Sl, 3)?;

    // diag(1,1,-2) against diag(1,-1,0): transverse Weyl-orbit lines.
    let problem = PropernessProblem {
        ambient: sl3.clone(),
        h1: one_param(&[1.0, 1.0, -2.0]),
        h2: one_param(&[1.0, -1.0, 0.0]),
        mode: Mode::Auto,
        budgets: Budgets::default(),
    };
    match decide(&problem, &tol)? {
        Verdict::Proper { certificate } => {
            println!("SL(3) pair: Proper, gap {:?}", certificate.gap)
        }
        v => println!("SL(3) pair: {v:?}"),
    }

    // The same subgroup twice shares every Cartan direction.
    let problem2 = PropernessProblem {
        h2: one_param(&[1.0, 1.0, -2.0]),
        ..problem.clone()
    };
    match decide(&problem2, &tol)? {
        Verdict::NotProper { witness, .. } => {
            println!(
                "identical pair: NotProper, witness ({:.3}, {:.3}, {:.3})",
                witness[0], witness[1], witness[2]
            )
        }
        v => println!("identical pair: {v:?}"),
    }

    println!("equivalence of the transverse pair: {:?}", decide_equivalence(&problem, &tol)?);

    // Rank criterion: rank SL(3) = 2 beats the one-parameter rank 1.
    let rank = calabi_markus(&sl3, &problem.h1, &tol)?;
    println!(
        "ranks {} vs {}: admits infinite discontinuous group = {}",
        rank.ambient_rank, rank.subgroup_rank, rank.admits_infinite_discontinuous_group
    );
    Ok(())
}

//! The theorem-verification suite on the rank-one positive-definite model:
//! agreement of the saturated bounded-intersection conditions, both
//! inclusions of the saturation identity, and the neighborhood constant.

use properact::numerics::TolerancePolicy;
use properact::properness::{theorem_suite, SuiteConfig};

fn main() -> properact::Result<()> {
    let tol = TolerancePolicy::default();
    let report = theorem_suite(&SuiteConfig::default(), &tol)?;
    println!(
        "four HBI conditions: {} disagreements over {} configurations",
        report.condition_disagreements, report.configs_checked
    );
    println!(
        "saturation identity: forward defect {:.3e}, converse defect {:.3e}",
        report.saturation_forward_defect, report.saturation_converse_defect
    );
    println!(
        "neighborhood constant: observed tau {:.4} vs predicted {:.4}",
        report.tau_observed, report.tau_predicted
    );
    Ok(())
}

//! Checks every closed-form charging force against the virtual-work oracle,
//! then shows why model A needs the geometric `asin` branch.
//!
//! Run with `cargo run --example oracle_check`.

use spring_linkage::oracle::{compare_with_oracle, model_a_branch_report, ORACLE_TOLERANCE};
use spring_linkage::{LinkageGeometry, Result, SpringSpec, StrokeConfig};

fn main() -> Result<()> {
    let geom = LinkageGeometry::new(0.15)?;
    let stroke = StrokeConfig::from_degrees(164.0, 44.0)?;
    let mut springs = vec![
        SpringSpec::vertical(200.0)?,
        SpringSpec::horizontal(200.0)?,
        SpringSpec::rotational(0.7)?,
    ];
    for gamma in [0.25, 0.5, 0.75] {
        springs.push(SpringSpec::model_b(gamma, 200.0)?);
        springs.push(SpringSpec::model_c(gamma, 200.0)?);
    }
    for gamma in [0.0, 0.25, 0.5, 0.8] {
        springs.push(SpringSpec::model_a(gamma, 200.0)?);
    }
    for spec in &springs {
        let cmp = compare_with_oracle(spec, &geom, &stroke, 40)?;
        println!(
            "{:<22} max relative error {:.2e}  {}",
            cmp.label,
            cmp.max_relative_error(),
            if cmp.passes(ORACLE_TOLERANCE) { "ok" } else { "MISMATCH" }
        );
    }

    println!("model A near the horizontal limit, theta = 60 deg:");
    for gamma in [0.9, 0.99, 1.0] {
        let r = model_a_branch_report(&geom, &stroke, gamma, 200.0, 60f64.to_radians())?;
        println!(
            "  gamma {gamma}: oracle {:.5}  geometric {:.5}  principal {:.5}  horizontal {}",
            r.oracle,
            r.resolved_branch,
            r.principal_branch,
            r.horizontal.map_or("-".into(), |h| format!("{h:.5}"))
        );
    }
    Ok(())
}

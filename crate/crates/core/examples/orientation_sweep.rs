//! Stored energy and required stiffness across positioning ratios for the
//! three translational attachment models.
//!
//! Run with `cargo run --example orientation_sweep`.

use spring_linkage::energetics::{gamma_grid, sweep_orientation, DEFAULT_POINTS};
use spring_linkage::{LinkageGeometry, Result, StrokeConfig, SweepModel};

fn main() -> Result<()> {
    let geom = LinkageGeometry::new(0.15)?;
    let stroke = StrokeConfig::from_degrees(179.9, 0.0)?;
    let grid = gamma_grid(11);
    for model in [SweepModel::A, SweepModel::B, SweepModel::C] {
        let sweep = sweep_orientation(model, &geom, &stroke, 1.0, &grid, DEFAULT_POINTS)?;
        println!("model {model:?}");
        for p in &sweep.points {
            match (p.normalized_energy, p.normalized_stiffness) {
                (Some(e), Some(k)) => println!("  gamma {:.1}: energy {:.4}  stiffness {:>9.4}", p.gamma, e, k),
                _ => println!("  gamma {:.1}: {}", p.gamma, p.gap.as_deref().unwrap_or("gap")),
            }
        }
    }

    // the design point quoted for model A
    let a = sweep_orientation(SweepModel::A, &geom, &stroke, 1.0, &[0.8], DEFAULT_POINTS)?;
    let p = &a.points[0];
    println!(
        "model A at gamma 0.8: energy {:.3}, stiffness {:.3}",
        p.normalized_energy.unwrap_or(f64::NAN),
        p.normalized_stiffness.unwrap_or(f64::NAN)
    );
    Ok(())
}

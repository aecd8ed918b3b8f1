//! Charging force and stored energy of the vertical, horizontal and
//! rotational springs, each sized so the stroke peaks at `F_max`.
//!
//! Run with `cargo run --example force_curves`.

use spring_linkage::energetics::{optimal_horizontal_start, size_spring, DEFAULT_POINTS};
use spring_linkage::springs::peak_force_angle_horizontal;
use spring_linkage::{LinkageGeometry, Result, SpringKind, StrokeConfig};

fn main() -> Result<()> {
    let geom = LinkageGeometry::new(0.15)?;
    let f_max = 20.0;
    for (kind, start) in [
        (SpringKind::Vertical, 179.9),
        (SpringKind::Horizontal, 152.0),
        (SpringKind::Rotational, 179.9),
    ] {
        let stroke = StrokeConfig::from_degrees(start, 0.0)?;
        let sized = size_spring(kind, 1, &geom, &stroke, f_max, DEFAULT_POINTS)?;
        let peak = sized.profile.peak().expect("non-empty profile");
        println!(
            "{:<11} k = {:>9.4}  k~ = {:.4}  EPE/(F d) = {:.4}  peak at {:.2} deg",
            kind.label(),
            sized.spec.stiffness(),
            sized.normalized_stiffness,
            sized.profile.normalized_energy(),
            peak.theta.to_degrees()
        );
        for s in sized.profile.samples.iter().step_by(200) {
            println!(
                "    theta {:>7.2}  y/d {:.3}  F/Fmax {:.3}",
                s.theta.to_degrees(),
                s.y / geom.characteristic_length(),
                s.force / f_max
            );
        }
    }

    let best = optimal_horizontal_start(&geom, 0.0, f_max, DEFAULT_POINTS)?;
    println!(
        "horizontal spring stores most from theta_ini = {:.2} deg ({:.4} of ideal); peak force there at {:.2} deg",
        best.theta_ini.to_degrees(),
        best.normalized_energy,
        peak_force_angle_horizontal(best.theta_ini)?.to_degrees()
    );
    Ok(())
}

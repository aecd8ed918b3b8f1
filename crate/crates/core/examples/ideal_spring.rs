//! Near constant-force springs built by superposing two spring-linkages.
//!
//! Run with `cargo run --example ideal_spring`.

use spring_linkage::energetics::{optimize_ratio, DEFAULT_POINTS};
use spring_linkage::{CompositeSpring, LinkageGeometry, Result, SpringKind, SpringSpec, StrokeConfig};

fn main() -> Result<()> {
    let geom = LinkageGeometry::new(0.15)?;
    let stroke = StrokeConfig::from_degrees(179.9, 0.0)?;
    let f_max = 1.0;

    // equal vertical and horizontal springs: k d (1 - sin) + k d sin = k d
    let pair = CompositeSpring::new(
        vec![SpringSpec::vertical(1.0)?, SpringSpec::horizontal(1.0)?],
        "vertical+horizontal",
    )?;
    let sized = pair.sized(&geom, &stroke, f_max, DEFAULT_POINTS)?;
    println!(
        "{}: energy {:.4} of ideal, force CV {:.3}%",
        pair.label,
        sized.profile.normalized_energy(),
        100.0 * sized.profile.force_variation()
    );
    for s in sized.profile.samples.iter().step_by(111) {
        println!("    theta {:>7.2}  F/Fmax {:.5}", s.theta.to_degrees(), s.force / f_max);
    }

    let best = optimize_ratio(SpringKind::Rotational, SpringKind::Horizontal, &geom, &stroke, f_max, DEFAULT_POINTS)?;
    println!(
        "rotational+horizontal: best stiffness ratio {:.4} stores {:.4} of ideal",
        best.ratio, best.normalized_energy
    );
    for c in &best.sized.composite.components {
        println!("    {:<11} stiffness {:.6}", c.kind.label(), c.stiffness());
    }
    Ok(())
}

//! Joint coordinates and body displacement over a compression stroke.
//!
//! Run with `cargo run --example linkage_geometry`.

use spring_linkage::geometry::{body_displacement, knee_angle_at};
use spring_linkage::{Joint, LinkageGeometry, Result, StrokeConfig};

fn main() -> Result<()> {
    let geom = LinkageGeometry::new(0.15)?;
    let stroke = StrokeConfig::from_degrees(164.0, 44.0)?;
    println!("L = {} m, d = {} m", geom.link_length(), geom.characteristic_length());
    println!("{:>8} {:>9} {:>18} {:>18} {:>9}", "theta", "y [m]", "A", "D", "|AD|");
    for theta in stroke.knee_angles(7) {
        let frame = geom.joint_frame(theta)?;
        let (a, d) = (frame.joint(Joint::A), frame.joint(Joint::D));
        let y = body_displacement(&geom, &stroke, theta)?;
        println!(
            "{:>8.2} {:>9.5} ({:>7.4}, {:>7.4}) ({:>7.4}, {:>7.4}) {:>9.5}",
            theta.to_degrees(),
            y,
            a.x,
            a.y,
            d.x,
            d.y,
            frame.knee_span()
        );
        // the displacement map inverts exactly
        assert!((knee_angle_at(&geom, &stroke, y)? - theta).abs() < 1e-9);
    }
    Ok(())
}

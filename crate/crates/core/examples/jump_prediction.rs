//! Projected jump heights of catalogued robots fitted with an ideal
//! spring-linkage.
//!
//! Run with `cargo run --example jump_prediction [catalogue.csv]`.

use spring_linkage::robots::{bundled_catalogue, load_catalogue, predict_improvement, STANDARD_GRAVITY};
use spring_linkage::{Error, Result};

fn main() -> Result<()> {
    let records = match std::env::args().nth(1) {
        Some(path) => load_catalogue(path)?,
        None => bundled_catalogue(),
    };
    for record in &records {
        match predict_improvement(record, STANDARD_GRAVITY) {
            Ok(p) => {
                let gain = p.improvement_percent().map_or("-".into(), |g| format!("{g:.1}%"));
                match (p.normalized_measured, p.normalized_improved) {
                    (Some(before), Some(after)) => {
                        println!("{:<22} h/d {before:.1} -> {after:.1}  (+{gain})", p.name)
                    }
                    _ => println!("{:<22} +{gain}", p.name),
                }
            }
            Err(Error::InsufficientData { name }) => println!("{name:<22} insufficient data"),
            Err(err) => return Err(err),
        }
    }
    Ok(())
}

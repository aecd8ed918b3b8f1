//! Jump heights of spring-linkage robots and their projected gain from an
//! ideal (constant-force) spring-linkage.
//!
//! Heights follow energy conservation with dynamics neglected. A robot's
//! measured height is projected onto the ideal spring by scaling it with the
//! ratio of ideal to actually stored energy, i.e. assuming the losses after
//! charging stay proportionally the same.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const STANDARD_GRAVITY: f64 = 9.81;

/// Column layout of a robot catalogue.
pub const CATALOGUE_HEADER: [&str; 7] = ["name", "mass_kg", "f_max_n", "d_m", "energy_fraction", "v_to_mps", "source"];

/// `h = v^2 / (2 g)`.
pub fn height_from_velocity(v_to: f64, g: f64) -> Result<f64> {
    if !(v_to.is_finite() && v_to >= 0.0) {
        return Err(Error::domain("take-off velocity", v_to, "[0, inf)"));
    }
    check_gravity(g)?;
    Ok(v_to * v_to / (2.0 * g))
}

/// `h = EPE / (m g)`.
pub fn height_from_energy(energy: f64, mass: f64, g: f64) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::domain("mass", mass, "(0, inf)"));
    }
    if !(energy.is_finite() && energy >= 0.0) {
        return Err(Error::domain("stored energy", energy, "[0, inf)"));
    }
    check_gravity(g)?;
    Ok(energy / (mass * g))
}

fn check_gravity(g: f64) -> Result<()> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::domain("g", g, "(0, inf)"));
    }
    Ok(())
}

/// One catalogued robot; unknown measurements are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotRecord {
    pub name: String,
    pub mass_kg: Option<f64>,
    pub f_max_n: Option<f64>,
    pub d_m: Option<f64>,
    /// Stored energy over `F_max d`.
    pub energy_fraction: Option<f64>,
    pub v_to_mps: Option<f64>,
    pub source: String,
}

impl RobotRecord {
    pub fn named(name: impl Into<String>) -> Self {
        RobotRecord {
            name: name.into(),
            mass_kg: None,
            f_max_n: None,
            d_m: None,
            energy_fraction: None,
            v_to_mps: None,
            source: String::new(),
        }
    }

    /// `F_max / (m g)`, when both are known.
    pub fn force_to_weight(&self, g: f64) -> Option<f64> {
        Some(self.f_max_n? / (self.mass_kg? * g))
    }

    /// `F_max d`, the energy an ideal spring would store.
    pub fn ideal_energy(&self) -> Option<f64> {
        Some(self.f_max_n? * self.d_m?)
    }

    /// Field-level checks, reported as `(field, message)`.
    fn problems(&self) -> Option<(&'static str, String)> {
        let positive = [("mass_kg", self.mass_kg), ("f_max_n", self.f_max_n), ("d_m", self.d_m)];
        for (field, value) in positive {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Some((field, format!("{v} must be positive")));
                }
            }
        }
        if let Some(f) = self.energy_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Some(("energy_fraction", format!("{f} is outside [0, 1]")));
            }
        }
        if let Some(v) = self.v_to_mps {
            if !(v.is_finite() && v >= 0.0) {
                return Some(("v_to_mps", format!("{v} must be nonnegative")));
            }
        }
        if self.name.trim().is_empty() {
            return Some(("name", "is empty".into()));
        }
        None
    }
}

/// Measured and projected heights for one robot. Heights are in metres,
/// `normalized_*` in multiples of `d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpPrediction {
    pub name: String,
    pub force_to_weight: Option<f64>,
    /// From the take-off velocity.
    pub h_measured: Option<f64>,
    /// From the stored energy.
    pub h_energy: Option<f64>,
    /// From the ideal spring at the same `F_max`, `d` and mass.
    pub h_ideal: Option<f64>,
    /// Measured height scaled by the ideal-to-stored energy ratio.
    pub h_improved: Option<f64>,
    pub normalized_measured: Option<f64>,
    pub normalized_energy: Option<f64>,
    pub normalized_ideal: Option<f64>,
    pub normalized_improved: Option<f64>,
    /// `h_ideal / h_energy - 1`, which reduces to `1 / fraction - 1`.
    pub improvement: Option<f64>,
}

impl JumpPrediction {
    pub fn improvement_percent(&self) -> Option<f64> {
        self.improvement.map(|r| 100.0 * r)
    }
}

/// Projects `record` onto the ideal spring-linkage.
pub fn predict_improvement(record: &RobotRecord, g: f64) -> Result<JumpPrediction> {
    check_gravity(g)?;
    if record.v_to_mps.is_none() && record.energy_fraction.is_none() {
        return Err(Error::InsufficientData {
            name: record.name.clone(),
        });
    }
    let h_measured = record.v_to_mps.map(|v| height_from_velocity(v, g)).transpose()?;
    let h_ideal = match (record.ideal_energy(), record.mass_kg) {
        (Some(e), Some(m)) => Some(height_from_energy(e, m, g)?),
        _ => None,
    };
    let h_energy = match (record.energy_fraction, h_ideal) {
        (Some(f), Some(h)) => Some(f * h),
        _ => None,
    };
    let gain = record.energy_fraction.filter(|&f| f > 0.0).map(|f| 1.0 / f);
    let h_improved = match (h_measured, gain) {
        (Some(h), Some(r)) => Some(h * r),
        _ => None,
    };
    let per_d = |h: Option<f64>| Some(h? / record.d_m?);
    Ok(JumpPrediction {
        name: record.name.clone(),
        force_to_weight: record.force_to_weight(g),
        h_measured,
        h_energy,
        h_ideal,
        h_improved,
        normalized_measured: per_d(h_measured),
        normalized_energy: per_d(h_energy),
        normalized_ideal: per_d(h_ideal),
        normalized_improved: per_d(h_improved),
        improvement: gain.map(|r| r - 1.0),
    })
}

fn parse_field(raw: &str, row: usize, field: &str) -> Result<Option<f64>> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(None);
    }
    raw.parse::<f64>().map(Some).map_err(|e| Error::Catalogue {
        row,
        field: field.to_owned(),
        message: format!("`{raw}`: {e}"),
    })
}

/// Reads a catalogue: a header row, one robot per row, `#` comment lines.
/// Rows are numbered by their line in the input.
pub fn parse_catalogue<R: Read>(input: R) -> Result<Vec<RobotRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let header_error = |message: String| Error::Catalogue {
        row: 1,
        field: "header".into(),
        message,
    };
    let header = reader.headers().map_err(|e| header_error(e.to_string()))?.clone();
    if header.is_empty() {
        return Ok(Vec::new());
    }
    if header.iter().ne(CATALOGUE_HEADER) {
        return Err(header_error(format!(
            "expected `{}`, found `{}`",
            CATALOGUE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for result in reader.records() {
        let row_of = |e: &csv::Error| e.position().map_or(0, |p| p.line() as usize);
        let raw = result.map_err(|e| Error::Catalogue {
            row: row_of(&e),
            field: "record".into(),
            message: e.to_string(),
        })?;
        let row = raw.position().map_or(0, |p| p.line() as usize);
        if raw.len() != CATALOGUE_HEADER.len() {
            return Err(Error::Catalogue {
                row,
                field: "record".into(),
                message: format!("expected {} fields, found {}", CATALOGUE_HEADER.len(), raw.len()),
            });
        }
        let record = RobotRecord {
            name: raw[0].to_owned(),
            mass_kg: parse_field(&raw[1], row, "mass_kg")?,
            f_max_n: parse_field(&raw[2], row, "f_max_n")?,
            d_m: parse_field(&raw[3], row, "d_m")?,
            energy_fraction: parse_field(&raw[4], row, "energy_fraction")?,
            v_to_mps: parse_field(&raw[5], row, "v_to_mps")?,
            source: raw[6].to_owned(),
        };
        if let Some((field, message)) = record.problems() {
            return Err(Error::Catalogue {
                row,
                field: field.into(),
                message,
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn load_catalogue(path: impl AsRef<Path>) -> Result<Vec<RobotRecord>> {
    parse_catalogue(std::fs::File::open(path)?)
}

/// The catalogue shipped with the crate.
pub fn bundled_catalogue() -> Vec<RobotRecord> {
    parse_catalogue(include_str!("../data/robots.csv").as_bytes()).expect("bundled catalogue parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const G: f64 = STANDARD_GRAVITY;

    #[test]
    fn heights_from_velocity() {
        assert_eq!(height_from_velocity(0.0, G).unwrap(), 0.0);
        let h = height_from_velocity(G * 2f64.sqrt(), G).unwrap();
        assert!((h - G).abs() < 1e-12);
        assert!((height_from_velocity(1.0, G).unwrap() - 0.050968).abs() < 1e-6);
        assert!(height_from_velocity(-1.0, G).is_err());
    }

    #[test]
    fn heights_from_energy() {
        assert_eq!(height_from_energy(0.0, 2.0, G).unwrap(), 0.0);
        assert!(height_from_energy(1.0, 0.0, G).is_err());
        // ideal spring: h / d equals the force-to-weight ratio
        let (f, d, m) = (30.0, 0.3, 0.1);
        let h = height_from_energy(f * d, m, G).unwrap();
        assert!((h / d - f / (m * G)).abs() < 1e-12);
        let h_lin = height_from_energy(f * d / 2.0, m, G).unwrap();
        assert!((h_lin / d - f / (m * G) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn hybrid_robot_projection() {
        let hybrid = &bundled_catalogue()[0];
        let p = predict_improvement(hybrid, G).unwrap();
        assert!((p.normalized_measured.unwrap() - 110.0).abs() < 1e-9);
        assert!((p.normalized_improved.unwrap() - 171.875).abs() < 1e-9);
        assert!((p.improvement_percent().unwrap() - 56.25).abs() < 1e-9);
        assert!((p.force_to_weight.unwrap() - 440.0).abs() < 1e-9);
        assert!(p.normalized_measured.unwrap() <= p.normalized_ideal.unwrap());
        assert!(p.h_ideal.unwrap() >= p.h_energy.unwrap());
    }

    #[test]
    fn ideal_robot_gains_nothing() {
        let mut r = RobotRecord::named("ideal");
        r.energy_fraction = Some(1.0);
        assert_eq!(predict_improvement(&r, G).unwrap().improvement, Some(0.0));
    }

    #[test]
    fn empty_record_is_insufficient() {
        let err = predict_improvement(&RobotRecord::named("ghost"), G).unwrap_err();
        assert_eq!(err, Error::InsufficientData { name: "ghost".into() });
    }

    #[test]
    fn bundled_catalogue_spans_the_expected_band() {
        let gains: Vec<f64> = bundled_catalogue()
            .iter()
            .filter_map(|r| predict_improvement(r, G).ok()?.improvement_percent())
            .collect();
        assert_eq!(gains.len(), 4);
        assert!(gains.iter().all(|&p| p >= 50.0));
        assert!(gains.iter().any(|&p| p > 160.0));
    }

    #[test]
    fn catalogue_errors_name_row_and_field() {
        let text = "name,mass_kg,f_max_n,d_m,energy_fraction,v_to_mps,source\n\
                    ok,1,2,3,0.5,,x\n\
                    bad,1,abc,3,0.5,,x\n";
        match parse_catalogue(text.as_bytes()) {
            Err(Error::Catalogue { row, field, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(field, "f_max_n");
            }
            other => panic!("{other:?}"),
        }
        let text = "name,mass_kg,f_max_n,d_m,energy_fraction,v_to_mps,source\nbig,,,,1.5,,\n";
        assert!(matches!(
            parse_catalogue(text.as_bytes()),
            Err(Error::Catalogue { row: 2, ref field, .. }) if field == "energy_fraction"
        ));
        let text = "name,mass\nx,1\n";
        assert!(matches!(parse_catalogue(text.as_bytes()), Err(Error::Catalogue { row: 1, .. })));
    }

    #[test]
    fn empty_catalogue_is_fine() {
        assert!(parse_catalogue("".as_bytes()).unwrap().is_empty());
        let header_only = "# nothing yet\nname,mass_kg,f_max_n,d_m,energy_fraction,v_to_mps,source\n";
        assert!(parse_catalogue(header_only.as_bytes()).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn energy_height_scales(e in 0.0f64..1e4, m in 1e-3f64..1e3, s in 0.1f64..10.0) {
            let h = height_from_energy(e, m, G).unwrap();
            prop_assert!((height_from_energy(s * e, m, G).unwrap() - s * h).abs() <= 1e-12 * (1.0 + s * h));
            prop_assert!((height_from_energy(e, s * m, G).unwrap() - h / s).abs() <= 1e-12 * (1.0 + h / s));
        }

        #[test]
        fn measured_never_beats_ideal(fraction in 0.01f64..=1.0, fw in 1.0f64..1000.0) {
            // a robot converting at most its stored energy into height
            let mut r = RobotRecord::named("r");
            r.mass_kg = Some(1.0);
            r.d_m = Some(0.1);
            r.f_max_n = Some(fw * G);
            r.energy_fraction = Some(fraction);
            let h = fraction * fw * 0.1 * 0.9;
            r.v_to_mps = Some((2.0 * G * h).sqrt());
            let p = predict_improvement(&r, G).unwrap();
            prop_assert!(p.normalized_measured.unwrap() <= p.normalized_ideal.unwrap() * (1.0 + 1e-12));
            prop_assert!(p.normalized_improved.unwrap() <= p.normalized_ideal.unwrap() * (1.0 + 1e-12));
        }
    }
}

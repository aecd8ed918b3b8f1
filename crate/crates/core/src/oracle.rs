//! Virtual-work validation of the closed-form charging forces.
//!
//! The oracle never touches the closed forms. It places each spring by its
//! attachment points on the joint coordinates, sums the elastic energy
//! `U = sum(k dL^2 / 2) + sum(k_r dphi^2 / 2)`, and differentiates `U` with
//! respect to the body displacement `y` by central differences. Under the
//! quasi-static assumption that derivative is the charging force.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{check_knee_angle, knee_angle_at, body_displacement, Joint, JointFrame, LinkageGeometry, Link, StrokeConfig};
use crate::springs::{SpringKind, SpringSpec};

/// Agreement required between a closed form and the oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

/// A point `fraction` of the way along `link` from its first-named joint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Attachment {
    pub link: Link,
    pub fraction: f64,
}

impl Attachment {
    pub fn new(link: Link, fraction: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::domain("attachment fraction", fraction, "[0, 1]"));
        }
        Ok(Attachment { link, fraction })
    }
}

/// A spring placed on explicit geometry, relaxed in the standing posture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpringInstance {
    Translational {
        ends: [Attachment; 2],
        stiffness: f64,
        natural_length: f64,
    },
    Rotational {
        joint: Joint,
        stiffness: f64,
        natural_angle: f64,
    },
}

impl SpringInstance {
    pub fn translational(
        geom: &LinkageGeometry,
        stroke: &StrokeConfig,
        first: Attachment,
        second: Attachment,
        stiffness: f64,
    ) -> Result<Self> {
        if first.link == second.link {
            return Err(Error::Configuration(format!(
                "both spring ends lie on link {:?}",
                first.link
            )));
        }
        check_stiffness(stiffness)?;
        let frame = geom.joint_frame(stroke.theta_ini())?;
        Ok(SpringInstance::Translational {
            ends: [first, second],
            stiffness,
            natural_length: span(&frame, &[first, second])?,
        })
    }

    pub fn rotational(geom: &LinkageGeometry, stroke: &StrokeConfig, joint: Joint, stiffness: f64) -> Result<Self> {
        check_stiffness(stiffness)?;
        let frame = geom.joint_frame(stroke.theta_ini())?;
        Ok(SpringInstance::Rotational {
            joint,
            stiffness,
            natural_angle: joint_angle(&frame, joint),
        })
    }

    /// Springs realizing `spec` on the linkage: `count` copies of the
    /// attachment model, rotational springs at knee `A`.
    pub fn from_spec(spec: &SpringSpec, geom: &LinkageGeometry, stroke: &StrokeConfig) -> Result<Vec<Self>> {
        let one = match spec.kind.attachments() {
            Some([(l1, f1), (l2, f2)]) => Self::translational(
                geom,
                stroke,
                Attachment::new(l1, f1)?,
                Attachment::new(l2, f2)?,
                spec.stiffness(),
            )?,
            None => Self::rotational(geom, stroke, Joint::A, spec.stiffness())?,
        };
        Ok(vec![one; spec.count() as usize])
    }

    /// Elastic energy at knee angle `theta`.
    pub fn energy(&self, geom: &LinkageGeometry, theta: f64) -> Result<f64> {
        let frame = geom.joint_frame(theta)?;
        Ok(match *self {
            SpringInstance::Translational {
                ends,
                stiffness,
                natural_length,
            } => {
                let stretch = span(&frame, &ends)? - natural_length;
                0.5 * stiffness * stretch * stretch
            }
            SpringInstance::Rotational {
                joint,
                stiffness,
                natural_angle,
            } => {
                let turn = joint_angle(&frame, joint) - natural_angle;
                0.5 * stiffness * turn * turn
            }
        })
    }
}

fn check_stiffness(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain("stiffness", k, "[0, inf)"));
    }
    Ok(())
}

fn span(frame: &JointFrame, ends: &[Attachment; 2]) -> Result<f64> {
    let p = frame.attachment_point(ends[0].link, ends[0].fraction)?;
    let q = frame.attachment_point(ends[1].link, ends[1].fraction)?;
    Ok(p.distance(q))
}

/// Interior angle between the two links meeting at `joint`.
fn joint_angle(frame: &JointFrame, joint: Joint) -> f64 {
    let (p, q) = match joint {
        Joint::A => (Joint::B, Joint::F),
        Joint::D => (Joint::B, Joint::F),
        Joint::B => (Joint::A, Joint::D),
        Joint::F => (Joint::A, Joint::D),
    };
    let origin = frame.joint(joint);
    let u = frame.joint(p) - origin;
    let v = frame.joint(q) - origin;
    // atan2 keeps full precision near 0 and pi, where acos does not
    (u.x * v.y - u.y * v.x).abs().atan2(u.dot(v))
}

/// Total elastic energy of `springs` at knee angle `theta`.
pub fn potential_energy(geom: &LinkageGeometry, springs: &[SpringInstance], theta: f64) -> Result<f64> {
    check_knee_angle(theta)?;
    springs.iter().map(|s| s.energy(geom, theta)).sum()
}

/// Default finite-difference step for the oracle, `d * 1e-6`.
pub fn default_step(geom: &LinkageGeometry) -> f64 {
    geom.characteristic_length() * 1e-6
}

/// Central-difference charging force `[U(y + h) - U(y - h)] / 2h` at the
/// displacement reached at `theta`.
pub fn oracle_force(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    springs: &[SpringInstance],
    theta: f64,
    step: f64,
) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain("oracle step", step, "(0, inf)"));
    }
    let y = body_displacement(geom, stroke, theta)?;
    let energy_at = |y: f64| -> Result<f64> { potential_energy(geom, springs, knee_angle_at(geom, stroke, y)?) };
    Ok((energy_at(y + step)? - energy_at(y - step)?) / (2.0 * step))
}

/// One Richardson level on top of [`oracle_force`]: `(4 D(h/2) - D(h)) / 3`.
pub fn richardson_force(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    springs: &[SpringInstance],
    theta: f64,
    step: f64,
) -> Result<f64> {
    let coarse = oracle_force(geom, stroke, springs, theta, step)?;
    let fine = oracle_force(geom, stroke, springs, theta, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Relative disagreement, floored so that forces which should both vanish
/// compare as equal.
pub fn relative_error(closed_form: f64, oracle: f64, scale: f64) -> f64 {
    (closed_form - oracle).abs() / oracle.abs().max(1e-9 * scale.abs()).max(f64::MIN_POSITIVE)
}

/// Closed form and oracle at one knee angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSample {
    pub theta: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub relative_error: f64,
}

/// Comparison of one spring's closed form against the oracle along a stroke.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub label: String,
    pub samples: Vec<OracleSample>,
}

impl OracleComparison {
    pub fn max_relative_error(&self) -> f64 {
        self.samples.iter().map(|s| s.relative_error).fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_relative_error() <= tolerance
    }

    /// Samples outside `tolerance`, as structured warnings.
    pub fn discrepancies(&self, tolerance: f64) -> Vec<Discrepancy> {
        self.samples
            .iter()
            .filter(|s| s.relative_error > tolerance)
            .map(|s| Discrepancy {
                label: self.label.clone(),
                theta_deg: s.theta.to_degrees(),
                closed_form: s.closed_form,
                oracle: s.oracle,
                relative_error: s.relative_error,
            })
            .collect()
    }
}

/// A closed form that disagrees with the oracle beyond tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub label: String,
    pub theta_deg: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub relative_error: f64,
}

/// `n` knee angles strictly inside the stroke.
pub fn interior_angles(stroke: &StrokeConfig, n: usize) -> Vec<f64> {
    let span = stroke.theta_ini() - stroke.theta_end();
    (1..=n)
        .map(|j| stroke.theta_end() + span * j as f64 / (n + 1) as f64)
        .collect()
}

fn force_scale(spec: &SpringSpec, geom: &LinkageGeometry) -> f64 {
    let d = geom.characteristic_length();
    match spec.kind {
        SpringKind::Rotational => spec.effective_stiffness() / d,
        _ => spec.effective_stiffness() * d,
    }
}

/// Compares `spec`'s closed-form force with the Richardson-extrapolated
/// oracle at `n` interior knee angles.
pub fn compare_with_oracle(
    spec: &SpringSpec,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    n: usize,
) -> Result<OracleComparison> {
    let springs = SpringInstance::from_spec(spec, geom, stroke)?;
    let step = default_step(geom);
    let scale = force_scale(spec, geom);
    let samples = interior_angles(stroke, n)
        .into_iter()
        .map(|theta| {
            let closed_form = spec.charging_force(geom, stroke, theta)?;
            let oracle = richardson_force(geom, stroke, &springs, theta, step)?;
            Ok(OracleSample {
                theta,
                closed_form,
                oracle,
                relative_error: relative_error(closed_form, oracle, scale),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleComparison {
        label: spec.kind.label(),
        samples,
    })
}

/// Both `asin` branches of model A next to the horizontal closed form and
/// the oracle, for positioning ratios where the branch choice matters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub gamma: f64,
    pub theta: f64,
    pub principal_branch: f64,
    pub resolved_branch: f64,
    pub horizontal: Option<f64>,
    pub oracle: f64,
}

impl BranchReport {
    pub fn principal_error(&self) -> f64 {
        relative_error(self.principal_branch, self.oracle, 0.0)
    }

    pub fn resolved_error(&self) -> f64 {
        relative_error(self.resolved_branch, self.oracle, 0.0)
    }
}

pub fn model_a_branch_report(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    k: f64,
    theta: f64,
) -> Result<BranchReport> {
    use crate::springs::{charging_force_horizontal, charging_force_model_a, charging_force_model_a_principal};
    let spec = SpringSpec::model_a(gamma, k)?;
    let springs = SpringInstance::from_spec(&spec, geom, stroke)?;
    Ok(BranchReport {
        gamma,
        theta,
        principal_branch: charging_force_model_a_principal(geom, stroke, gamma, k, theta)?,
        resolved_branch: charging_force_model_a(geom, stroke, gamma, k, theta)?,
        horizontal: charging_force_horizontal(geom, stroke, k, theta).ok(),
        oracle: richardson_force(geom, stroke, &springs, theta, default_step(geom))?,
    })
}

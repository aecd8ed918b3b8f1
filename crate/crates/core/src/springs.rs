//! Closed-form charging forces, deflections and stored energies for linear
//! springs mounted in a rhomboidal linkage.
//!
//! Translational springs join a point `K1` on link `BA` to a point `K2` on a
//! second link, placed by a positioning ratio `gamma`:
//!
//! * Model A: `K2` on `FD`, `|BK1| = |FK2| = gamma L`. `gamma = 0` is the
//!   vertical spring `B`-`F`, `gamma = 1` the horizontal spring `A`-`D`.
//! * Model B: `K2` on `DB`, `|BK1| = |DK2| = gamma L`.
//! * Model C: `K2` on `AF`, `|BK1| = |AK2| = gamma L`.
//!
//! Rotational springs are described by their total stiffness referred to the
//! knee angle, which covers springs at either knee, at the body or foot, or
//! any combination of them.
//!
//! All springs sit at their natural length in the standing posture
//! `theta_ini`. Deflections follow `dL = L_ini - L` (positive when the spring
//! shortens); charging forces are the external force on the body needed to
//! hold the linkage at `theta`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{LinkageGeometry, Link, Point, StrokeConfig};

/// Below this `cos(theta/2)` the knee is treated as fully extended.
const EXTENSION_EPS: f64 = 1e-15;

/// Attachment model of a spring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum SpringKind {
    ModelA { gamma: f64 },
    ModelB { gamma: f64 },
    ModelC { gamma: f64 },
    Vertical,
    Horizontal,
    Rotational,
}

impl SpringKind {
    pub fn gamma(&self) -> Option<f64> {
        match *self {
            SpringKind::ModelA { gamma }
            | SpringKind::ModelB { gamma }
            | SpringKind::ModelC { gamma } => Some(gamma),
            _ => None,
        }
    }

    pub fn is_rotational(&self) -> bool {
        matches!(self, SpringKind::Rotational)
    }

    /// Whether the closed form blows up at full extension (`theta = pi`).
    pub fn singular_at_full_extension(&self) -> bool {
        matches!(self, SpringKind::Horizontal | SpringKind::Rotational)
    }

    pub fn label(&self) -> String {
        match *self {
            SpringKind::ModelA { gamma } => format!("model-a(gamma={gamma})"),
            SpringKind::ModelB { gamma } => format!("model-b(gamma={gamma})"),
            SpringKind::ModelC { gamma } => format!("model-c(gamma={gamma})"),
            SpringKind::Vertical => "vertical".to_owned(),
            SpringKind::Horizontal => "horizontal".to_owned(),
            SpringKind::Rotational => "rotational".to_owned(),
        }
    }

    fn validate(&self) -> Result<()> {
        match self.gamma() {
            Some(gamma) => check_gamma(gamma),
            None => Ok(()),
        }
    }

    /// Translational attachments `(K1, K2)` as `(link, fraction)` pairs.
    /// `None` for rotational springs.
    pub fn attachments(&self) -> Option<[(Link, f64); 2]> {
        match *self {
            SpringKind::ModelA { gamma } => Some([(Link::BA, gamma), (Link::FD, gamma)]),
            SpringKind::ModelB { gamma } => Some([(Link::BA, gamma), (Link::BD, 1.0 - gamma)]),
            SpringKind::ModelC { gamma } => Some([(Link::BA, gamma), (Link::AF, gamma)]),
            SpringKind::Vertical => Some([(Link::BA, 0.0), (Link::FD, 0.0)]),
            SpringKind::Horizontal => Some([(Link::BA, 1.0), (Link::FD, 1.0)]),
            SpringKind::Rotational => None,
        }
    }

    /// Charging force at unit stiffness.
    pub fn unit_force(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<f64> {
        self.force(geom, stroke, 1.0, theta)
    }

    fn force(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, k: f64, theta: f64) -> Result<f64> {
        match *self {
            SpringKind::ModelA { gamma } => charging_force_model_a(geom, stroke, gamma, k, theta),
            SpringKind::ModelB { gamma } => charging_force_model_b(geom, stroke, gamma, k, theta),
            SpringKind::ModelC { gamma } => charging_force_model_c(geom, stroke, gamma, k, theta),
            SpringKind::Vertical => charging_force_vertical(geom, stroke, k, theta),
            SpringKind::Horizontal => charging_force_horizontal(geom, stroke, k, theta),
            SpringKind::Rotational => charging_force_rotational(geom, stroke, k, theta),
        }
    }

    /// Spring length at `theta` (translational springs only).
    pub fn spring_length(&self, geom: &LinkageGeometry, theta: f64) -> Option<f64> {
        let d = geom.characteristic_length();
        match *self {
            SpringKind::ModelA { gamma } => Some(spring_length_model_a(geom, gamma, theta)),
            SpringKind::ModelB { gamma } => Some(spring_length_model_b(geom, gamma, theta)),
            SpringKind::ModelC { gamma } => Some(spring_length_model_c(geom, gamma, theta)),
            SpringKind::Vertical => Some(d * (theta / 2.0).sin()),
            SpringKind::Horizontal => Some(d * (theta / 2.0).cos()),
            SpringKind::Rotational => None,
        }
    }

    /// Deflection from the natural state: `L_ini - L` for translational
    /// springs, `theta_ini - theta` for rotational ones.
    pub fn deflection(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> f64 {
        match self.spring_length(geom, theta) {
            Some(length) => self.spring_length(geom, stroke.theta_ini()).unwrap_or(0.0) - length,
            None => stroke.theta_ini() - theta,
        }
    }
}

/// A spring, or `count` identical springs, in one attachment model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringSpec {
    pub kind: SpringKind,
    /// N/m for translational springs, N m/rad for rotational ones.
    stiffness: f64,
    count: u32,
}

impl SpringSpec {
    pub fn new(kind: SpringKind, stiffness: f64) -> Result<Self> {
        kind.validate()?;
        check_stiffness(stiffness)?;
        Ok(SpringSpec {
            kind,
            stiffness,
            count: 1,
        })
    }

    pub fn vertical(k: f64) -> Result<Self> {
        Self::new(SpringKind::Vertical, k)
    }

    pub fn horizontal(k: f64) -> Result<Self> {
        Self::new(SpringKind::Horizontal, k)
    }

    pub fn rotational(k_r: f64) -> Result<Self> {
        Self::new(SpringKind::Rotational, k_r)
    }

    pub fn model_a(gamma: f64, k: f64) -> Result<Self> {
        Self::new(SpringKind::ModelA { gamma }, k)
    }

    pub fn model_b(gamma: f64, k: f64) -> Result<Self> {
        Self::new(SpringKind::ModelB { gamma }, k)
    }

    pub fn model_c(gamma: f64, k: f64) -> Result<Self> {
        Self::new(SpringKind::ModelC { gamma }, k)
    }

    /// `count` identical springs, each of the current stiffness.
    pub fn with_count(mut self, count: u32) -> Result<Self> {
        if count == 0 {
            return Err(Error::Configuration("spring count must be at least 1".into()));
        }
        self.count = count;
        Ok(self)
    }

    pub fn with_stiffness(self, stiffness: f64) -> Result<Self> {
        Self::new(self.kind, stiffness)?.with_count(self.count)
    }

    pub fn stiffness(&self) -> f64 {
        self.stiffness
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    /// Parallel springs fold into one of `count * stiffness`.
    pub fn effective_stiffness(&self) -> f64 {
        f64::from(self.count) * self.stiffness
    }

    pub fn charging_force(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<f64> {
        self.kind.force(geom, stroke, self.effective_stiffness(), theta)
    }

    /// Elastic energy held by the spring(s) at `theta`, from the deflection.
    pub fn stored_energy(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<f64> {
        stroke.check(theta)?;
        let dl = self.kind.deflection(geom, stroke, theta);
        Ok(0.5 * self.effective_stiffness() * dl * dl)
    }

    pub fn state(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<SpringState> {
        let charging_force = self.charging_force(geom, stroke, theta)?;
        let deflection = self.kind.deflection(geom, stroke, theta);
        let length = self.kind.spring_length(geom, theta);
        let spring_angle = match (self.kind, length) {
            (SpringKind::ModelA { gamma }, Some(lc)) => Some(spring_angle_model_a(geom, gamma, theta, lc)),
            (SpringKind::ModelB { gamma }, Some(lc)) => Some(spring_angle_model_b(geom, gamma, theta, lc)),
            (SpringKind::ModelC { gamma }, Some(lc)) => Some(spring_angle_model_c(geom, gamma, theta, lc)),
            _ => None,
        };
        Ok(SpringState {
            theta,
            length,
            deflection,
            spring_angle,
            charging_force,
            restoring: self.effective_stiffness() * deflection,
            extending: deflection < 0.0,
        })
    }
}

/// Snapshot of one spring at one knee angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpringState {
    pub theta: f64,
    /// Current spring length `L_c` (translational springs).
    pub length: Option<f64>,
    /// `L_c,ini - L_c`, or `theta_ini - theta` for rotational springs.
    pub deflection: f64,
    /// Angle between the spring and link `BA` (models A, B and C).
    pub spring_angle: Option<f64>,
    pub charging_force: f64,
    /// Spring force `k dL` or torque `k_r dtheta`; negative while stretched.
    pub restoring: f64,
    /// The spring lengthens during compression of the linkage.
    pub extending: bool,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::domain("positioning ratio", gamma, "[0, 1]"));
    }
    Ok(())
}

fn check_stiffness(k: f64) -> Result<()> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain("stiffness", k, "[0, inf)"));
    }
    Ok(())
}

fn check_inputs(stroke: &StrokeConfig, k: f64, theta: f64) -> Result<()> {
    check_stiffness(k)?;
    stroke.check(theta)
}

/// `F_c = k d (sin(theta_ini/2) - sin(theta/2))`; identical to `k y`.
pub fn charging_force_vertical(geom: &LinkageGeometry, stroke: &StrokeConfig, k: f64, theta: f64) -> Result<f64> {
    check_inputs(stroke, k, theta)?;
    let d = geom.characteristic_length();
    Ok(k * d * ((stroke.theta_ini() / 2.0).sin() - (theta / 2.0).sin()))
}

/// `F_c = k d tan(theta/2) (cos(theta/2) - cos(theta_ini/2))`, for a spring
/// spanning the knees. Singular when the stroke starts fully upright.
pub fn charging_force_horizontal(geom: &LinkageGeometry, stroke: &StrokeConfig, k: f64, theta: f64) -> Result<f64> {
    check_inputs(stroke, k, theta)?;
    if stroke.theta_ini() >= PI {
        return Err(Error::singular("horizontal spring force", stroke.theta_ini()));
    }
    let d = geom.characteristic_length();
    let half = theta / 2.0;
    Ok(k * d * half.tan() * (half.cos() - (stroke.theta_ini() / 2.0).cos()))
}

/// Knee angle of peak horizontal-spring charging force,
/// `2 acos(cbrt(cos(theta_ini/2)))`.
pub fn peak_force_angle_horizontal(theta_ini: f64) -> Result<f64> {
    if !(theta_ini > 0.0 && theta_ini < PI) {
        return Err(Error::domain("theta_ini", theta_ini, "(0, pi)"));
    }
    Ok(2.0 * (theta_ini / 2.0).cos().cbrt().acos())
}

/// `F_c = 2 k_r (theta_ini - theta) / (d cos(theta/2))`, with `k_r` the total
/// rotational stiffness referred to the knee angle.
pub fn charging_force_rotational(geom: &LinkageGeometry, stroke: &StrokeConfig, k_r: f64, theta: f64) -> Result<f64> {
    check_inputs(stroke, k_r, theta)?;
    let c = (theta / 2.0).cos();
    if c <= EXTENSION_EPS {
        return Err(Error::singular("rotational spring force", theta));
    }
    Ok(2.0 * k_r * (stroke.theta_ini() - theta) / (geom.characteristic_length() * c))
}

pub fn spring_length_model_a(geom: &LinkageGeometry, gamma: f64, theta: f64) -> f64 {
    let p = 1.0 - 2.0 * gamma;
    0.5 * geom.characteristic_length() * (p * (p - 2.0 * theta.cos()) + 1.0).max(0.0).sqrt()
}

pub fn spring_length_model_b(geom: &LinkageGeometry, gamma: f64, theta: f64) -> f64 {
    let r = 2.0 * gamma * (gamma - 1.0) * (1.0 - theta.cos()) + 1.0;
    0.5 * geom.characteristic_length() * r.max(0.0).sqrt()
}

pub fn spring_length_model_c(geom: &LinkageGeometry, gamma: f64, theta: f64) -> f64 {
    let r = 2.0 * gamma * (gamma - 1.0) * (1.0 + theta.cos()) + 1.0;
    0.5 * geom.characteristic_length() * r.max(0.0).sqrt()
}

/// Angle between link `BA` (from `B` towards `A`) and the spring (from `K1`
/// towards `K2`), taken from joint coordinates. A spring of zero length
/// takes the direction it collapses along.
fn geometric_spring_angle(geom: &LinkageGeometry, kind: SpringKind, theta: f64) -> f64 {
    let ends = |t: f64| -> (Point, Point, Point) {
        let frame = geom.joint_frame(t).expect("knee angle checked by caller");
        let [(l1, f1), (l2, f2)] = kind.attachments().expect("translational spring");
        let k1 = frame.attachment_point(l1, f1).expect("fraction in range");
        let k2 = frame.attachment_point(l2, f2).expect("fraction in range");
        (frame.a - frame.b, k1, k2)
    };
    let (link, k1, k2) = ends(theta);
    let mut spring = k2 - k1;
    if spring.norm() <= 1e-12 * geom.link_length() {
        let nudged = if theta < FRAC_PI_2 { theta + 1e-7 } else { theta - 1e-7 };
        let (_, k1, k2) = ends(nudged);
        spring = k2 - k1;
    }
    let cos = link.dot(spring) / (link.norm() * spring.norm());
    cos.clamp(-1.0, 1.0).acos()
}

/// Picks the `asin` branch that agrees with the coordinates: `asin` only
/// returns acute angles but the spring may sit at an obtuse one.
fn resolve_branch(principal: f64, geometric: f64) -> f64 {
    if principal.is_nan() {
        return geometric;
    }
    if geometric > FRAC_PI_2 {
        PI - principal
    } else {
        principal
    }
}

/// `phi_1 = asin(d sin(theta) / (2 L_c))`, branch resolved geometrically.
pub fn spring_angle_model_a(geom: &LinkageGeometry, gamma: f64, theta: f64, length: f64) -> f64 {
    let principal = (geom.characteristic_length() * theta.sin() / (2.0 * length)).clamp(-1.0, 1.0).asin();
    resolve_branch(
        principal,
        geometric_spring_angle(geom, SpringKind::ModelA { gamma }, theta),
    )
}

/// `phi_2 = asin(L_DK2 sin(theta) / L_c)` on the principal branch.
pub fn spring_angle_model_b(geom: &LinkageGeometry, gamma: f64, theta: f64, length: f64) -> f64 {
    (gamma * geom.link_length() * theta.sin() / length).clamp(-1.0, 1.0).asin()
}

/// `phi_3 = asin(L_AK2 sin(theta) / L_c)`, branch resolved geometrically.
pub fn spring_angle_model_c(geom: &LinkageGeometry, gamma: f64, theta: f64, length: f64) -> f64 {
    let principal = (gamma * geom.link_length() * theta.sin() / length).clamp(-1.0, 1.0).asin();
    resolve_branch(
        principal,
        geometric_spring_angle(geom, SpringKind::ModelC { gamma }, theta),
    )
}

fn model_deflection(
    length: fn(&LinkageGeometry, f64, f64) -> f64,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    theta: f64,
) -> f64 {
    length(geom, gamma, stroke.theta_ini()) - length(geom, gamma, theta)
}

/// Model A (links `BA` and `FD`):
/// `F_c = k dL / sin(theta) * 2 sin(theta/2) [(1-g) sin(theta/2 + phi) cos(theta/2)
///        + g cos(theta/2 + phi) sin(theta/2)]`.
pub fn charging_force_model_a(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    k: f64,
    theta: f64,
) -> Result<f64> {
    model_a_force(geom, stroke, gamma, k, theta, true)
}

/// Model A evaluated on the principal `asin` branch only. Kept for reporting
/// how far the unresolved branch strays near `gamma = 1`.
pub fn charging_force_model_a_principal(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    k: f64,
    theta: f64,
) -> Result<f64> {
    model_a_force(geom, stroke, gamma, k, theta, false)
}

fn model_a_force(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    k: f64,
    theta: f64,
    resolve: bool,
) -> Result<f64> {
    check_gamma(gamma)?;
    check_inputs(stroke, k, theta)?;
    let dl = model_deflection(spring_length_model_a, geom, stroke, gamma, theta);
    if dl == 0.0 {
        return Ok(0.0);
    }
    let (s, c) = (theta / 2.0).sin_cos();
    if c <= EXTENSION_EPS {
        return Err(Error::singular("model A spring force", theta));
    }
    let length = spring_length_model_a(geom, gamma, theta);
    let phi = if resolve {
        spring_angle_model_a(geom, gamma, theta, length)
    } else {
        (geom.characteristic_length() * theta.sin() / (2.0 * length)).clamp(-1.0, 1.0).asin()
    };
    let half = theta / 2.0;
    // 2 sin(theta/2) / sin(theta) = 1 / cos(theta/2), finite at theta = 0
    Ok(k * dl / c * ((1.0 - gamma) * (half + phi).sin() * c + gamma * (half + phi).cos() * s))
}

/// Model B (links `BA` and `DB`):
/// `F_c = 2 k dL g (g - 1) L sin(theta/2) / L_c`, equivalently
/// `k dL (g - 1) sin(phi_2) / cos(theta/2)`.
pub fn charging_force_model_b(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    k: f64,
    theta: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    check_inputs(stroke, k, theta)?;
    let dl = model_deflection(spring_length_model_b, geom, stroke, gamma, theta);
    if dl == 0.0 {
        return Ok(0.0);
    }
    let length = spring_length_model_b(geom, gamma, theta);
    if length <= 0.0 {
        return Err(Error::singular("model B spring force", theta));
    }
    Ok(2.0 * k * dl * gamma * (gamma - 1.0) * geom.link_length() * (theta / 2.0).sin() / length)
}

/// Model C (links `BA` and `AF`):
/// `F_c = k dL / sin(theta) * sin(theta/2) [sin(phi + theta/2) cos(theta/2)
///        + (2g - 1) cos(phi + theta/2) sin(theta/2)]`.
pub fn charging_force_model_c(
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    gamma: f64,
    k: f64,
    theta: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    check_inputs(stroke, k, theta)?;
    let dl = model_deflection(spring_length_model_c, geom, stroke, gamma, theta);
    if dl == 0.0 {
        return Ok(0.0);
    }
    let (s, c) = (theta / 2.0).sin_cos();
    if c <= EXTENSION_EPS {
        return Err(Error::singular("model C spring force", theta));
    }
    let length = spring_length_model_c(geom, gamma, theta);
    let phi = spring_angle_model_c(geom, gamma, theta, length);
    let half = theta / 2.0;
    // sin(theta/2) / sin(theta) = 1 / (2 cos(theta/2))
    Ok(k * dl / (2.0 * c) * ((phi + half).sin() * c + (2.0 * gamma - 1.0) * (phi + half).cos() * s))
}

fn check_energy_angles(theta_ini: f64, theta_end: f64, open_top: bool) -> Result<()> {
    let top_ok = if open_top { theta_ini < PI } else { theta_ini <= PI };
    if !(theta_ini > 0.0 && top_ok) {
        return Err(Error::domain("theta_ini", theta_ini, if open_top { "(0, pi)" } else { "(0, pi]" }));
    }
    if !(0.0..=theta_ini).contains(&theta_end) {
        return Err(Error::domain("theta_end", theta_end, "[0, theta_ini]"));
    }
    Ok(())
}

fn check_budget(f_max: f64, d: f64) -> Result<()> {
    if !(f_max.is_finite() && f_max >= 0.0) {
        return Err(Error::domain("peak force", f_max, "[0, inf)"));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::domain("characteristic length", d, "(0, inf)"));
    }
    Ok(())
}

/// Energy of a vertical spring charged from `theta_ini` to `theta` whose
/// force there equals `f_max`: `f_max d / 2 (sin(theta_ini/2) - sin(theta/2))`.
pub fn epe_vertical(theta_ini: f64, theta: f64, f_max: f64, d: f64) -> Result<f64> {
    check_energy_angles(theta_ini, theta, false)?;
    check_budget(f_max, d)?;
    Ok(0.5 * f_max * d * ((theta_ini / 2.0).sin() - (theta / 2.0).sin()))
}

/// Energy of a horizontal spring charged from `theta_ini` to `theta_end`
/// with its stiffness sized so the peak charging force equals `f_max`.
///
/// The peak sits at `theta_ES,P` when the stroke passes it, else at
/// `theta_end`:
///
/// ```text
/// f_max d (c_end - c_ini)^2 / (2 tan(t_p/2) (cos(t_p/2) - c_ini))   theta_end <= t_p
/// f_max d (c_end - c_ini)   / (2 tan(theta_end/2))                 theta_end >= t_p
/// ```
/// with `c_x = cos(theta_x / 2)`.
pub fn epe_horizontal(theta_ini: f64, theta_end: f64, f_max: f64, d: f64) -> Result<f64> {
    check_energy_angles(theta_ini, theta_end, true)?;
    check_budget(f_max, d)?;
    if theta_end == theta_ini {
        return Ok(0.0);
    }
    let c_ini = (theta_ini / 2.0).cos();
    let c_end = (theta_end / 2.0).cos();
    let peak = peak_force_angle_horizontal(theta_ini)?;
    let normalized = if theta_end <= peak {
        let c_peak = (peak / 2.0).cos();
        (c_end - c_ini).powi(2) / (2.0 * (peak / 2.0).tan() * (c_peak - c_ini))
    } else {
        (c_end - c_ini) / (2.0 * (theta_end / 2.0).tan())
    };
    Ok(f_max * d * normalized)
}

/// Energy of a rotational spring whose charging force peaks at `f_max` at the
/// end of the stroke: `f_max d (theta_ini - theta_end) cos(theta_end/2) / 4`.
pub fn epe_rotational(theta_ini: f64, theta_end: f64, f_max: f64, d: f64) -> Result<f64> {
    check_energy_angles(theta_ini, theta_end, true)?;
    check_budget(f_max, d)?;
    Ok(0.25 * f_max * d * (theta_ini - theta_end) * (theta_end / 2.0).cos())
}

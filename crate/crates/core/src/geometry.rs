//! Planar kinematics of the symmetric rhomboidal four-bar linkage.
//!
//! Four bars of equal length `L` meet at the body joint `B`, the foot joint
//! `F` and the two knee joints `A` (left) and `D` (right). The foot sits at
//! the origin and the body moves along the vertical axis through it. The knee
//! angle `theta` is the interior angle at `A` (equal to the one at `D`):
//! `pi` is fully extended and `0` fully depressed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane of the linkage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Point a `fraction` of the way from `self` to `other`.
    pub fn lerp(self, other: Point, fraction: f64) -> Point {
        Point {
            x: self.x + fraction * (other.x - self.x),
            y: self.y + fraction * (other.y - self.y),
        }
    }


    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;

    fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }
}

/// Revolute joints of the linkage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Joint {
    /// Left knee.
    A,
    /// Body.
    B,
    /// Right knee.
    D,
    /// Foot.
    F,
}

/// The four links, named from the joint that fractions are measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Link {
    BA,
    BD,
    AF,
    FD,
}

impl Link {
    pub const ALL: [Link; 4] = [Link::BA, Link::BD, Link::AF, Link::FD];

    /// `(first, second)` joint; fractions run from `first` towards `second`.
    pub fn joints(self) -> (Joint, Joint) {
        match self {
            Link::BA => (Joint::B, Joint::A),
            Link::BD => (Joint::B, Joint::D),
            Link::AF => (Joint::A, Joint::F),
            Link::FD => (Joint::F, Joint::D),
        }
    }
}

/// Link and characteristic length of a rhomboidal linkage (`d = 2L`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkageGeometry {
    link_length: f64,
}

impl LinkageGeometry {
    pub fn new(link_length: f64) -> Result<Self> {
        if !(link_length.is_finite() && link_length > 0.0) {
            return Err(Error::domain("link length", link_length, "(0, inf)"));
        }
        Ok(LinkageGeometry { link_length })
    }

    pub fn from_characteristic_length(d: f64) -> Result<Self> {
        Self::new(d / 2.0)
    }

    /// Length `L` of each of the four bars.
    pub fn link_length(&self) -> f64 {
        self.link_length
    }

    /// Maximum body-to-foot travel `d = 2L`.
    pub fn characteristic_length(&self) -> f64 {
        2.0 * self.link_length
    }

    /// Joint coordinates at knee angle `theta`.
    pub fn joint_frame(&self, theta: f64) -> Result<JointFrame> {
        check_knee_angle(theta)?;
        let l = self.link_length;
        let (s, c) = (theta / 2.0).sin_cos();
        Ok(JointFrame {
            theta,
            a: Point::new(-l * c, l * s),
            b: Point::new(0.0, 2.0 * l * s),
            d: Point::new(l * c, l * s),
            f: Point::ORIGIN,
        })
    }
}

pub(crate) fn check_knee_angle(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain("knee angle", theta, "[0, pi]"));
    }
    Ok(())
}

/// Standing and charged knee angles bounding one compression stroke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrokeConfig {
    theta_ini: f64,
    theta_end: f64,
}

impl StrokeConfig {
    /// Angles in radians; requires `0 <= theta_end < theta_ini <= pi`.
    pub fn new(theta_ini: f64, theta_end: f64) -> Result<Self> {
        if !(theta_ini > 0.0 && theta_ini <= PI) {
            return Err(Error::domain("theta_ini", theta_ini, "(0, pi]"));
        }
        if !(theta_end >= 0.0 && theta_end < theta_ini) {
            return Err(Error::domain("theta_end", theta_end, "[0, theta_ini)"));
        }
        Ok(StrokeConfig {
            theta_ini,
            theta_end,
        })
    }

    pub fn from_degrees(theta_ini_deg: f64, theta_end_deg: f64) -> Result<Self> {
        Self::new(theta_ini_deg.to_radians(), theta_end_deg.to_radians())
    }

    pub fn theta_ini(&self) -> f64 {
        self.theta_ini
    }

    pub fn theta_end(&self) -> f64 {
        self.theta_end
    }

    pub fn contains(&self, theta: f64) -> bool {
        (self.theta_end..=self.theta_ini).contains(&theta)
    }

    pub(crate) fn check(&self, theta: f64) -> Result<()> {
        if self.contains(theta) {
            Ok(())
        } else {
            Err(Error::domain("knee angle", theta, "[theta_end, theta_ini]"))
        }
    }

    /// Same stroke with the standing angle capped at `max_theta_ini`.
    pub fn capped(&self, max_theta_ini: f64) -> Result<Self> {
        Self::new(self.theta_ini.min(max_theta_ini), self.theta_end)
    }

    /// `n` knee angles evenly spaced from `theta_ini` down to `theta_end`.
    pub fn knee_angles(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.theta_ini],
            _ => {
                let span = self.theta_ini - self.theta_end;
                let last = (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        if i == n - 1 {
                            self.theta_end
                        } else {
                            self.theta_ini - span * i as f64 / last
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Body displacement from the standing posture,
/// `y = d (sin(theta_ini/2) - sin(theta/2))`.
pub fn body_displacement(geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<f64> {
    stroke.check(theta)?;
    Ok(geom.characteristic_length() * ((stroke.theta_ini / 2.0).sin() - (theta / 2.0).sin()))
}

/// Knee angle reached after a body displacement `y`; the inverse of
/// [`body_displacement`]. Negative `y` (lifting above the standing posture)
/// is allowed as long as the linkage stays within `[0, pi]`.
pub fn knee_angle_at(geom: &LinkageGeometry, stroke: &StrokeConfig, y: f64) -> Result<f64> {
    let arg = (stroke.theta_ini / 2.0).sin() - y / geom.characteristic_length();
    if !(0.0..=1.0).contains(&arg) {
        return Err(Error::domain("body displacement", y, "knee angle within [0, pi]"));
    }
    Ok(2.0 * arg.asin())
}

/// Joint coordinates of the linkage at one knee angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointFrame {
    pub theta: f64,
    pub a: Point,
    pub b: Point,
    pub d: Point,
    pub f: Point,
}

impl JointFrame {
    pub fn joint(&self, joint: Joint) -> Point {
        match joint {
            Joint::A => self.a,
            Joint::B => self.b,
            Joint::D => self.d,
            Joint::F => self.f,
        }
    }

    /// Point on `link` a `fraction` of its length from its first-named joint.
    pub fn attachment_point(&self, link: Link, fraction: f64) -> Result<Point> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(Error::domain("attachment fraction", fraction, "[0, 1]"));
        }
        let (from, to) = link.joints();
        Ok(self.joint(from).lerp(self.joint(to), fraction))
    }

    pub fn link_length(&self, link: Link) -> f64 {
        let (from, to) = link.joints();
        self.joint(from).distance(self.joint(to))
    }

    /// Body-to-foot distance `|BF|`.
    pub fn body_height(&self) -> f64 {
        self.b.distance(self.f)
    }

    /// Knee-to-knee distance `|AD|`.
    pub fn knee_span(&self) -> f64 {
        self.a.distance(self.d)
    }
}

//! Charging profiles, stiffness sizing, superposition and design sweeps.
//!
//! Profiles are sampled uniformly in the knee angle from `theta_ini` down to
//! `theta_end`. Stored energy accumulates by the trapezoidal rule over the
//! body displacement of each sample.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{body_displacement, LinkageGeometry, StrokeConfig};
use crate::springs::{SpringKind, SpringSpec};

/// Sample count used when none is given.
pub const DEFAULT_POINTS: usize = 1000;

/// Latest standing angle for profiles whose closed form is singular at
/// full extension, in degrees.
pub const NEAR_SINGULAR_START_DEG: f64 = 179.9;

/// Golden-section tolerance on the composition stiffness ratio.
pub const RATIO_TOLERANCE: f64 = 1e-6;

/// Unit-stiffness peaks below `PEAK_FLOOR * d` count as a spring that never
/// loads the linkage.
const PEAK_FLOOR: f64 = 1e-12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Stroke actually traversed by a spring family: standing angles are capped
/// just short of full extension when the closed form is singular there.
pub fn effective_stroke(singular_at_full_extension: bool, stroke: &StrokeConfig) -> Result<StrokeConfig> {
    if singular_at_full_extension {
        stroke.capped(NEAR_SINGULAR_START_DEG.to_radians())
    } else {
        Ok(*stroke)
    }
}

/// Scale-free stiffness: `k d / F_max`, or `k_r / (F_max d)` for rotational
/// springs.
pub fn normalized_stiffness(kind: &SpringKind, stiffness: f64, d: f64, f_max: f64) -> f64 {
    if kind.is_rotational() {
        stiffness / (f_max * d)
    } else {
        stiffness * d / f_max
    }
}

/// One point of a charging profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub theta: f64,
    pub y: f64,
    pub force: f64,
    pub energy: f64,
}

/// Force and cumulative stored energy along one stroke.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingProfile {
    pub samples: Vec<ProfileSample>,
    pub f_max: f64,
    pub d: f64,
}

impl ChargingProfile {
    pub fn final_energy(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.energy)
    }

    /// Stored energy over that of the ideal constant-force spring.
    pub fn normalized_energy(&self) -> f64 {
        self.final_energy() / (self.f_max * self.d)
    }

    /// Sample carrying the largest force.
    pub fn peak(&self) -> Option<&ProfileSample> {
        self.samples.iter().max_by(|a, b| a.force.total_cmp(&b.force))
    }

    pub fn peak_force(&self) -> f64 {
        self.peak().map_or(0.0, |s| s.force)
    }

    /// Coefficient of variation of the force, leaving out the standing
    /// sample where every spring is still relaxed.
    pub fn force_variation(&self) -> f64 {
        let forces: Vec<f64> = self.samples.iter().skip(1).map(|s| s.force).collect();
        coefficient_of_variation(&forces)
    }
}

/// Population standard deviation over the mean; zero for an empty or
/// all-zero input.
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean.abs()
}

/// Samples `force_fn` at `n_points` knee angles and accumulates the stored
/// energy. `f_max` only sets the normalization of the result.
pub fn integrate_profile<F>(
    force_fn: F,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    f_max: f64,
    n_points: usize,
) -> Result<ChargingProfile>
where
    F: Fn(f64) -> Result<f64>,
{
    if n_points < 2 {
        return Err(Error::Configuration(format!("need at least 2 profile points, got {n_points}")));
    }
    if !(f_max.is_finite() && f_max > 0.0) {
        return Err(Error::domain("F_max", f_max, "(0, inf)"));
    }
    let mut samples: Vec<ProfileSample> = Vec::with_capacity(n_points);
    for theta in stroke.knee_angles(n_points) {
        let y = body_displacement(geom, stroke, theta)?;
        let force = force_fn(theta)?;
        let energy = match samples.last() {
            Some(prev) => prev.energy + 0.5 * (force + prev.force) * (y - prev.y),
            None => 0.0,
        };
        samples.push(ProfileSample {
            theta,
            y,
            force,
            energy,
        });
    }
    Ok(ChargingProfile {
        samples,
        f_max,
        d: geom.characteristic_length(),
    })
}

/// Profile of a spring with its stiffness as given.
pub fn spring_profile(
    spec: &SpringSpec,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    f_max: f64,
    n_points: usize,
) -> Result<ChargingProfile> {
    integrate_profile(|t| spec.charging_force(geom, stroke, t), geom, stroke, f_max, n_points)
}

/// Golden-section maximization of `f` on `[a, b]`.
fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Largest force over the stroke as `(theta, force)`: the best of
/// `n_points` samples, refined between its neighbours.
pub fn peak_force<F>(force_fn: F, stroke: &StrokeConfig, n_points: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let thetas = stroke.knee_angles(n_points.max(3));
    let forces = thetas.iter().map(|&t| force_fn(t)).collect::<Result<Vec<_>>>()?;
    let (i, &grid_peak) = forces
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least three samples");
    let hi = thetas[i.saturating_sub(1)];
    let lo = thetas[(i + 1).min(thetas.len() - 1)];
    let (theta, refined) = golden_max(&force_fn, lo, hi, 1e-12)?;
    Ok(if refined > grid_peak {
        (theta, refined)
    } else {
        (thetas[i], grid_peak)
    })
}

/// Stiffness that makes the peak charging force over the stroke equal
/// `f_max`. For rotational springs this is `k_r` about the knee angle.
pub fn solve_stiffness(
    kind: &SpringKind,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    f_max: f64,
    n_points: usize,
) -> Result<f64> {
    if !(f_max.is_finite() && f_max > 0.0) {
        return Err(Error::domain("F_max", f_max, "(0, inf)"));
    }
    let (_, peak) = peak_force(|t| kind.unit_force(geom, stroke, t), stroke, n_points)?;
    if peak.is_nan() || peak <= PEAK_FLOOR * geom.characteristic_length() {
        return Err(Error::Unsolvable(format!(
            "{} never loads the linkage over this stroke",
            kind.label()
        )));
    }
    Ok(f_max / peak)
}

/// A spring family sized to `f_max`, with its profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizedSpring {
    pub spec: SpringSpec,
    pub stroke: StrokeConfig,
    pub normalized_stiffness: f64,
    pub profile: ChargingProfile,
}

/// Sizes `count` identical springs of `kind` so the stroke peaks at `f_max`
/// and integrates the resulting profile. The stroke is capped first for
/// families singular at full extension.
pub fn size_spring(
    kind: SpringKind,
    count: u32,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    f_max: f64,
    n_points: usize,
) -> Result<SizedSpring> {
    let stroke = effective_stroke(kind.singular_at_full_extension(), stroke)?;
    let total = solve_stiffness(&kind, geom, &stroke, f_max, n_points)?;
    let spec = SpringSpec::new(kind, total / count.max(1) as f64)?.with_count(count)?;
    let profile = spring_profile(&spec, geom, &stroke, f_max, n_points)?;
    Ok(SizedSpring {
        spec,
        stroke,
        normalized_stiffness: normalized_stiffness(&kind, total, geom.characteristic_length(), f_max),
        profile,
    })
}

/// Several springs acting on one linkage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSpring {
    pub components: Vec<SpringSpec>,
    pub label: String,
}

impl CompositeSpring {
    pub fn new(components: Vec<SpringSpec>, label: impl Into<String>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Configuration("a composite needs at least one spring".into()));
        }
        Ok(CompositeSpring {
            components,
            label: label.into(),
        })
    }

    pub fn singular_at_full_extension(&self) -> bool {
        self.components.iter().any(|c| c.kind.singular_at_full_extension())
    }

    /// Every stiffness multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.with_stiffness(c.stiffness() * factor))
            .collect::<Result<Vec<_>>>()?;
        Ok(CompositeSpring {
            components,
            label: self.label.clone(),
        })
    }

    pub fn force(&self, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<f64> {
        superpose(self, geom, stroke, theta)
    }

    pub fn profile(
        &self,
        geom: &LinkageGeometry,
        stroke: &StrokeConfig,
        f_max: f64,
        n_points: usize,
    ) -> Result<ChargingProfile> {
        integrate_profile(|t| self.force(geom, stroke, t), geom, stroke, f_max, n_points)
    }

    /// Scales the composite so its peak over the (capped) stroke is `f_max`.
    /// Relative stiffnesses are kept.
    pub fn sized(
        &self,
        geom: &LinkageGeometry,
        stroke: &StrokeConfig,
        f_max: f64,
        n_points: usize,
    ) -> Result<SizedComposite> {
        let stroke = effective_stroke(self.singular_at_full_extension(), stroke)?;
        let (_, peak) = peak_force(|t| self.force(geom, &stroke, t), &stroke, n_points)?;
        if peak.is_nan() || peak <= 0.0 {
            return Err(Error::Unsolvable(format!("{} never loads the linkage", self.label)));
        }
        let composite = self.scaled(f_max / peak)?;
        let profile = composite.profile(geom, &stroke, f_max, n_points)?;
        Ok(SizedComposite {
            composite,
            stroke,
            profile,
        })
    }
}

/// A composite scaled to a force budget, with its profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizedComposite {
    pub composite: CompositeSpring,
    pub stroke: StrokeConfig,
    pub profile: ChargingProfile,
}

/// Sum of the component charging forces at `theta`.
pub fn superpose(composite: &CompositeSpring, geom: &LinkageGeometry, stroke: &StrokeConfig, theta: f64) -> Result<f64> {
    composite
        .components
        .iter()
        .map(|c| c.charging_force(geom, stroke, theta))
        .sum()
}

/// Attachment family swept by positioning ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepModel {
    A,
    B,
    C,
}

impl SweepModel {
    pub fn kind(self, gamma: f64) -> SpringKind {
        match self {
            SweepModel::A => SpringKind::ModelA { gamma },
            SweepModel::B => SpringKind::ModelB { gamma },
            SweepModel::C => SpringKind::ModelC { gamma },
        }
    }
}

/// One positioning ratio of a sweep. A point that cannot be sized keeps its
/// place with both values empty and the reason in `gap`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub normalized_energy: Option<f64>,
    pub normalized_stiffness: Option<f64>,
    pub gap: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub model: SweepModel,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn point(&self, gamma: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| (p.gamma - gamma).abs() < 1e-12)
    }
}

/// `n` evenly spaced positioning ratios on `[0, 1]`.
pub fn gamma_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

/// Sizes and integrates one spring per positioning ratio, in parallel.
/// Results come back in grid order.
pub fn sweep_orientation(
    model: SweepModel,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    f_max: f64,
    gammas: &[f64],
    n_points: usize,
) -> Result<SweepResult> {
    if let Some(&bad) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
        return Err(Error::domain("positioning ratio", bad, "[0, 1]"));
    }
    let points = gammas
        .par_iter()
        .map(|&gamma| match size_spring(model.kind(gamma), 1, geom, stroke, f_max, n_points) {
            Ok(sized) => SweepPoint {
                gamma,
                normalized_energy: Some(sized.profile.normalized_energy()),
                normalized_stiffness: Some(sized.normalized_stiffness),
                gap: None,
            },
            Err(err) => SweepPoint {
                gamma,
                normalized_energy: None,
                normalized_stiffness: None,
                gap: Some(err.to_string()),
            },
        })
        .collect();
    Ok(SweepResult { model, points })
}

/// Best stiffness split between two spring families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioOptimum {
    /// Normalized stiffness of `partner` over that of `base`.
    pub ratio: f64,
    pub normalized_energy: f64,
    pub sized: SizedComposite,
}

/// Two-spring composite with normalized stiffness ratio
/// `ratio = k~(partner) / k~(base)`, before sizing.
pub fn pair_with_ratio(
    base: SpringKind,
    partner: SpringKind,
    ratio: f64,
    geom: &LinkageGeometry,
) -> Result<CompositeSpring> {
    // unit normalized stiffness for the base at F_max = 1
    let d = geom.characteristic_length();
    let raw = |kind: &SpringKind, normalized: f64| if kind.is_rotational() { normalized * d } else { normalized / d };
    let mut components = vec![SpringSpec::new(base, raw(&base, 1.0))?];
    if ratio > 0.0 {
        components.push(SpringSpec::new(partner, raw(&partner, ratio))?);
    }
    CompositeSpring::new(components, format!("{}+{}", base.label(), partner.label()))
}

/// Maximizes the stored energy of `base + partner` over their stiffness
/// ratio: a logarithmic scan, then golden-section search around the best
/// scan point down to [`RATIO_TOLERANCE`].
pub fn optimize_ratio(
    base: SpringKind,
    partner: SpringKind,
    geom: &LinkageGeometry,
    stroke: &StrokeConfig,
    f_max: f64,
    n_points: usize,
) -> Result<RatioOptimum> {
    let energy = |ratio: f64| -> Result<f64> {
        let pair = pair_with_ratio(base, partner, ratio, geom)?;
        Ok(pair.sized(geom, stroke, f_max, n_points)?.profile.normalized_energy())
    };
    let mut ratios = vec![0.0];
    ratios.extend((0..=120).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 120.0)));
    let energies = ratios.par_iter().map(|&r| energy(r)).collect::<Result<Vec<_>>>()?;
    let best = energies
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    let lo = ratios[best.saturating_sub(1)];
    let hi = ratios[(best + 1).min(ratios.len() - 1)];
    let (mut ratio, mut value) = golden_max(energy, lo, hi, RATIO_TOLERANCE)?;
    if energies[best] > value {
        ratio = ratios[best];
        value = energies[best];
    }
    let sized = pair_with_ratio(base, partner, ratio, geom)?.sized(geom, stroke, f_max, n_points)?;
    Ok(RatioOptimum {
        ratio,
        normalized_energy: value,
        sized,
    })
}

/// Standing angle that lets a horizontal spring store the most energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartOptimum {
    pub theta_ini: f64,
    pub normalized_energy: f64,
}

/// Scans standing angles from 90 deg up to the near-singular cap in 0.1 deg
/// steps for a horizontal spring compressed down to `theta_end`, then
/// refines around the best one.
pub fn optimal_horizontal_start(
    geom: &LinkageGeometry,
    theta_end: f64,
    f_max: f64,
    n_points: usize,
) -> Result<StartOptimum> {
    let energy = |theta_ini: f64| -> Result<f64> {
        let stroke = StrokeConfig::new(theta_ini, theta_end)?;
        Ok(size_spring(SpringKind::Horizontal, 1, geom, &stroke, f_max, n_points)?
            .profile
            .normalized_energy())
    };
    let lowest = (90f64.to_radians()).max(theta_end + 1e-3);
    let cap = NEAR_SINGULAR_START_DEG.to_radians();
    let steps = ((cap - lowest).to_degrees() / 0.1).floor() as usize;
    let starts: Vec<f64> = (0..=steps)
        .map(|i| (lowest + (i as f64 * 0.1).to_radians()).min(cap))
        .collect();
    let energies = starts.par_iter().map(|&t| energy(t)).collect::<Result<Vec<_>>>()?;
    let best = energies
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    let lo = starts[best.saturating_sub(1)];
    let hi = starts[(best + 1).min(starts.len() - 1)];
    let (theta_ini, normalized_energy) = golden_max(energy, lo, hi, 1e-6)?;
    Ok(if energies[best] > normalized_energy {
        StartOptimum {
            theta_ini: starts[best],
            normalized_energy: energies[best],
        }
    } else {
        StartOptimum {
            theta_ini,
            normalized_energy,
        }
    })
}

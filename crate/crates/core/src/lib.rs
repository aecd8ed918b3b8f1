//! Stored elastic energy of linear springs in a symmetric rhomboidal
//! (four-bar) linkage, as used in jumping robots.
//!
//! Closed-form charging forces live in [`springs`], and [`oracle`] checks them
//! independently by differentiating the spring energy. [`energetics`]
//! integrates profiles, sizes springs to a force budget and explores design
//! spaces. [`robots`] projects jump heights, and [`cli`] wraps it all for the
//! command line.

pub mod cli;
pub mod energetics;
pub mod error;
pub mod geometry;
pub mod oracle;
pub mod report;
pub mod robots;
pub mod springs;

pub use energetics::{ChargingProfile, CompositeSpring, SweepModel, SweepResult};
pub use error::{Error, Result};
pub use geometry::{Joint, JointFrame, Link, LinkageGeometry, Point, StrokeConfig};
pub use robots::{JumpPrediction, RobotRecord};
pub use springs::{SpringKind, SpringSpec, SpringState};

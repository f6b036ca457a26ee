//! Exact discrepancy functions of one-dimensional point sets, their
//! distribution profiles, and rearrangement-invariant norms built on them.

pub mod discrepancy;
pub mod distribution;
pub mod error;
pub mod geometry;
pub mod norms;
pub mod piecewise;
pub mod pointset;
pub mod poly;
pub mod rational;
pub mod verify;

pub use discrepancy::{ClosedForms, DiscrepancyCurve, Region};
pub use distribution::{DensityOfD, DistributionProfile, Dominance};
pub use error::{Error, Result};
pub use norms::{Bracket, NormValue, PsiSpec};
pub use piecewise::{LevelMeasure, PiecewisePoly, StepFunction};
pub use pointset::{GridClass, PointSet};
pub use poly::Poly;
pub use rational::Q;
pub use verify::{CampaignSummary, CheckKind, Outcome, VerificationReport};

//! Synthetic leaf-collage datasets for plant phenotyping.
//!
//! A small set of annotated rosette images is cut into a bank of leaf
//! cutouts, which are then composited onto backgrounds to produce
//! arbitrarily many labelled training scenes. Two generators are provided:
//! a naive one that scatters randomly scaled and rotated leaves, and a
//! structured one that arranges upright leaves around a plant center
//! following a triad-based angle schedule. The [`metrics`] module scores
//! instance segmentations and leaf counts.
//!
//! Geometry and metrics are generic over the floating-point type; the
//! aliases at the crate root fix it to `f64`.

pub mod error;
pub mod geometry;
pub mod io;
pub mod leafbank;
pub mod metrics;
pub mod raster;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point2 = geometry::Point<f64>;
pub type Point2f = geometry::Point<f32>;
pub type Placement = raster::Placement<f64>;
pub type Angles = synth::AngleSchedule<f64>;
pub type BestDiceScores = metrics::BestDice<f64>;
pub type MetricsReport = metrics::MetricsReport<f64>;
pub type ImageMetrics = metrics::ImageMetrics<f64>;

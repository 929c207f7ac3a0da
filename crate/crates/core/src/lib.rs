//! Hazard risk maps and risk-aware motorcycle planning.
//!
//! Pipeline per frame: a perception provider reports hazards with a
//! contextual score, a confidence, a depth and an image mask; the
//! [`riskmap`] module turns them into a per-pixel cost map; the [`planner`]
//! samples `(acceleration, steering rate)` pairs, rolls out a kinematic
//! bicycle model, projects the waypoints into the camera image and picks the
//! cheapest trajectory. The [`simulator`] closes the loop over scenario files.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod colormap;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod perception;
pub mod planner;
pub mod pnm;
pub mod projection;
pub mod riskmap;
pub mod scene;
pub mod simulator;

pub use error::{Error, Result};

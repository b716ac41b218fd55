//! Grant-free massive access for media-modulated machine-type devices.
//!
//! The crate generates uplink frames in which a sparse set of devices each
//! select one mirror activation pattern and one QAM symbol per slot, detects
//! the active devices with structured OMP, recovers their data with
//! SIC-aided structured subspace pursuit, and scores the result.

pub mod detectors;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod numerics;

//! Optical phase and interferometric visibility of an optomechanical cavity
//! in quantum, classical and semiclassical descriptions, with brute-force
//! oracles for every closed form.

// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod continuous;
pub mod error;
pub mod numerics;
pub mod oracles;
pub mod params;
pub mod pulsed;
pub mod sweep;
pub mod visibility;

pub use error::{Error, Result};
pub use params::{DerivedCouplings, FieldState, MirrorState, PhysicalConstants, SystemParams};
pub use pulsed::{PhaseResult, Picture};
pub use visibility::{VisibilityPicture, VisibilitySample};

//! Nonadiabatic holonomic one-qubit gates in a three-level Lambda system.
//!
//! The crate builds the Lambda-system Hamiltonians, propagates them for
//! arbitrary pulse shapes, composes multi-segment loops into holonomies,
//! synthesizes pulse programs for a target gate and checks the rotating wave
//! approximation against a lab-frame simulation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolve;
pub mod holonomy;
pub mod labframe;
pub mod model;
pub mod numkit;

pub use error::{HoloError, Result};
pub use evolve::{Frame, IntegratorConfig, Propagation};
pub use holonomy::{GateTarget, HolonomyResult, SchemeKind, SchemeParams};
pub use labframe::{LabFrameSpec, RwaSweepRow};
pub use model::{BlochAxis, LaserParams, LoopSpec, PulseEnvelope, PulseShape, SegmentSpec};
pub use numkit::{CMat2, CMat3, CVec3, Tolerances, C64};

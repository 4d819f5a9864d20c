//! Lambda-system model: laser parameters, Bloch axis, Hamiltonians and pulse
//! envelopes.

mod envelope;
mod hamiltonian;
mod laser;

pub use envelope::{
    pulse_area, scale_to_area, LoopSpec, PulseEnvelope, PulseShape, SampledShape, SegmentSpec,
    DEFAULT_SIGMA_FRACTION,
};
pub use hamiltonian::{
    coupler, cyclic_duration_offres, hamiltonian_eta_shifted, hamiltonian_general,
    hamiltonian_offresonant, hamiltonian_resonant_core, Detunings,
};
pub use laser::{
    bloch_from_omegas, dark_bright, omegas_from_bloch, wrap_angle, BlochAxis, LaserParams,
};

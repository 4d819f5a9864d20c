//! Closed-form gates, loop composition and synthesis of scheme parameters.

mod compose;
mod gates;
mod synth;

pub use compose::{
    build_v2, compose_loop, compose_offresonant, numeric_default, Evaluation, HolonomyResult,
    OffResSpec, CLOSED_FORM_CLOSURE_TOL, NUMERIC_CLOSURE_TOL,
};
pub use gates::{
    gate_l2, gate_l2_rotation_form, gate_offresonant, gate_single_pi, gate_two_loop,
    offresonant_chi,
};
pub use synth::{
    compare, compile_to_segments, select_scheme, synthesize, CompareRow, CompileOptions,
    GateTarget, Program, SchemeKind, SchemeParams, TRACE_TOLERANCE,
};

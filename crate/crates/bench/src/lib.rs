//! Shared inputs for the propagation benchmarks.

use holoq_core::holonomy::{compile_to_segments, CompileOptions, Program, SchemeParams};
use holoq_core::labframe::{nu_for_ratio, LabFrameSpec};
use holoq_core::{BlochAxis, PulseEnvelope};

pub fn bench_axis() -> BlochAxis {
    BlochAxis::new(1.1, 0.4).expect("valid axis")
}

/// Two gaussian half-pi segments with `eta = 0.7`.
pub fn l2_program() -> Program {
    let params = SchemeParams::MultiPulseL2 {
        n: bench_axis().unit_vector(),
        eta: 0.7,
    };
    let options = CompileOptions {
        envelope: PulseEnvelope::gaussian(1.0, 1.0).expect("valid envelope"),
        ..CompileOptions::default()
    };
    compile_to_segments(&params, &options).expect("reachable")
}

/// Lab-frame pulse pairs at `2pi / (nu tau) = ratio`.
pub fn labframe_spec(ratio: f64) -> LabFrameSpec {
    let p = bench_axis().params();
    let env = PulseEnvelope::gaussian(1.0, 1.0).expect("valid envelope");
    let nu = nu_for_ratio(ratio, 1.0);
    LabFrameSpec::new(nu, nu, p.omega0(), p.omega1(), 0.7, &env).expect("valid spec")
}

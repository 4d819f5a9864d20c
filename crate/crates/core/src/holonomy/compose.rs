use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::evolve::{frame_propagator, scaled_drive, trace_in_subspace, Frame, IntegratorConfig};
use crate::model::{hamiltonian_offresonant, pulse_area, LaserParams, LoopSpec, PulseEnvelope};
use crate::numkit::{c, herm_propagator, phase, projector_defect, CMat2, CMat3, CVec3};

/// Loop-closure threshold for closed-form composition.
pub const CLOSED_FORM_CLOSURE_TOL: f64 = 1e-12;
/// Loop-closure threshold when segments are integrated numerically.
pub const NUMERIC_CLOSURE_TOL: f64 = 1e-8;

/// Number of area samples used for the dynamical-phase diagnostic of a
/// closed-form segment.
const CLOSED_FORM_TRACE_SAMPLES: usize = 65;

/// How segment propagators are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Evaluation {
    ClosedForm,
    Numeric(IntegratorConfig),
}

impl Evaluation {
    pub fn closure_threshold(&self) -> f64 {
        match self {
            Evaluation::ClosedForm => CLOSED_FORM_CLOSURE_TOL,
            Evaluation::Numeric(_) => NUMERIC_CLOSURE_TOL,
        }
    }
}

/// Gate on `span{|0>, |1>}` produced by a loop, with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyResult {
    pub gate: CMat2,
    /// `||U P(0) U^dagger - P(0)||_F`.
    pub closure_defect: f64,
    /// Largest normalized dynamical matrix element along the segments.
    pub dyn_phase_max: f64,
    /// Closure defect within the threshold of the evaluation mode.
    pub is_loop: bool,
    pub closure_threshold: f64,
}

impl HolonomyResult {
    /// The gate, or [`HoloError::NotALoop`] when the path does not close.
    pub fn gate_checked(&self) -> Result<CMat2> {
        if self.is_loop {
            Ok(self.gate)
        } else {
            Err(HoloError::NotALoop {
                defect: self.closure_defect,
                threshold: self.closure_threshold,
            })
        }
    }

    fn from_unitary(u: &CMat3, dyn_phase_max: f64, threshold: f64) -> Result<Self> {
        let p0 = CMat3::computational_projector();
        let moved = *u * p0 * u.adjoint();
        let closure_defect = projector_defect(&moved, &p0)?;
        Ok(Self {
            gate: u.computational_block(),
            closure_defect,
            dyn_phase_max,
            is_loop: closure_defect <= threshold,
            closure_threshold: threshold,
        })
    }

    /// Sequential composition: `other` acts after `self`.
    pub fn then(&self, other: &HolonomyResult) -> HolonomyResult {
        let closure_defect = self.closure_defect.max(other.closure_defect);
        let closure_threshold = self.closure_threshold.max(other.closure_threshold);
        HolonomyResult {
            gate: other.gate * self.gate,
            closure_defect,
            dyn_phase_max: self.dyn_phase_max.max(other.dyn_phase_max),
            is_loop: self.is_loop && other.is_loop,
            closure_threshold,
        }
    }
}

/// Basis change between segments, diagonal in the transported frame:
/// `|e><e| + e^{i eta}|b><b| + e^{-i eta}|d><d|` (frame vectors after the
/// previous segment).
pub fn build_v2(frame_after_first: &Frame, eta: f64) -> Result<CMat3> {
    frame_after_first.check(1e-10)?;
    Ok(frame_after_first.excited.projector()
        + frame_after_first.bright.projector().scale(phase(eta))
        + frame_after_first.dark.projector().scale(phase(-eta)))
}

fn closed_form_trace(frame: &Frame, area: f64) -> f64 {
    let coupler = frame.coupler();
    let norm = coupler.frobenius_norm();
    let mut largest: f64 = 0.0;
    for k in 0..CLOSED_FORM_TRACE_SAMPLES {
        let a = area * k as f64 / (CLOSED_FORM_TRACE_SAMPLES - 1) as f64;
        let u = frame_propagator(frame, a);
        let psi = [u.apply(&frame.dark), u.apply(&frame.bright)];
        for x in &psi {
            let hx = coupler.apply(x);
            for y in &psi {
                largest = largest.max(y.inner(&hx).norm());
            }
        }
    }
    largest / norm
}

/// Holonomy of a multi-segment loop.
///
/// Segment `n > 1` starts from the frame transported by the previous segment
/// and changed by the diagonal phase map of [`build_v2`] with its `eta`; its
/// Hamiltonian couples the new excited and bright vectors. The gate is the
/// computational block of `U_L ... U_1 P(0)`.
pub fn compose_loop(spec: &LoopSpec, evaluation: &Evaluation) -> Result<HolonomyResult> {
    if spec.segments.is_empty() {
        return Err(HoloError::InvalidArgument("loop has no segments".into()));
    }
    let mut frame = Frame::initial(&spec.laser);
    let mut total = CMat3::identity();
    let mut dyn_max: f64 = 0.0;

    for (index, segment) in spec.segments.iter().enumerate() {
        if index > 0 {
            frame = frame.transformed(&build_v2(&frame, segment.eta)?);
        }
        let area = pulse_area(&segment.envelope)?;
        let step = match evaluation {
            Evaluation::ClosedForm => {
                dyn_max = dyn_max.max(closed_form_trace(&frame, area));
                frame_propagator(&frame, area)
            }
            Evaluation::Numeric(cfg) => {
                let drive = scaled_drive(&segment.envelope, frame.coupler());
                let trace = trace_in_subspace(
                    &drive,
                    frame.dark,
                    frame.bright,
                    0.0,
                    segment.envelope.duration,
                    cfg,
                )?;
                dyn_max = dyn_max.max(trace.max_abs);
                trace.propagation.final_unitary
            }
        };
        total = step * total;
        frame = frame.transformed(&step);
    }
    HolonomyResult::from_unitary(&total, dyn_max, evaluation.closure_threshold())
}

/// Square (or, outside strict mode, arbitrary) detuned pulse pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffResSpec {
    pub laser: LaserParams,
    pub delta: f64,
    pub envelope: PulseEnvelope,
}

impl OffResSpec {
    /// `D |e><e| + W(t) H` on the pulse support.
    pub fn hamiltonian(&self) -> impl Fn(f64) -> CMat3 + '_ {
        let core = hamiltonian_offresonant(1.0, 0.0, &self.laser);
        move |t| {
            let mut h = core.scale_re(self.envelope.value(t));
            h.0[2][2] += c(self.delta, 0.0);
            h
        }
    }
}

/// Holonomy of the off-resonant program. The closed form is only defined for
/// square pulses.
pub fn compose_offresonant(spec: &OffResSpec, evaluation: &Evaluation) -> Result<HolonomyResult> {
    let (dark, bright) = crate::model::dark_bright(&spec.laser);
    let tau = spec.envelope.duration;
    match evaluation {
        Evaluation::ClosedForm => {
            if !matches!(spec.envelope.shape, crate::model::PulseShape::Square) {
                return Err(HoloError::SquarePulseRequired);
            }
            let h = hamiltonian_offresonant(spec.envelope.amplitude, spec.delta, &spec.laser);
            let u = herm_propagator(&h, tau)?;
            let dyn_max = offres_closed_trace(&h, tau, dark, bright);
            HolonomyResult::from_unitary(&u, dyn_max, evaluation.closure_threshold())
        }
        Evaluation::Numeric(cfg) => {
            let drive = spec.hamiltonian();
            let trace = trace_in_subspace(&drive, dark, bright, 0.0, tau, cfg)?;
            HolonomyResult::from_unitary(
                &trace.propagation.final_unitary,
                trace.max_abs,
                evaluation.closure_threshold(),
            )
        }
    }
}

fn offres_closed_trace(h: &CMat3, tau: f64, dark: CVec3, bright: CVec3) -> f64 {
    let norm = h.frobenius_norm();
    let mut largest: f64 = 0.0;
    for k in 0..CLOSED_FORM_TRACE_SAMPLES {
        let t = tau * k as f64 / (CLOSED_FORM_TRACE_SAMPLES - 1) as f64;
        let Ok(u) = herm_propagator(h, t) else {
            continue;
        };
        let psi = [u.apply(&dark), u.apply(&bright)];
        for x in &psi {
            let hx = h.apply(x);
            for y in &psi {
                largest = largest.max(y.inner(&hx).norm());
            }
        }
    }
    largest / norm
}

/// Shorthand used by tests and the CLI: numeric evaluation with defaults.
pub fn numeric_default() -> Evaluation {
    Evaluation::Numeric(IntegratorConfig::default())
}

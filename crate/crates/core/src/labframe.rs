//! Interaction-picture dynamics with the counter-rotating terms kept.
//!
//! Bare energies are `-nu_e0` and `-nu_e1` for the ground levels and zero for
//! `|e>`. Each transition is driven at its own frequency. In the interaction
//! picture the coupling of pulse pair `n` to `|e><p|` is
//! `W_n(t) w_p (e^{i eta_n} + e^{-2i nu_ep t - i eta_n})`, which reduces to
//! the resonant model when the second term is dropped.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::evolve::{integrate, IntegratorConfig};
use crate::holonomy::gate_l2;
use crate::model::{
    hamiltonian_general, pulse_area, scale_to_area, Detunings, LaserParams, PulseEnvelope,
};
use crate::numkit::{phase, phase_insensitive_distance, projector_defect, CMat2, CMat3, C64};

/// Integrator steps per period `pi/nu` of the fastest counter-rotating term.
pub const STEPS_PER_FAST_PERIOD: usize = 16;

/// Relative tolerance on the `pi/2` area of each pulse pair.
const AREA_TOL: f64 = 1e-9;

/// Two consecutive resonant pulse pairs. The first starts at `t = 0`, the
/// second at `start2`; both envelopes are given on their own `[0, tau]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabFrameSpec {
    pub nu_e0: f64,
    pub nu_e1: f64,
    pub coupling0: C64,
    pub coupling1: C64,
    pub eta: f64,
    pub envelope1: PulseEnvelope,
    pub envelope2: PulseEnvelope,
    pub start2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pulse {
    First,
    Second,
}

impl LabFrameSpec {
    /// Back-to-back pulse pairs with the shape of `template`, each rescaled to
    /// area `pi/2` given the coupling strength `sqrt(|c0|^2 + |c1|^2)`.
    pub fn new(
        nu_e0: f64,
        nu_e1: f64,
        coupling0: C64,
        coupling1: C64,
        eta: f64,
        template: &PulseEnvelope,
    ) -> Result<Self> {
        let strength = (coupling0.norm_sqr() + coupling1.norm_sqr()).sqrt();
        if !(strength.is_finite() && strength > 0.0) {
            return Err(HoloError::InvalidArgument(
                "couplings must not both vanish".into(),
            ));
        }
        let envelope = scale_to_area(template, FRAC_PI_2 / strength)?;
        let spec = Self {
            nu_e0,
            nu_e1,
            coupling0,
            coupling1,
            eta,
            start2: envelope.duration,
            envelope1: envelope.clone(),
            envelope2: envelope,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Same pulses with both transition frequencies set to `nu`.
    pub fn with_nu(&self, nu: f64) -> Self {
        Self {
            nu_e0: nu,
            nu_e1: nu,
            ..self.clone()
        }
    }

    pub fn strength(&self) -> f64 {
        (self.coupling0.norm_sqr() + self.coupling1.norm_sqr()).sqrt()
    }

    pub fn laser(&self) -> Result<LaserParams> {
        LaserParams::normalized(self.coupling0, self.coupling1)
    }

    pub fn validate(&self) -> Result<()> {
        for nu in [self.nu_e0, self.nu_e1] {
            if !(nu.is_finite() && nu > 0.0) {
                return Err(HoloError::InvalidArgument(format!(
                    "transition frequency {nu} must be positive"
                )));
            }
        }
        self.laser()?;
        if !self.eta.is_finite() {
            return Err(HoloError::InvalidArgument("eta is not finite".into()));
        }
        if self.start2 < self.envelope1.duration {
            return Err(HoloError::InvalidArgument(
                "the second pulse pair starts before the first one ends".into(),
            ));
        }
        for env in [&self.envelope1, &self.envelope2] {
            let area = self.strength() * pulse_area(env)?;
            if (area - FRAC_PI_2).abs() > AREA_TOL * FRAC_PI_2 {
                return Err(HoloError::InvalidArgument(format!(
                    "pulse pair area {area} differs from pi/2"
                )));
            }
        }
        Ok(())
    }

    /// `2pi / (nu tau)` with the slower transition and the first pulse length.
    pub fn ratio(&self) -> f64 {
        TAU / (self.nu_e0.min(self.nu_e1) * self.envelope1.duration)
    }

    fn fastest_nu(&self) -> f64 {
        self.nu_e0.max(self.nu_e1)
    }

    /// Largest step accepted for the lab-frame runs, `pi / (4 nu)`.
    pub fn max_step(&self) -> f64 {
        PI / (4.0 * self.fastest_nu())
    }

    /// Steps per pulse giving [`STEPS_PER_FAST_PERIOD`] steps per `pi/nu`.
    pub fn recommended_steps(&self) -> usize {
        let tau = self.envelope1.duration.max(self.envelope2.duration);
        let per = PI / (STEPS_PER_FAST_PERIOD as f64 * self.fastest_nu());
        ((tau / per).ceil() as usize).max(16)
    }

    fn window(&self, pulse: Pulse) -> (f64, &PulseEnvelope) {
        match pulse {
            Pulse::First => (0.0, &self.envelope1),
            Pulse::Second => (self.start2, &self.envelope2),
        }
    }
}

/// `H_n(t)` in the interaction picture; zero outside the pulse support. With
/// `counter_rotating = false` the result is the resonant model Hamiltonian.
pub fn interaction_hamiltonian(
    spec: &LabFrameSpec,
    pulse: Pulse,
    t: f64,
    counter_rotating: bool,
) -> CMat3 {
    let (start, env) = spec.window(pulse);
    let rabi = spec.strength() * env.value(t - start);
    if rabi == 0.0 {
        return CMat3::zeros();
    }
    let eta = match pulse {
        Pulse::First => 0.0,
        Pulse::Second => spec.eta,
    };
    let w0 = spec.coupling0 / spec.strength();
    let w1 = spec.coupling1 / spec.strength();
    let factor = |nu: f64| {
        let mut f = phase(eta);
        if counter_rotating {
            f += phase(-2.0 * nu * t - eta);
        }
        f * rabi
    };
    hamiltonian_general(
        w0 * factor(spec.nu_e0),
        w1 * factor(spec.nu_e1),
        Detunings::default(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabFrameResult {
    /// Computational block of the full propagator; may leak slightly.
    pub gate: CMat2,
    /// Distance up to phase from the resonant two-segment gate.
    pub infidelity: f64,
    pub closure_defect: f64,
    /// Steps per pulse in the accepted runs.
    pub steps: [usize; 2],
}

/// Integrates both pulse pairs and compares the result with the resonant
/// two-segment gate for the same `n` and `eta`.
pub fn simulate_labframe_gate(
    spec: &LabFrameSpec,
    cfg: &IntegratorConfig,
    counter_rotating: bool,
) -> Result<LabFrameResult> {
    spec.validate()?;
    let mut total = CMat3::identity();
    let mut steps = [0; 2];
    for (slot, pulse) in [Pulse::First, Pulse::Second].into_iter().enumerate() {
        let (start, env) = spec.window(pulse);
        let step = env.duration / cfg.step_count as f64;
        if counter_rotating && step >= spec.max_step() {
            return Err(HoloError::StepTooCoarse {
                step,
                max_step: spec.max_step(),
                required_steps: spec.recommended_steps(),
            });
        }
        let h = |t: f64| interaction_hamiltonian(spec, pulse, t, counter_rotating);
        let run = integrate(&h, start, start + env.duration, cfg)?;
        steps[slot] = run.steps;
        total = run.final_unitary * total;
    }
    let p0 = CMat3::computational_projector();
    let closure_defect = projector_defect(&(total * p0 * total.adjoint()), &p0)?;
    let gate = total.computational_block();
    let n = spec.laser()?.axis().unit_vector();
    let infidelity = phase_insensitive_distance(&gate, &gate_l2(n, spec.eta));
    Ok(LabFrameResult {
        gate,
        infidelity,
        closure_defect,
        steps,
    })
}

/// Integrator settings used for lab-frame runs: `base`, with the initial step
/// count raised to [`LabFrameSpec::recommended_steps`].
pub fn labframe_config(spec: &LabFrameSpec, base: &IntegratorConfig) -> IntegratorConfig {
    IntegratorConfig {
        step_count: base.step_count.max(spec.recommended_steps()),
        ..*base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RwaSweepRow {
    pub ratio: f64,
    pub nu: f64,
    /// NaN when the point failed.
    pub infidelity: f64,
    pub closure_defect: f64,
    pub error: Option<String>,
}

impl RwaSweepRow {
    pub const CSV_HEADER: &'static str = "ratio,infidelity,closure_defect";

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

/// Runs the template at every `nu` in parallel; rows are sorted by ratio.
pub fn rwa_error_sweep(
    template: &LabFrameSpec,
    nu_values: &[f64],
    base: &IntegratorConfig,
) -> Vec<RwaSweepRow> {
    let mut rows: Vec<RwaSweepRow> = nu_values
        .par_iter()
        .map(|&nu| {
            let spec = template.with_nu(nu);
            let outcome = spec
                .validate()
                .and_then(|_| simulate_labframe_gate(&spec, &labframe_config(&spec, base), true));
            match outcome {
                Ok(r) => RwaSweepRow {
                    ratio: spec.ratio(),
                    nu,
                    infidelity: r.infidelity,
                    closure_defect: r.closure_defect,
                    error: None,
                },
                Err(e) => {
                    log::warn!("sweep point nu = {nu} failed: {e}");
                    RwaSweepRow {
                        ratio: spec.ratio(),
                        nu,
                        infidelity: f64::NAN,
                        closure_defect: f64::NAN,
                        error: Some(e.to_string()),
                    }
                }
            }
        })
        .collect();
    rows.sort_by(|a, b| a.ratio.total_cmp(&b.ratio).then(a.nu.total_cmp(&b.nu)));
    rows
}

/// Transition frequency giving `2pi / (nu tau) = ratio`.
pub fn nu_for_ratio(ratio: f64, tau: f64) -> f64 {
    TAU / (ratio * tau)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGateReport {
    pub zeta: f64,
    pub eta: f64,
    pub gate: CMat2,
    pub infidelity: f64,
    pub closure_defect: f64,
    /// `arg(g11 / g00)`: the phase carried by `|1>`, convention
    /// `|x> -> e^{i x zeta}|x>`.
    pub phase_on_one: f64,
    /// `arg(g00 / g11)`: the phase carried by `|0>`, which is what the
    /// resonant gate with `w0 = 1` produces.
    pub phase_on_zero: f64,
}

/// Phase gate with `w0 = 1` and `eta = pi - zeta`, using the transition
/// frequencies, envelope shape and coupling strength of `template`.
pub fn phase_gate_demo(
    zeta: f64,
    template: &LabFrameSpec,
    base: &IntegratorConfig,
) -> Result<PhaseGateReport> {
    if !zeta.is_finite() {
        return Err(HoloError::InvalidArgument("zeta is not finite".into()));
    }
    let eta = PI - zeta;
    let spec = LabFrameSpec {
        coupling0: C64::new(template.strength(), 0.0),
        coupling1: C64::new(0.0, 0.0),
        eta,
        ..template.clone()
    };
    let r = simulate_labframe_gate(&spec, &labframe_config(&spec, base), true)?;
    let g = r.gate;
    Ok(PhaseGateReport {
        zeta,
        eta,
        gate: g,
        infidelity: r.infidelity,
        closure_defect: r.closure_defect,
        phase_on_one: (g.0[1][1] / g.0[0][0]).arg(),
        phase_on_zero: (g.0[0][0] / g.0[1][1]).arg(),
    })
}

//! Propagation of the driven Lambda system.
//!
//! Closed-form segment propagators cover resonant drives; [`integrate`]
//! handles arbitrary time-dependent Hamiltonians with a fixed-step
//! fourth-order commutator-free exponential scheme and step doubling until
//! successive results agree within the configured tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::model::{dark_bright, hamiltonian_offresonant, LaserParams};
use crate::numkit::{
    expm_herm_unchecked, herm_propagator, phase, reunitarize, CMat2, CMat3, CVec3, I,
};

/// Orthonormal frame `(excited, bright, dark)` spanning the state space. The
/// bright and dark vectors span the current computational subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub excited: CVec3,
    pub bright: CVec3,
    pub dark: CVec3,
}

impl Frame {
    /// Initial frame `(|e>, |b>, |d>)` of the laser parameters.
    pub fn initial(params: &LaserParams) -> Self {
        let (dark, bright) = dark_bright(params);
        Self {
            excited: CVec3::ket_e(),
            bright,
            dark,
        }
    }

    pub fn vectors(&self) -> [CVec3; 3] {
        [self.excited, self.bright, self.dark]
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = self.vectors();
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((v[i].inner(&v[j]) - want).norm());
            }
        }
        defect
    }

    pub fn check(&self, tol: f64) -> Result<()> {
        let defect = self.orthonormality_defect();
        if defect > tol {
            return Err(HoloError::NotOrthonormal { defect });
        }
        Ok(())
    }

    /// `H_n = |e><b| + |b><e|` in this frame.
    pub fn coupler(&self) -> CMat3 {
        self.excited.outer(&self.bright) + self.bright.outer(&self.excited)
    }

    /// Projector onto `span{bright, dark}`.
    pub fn subspace_projector(&self) -> CMat3 {
        self.bright.projector() + self.dark.projector()
    }

    pub fn transformed(&self, u: &CMat3) -> Self {
        Self {
            excited: u.apply(&self.excited),
            bright: u.apply(&self.bright),
            dark: u.apply(&self.dark),
        }
    }
}

/// `exp(-i a H)` for the frame coupler, written out as
/// `|d><d| + cos a (1 - |d><d|) - i sin a (|e><b| + |b><e|)`.
pub fn frame_propagator(frame: &Frame, area: f64) -> CMat3 {
    let pd = frame.dark.projector();
    let (s, co) = area.sin_cos();
    pd + (CMat3::identity() - pd).scale_re(co) - frame.coupler().scale(I * s)
}

/// Closed-form propagator of a resonant segment with both laser phases
/// shifted by `eta`, evaluated at pulse area `area`.
pub fn segment_propagator_closed(params: &LaserParams, eta: f64, area: f64) -> CMat3 {
    let mut frame = Frame::initial(params);
    // e^{i eta}|e><b| = |e><b'| with |b'> = e^{-i eta}|b>
    frame.bright = frame.bright.scale(phase(-eta));
    frame_propagator(&frame, area)
}

/// Propagator of the square off-resonant drive for time `t`.
pub fn offres_square_propagator(
    omega0_rabi: f64,
    delta: f64,
    params: &LaserParams,
    t: f64,
) -> Result<CMat3> {
    if !(omega0_rabi > 0.0) {
        return Err(HoloError::InvalidArgument(format!(
            "Rabi frequency {omega0_rabi} must be positive"
        )));
    }
    herm_propagator(&hamiltonian_offresonant(omega0_rabi, delta, params), t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    /// Initial number of steps over the integration window.
    pub step_count: usize,
    /// Accepted Frobenius distance between results at `N` and `2N` steps.
    pub tolerance: f64,
    /// Maximum number of step doublings.
    pub max_refinements: u32,
    /// Keep `U(t)` at every grid point of the accepted run.
    pub keep_trajectory: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step_count: 64,
            tolerance: 1e-10,
            max_refinements: 10,
            keep_trajectory: false,
        }
    }
}

impl IntegratorConfig {
    pub fn with_steps(step_count: usize) -> Self {
        Self {
            step_count,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.step_count < 16 {
            return Err(HoloError::InvalidArgument(format!(
                "step count {} below the minimum of 16",
                self.step_count
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(HoloError::InvalidArgument(
                "integrator tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// `<psi_k|H|psi_l>` for `k, l` in `(dark, bright)` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynPhaseSample {
    pub time: f64,
    pub matrix: CMat2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation {
    pub final_unitary: CMat3,
    /// Steps used by the accepted run.
    pub steps: usize,
    /// Distance between the accepted run and the run at half the steps.
    pub error_estimate: f64,
    pub dyn_phase_samples: Vec<DynPhaseSample>,
    pub trajectory: Option<Vec<(f64, CMat3)>>,
}

// Fourth-order commutator-free scheme on two Gauss-Legendre nodes.
const SQRT3: f64 = 1.732_050_807_568_877_2;
const NODE_LO: f64 = 0.5 - SQRT3 / 6.0;
const NODE_HI: f64 = 0.5 + SQRT3 / 6.0;
const WEIGHT_MAJOR: f64 = 0.25 + SQRT3 / 6.0;
const WEIGHT_MINOR: f64 = 0.25 - SQRT3 / 6.0;

fn sample<F>(hamiltonian: &F, t: f64) -> Result<CMat3>
where
    F: Fn(f64) -> CMat3,
{
    let h = hamiltonian(t);
    let defect = h.hermiticity_defect();
    if !(defect <= 1e-12 * h.max_abs().max(1.0)) {
        return Err(HoloError::NotHermitian { defect });
    }
    Ok(h)
}

/// Time-ordered product over `[t0, t1]` with `steps` equal steps.
pub fn propagate_fixed<F>(
    hamiltonian: &F,
    t0: f64,
    t1: f64,
    steps: usize,
    mut trajectory: Option<&mut Vec<(f64, CMat3)>>,
) -> Result<CMat3>
where
    F: Fn(f64) -> CMat3,
{
    let h = (t1 - t0) / steps as f64;
    let mut u = CMat3::identity();
    if let Some(tr) = trajectory.as_deref_mut() {
        tr.clear();
        tr.push((t0, u));
    }
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let h1 = sample(hamiltonian, t + NODE_LO * h)?;
        let h2 = sample(hamiltonian, t + NODE_HI * h)?;
        let first =
            expm_herm_unchecked(&(h1.scale_re(WEIGHT_MAJOR) + h2.scale_re(WEIGHT_MINOR)), h);
        let second =
            expm_herm_unchecked(&(h1.scale_re(WEIGHT_MINOR) + h2.scale_re(WEIGHT_MAJOR)), h);
        u = reunitarize(&(second * first * u));
        if let Some(tr) = trajectory.as_deref_mut() {
            tr.push((t0 + (k + 1) as f64 * h, u));
        }
    }
    Ok(u)
}

/// Propagator of `H(t)` over `[t0, t1]`, doubling the step count until two
/// successive results agree within `cfg.tolerance`.
pub fn integrate<F>(
    hamiltonian: &F,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<Propagation>
where
    F: Fn(f64) -> CMat3,
{
    cfg.validate()?;
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(HoloError::InvalidArgument(format!(
            "integration window [{t0}, {t1}] is empty"
        )));
    }
    let mut traj = cfg.keep_trajectory.then(Vec::new);
    let mut steps = cfg.step_count;
    let mut coarse = propagate_fixed(hamiltonian, t0, t1, steps, traj.as_mut())?;
    let mut achieved = f64::INFINITY;
    for _ in 0..=cfg.max_refinements {
        steps *= 2;
        let fine = propagate_fixed(hamiltonian, t0, t1, steps, traj.as_mut())?;
        achieved = (fine - coarse).frobenius_norm();
        if achieved <= cfg.tolerance {
            return Ok(Propagation {
                final_unitary: fine,
                steps,
                error_estimate: achieved,
                dyn_phase_samples: Vec::new(),
                trajectory: traj,
            });
        }
        coarse = fine;
    }
    Err(HoloError::NonConvergence {
        steps,
        achieved,
        tolerance: cfg.tolerance,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalPhaseTrace {
    /// `max |<psi_k|H|psi_l>|` over the grid, divided by the peak `||H||_F`.
    pub max_abs: f64,
    pub propagation: Propagation,
}

/// Transports the frame `(dark, bright)` under `H(t)` and records the
/// dynamical matrix elements on the integrator grid.
pub fn dynamical_phase_trace<F>(
    hamiltonian: &F,
    initial_frame: (CVec3, CVec3),
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<DynamicalPhaseTrace>
where
    F: Fn(f64) -> CMat3,
{
    let (dark, bright) = initial_frame;
    let frame = Frame {
        excited: CVec3::ket_e(),
        bright,
        dark,
    };
    frame.check(1e-10)?;
    trace_in_subspace(hamiltonian, dark, bright, t0, t1, cfg)
}

/// Like [`dynamical_phase_trace`], but the pair only has to be orthonormal;
/// used for segments whose initial subspace has been transported away from
/// `span{|0>, |1>}`.
pub fn trace_in_subspace<F>(
    hamiltonian: &F,
    dark: CVec3,
    bright: CVec3,
    t0: f64,
    t1: f64,
    cfg: &IntegratorConfig,
) -> Result<DynamicalPhaseTrace>
where
    F: Fn(f64) -> CMat3,
{
    let gram = (dark.inner(&dark) - 1.0)
        .norm()
        .max((bright.inner(&bright) - 1.0).norm())
        .max(dark.inner(&bright).norm());
    if gram > 1e-10 {
        return Err(HoloError::NotOrthonormal { defect: gram });
    }
    let traced = IntegratorConfig {
        keep_trajectory: true,
        ..*cfg
    };
    let mut propagation = integrate(hamiltonian, t0, t1, &traced)?;
    let trajectory = propagation.trajectory.as_deref().unwrap_or_default();

    let mut peak: f64 = 0.0;
    let mut largest: f64 = 0.0;
    let mut samples = Vec::with_capacity(trajectory.len());
    for (t, u) in trajectory {
        let h = hamiltonian(*t);
        peak = peak.max(h.frobenius_norm());
        let psi = [u.apply(&dark), u.apply(&bright)];
        let h_psi = [h.apply(&psi[0]), h.apply(&psi[1])];
        let mut m = CMat2::zeros();
        for (k, x) in psi.iter().enumerate() {
            for (l, hy) in h_psi.iter().enumerate() {
                m.0[k][l] = x.inner(hy);
                largest = largest.max(m.0[k][l].norm());
            }
        }
        samples.push(DynPhaseSample {
            time: *t,
            matrix: m,
        });
    }
    propagation.dyn_phase_samples = samples;
    if !cfg.keep_trajectory {
        propagation.trajectory = None;
    }
    let max_abs = if peak > 0.0 { largest / peak } else { 0.0 };
    Ok(DynamicalPhaseTrace {
        max_abs,
        propagation,
    })
}

/// `max ||[H(t), H(t')]||_F / (||H(t)||_F ||H(t')||_F)` over pairs of
/// equally spaced sample times.
pub fn commutator_defect<F>(hamiltonian: &F, t0: f64, t1: f64, sample_count: usize) -> Result<f64>
where
    F: Fn(f64) -> CMat3,
{
    if sample_count < 2 {
        return Err(HoloError::InvalidArgument(
            "commutator defect needs at least two samples".into(),
        ));
    }
    let hs: Vec<(CMat3, f64)> = (0..sample_count)
        .map(|k| {
            let t = t0 + (t1 - t0) * k as f64 / (sample_count - 1) as f64;
            let h = hamiltonian(t);
            (h, h.frobenius_norm())
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, (a, na)) in hs.iter().enumerate() {
        for (b, nb) in &hs[i + 1..] {
            if *na == 0.0 || *nb == 0.0 {
                continue;
            }
            worst = worst.max(a.commutator(b).frobenius_norm() / (na * nb));
        }
    }
    Ok(worst)
}

/// `H(t) = W(t) H` for a fixed coupler.
pub fn scaled_drive<'a>(
    envelope: &'a crate::model::PulseEnvelope,
    coupler: CMat3,
) -> impl Fn(f64) -> CMat3 + 'a {
    move |t| coupler.scale_re(envelope.value(t))
}

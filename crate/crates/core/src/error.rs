use thiserror::Error;

/// Errors raised by the model, propagation and synthesis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HoloError {
    #[error("matrix is not hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("matrix is not a hermitian idempotent projector (defect {defect:.3e})")]
    NotProjector { defect: f64 },

    #[error("frame is not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("laser parameters are not normalized (|w0|^2 + |w1|^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("invalid envelope: {0}")]
    InvalidEnvelope(String),

    #[error("envelope has zero area and cannot be rescaled")]
    ZeroArea,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "integration did not converge after {steps} steps: estimated error {achieved:.3e} > tolerance {tolerance:.3e}"
    )]
    NonConvergence {
        steps: usize,
        achieved: f64,
        tolerance: f64,
    },

    #[error("integrator step {step:.3e} cannot resolve the counter-rotating terms (need < {max_step:.3e}, i.e. at least {required_steps} steps)")]
    StepTooCoarse {
        step: f64,
        max_step: f64,
        required_steps: usize,
    },

    #[error("target unreachable by scheme {scheme}: reachable rotation angles {reachable}")]
    Unreachable {
        scheme: &'static str,
        reachable: &'static str,
    },

    #[error("off-resonant scheme requires a square pulse: the detuned Hamiltonian must commute with itself during the pulse")]
    SquarePulseRequired,

    #[error("not a loop; gate invalid (closure defect {defect:.3e} > {threshold:.3e})")]
    NotALoop { defect: f64, threshold: f64 },
}

pub type Result<T> = std::result::Result<T, HoloError>;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::model::{
    cyclic_duration_offres, wrap_angle, BlochAxis, LoopSpec, PulseEnvelope, PulseShape, SegmentSpec,
};
use crate::numkit::CMat2;

use super::compose::{compose_loop, compose_offresonant, Evaluation, HolonomyResult, OffResSpec};
use super::gates::{
    cross, dot, gate_l2, gate_offresonant, gate_single_pi, gate_two_loop, norm, offresonant_chi,
};

/// `|Tr U|` at or below this value counts as traceless.
pub const TRACE_TOLERANCE: f64 = 1e-6;

const AXIS_TOL: f64 = 1e-12;

/// Target rotation `exp(-i alpha/2 m . sigma)`, compared up to global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateTarget {
    pub axis: [f64; 3],
    /// In `[0, 2pi)`.
    pub angle: f64,
}

impl GateTarget {
    /// Normalizes `axis` and folds `angle` into `[0, 2pi)`.
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let len = norm(axis);
        if !(len.is_finite() && len > 0.0) {
            return Err(HoloError::InvalidArgument(
                "rotation axis must be nonzero and finite".into(),
            ));
        }
        if !angle.is_finite() {
            return Err(HoloError::InvalidArgument(format!(
                "rotation angle {angle} is not finite"
            )));
        }
        Ok(Self {
            axis: [axis[0] / len, axis[1] / len, axis[2] / len],
            angle: wrap_angle(angle),
        })
    }

    pub fn from_bloch(axis: &BlochAxis, angle: f64) -> Result<Self> {
        Self::new(axis.unit_vector(), angle)
    }

    pub fn matrix(&self) -> CMat2 {
        CMat2::rotation(self.axis, self.angle)
    }

    /// `|Tr U| = 2|cos(alpha/2)|`.
    pub fn trace_abs(&self) -> f64 {
        2.0 * (0.5 * self.angle).cos().abs()
    }

    fn is_identity(&self) -> bool {
        (0.5 * self.angle).sin().abs() < AXIS_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    #[serde(rename = "single-pi")]
    SingleLoopPi,
    #[serde(rename = "two-loop")]
    TwoLoopPi,
    OffResonant,
    #[serde(rename = "l2")]
    MultiPulseL2,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::SingleLoopPi,
        SchemeKind::TwoLoopPi,
        SchemeKind::OffResonant,
        SchemeKind::MultiPulseL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::SingleLoopPi => "single-pi",
            SchemeKind::TwoLoopPi => "two-loop",
            SchemeKind::OffResonant => "off-resonant",
            SchemeKind::MultiPulseL2 => "l2",
        }
    }

    /// Rotation angles the scheme can produce.
    pub fn reachable(self) -> &'static str {
        match self {
            SchemeKind::SingleLoopPi => "alpha = pi",
            SchemeKind::TwoLoopPi | SchemeKind::MultiPulseL2 => "alpha in [0, 2pi)",
            SchemeKind::OffResonant => "alpha in (0, pi]",
        }
    }

    /// Free real parameters of the scheme.
    pub fn parameter_count(self) -> usize {
        match self {
            SchemeKind::SingleLoopPi => 2,
            SchemeKind::TwoLoopPi => 4,
            SchemeKind::OffResonant | SchemeKind::MultiPulseL2 => 3,
        }
    }

    pub fn loop_count(self) -> usize {
        match self {
            SchemeKind::TwoLoopPi => 2,
            _ => 1,
        }
    }

    pub fn requires_square_pulse(self) -> bool {
        self == SchemeKind::OffResonant
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = HoloError;
    fn from_str(s: &str) -> Result<Self> {
        SchemeKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                HoloError::InvalidArgument(format!(
                    "unknown scheme `{s}`; expected single-pi, two-loop, off-resonant or l2"
                ))
            })
    }
}

/// Parameters of one of the four gate schemes. Axes are unit vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "kebab-case")]
pub enum SchemeParams {
    #[serde(rename = "single-pi")]
    SingleLoopPi { n: [f64; 3] },
    #[serde(rename = "two-loop")]
    TwoLoopPi { n1: [f64; 3], n2: [f64; 3] },
    /// `ratio = D / (2 W0)`.
    OffResonant { n: [f64; 3], ratio: f64 },
    #[serde(rename = "l2")]
    MultiPulseL2 { n: [f64; 3], eta: f64 },
}

impl SchemeParams {
    pub fn kind(&self) -> SchemeKind {
        match self {
            SchemeParams::SingleLoopPi { .. } => SchemeKind::SingleLoopPi,
            SchemeParams::TwoLoopPi { .. } => SchemeKind::TwoLoopPi,
            SchemeParams::OffResonant { .. } => SchemeKind::OffResonant,
            SchemeParams::MultiPulseL2 { .. } => SchemeKind::MultiPulseL2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let axes: &[[f64; 3]] = match self {
            SchemeParams::SingleLoopPi { n } => &[*n],
            SchemeParams::TwoLoopPi { n1, n2 } => &[*n1, *n2],
            SchemeParams::OffResonant { n, ratio } => {
                if !(ratio.is_finite() && *ratio >= 0.0) {
                    return Err(HoloError::InvalidArgument(format!(
                        "detuning ratio {ratio} must be finite and non-negative"
                    )));
                }
                &[*n]
            }
            SchemeParams::MultiPulseL2 { n, eta } => {
                if !eta.is_finite() {
                    return Err(HoloError::InvalidArgument("eta is not finite".into()));
                }
                &[*n]
            }
        };
        for a in axes {
            if (norm(*a) - 1.0).abs() > AXIS_TOL {
                return Err(HoloError::InvalidArgument(format!(
                    "axis {a:?} is not a unit vector"
                )));
            }
        }
        Ok(())
    }

    /// Closed-form gate of the scheme.
    pub fn gate(&self) -> Result<CMat2> {
        self.validate()?;
        Ok(match *self {
            SchemeParams::SingleLoopPi { n } => gate_single_pi(n),
            SchemeParams::TwoLoopPi { n1, n2 } => gate_two_loop(n1, n2),
            SchemeParams::OffResonant { n, ratio } => gate_offresonant(n, ratio)?.0,
            SchemeParams::MultiPulseL2 { n, eta } => gate_l2(n, eta),
        })
    }

    /// Sum of the pulse areas, in units where `W0 = 1` for the detuned scheme.
    pub fn total_area(&self) -> f64 {
        match *self {
            SchemeParams::SingleLoopPi { .. } | SchemeParams::MultiPulseL2 { .. } => PI,
            SchemeParams::TwoLoopPi { .. } => 2.0 * PI,
            SchemeParams::OffResonant { ratio, .. } => PI / (ratio * ratio + 1.0).sqrt(),
        }
    }
}

/// Multi-pulse scheme for gates with nonzero trace, single pi loop otherwise.
pub fn select_scheme(target: &GateTarget) -> SchemeKind {
    if target.trace_abs() > TRACE_TOLERANCE {
        SchemeKind::MultiPulseL2
    } else {
        SchemeKind::SingleLoopPi
    }
}

fn unreachable(kind: SchemeKind) -> HoloError {
    HoloError::Unreachable {
        scheme: kind.name(),
        reachable: kind.reachable(),
    }
}

/// `n1` in the plane normal to `m`: projection of z (x when `m` is along z).
fn two_loop_first_axis(m: [f64; 3]) -> [f64; 3] {
    for reference in [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]] {
        let along = dot(reference, m);
        let p = [
            reference[0] - along * m[0],
            reference[1] - along * m[1],
            reference[2] - along * m[2],
        ];
        let len = norm(p);
        if len > 1e-6 {
            return [p[0] / len, p[1] / len, p[2] / len];
        }
    }
    unreachable!("x and z cannot both be parallel to a unit vector")
}

/// Scheme parameters realizing `target` up to global phase.
pub fn synthesize(target: &GateTarget, kind: SchemeKind) -> Result<SchemeParams> {
    let m = target.axis;
    let alpha = target.angle;
    match kind {
        SchemeKind::MultiPulseL2 => {
            let n = if target.is_identity() {
                [0.0, 0.0, 1.0]
            } else {
                m
            };
            Ok(SchemeParams::MultiPulseL2 {
                n,
                eta: wrap_angle(PI - alpha),
            })
        }
        SchemeKind::TwoLoopPi => {
            let n1 = two_loop_first_axis(m);
            let (s, co) = (0.5 * alpha).sin_cos();
            let side = cross(m, n1);
            let n2 = [
                n1[0] * co + side[0] * s,
                n1[1] * co + side[1] * s,
                n1[2] * co + side[2] * s,
            ];
            let len = norm(n2);
            Ok(SchemeParams::TwoLoopPi {
                n1,
                n2: [n2[0] / len, n2[1] / len, n2[2] / len],
            })
        }
        SchemeKind::OffResonant => {
            if !(alpha > 0.0 && alpha <= PI) {
                return Err(unreachable(kind));
            }
            // pi - chi(r) = alpha with chi/pi = r / sqrt(r^2 + 1).
            let s = (PI - alpha) / PI;
            let ratio = s / (1.0 - s * s).sqrt();
            debug_assert!((offresonant_chi(ratio) - (PI - alpha)).abs() < 1e-9);
            Ok(SchemeParams::OffResonant { n: m, ratio })
        }
        SchemeKind::SingleLoopPi => {
            if target.trace_abs() > TRACE_TOLERANCE {
                return Err(unreachable(kind));
            }
            Ok(SchemeParams::SingleLoopPi { n: m })
        }
    }
}

/// Pulse settings used when a scheme is turned into segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Shape family and per-segment duration; the amplitude is rescaled.
    pub envelope: PulseEnvelope,
    /// Reject, rather than replace, non-square shapes for the detuned scheme.
    pub strict: bool,
    /// Rabi amplitude `W0` of the detuned square pulse.
    pub rabi: f64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            envelope: PulseEnvelope::square(1.0, 1.0).expect("valid square envelope"),
            strict: false,
            rabi: 1.0,
        }
    }
}

/// Pulse program realizing a scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "program", rename_all = "kebab-case")]
pub enum Program {
    /// Loops applied in order.
    Loops {
        loops: Vec<LoopSpec>,
    },
    OffResonant {
        spec: OffResSpec,
    },
}

impl Program {
    pub fn evaluate(&self, evaluation: &Evaluation) -> Result<HolonomyResult> {
        match self {
            Program::Loops { loops } => {
                let mut iter = loops.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| HoloError::InvalidArgument("program has no loops".into()))?;
                let mut acc = compose_loop(first, evaluation)?;
                for lp in iter {
                    acc = acc.then(&compose_loop(lp, evaluation)?);
                }
                Ok(acc)
            }
            Program::OffResonant { spec } => compose_offresonant(spec, evaluation),
        }
    }

    pub fn total_area(&self) -> Result<f64> {
        match self {
            Program::Loops { loops } => Ok(loops.iter().map(LoopSpec::total_area).sum()),
            Program::OffResonant { spec } => crate::model::pulse_area(&spec.envelope),
        }
    }
}

fn laser_for(n: [f64; 3]) -> Result<crate::model::LaserParams> {
    Ok(BlochAxis::from_vector(n)?.params())
}

/// Segments realizing `params` with the envelope family of `options`.
pub fn compile_to_segments(params: &SchemeParams, options: &CompileOptions) -> Result<Program> {
    params.validate()?;
    options.envelope.validate()?;
    let env = &options.envelope;
    let single = |n: [f64; 3]| -> Result<LoopSpec> {
        LoopSpec::new(laser_for(n)?, vec![SegmentSpec::new(env, 0.0, PI)?])
    };
    match *params {
        SchemeParams::SingleLoopPi { n } => Ok(Program::Loops {
            loops: vec![single(n)?],
        }),
        SchemeParams::TwoLoopPi { n1, n2 } => Ok(Program::Loops {
            loops: vec![single(n1)?, single(n2)?],
        }),
        SchemeParams::MultiPulseL2 { n, eta } => Ok(Program::Loops {
            loops: vec![LoopSpec::new(
                laser_for(n)?,
                vec![
                    SegmentSpec::new(env, 0.0, PI / 2.0)?,
                    SegmentSpec::new(env, eta, PI / 2.0)?,
                ],
            )?],
        }),
        SchemeParams::OffResonant { n, ratio } => {
            if !matches!(env.shape, PulseShape::Square) {
                if options.strict {
                    return Err(HoloError::SquarePulseRequired);
                }
                log::warn!("detuned scheme needs a square pulse; ignoring the requested shape");
            }
            if !(options.rabi.is_finite() && options.rabi > 0.0) {
                return Err(HoloError::InvalidArgument(format!(
                    "Rabi amplitude {} must be positive",
                    options.rabi
                )));
            }
            let delta = 2.0 * ratio * options.rabi;
            let tau = cyclic_duration_offres(options.rabi, delta)?;
            Ok(Program::OffResonant {
                spec: OffResSpec {
                    laser: laser_for(n)?,
                    delta,
                    envelope: PulseEnvelope::square(options.rabi, tau)?,
                },
            })
        }
    }
}

/// One row of the scheme comparison for a target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub scheme: String,
    pub params: Option<SchemeParams>,
    pub parameter_count: usize,
    pub loops: usize,
    pub total_area: f64,
    pub square_required: bool,
}

/// Schemes reaching `target`, in the order of [`SchemeKind::ALL`]; the
/// identity also gets the empty program.
pub fn compare(target: &GateTarget) -> Vec<CompareRow> {
    let mut rows: Vec<CompareRow> = SchemeKind::ALL
        .into_iter()
        .filter_map(|kind| {
            let params = synthesize(target, kind).ok()?;
            Some(CompareRow {
                scheme: kind.name().to_string(),
                params: Some(params),
                parameter_count: kind.parameter_count(),
                loops: kind.loop_count(),
                total_area: params.total_area(),
                square_required: kind.requires_square_pulse(),
            })
        })
        .collect();
    if target.is_identity() {
        rows.push(CompareRow {
            scheme: "identity".to_string(),
            params: None,
            parameter_count: 0,
            loops: 0,
            total_area: 0.0,
            square_required: false,
        });
    }
    rows
}

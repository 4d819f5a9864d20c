use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};

use super::laser::LaserParams;

/// Default gaussian width as a fraction of the pulse duration.
pub const DEFAULT_SIGMA_FRACTION: f64 = 1.0 / 6.0;

/// Real envelope family. Values are multiplied by the envelope amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PulseShape {
    Square,
    /// Gaussian centred on the pulse midpoint and truncated to `[0, tau]`;
    /// `sigma = sigma_fraction * tau`.
    Gaussian {
        sigma_fraction: f64,
    },
    /// `sin^2(pi t / tau)`.
    Sin2,
    Sampled {
        samples: SampledShape,
    },
}

/// Tabulated envelope interpolated by a natural cubic spline. The spline is
/// C2, so the fourth-order propagator keeps its order across sample knots,
/// and its integral is exact (trapezoid plus curvature correction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct SampledShape {
    times: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl SampledShape {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(HoloError::InvalidEnvelope(
                "sampled envelope needs at least two samples".into(),
            ));
        }
        let (times, values): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        if times.iter().chain(values.iter()).any(|x| !x.is_finite()) {
            return Err(HoloError::InvalidEnvelope("non-finite sample".into()));
        }
        if times[0] < 0.0 {
            return Err(HoloError::InvalidEnvelope(
                "sample times must be non-negative".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(HoloError::InvalidEnvelope(
                "sample times must be strictly increasing".into(),
            ));
        }
        let second = natural_spline_second_derivatives(&times, &values);
        Ok(Self {
            times,
            values,
            second,
        })
    }

    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.times
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .collect()
    }

    pub fn first_time(&self) -> f64 {
        self.times[0]
    }

    pub fn last_time(&self) -> f64 {
        *self.times.last().expect("at least two samples")
    }

    /// Same profile with times stretched so the last sample sits at `end`.
    pub fn stretched_to(&self, end: f64) -> Result<Self> {
        let k = end / self.last_time();
        Self::new(
            self.times
                .iter()
                .zip(self.values.iter())
                .map(|(t, v)| (t * k, *v))
                .collect(),
        )
    }

    fn value(&self, t: f64) -> f64 {
        if t < self.first_time() || t > self.last_time() {
            return 0.0;
        }
        let i = match self.times.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= self.times.len() => self.times.len() - 2,
            k => k - 1,
        };
        let (x0, x1) = (self.times[i], self.times[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.values[i]
            + b * self.values[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }

    fn integral(&self) -> f64 {
        (0..self.times.len() - 1)
            .map(|i| {
                let h = self.times[i + 1] - self.times[i];
                0.5 * h * (self.values[i] + self.values[i + 1])
                    - h * h * h * (self.second[i] + self.second[i + 1]) / 24.0
            })
            .sum()
    }
}

impl TryFrom<Vec<(f64, f64)>> for SampledShape {
    type Error = HoloError;
    fn try_from(samples: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(samples)
    }
}

impl From<SampledShape> for Vec<(f64, f64)> {
    fn from(s: SampledShape) -> Self {
        s.samples()
    }
}

fn natural_spline_second_derivatives(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior equations.
    let interior = n - 2;
    let mut diag = vec![0.0; interior];
    let mut upper = vec![0.0; interior];
    let mut rhs = vec![0.0; interior];
    for k in 0..interior {
        let i = k + 1;
        let h0 = x[i] - x[i - 1];
        let h1 = x[i + 1] - x[i];
        diag[k] = 2.0 * (h0 + h1);
        upper[k] = h1;
        rhs[k] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
    }
    for k in 1..interior {
        let lower = x[k + 1] - x[k];
        let w = lower / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        rhs[k] -= w * rhs[k - 1];
    }
    for k in (0..interior).rev() {
        let next = if k + 1 < interior { m[k + 2] } else { 0.0 };
        m[k + 1] = (rhs[k] - upper[k] * next) / diag[k];
    }
    m
}

/// Rabi envelope `W(t)`, zero outside `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    pub shape: PulseShape,
    pub duration: f64,
    pub amplitude: f64,
}

impl PulseEnvelope {
    pub fn new(shape: PulseShape, duration: f64, amplitude: f64) -> Result<Self> {
        let env = Self {
            shape,
            duration,
            amplitude,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn square(amplitude: f64, duration: f64) -> Result<Self> {
        Self::new(PulseShape::Square, duration, amplitude)
    }

    pub fn gaussian(amplitude: f64, duration: f64) -> Result<Self> {
        Self::new(
            PulseShape::Gaussian {
                sigma_fraction: DEFAULT_SIGMA_FRACTION,
            },
            duration,
            amplitude,
        )
    }

    pub fn sin2(amplitude: f64, duration: f64) -> Result<Self> {
        Self::new(PulseShape::Sin2, duration, amplitude)
    }

    /// Tabulated envelope lasting until its last sample.
    pub fn sampled(samples: Vec<(f64, f64)>, amplitude: f64) -> Result<Self> {
        let shape = SampledShape::new(samples)?;
        let duration = shape.last_time();
        Self::new(PulseShape::Sampled { samples: shape }, duration, amplitude)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.duration.is_finite() || self.duration < 0.0 {
            return Err(HoloError::InvalidEnvelope(format!(
                "duration {} must be finite and non-negative",
                self.duration
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(HoloError::InvalidEnvelope("non-finite amplitude".into()));
        }
        match &self.shape {
            PulseShape::Gaussian { sigma_fraction } if !(*sigma_fraction > 0.0) => Err(
                HoloError::InvalidEnvelope("gaussian width must be positive".into()),
            ),
            PulseShape::Sampled { samples }
                if samples.last_time() > self.duration * (1.0 + 1e-12) =>
            {
                Err(HoloError::InvalidEnvelope(
                    "samples extend beyond the pulse duration".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// `W(t)`.
    pub fn value(&self, t: f64) -> f64 {
        let tau = self.duration;
        if !(0.0..=tau).contains(&t) {
            return 0.0;
        }
        self.amplitude
            * match &self.shape {
                PulseShape::Square => 1.0,
                PulseShape::Gaussian { sigma_fraction } => {
                    let sigma = sigma_fraction * tau;
                    let x = (t - 0.5 * tau) / sigma;
                    (-0.5 * x * x).exp()
                }
                PulseShape::Sin2 => (PI * t / tau).sin().powi(2),
                PulseShape::Sampled { samples } => samples.value(t),
            }
    }

    fn unit_area(&self) -> f64 {
        let tau = self.duration;
        match &self.shape {
            PulseShape::Square => tau,
            PulseShape::Gaussian { sigma_fraction } => {
                let sigma = sigma_fraction * tau;
                sigma
                    * (2.0 * PI).sqrt()
                    * libm::erf(tau / (2.0 * std::f64::consts::SQRT_2 * sigma))
            }
            PulseShape::Sin2 => 0.5 * tau,
            PulseShape::Sampled { samples } => samples.integral(),
        }
    }

    /// Same shape and duration with amplitude replaced.
    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        Self {
            amplitude,
            ..self.clone()
        }
    }

    /// Shape family of this envelope stretched to a new duration. Sampled
    /// profiles are stretched so their last sample lands on `duration`.
    pub fn with_duration(&self, duration: f64) -> Result<Self> {
        let shape = match &self.shape {
            PulseShape::Sampled { samples } => PulseShape::Sampled {
                samples: samples.stretched_to(duration)?,
            },
            other => other.clone(),
        };
        Self::new(shape, duration, self.amplitude)
    }
}

/// Pulse area `a = integral of W(t) dt` over the pulse.
pub fn pulse_area(env: &PulseEnvelope) -> Result<f64> {
    env.validate()?;
    Ok(env.amplitude * env.unit_area())
}

/// Rescales the amplitude so the envelope has area `a_target`.
pub fn scale_to_area(env: &PulseEnvelope, a_target: f64) -> Result<PulseEnvelope> {
    if !(a_target.is_finite() && a_target > 0.0) {
        return Err(HoloError::InvalidArgument(format!(
            "target area {a_target} must be positive"
        )));
    }
    env.validate()?;
    let unit = env.unit_area();
    if !(unit.is_finite() && unit > 0.0) {
        return Err(HoloError::ZeroArea);
    }
    Ok(env.with_amplitude(a_target / unit))
}

/// One resonant Lambda-drive segment: envelope, phase shift of both lasers
/// relative to the first segment, and the pulse area it realizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub envelope: PulseEnvelope,
    pub eta: f64,
    pub target_area: f64,
}

impl SegmentSpec {
    /// Rescales `envelope` to `target_area`.
    pub fn new(envelope: &PulseEnvelope, eta: f64, target_area: f64) -> Result<Self> {
        Ok(Self {
            envelope: scale_to_area(envelope, target_area)?,
            eta,
            target_area,
        })
    }
}

/// Ordered segments driven with one set of laser parameters; a loop candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopSpec {
    pub laser: LaserParams,
    pub segments: Vec<SegmentSpec>,
}

impl LoopSpec {
    pub fn new(laser: LaserParams, segments: Vec<SegmentSpec>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(HoloError::InvalidArgument("loop has no segments".into()));
        };
        if first.eta != 0.0 {
            return Err(HoloError::InvalidArgument(
                "the first segment carries the reference phase and must have eta = 0".into(),
            ));
        }
        Ok(Self { laser, segments })
    }

    pub fn total_area(&self) -> f64 {
        self.segments.iter().map(|s| s.target_area).sum()
    }
}

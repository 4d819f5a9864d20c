use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::numkit::{phase, CVec3, C64, ZERO};

/// Threshold below which `|w0|` (resp. `|w1|`) is treated as a pole of the
/// Bloch-sphere parameterization.
const POLE_EPS: f64 = 1e-14;

/// Relative complex amplitudes `(w0, w1)` of the two laser fields driving the
/// `|0> <-> |e>` and `|1> <-> |e>` transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserParams {
    omega0: C64,
    omega1: C64,
}

impl LaserParams {
    /// Accepts a pair already normalized to `|w0|^2 + |w1|^2 = 1` within 1e-12.
    pub fn new(omega0: C64, omega1: C64) -> Result<Self> {
        let norm_sq = omega0.norm_sqr() + omega1.norm_sqr();
        if !norm_sq.is_finite() || (norm_sq - 1.0).abs() > 1e-12 {
            return Err(HoloError::NotNormalized { norm_sq });
        }
        Ok(Self { omega0, omega1 })
    }

    /// Normalizes an arbitrary nonzero pair.
    pub fn normalized(omega0: C64, omega1: C64) -> Result<Self> {
        let norm = (omega0.norm_sqr() + omega1.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(HoloError::NotNormalized {
                norm_sq: norm * norm,
            });
        }
        Ok(Self {
            omega0: omega0 / norm,
            omega1: omega1 / norm,
        })
    }

    pub fn omega0(&self) -> C64 {
        self.omega0
    }

    pub fn omega1(&self) -> C64 {
        self.omega1
    }

    /// Both amplitudes multiplied by `e^{i eta}`.
    pub fn phase_shifted(&self, eta: f64) -> Self {
        let p = phase(eta);
        Self {
            omega0: self.omega0 * p,
            omega1: self.omega1 * p,
        }
    }

    pub fn axis(&self) -> BlochAxis {
        bloch_from_params(self)
    }
}

/// Polar angles of the unit vector `n` fixed by the ratio `w0/w1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAxis {
    pub theta: f64,
    pub phi: f64,
}

impl BlochAxis {
    /// Wraps `phi` into `[0, 2pi)`. `theta` must lie in `[0, pi]`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) || !(0.0..=PI).contains(&theta) {
            return Err(HoloError::InvalidArgument(format!(
                "polar angle theta = {theta} outside [0, pi]"
            )));
        }
        Ok(Self {
            theta,
            phi: wrap_angle(phi),
        })
    }

    pub fn z() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn x() -> Self {
        Self {
            theta: PI / 2.0,
            phi: 0.0,
        }
    }

    pub fn y() -> Self {
        Self {
            theta: PI / 2.0,
            phi: PI / 2.0,
        }
    }

    /// Inverse of [`BlochAxis::unit_vector`]; normalizes the input first.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(HoloError::InvalidArgument(
                "axis vector must be nonzero and finite".into(),
            ));
        }
        let (x, y, z) = (v[0] / norm, v[1] / norm, v[2] / norm);
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = if x.hypot(y) < POLE_EPS {
            0.0
        } else {
            wrap_angle(y.atan2(x))
        };
        Ok(Self { theta, phi })
    }

    /// `n = (sin theta cos phi, sin theta sin phi, cos theta)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn params(&self) -> LaserParams {
        omegas_from_bloch(self)
    }
}

/// Maps an angle into `[0, 2pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `w0 = -e^{i phi} sin(theta/2)`, `w1 = cos(theta/2)`.
///
/// The overall phase of the pair is fixed by taking `w1` real and
/// non-negative; the map only constrains `w0/w1 = -e^{i phi} tan(theta/2)`.
pub fn omegas_from_bloch(axis: &BlochAxis) -> LaserParams {
    let half = 0.5 * axis.theta;
    LaserParams {
        omega0: -phase(axis.phi) * half.sin(),
        omega1: C64::new(half.cos(), 0.0),
    }
}

/// Inverse of [`omegas_from_bloch`] modulo the overall phase of the pair.
///
/// At `theta = 0` the azimuth is set to 0; at `theta = pi` it is read from
/// `arg(-w0)`.
pub fn bloch_from_omegas(params: &LaserParams) -> Result<BlochAxis> {
    LaserParams::new(params.omega0, params.omega1).map(|p| bloch_from_params(&p))
}

fn bloch_from_params(params: &LaserParams) -> BlochAxis {
    let (w0, w1) = (params.omega0, params.omega1);
    let theta = 2.0 * w0.norm().atan2(w1.norm());
    if w0.norm() < POLE_EPS {
        return BlochAxis {
            theta: 0.0,
            phi: 0.0,
        };
    }
    let phi = if w1.norm() < POLE_EPS {
        (-w0).arg()
    } else {
        // Gauge w1 onto the positive real axis.
        let gauge = phase(-w1.arg());
        (-w0 * gauge).arg()
    };
    BlochAxis {
        theta,
        phi: wrap_angle(phi),
    }
}

/// Dark and bright states, `|d> = -w1|0> + w0|1>` and
/// `|b> = w0*|0> + w1*|1>`.
pub fn dark_bright(params: &LaserParams) -> (CVec3, CVec3) {
    let (w0, w1) = (params.omega0, params.omega1);
    (
        CVec3::new(-w1, w0, ZERO),
        CVec3::new(w0.conj(), w1.conj(), ZERO),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::{projector_defect, CMat3, ONE};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-14
    }

    #[test]
    fn omegas_at_north_pole() {
        let p = omegas_from_bloch(&BlochAxis::z());
        assert!(close(p.omega0(), ZERO) && close(p.omega1(), ONE));
        let (d, b) = dark_bright(&p);
        assert!(d.max_abs_diff(&CVec3::ket0().scale(-ONE)) < 1e-15);
        assert!(b.max_abs_diff(&CVec3::ket1()) < 1e-15);
    }

    #[test]
    fn omegas_on_equator() {
        let p = omegas_from_bloch(&BlochAxis::x());
        assert!(close(p.omega0(), C64::new(-FRAC_1_SQRT_2, 0.0)));
        assert!(close(p.omega1(), C64::new(FRAC_1_SQRT_2, 0.0)));
        // ratio = -tan(pi/4) = -1
        assert!(close(p.omega0() / p.omega1(), C64::new(-1.0, 0.0)));
    }

    #[test]
    fn omegas_at_south_pole() {
        for phi in [0.0, 0.4, 2.0, 5.5] {
            let p = omegas_from_bloch(&BlochAxis::new(PI, phi).unwrap());
            assert!(close(p.omega0(), -phase(phi)));
            assert!(p.omega1().norm() < 1e-15);
        }
    }

    #[test]
    fn bloch_from_omegas_examples() {
        let a = bloch_from_omegas(&LaserParams::new(ZERO, ONE).unwrap()).unwrap();
        assert_eq!((a.theta, a.phi), (0.0, 0.0));

        let s = FRAC_1_SQRT_2;
        let a = bloch_from_omegas(&LaserParams::new(C64::new(-s, 0.0), C64::new(s, 0.0)).unwrap())
            .unwrap();
        assert!((a.theta - FRAC_PI_2).abs() < 1e-14 && a.phi.abs() < 1e-14);

        let a = bloch_from_omegas(&LaserParams::new(C64::new(0.0, -s), C64::new(s, 0.0)).unwrap())
            .unwrap();
        assert!((a.theta - FRAC_PI_2).abs() < 1e-14 && (a.phi - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn bloch_is_gauge_invariant() {
        let axis = BlochAxis::new(1.1, 4.0).unwrap();
        let p = omegas_from_bloch(&axis).phase_shifted(2.3);
        let back = p.axis();
        assert!((back.theta - axis.theta).abs() < 1e-12);
        assert!((back.phi - axis.phi).abs() < 1e-12);
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(
            LaserParams::new(ONE, ONE),
            Err(HoloError::NotNormalized { .. })
        ));
    }

    #[test]
    fn dark_bright_examples() {
        let (d, b) = dark_bright(&LaserParams::new(ONE, ZERO).unwrap());
        assert!(d.max_abs_diff(&CVec3::ket1()) < 1e-15);
        assert!(b.max_abs_diff(&CVec3::ket0()) < 1e-15);

        let s = FRAC_1_SQRT_2;
        let (d, b) = dark_bright(&LaserParams::new(C64::new(-s, 0.0), C64::new(s, 0.0)).unwrap());
        assert!(d.max_abs_diff(&CVec3::new(C64::new(-s, 0.0), C64::new(-s, 0.0), ZERO)) < 1e-15);
        assert!(b.max_abs_diff(&CVec3::new(C64::new(-s, 0.0), C64::new(s, 0.0), ZERO)) < 1e-15);
        assert!(d.inner(&b).norm() < 1e-15);
        let pdb = d.projector() + b.projector();
        assert!(projector_defect(&pdb, &CMat3::computational_projector()).unwrap() < 1e-15);
    }

    #[test]
    fn axis_vector_round_trip() {
        let axis = BlochAxis::new(2.0, 1.0).unwrap();
        let back = BlochAxis::from_vector(axis.unit_vector()).unwrap();
        assert!((back.theta - 2.0).abs() < 1e-12 && (back.phi - 1.0).abs() < 1e-12);
        let pole = BlochAxis::from_vector([0.0, 0.0, -3.0]).unwrap();
        assert!((pole.theta - PI).abs() < 1e-15 && pole.phi == 0.0);
    }
}

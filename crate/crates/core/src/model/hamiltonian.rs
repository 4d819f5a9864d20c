use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};
use crate::numkit::{c, CMat3, CVec3, C64};

use super::laser::{dark_bright, LaserParams};

/// Detunings of the two ground levels.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Detunings {
    pub delta0: f64,
    pub delta1: f64,
}

/// `D0|0><0| + D1|1><1| + U0|e><0| + U1|e><1| + h.c.`
pub fn hamiltonian_general(up0: C64, up1: C64, det: Detunings) -> CMat3 {
    let mut h = CMat3::diag([c(det.delta0, 0.0), c(det.delta1, 0.0), c(0.0, 0.0)]);
    h.0[2][0] = up0;
    h.0[0][2] = up0.conj();
    h.0[2][1] = up1;
    h.0[1][2] = up1.conj();
    h
}

/// Dimensionless resonant coupler `H = |e><b| + |b><e|`.
pub fn hamiltonian_resonant_core(params: &LaserParams) -> CMat3 {
    let (_, b) = dark_bright(params);
    coupler(&CVec3::ket_e(), &b)
}

/// `|x><y| + |y><x|`.
pub fn coupler(x: &CVec3, y: &CVec3) -> CMat3 {
    x.outer(y) + y.outer(x)
}

/// Square off-resonant drive `D|e><e| + W0 (|e><b| + |b><e|)`.
pub fn hamiltonian_offresonant(omega0_rabi: f64, delta: f64, params: &LaserParams) -> CMat3 {
    let mut h = hamiltonian_resonant_core(params).scale_re(omega0_rabi);
    h.0[2][2] += c(delta, 0.0);
    h
}

/// Coupler of the phase-shifted segment, `e^{-i eta}|b><e| + e^{i eta}|e><b|`,
/// equal to the resonant coupler for `w_p -> e^{i eta} w_p`.
pub fn hamiltonian_eta_shifted(params: &LaserParams, eta: f64) -> CMat3 {
    hamiltonian_resonant_core(&params.phase_shifted(eta))
}

/// Loop duration `2pi / sqrt(D^2 + 4 W0^2)` of the square off-resonant pulse.
pub fn cyclic_duration_offres(omega0_rabi: f64, delta: f64) -> Result<f64> {
    if !(omega0_rabi.is_finite() && delta.is_finite()) || omega0_rabi < 0.0 {
        return Err(HoloError::InvalidArgument(format!(
            "Rabi frequency {omega0_rabi} and detuning {delta} must be finite with W0 >= 0"
        )));
    }
    let gap = (delta * delta + 4.0 * omega0_rabi * omega0_rabi).sqrt();
    if gap == 0.0 {
        return Err(HoloError::InvalidArgument(
            "W0 = D = 0 gives no evolution".into(),
        ));
    }
    Ok(std::f64::consts::TAU / gap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::laser::{omegas_from_bloch, BlochAxis};
    use crate::numkit::{hermitian_eigen, ONE, ZERO};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn general_zero_and_single_coupling() {
        assert_eq!(
            hamiltonian_general(ZERO, ZERO, Detunings::default()),
            CMat3::zeros()
        );
        let h = hamiltonian_general(ONE, ZERO, Detunings::default());
        let expected = coupler(&CVec3::ket_e(), &CVec3::ket0());
        assert_eq!(h, expected);
    }

    #[test]
    fn general_reduces_to_dark_bright_form() {
        let s = FRAC_1_SQRT_2;
        let p = LaserParams::new(c(-s, 0.0), c(s, 0.0)).unwrap();
        let h = hamiltonian_general(p.omega0() * 2.0, p.omega1() * 2.0, Detunings::default());
        let (_, b) = dark_bright(&p);
        let expected = coupler(&CVec3::ket_e(), &b).scale_re(2.0);
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn general_with_detunings_is_hermitian() {
        let h = hamiltonian_general(
            c(0.2, 0.3),
            c(-1.0, 0.5),
            Detunings {
                delta0: 0.4,
                delta1: -0.7,
            },
        );
        assert!(h.hermiticity_defect() == 0.0);
        assert_eq!(h.0[0][0], c(0.4, 0.0));
        assert_eq!(h.0[1][1], c(-0.7, 0.0));
    }

    #[test]
    fn resonant_core_structure() {
        let p = LaserParams::new(ZERO, ONE).unwrap();
        assert_eq!(
            hamiltonian_resonant_core(&p),
            coupler(&CVec3::ket_e(), &CVec3::ket1())
        );

        let p = omegas_from_bloch(&BlochAxis::new(0.9, 2.2).unwrap());
        let h = hamiltonian_resonant_core(&p);
        let eig = hermitian_eigen(&h);
        for (got, want) in eig.values.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let (d, b) = dark_bright(&p);
        assert!(h.apply(&d).norm() < 1e-15);
        let h2 = h * h;
        assert!(h2.max_abs_diff(&(b.projector() + CVec3::ket_e().projector())) < 1e-15);
    }

    #[test]
    fn offresonant_examples() {
        let p = omegas_from_bloch(&BlochAxis::new(1.3, 0.2).unwrap());
        assert_eq!(
            hamiltonian_offresonant(1.0, 0.0, &p),
            hamiltonian_resonant_core(&p)
        );

        let p = LaserParams::new(ZERO, ONE).unwrap();
        let h = hamiltonian_offresonant(1.0, 2.0, &p);
        let expected =
            CVec3::ket_e().projector().scale_re(2.0) + coupler(&CVec3::ket_e(), &CVec3::ket1());
        assert_eq!(h, expected);

        // Dressed-level gap sqrt(D^2 + 4 W0^2): eigenvalues {0, (D -+ gap)/2}.
        let (w0, delta) = (0.7, 1.9);
        let eig = hermitian_eigen(&hamiltonian_offresonant(w0, delta, &p));
        let gap = (delta * delta + 4.0 * w0 * w0).sqrt();
        assert!((eig.values[2] - eig.values[0] - gap).abs() < 1e-13);
        assert!(eig.values[1].abs() < 1e-14);
    }

    #[test]
    fn eta_shift_examples() {
        let p = omegas_from_bloch(&BlochAxis::new(0.4, 5.0).unwrap());
        assert_eq!(
            hamiltonian_eta_shifted(&p, 0.0),
            hamiltonian_resonant_core(&p)
        );

        let p = LaserParams::new(ZERO, ONE).unwrap();
        let h = hamiltonian_eta_shifted(&p, PI);
        let expected = -coupler(&CVec3::ket_e(), &CVec3::ket1());
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn eta_shift_equals_explicit_phase_form() {
        // e^{-i eta}|b><e| + e^{i eta}|e><b| built directly.
        let p = omegas_from_bloch(&BlochAxis::new(2.1, 0.3).unwrap());
        let (_, b) = dark_bright(&p);
        let eta = 0.83;
        let e = CVec3::ket_e();
        let expected = b.outer(&e).scale(crate::numkit::phase(-eta))
            + e.outer(&b).scale(crate::numkit::phase(eta));
        assert!(hamiltonian_eta_shifted(&p, eta).max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn cyclic_duration_examples() {
        assert!((cyclic_duration_offres(1.0, 0.0).unwrap() - PI).abs() < 1e-15);
        assert!((cyclic_duration_offres(1.0, 2.0).unwrap() - 2.0 * PI / 8f64.sqrt()).abs() < 1e-15);
        assert!((cyclic_duration_offres(1.0, 2.0).unwrap() - 2.2214).abs() < 1e-4);
        assert!((cyclic_duration_offres(0.5, 0.0).unwrap() - 2.0 * PI).abs() < 1e-15);
        assert!(cyclic_duration_offres(0.0, 0.0).is_err());
    }
}

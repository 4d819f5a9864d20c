use std::f64::consts::PI;

use crate::error::{HoloError, Result};
use crate::numkit::{phase, CMat2, I, ONE};

/// Single resonant pi pulse pair: `U = n . sigma`.
pub fn gate_single_pi(n: [f64; 3]) -> CMat2 {
    CMat2::pauli_dot(n)
}

/// Two consecutive pi loops: `(n1 . n2) P(0) - i (n1 x n2) . sigma`.
pub fn gate_two_loop(n1: [f64; 3], n2: [f64; 3]) -> CMat2 {
    CMat2::identity() * dot(n1, n2) - CMat2::pauli_dot(cross(n1, n2)) * I
}

/// Phase `chi = pi r / sqrt(r^2 + 1)` of the off-resonant loop, `r = D/(2 W0)`.
pub fn offresonant_chi(ratio: f64) -> f64 {
    PI * ratio / (ratio * ratio + 1.0).sqrt()
}

/// Square off-resonant loop with `ratio = D/(2 W0)`:
/// `e^{i(pi - chi)/2} exp(-i (pi - chi)/2 n . sigma)`. Returns the gate and
/// `chi`.
pub fn gate_offresonant(n: [f64; 3], ratio: f64) -> Result<(CMat2, f64)> {
    if !(ratio >= 0.0 && ratio.is_finite()) {
        return Err(HoloError::InvalidArgument(format!(
            "detuning ratio {ratio} must be finite and non-negative"
        )));
    }
    let chi = offresonant_chi(ratio);
    let angle = PI - chi;
    Ok((CMat2::rotation(n, angle) * phase(0.5 * angle), chi))
}

/// Two half-pi segments with the second phase-shifted by `eta`:
/// `|d><d| - e^{-i eta}|b><b|`, written with `|d><d| = (1 + n.sigma)/2` and
/// `|b><b| = (1 - n.sigma)/2` so that `eta = 0` yields `n . sigma` exactly.
pub fn gate_l2(n: [f64; 3], eta: f64) -> CMat2 {
    let e = phase(-eta);
    CMat2::identity() * ((ONE - e) * 0.5) + CMat2::pauli_dot(n) * ((ONE + e) * 0.5)
}

/// `e^{i(pi - eta)/2} exp(-i (pi - eta)/2 n . sigma)`, the rotation form of
/// [`gate_l2`].
pub fn gate_l2_rotation_form(n: [f64; 3], eta: f64) -> CMat2 {
    let angle = PI - eta;
    CMat2::rotation(n, angle) * phase(0.5 * angle)
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{dark_bright, BlochAxis};
    use crate::numkit::{gate_distance_up_to_phase, CMat3};
    use std::f64::consts::FRAC_1_SQRT_2;

    const Z: [f64; 3] = [0.0, 0.0, 1.0];
    const X: [f64; 3] = [1.0, 0.0, 0.0];

    #[test]
    fn single_pi_examples() {
        assert_eq!(gate_single_pi(Z), CMat2::pauli_z());
        assert_eq!(gate_single_pi(X), CMat2::pauli_x());
        let s = 1.0 / 3f64.sqrt();
        let g = gate_single_pi([s, s, s]);
        let want = (CMat2::pauli_x() + CMat2::pauli_y() + CMat2::pauli_z()) * s;
        assert!(g.max_abs_diff(&want) < 1e-15);
        assert!(g.trace().norm() < 1e-15);
        assert!(g.hermiticity_defect() < 1e-15);
        assert!(g.unitarity_defect() < 1e-15);
    }

    #[test]
    fn single_pi_equals_dark_bright_difference() {
        // n . sigma = |d><d| - |b><b| on the computational block.
        for (theta, phi) in [(0.3, 0.1), (1.9, 4.4), (3.0, 2.0)] {
            let axis = BlochAxis::new(theta, phi).unwrap();
            let (d, b) = dark_bright(&axis.params());
            let block: CMat3 = d.projector() - b.projector();
            assert!(
                block
                    .computational_block()
                    .max_abs_diff(&gate_single_pi(axis.unit_vector()))
                    < 1e-15
            );
        }
    }

    #[test]
    fn two_loop_examples() {
        let n = [0.6, 0.0, 0.8];
        assert!(gate_two_loop(n, n).max_abs_diff(&CMat2::identity()) < 1e-15);
        let g = gate_two_loop(Z, X);
        assert!(g.max_abs_diff(&(CMat2::pauli_y() * (-I))) < 1e-15);
        // = sigma_x sigma_z
        assert!(g.max_abs_diff(&(CMat2::pauli_x() * CMat2::pauli_z())) < 1e-15);
    }

    #[test]
    fn offresonant_examples() {
        let n = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        let (g, chi) = gate_offresonant(n, 0.0).unwrap();
        assert_eq!(chi, 0.0);
        assert!(gate_distance_up_to_phase(&g, &gate_single_pi(n)).unwrap() < 1e-15);

        let (g, chi) = gate_offresonant(n, 1e3).unwrap();
        assert!(PI - chi < 2e-6);
        assert!(gate_distance_up_to_phase(&g, &CMat2::identity()).unwrap() < 1e-5);

        let (g, chi) = gate_offresonant(n, 1.0).unwrap();
        assert!((chi - PI * FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g.rotation_angle() - PI * (1.0 - FRAC_1_SQRT_2)).abs() < 1e-12);

        assert!(gate_offresonant(n, -0.1).is_err());
    }

    #[test]
    fn l2_examples() {
        let n = BlochAxis::new(0.7, 2.9).unwrap().unit_vector();
        assert_eq!(gate_l2(n, 0.0), gate_single_pi(n));
        assert!(gate_distance_up_to_phase(&gate_l2(n, PI), &CMat2::identity()).unwrap() < 1e-15);
    }

    #[test]
    fn l2_forms_agree() {
        for (theta, phi, eta) in [(0.2, 0.0, 0.4), (2.5, 5.1, 2.9), (1.0, 1.0, 6.0)] {
            let axis = BlochAxis::new(theta, phi).unwrap();
            let n = axis.unit_vector();
            let a = gate_l2(n, eta);
            let b = gate_l2_rotation_form(n, eta);
            assert!(a.max_abs_diff(&b) < 1e-12);
            let (d, bright) = dark_bright(&axis.params());
            let c = (d.projector() - bright.projector().scale(phase(-eta))).computational_block();
            assert!(a.max_abs_diff(&c) < 1e-15);
        }
    }

    #[test]
    fn phase_gate_with_omega0_one() {
        // w0 = 1 puts the bright state on |0>: the gate is diag(e^{i zeta}, 1).
        let zeta = 0.8;
        let axis = BlochAxis::new(PI, PI).unwrap();
        let g = gate_l2(axis.unit_vector(), PI - zeta);
        assert!((g.0[0][0] - phase(zeta)).norm() < 1e-15);
        assert!((g.0[1][1] - ONE).norm() < 1e-15);
        assert!(g.0[0][1].norm() < 1e-15 && g.0[1][0].norm() < 1e-15);
    }
}

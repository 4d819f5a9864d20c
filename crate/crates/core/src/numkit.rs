//! Fixed-size dense complex linear algebra for the three-level state space
//! and the two-level gate space.
//!
//! Basis ordering everywhere is `|0>, |1>, |e>`. Gates act on the first two
//! levels and are stored as [`CMat2`] in the `{|0>, |1>}` basis.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HoloError, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for validating that gate inputs are unitary or that projectors
/// are idempotent. Looser than [`Tolerances::algebraic`] so that results of
/// numerical integration are accepted.
pub const INPUT_CHECK_TOL: f64 = 1e-8;

/// Default accuracy targets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Algebraic identities between closed forms.
    pub algebraic: f64,
    /// Results that pass through numerical integration.
    pub dynamics: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-12,
            dynamics: 1e-8,
        }
    }
}

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{i phase}`.
#[inline]
pub fn phase(angle: f64) -> C64 {
    C64::from_polar(1.0, angle)
}

// ---------------------------------------------------------------------------
// CVec3
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CVec3(pub [C64; 3]);

impl CVec3 {
    pub const fn new(a: C64, b: C64, e: C64) -> Self {
        Self([a, b, e])
    }

    pub fn zero() -> Self {
        Self([ZERO; 3])
    }

    /// Unit vector along level `index` (0, 1 or 2 = `|e>`).
    pub fn basis(index: usize) -> Self {
        let mut v = Self::zero();
        v.0[index] = ONE;
        v
    }

    pub fn ket0() -> Self {
        Self::basis(0)
    }

    pub fn ket1() -> Self {
        Self::basis(1)
    }

    pub fn ket_e() -> Self {
        Self::basis(2)
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &CVec3) -> C64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> CVec3 {
        CVec3(self.0.map(|z| z * s))
    }

    /// `|self><other|`.
    pub fn outer(&self, other: &CVec3) -> CMat3 {
        let mut m = CMat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i] * other.0[j].conj();
            }
        }
        m
    }

    /// `|self><self|`.
    pub fn projector(&self) -> CMat3 {
        self.outer(self)
    }

    pub fn max_abs_diff(&self, other: &CVec3) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, rhs: CVec3) -> CVec3 {
        CVec3([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, rhs: CVec3) -> CVec3 {
        CVec3([
            self.0[0] - rhs.0[0],
            self.0[1] - rhs.0[1],
            self.0[2] - rhs.0[2],
        ])
    }
}

impl Mul<C64> for CVec3 {
    type Output = CVec3;
    fn mul(self, rhs: C64) -> CVec3 {
        self.scale(rhs)
    }
}

// ---------------------------------------------------------------------------
// CMat3
// ---------------------------------------------------------------------------

/// Row-major 3x3 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CMat3(pub [[C64; 3]; 3]);

impl CMat3 {
    pub fn zeros() -> Self {
        Self([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        Self::diag([ONE; 3])
    }

    pub fn diag(d: [C64; 3]) -> Self {
        let mut m = Self::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    /// Projector onto the computational subspace, `|0><0| + |1><1|`.
    pub fn computational_projector() -> Self {
        Self::diag([ONE, ONE, ZERO])
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn apply(&self, v: &CVec3) -> CVec3 {
        let mut out = CVec3::zero();
        for i in 0..3 {
            out.0[i] = (0..3).map(|j| self.0[i][j] * v.0[j]).sum();
        }
        out
    }

    pub fn column(&self, j: usize) -> CVec3 {
        CVec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn from_columns(cols: [CVec3; 3]) -> Self {
        let mut m = Self::zeros();
        for (j, col) in cols.iter().enumerate() {
            for i in 0..3 {
                m.0[i][j] = col.0[i];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat3) -> f64 {
        (*self - *other).max_abs()
    }

    /// `max |M - M^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |M^dagger M - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    pub fn commutator(&self, other: &CMat3) -> CMat3 {
        *self * *other - *other * *self
    }

    /// Upper-left block acting on `span{|0>, |1>}`.
    pub fn computational_block(&self) -> CMat2 {
        CMat2([[self.0[0][0], self.0[0][1]], [self.0[1][0], self.0[1][1]]])
    }

    /// Embeds a gate into the three-level space, acting as zero on `|e>`.
    pub fn from_computational_block(g: &CMat2) -> Self {
        let mut m = Self::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = g.0[i][j];
            }
        }
        m
    }
}

impl Add for CMat3 {
    type Output = CMat3;
    fn add(self, rhs: CMat3) -> CMat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for CMat3 {
    type Output = CMat3;
    fn sub(self, rhs: CMat3) -> CMat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Neg for CMat3 {
    type Output = CMat3;
    fn neg(self) -> CMat3 {
        self.scale_re(-1.0)
    }
}

impl Mul for CMat3 {
    type Output = CMat3;
    fn mul(self, rhs: CMat3) -> CMat3 {
        let mut m = CMat3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j]
                    + self.0[i][1] * rhs.0[1][j]
                    + self.0[i][2] * rhs.0[2][j];
            }
        }
        m
    }
}

impl Mul<C64> for CMat3 {
    type Output = CMat3;
    fn mul(self, rhs: C64) -> CMat3 {
        self.scale(rhs)
    }
}

impl Mul<f64> for CMat3 {
    type Output = CMat3;
    fn mul(self, rhs: f64) -> CMat3 {
        self.scale_re(rhs)
    }
}

impl Mul<CVec3> for CMat3 {
    type Output = CVec3;
    fn mul(self, rhs: CVec3) -> CVec3 {
        self.apply(&rhs)
    }
}

// ---------------------------------------------------------------------------
// CMat2
// ---------------------------------------------------------------------------

/// Row-major 2x2 complex matrix in the `{|0>, |1>}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CMat2(pub [[C64; 2]; 2]);

impl CMat2 {
    pub fn zeros() -> Self {
        Self([[ZERO; 2]; 2])
    }

    pub fn identity() -> Self {
        Self([[ONE, ZERO], [ZERO, ONE]])
    }

    pub fn pauli_x() -> Self {
        Self([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        Self([[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Self([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `n . sigma` for a real 3-vector `n`.
    pub fn pauli_dot(n: [f64; 3]) -> Self {
        Self::pauli_x() * n[0] + Self::pauli_y() * n[1] + Self::pauli_z() * n[2]
    }

    /// `exp(-i (angle/2) n . sigma)` for a unit axis `n`.
    pub fn rotation(n: [f64; 3], angle: f64) -> Self {
        let half = 0.5 * angle;
        Self::identity() * half.cos() - Self::pauli_dot(n) * (I * half.sin())
    }

    pub fn adjoint(&self) -> Self {
        Self([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat2) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&Self::identity())
    }

    /// Rotation angle in `[0, 2pi]` of the SU(2) part, read from
    /// `|Tr U| = 2 |cos(angle/2)|` after removing the global phase.
    ///
    /// The sign of the rotation is not recoverable from the trace alone, so
    /// the result is folded into `[0, pi]`.
    pub fn rotation_angle(&self) -> f64 {
        let half_trace = (self.trace().norm() / 2.0).min(1.0);
        2.0 * half_trace.acos()
    }
}

impl Add for CMat2 {
    type Output = CMat2;
    fn add(self, rhs: CMat2) -> CMat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, rhs: CMat2) -> CMat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, rhs: CMat2) -> CMat2 {
        let mut m = CMat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                m.0[i][j] = self.0[i][0] * rhs.0[0][j] + self.0[i][1] * rhs.0[1][j];
            }
        }
        m
    }
}

impl Mul<C64> for CMat2 {
    type Output = CMat2;
    fn mul(self, rhs: C64) -> CMat2 {
        CMat2(self.0.map(|row| row.map(|z| z * rhs)))
    }
}

impl Mul<f64> for CMat2 {
    type Output = CMat2;
    fn mul(self, rhs: f64) -> CMat2 {
        CMat2(self.0.map(|row| row.map(|z| z * rhs)))
    }
}

// ---------------------------------------------------------------------------
// Spectral decomposition
// ---------------------------------------------------------------------------

/// Eigen-decomposition `H = V diag(values) V^dagger` of a hermitian matrix by
/// cyclic complex Jacobi rotations. Eigenvectors are the columns of `V`,
/// eigenvalues are sorted ascending.
#[derive(Debug, Clone, Copy)]
pub struct HermitianEigen {
    pub values: [f64; 3],
    pub vectors: CMat3,
}

const JACOBI_MAX_SWEEPS: usize = 50;

pub fn hermitian_eigen(h: &CMat3) -> HermitianEigen {
    let mut a = *h;
    let mut v = CMat3::identity();
    let scale = h.frobenius_norm();
    if scale == 0.0 {
        return HermitianEigen {
            values: [0.0; 3],
            vectors: v,
        };
    }
    let threshold = (f64::EPSILON * scale * 1e-2).powi(2);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = a.0[0][1].norm_sqr() + a.0[0][2].norm_sqr() + a.0[1][2].norm_sqr();
        if off <= threshold {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = a.0[p][q];
            let mag = apq.norm();
            if mag == 0.0 {
                continue;
            }
            let phi = apq.arg();
            let app = a.0[p][p].re;
            let aqq = a.0[q][q].re;
            // Real rotation angle for the block [[app, |apq|], [|apq|, aqq]].
            let theta = 0.5 * (2.0 * mag).atan2(app - aqq);
            let (s, co) = theta.sin_cos();
            let e = phase(-phi);
            let mut j = CMat3::identity();
            j.0[p][p] = c(co, 0.0);
            j.0[q][p] = e * s;
            j.0[p][q] = c(-s, 0.0);
            j.0[q][q] = e * co;
            a = j.adjoint() * a * j;
            // Clean the annihilated pair and keep the diagonal real.
            a.0[p][q] = ZERO;
            a.0[q][p] = ZERO;
            for k in 0..3 {
                a.0[k][k] = c(a.0[k][k].re, 0.0);
            }
            v = v * j;
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&x, &y| a.0[x][x].re.total_cmp(&a.0[y][y].re));
    let values = order.map(|k| a.0[k][k].re);
    let vectors = CMat3::from_columns(order.map(|k| v.column(k)));
    HermitianEigen { values, vectors }
}

/// `exp(-i s H)` without validating hermiticity.
pub(crate) fn expm_herm_unchecked(h: &CMat3, s: f64) -> CMat3 {
    let eig = hermitian_eigen(h);
    let d = CMat3::diag(eig.values.map(|lambda| phase(-s * lambda)));
    eig.vectors * d * eig.vectors.adjoint()
}

fn check_hermitian(h: &CMat3, tol: f64) -> Result<()> {
    let defect = h.hermiticity_defect();
    if defect > tol * h.max_abs().max(1.0) {
        return Err(HoloError::NotHermitian { defect });
    }
    Ok(())
}

/// Propagator `exp(-i s H)` of a constant hermitian matrix via its spectral
/// decomposition.
pub fn herm_propagator(h: &CMat3, s: f64) -> Result<CMat3> {
    check_hermitian(h, Tolerances::default().algebraic)?;
    Ok(expm_herm_unchecked(h, s))
}

/// One Newton-Schulz polar step, `U (3 - U^dagger U) / 2`, pulling a nearly
/// unitary matrix back onto the unitary group.
pub fn reunitarize(u: &CMat3) -> CMat3 {
    let three = CMat3::identity().scale_re(3.0);
    (*u * (three - u.adjoint() * *u)).scale_re(0.5)
}

/// `1 - |Tr(A^dagger B)|/2` with no unitarity check. Used for blocks that may
/// leak out of the computational subspace.
pub fn phase_insensitive_distance(a: &CMat2, b: &CMat2) -> f64 {
    let overlap = (a.adjoint() * *b).trace().norm() / 2.0;
    (1.0 - overlap).clamp(0.0, 1.0)
}

/// Gate distance modulo a global phase: `1 - |Tr(A^dagger B)|/2`, zero iff
/// `A = e^{i gamma} B`.
pub fn gate_distance_up_to_phase(a: &CMat2, b: &CMat2) -> Result<f64> {
    for m in [a, b] {
        let defect = m.unitarity_defect();
        if defect > INPUT_CHECK_TOL {
            return Err(HoloError::NotUnitary { defect });
        }
    }
    Ok(phase_insensitive_distance(a, b))
}

fn projector_check(p: &CMat3) -> Result<()> {
    let defect = p.hermiticity_defect().max((*p * *p).max_abs_diff(p));
    if defect > INPUT_CHECK_TOL {
        return Err(HoloError::NotProjector { defect });
    }
    Ok(())
}

/// Frobenius distance `||P - Q||_F` between two orthogonal projectors; zero
/// iff they project onto the same subspace.
pub fn projector_defect(p: &CMat3, q: &CMat3) -> Result<f64> {
    projector_check(p)?;
    projector_check(q)?;
    Ok((*p - *q).frobenius_norm())
}

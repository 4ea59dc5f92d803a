//! Single- and two-qubit matrix helpers.
//!
//! Two-qubit matrices use the little-endian index `b0 + 2*b1`, where `b0` is
//! the bit of the first listed qubit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::{DMatrix, Matrix2, Matrix4};
use num_complex::Complex64;

use super::Axis;

pub type C64 = Complex64;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `e^{iθ}`
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn identity2() -> Mat2 {
    Mat2::identity()
}

pub fn pauli(axis: Axis) -> Mat2 {
    match axis {
        Axis::X => Mat2::new(ZERO, ONE, ONE, ZERO),
        Axis::Y => Mat2::new(ZERO, -I, I, ZERO),
        Axis::Z => Mat2::new(ONE, ZERO, ZERO, -ONE),
    }
}

/// `exp(iθP)` for a Pauli axis.
pub fn pauli_exp(axis: Axis, theta: f64) -> Mat2 {
    identity2() * C64::from(theta.cos()) + pauli(axis) * (I * theta.sin())
}

/// Standard rotation `exp(-iθP/2)`.
pub fn rot(axis: Axis, theta: f64) -> Mat2 {
    pauli_exp(axis, -theta / 2.0)
}

pub fn rx(theta: f64) -> Mat2 {
    rot(Axis::X, theta)
}

pub fn ry(theta: f64) -> Mat2 {
    rot(Axis::Y, theta)
}

pub fn rz(theta: f64) -> Mat2 {
    rot(Axis::Z, theta)
}

pub fn hadamard() -> Mat2 {
    let h = C64::from(FRAC_1_SQRT_2);
    Mat2::new(h, h, h, -h)
}

pub fn phase(lambda: f64) -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, cis(lambda))
}

/// OpenQASM `u3(θ, φ, λ)`.
pub fn u3(theta: f64, phi: f64, lambda: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    Mat2::new(
        C64::from(co),
        -cis(lambda) * s,
        cis(phi) * s,
        cis(phi + lambda) * co,
    )
}

/// Clifford that rotates `Z` onto the given axis: `V Z V† = P`.
pub fn z_to_axis(axis: Axis) -> Mat2 {
    match axis {
        Axis::Z => identity2(),
        Axis::X => hadamard(),
        // Rx(-π/2) Z Rx(π/2) = Y
        Axis::Y => rx(-FRAC_PI_2),
    }
}

/// `a1 ⊗ a0` in the little-endian two-qubit index.
pub fn kron2(a0: &Mat2, a1: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i1 in 0..2 {
        for j1 in 0..2 {
            for i0 in 0..2 {
                for j0 in 0..2 {
                    m[(i0 + 2 * i1, j0 + 2 * j1)] = a1[(i1, j1)] * a0[(i0, j0)];
                }
            }
        }
    }
    m
}

/// Canonical CNOT on the two-qubit index with control bit `control_first`.
pub fn cnot4(control_is_first: bool) -> Mat4 {
    let mut m = Mat4::zeros();
    for x in 0..4usize {
        let (b0, b1) = (x & 1, x >> 1);
        let y = if control_is_first {
            b0 | ((b1 ^ b0) << 1)
        } else {
            (b0 ^ b1) | (b1 << 1)
        };
        m[(y, x)] = ONE;
    }
    m
}

pub fn swap4() -> Mat4 {
    let mut m = Mat4::zeros();
    for x in 0..4usize {
        let y = ((x & 1) << 1) | (x >> 1);
        m[(y, x)] = ONE;
    }
    m
}

/// `exp(iθ Z⊗Z)` on two qubits.
pub fn zz4(theta: f64) -> Mat4 {
    let mut m = Mat4::zeros();
    for x in 0..4usize {
        let parity = (x & 1) ^ (x >> 1);
        m[(x, x)] = cis(if parity == 0 { theta } else { -theta });
    }
    m
}

/// Generalized CNOT `exp[i(I−P_0)(I−Q_1)π/4] = I − 2 Π⁻(P)⊗Π⁻(Q)`.
pub fn generalized_cnot4(first: Axis, second: Axis) -> Mat4 {
    let proj = |a: Axis| (identity2() - pauli(a)) * C64::from(0.5);
    Mat4::identity() - kron2(&proj(first), &proj(second)) * C64::from(2.0)
}

pub fn is_unitary2(u: &Mat2, tol: f64) -> bool {
    (u.adjoint() * u - identity2()).norm() < tol
}

pub fn is_unitary_dyn(u: &DMatrix<C64>, tol: f64) -> bool {
    let n = u.nrows();
    u.ncols() == n && (u.adjoint() * u - DMatrix::identity(n, n)).camax() < tol
}

/// Largest elementwise deviation between `a` and `b` after removing the
/// best-aligned global phase. Returns `f64::INFINITY` on shape mismatch.
pub fn distance_mod_phase(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    let overlap: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let ph = if overlap.norm() < 1e-300 {
        ONE
    } else {
        overlap / overlap.norm()
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - ph * y).norm())
        .fold(0.0, f64::max)
}

pub fn distance_mod_phase2(a: &Mat2, b: &Mat2) -> f64 {
    let da = DMatrix::from_iterator(2, 2, a.iter().cloned());
    let db = DMatrix::from_iterator(2, 2, b.iter().cloned());
    distance_mod_phase(&da, &db)
}

pub fn distance_mod_phase4(a: &Mat4, b: &Mat4) -> f64 {
    let da = DMatrix::from_iterator(4, 4, a.iter().cloned());
    let db = DMatrix::from_iterator(4, 4, b.iter().cloned());
    distance_mod_phase(&da, &db)
}

/// Euler form `u = e^{iγ} Rz(φ) Ry(θ) Rz(λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZyzAngles {
    pub phi: f64,
    pub theta: f64,
    pub lambda: f64,
    pub global: f64,
}

pub fn zyz(u: &Mat2) -> ZyzAngles {
    let det = u.determinant();
    let global = det.arg() / 2.0;
    let v = u * cis(-global);
    let (abs00, abs10) = (v[(0, 0)].norm(), v[(1, 0)].norm());
    let theta = 2.0 * abs10.atan2(abs00);
    let a = if abs00 > 1e-14 { v[(1, 1)].arg() } else { 0.0 };
    let b = if abs10 > 1e-14 { v[(1, 0)].arg() } else { 0.0 };
    ZyzAngles {
        phi: a + b,
        theta,
        lambda: a - b,
        global,
    }
}

impl ZyzAngles {
    pub fn matrix(&self) -> Mat2 {
        rz(self.phi) * ry(self.theta) * rz(self.lambda) * cis(self.global)
    }
}

/// Euler form `u = e^{iγ} Rz(a) Rx(b) Rz(c)`, returned as `(a, b, c, γ)`.
pub fn zxz(u: &Mat2) -> (f64, f64, f64, f64) {
    let e = zyz(u);
    (e.phi + FRAC_PI_2, e.theta, e.lambda - FRAC_PI_2, e.global)
}

/// True when `u` is a global phase times the identity.
pub fn is_identity_mod_phase(u: &Mat2, tol: f64) -> bool {
    distance_mod_phase2(u, &identity2()) < tol
}

/// True when `u` is diagonal (a Z-axis rotation up to phase).
pub fn is_diagonal2(u: &Mat2, tol: f64) -> bool {
    u[(0, 1)].norm() < tol && u[(1, 0)].norm() < tol
}

/// If `u` is a rotation about a single Pauli axis (up to phase), return it.
pub fn rotation_axis(u: &Mat2, tol: f64) -> Option<Axis> {
    if is_diagonal2(u, tol) {
        return Some(Axis::Z);
    }
    for axis in [Axis::X, Axis::Y] {
        let p = pauli(axis);
        if (p * u - u * p).norm() < tol {
            return Some(axis);
        }
    }
    None
}

/// Haar-random `dim × dim` unitary (QR of a complex Gaussian matrix with
/// the phases of `R`'s diagonal divided out).
pub fn haar_unitary<R: rand::Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    use rand_distr::{Distribution, StandardNormal};
    let z = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        c(re, im)
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

pub fn haar_unitary4<R: rand::Rng + ?Sized>(rng: &mut R) -> Mat4 {
    let u = haar_unitary(4, rng);
    Mat4::from_fn(|i, j| u[(i, j)])
}

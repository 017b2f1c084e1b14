//! Exact one-site algebra on `C^2`.
//!
//! Pauli convention: `σ⁺` is the raising operator with its single nonzero
//! entry in the upper-right corner, `σ⁻ = (σ⁺)†` and
//! `σᶻ = σ⁺σ⁻ − σ⁻σ⁺ = diag(1, −1)`. The first basis vector is the occupied
//! (pair present) state, so `σ⁺σ⁻ = diag(1, 0)` is the pair-number operator.
//!
//! Everything here is closed form; no iterative eigensolver is involved.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{domain, Result};

/// A general 2x2 complex matrix.
pub type Mat2 = Matrix2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Entrywise tolerance for accepting a matrix as Hermitian or as a density.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub fn identity() -> Mat2 {
    Mat2::identity()
}

pub fn sigma_plus() -> Mat2 {
    Mat2::new(ZERO, ONE, ZERO, ZERO)
}

pub fn sigma_minus() -> Mat2 {
    Mat2::new(ZERO, ZERO, ONE, ZERO)
}

pub fn sigma_z() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, -ONE)
}

/// Pair-number operator `σ⁺σ⁻ = diag(1, 0)`.
pub fn number() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, ZERO)
}

pub fn commutator(a: &Mat2, b: &Mat2) -> Mat2 {
    a * b - b * a
}

pub fn trace(a: &Mat2) -> Complex64 {
    a[(0, 0)] + a[(1, 1)]
}

/// Frobenius norm of a 2x2 matrix.
pub fn frobenius(a: &Mat2) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A 2x2 Hermitian matrix, stored so that Hermiticity holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    a11: f64,
    a22: f64,
    a12: Complex64,
}

impl Hermitian2 {
    pub const ZERO: Hermitian2 = Hermitian2 {
        a11: 0.0,
        a22: 0.0,
        a12: ZERO,
    };

    pub fn new(a11: f64, a22: f64, a12: Complex64) -> Self {
        Self { a11, a22, a12 }
    }

    /// Accepts `m` if it is Hermitian to within [`HERMITIAN_TOL`] and returns
    /// its exactly Hermitian part.
    pub fn from_matrix(m: &Mat2) -> Result<Self> {
        let skew = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if skew > HERMITIAN_TOL || !m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(domain(format!(
                "matrix is not Hermitian (max |a - a†| = {skew:e})"
            )));
        }
        Ok(Self::hermitian_part(m))
    }

    /// `(m + m†)/2`, without any check.
    pub(crate) fn hermitian_part(m: &Mat2) -> Self {
        Self {
            a11: m[(0, 0)].re,
            a22: m[(1, 1)].re,
            a12: 0.5 * (m[(0, 1)] + m[(1, 0)].conj()),
        }
    }

    /// One-site pairing Hamiltonian `ε σᶻ − conj(Δ) σ⁻ − Δ σ⁺` for a complex
    /// pairing field `Δ`.
    ///
    /// The field is placed so that its Gibbs states satisfy
    /// `tr(ρ σ⁻) ∝ Δ`: an order field `c` is read off a density matrix as
    /// `tr(ρ σ⁻)` (see [`order_parameter`]), and the closed-form current
    /// `2 Σ ± λ λ̃ sin(φ − φ̃)` then agrees with the commutator definition of
    /// the pair current.
    pub fn pairing(epsilon: f64, field: Complex64) -> Self {
        Self {
            a11: epsilon,
            a22: -epsilon,
            a12: -field,
        }
    }

    pub fn a11(&self) -> f64 {
        self.a11
    }

    pub fn a22(&self) -> f64 {
        self.a22
    }

    pub fn a12(&self) -> Complex64 {
        self.a12
    }

    pub fn a21(&self) -> Complex64 {
        self.a12.conj()
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn matrix(&self) -> Mat2 {
        Mat2::new(
            Complex64::new(self.a11, 0.0),
            self.a12,
            self.a12.conj(),
            Complex64::new(self.a22, 0.0),
        )
    }

    fn scaled(&self, s: f64) -> Self {
        Self::new(s * self.a11, s * self.a22, s * self.a12)
    }

    fn plus(&self, o: &Self) -> Self {
        Self::new(self.a11 + o.a11, self.a22 + o.a22, self.a12 + o.a12)
    }
}

/// Eigendecomposition of a [`Hermitian2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectral2 {
    pub e_minus: f64,
    pub e_plus: f64,
    pub p_minus: Hermitian2,
    pub p_plus: Hermitian2,
}

impl Spectral2 {
    pub fn reconstruct(&self) -> Hermitian2 {
        self.p_minus
            .scaled(self.e_minus)
            .plus(&self.p_plus.scaled(self.e_plus))
    }

    /// Applies a real function to the spectrum.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Hermitian2 {
        self.p_minus
            .scaled(f(self.e_minus))
            .plus(&self.p_plus.scaled(f(self.e_plus)))
    }
}

/// Closed-form eigendecomposition, eigenvalues ascending.
///
/// For `h = m·I + z·σᶻ + (off-diagonal)` the eigenvalues are `m ∓ r` with
/// `r = sqrt(z² + |a12|²)` and `P± = (I ± (h − m·I)/r)/2`. When `h` is a
/// multiple of the identity the canonical projectors are returned, with
/// `P− = diag(0, 1)` and `P+ = diag(1, 0)`.
pub fn eig2(h: &Hermitian2) -> Spectral2 {
    let m = 0.5 * (h.a11 + h.a22);
    let z = 0.5 * (h.a11 - h.a22);
    let r = z.hypot(h.a12.norm());
    if r == 0.0 {
        return Spectral2 {
            e_minus: m,
            e_plus: m,
            p_minus: Hermitian2::new(0.0, 1.0, ZERO),
            p_plus: Hermitian2::new(1.0, 0.0, ZERO),
        };
    }
    let zr = z / r;
    let off = 0.5 * h.a12 / r;
    Spectral2 {
        e_minus: m - r,
        e_plus: m + r,
        p_minus: Hermitian2::new(0.5 * (1.0 - zr), 0.5 * (1.0 + zr), -off),
        p_plus: Hermitian2::new(0.5 * (1.0 + zr), 0.5 * (1.0 - zr), off),
    }
}

/// A 2x2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density2(Hermitian2);

impl Density2 {
    pub const MAXIMALLY_MIXED: Density2 = Density2(Hermitian2 {
        a11: 0.5,
        a22: 0.5,
        a12: ZERO,
    });

    pub fn new(h: Hermitian2) -> Result<Self> {
        if (h.trace() - 1.0).abs() > HERMITIAN_TOL {
            return Err(domain(format!(
                "density trace {} differs from 1",
                h.trace()
            )));
        }
        let s = eig2(&h);
        if s.e_minus < -HERMITIAN_TOL {
            return Err(domain(format!(
                "density has negative eigenvalue {:e}",
                s.e_minus
            )));
        }
        Ok(Self(h))
    }

    /// Diagonal density `diag(p, 1 − p)`.
    pub fn diagonal(p: f64) -> Result<Self> {
        Self::new(Hermitian2::new(p, 1.0 - p, ZERO))
    }

    pub fn hermitian(&self) -> &Hermitian2 {
        &self.0
    }

    pub fn matrix(&self) -> Mat2 {
        self.0.matrix()
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        let s = eig2(&self.0);
        (s.e_minus, s.e_plus)
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.a11 * self.0.a11 + self.0.a22 * self.0.a22 + 2.0 * self.0.a12.norm_sqr()
    }

    /// Matrix logarithm; zero eigenvalues are clamped to the smallest
    /// positive double so the result stays finite.
    pub fn log(&self) -> Hermitian2 {
        eig2(&self.0).map(|p| p.max(f64::MIN_POSITIVE).ln())
    }
}

/// Gibbs state `exp(−βh) / tr exp(−βh)`, evaluated on the spectrum.
pub fn gibbs(h: &Hermitian2, beta: f64) -> Density2 {
    let s = eig2(h);
    // Weights relative to the ground state, so nothing overflows.
    let w_plus = (-beta * (s.e_plus - s.e_minus)).exp();
    let z = 1.0 + w_plus;
    Density2(s.p_minus.scaled(1.0 / z).plus(&s.p_plus.scaled(w_plus / z)))
}

/// Pinching `P₊ρP₊ + P₋ρP₋` onto the eigenbasis of `h`.
pub fn dephase(rho: &Density2, h: &Hermitian2) -> Density2 {
    let s = eig2(h);
    let r = rho.matrix();
    let pm = s.p_minus.matrix();
    let pp = s.p_plus.matrix();
    let out = pp * r * pp + pm * r * pm;
    Density2(Hermitian2::hermitian_part(&out))
}

/// `tr(ρ a)`.
pub fn expect(rho: &Density2, a: &Mat2) -> Complex64 {
    trace(&(rho.matrix() * a))
}

/// Complex order field of a one-site state, `tr(ρ σ⁻)`.
pub fn order_parameter(rho: &Density2) -> Complex64 {
    // tr(ρ σ⁻) = ρ₁₂
    rho.0.a12
}

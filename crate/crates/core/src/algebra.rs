//! Generators of the real forms of `sl(2, C)`.
//!
//! The basis `τ₁, τ₂, τ₃` is built from `E_k = σ_k / (2i)` as
//! `τ₁ = i^{n₂} E₁`, `τ₂ = i^{n₁} E₂`, `τ₃ = i^{n₁+n₂} E₃`, which gives
//!
//! ```text
//! [τ₂, τ₃] = (-1)^{n₁} τ₁,   [τ₃, τ₁] = (-1)^{n₂} τ₂,   [τ₁, τ₂] = τ₃.
//! ```
//!
//! `(n₁, n₂) = (0, 0)` spans `su(2)`; the other three signatures span
//! copies of `so(2, 1)`.

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use thiserror::Error;

/// 2×2 complex matrix.
pub type Mat2 = Matrix2<Complex64>;

/// Absolute tolerance used for entrywise equality of generator matrices.
pub const MATRIX_TOL: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("signature entries must be 0 or 1, got ({n1}, {n2})")]
    InvalidSignature { n1: u8, n2: u8 },
    #[error("matrix is not traceless (trace = {0})")]
    NotTraceless(Complex64),
}

/// The pair `(n₁, n₂) ∈ {0,1}²` selecting a real form and its sign conventions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RealFormSignature {
    n1: u8,
    n2: u8,
}

impl RealFormSignature {
    /// `su(2)`, the compact form.
    pub const SU2: Self = Self { n1: 0, n2: 0 };
    /// `so(2,1)` with `τ₁` generating a compact subgroup (sinh-Gordon / Liouville, top sign).
    pub const SO21_COMPACT_TAU1: Self = Self { n1: 1, n2: 0 };
    /// `so(2,1)` with `τ₁` generating a noncompact subgroup.
    pub const SO21_NONCOMPACT_TAU1: Self = Self { n1: 0, n2: 1 };
    /// `so(2,1)` with both signs flipped.
    pub const SO21_BOTH: Self = Self { n1: 1, n2: 1 };

    pub fn new(n1: u8, n2: u8) -> Result<Self, AlgebraError> {
        if n1 > 1 || n2 > 1 {
            return Err(AlgebraError::InvalidSignature { n1, n2 });
        }
        Ok(Self { n1, n2 })
    }

    pub fn all() -> [Self; 4] {
        [Self::SU2, Self::SO21_COMPACT_TAU1, Self::SO21_NONCOMPACT_TAU1, Self::SO21_BOTH]
    }

    pub fn n1(self) -> u8 {
        self.n1
    }

    pub fn n2(self) -> u8 {
        self.n2
    }

    /// `(-1)^{n₁}`
    pub fn sign1(self) -> f64 {
        if self.n1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// `(-1)^{n₂}`
    pub fn sign2(self) -> f64 {
        if self.n2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_compact(self) -> bool {
        self == Self::SU2
    }

    pub fn algebra_name(self) -> &'static str {
        if self.is_compact() {
            "su(2)"
        } else {
            "so(2,1)"
        }
    }
}

impl fmt::Display for RealFormSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n1, self.n2)
    }
}

/// Coefficients of a [`LieElement`] in the τ-basis of a given signature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauCoefficients {
    pub sig: RealFormSignature,
    pub values: [Complex64; 3],
}

/// A traceless 2×2 complex matrix, optionally tagged with its τ-basis
/// coefficients. The matrix is authoritative; coefficients are recomputed
/// on demand when missing or requested in a different basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LieElement {
    matrix: Mat2,
    coeffs: Option<TauCoefficients>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self {
            matrix: Mat2::zeros(),
            coeffs: None,
        }
    }

    /// Wraps a matrix, rejecting non-traceless input.
    pub fn from_matrix(matrix: Mat2) -> Result<Self, AlgebraError> {
        let tr = matrix.trace();
        if tr.norm() > MATRIX_TOL * (1.0 + matrix.norm()) {
            return Err(AlgebraError::NotTraceless(tr));
        }
        Ok(Self {
            matrix,
            coeffs: None,
        })
    }

    /// `Σ cₖ τₖ` for the generators of `sig`.
    pub fn from_coeffs(sig: RealFormSignature, values: [Complex64; 3]) -> Self {
        let taus = make_generators(sig);
        let matrix = taus
            .iter()
            .zip(values)
            .fold(Mat2::zeros(), |acc, (t, c)| acc + t.matrix * c);
        Self {
            matrix,
            coeffs: Some(TauCoefficients { sig, values }),
        }
    }

    /// Real-coefficient shorthand for [`LieElement::from_coeffs`].
    pub fn from_real_coeffs(sig: RealFormSignature, values: [f64; 3]) -> Self {
        Self::from_coeffs(sig, values.map(|v| Complex64::new(v, 0.0)))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat2 {
        self.matrix
    }

    /// Cached coefficients, if this element was built from them.
    pub fn cached_coeffs(&self) -> Option<&TauCoefficients> {
        self.coeffs.as_ref()
    }

    /// Coefficients in the τ-basis of `sig`, via the Killing projection
    /// `cₖ = -2 gₖₖ tr(X τₖ)`.
    pub fn coeffs(&self, sig: RealFormSignature) -> [Complex64; 3] {
        if let Some(c) = &self.coeffs {
            if c.sig == sig {
                return c.values;
            }
        }
        project_onto_basis(&self.matrix, sig)
    }

    /// Returns a copy with the coefficient cache filled for `sig`.
    pub fn with_coeffs(mut self, sig: RealFormSignature) -> Self {
        let values = self.coeffs(sig);
        self.coeffs = Some(TauCoefficients { sig, values });
        self
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().norm() <= MATRIX_TOL
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        frobenius(&self.matrix)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &LieElement) -> f64 {
        max_abs_entry(&(self.matrix - other.matrix))
    }

    pub fn approx_eq(&self, other: &LieElement, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            matrix: self.matrix * s,
            coeffs: self.coeffs.map(|c| TauCoefficients {
                sig: c.sig,
                values: c.values.map(|v| v * s),
            }),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &LieElement) -> Self {
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Some(a), Some(b)) if a.sig == b.sig => Some(TauCoefficients {
                sig: a.sig,
                values: [
                    a.values[0] + b.values[0],
                    a.values[1] + b.values[1],
                    a.values[2] + b.values[2],
                ],
            }),
            _ => None,
        };
        Self {
            matrix: self.matrix + other.matrix,
            coeffs,
        }
    }

    pub fn sub(&self, other: &LieElement) -> Self {
        self.add(&other.scale_real(-1.0))
    }
}

/// The three generators `(τ₁, τ₂, τ₃)` of the real form selected by `sig`.
pub fn make_generators(sig: RealFormSignature) -> [LieElement; 3] {
    let e = su2_generators();
    let p1 = I.powu(u32::from(sig.n2));
    let p2 = I.powu(u32::from(sig.n1));
    let p3 = I.powu(u32::from(sig.n1 + sig.n2));
    let basis = |k: usize| {
        let mut values = [ZERO; 3];
        values[k] = ONE;
        Some(TauCoefficients { sig, values })
    };
    [
        LieElement {
            matrix: e[0] * p1,
            coeffs: basis(0),
        },
        LieElement {
            matrix: e[1] * p2,
            coeffs: basis(1),
        },
        LieElement {
            matrix: e[2] * p3,
            coeffs: basis(2),
        },
    ]
}

/// `E_k = σ_k / (2i)`.
pub fn su2_generators() -> [Mat2; 3] {
    let half_i = Complex64::new(0.0, -0.5); // 1/(2i)
    let s1 = Mat2::new(ZERO, ONE, ONE, ZERO);
    let s2 = Mat2::new(ZERO, -I, I, ZERO);
    let s3 = Mat2::new(ONE, ZERO, ZERO, -ONE);
    [s1 * half_i, s2 * half_i, s3 * half_i]
}

/// Matrix commutator `XY - YX`.
pub fn bracket(x: &LieElement, y: &LieElement) -> LieElement {
    LieElement {
        matrix: commutator(&x.matrix, &y.matrix),
        coeffs: None,
    }
}

pub fn commutator(x: &Mat2, y: &Mat2) -> Mat2 {
    x * y - y * x
}

/// Diagonal of `g_{ij} = -2 tr(τᵢ τⱼ)`, each entry `±1`.
pub fn killing_metric(sig: RealFormSignature) -> [i8; 3] {
    let g = killing_matrix(sig);
    [0, 1, 2].map(|k| if g[k][k] >= 0.0 { 1 } else { -1 })
}

/// Full matrix `-2 tr(τᵢ τⱼ)` (real part; the imaginary part vanishes for
/// every signature).
pub fn killing_matrix(sig: RealFormSignature) -> [[f64; 3]; 3] {
    let t = make_generators(sig);
    let mut g = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            g[i][j] = (-2.0 * (t[i].matrix * t[j].matrix).trace()).re;
        }
    }
    g
}

/// Structure constants `c_{ij}^k` with `[τᵢ, τⱼ] = Σ_k c_{ij}^k τₖ`.
pub fn structure_constants(sig: RealFormSignature) -> [[[Complex64; 3]; 3]; 3] {
    let t = make_generators(sig);
    let mut c = [[[ZERO; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = project_onto_basis(&commutator(&t[i].matrix, &t[j].matrix), sig);
        }
    }
    c
}

/// Expected right-hand sides of the defining brackets:
/// `([τ₂,τ₃], [τ₃,τ₁], [τ₁,τ₂]) = ((-1)^{n₁} τ₁, (-1)^{n₂} τ₂, τ₃)`.
pub fn expected_bracket_signs(sig: RealFormSignature) -> [f64; 3] {
    [sig.sign1(), sig.sign2(), 1.0]
}

/// Largest entrywise deviation of the three defining brackets from their
/// expected values.
pub fn bracket_identity_error(sig: RealFormSignature) -> f64 {
    let t = make_generators(sig);
    let signs = expected_bracket_signs(sig);
    let pairs = [(1, 2, 0), (2, 0, 1), (0, 1, 2)];
    pairs
        .iter()
        .map(|&(a, b, k)| {
            let lhs = bracket(&t[a], &t[b]);
            lhs.max_abs_diff(&t[k].scale_real(signs[k]))
        })
        .fold(0.0, f64::max)
}

/// `exp(X)` for traceless `X`, using `X² = -det(X)·1`.
pub fn exp_traceless(x: &Mat2) -> Mat2 {
    let s = (-x.determinant()).sqrt();
    let (ch, sh_over_s) = if s.norm() < 1e-8 {
        let s2 = s * s;
        (ONE + s2 / 2.0, ONE + s2 / 6.0)
    } else {
        (s.cosh(), s.sinh() / s)
    };
    Mat2::identity() * ch + x * sh_over_s
}

pub fn frobenius(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_entry(m: &Mat2) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn project_onto_basis(m: &Mat2, sig: RealFormSignature) -> [Complex64; 3] {
    let t = make_generators(sig);
    let g = [sig.sign2(), sig.sign1(), sig.sign1() * sig.sign2()];
    [0, 1, 2].map(|k| (m * t[k].matrix).trace() * (-2.0 * g[k]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn su2_brackets() {
        let t = make_generators(RealFormSignature::SU2);
        assert!(bracket(&t[0], &t[1]).approx_eq(&t[2], 1e-15));
        assert!(bracket(&t[1], &t[2]).approx_eq(&t[0], 1e-15));
        assert!(bracket(&t[2], &t[0]).approx_eq(&t[1], 1e-15));
    }

    #[test]
    fn so21_compact_tau1_brackets() {
        let t = make_generators(RealFormSignature::SO21_COMPACT_TAU1);
        assert!(bracket(&t[1], &t[2]).approx_eq(&t[0].scale_real(-1.0), 1e-15));
        assert!(bracket(&t[2], &t[0]).approx_eq(&t[1], 1e-15));
        assert!(bracket(&t[0], &t[1]).approx_eq(&t[2], 1e-15));
    }

    #[test]
    fn su2_generators_are_half_pauli() {
        let t = make_generators(RealFormSignature::SU2);
        let e = su2_generators();
        for k in 0..3 {
            assert_eq!(t[k].matrix, e[k]);
        }
        // E₃ = diag(-i/2, i/2)
        assert_eq!(e[2][(0, 0)], c(0.0, -0.5));
        assert_eq!(e[2][(1, 1)], c(0.0, 0.5));
    }

    #[test]
    fn e1_e2_bracket_is_e3() {
        let e = su2_generators();
        let x = LieElement::from_matrix(e[0]).unwrap();
        let y = LieElement::from_matrix(e[1]).unwrap();
        let z = LieElement::from_matrix(e[2]).unwrap();
        assert!(bracket(&x, &y).approx_eq(&z, 1e-15));
    }

    #[test]
    fn killing_table() {
        assert_eq!(killing_metric(RealFormSignature::SU2), [1, 1, 1]);
        assert_eq!(killing_metric(RealFormSignature::SO21_COMPACT_TAU1), [1, -1, -1]);
        assert_eq!(killing_metric(RealFormSignature::SO21_NONCOMPACT_TAU1), [-1, 1, -1]);
        assert_eq!(killing_metric(RealFormSignature::SO21_BOTH), [-1, -1, 1]);
    }

    #[test]
    fn killing_matrix_is_diagonal() {
        for sig in RealFormSignature::all() {
            let g = killing_matrix(sig);
            for (i, row) in g.iter().enumerate() {
                for (j, v) in row.iter().enumerate() {
                    if i != j {
                        assert!(v.abs() < 1e-15);
                    } else {
                        assert!((v.abs() - 1.0).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn invalid_signature_rejected() {
        assert!(RealFormSignature::new(2, 0).is_err());
        assert!(RealFormSignature::new(1, 1).is_ok());
    }

    #[test]
    fn coefficients_roundtrip_through_matrix() {
        let sig = RealFormSignature::SO21_NONCOMPACT_TAU1;
        let x = LieElement::from_coeffs(sig, [c(0.3, 0.1), c(-1.2, 0.0), c(0.0, 2.5)]);
        let bare = LieElement::from_matrix(*x.matrix()).unwrap();
        let got = bare.coeffs(sig);
        for (a, b) in got.iter().zip(x.cached_coeffs().unwrap().values.iter()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn non_traceless_matrix_rejected() {
        let m = Mat2::identity();
        assert!(matches!(LieElement::from_matrix(m), Err(AlgebraError::NotTraceless(_))));
    }

    #[test]
    fn exp_of_rotation_generator() {
        // exp(t E₁) = cos(t/2) 1 - i sin(t/2) σ₁
        let e = su2_generators();
        let t = 0.7;
        let m = exp_traceless(&(e[0] * c(t, 0.0)));
        assert!((m[(0, 0)] - c((t / 2.0).cos(), 0.0)).norm() < 1e-15);
        assert!((m[(0, 1)] - c(0.0, -(t / 2.0).sin())).norm() < 1e-15);
        assert!((m.determinant() - ONE).norm() < 1e-14);
    }

    #[test]
    fn exp_near_zero() {
        let e = su2_generators();
        let m = exp_traceless(&(e[2] * c(1e-10, 0.0)));
        assert!((m - Mat2::identity()).iter().all(|z| z.norm() < 1e-9));
    }
}

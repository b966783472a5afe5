//! Exact `κ = 0` solutions.
//!
//! With `h = g` the reduced system collapses to the Liouville equation
//! `∇² ln λ ± 2λ = 0` for `λ = g²`, solved by
//!
//! ```text
//! λ = 4 ξ'(z) η'(z̄) / (1 ± ξ(z) η(z̄))²,     η = ξ̄ for real solutions.
//! ```
//!
//! The top sign is the noncompact case (`SO(2,1)`, signature `(1,0)`), the
//! bottom sign the compact one (`SU(2)`, signature `(0,0)`).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{exp_traceless, make_generators, Mat2, RealFormSignature};
use crate::fields::{AnsatzField, DiffOptions, HitchinPair, RadialProfile, ReducedAction, ScalarField};
use crate::quad::{integrate_plane, QuadError, QuadOptions};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("1 - |ξ|² vanishes at z = {z}: the bottom-sign solution is singular there")]
    SingularPoint { z: Complex64 },
    #[error("ξ'(z) = 0 at z = {z}; λ vanishes there and ln g is singular")]
    CriticalPoint { z: Complex64 },
    #[error("ν = {nu} is not a positive integer: z^(ν-1) in the Higgs field is single-valued only for integer ν, so the patches do not glue on S²")]
    NonIntegerNu { nu: f64 },
    #[error("ν must be nonzero")]
    ZeroNu,
    #[error("ν must be positive for the flux computation, got {0}")]
    NonPositiveNu(f64),
    #[error("polynomial roots must be distinct (roots {0} and {1} coincide)")]
    RepeatedRoot(usize, usize),
    #[error("polynomial needs at least one root")]
    NoRoots,
    #[error("flux quadrature failed: {0}")]
    Accuracy(#[from] QuadError),
}

/// Sign in front of `λ` in the Liouville equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiouvilleSign {
    /// `+`: `SO(2,1)`, globally regular.
    Top,
    /// `-`: `SU(2)`, singular on `|ξ| = 1`.
    Bottom,
}

impl LiouvilleSign {
    pub fn value(self) -> f64 {
        match self {
            LiouvilleSign::Top => 1.0,
            LiouvilleSign::Bottom => -1.0,
        }
    }

    pub fn signature(self) -> RealFormSignature {
        match self {
            LiouvilleSign::Top => RealFormSignature::SO21_COMPACT_TAU1,
            LiouvilleSign::Bottom => RealFormSignature::SU2,
        }
    }
}

/// The analytic function `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Xi {
    /// `z^ν` (principal branch).
    Monomial { nu: f64 },
    /// `(z - z₁)…(z - zₙ)`.
    Polynomial { roots: Vec<Complex64> },
}

impl Xi {
    /// `(ξ, ξ', ξ'')` at `z`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        match self {
            Xi::Monomial { nu } => {
                let nu = *nu;
                let w = z.powf(nu);
                (w, w * nu / z, w * (nu * (nu - 1.0)) / (z * z))
            }
            Xi::Polynomial { roots } => {
                // Horner-style accumulation of p, p', p''
                let mut p = Complex64::new(1.0, 0.0);
                let mut dp = Complex64::new(0.0, 0.0);
                let mut ddp = Complex64::new(0.0, 0.0);
                for &r in roots {
                    let f = z - r;
                    ddp = ddp * f + dp * 2.0;
                    dp = dp * f + p;
                    p *= f;
                }
                (p, dp, ddp)
            }
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Xi::Monomial { .. } => None,
            Xi::Polynomial { roots } => Some(roots.len()),
        }
    }
}

/// `λ` in the general two-function form. Returns a complex value; it is
/// real and nonnegative when `η = ξ̄`.
pub fn lambda_two_function(
    xi: Complex64,
    dxi: Complex64,
    eta: Complex64,
    deta: Complex64,
    sign: LiouvilleSign,
) -> Complex64 {
    let den = Complex64::new(1.0, 0.0) + xi * eta * sign.value();
    dxi * deta * 4.0 / (den * den)
}

/// A real Liouville solution `λ = 4|ξ'|² / (1 ± |ξ|²)²`.
#[derive(Clone, Debug, PartialEq)]
pub struct LiouvilleSolution {
    pub xi: Xi,
    pub sign: LiouvilleSign,
}

impl LiouvilleSolution {
    pub fn monomial(nu: f64, sign: LiouvilleSign) -> Self {
        Self {
            xi: Xi::Monomial { nu },
            sign,
        }
    }

    pub fn polynomial(roots: Vec<Complex64>, sign: LiouvilleSign) -> Result<Self, LiouvilleError> {
        if roots.is_empty() {
            return Err(LiouvilleError::NoRoots);
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if (roots[i] - roots[j]).norm() < 1e-12 {
                    return Err(LiouvilleError::RepeatedRoot(i, j));
                }
            }
        }
        Ok(Self {
            xi: Xi::Polynomial { roots },
            sign,
        })
    }

    /// `λ(z, z̄)`. Errors at the pole `|ξ| = 1` of the bottom sign.
    pub fn lambda(&self, z: Complex64) -> Result<f64, LiouvilleError> {
        let (abs_xi2, abs_dxi2) = match &self.xi {
            // branch-free for real ν
            Xi::Monomial { nu } => {
                let r = z.norm();
                (r.powf(2.0 * nu), nu * nu * r.powf(2.0 * nu - 2.0))
            }
            Xi::Polynomial { .. } => {
                let (w, dw, _) = self.xi.eval(z);
                (w.norm_sqr(), dw.norm_sqr())
            }
        };
        let den = 1.0 + self.sign.value() * abs_xi2;
        if den.abs() < 1e-12 {
            return Err(LiouvilleError::SingularPoint { z });
        }
        Ok(4.0 * abs_dxi2 / (den * den))
    }

    /// `∇² ln λ ± 2λ` by central differences; zero for exact solutions.
    pub fn equation_residual(&self, x: f64, y: f64, diff: &DiffOptions) -> Result<f64, LiouvilleError> {
        let lam = self.lambda(Complex64::new(x, y))?;
        let this = self.clone();
        let ln_lambda = ScalarField::callable(move |x, y| {
            this.lambda(Complex64::new(x, y)).map(f64::ln).unwrap_or(f64::NAN)
        });
        let lap = ln_lambda
            .laplacian(x, y, diff)
            .expect("callable fields have no domain restriction");
        Ok(lap + 2.0 * self.sign.value() * lam)
    }
}

/// Axisymmetric `g² = λ = 4ν² r^{2ν-2} / (1 ± r^{2ν})²`.
pub fn lambda_axisymmetric(nu: f64, sign: LiouvilleSign, r: f64) -> f64 {
    let den = 1.0 + sign.value() * r.powf(2.0 * nu);
    4.0 * nu * nu * r.powf(2.0 * nu - 2.0) / (den * den)
}

/// `λ` for `ξ = (z - z₁)…(z - zₙ)`, top sign.
pub fn multicenter_lambda(roots: &[Complex64], z: Complex64) -> Result<f64, LiouvilleError> {
    let sol = LiouvilleSolution::polynomial(roots.to_vec(), LiouvilleSign::Top)?;
    let (_, dxi, _) = sol.xi.eval(z);
    let scale = roots.iter().map(|r| r.norm()).fold(z.norm(), f64::max).max(1.0);
    if dxi.norm() < 1e-12 * scale.powi(roots.len() as i32 - 1) {
        return Err(LiouvilleError::CriticalPoint { z });
    }
    sol.lambda(z)
}

/// The axisymmetric Hitchin pair
///
/// ```text
/// Ã = (ν - 1 ∓ 2ν r^{2ν}/(1 ± r^{2ν})) τ₁ dθ,   Φ = |ν| r^{ν-1}/|1 ± r^{2ν}| (τ₂ - iτ₃) dz,
/// ```
///
/// stored in polar form and converted to Cartesian components on demand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisymmetricPair {
    pub nu: f64,
    pub sign: LiouvilleSign,
}

pub fn hitchin_pair_polar(nu: f64, sign: LiouvilleSign) -> Result<AxisymmetricPair, LiouvilleError> {
    if nu == 0.0 {
        return Err(LiouvilleError::ZeroNu);
    }
    Ok(AxisymmetricPair { nu, sign })
}

impl AxisymmetricPair {
    pub fn signature(&self) -> RealFormSignature {
        self.sign.signature()
    }

    /// `g(r) = h(r) = 2|ν| r^{ν-1} / |1 ± r^{2ν}|`.
    pub fn g(&self, r: f64) -> f64 {
        let s = self.sign.value();
        2.0 * self.nu.abs() * r.powf(self.nu - 1.0) / (1.0 + s * r.powf(2.0 * self.nu)).abs()
    }

    /// Coefficient of `τ₁ dθ` in `Ã`; equals `r d(ln g)/dr`.
    pub fn a_theta(&self, r: f64) -> f64 {
        let s = self.sign.value();
        let p = r.powf(2.0 * self.nu);
        self.nu - 1.0 - s * 2.0 * self.nu * p / (1.0 + s * p)
    }

    /// `dg/dr = g A_θ / r`.
    pub fn dg(&self, r: f64) -> f64 {
        self.g(r) * self.a_theta(r) / r
    }

    /// Cartesian ansatz field: `f₁ = -A_θ y/r²`, `f₂ = A_θ x/r²`, `h = g`.
    pub fn to_ansatz_field(&self) -> AnsatzField {
        let (a, b, c) = (*self, *self, *self);
        AnsatzField::from_fns(
            self.signature(),
            move |x, y| {
                let r2 = x * x + y * y;
                if r2 == 0.0 {
                    0.0
                } else {
                    -a.a_theta(r2.sqrt()) * y / r2
                }
            },
            move |x, y| {
                let r2 = x * x + y * y;
                if r2 == 0.0 {
                    0.0
                } else {
                    b.a_theta(r2.sqrt()) * x / r2
                }
            },
            move |x, y| c.g((x * x + y * y).sqrt()),
            move |x, y| c.g((x * x + y * y).sqrt()),
        )
    }

    pub fn radial_profile(&self, rs: &[f64]) -> RadialProfile {
        RadialProfile::from_fn(rs, |r| (self.g(r), self.dg(r)))
    }

    /// Reduced action from the boundary bracket on `r ∈ [1e-6, 1e6]`
    /// (log-spaced samples).
    pub fn reduced_action(&self) -> ReducedAction {
        let rs = log_space(1e-6, 1e6, 4001);
        crate::fields::reduced_action_radial(&self.radial_profile(&rs), self.signature())
    }
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
        .collect()
}

/// Which of the two regular gauges on `S²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatchKind {
    /// Regular at `z = 0` (gauge parameter `N = 1 - ν`).
    Origin,
    /// Regular at `z = ∞` (gauge parameter `N = ν + 1`).
    Infinity,
}

/// Top-sign solution in one of the two regular gauges. `Ã = A_θ τ₁ dθ`,
/// `Φ = φ(z) (τ₂ - iτ₃) dz`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaugePatch {
    pub nu: u32,
    pub kind: PatchKind,
}

impl GaugePatch {
    fn nu_f(&self) -> f64 {
        f64::from(self.nu)
    }

    /// Gauge parameter `N` of `q = exp(N θ τ₁)` relative to the polar pair.
    pub fn gauge_parameter(&self) -> f64 {
        match self.kind {
            PatchKind::Origin => 1.0 - self.nu_f(),
            PatchKind::Infinity => self.nu_f() + 1.0,
        }
    }

    /// `A_θ' = -2ν r^{2ν}/(1 + r^{2ν})` or `A_θ'' = 2ν/(1 + r^{2ν})`.
    pub fn a_theta(&self, r: f64) -> f64 {
        let nu = self.nu_f();
        let p = r.powf(2.0 * nu);
        match self.kind {
            PatchKind::Origin => -2.0 * nu * p / (1.0 + p),
            PatchKind::Infinity => 2.0 * nu / (1.0 + p),
        }
    }

    /// `ν z^{ν-1}/(1 + |z|^{2ν})` or `ν z̄^{ν+1}/(|z|² (1 + |z|^{2ν}))`.
    pub fn higgs_coefficient(&self, z: Complex64) -> Complex64 {
        let nu = self.nu_f();
        let den = 1.0 + z.norm_sqr().powf(nu);
        match self.kind {
            PatchKind::Origin => z.powu(self.nu - 1) * nu / den,
            PatchKind::Infinity => z.conj().powu(self.nu + 1) * nu / (z.norm_sqr() * den),
        }
    }

    /// `(A_x, A_y, P)` as matrices, with `Φ = P dz`.
    pub fn matrices(&self, x: f64, y: f64) -> (Mat2, Mat2, Mat2) {
        let t = make_generators(RealFormSignature::SO21_COMPACT_TAU1);
        let r2 = x * x + y * y;
        let at = self.a_theta(r2.sqrt());
        let (ax, ay) = if r2 == 0.0 { (0.0, 0.0) } else { (-at * y / r2, at * x / r2) };
        let higgs = t[1].matrix() - t[2].matrix() * I;
        (
            t[0].matrix() * Complex64::from(ax),
            t[0].matrix() * Complex64::from(ay),
            higgs * self.higgs_coefficient(Complex64::new(x, y)),
        )
    }

    pub fn to_pair(&self) -> HitchinPair {
        let (a, b, c) = (*self, *self, *self);
        HitchinPair {
            sig: RealFormSignature::SO21_COMPACT_TAU1,
            a_x: Arc::new(move |x, y| a.matrices(x, y).0),
            a_y: Arc::new(move |x, y| b.matrices(x, y).1),
            phi: Arc::new(move |x, y| c.matrices(x, y).2),
            diff: DiffOptions::default(),
        }
    }
}

/// The origin- and infinity-regular patches, related by `exp(2νθ τ₁)`.
pub fn patch_pair(nu: f64) -> Result<(GaugePatch, GaugePatch), LiouvilleError> {
    if nu <= 0.0 || nu.fract() != 0.0 || nu > f64::from(u32::MAX) {
        return Err(LiouvilleError::NonIntegerNu { nu });
    }
    let nu = nu as u32;
    Ok((
        GaugePatch {
            nu,
            kind: PatchKind::Origin,
        },
        GaugePatch {
            nu,
            kind: PatchKind::Infinity,
        },
    ))
}

/// Largest entrywise mismatch between the infinity patch and the origin
/// patch gauge-transformed by `q = exp(2νθ τ₁)`:
/// `Ã'' = q⁻¹ Ã' q + q⁻¹ dq`, `Φ'' = q⁻¹ Φ' q`, sampled on the circle of
/// radius `r` at `n` angles in `(-π, π]`.
pub fn transition_error(origin: &GaugePatch, infinity: &GaugePatch, r: f64, n: usize) -> f64 {
    let t1 = *make_generators(RealFormSignature::SO21_COMPACT_TAU1)[0].matrix();
    let two_nu = 2.0 * f64::from(origin.nu);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let theta = -PI + 2.0 * PI * (k as f64 + 1.0) / n as f64;
        let (x, y) = (r * theta.cos(), r * theta.sin());
        let q = exp_traceless(&(t1 * Complex64::from(two_nu * theta)));
        let q_inv = exp_traceless(&(t1 * Complex64::from(-two_nu * theta)));
        // q⁻¹ ∂_θ q, with dθ = (-y dx + x dy)/r²
        let maurer_cartan = q_inv * (t1 * Complex64::from(two_nu)) * q;
        let r2 = r * r;
        let (ax, ay, p) = origin.matrices(x, y);
        let ax_t = q_inv * ax * q + maurer_cartan * Complex64::from(-y / r2);
        let ay_t = q_inv * ay * q + maurer_cartan * Complex64::from(x / r2);
        let p_t = q_inv * p * q;
        let (bx, by, pb) = infinity.matrices(x, y);
        for d in [ax_t - bx, ay_t - by, p_t - pb] {
            worst = worst.max(crate::algebra::max_abs_entry(&d));
        }
    }
    worst
}

/// Magnetic flux `∫ F_Ã = -4πν` of the top-sign axisymmetric solution.
pub fn flux_analytic(nu: f64) -> f64 {
    -4.0 * PI * nu
}

/// Flux by adaptive polar quadrature of the `τ₁` coefficient of `F₁₂`,
/// computed by differentiating the Cartesian connection components.
pub fn flux_numerical(nu: f64) -> Result<f64, LiouvilleError> {
    if nu <= 0.0 {
        return Err(LiouvilleError::NonPositiveNu(nu));
    }
    let field = hitchin_pair_polar(nu, LiouvilleSign::Top)?.to_ansatz_field();
    let diff = field.diff;
    let f12 = move |x: f64, y: f64| {
        let d2 = field.f2.gradient(x, y, &diff).expect("callable");
        let d1 = field.f1.gradient(x, y, &diff).expect("callable");
        d2[0] - d1[1]
    };
    // the finite-difference integrand carries round-off noise well above 1e-12
    let opts = QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-8,
        max_intervals: 4000,
    };
    Ok(integrate_plane(f12, opts)?.value)
}

/// `flux(ν)`: analytic `-4πν`, or the quadrature value.
pub fn flux(nu: f64, numerical: bool) -> Result<f64, LiouvilleError> {
    if numerical {
        flux_numerical(nu)
    } else {
        Ok(flux_analytic(nu))
    }
}

/// Multi-center ansatz field: `g = h = √λ`, `f₁ = -∂ᵧ ln g`, `f₂ = ∂ₓ ln g`
/// with the derivatives of `ln g = ln 2 + ln|ξ'| - ln(1 + |ξ|²)` taken
/// analytically. Singular (as a gauge artifact) at zeros of `ξ'`.
pub fn multicenter_field(roots: &[Complex64]) -> Result<AnsatzField, LiouvilleError> {
    let sol = Arc::new(LiouvilleSolution::polynomial(roots.to_vec(), LiouvilleSign::Top)?);
    // (∂ₓ ln g, ∂ᵧ ln g)
    let grad_ln_g = {
        let sol = sol.clone();
        move |x: f64, y: f64| -> (f64, f64) {
            let (w, dw, ddw) = sol.xi.eval(Complex64::new(x, y));
            let q = ddw / dw;
            let s = w.conj() * dw / (1.0 + w.norm_sqr());
            (q.re - 2.0 * s.re, -q.im + 2.0 * s.im)
        }
    };
    let (gl1, gl2) = (grad_ln_g.clone(), grad_ln_g);
    let (s1, s2) = (sol.clone(), sol);
    Ok(AnsatzField::from_fns(
        LiouvilleSign::Top.signature(),
        move |x, y| -gl1(x, y).1,
        move |x, y| gl2(x, y).0,
        move |x, y| s1.lambda(Complex64::new(x, y)).unwrap_or(f64::NAN).sqrt(),
        move |x, y| s2.lambda(Complex64::new(x, y)).unwrap_or(f64::NAN).sqrt(),
    ))
}

/// Flux of a multi-center solution: quadrature of `F₁₂ = (-1)^{n₁} g h = -λ`.
pub fn multicenter_flux_numerical(roots: &[Complex64]) -> Result<f64, LiouvilleError> {
    let sol = LiouvilleSolution::polynomial(roots.to_vec(), LiouvilleSign::Top)?;
    let opts = QuadOptions {
        rel_tol: 1e-9,
        abs_tol: 1e-12,
        max_intervals: 4000,
    };
    let v = integrate_plane(
        |x, y| -sol.lambda(Complex64::new(x, y)).unwrap_or(f64::NAN),
        opts,
    )?;
    Ok(v.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{annulus_points, flat_connection_residual, max_hitchin_residual};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_at_unit_circle() {
        let sol = LiouvilleSolution::monomial(1.0, LiouvilleSign::Top);
        assert!((sol.lambda(c(0.6, 0.8)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn monomial_matches_closed_form() {
        for sign in [LiouvilleSign::Top, LiouvilleSign::Bottom] {
            for nu in [1.0, 2.0, 2.5] {
                let sol = LiouvilleSolution::monomial(nu, sign);
                for &(x, y) in &annulus_points(10, 0.1, 0.9) {
                    let r = (x * x + y * y).sqrt();
                    let a = sol.lambda(c(x, y)).unwrap();
                    let b = lambda_axisymmetric(nu, sign, r);
                    assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn two_function_form_reduces_to_real_form() {
        let sol = LiouvilleSolution::polynomial(vec![c(1.0, 0.5), c(-0.3, 0.0)], LiouvilleSign::Top).unwrap();
        let z = c(0.4, -0.7);
        let (w, dw, _) = sol.xi.eval(z);
        let lam = lambda_two_function(w, dw, w.conj(), dw.conj(), LiouvilleSign::Top);
        assert!(lam.im.abs() < 1e-14);
        assert!((lam.re - sol.lambda(z).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn liouville_equation_both_signs() {
        let diff = DiffOptions::default();
        for sign in [LiouvilleSign::Top, LiouvilleSign::Bottom] {
            let sol = LiouvilleSolution::monomial(2.0, sign);
            for &(x, y) in &annulus_points(25, 0.2, 0.8) {
                assert!(sol.equation_residual(x, y, &diff).unwrap().abs() < 1e-6);
            }
        }
    }

    #[test]
    fn bottom_sign_pole_reported() {
        let sol = LiouvilleSolution::monomial(1.0, LiouvilleSign::Bottom);
        assert!(matches!(sol.lambda(c(1.0, 0.0)), Err(LiouvilleError::SingularPoint { .. })));
    }

    #[test]
    fn single_root_at_origin_is_monomial() {
        let z = c(0.3, 1.1);
        let a = multicenter_lambda(&[c(0.0, 0.0)], z).unwrap();
        let b = LiouvilleSolution::monomial(1.0, LiouvilleSign::Top).lambda(z).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn critical_point_and_repeated_roots() {
        let roots = [c(1.0, 0.0), c(-1.0, 0.0)];
        assert!(matches!(
            multicenter_lambda(&roots, c(0.0, 0.0)),
            Err(LiouvilleError::CriticalPoint { .. })
        ));
        assert!(matches!(
            multicenter_lambda(&[c(1.0, 0.0), c(1.0, 0.0)], c(0.5, 0.5)),
            Err(LiouvilleError::RepeatedRoot(0, 1))
        ));
    }

    #[test]
    fn monopole_charge_minus_two() {
        let p = hitchin_pair_polar(1.0, LiouvilleSign::Top).unwrap();
        for r in [0.3, 1.0, 4.0] {
            assert!((p.a_theta(r) + 2.0 * r * r / (1.0 + r * r)).abs() < 1e-15);
        }
        assert!(p.a_theta(1e-8).abs() < 1e-15);
    }

    #[test]
    fn zero_nu_rejected() {
        assert_eq!(hitchin_pair_polar(0.0, LiouvilleSign::Top), Err(LiouvilleError::ZeroNu));
    }

    #[test]
    fn polar_pair_residual_at_sample_point() {
        let f = hitchin_pair_polar(2.0, LiouvilleSign::Top).unwrap().to_ansatz_field();
        assert!(max_hitchin_residual(&f, &[(0.7, -0.3)]).unwrap() < 1e-8);
        assert!(flat_connection_residual(&f, 0.7, -0.3).unwrap() < 1e-8);
    }

    #[test]
    fn bottom_sign_pair_solves_su2_system_off_the_pole() {
        let f = hitchin_pair_polar(1.0, LiouvilleSign::Bottom).unwrap().to_ansatz_field();
        let pts = annulus_points(30, 0.2, 0.8);
        assert!(max_hitchin_residual(&f, &pts).unwrap() < 1e-8);
    }

    #[test]
    fn patches_regular_at_their_ends() {
        let (o, inf) = patch_pair(1.0).unwrap();
        assert_eq!(o.a_theta(0.0), 0.0);
        assert!(inf.a_theta(1e4).abs() < 1e-7);
        assert!(transition_error(&o, &inf, 1.0, 16) < 1e-10);
    }

    #[test]
    fn patches_solve_hitchin() {
        for nu in [1.0, 2.0] {
            let (o, inf) = patch_pair(nu).unwrap();
            for &(x, y) in &annulus_points(20, 0.3, 2.0) {
                assert!(o.to_pair().residual(x, y).max() < 1e-8);
                assert!(inf.to_pair().residual(x, y).max() < 1e-8);
            }
        }
    }

    #[test]
    fn non_integer_nu_rejected_for_patches() {
        assert!(matches!(patch_pair(1.5), Err(LiouvilleError::NonIntegerNu { .. })));
        assert!(matches!(patch_pair(-1.0), Err(LiouvilleError::NonIntegerNu { .. })));
    }

    #[test]
    fn analytic_flux_values() {
        assert_eq!(flux(1.0, false).unwrap(), -4.0 * PI);
        assert_eq!(flux(3.0, false).unwrap(), -12.0 * PI);
    }

    #[test]
    fn polynomial_derivatives() {
        let xi = Xi::Polynomial {
            roots: vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 2.0)],
        };
        let z = c(0.3, 0.2);
        let (p, dp, ddp) = xi.eval(z);
        let h = 1e-5;
        let (pp, _, _) = xi.eval(z + h);
        let (pm, _, _) = xi.eval(z - h);
        assert!(((pp - pm) / (2.0 * h) - dp).norm() < 1e-9);
        assert!(((pp - p * 2.0 + pm) / (h * h) - ddp).norm() < 1e-4);
    }
}

//! Ansatz fields `A = (f₁ dx + f₂ dy) τ₁ + g du τ₂ + h dv τ₃`, their
//! curvature, the reduced Hitchin system, the conserved `κ²`, action
//! densities and the flat complex connection `B = Ã + Φ + Φ*`.
//!
//! Fields are either callables of `(x, y)` differentiated with central
//! stencils, or samples on a uniform grid differentiated at their native
//! spacing.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{commutator, frobenius, make_generators, LieElement, Mat2, RealFormSignature};

pub type ScalarFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type MatrixFn = Arc<dyn Fn(f64, f64) -> Mat2 + Send + Sync>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("point ({x}, {y}) is not an interior node of the sample grid")]
    OutsideGrid { x: f64, y: f64 },
    #[error("g² - κ² = {gap:e} is inside the singular guard at ({x}, {y})")]
    SingularLocus { x: f64, y: f64, gap: f64 },
    #[error("grid has {got} samples, expected {expected}")]
    GridShape { expected: usize, got: usize },
}

/// Central-difference stencil order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stencil {
    Second,
    Fourth,
}

/// Step sizes and stencil for callable fields. Grid fields always use
/// their own spacing with the second-order stencil.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffOptions {
    pub step: f64,
    /// Step used for second derivatives (Laplacians).
    pub second_step: f64,
    pub stencil: Stencil,
}

impl Default for DiffOptions {
    fn default() -> Self {
        Self {
            step: 1e-4,
            second_step: 1e-3,
            stencil: Stencil::Fourth,
        }
    }
}

impl DiffOptions {
    pub fn second_order(step: f64) -> Self {
        Self {
            step,
            second_step: step,
            stencil: Stencil::Second,
        }
    }
}

fn d1<F: Fn(f64) -> f64>(f: F, h: f64, st: Stencil) -> f64 {
    match st {
        Stencil::Second => (f(h) - f(-h)) / (2.0 * h),
        Stencil::Fourth => (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h),
    }
}

fn d2<F: Fn(f64) -> f64>(f: F, h: f64, st: Stencil) -> f64 {
    match st {
        Stencil::Second => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
        Stencil::Fourth => {
            (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h))
                / (12.0 * h * h)
        }
    }
}

fn d1_mat<F: Fn(f64) -> Mat2>(f: F, h: f64, st: Stencil) -> Mat2 {
    match st {
        Stencil::Second => (f(h) - f(-h)) / Complex64::new(2.0 * h, 0.0),
        Stencil::Fourth => {
            (f(-2.0 * h) - f(2.0 * h) + (f(h) - f(-h)) * Complex64::new(8.0, 0.0))
                / Complex64::new(12.0 * h, 0.0)
        }
    }
}

/// Samples on a uniform rectangular grid, row-major (`values[j * nx + i]`
/// at `(x0 + i dx, y0 + j dy)`).
#[derive(Clone, Debug, PartialEq)]
pub struct GridSamples {
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl GridSamples {
    pub fn new(
        x0: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        nx: usize,
        ny: usize,
        values: Vec<f64>,
    ) -> Result<Self, FieldError> {
        if values.len() != nx * ny {
            return Err(FieldError::GridShape {
                expected: nx * ny,
                got: values.len(),
            });
        }
        Ok(Self {
            x0,
            y0,
            dx,
            dy,
            nx,
            ny,
            values,
        })
    }

    /// Samples `f` at every node.
    pub fn sample<F: Fn(f64, f64) -> f64>(
        f: F,
        x0: f64,
        y0: f64,
        dx: f64,
        dy: f64,
        nx: usize,
        ny: usize,
    ) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(x0 + i as f64 * dx, y0 + j as f64 * dy));
            }
        }
        Self {
            x0,
            y0,
            dx,
            dy,
            nx,
            ny,
            values,
        }
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.dx, self.y0 + j as f64 * self.dy)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }

    fn locate(&self, x: f64, y: f64, reach: usize) -> Result<(usize, usize), FieldError> {
        let fi = (x - self.x0) / self.dx;
        let fj = (y - self.y0) / self.dy;
        let (ri, rj) = (fi.round(), fj.round());
        let on_node = (fi - ri).abs() < 1e-6 && (fj - rj).abs() < 1e-6;
        let r = reach as f64;
        let inside = ri >= r
            && rj >= r
            && ri + r <= (self.nx - 1) as f64
            && rj + r <= (self.ny - 1) as f64;
        if !on_node || !inside {
            return Err(FieldError::OutsideGrid { x, y });
        }
        Ok((ri as usize, rj as usize))
    }
}

/// A scalar component of an ansatz field.
#[derive(Clone)]
pub enum ScalarField {
    Callable(ScalarFn),
    Grid(GridSamples),
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Callable(_) => f.write_str("ScalarField::Callable"),
            ScalarField::Grid(g) => write!(f, "ScalarField::Grid({}x{})", g.nx, g.ny),
        }
    }
}

impl ScalarField {
    pub fn callable<F: Fn(f64, f64) -> f64 + Send + Sync + 'static>(f: F) -> Self {
        ScalarField::Callable(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        Self::callable(move |_, _| c)
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64, FieldError> {
        match self {
            ScalarField::Callable(f) => Ok(f(x, y)),
            ScalarField::Grid(g) => {
                let (i, j) = g.locate(x, y, 0)?;
                Ok(g.at(i, j))
            }
        }
    }

    /// `(∂ₓ, ∂ᵧ)` at the point.
    pub fn gradient(&self, x: f64, y: f64, opts: &DiffOptions) -> Result<[f64; 2], FieldError> {
        match self {
            ScalarField::Callable(f) => Ok([
                d1(|s| f(x + s, y), opts.step, opts.stencil),
                d1(|s| f(x, y + s), opts.step, opts.stencil),
            ]),
            ScalarField::Grid(g) => {
                let (i, j) = g.locate(x, y, 1)?;
                Ok([
                    (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * g.dx),
                    (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * g.dy),
                ])
            }
        }
    }

    pub fn laplacian(&self, x: f64, y: f64, opts: &DiffOptions) -> Result<f64, FieldError> {
        match self {
            ScalarField::Callable(f) => Ok(d2(|s| f(x + s, y), opts.second_step, opts.stencil)
                + d2(|s| f(x, y + s), opts.second_step, opts.stencil)),
            ScalarField::Grid(g) => {
                let (i, j) = g.locate(x, y, 1)?;
                let c = g.at(i, j);
                Ok((g.at(i + 1, j) - 2.0 * c + g.at(i - 1, j)) / (g.dx * g.dx)
                    + (g.at(i, j + 1) - 2.0 * c + g.at(i, j - 1)) / (g.dy * g.dy))
            }
        }
    }
}

/// Field configuration of the ansatz, with `g₃` gauged away and `h₂ = 0`.
#[derive(Clone, Debug)]
pub struct AnsatzField {
    pub sig: RealFormSignature,
    pub f1: ScalarField,
    pub f2: ScalarField,
    pub g: ScalarField,
    pub h: ScalarField,
    pub diff: DiffOptions,
}

impl AnsatzField {
    pub fn new(
        sig: RealFormSignature,
        f1: ScalarField,
        f2: ScalarField,
        g: ScalarField,
        h: ScalarField,
    ) -> Self {
        Self {
            sig,
            f1,
            f2,
            g,
            h,
            diff: DiffOptions::default(),
        }
    }

    pub fn from_fns<F1, F2, G, H>(sig: RealFormSignature, f1: F1, f2: F2, g: G, h: H) -> Self
    where
        F1: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        F2: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            sig,
            ScalarField::callable(f1),
            ScalarField::callable(f2),
            ScalarField::callable(g),
            ScalarField::callable(h),
        )
    }

    pub fn zero(sig: RealFormSignature) -> Self {
        Self::from_fns(sig, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0, |_, _| 0.0)
    }

    pub fn with_diff(mut self, diff: DiffOptions) -> Self {
        self.diff = diff;
        self
    }

    /// Samples every component on the same grid.
    pub fn sampled(&self, x0: f64, y0: f64, dx: f64, dy: f64, nx: usize, ny: usize) -> Result<Self, FieldError> {
        let sample = |s: &ScalarField| -> Result<ScalarField, FieldError> {
            let mut values = Vec::with_capacity(nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    values.push(s.value(x0 + i as f64 * dx, y0 + j as f64 * dy)?);
                }
            }
            Ok(ScalarField::Grid(GridSamples::new(x0, y0, dx, dy, nx, ny, values)?))
        };
        Ok(Self {
            sig: self.sig,
            f1: sample(&self.f1)?,
            f2: sample(&self.f2)?,
            g: sample(&self.g)?,
            h: sample(&self.h)?,
            diff: self.diff,
        })
    }

    fn values(&self, x: f64, y: f64) -> Result<[f64; 4], FieldError> {
        Ok([
            self.f1.value(x, y)?,
            self.f2.value(x, y)?,
            self.g.value(x, y)?,
            self.h.value(x, y)?,
        ])
    }

    fn gradients(&self, x: f64, y: f64) -> Result<[[f64; 2]; 4], FieldError> {
        Ok([
            self.f1.gradient(x, y, &self.diff)?,
            self.f2.gradient(x, y, &self.diff)?,
            self.g.gradient(x, y, &self.diff)?,
            self.h.gradient(x, y, &self.diff)?,
        ])
    }

    /// The four connection components `A_μ` as matrices.
    pub fn connection_matrices(&self, x: f64, y: f64) -> Result<[Mat2; 4], FieldError> {
        let t = make_generators(self.sig);
        let [f1, f2, g, h] = self.values(x, y)?;
        Ok([
            t[0].matrix() * Complex64::from(f1),
            t[0].matrix() * Complex64::from(f2),
            t[1].matrix() * Complex64::from(g),
            t[2].matrix() * Complex64::from(h),
        ])
    }

    /// Equivalent Hitchin pair in general matrix form. Only callable
    /// fields can be converted.
    pub fn to_pair(&self) -> Option<HitchinPair> {
        let (f1, f2, g, h) = match (&self.f1, &self.f2, &self.g, &self.h) {
            (
                ScalarField::Callable(f1),
                ScalarField::Callable(f2),
                ScalarField::Callable(g),
                ScalarField::Callable(h),
            ) => (f1.clone(), f2.clone(), g.clone(), h.clone()),
            _ => return None,
        };
        let t = make_generators(self.sig);
        let (t1, t2, t3) = (*t[0].matrix(), *t[1].matrix(), *t[2].matrix());
        Some(HitchinPair {
            sig: self.sig,
            a_x: Arc::new(move |x, y| t1 * Complex64::from(f1(x, y))),
            a_y: Arc::new(move |x, y| t1 * Complex64::from(f2(x, y))),
            // Φ = ½ (A₃ - i A₄) dz
            phi: Arc::new(move |x, y| (t2 * Complex64::from(g(x, y)) - t3 * (I * h(x, y))) * Complex64::from(0.5)),
            diff: self.diff,
        })
    }
}

/// The six independent curvature components `F_{μν}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureComponents {
    pub f12: LieElement,
    pub f13: LieElement,
    pub f14: LieElement,
    pub f23: LieElement,
    pub f24: LieElement,
    pub f34: LieElement,
}

impl CurvatureComponents {
    pub fn all(&self) -> [&LieElement; 6] {
        [&self.f12, &self.f13, &self.f14, &self.f23, &self.f24, &self.f34]
    }

    pub fn max_norm(&self) -> f64 {
        self.all().iter().map(|f| f.norm()).fold(0.0, f64::max)
    }
}

/// `F_{μν} = ∂_μ A_ν - ∂_ν A_μ + [A_μ, A_ν]`, with `∂_u = ∂_v = 0`.
pub fn curvature(field: &AnsatzField, x: f64, y: f64) -> Result<CurvatureComponents, FieldError> {
    let a = field.connection_matrices(x, y)?;
    let grads = field.gradients(x, y)?;
    let t = make_generators(field.sig);
    let gen = [t[0].matrix(), t[0].matrix(), t[1].matrix(), t[2].matrix()];
    // ∂_μ A_ν for μ ∈ {x, y}; zero for μ ∈ {u, v}.
    let d = |mu: usize, nu: usize| -> Mat2 {
        if mu < 2 {
            gen[nu] * Complex64::from(grads[nu][mu])
        } else {
            Mat2::zeros()
        }
    };
    let f = |mu: usize, nu: usize| -> LieElement {
        let m = d(mu, nu) - d(nu, mu) + commutator(&a[mu], &a[nu]);
        LieElement::from_matrix(m)
            .expect("commutators and generator multiples are traceless")
            .with_coeffs(field.sig)
    };
    Ok(CurvatureComponents {
        f12: f(0, 1),
        f13: f(0, 2),
        f14: f(0, 3),
        f23: f(1, 2),
        f24: f(1, 3),
        f34: f(2, 3),
    })
}

/// Residuals of the five lines of the reduced Hitchin system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HitchinResidual {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
    pub r5: f64,
}

impl HitchinResidual {
    pub fn as_array(&self) -> [f64; 5] {
        [self.r1, self.r2, self.r3, self.r4, self.r5]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// ```text
/// r1 = ∂ₓg - (-1)^{n₂} f₂ h      r3 = ∂ₓh - f₂ g
/// r2 = ∂ᵧg + (-1)^{n₂} f₁ h      r4 = ∂ᵧh + f₁ g
/// r5 = ∂ₓf₂ - ∂ᵧf₁ - (-1)^{n₁} g h
/// ```
pub fn hitchin_residual(field: &AnsatzField, x: f64, y: f64) -> Result<HitchinResidual, FieldError> {
    let [f1, f2, g, h] = field.values(x, y)?;
    let [df1, df2, dg, dh] = field.gradients(x, y)?;
    let (s1, s2) = (field.sig.sign1(), field.sig.sign2());
    Ok(HitchinResidual {
        r1: dg[0] - s2 * f2 * h,
        r2: dg[1] + s2 * f1 * h,
        r3: dh[0] - f2 * g,
        r4: dh[1] + f1 * g,
        r5: df2[0] - df1[1] - s1 * g * h,
    })
}

/// Largest `|r_k|` over a set of points.
pub fn max_hitchin_residual(field: &AnsatzField, points: &[(f64, f64)]) -> Result<f64, FieldError> {
    points.iter().try_fold(0.0_f64, |m, &(x, y)| {
        Ok(m.max(hitchin_residual(field, x, y)?.max_abs()))
    })
}

/// `κ² = g² - (-1)^{n₂} h²`.
pub fn kappa_squared(g: f64, h: f64, sig: RealFormSignature) -> f64 {
    g * g - sig.sign2() * h * h
}

/// `|g² - κ²| < 1e-10 · max(1, κ²)` marks the singular locus of the `g`
/// field equation.
pub fn singular_guard(kappa: f64) -> f64 {
    1e-10 * (kappa * kappa).max(1.0)
}

/// `∇²g - g (∇g)² / (g² - κ²) - (-1)^{n₁} g (g² - κ²)`.
pub fn field_equation_residual_g(
    g: &ScalarField,
    kappa: f64,
    sig: RealFormSignature,
    x: f64,
    y: f64,
    diff: &DiffOptions,
) -> Result<f64, FieldError> {
    let gv = g.value(x, y)?;
    let gap = gv * gv - kappa * kappa;
    if gap.abs() < singular_guard(kappa) {
        return Err(FieldError::SingularLocus { x, y, gap });
    }
    let grad = g.gradient(x, y, diff)?;
    let lap = g.laplacian(x, y, diff)?;
    let grad2 = grad[0] * grad[0] + grad[1] * grad[1];
    Ok(lap - gv * grad2 / gap - sig.sign1() * gv * gap)
}

/// Reduced action density `σ = (-1)^{n₁} ∇²(g²) / (16π²)`.
pub fn action_density(
    g: &ScalarField,
    sig: RealFormSignature,
    x: f64,
    y: f64,
    diff: &DiffOptions,
) -> Result<f64, FieldError> {
    let lap_g2 = match g {
        ScalarField::Callable(f) => {
            let f = f.clone();
            ScalarField::callable(move |x, y| f(x, y).powi(2)).laplacian(x, y, diff)?
        }
        ScalarField::Grid(s) => {
            let mut sq = s.clone();
            sq.values.iter_mut().for_each(|v| *v *= *v);
            ScalarField::Grid(sq).laplacian(x, y, diff)?
        }
    };
    Ok(sig.sign1() * lap_g2 / (16.0 * PI * PI))
}

/// Bracket of the action written directly in the ansatz fields:
/// `(-1)^{n₂}(gh)² + (-1)^{n₁+n₂}(f₁² + f₂²)(g² + (-1)^{n₂}h²)`.
pub fn action_integrand_raw(field: &AnsatzField, x: f64, y: f64) -> Result<f64, FieldError> {
    let [f1, f2, g, h] = field.values(x, y)?;
    let (s1, s2) = (field.sig.sign1(), field.sig.sign2());
    Ok(s2 * (g * h).powi(2) + s1 * s2 * (f1 * f1 + f2 * f2) * (g * g + s2 * h * h))
}

/// The same bracket after eliminating `f₁, f₂, h`:
/// `g²(g² - κ²) + (-1)^{n₁} (∇g)² (2g² - κ²)/(g² - κ²)`.
pub fn action_integrand_g(
    g: &ScalarField,
    kappa: f64,
    sig: RealFormSignature,
    x: f64,
    y: f64,
    diff: &DiffOptions,
) -> Result<f64, FieldError> {
    let gv = g.value(x, y)?;
    let k2 = kappa * kappa;
    let gap = gv * gv - k2;
    if gap.abs() < singular_guard(kappa) {
        return Err(FieldError::SingularLocus { x, y, gap });
    }
    let grad = g.gradient(x, y, diff)?;
    let grad2 = grad[0] * grad[0] + grad[1] * grad[1];
    Ok(gv * gv * gap + sig.sign1() * grad2 * (2.0 * gv * gv - k2) / gap)
}

/// Samples of a radial `g(r)` and `dg/dr`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
}

impl RadialProfile {
    pub fn from_fn<F: Fn(f64) -> (f64, f64)>(rs: &[f64], f: F) -> Self {
        let mut p = Self::default();
        for &r in rs {
            let (g, dg) = f(r);
            p.r.push(r);
            p.g.push(g);
            p.dg.push(dg);
        }
        p
    }

    /// `r d(g²)/dr = 2 r g g'` at every sample.
    pub fn bracket(&self) -> Vec<f64> {
        self.r
            .iter()
            .zip(self.g.iter().zip(&self.dg))
            .map(|(r, (g, dg))| 2.0 * r * g * dg)
            .collect()
    }
}

/// How the boundary bracket behaves on the outer half of the samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailBehaviour {
    Converged,
    /// Bounded oscillation; `frequency` is angular, in units of `1/r`.
    Oscillating { amplitude: f64, frequency: f64 },
    Divergent,
}

/// Radial reduced action evaluated as the boundary term
/// `(-1)^{n₁}/(8π) [r d(g²)/dr]` between the first and last sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedAction {
    pub value: f64,
    pub bracket_inner: f64,
    pub bracket_outer: f64,
    pub tail: TailBehaviour,
}

impl ReducedAction {
    pub fn is_well_defined(&self) -> bool {
        self.tail == TailBehaviour::Converged
    }
}

const DIVERGENCE_BOUND: f64 = 1e6;

pub fn reduced_action_radial(profile: &RadialProfile, sig: RealFormSignature) -> ReducedAction {
    let b = profile.bracket();
    let n = b.len();
    if n < 2 {
        return ReducedAction {
            value: 0.0,
            bracket_inner: b.first().copied().unwrap_or(0.0),
            bracket_outer: b.last().copied().unwrap_or(0.0),
            tail: TailBehaviour::Converged,
        };
    }
    let (inner, outer) = (b[0], b[n - 1]);
    let value = sig.sign1() / (8.0 * PI) * (outer - inner);
    let ends = inner.abs().max(outer.abs()).max(1.0);
    let tail = if b.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND * ends) {
        TailBehaviour::Divergent
    } else {
        classify_tail(&profile.r, &b)
    };
    ReducedAction {
        value,
        bracket_inner: inner,
        bracket_outer: outer,
        tail,
    }
}

/// Oscillation test on the outer half of `(r, b)`: at least four sign
/// changes with a non-negligible amplitude.
pub fn classify_tail(r: &[f64], b: &[f64]) -> TailBehaviour {
    let r_mid = 0.5 * (r[0] + r[r.len() - 1]);
    let start = r.iter().position(|&x| x >= r_mid).unwrap_or(0);
    let (rt, bt) = (&r[start..], &b[start..]);
    let (lo, hi) = bt
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let amplitude = 0.5 * (hi - lo);
    let crossings = zero_crossings(rt, bt);
    if crossings.len() >= 4 && amplitude > 1e-8 {
        let span = crossings[crossings.len() - 1] - crossings[0];
        let mean_gap = span / (crossings.len() - 1) as f64;
        TailBehaviour::Oscillating {
            amplitude,
            frequency: PI / mean_gap,
        }
    } else {
        TailBehaviour::Converged
    }
}

/// Linearly interpolated sign changes of `v(r)`.
pub fn zero_crossings(r: &[f64], v: &[f64]) -> Vec<f64> {
    r.windows(2)
        .zip(v.windows(2))
        .filter(|(_, w)| (w[0] < 0.0 && w[1] >= 0.0) || (w[0] > 0.0 && w[1] <= 0.0))
        .map(|(rw, w)| rw[0] + (rw[1] - rw[0]) * w[0] / (w[0] - w[1]))
        .collect()
}

/// A Hitchin pair `(Ã, Φ)` in general matrix form: `Ã = A_x dx + A_y dy`,
/// `Φ = P dz`. `Φ*` conjugates the τ-coefficients of `P` and negates.
#[derive(Clone)]
pub struct HitchinPair {
    pub sig: RealFormSignature,
    pub a_x: MatrixFn,
    pub a_y: MatrixFn,
    pub phi: MatrixFn,
    pub diff: DiffOptions,
}

impl fmt::Debug for HitchinPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HitchinPair").field("sig", &self.sig).finish_non_exhaustive()
    }
}

/// `Σ c̄ₖ τₖ` for `m = Σ cₖ τₖ`.
pub fn conjugate_coefficients(m: &Mat2, sig: RealFormSignature) -> Mat2 {
    let c = LieElement::from_matrix(*m)
        .map(|e| e.coeffs(sig))
        .unwrap_or_else(|_| [Complex64::new(0.0, 0.0); 3]);
    LieElement::from_coeffs(sig, c.map(|z| z.conj())).into_matrix()
}

/// Residual norms of `F_Ã + [Φ, Φ*] = 0` and `d_Ã Φ = 0` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairResidual {
    pub curvature: f64,
    pub holomorphic: f64,
}

impl PairResidual {
    pub fn max(&self) -> f64 {
        self.curvature.max(self.holomorphic)
    }
}

impl HitchinPair {
    /// With `Φ* = -P̄ dz̄`, `[Φ, Φ*] = 2i [P, P̄] dx∧dy`; `d_Ã Φ = 0` reads
    /// `D_x P + i D_y P = 0`.
    pub fn residual(&self, x: f64, y: f64) -> PairResidual {
        let (h, st) = (self.diff.step, self.diff.stencil);
        let ax = (self.a_x)(x, y);
        let ay = (self.a_y)(x, y);
        let p = (self.phi)(x, y);
        let pbar = conjugate_coefficients(&p, self.sig);
        let day_dx = d1_mat(|s| (self.a_y)(x + s, y), h, st);
        let dax_dy = d1_mat(|s| (self.a_x)(x, y + s), h, st);
        let f_xy = day_dx - dax_dy + commutator(&ax, &ay);
        let curv = f_xy + commutator(&p, &pbar) * (I * 2.0);
        let dpx = d1_mat(|s| (self.phi)(x + s, y), h, st) + commutator(&ax, &p);
        let dpy = d1_mat(|s| (self.phi)(x, y + s), h, st) + commutator(&ay, &p);
        PairResidual {
            curvature: frobenius(&curv),
            holomorphic: frobenius(&(dpx + dpy * I)),
        }
    }

    /// `B = Ã + Φ + Φ* = (A_x + P - P̄) dx + (A_y + i(P + P̄)) dy`.
    pub fn flat_connection(&self, x: f64, y: f64) -> (Mat2, Mat2) {
        let p = (self.phi)(x, y);
        let pbar = conjugate_coefficients(&p, self.sig);
        ((self.a_x)(x, y) + p - pbar, (self.a_y)(x, y) + (p + pbar) * I)
    }

    /// `‖∂ₓB_y - ∂ᵧB_x + [B_x, B_y]‖` (Frobenius).
    pub fn flatness_residual(&self, x: f64, y: f64) -> f64 {
        let (h, st) = (self.diff.step, self.diff.stencil);
        let (bx, by) = self.flat_connection(x, y);
        let dby = d1_mat(|s| self.flat_connection(x + s, y).1, h, st);
        let dbx = d1_mat(|s| self.flat_connection(x, y + s).0, h, st);
        frobenius(&(dby - dbx + commutator(&bx, &by)))
    }
}

/// Flatness of `B = Ã + Φ + Φ*` for an ansatz field. Works for callable
/// and grid fields alike.
pub fn flat_connection_residual(field: &AnsatzField, x: f64, y: f64) -> Result<f64, FieldError> {
    let t = make_generators(field.sig);
    let (t1, t2, t3) = (*t[0].matrix(), *t[1].matrix(), *t[2].matrix());
    let sig = field.sig;
    let b_at = |vals: [f64; 4]| -> (Mat2, Mat2) {
        let [f1, f2, g, h] = vals;
        let p = (t2 * Complex64::from(g) - t3 * (I * h)) * Complex64::from(0.5);
        let pbar = conjugate_coefficients(&p, sig);
        (
            t1 * Complex64::from(f1) + p - pbar,
            t1 * Complex64::from(f2) + (p + pbar) * I,
        )
    };
    let (bx, by) = b_at(field.values(x, y)?);
    // derivatives of B are linear in the derivatives of the four scalars
    let grads = field.gradients(x, y)?;
    let dx_vals = [grads[0][0], grads[1][0], grads[2][0], grads[3][0]];
    let dy_vals = [grads[0][1], grads[1][1], grads[2][1], grads[3][1]];
    let (_, dby_dx) = b_at(dx_vals);
    let (dbx_dy, _) = b_at(dy_vals);
    // b_at is linear in its inputs, so these are ∂ₓB_y and ∂ᵧB_x
    Ok(frobenius(&(dby_dx - dbx_dy + commutator(&bx, &by))))
}

/// Evenly spread sample points on an annulus `r ∈ [r_lo, r_hi]`, used for
/// residual sweeps away from coordinate singularities.
pub fn annulus_points(n: usize, r_lo: f64, r_hi: f64) -> Vec<(f64, f64)> {
    // golden-angle spiral: deterministic and evenly spread
    let golden = PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|k| {
            let t = (k as f64 + 0.5) / n as f64;
            let r = r_lo + (r_hi - r_lo) * t;
            let th = golden * k as f64;
            (r * th.cos(), r * th.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SO21: RealFormSignature = RealFormSignature::SO21_COMPACT_TAU1;

    /// `g = h = 2/(1+r²)`, `f₁ = -∂ᵧ ln g`, `f₂ = ∂ₓ ln g` (ν = 1, top sign).
    fn liouville_nu1() -> AnsatzField {
        let g = |x: f64, y: f64| 2.0 / (1.0 + x * x + y * y);
        AnsatzField::from_fns(
            SO21,
            |x, y| 2.0 * y / (1.0 + x * x + y * y),
            |x, y| -2.0 * x / (1.0 + x * x + y * y),
            g,
            g,
        )
    }

    #[test]
    fn zero_field_is_flat_and_solves() {
        let f = AnsatzField::zero(SO21);
        assert_eq!(curvature(&f, 0.3, 0.1).unwrap().max_norm(), 0.0);
        assert_eq!(hitchin_residual(&f, 0.3, 0.1).unwrap().as_array(), [0.0; 5]);
        assert_eq!(flat_connection_residual(&f, 0.3, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn constant_g_h_curvature() {
        let (g, h) = (1.5, -0.7);
        let f = AnsatzField::from_fns(SO21, |_, _| 0.0, |_, _| 0.0, move |_, _| g, move |_, _| h);
        let c = curvature(&f, 0.2, 0.4).unwrap();
        let t = make_generators(SO21);
        assert!(c.f34.approx_eq(&t[0].scale_real(-g * h), 1e-15));
        for comp in [&c.f12, &c.f13, &c.f14, &c.f23, &c.f24] {
            assert!(comp.norm() < 1e-10, "{comp:?}");
        }
    }

    #[test]
    fn liouville_pair_has_small_residuals() {
        let f = liouville_nu1();
        let pts = annulus_points(50, 0.2, 3.0);
        assert!(max_hitchin_residual(&f, &pts).unwrap() < 1e-8);
        for &(x, y) in &pts {
            assert!(flat_connection_residual(&f, x, y).unwrap() < 1e-8);
        }
    }

    #[test]
    fn perturbing_g_scales_first_two_residuals_linearly() {
        let base = liouville_nu1();
        let perturbed = |eps: f64| {
            let mut f = base.clone();
            let g0 = match &base.g {
                ScalarField::Callable(c) => c.clone(),
                _ => unreachable!(),
            };
            f.g = ScalarField::callable(move |x, y| g0(x, y) + eps * (x + 2.0 * y));
            hitchin_residual(&f, 0.5, 0.25).unwrap()
        };
        let a = perturbed(1e-3);
        let b = perturbed(2e-3);
        assert!((b.r1 / a.r1 - 2.0).abs() < 1e-4);
        assert!((b.r2 / a.r2 - 2.0).abs() < 1e-4);
    }

    #[test]
    fn kappa_squared_cases() {
        assert_eq!(kappa_squared(1.3, 1.3, RealFormSignature::SU2), 0.0);
        assert_eq!(kappa_squared(5.0, 3.0, RealFormSignature::SU2), 16.0);
        let (k, a) = (1.7_f64, 0.4_f64);
        let v = kappa_squared(k * a.cos(), k * a.sin(), RealFormSignature::SO21_NONCOMPACT_TAU1);
        assert!((v - k * k).abs() < 1e-14);
    }

    #[test]
    fn constant_g_equal_kappa_is_singular() {
        let g = ScalarField::constant(2.0);
        let r = field_equation_residual_g(&g, 2.0, SO21, 0.0, 0.0, &DiffOptions::default());
        assert!(matches!(r, Err(FieldError::SingularLocus { .. })));
    }

    #[test]
    fn constant_g_has_zero_action() {
        let g = ScalarField::constant(2.0);
        let s = action_density(&g, SO21, 0.3, 0.3, &DiffOptions::default()).unwrap();
        assert!(s.abs() < 1e-12);
        let prof = RadialProfile::from_fn(&[0.1, 1.0, 10.0], |_| (2.0, 0.0));
        let ra = reduced_action_radial(&prof, SO21);
        assert_eq!(ra.value, 0.0);
        assert_eq!(ra.tail, TailBehaviour::Converged);
    }

    #[test]
    fn raw_and_reduced_action_integrands_agree() {
        let f = liouville_nu1();
        for &(x, y) in &annulus_points(20, 0.1, 4.0) {
            let raw = action_integrand_raw(&f, x, y).unwrap();
            let red = action_integrand_g(&f.g, 0.0, SO21, x, y, &f.diff).unwrap();
            let sigma = action_density(&f.g, SO21, x, y, &f.diff).unwrap();
            assert!((raw - red).abs() < 1e-8, "{raw} vs {red}");
            assert!((raw / (8.0 * PI * PI) - sigma).abs() < 1e-8);
        }
    }

    #[test]
    fn grid_points_outside_interior_rejected() {
        let f = liouville_nu1().sampled(-1.0, -1.0, 0.1, 0.1, 21, 21).unwrap();
        assert!(hitchin_residual(&f, -1.0, 0.0).is_err());
        assert!(hitchin_residual(&f, 0.05, 0.0).is_err());
        assert!(hitchin_residual(&f, 0.5, 0.3).is_ok());
    }

    #[test]
    fn grid_shape_checked() {
        assert!(GridSamples::new(0.0, 0.0, 1.0, 1.0, 3, 3, vec![0.0; 8]).is_err());
    }

    #[test]
    fn oscillating_bracket_detected() {
        let rs: Vec<f64> = (0..2000).map(|k| 0.01 + k as f64 * 0.05).collect();
        // 2 r g g' = 3 sin(2r) with g² = 3 sin²... use bracket-level data directly
        let prof = RadialProfile {
            r: rs.clone(),
            g: rs.iter().map(|_| 1.0).collect(),
            dg: rs.iter().map(|r| 1.5 * (2.0 * r).sin() / r).collect(),
        };
        match reduced_action_radial(&prof, SO21).tail {
            TailBehaviour::Oscillating { amplitude, frequency } => {
                assert!((amplitude - 3.0).abs() < 1e-2);
                assert!((frequency - 2.0).abs() < 1e-2);
            }
            other => panic!("expected oscillation, got {other:?}"),
        }
    }
}

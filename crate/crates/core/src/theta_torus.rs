//! Riemann theta functions and doubly periodic sinh-Gordon solutions.
//!
//! Convention: `θ(z|B) = Σ_{n∈Zᵍ} exp(πi nᵀBn + 2πi nᵀz)` with `Im B > 0`.
//! It is 1-periodic in every `zⱼ` and satisfies
//! `θ(z + Beⱼ) = exp(-2πi(zⱼ + Bⱼⱼ/2)) θ(z)`.
//!
//! Solutions are built from spectral data `(B, U, V, D)` as
//!
//! ```text
//! α(z, z̄) = log θ(w) / θ(w + Δ),   w = -i(Uz + Vz̄)/2 + D,   Δ = iπ(1, …, 1),
//! ```
//!
//! where `θ(w)` is read as `θ(w/(2πi) | B)`, so `Δ` is the half period
//! `(½, …, ½)`. Reality needs `V = Ū` and `D` imaginary. A genus-`g`
//! dataset carries `3g` real parameters: `g` complex branch points and the
//! `g` imaginary entries of `D`.
//!
//! # Dataset file grammar
//!
//! Plain text, one `key = value` per line, `#` starts a comment, blank lines
//! ignored. Complex numbers are written `re,im`; lists are separated by
//! whitespace.
//!
//! ```text
//! genus    = <integer ≥ 1>
//! kappa    = <real > 0>
//! B        = <g² complex entries, row-major>
//! U        = <g complex entries>
//! V        = <g complex entries>
//! D        = <g complex entries, real parts 0>
//! lattice1 = <x>,<y>
//! lattice2 = <x>,<y>
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::quad::{integrate, QuadOptions};

pub const DEFAULT_TAIL_TARGET: f64 = 1e-12;
const SINGULAR_THETA: f64 = 1e-10;
const REALITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThetaError {
    #[error("Im B is not positive definite (smallest eigenvalue {min_eigenvalue:e}); the theta series diverges")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("B is not symmetric (max |B - Bᵀ| = {0:e})")]
    NotSymmetric(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("theta vanishes (|θ| = {modulus:e}) at z = {z}: singular solution")]
    Singular { z: Complex64, modulus: f64 },
    #[error("spectral data inconsistent: Im α = {imag:e} at z = {z}")]
    NotReal { z: Complex64, imag: f64 },
    #[error("invalid spectral data: {0}")]
    InvalidData(String),
    #[error("dataset line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read dataset: {0}")]
    Io(String),
}

/// A theta value together with the truncation used for it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaSum {
    pub value: Complex64,
    /// Bound on the omitted terms, in absolute units.
    pub tail_bound: f64,
    pub radius: f64,
    pub terms: usize,
}

/// Smallest eigenvalue of `Im B` after checking symmetry.
pub fn check_riemann_matrix(b: &DMatrix<Complex64>) -> Result<f64, ThetaError> {
    let g = b.nrows();
    if b.ncols() != g || g == 0 {
        return Err(ThetaError::Dimension {
            expected: g.max(1),
            got: b.ncols(),
        });
    }
    let asym = (b - b.transpose()).iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|c| c.norm()).fold(1.0, f64::max);
    if asym > 1e-12 * scale {
        return Err(ThetaError::NotSymmetric(asym));
    }
    let y = b.map(|c| c.im);
    let mu = SymmetricEigen::new(y).eigenvalues.min();
    if mu <= 0.0 {
        return Err(ThetaError::NotPositiveDefinite { min_eigenvalue: mu });
    }
    Ok(mu)
}

/// Bound on `Σ_{‖v‖>R} exp(-πμ‖v‖²)` over a shifted `Zᵍ`: the shell
/// `k < ‖v‖ ≤ k+1` holds at most `(2k+3)ᵍ` points.
pub fn tail_bound(mu: f64, radius: f64, genus: usize) -> f64 {
    let mut total = 0.0;
    let mut k = radius.floor().max(0.0);
    loop {
        let rr = k.max(radius);
        let term = (2.0 * k + 3.0).powi(genus as i32) * (-PI * mu * rr * rr).exp();
        total += term;
        if term < 1e-300 || (term < 1e-20 * total && k > radius + 2.0) {
            return total;
        }
        k += 1.0;
    }
}

/// Smallest half-integer radius whose tail bound is below `target`.
pub fn truncation_radius(mu: f64, genus: usize, target: f64) -> f64 {
    let mut r = 1.0;
    while tail_bound(mu, r, genus) >= target {
        r += 0.5;
    }
    r
}

/// `θ(z|B)` with an explicit or automatic truncation radius. The lattice
/// sum is centred at `-Y⁻¹ Im z` (`Y = Im B`), where the terms peak.
pub fn riemann_theta_sum(
    z: &[Complex64],
    b: &DMatrix<Complex64>,
    trunc_radius: Option<f64>,
) -> Result<ThetaSum, ThetaError> {
    let mu = check_riemann_matrix(b)?;
    let g = b.nrows();
    if z.len() != g {
        return Err(ThetaError::Dimension {
            expected: g,
            got: z.len(),
        });
    }
    let radius = trunc_radius.unwrap_or_else(|| truncation_radius(mu, g, DEFAULT_TAIL_TARGET));
    let y = b.map(|c| c.im);
    let im_z = DVector::from_iterator(g, z.iter().map(|c| c.im));
    let y_inv = y.clone().try_inverse().expect("positive definite");
    let center = -(&y_inv * &im_z);
    // |term| ≤ exp(π cᵀYc) exp(-π (n-c)ᵀY(n-c))
    let peak = (PI * center.dot(&(&y * &center))).exp();

    let lo: Vec<i64> = center.iter().map(|c| (c - radius).ceil() as i64).collect();
    let hi: Vec<i64> = center.iter().map(|c| (c + radius).floor() as i64).collect();
    let mut n: Vec<i64> = lo.clone();
    let mut value = Complex64::new(0.0, 0.0);
    let mut terms = 0;
    let i_pi = Complex64::new(0.0, PI);
    'outer: loop {
        let dist2: f64 = n.iter().zip(center.iter()).map(|(&k, c)| (k as f64 - c).powi(2)).sum();
        if dist2 <= radius * radius {
            let mut quad = Complex64::new(0.0, 0.0);
            let mut lin = Complex64::new(0.0, 0.0);
            for i in 0..g {
                let ni = n[i] as f64;
                lin += z[i] * ni;
                for j in 0..g {
                    quad += b[(i, j)] * (ni * n[j] as f64);
                }
            }
            value += (i_pi * (quad + lin * 2.0)).exp();
            terms += 1;
        }
        // odometer over the box
        for i in 0..g {
            if n[i] < hi[i] {
                n[i] += 1;
                continue 'outer;
            }
            n[i] = lo[i];
        }
        break;
    }
    Ok(ThetaSum {
        value,
        tail_bound: peak * tail_bound(mu, radius, g),
        radius,
        terms,
    })
}

pub fn riemann_theta(
    z: &[Complex64],
    b: &DMatrix<Complex64>,
    trunc_radius: Option<f64>,
) -> Result<Complex64, ThetaError> {
    Ok(riemann_theta_sum(z, b, trunc_radius)?.value)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralData {
    pub genus: usize,
    pub b: DMatrix<Complex64>,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
    pub d: Vec<Complex64>,
    pub kappa: f64,
    /// Two real period vectors in the `(x, y)` plane.
    pub lattice: [[f64; 2]; 2],
}

impl SpectralData {
    pub fn validate(&self) -> Result<(), ThetaError> {
        let g = self.genus;
        if g == 0 {
            return Err(ThetaError::InvalidData("genus must be at least 1".into()));
        }
        if self.b.nrows() != g || self.b.ncols() != g {
            return Err(ThetaError::Dimension {
                expected: g * g,
                got: self.b.len(),
            });
        }
        for vec in [&self.u, &self.v, &self.d] {
            if vec.len() != g {
                return Err(ThetaError::Dimension {
                    expected: g,
                    got: vec.len(),
                });
            }
        }
        check_riemann_matrix(&self.b)?;
        if let Some(d) = self.d.iter().find(|d| d.re.abs() > 1e-12) {
            return Err(ThetaError::InvalidData(format!("D must be purely imaginary, found {d}")));
        }
        if !(self.kappa.is_finite() && self.kappa > 0.0) {
            return Err(ThetaError::InvalidData("kappa must be positive".into()));
        }
        let [w1, w2] = self.lattice;
        if (w1[0] * w2[1] - w1[1] * w2[0]).abs() < 1e-12 {
            return Err(ThetaError::InvalidData("lattice vectors are linearly dependent".into()));
        }
        Ok(())
    }

    /// `3g`: the real parameters a dataset of this genus carries.
    pub fn real_parameter_count(&self) -> usize {
        3 * self.genus
    }

    pub fn load(path: &Path) -> Result<Self, ThetaError> {
        let text = std::fs::read_to_string(path).map_err(|e| ThetaError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ThetaError> {
        let mut entries: HashMap<String, (usize, String)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ThetaError::Parse {
                line: idx + 1,
                message: "expected key = value".into(),
            })?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), (idx + 1, v.trim().to_string())).is_some() {
                return Err(ThetaError::Parse {
                    line: idx + 1,
                    message: format!("duplicate key {key}"),
                });
            }
        }
        let get = |key: &str| -> Result<&(usize, String), ThetaError> {
            entries.get(key).ok_or_else(|| ThetaError::Parse {
                line: 0,
                message: format!("missing key {key}"),
            })
        };
        let real = |key: &str| -> Result<f64, ThetaError> {
            let (line, v) = get(key)?;
            v.parse().map_err(|_| ThetaError::Parse {
                line: *line,
                message: format!("{key}: not a number: {v}"),
            })
        };
        let complex_list = |key: &str| -> Result<Vec<Complex64>, ThetaError> {
            let (line, v) = get(key)?;
            v.split_whitespace()
                .map(|tok| parse_pair(tok).map(|(re, im)| Complex64::new(re, im)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| ThetaError::Parse {
                    line: *line,
                    message: format!("{key}: expected re,im pairs"),
                })
        };
        let pair = |key: &str| -> Result<[f64; 2], ThetaError> {
            let (line, v) = get(key)?;
            parse_pair(v).map(|(a, b)| [a, b]).ok_or_else(|| ThetaError::Parse {
                line: *line,
                message: format!("{key}: expected x,y"),
            })
        };

        let (gline, gtext) = get("genus")?;
        let genus: usize = gtext.parse().map_err(|_| ThetaError::Parse {
            line: *gline,
            message: format!("genus: not an integer: {gtext}"),
        })?;
        let b_entries = complex_list("B")?;
        if b_entries.len() != genus * genus {
            return Err(ThetaError::Dimension {
                expected: genus * genus,
                got: b_entries.len(),
            });
        }
        let data = SpectralData {
            genus,
            b: DMatrix::from_row_slice(genus, genus, &b_entries),
            u: complex_list("U")?,
            v: complex_list("V")?,
            d: complex_list("D")?,
            kappa: real("kappa")?,
            lattice: [pair("lattice1")?, pair("lattice2")?],
        };
        data.validate()?;
        Ok(data)
    }
}

fn parse_pair(tok: &str) -> Option<(f64, f64)> {
    let (a, b) = tok.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

/// `α` at `z = x + iy`. Errors when a theta factor vanishes or the
/// log-ratio has an imaginary part above `1e-8`.
pub fn dp_solution(data: &SpectralData, x: f64, y: f64) -> Result<f64, ThetaError> {
    let z = Complex64::new(x, y);
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let arg: Vec<Complex64> = (0..data.genus)
        .map(|k| {
            let w = -Complex64::i() * (data.u[k] * z + data.v[k] * z.conj()) * 0.5 + data.d[k];
            w / two_pi_i
        })
        .collect();
    let shifted: Vec<Complex64> = arg.iter().map(|a| a + 0.5).collect();
    let num = riemann_theta(&arg, &data.b, None)?;
    let den = riemann_theta(&shifted, &data.b, None)?;
    for t in [num, den] {
        if t.norm() < SINGULAR_THETA {
            return Err(ThetaError::Singular { z, modulus: t.norm() });
        }
    }
    let alpha = (num / den).ln();
    if alpha.im.abs() > REALITY_TOL {
        return Err(ThetaError::NotReal { z, imag: alpha.im });
    }
    Ok(alpha.re)
}

/// Largest `|α(p + ω) - α(p)|` over the points and both lattice vectors.
pub fn periodicity_error(data: &SpectralData, points: &[(f64, f64)]) -> Result<f64, ThetaError> {
    let mut worst: f64 = 0.0;
    for &(x, y) in points {
        let a = dp_solution(data, x, y)?;
        for w in data.lattice {
            worst = worst.max((dp_solution(data, x + w[0], y + w[1])? - a).abs());
        }
    }
    Ok(worst)
}

/// Samples of a field on the torus spanned by two lattice vectors: node
/// `(i, j)` sits at `origin + (i/nx) ω₁ + (j/ny) ω₂`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusGrid {
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub lattice: [[f64; 2]; 2],
    /// Row-major: index `j * nx + i`.
    pub alpha: Vec<f64>,
}

impl TorusGrid {
    pub const MIN_SIZE: usize = 16;

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        node_position(self.origin, self.lattice, self.nx, self.ny, i, j)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.alpha[(j % self.ny) * self.nx + (i % self.nx)]
    }

    pub fn sample<E, F>(
        nx: usize,
        ny: usize,
        origin: [f64; 2],
        lattice: [[f64; 2]; 2],
        f: F,
    ) -> Result<Self, E>
    where
        F: Fn(f64, f64) -> Result<f64, E>,
        E: From<ThetaError>,
    {
        if nx < Self::MIN_SIZE || ny < Self::MIN_SIZE {
            return Err(ThetaError::InvalidData(format!(
                "torus grid needs at least {0}×{0} nodes, got {nx}×{ny}",
                Self::MIN_SIZE
            ))
            .into());
        }
        let mut alpha = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = node_position(origin, lattice, nx, ny, i, j);
                alpha.push(f(x, y)?);
            }
        }
        Ok(Self {
            nx,
            ny,
            origin,
            lattice,
            alpha,
        })
    }

    /// Largest change of `α` between neighbouring nodes relative to its
    /// range; below 0.1 the grid resolves the field.
    pub fn max_cell_change(&self) -> f64 {
        let range = self.alpha.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1e-300);
        let mut worst: f64 = 0.0;
        for j in 0..self.ny {
            for i in 0..self.nx {
                let a = self.at(i, j);
                worst = worst.max((self.at(i + 1, j) - a).abs()).max((self.at(i, j + 1) - a).abs());
            }
        }
        worst / range
    }

    /// Second-order periodic Laplacian at every node. With `x = W s`
    /// (`W = [ω₁ ω₂]`), `∇² = Σ (G⁻¹)_{ab} ∂_{s_a} ∂_{s_b}`, `G = WᵀW`.
    pub fn laplacian(&self) -> Vec<f64> {
        let [w1, w2] = self.lattice;
        let g11 = w1[0] * w1[0] + w1[1] * w1[1];
        let g22 = w2[0] * w2[0] + w2[1] * w2[1];
        let g12 = w1[0] * w2[0] + w1[1] * w2[1];
        let det = g11 * g22 - g12 * g12;
        let (i11, i22, i12) = (g22 / det, g11 / det, -g12 / det);
        let (h1, h2) = (1.0 / self.nx as f64, 1.0 / self.ny as f64);
        let (nx, ny) = (self.nx, self.ny);
        let mut out = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (ip, im, jp, jm) = (i + 1, i + nx - 1, j + 1, j + ny - 1);
                let c = self.at(i, j);
                let d11 = (self.at(ip, j) - 2.0 * c + self.at(im, j)) / (h1 * h1);
                let d22 = (self.at(i, jp) - 2.0 * c + self.at(i, jm)) / (h2 * h2);
                let d12 = (self.at(ip, jp) - self.at(ip, jm) - self.at(im, jp) + self.at(im, jm)) / (4.0 * h1 * h2);
                out.push(i11 * d11 + i22 * d22 + 2.0 * i12 * d12);
            }
        }
        out
    }
}

fn node_position(origin: [f64; 2], lattice: [[f64; 2]; 2], nx: usize, ny: usize, i: usize, j: usize) -> (f64, f64) {
    let (s1, s2) = (i as f64 / nx as f64, j as f64 / ny as f64);
    (
        origin[0] + s1 * lattice[0][0] + s2 * lattice[1][0],
        origin[1] + s1 * lattice[0][1] + s2 * lattice[1][1],
    )
}

/// Pointwise residual of `∇²α + (κ²/2) sinh 2α` on the grid.
pub fn pde_residual_field(grid: &TorusGrid, kappa: f64) -> Vec<f64> {
    grid.laplacian()
        .iter()
        .zip(&grid.alpha)
        .map(|(lap, a)| lap + 0.5 * kappa * kappa * (2.0 * a).sinh())
        .collect()
}

pub fn pde_residual_grid(grid: &TorusGrid, kappa: f64) -> f64 {
    pde_residual_field(grid, kappa).iter().fold(0.0, |m, r| m.max(r.abs()))
}

/// Samples `dp_solution` on the dataset's own lattice.
pub fn sample_dp_solution(data: &SpectralData, nx: usize, ny: usize) -> Result<TorusGrid, ThetaError> {
    TorusGrid::sample(nx, ny, [0.0, 0.0], data.lattice, |x, y| dp_solution(data, x, y))
}

/// Periodic solution of `α'' = -(κ²/2) sinh 2α` oscillating between
/// `±a0`, started at the turning point `α(0) = a0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LibrationProfile {
    pub a0: f64,
    pub kappa: f64,
    pub period: f64,
}

const LIBRATION_QUAD: QuadOptions = QuadOptions {
    rel_tol: 1e-14,
    abs_tol: 1e-15,
    max_intervals: 2000,
};

impl LibrationProfile {
    /// `(κ²/4)(cosh 2α - 1)`.
    pub fn potential(&self, alpha: f64) -> f64 {
        0.25 * self.kappa * self.kappa * ((2.0 * alpha).cosh() - 1.0)
    }

    pub fn energy(&self) -> f64 {
        self.potential(self.a0)
    }

    /// `2(E - V(α))`, written as a product to avoid cancellation near the
    /// turning points.
    fn twice_kinetic(&self, alpha: f64) -> f64 {
        let k2 = self.kappa * self.kappa;
        (k2 * (self.a0 + alpha).sinh() * (self.a0 - alpha).sinh()).max(0.0)
    }

    /// `dt/dφ` along `α = a0 sin φ` (magnitude).
    fn dt_dphi(&self, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let k2 = self.kappa * self.kappa;
        // a0 - a0 sin φ = a0 cos²φ / (1 + sin φ)
        let ke = k2 * (self.a0 * (1.0 + s)).sinh() * (self.a0 * c * c / (1.0 + s)).sinh();
        self.a0 * c / ke.sqrt()
    }

    /// Time from the turning point `a0` to `a0 sin φ`.
    fn time_to(&self, phi: f64) -> f64 {
        integrate(|p| self.dt_dphi(p), phi, PI / 2.0, LIBRATION_QUAD)
            .expect("smooth integrand")
            .value
    }

    /// `α` on the first quarter period, `t ∈ [0, L/4]`.
    fn quarter(&self, t: f64) -> f64 {
        let quarter = 0.25 * self.period;
        if t <= 0.0 {
            return self.a0;
        }
        if t >= quarter {
            return 0.0;
        }
        // T(φ) decreases from L/4 at φ = 0 to 0 at φ = π/2
        let (mut lo, mut hi) = (0.0, PI / 2.0);
        let mut phi = PI / 2.0 * (1.0 - t / quarter);
        for _ in 0..100 {
            let f = self.time_to(phi) - t;
            if f.abs() < 1e-15 * quarter {
                break;
            }
            if f > 0.0 {
                lo = phi;
            } else {
                hi = phi;
            }
            let newton = phi + f / self.dt_dphi(phi);
            phi = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-15 {
                break;
            }
        }
        self.a0 * phi.sin()
    }

    pub fn value(&self, t: f64) -> f64 {
        let l = self.period;
        let t = t.rem_euclid(l);
        if t <= 0.25 * l {
            self.quarter(t)
        } else if t <= 0.5 * l {
            -self.quarter(0.5 * l - t)
        } else if t <= 0.75 * l {
            -self.quarter(t - 0.5 * l)
        } else {
            self.quarter(l - t)
        }
    }

    /// `α'(t)` from energy conservation, signed by the quarter.
    pub fn derivative(&self, t: f64) -> f64 {
        let t = t.rem_euclid(self.period);
        let speed = self.twice_kinetic(self.value(t)).sqrt();
        if t <= 0.5 * self.period {
            -speed
        } else {
            speed
        }
    }

    /// `n` equally spaced samples `(t, α)` over one period.
    pub fn samples(&self, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = self.period * k as f64 / n as f64;
                (t, self.value(t))
            })
            .collect()
    }
}

/// Builds the libration profile of amplitude `a0`; its period is
/// `L = 4 ∫₀^{π/2} a0 cos φ dφ / √(2(E - V(a0 sin φ)))`.
pub fn libration_oracle(a0: f64, kappa: f64) -> Result<LibrationProfile, ThetaError> {
    if !(a0 > 0.0 && a0 < 20.0) {
        return Err(ThetaError::InvalidData(format!("amplitude must lie in (0, 20), got {a0}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(ThetaError::InvalidData("kappa must be positive".into()));
    }
    let mut p = LibrationProfile {
        a0,
        kappa,
        period: 0.0,
    };
    p.period = 4.0 * p.time_to(0.0);
    Ok(p)
}

/// The libration profile as a field on the rectangle `(L, 0) × (0, height)`.
pub fn sample_libration(profile: &LibrationProfile, nx: usize, ny: usize, height: f64) -> Result<TorusGrid, ThetaError> {
    TorusGrid::sample(nx, ny, [0.0, 0.0], [[profile.period, 0.0], [0.0, height]], |x, _| {
        Ok::<_, ThetaError>(profile.value(x))
    })
}

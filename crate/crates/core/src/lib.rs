//! Solutions of the dimensionally reduced self-dual Yang-Mills (Hitchin)
//! equations for the real forms `SU(2)` and `SO(2,1)` of `SL(2, C)`.
//!
//! * [`algebra`]: τ-generators, brackets and Killing signs of the real forms.
//! * [`fields`]: ansatz fields, curvature, Hitchin residuals, action densities.
//! * [`liouville`]: exact `κ = 0` solutions, gauge patches on `S²`, flux.
//! * [`painleve_ode`]: radial sinh-/sine-Gordon profiles and their asymptotics.
//! * [`theta_torus`]: Riemann theta functions and doubly periodic solutions.
//! * [`cli`]: command-line driver writing CSV output.

pub mod algebra;
pub mod cli;
pub mod fields;
pub mod liouville;
pub mod painleve_ode;
pub mod quad;
pub mod theta_torus;

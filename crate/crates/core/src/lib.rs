//! Dirichlet-Laplacian eigenvalues on spherical cones Ω_β ⊂ ℝ^N and on the
//! perturbed cones obtained by removing a small ball around the vertex.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Gamma, ₂F₁, Bessel J/Y of real order, Ferrers functions
//!   and bracketed root finding.
//! * [`geometry`]: cones, cut cones, cap measures, removed volumes and
//!   Monte Carlo volumes of the Lipschitz-cut variant.
//! * [`charval`]: the angular parameters Σ_β and the characteristic value
//!   l_β of the spherical cap.
//! * [`spectrum`]: eigenvalues from Bessel zeros and cross-product zeros,
//!   branch tracking in ε, radial profiles and gradient integrability.
//! * [`asymptotics`]: the implicit-function derivatives, the expansion
//!   coefficient, rate fitting and the sharpness report.
//! * [`oracle`]: finite-difference eigensolvers that do not use the
//!   special-function stack.

// `!(x > 0.0)` guards are written that way so NaN fails them too
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// series and quadrature constants are kept at their published precision
#![allow(clippy::excessive_precision)]

pub mod asymptotics;
pub mod charval;
pub mod error;
pub mod geometry;
pub mod oracle;
mod quad;
pub mod specfun;
pub mod spectrum;

pub use error::{Error, ErrorClass, Result};

//! Certified convex-hull estimation from boundary samples.
//!
//! Given a compact input set `X` with smooth boundary and a smooth map `f`,
//! the convex hull of `f(X)` can be reconstructed from the images of finitely
//! many boundary points, with an a-priori Hausdorff error certificate that is
//! quadratic in the covering radius of the sample. This crate provides:
//!
//! * [`geometry`] - convex hulls, min-norm-point projection, support
//!   functions, and Hausdorff distances between nested convex hulls;
//! * [`covers`] - deterministic and random boundary covers of balls and
//!   spheres, covering radii, covering numbers, and the sampling-density
//!   constant `Λ`;
//! * [`bounds`] - the closed-form error certificates (first-order,
//!   second-order, diffeomorphism, Dümbgen) and the probabilistic covering
//!   guarantee `β = N (1 − Λ)^M`, with inversions;
//! * [`maps`] - smooth-map descriptors (evaluator + Jacobian + smoothness
//!   constants) and the built-in demo maps;
//! * [`reach`] - RK4 flow integration, variational (sensitivity) equations,
//!   and reachable-hull estimation with certificates;
//! * [`qp`] - a self-contained ADMM solver for convex quadratic programs;
//! * [`robust`] - padded sampled relaxations of robust programs and the
//!   spacecraft trajectory-planning instance end to end.
//!
//! Everything is deterministic given explicit seeds; randomness comes from the
//! counter-based generator in [`rng`].

pub mod bounds;
pub mod covers;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod maps;
pub mod plot;
pub mod qp;
pub mod reach;
pub mod rng;
pub mod robust;

pub use error::{Error, Result};

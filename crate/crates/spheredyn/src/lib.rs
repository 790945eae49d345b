//! Dynamics of mechanical systems whose configuration space is a product
//! of two-spheres: chains of spherical pendulums and, more generally, any
//! system with a kinetic energy quadratic in the sphere velocities.
//!
//! The library works directly with the unit vectors `q_i` and avoids
//! local angle coordinates entirely, so there are no chart-boundary
//! singularities. Four equivalent realizations of the equations of
//! motion are provided and are expected to agree to integration
//! accuracy:
//!
//! * Euler-Lagrange in position / velocity `(q, qdot)`,
//! * Euler-Lagrange in position / angular velocity `(q, omega)`,
//! * Hamilton in position / conjugate momentum `(q, mu)`,
//! * Hamilton in position / angular momentum `(q, pi)`.
//!
//! Fixed-step explicit integrators with optional constraint repair live
//! in [`integrator`], concrete pendulum models in [`pendulum`], and the
//! variational self-checks (action quadrature, perturbed trajectories,
//! d'Alembert residuals, cross-formulation agreement) in [`variational`].

pub mod error;
pub mod hamiltonian;
pub mod integrator;
pub mod lagrangian;
mod linsys;
pub mod model;
pub mod pendulum;
pub mod sample;
pub mod so3;
pub mod sphere;
pub mod tol;
pub mod variational;

pub use error::DynamicsError;
pub use so3::{Mat3, Vec3};
pub use sphere::{Representation, SpherePoint, SystemState, TangentVector};

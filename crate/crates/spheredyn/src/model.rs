//! Model abstractions: quadratic kinetic energy plus potential, and
//! external forces.
//!
//! A model supplies the configuration-dependent scalar inertia entries
//! `m_jk(q)` of the kinetic form `1/2 sum_jk m_jk qdot_j . qdot_k`, the
//! potential `U(q)`, and optionally their analytic gradients. Missing
//! gradients fall back to central finite differences, so simple models
//! only need the two value functions.

use nalgebra::DMatrix;

use crate::error::DynamicsError;
use crate::so3::Vec3;
use crate::sphere::project_tangent;
use crate::tol;

/// n x n table of gradient vectors `d m_jk / d q_i` for one derivative
/// index `i`, stored row-major in `(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InertiaGradient {
    n: usize,
    g: Vec<Vec3>,
}

impl InertiaGradient {
    pub fn zeros(n: usize) -> Self {
        InertiaGradient {
            n,
            g: vec![Vec3::zeros(); n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> Vec3 {
        self.g[j * self.n + k]
    }

    pub fn set(&mut self, j: usize, k: usize, v: Vec3) {
        self.g[j * self.n + k] = v;
    }

    /// Set both `(j, k)` and `(k, j)`; the inertia is symmetric, so its
    /// gradient tables are too.
    pub fn set_sym(&mut self, j: usize, k: usize, v: Vec3) {
        self.set(j, k, v);
        if j != k {
            self.set(k, j, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().all(|v| *v == Vec3::zeros())
    }
}

/// Mechanical system with kinetic energy quadratic in the sphere
/// velocities and a configuration potential.
///
/// Gradient conventions: analytic gradients may be returned in ambient
/// form; every consumer either contracts them with tangent vectors or
/// projects the surrounding expression, so only their tangential part
/// matters. The finite-difference fallbacks return projected gradients.
pub trait QuadraticModel {
    /// Number of spheres.
    fn n(&self) -> usize;

    /// Symmetric scalar inertia entries `m_jk(q)`, as an `n x n` matrix.
    fn inertia(&self, q: &[Vec3]) -> DMatrix<f64>;

    /// Potential energy `U(q)`.
    fn potential(&self, q: &[Vec3]) -> f64;

    /// Analytic `d m_jk / d q_wrt`, if the model provides it.
    fn inertia_grad(&self, _q: &[Vec3], _wrt: usize) -> Option<InertiaGradient> {
        None
    }

    /// Analytic `d U / d q_wrt`, if the model provides it.
    fn potential_grad(&self, _q: &[Vec3], _wrt: usize) -> Option<Vec3> {
        None
    }
}

/// External forces `f_i(t, q)`, one ambient 3-vector per body.
pub trait ForceModel {
    fn forces(&self, t: f64, q: &[Vec3]) -> Vec<Vec3>;
}

/// The unforced system.
pub struct ZeroForces;

impl ForceModel for ZeroForces {
    fn forces(&self, _t: f64, q: &[Vec3]) -> Vec<Vec3> {
        vec![Vec3::zeros(); q.len()]
    }
}

fn fd_step(q: &Vec3) -> f64 {
    tol::MODEL_FD_STEP * q.norm().max(1.0)
}

/// Inertia gradient table, analytic when available, otherwise central
/// finite differences projected onto the tangent plane at `q_wrt`.
pub fn inertia_gradient(model: &dyn QuadraticModel, q: &[Vec3], wrt: usize) -> InertiaGradient {
    if let Some(g) = model.inertia_grad(q, wrt) {
        return g;
    }
    let n = model.n();
    let h = fd_step(&q[wrt]);
    let mut per_component = Vec::with_capacity(3);
    let mut probe = q.to_vec();
    for c in 0..3 {
        probe[wrt][c] = q[wrt][c] + h;
        let plus = model.inertia(&probe);
        probe[wrt][c] = q[wrt][c] - h;
        let minus = model.inertia(&probe);
        probe[wrt][c] = q[wrt][c];
        per_component.push((plus - minus) / (2.0 * h));
    }
    let mut out = InertiaGradient::zeros(n);
    for j in 0..n {
        for k in 0..n {
            let g = Vec3::new(
                per_component[0][(j, k)],
                per_component[1][(j, k)],
                per_component[2][(j, k)],
            );
            out.set(j, k, project_tangent(&q[wrt], &g));
        }
    }
    out
}

/// Potential gradient, analytic when available, otherwise central
/// finite differences projected onto the tangent plane at `q_wrt`.
pub fn potential_gradient(model: &dyn QuadraticModel, q: &[Vec3], wrt: usize) -> Vec3 {
    if let Some(g) = model.potential_grad(q, wrt) {
        return g;
    }
    let h = fd_step(&q[wrt]);
    let mut g = Vec3::zeros();
    let mut probe = q.to_vec();
    for c in 0..3 {
        probe[wrt][c] = q[wrt][c] + h;
        let plus = model.potential(&probe);
        probe[wrt][c] = q[wrt][c] - h;
        let minus = model.potential(&probe);
        probe[wrt][c] = q[wrt][c];
        g[c] = (plus - minus) / (2.0 * h);
    }
    project_tangent(&q[wrt], &g)
}

/// True when the scalar inertia matrix at `q` admits a Cholesky
/// factorization, i.e. the kinetic form is positive-definite there.
pub fn inertia_positive_definite(model: &dyn QuadraticModel, q: &[Vec3]) -> bool {
    model.inertia(q).cholesky().is_some()
}

/// Reject models the evaluators cannot work with.
pub(crate) fn check_model(model: &dyn QuadraticModel) -> Result<(), DynamicsError> {
    if model.n() == 0 {
        return Err(DynamicsError::invalid("model has zero bodies"));
    }
    Ok(())
}

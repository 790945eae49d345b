//! Chain pendulum models: n rigid, massless links with point masses,
//! each link direction a point on the sphere.
//!
//! Mass `i` sits at `x_i = sum_{j<=i} l_j q_j`. The resulting kinetic
//! energy is quadratic with the constant scalar inertia
//! `m_ij = (sum_{k >= max(i,j)} mass_k) l_i l_j`, and gravity along
//! `-e3` gives the linear potential with the hanging equilibrium at
//! `q_i = -e3`. The spherical pendulum is the one-link chain.

use nalgebra::DMatrix;

use crate::error::DynamicsError;
use crate::model::{ForceModel, InertiaGradient, QuadraticModel};
use crate::so3::{hat, Vec3};

/// Chain of spherical pendulums under gravity.
#[derive(Debug, Clone)]
pub struct ChainPendulum {
    masses: Vec<f64>,
    lengths: Vec<f64>,
    gravity: f64,
    inertia: DMatrix<f64>,
    /// Potential weight per link: `(sum_{j>=i} m_j) g l_i`.
    weights: Vec<f64>,
}

impl ChainPendulum {
    /// Build a chain of `masses.len()` links. Masses and lengths must be
    /// positive and of equal number; gravity must not be negative.
    pub fn new(masses: Vec<f64>, lengths: Vec<f64>, gravity: f64) -> Result<Self, DynamicsError> {
        let n = masses.len();
        if n == 0 {
            return Err(DynamicsError::invalid("chain needs at least one link"));
        }
        if lengths.len() != n {
            return Err(DynamicsError::invalid(format!(
                "{} masses but {} lengths",
                n,
                lengths.len()
            )));
        }
        if let Some(i) = masses.iter().position(|m| !m.is_finite() || *m <= 0.0) {
            return Err(DynamicsError::invalid(format!(
                "mass {i} is {} (must be positive and finite)",
                masses[i]
            )));
        }
        if let Some(i) = lengths.iter().position(|l| !l.is_finite() || *l <= 0.0) {
            return Err(DynamicsError::invalid(format!(
                "length {i} is {} (must be positive and finite)",
                lengths[i]
            )));
        }
        if !gravity.is_finite() || gravity < 0.0 {
            return Err(DynamicsError::invalid(format!(
                "gravity is {gravity} (must be nonnegative and finite)"
            )));
        }

        // tail_mass[i] = sum of masses from link i outward
        let mut tail_mass = vec![0.0; n];
        let mut acc = 0.0;
        for i in (0..n).rev() {
            acc += masses[i];
            tail_mass[i] = acc;
        }
        let mut inertia = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inertia[(i, j)] = tail_mass[i.max(j)] * lengths[i] * lengths[j];
            }
        }
        let weights = (0..n).map(|i| tail_mass[i] * gravity * lengths[i]).collect();
        Ok(ChainPendulum {
            masses,
            lengths,
            gravity,
            inertia,
            weights,
        })
    }

    /// The one-link chain.
    pub fn spherical(mass: f64, length: f64, gravity: f64) -> Result<Self, DynamicsError> {
        Self::new(vec![mass], vec![length], gravity)
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }

    /// Cartesian positions of the point masses: partial sums of the
    /// scaled link directions.
    pub fn tip_positions(&self, q: &[Vec3]) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(q.len());
        let mut x = Vec3::zeros();
        for (l, qi) in self.lengths.iter().zip(q) {
            x += *l * qi;
            out.push(x);
        }
        out
    }
}

impl QuadraticModel for ChainPendulum {
    fn n(&self) -> usize {
        self.masses.len()
    }

    fn inertia(&self, _q: &[Vec3]) -> DMatrix<f64> {
        self.inertia.clone()
    }

    fn potential(&self, q: &[Vec3]) -> f64 {
        self.weights.iter().zip(q).map(|(w, qi)| w * qi.z).sum()
    }

    fn inertia_grad(&self, _q: &[Vec3], _wrt: usize) -> Option<InertiaGradient> {
        Some(InertiaGradient::zeros(self.n()))
    }

    fn potential_grad(&self, _q: &[Vec3], wrt: usize) -> Option<Vec3> {
        Some(Vec3::new(0.0, 0.0, self.weights[wrt]))
    }
}

/// Actuation of a chain pendulum: a torque at the pivot and a uniform
/// disturbance force acting on every mass.
///
/// The generalized force on link 1 is `tau + l_1 hat(q_1) d` and on
/// link `j > 1` it is `l_j hat(q_j) d`.
#[derive(Debug, Clone)]
pub struct ChainForces {
    torque: Vec3,
    disturbance: Vec3,
    lengths: Vec<f64>,
}

impl ChainForces {
    pub fn new(chain: &ChainPendulum, torque: Vec3, disturbance: Vec3) -> Self {
        ChainForces {
            torque,
            disturbance,
            lengths: chain.lengths.clone(),
        }
    }
}

impl ForceModel for ChainForces {
    fn forces(&self, _t: f64, q: &[Vec3]) -> Vec<Vec3> {
        self.lengths
            .iter()
            .zip(q)
            .enumerate()
            .map(|(i, (l, qi))| {
                let f = *l * (hat(qi) * self.disturbance);
                if i == 0 {
                    self.torque + f
                } else {
                    f
                }
            })
            .collect()
    }
}

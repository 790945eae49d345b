//! Assembly and solution of the 3n x 3n block systems shared by the
//! acceleration evaluators and the Legendre transforms.
//!
//! Both momentum maps have block structure with `m_ii I` on the
//! diagonal; off the diagonal the velocity map carries projected scalar
//! blocks `(I - q_i q_i^T) m_ij` and the angular map carries
//! `hat(q_i)^T m_ij hat(q_j)`. The inverse inertia is never formed:
//! inverse applications solve the corresponding forward system.

use nalgebra::{DMatrix, DVector, Matrix3};

use crate::error::DynamicsError;
use crate::so3::{hat, Mat3, Vec3};
use crate::tol;

/// Block matrix of the velocity-side momentum map:
/// diagonal `m_ii I`, off-diagonal `(I - q_i q_i^T) m_ij`.
pub(crate) fn mu_matrix(m: &DMatrix<f64>, q: &[Vec3]) -> DMatrix<f64> {
    let n = q.len();
    let mut a = DMatrix::zeros(3 * n, 3 * n);
    for i in 0..n {
        let proj = Mat3::identity() - q[i] * q[i].transpose();
        for j in 0..n {
            let block: Mat3 = if i == j {
                Matrix3::from_diagonal_element(m[(i, i)])
            } else {
                proj * m[(i, j)]
            };
            a.view_mut((3 * i, 3 * j), (3, 3)).copy_from(&block);
        }
    }
    a
}

/// Block matrix of the angular-side momentum map:
/// diagonal `m_ii I`, off-diagonal `hat(q_i)^T m_ij hat(q_j)`.
pub(crate) fn pi_matrix(m: &DMatrix<f64>, q: &[Vec3]) -> DMatrix<f64> {
    let n = q.len();
    let mut a = DMatrix::zeros(3 * n, 3 * n);
    for i in 0..n {
        let si_t = hat(&q[i]).transpose();
        for j in 0..n {
            let block: Mat3 = if i == j {
                Matrix3::from_diagonal_element(m[(i, i)])
            } else {
                si_t * (m[(i, j)] * hat(&q[j]))
            };
            a.view_mut((3 * i, 3 * j), (3, 3)).copy_from(&block);
        }
    }
    a
}

/// Apply a block matrix to stacked per-body vectors.
pub(crate) fn apply(a: &DMatrix<f64>, x: &[Vec3]) -> Vec<Vec3> {
    let v = a * stack(x);
    unstack(&v)
}

pub(crate) fn stack(x: &[Vec3]) -> DVector<f64> {
    DVector::from_iterator(3 * x.len(), x.iter().flat_map(|v| [v.x, v.y, v.z]))
}

pub(crate) fn unstack(v: &DVector<f64>) -> Vec<Vec3> {
    (0..v.len() / 3)
        .map(|i| Vec3::new(v[3 * i], v[3 * i + 1], v[3 * i + 2]))
        .collect()
}

#[derive(Debug)]
pub(crate) struct Solution {
    pub x: Vec<Vec3>,
    /// Cheap reciprocal-condition estimate from the LU factor diagonal.
    pub rcond: f64,
}

/// Solve `a x = b` by partially pivoted LU.
///
/// The reciprocal condition number is estimated as the ratio of the
/// smallest to the largest pivot magnitude; systems below
/// [`tol::RCOND_FLOOR`] are reported as singular rather than solved.
pub(crate) fn solve(a: DMatrix<f64>, b: &[Vec3]) -> Result<Solution, DynamicsError> {
    let lu = a.lu();
    let diag = lu.u().diagonal();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for d in diag.iter() {
        lo = lo.min(d.abs());
        hi = hi.max(d.abs());
    }
    let rcond = if hi > 0.0 { lo / hi } else { 0.0 };
    if rcond < tol::RCOND_FLOOR {
        return Err(DynamicsError::SingularInertia { rcond, time: None });
    }
    match lu.solve(&stack(b)) {
        Some(x) => Ok(Solution {
            x: unstack(&x),
            rcond,
        }),
        None => Err(DynamicsError::SingularInertia { rcond, time: None }),
    }
}

//! The hat map and its algebra.
//!
//! Everything the library does on the sphere bottoms out in the linear
//! map `hat` that turns a 3-vector into the skew-symmetric matrix
//! implementing its cross product, `hat(x) * y == x.cross(y)`. This
//! module provides the map, its inverse, and residual checks for the
//! identities the dynamics derivations lean on.

use nalgebra::{Matrix3, Vector3};

use crate::error::DynamicsError;
use crate::tol;

/// Column 3-vector of `f64`.
pub type Vec3 = Vector3<f64>;
/// Dense 3x3 matrix of `f64`.
pub type Mat3 = Matrix3<f64>;

/// Skew-symmetric matrix of `x`, acting as the cross product with `x`:
///
/// ```text
///            [   0  -x3   x2 ]
/// hat(x)  =  [  x3    0  -x1 ]
///            [ -x2   x1    0 ]
/// ```
#[inline]
pub fn hat(x: &Vec3) -> Mat3 {
    Mat3::new(0.0, -x.z, x.y, x.z, 0.0, -x.x, -x.y, x.x, 0.0)
}

/// Inverse of [`hat`]: extracts the vector from a skew-symmetric matrix.
///
/// The components are copied straight out of the matrix, so
/// `vee(hat(x))` returns `x` bit for bit. Matrices whose symmetric part
/// exceeds [`tol::SKEW_ASYMMETRY`] are rejected.
pub fn vee(m: &Mat3) -> Result<Vec3, DynamicsError> {
    let asym = (m + m.transpose()).abs().max();
    if asym > tol::SKEW_ASYMMETRY {
        return Err(DynamicsError::NotSkewSymmetric {
            asymmetry: asym,
            limit: tol::SKEW_ASYMMETRY,
        });
    }
    Ok(Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// Cross product `x cross y`.
#[inline]
pub fn cross(x: &Vec3, y: &Vec3) -> Vec3 {
    x.cross(y)
}

/// Inner product `x . y`.
#[inline]
pub fn dot(x: &Vec3, y: &Vec3) -> f64 {
    x.dot(y)
}

/// Outer product `x y^T`.
#[inline]
pub fn outer(x: &Vec3, y: &Vec3) -> Mat3 {
    x * y.transpose()
}

/// Largest residual entries of the hat-map identities at `(x, y, z)`.
///
/// Each field is the max absolute deviation of one identity; all of
/// them should sit at rounding level for any finite inputs. The
/// self-check command and the kernel tests sweep this over random
/// triples.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResiduals {
    /// `hat(x) y == x cross y`
    pub hat_action: f64,
    /// `hat(x)^T == -hat(x)`
    pub antisymmetry: f64,
    /// `hat(x)^2 == -(x.x) I + x x^T`
    pub square: f64,
    /// `hat(x)^3 == -(x.x) hat(x)`
    pub cube: f64,
    /// `x . (y cross z)` invariant under cyclic rotation
    pub triple_product: f64,
    /// `hat(x) hat(y) z == (x.z) y - (x.y) z`
    pub double_cross: f64,
    /// `hat(x cross y) == hat(x)hat(y) - hat(y)hat(x) == y x^T - x y^T`
    pub hat_of_cross: f64,
}

impl IdentityResiduals {
    /// Worst residual across all identities.
    pub fn max(&self) -> f64 {
        self.hat_action
            .max(self.antisymmetry)
            .max(self.square)
            .max(self.cube)
            .max(self.triple_product)
            .max(self.double_cross)
            .max(self.hat_of_cross)
    }
}

/// Evaluate every hat-map identity residual at one input triple.
pub fn identity_residuals(x: &Vec3, y: &Vec3, z: &Vec3) -> IdentityResiduals {
    let sx = hat(x);
    let sy = hat(y);
    let xx = x.dot(x);

    let hat_action = (sx * y - x.cross(y)).abs().max();
    let antisymmetry = (sx.transpose() + sx).abs().max();
    let square = (sx * sx - (-xx * Mat3::identity() + outer(x, x))).abs().max();
    let cube = (sx * sx * sx + xx * sx).abs().max();

    let t1 = x.dot(&(sy * z));
    let t2 = y.dot(&(hat(z) * x));
    let t3 = z.dot(&(sx * y));
    let triple_product = (t1 - t2).abs().max((t2 - t3).abs());

    let double_cross = (sx * (sy * z) - (x.dot(z) * y - x.dot(y) * z)).abs().max();

    let lhs = hat(&x.cross(y));
    let commutator = (lhs - (sx * sy - sy * sx)).abs().max();
    let outer_diff = (lhs - (outer(y, x) - outer(x, y))).abs().max();
    let hat_of_cross = commutator.max(outer_diff);

    IdentityResiduals {
        hat_action,
        antisymmetry,
        square,
        cube,
        triple_product,
        double_cross,
        hat_of_cross,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn e(i: usize) -> Vec3 {
        let mut v = Vec3::zeros();
        v[i] = 1.0;
        v
    }

    #[test]
    fn hat_of_basis_vector() {
        let m = hat(&e(0));
        let expected = Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert_eq!(m, expected);
    }

    #[test]
    fn hat_acts_as_cross_product_on_basis() {
        assert_eq!(hat(&e(0)) * e(1), e(2));
        assert_eq!(hat(&e(1)) * e(2), e(0));
        assert_eq!(hat(&e(2)) * e(0), e(1));
        assert_eq!(cross(&e(0), &e(1)), e(2));
    }

    #[test]
    fn vee_round_trips_exactly() {
        let x = Vec3::new(0.1, -2.5, 3.75);
        let v = vee(&hat(&x)).unwrap();
        assert_eq!(v, x); // bitwise: components are copied, not recomputed
    }

    #[test]
    fn vee_rejects_asymmetric_matrix() {
        let mut m = hat(&Vec3::new(1.0, 2.0, 3.0));
        m[(0, 1)] += 1e-6;
        match vee(&m) {
            Err(DynamicsError::NotSkewSymmetric { asymmetry, .. }) => {
                assert_relative_eq!(asymmetry, 1e-6, max_relative = 1e-9);
            }
            other => panic!("expected NotSkewSymmetric, got {other:?}"),
        }
        // At the tolerance boundary the perturbation passes.
        let mut m = hat(&Vec3::new(1.0, 2.0, 3.0));
        m[(0, 1)] += 0.4e-12;
        assert!(vee(&m).is_ok());
    }

    #[test]
    fn outer_product_entries() {
        let m = outer(&Vec3::new(1.0, 2.0, 3.0), &Vec3::new(4.0, 5.0, 6.0));
        assert_eq!(m[(0, 0)], 4.0);
        assert_eq!(m[(1, 2)], 12.0);
        assert_eq!(m[(2, 0)], 12.0);
    }

    #[test]
    fn residuals_vanish_on_exact_inputs() {
        let r = identity_residuals(
            &Vec3::new(1.0, -2.0, 0.5),
            &Vec3::new(0.25, 4.0, -1.0),
            &Vec3::new(-3.0, 0.125, 2.0),
        );
        assert!(r.max() < 1e-13, "max residual {}", r.max());
    }

    proptest! {
        #[test]
        fn identities_hold_for_random_triples(
            xs in prop::array::uniform3(-10.0f64..10.0),
            ys in prop::array::uniform3(-10.0f64..10.0),
            zs in prop::array::uniform3(-10.0f64..10.0),
        ) {
            let x = Vec3::from(xs);
            let y = Vec3::from(ys);
            let z = Vec3::from(zs);
            let r = identity_residuals(&x, &y, &z);
            prop_assert!(r.max() <= tol::KERNEL_IDENTITY, "residual {}", r.max());
        }
    }
}

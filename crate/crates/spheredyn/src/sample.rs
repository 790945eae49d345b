//! Deterministic random sampling of points, tangent vectors and states.
//!
//! Used by the self-check command and the test suites; everything is
//! generic over the RNG so callers control seeding and reproducibility.

use rand::Rng;

use crate::so3::Vec3;
use crate::sphere::{project_tangent, Representation, SystemState};

/// Uniformly distributed unit vector, by rejection from the cube.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

/// Tangent vector at `q` with components of magnitude up to `scale`.
pub fn tangent_vector<R: Rng + ?Sized>(rng: &mut R, q: &Vec3, scale: f64) -> Vec3 {
    let v = Vec3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    );
    project_tangent(q, &v)
}

/// Vector with independent components in `[-scale, scale]`.
pub fn box_vector<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Vec3 {
    Vec3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Valid random state of `n` bodies with companion magnitude `scale`.
pub fn state<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    rep: Representation,
    scale: f64,
    time: f64,
) -> SystemState {
    let q: Vec<Vec3> = (0..n).map(|_| unit_vector(rng)).collect();
    let w = q.iter().map(|qi| tangent_vector(rng, qi, scale)).collect();
    SystemState::new_unchecked(q, w, rep, time)
}

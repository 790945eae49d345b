//! Minimal library usage: integrate a double pendulum and report drift.

use spheredyn::integrator::{integrate, IntegratorSpec, Method, Repair};
use spheredyn::model::ZeroForces;
use spheredyn::pendulum::ChainPendulum;
use spheredyn::sphere::{Representation, SystemState};
use spheredyn::{DynamicsError, Vec3};

fn main() -> Result<(), DynamicsError> {
    let chain = ChainPendulum::new(vec![1.0, 1.0], vec![1.0, 1.0], 9.81)?;
    let initial = SystemState::new(
        vec![Vec3::new(0.6, 0.0, -0.8), Vec3::new(0.0, 0.0, -1.0)],
        vec![Vec3::new(0.0, 1.0, 0.0), Vec3::zeros()],
        Representation::Omega,
        0.0,
    )?;
    let spec = IntegratorSpec::new(Method::Rk4, 1e-3, 5.0, Repair::Project)?;
    let trajectory = integrate(&chain, &ZeroForces, &spec, &initial)?;
    println!("energy drift {:.3e}", trajectory.summary().max_energy_drift);
    Ok(())
}

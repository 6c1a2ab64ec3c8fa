//! A gauge-transformed free packet checked against the nonlinear equation,
//! at two resolutions.

use ngt::grid::{make_grid, Boundary};
use ngt::residual::{residual, GammaSchedule};
use ngt::schrodinger::{evolve, gaussian_packet, EvolutionConfig, PhysicalConstants, Potential};

fn main() {
    let c = PhysicalConstants::default();
    let schedule = GammaSchedule::new(1.0, 0.3).unwrap();
    let mut previous: Option<f64> = None;
    for (n, dt, steps) in [(256, 4e-4, 500), (511, 2e-4, 1000), (1021, 1e-4, 2000)] {
        let grid = make_grid(n, -12.0, 12.0, Boundary::Dirichlet).unwrap();
        let psi = gaussian_packet(&grid, 0.0, 1.5, 1.0).unwrap();
        let traj = evolve(&psi, &Potential::Free, &EvolutionConfig::new(dt, steps, c).unwrap()).unwrap();
        let report = residual(&traj, &Potential::Free, &schedule, &c).unwrap();
        let max = report.summary.max_relative_residual;
        match previous {
            Some(p) => println!("n = {n:4}: max relative residual {max:.3e}, ratio {:.3}", p / max),
            None => println!("n = {n:4}: max relative residual {max:.3e}"),
        }
        previous = Some(max);
    }
}

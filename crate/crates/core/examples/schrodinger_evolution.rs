//! Crank-Nicolson evolution of Gaussian packets, with the usual sanity
//! observables, and a trajectory written to disk.

use ngt::grid::{make_grid, Boundary};
use ngt::io::write_trajectory;
use ngt::schrodinger::{
    evolve, gaussian_packet, mean_position, norm_drift, phase_rate, position_variance, EvolutionConfig,
    PhysicalConstants, Potential,
};

fn main() {
    let c = PhysicalConstants::default();
    let grid = make_grid(512, -10.0, 10.0, Boundary::Dirichlet).unwrap();
    let cfg = EvolutionConfig::new(1e-3, 1000, c).unwrap();

    let ground = gaussian_packet(&grid, 0.0, 1.0, 0.0).unwrap();
    let pot = Potential::Harmonic { omega: 1.0 };
    let traj = evolve(&ground, &pot, &cfg).unwrap();
    println!("harmonic ground state: phase rate {:.6} (expect -0.5)", phase_rate(&traj, &ground).unwrap());

    let packet = gaussian_packet(&grid, -2.0, 1.0, 1.5).unwrap();
    let traj = evolve(&packet, &Potential::Free, &cfg).unwrap();
    let last = &traj.states()[traj.len() - 1];
    println!(
        "free packet at t = 1: <x> = {:.4} (expect -0.5), width {:.5} (expect {:.5}), norm drift {:.1e}",
        mean_position(last),
        position_variance(last).sqrt(),
        (0.5f64 * 2.0).sqrt(),
        norm_drift(&traj)
    );

    let dir = std::env::temp_dir().join("ngt_trajectory_example");
    let short = evolve(&packet, &Potential::Free, &EvolutionConfig::new(1e-2, 5, c).unwrap()).unwrap();
    let manifest = write_trajectory(&dir, &short, &Potential::Free, &c).unwrap();
    println!("wrote {} states to {}", manifest.files.len(), dir.display());
}

//! The gauge map on density matrices: the diagonal stays put for any complex
//! gamma, Hermiticity only for real gamma.

use ngt::density::{apply_density, diagonal_deviation, hermiticity_deviation, projector_from, ComplexGaugeParams};
use ngt::grid::{make_grid, Boundary, DEFAULT_FLOOR_REL};
use ngt::schrodinger::gaussian_packet;
use ngt::Complex64;

fn main() {
    let grid = make_grid(128, -8.0, 8.0, Boundary::Dirichlet).unwrap();
    let psi = gaussian_packet(&grid, 1.0, 1.0, 0.7).unwrap();
    let rho = projector_from(&psi);

    for gamma in [Complex64::new(0.8, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-0.4, 0.6)] {
        let p = ComplexGaugeParams::new(1.7, gamma).unwrap();
        let out = apply_density(&p, &rho, DEFAULT_FLOOR_REL).unwrap();
        println!(
            "gamma = {gamma}: diagonal deviation {:.1e}, hermiticity deviation {:.3e}, masked entries {}",
            diagonal_deviation(&rho, &out).unwrap(),
            hermiticity_deviation(&out),
            out.masked().len()
        );
    }
}

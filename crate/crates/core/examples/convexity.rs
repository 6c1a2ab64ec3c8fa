//! A gauge-transformed mixture against the mixture of gauge-transformed
//! states: equal on the diagonal, different off it.

use ngt::density::{convexity_report, projector_from, ComplexGaugeParams};
use ngt::grid::{make_grid, Boundary, DEFAULT_FLOOR_REL};
use ngt::schrodinger::gaussian_packet;

fn main() {
    let grid = make_grid(128, -8.0, 8.0, Boundary::Dirichlet).unwrap();
    let left = projector_from(&gaussian_packet(&grid, -1.5, 1.0, 0.5).unwrap());
    let right = projector_from(&gaussian_packet(&grid, 1.5, 1.0, -0.5).unwrap());
    for gamma in [0.0, 0.5, 1.0, 2.0] {
        let p = ComplexGaugeParams::real(1.0, gamma).unwrap();
        let r = convexity_report(&left, &right, 0.5, 0.5, &p, DEFAULT_FLOOR_REL).unwrap();
        println!("gamma {gamma}: diag gap {:.1e}, off-diagonal gap {:.3e}", r.diag_gap, r.offdiag_gap);
    }
}

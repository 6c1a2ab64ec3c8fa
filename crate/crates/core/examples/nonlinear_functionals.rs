//! R1, R2, R4 and R5 on exp(-x^2/2 + i k x) against their closed forms.

use ngt::grid::{make_grid, Boundary, ComplexField, DEFAULT_FLOOR_REL};
use ngt::residual::{r1, r2, r4, r5};
use ngt::schrodinger::{current_density, probability_density, PhysicalConstants};
use ngt::Complex64;

fn main() {
    let c = PhysicalConstants::default();
    let k = 0.8;
    for n in [256, 511, 1021] {
        let grid = make_grid(n, -10.0, 10.0, Boundary::Dirichlet).unwrap();
        let psi = ComplexField::from_fn(grid, |x| Complex64::from_polar((-0.5 * x * x).exp(), k * x)).unwrap();
        let rho = probability_density(&psi);
        let j = current_density(&psi, &c);
        let fields = [
            ("R1", r1(&rho, &j, &c, DEFAULT_FLOOR_REL).unwrap(), Box::new(move |x: f64| -2.0 * k * x) as Box<dyn Fn(f64) -> f64>),
            ("R2", r2(&rho, DEFAULT_FLOOR_REL).unwrap(), Box::new(|x: f64| 4.0 * x * x - 2.0)),
            ("R4", r4(&rho, &j, &c, DEFAULT_FLOOR_REL).unwrap(), Box::new(move |x: f64| -2.0 * k * x)),
            ("R5", r5(&rho, DEFAULT_FLOOR_REL).unwrap(), Box::new(|x: f64| 4.0 * x * x)),
        ];
        print!("n = {n:4}:");
        for (name, f, exact) in &fields {
            let err = (1..n - 1)
                .filter(|&i| grid.x(i).abs() <= 1.0)
                .map(|i| (f.values()[i] - exact(grid.x(i))).abs())
                .fold(0.0, f64::max);
            print!("  {name} {err:.2e}");
        }
        println!("   (max error on |x| <= 1)");
    }
}

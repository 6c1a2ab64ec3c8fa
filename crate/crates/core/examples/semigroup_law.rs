//! Sequential versus composed application on a field, in the principal and
//! integer classes, and what goes wrong once the inner phase wraps.

use ngt::gauge::{apply_field, compose, GaugeParams};
use ngt::grid::{make_grid, Boundary, ComplexField, DEFAULT_FLOOR_REL};
use ngt::Complex64;

fn max_gap(inner: &GaugeParams, outer: &GaugeParams, psi: &ComplexField) -> f64 {
    let seq = apply_field(outer, &apply_field(inner, psi, DEFAULT_FLOOR_REL).unwrap(), DEFAULT_FLOOR_REL).unwrap();
    let direct = apply_field(&compose(outer, inner).unwrap(), psi, DEFAULT_FLOOR_REL).unwrap();
    seq.values()
        .iter()
        .zip(direct.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

fn main() {
    let grid = make_grid(256, -5.0, 5.0, Boundary::Dirichlet).unwrap();
    let gentle = ComplexField::from_fn(grid, |x| Complex64::from_polar((0.3 * x).cos().exp(), 1.1 * (0.7 * x).sin())).unwrap();
    let wild = ComplexField::from_fn(grid, |x| Complex64::from_polar(1.0, 3.0 * (0.7 * x).sin())).unwrap();

    let p = GaugeParams::principal(0.8, 0.4).unwrap();
    let q = GaugeParams::principal(-0.6, 0.2).unwrap();
    println!("principal, wrap-free field:  {:.2e}", max_gap(&p, &q, &gentle));

    let p = GaugeParams::principal(1.0, 2.5).unwrap();
    let q = GaugeParams::principal(0.5, 0.0).unwrap();
    let wraps = gentle.values().iter().filter(|&&z| !p.keeps_phase_principal(z)).count();
    println!("principal, gamma 2.5 ({wraps} wrapped nodes): {:.2e}", max_gap(&p, &q, &gentle));

    let p = GaugeParams::integer(3, 0.7).unwrap();
    let q = GaugeParams::integer(-2, -0.4).unwrap();
    println!("integer, any field:          {:.2e}", max_gap(&p, &q, &wild));
}

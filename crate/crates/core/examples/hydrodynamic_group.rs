//! The affine group on (ln|psi|, unwrapped phase): composition, inverses,
//! conjugation, and agreement with the branch-tracked map.

use ngt::gauge::{apply_branched, apply_hydro, branched_from_hydro, compose, inverse, GaugeParams};
use ngt::grid::{decompose, make_grid, reconstruct, Boundary, ComplexField, DEFAULT_FLOOR_REL};
use ngt::Complex64;

fn main() {
    let grid = make_grid(200, -6.0, 6.0, Boundary::Dirichlet).unwrap();
    // Phase runs over several sheets.
    let psi = ComplexField::from_fn(grid, |x| Complex64::from_polar((-0.05 * x * x).exp(), 2.5 * x)).unwrap();
    let h = decompose(&psi, DEFAULT_FLOOR_REL).unwrap();

    let p = GaugeParams::unrestricted(1.5, 0.3).unwrap();
    let q = GaugeParams::unrestricted(-2.25, 1.0).unwrap();
    let seq = apply_hydro(&q, &apply_hydro(&p, &h).unwrap()).unwrap();
    let direct = apply_hydro(&compose(&q, &p).unwrap(), &h).unwrap();
    let gap = seq
        .phase()
        .values()
        .iter()
        .zip(direct.phase().values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("composition gap:      {gap:.2e}");

    let back = apply_hydro(&inverse(&p).unwrap(), &apply_hydro(&p, &h).unwrap()).unwrap();
    let gap = back
        .phase()
        .values()
        .iter()
        .zip(h.phase().values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("inverse round trip:   {gap:.2e}");

    let conj = reconstruct(&apply_hydro(&GaugeParams::unrestricted(-1.0, 0.0).unwrap(), &h).unwrap());
    println!("N(-1,0) is conjugation: {}", conj == reconstruct(&h).conj());

    let mapped = apply_hydro(&p, &h).unwrap();
    let gap = branched_from_hydro(&h)
        .iter()
        .zip(mapped.phase().values())
        .map(|(v, b)| (apply_branched(&p, v).unwrap().total_phase() - b).abs())
        .fold(0.0, f64::max);
    println!("branched vs hydro:    {gap:.2e}");
}

//! Nonlinear functionals of `(rho, j)` and the residual of the Doebner-Goldin
//! equation obeyed by `psi' = N_{1,gamma(t)}[psi]` when `psi` solves the
//! linear Schrodinger equation:
//!
//! ```text
//! i hbar d_t psi' = (-(hbar^2/2m) lap + V) psi'
//!                 + (hbar^2 gamma / 4m) (i R2 + 2 R1 - 2 R4) psi'
//!                 - (hbar^2 gamma^2 / 8m) (2 R2 - R5) psi'
//!                 - (hbar / 2) gamma_dot ln(rho) psi'
//! ```
//!
//! with `R1 = (m/hbar) div(j)/rho`, `R2 = lap(rho)/rho`,
//! `R4 = (m/hbar) j grad(rho)/rho^2` and `R5 = |grad rho|^2/rho^2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{apply_field, GaugeParams};
use crate::grid::{check_floor, gradient, laplacian, ComplexField, Field, RealField, DEFAULT_FLOOR_REL};
use crate::schrodinger::{current_density, hamiltonian_apply, probability_density, PhysicalConstants, Potential, Trajectory};

/// Nodes next to each end excluded from residual norms.
pub const BOUNDARY_EXCLUSION: usize = 3;

/// A real field with nodes where it could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedField {
    pub field: RealField,
    /// `true` where the density fell below the floor; the value there is 0.
    pub mask: Vec<bool>,
}

impl MaskedField {
    pub fn values(&self) -> &[f64] {
        self.field.values()
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

fn density_mask(rho: &RealField, floor_rel: f64) -> Result<Vec<bool>> {
    if !(floor_rel > 0.0 && floor_rel < 1.0) {
        return Err(Error::InvalidFloor(floor_rel));
    }
    let max = rho.values().iter().cloned().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::AllZeroField);
    }
    let floor = floor_rel * max;
    Ok(rho.values().iter().map(|&r| !(r > floor)).collect())
}

fn masked_pointwise(rho: &RealField, floor_rel: f64, f: impl Fn(usize, f64) -> f64) -> Result<MaskedField> {
    let mask = density_mask(rho, floor_rel)?;
    let values = rho
        .values()
        .iter()
        .enumerate()
        .map(|(i, &r)| if mask[i] { 0.0 } else { f(i, r) })
        .collect();
    Ok(MaskedField {
        field: Field::from_parts_unchecked(*rho.grid(), values),
        mask,
    })
}

/// `R1 = (m/hbar) grad(j) / rho`. Nodes with `rho <= floor_rel * max rho` are masked.
pub fn r1(rho: &RealField, j: &RealField, constants: &PhysicalConstants, floor_rel: f64) -> Result<MaskedField> {
    if rho.grid() != j.grid() {
        return Err(Error::GridMismatch);
    }
    let div = gradient(j);
    let s = constants.mass / constants.hbar;
    masked_pointwise(rho, floor_rel, |i, r| s * div.values()[i] / r)
}

/// `R2 = lap(rho) / rho`.
pub fn r2(rho: &RealField, floor_rel: f64) -> Result<MaskedField> {
    let lap = laplacian(rho);
    masked_pointwise(rho, floor_rel, |i, r| lap.values()[i] / r)
}

/// `R4 = (m/hbar) j grad(rho) / rho^2`.
pub fn r4(rho: &RealField, j: &RealField, constants: &PhysicalConstants, floor_rel: f64) -> Result<MaskedField> {
    if rho.grid() != j.grid() {
        return Err(Error::GridMismatch);
    }
    let grad = gradient(rho);
    let s = constants.mass / constants.hbar;
    masked_pointwise(rho, floor_rel, |i, r| s * j.values()[i] * grad.values()[i] / (r * r))
}

/// `R5 = grad(rho)^2 / rho^2`.
pub fn r5(rho: &RealField, floor_rel: f64) -> Result<MaskedField> {
    let grad = gradient(rho);
    masked_pointwise(rho, floor_rel, |i, r| {
        let q = grad.values()[i] / r;
        q * q
    })
}

/// Right-hand side of the nonlinear equation at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsEval {
    pub field: ComplexField,
    /// Nodes where `|psi'| < floor_rel * max|psi'|`; only the linear part is
    /// evaluated there.
    pub mask: Vec<bool>,
}

/// Evaluates the full right-hand side for `psi'` with gauge parameter `gamma`
/// and rate `gamma_dot`. `floor_rel` is relative to `max|psi'|`.
pub fn dg_rhs(
    psi: &ComplexField,
    potential: &Potential,
    gamma: f64,
    gamma_dot: f64,
    constants: &PhysicalConstants,
    floor_rel: f64,
) -> Result<RhsEval> {
    check_floor(floor_rel)?;
    let rho_floor = floor_rel * floor_rel;
    let rho = probability_density(psi);
    let j = current_density(psi, constants);
    let f1 = r1(&rho, &j, constants, rho_floor)?;
    let f2 = r2(&rho, rho_floor)?;
    let f4 = r4(&rho, &j, constants, rho_floor)?;
    let f5 = r5(&rho, rho_floor)?;
    let linear = hamiltonian_apply(psi, potential, constants)?;

    let PhysicalConstants { hbar, mass } = *constants;
    let c1 = hbar * hbar * gamma / (4.0 * mass);
    let c2 = hbar * hbar * gamma * gamma / (8.0 * mass);
    let c_log = 0.5 * hbar * gamma_dot;

    let mask = f2.mask.clone();
    let values = (0..psi.len())
        .map(|i| {
            let z = psi.values()[i];
            let lin = linear.values()[i];
            if mask[i] {
                return lin;
            }
            let (a1, a2, a4, a5) = (f1.values()[i], f2.values()[i], f4.values()[i], f5.values()[i]);
            let first = Complex64::new(2.0 * a1 - 2.0 * a4, a2) * c1;
            let second = c2 * (2.0 * a2 - a5);
            let log_term = c_log * rho.values()[i].ln();
            lin + z * (first - second - log_term)
        })
        .collect();
    Ok(RhsEval {
        field: Field::from_parts_unchecked(*psi.grid(), values),
        mask,
    })
}

/// `gamma(t) = gamma0 + gamma_rate t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaSchedule {
    pub gamma0: f64,
    pub gamma_rate: f64,
}

impl GammaSchedule {
    pub fn new(gamma0: f64, gamma_rate: f64) -> Result<Self> {
        if !(gamma0.is_finite() && gamma_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 = {gamma0}, gamma_rate = {gamma_rate}"
            )));
        }
        Ok(Self { gamma0, gamma_rate })
    }

    pub fn constant(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0)
    }

    pub fn at(&self, t: f64) -> f64 {
        self.gamma0 + self.gamma_rate * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max_relative_residual: f64,
    pub refinement_ratio: Option<f64>,
}

/// Residual norms at every interior time of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub times: Vec<f64>,
    pub residual_l2: Vec<f64>,
    /// Norm of the finite-difference estimate of `i hbar d_t psi'`.
    pub field_l2: Vec<f64>,
    /// Below-floor nodes excluded at each time.
    pub masked_nodes: Vec<usize>,
    /// Nodes excluded at each end of the grid.
    pub boundary_excluded: usize,
    pub summary: ResidualSummary,
}

impl ResidualReport {
    pub fn relative(&self) -> Vec<f64> {
        self.residual_l2
            .iter()
            .zip(&self.field_l2)
            .map(|(r, f)| r / f)
            .collect()
    }

    /// Records `self.max / fine.max` as the refinement ratio.
    pub fn with_refinement(mut self, fine: &ResidualReport) -> Self {
        self.summary.refinement_ratio = Some(refinement_ratio(&self, fine));
        self
    }
}

pub fn refinement_ratio(coarse: &ResidualReport, fine: &ResidualReport) -> f64 {
    coarse.summary.max_relative_residual / fine.summary.max_relative_residual
}

/// Gauge-transforms every state of a linear trajectory with
/// `N_{1, gamma(t_k)}`.
pub fn gauge_trajectory(traj: &Trajectory, schedule: &GammaSchedule, floor_rel: f64) -> Result<Trajectory> {
    let states = traj
        .states()
        .par_iter()
        .zip(traj.times().par_iter())
        .map(|(s, &t)| apply_field(&GaugeParams::principal(1.0, schedule.at(t))?, s, floor_rel))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::new(traj.dt(), states)
}

/// Residual of the nonlinear equation along a linear trajectory, after
/// transforming it with `N_{1, gamma(t)}`.
pub fn residual(
    traj_linear: &Trajectory,
    potential: &Potential,
    schedule: &GammaSchedule,
    constants: &PhysicalConstants,
) -> Result<ResidualReport> {
    if traj_linear.len() < 3 {
        return Err(Error::TrajectoryTooShort(traj_linear.len()));
    }
    let transformed = gauge_trajectory(traj_linear, schedule, DEFAULT_FLOOR_REL)?;
    residual_of_transformed(&transformed, potential, schedule, constants, DEFAULT_FLOOR_REL)
}

/// Residual of the nonlinear equation for an already transformed trajectory
/// `psi'_k`. The time derivative is the central difference
/// `i hbar (psi'_{k+1} - psi'_{k-1}) / 2dt`, so the first and last states are
/// not evaluated.
pub fn residual_of_transformed(
    transformed: &Trajectory,
    potential: &Potential,
    schedule: &GammaSchedule,
    constants: &PhysicalConstants,
    floor_rel: f64,
) -> Result<ResidualReport> {
    let len = transformed.len();
    if len < 3 {
        return Err(Error::TrajectoryTooShort(len));
    }
    let states = transformed.states();
    let n = states[0].len();
    if n <= 2 * BOUNDARY_EXCLUSION {
        return Err(Error::InvalidParameter(format!("grid of {n} points is too small")));
    }
    let dx = states[0].grid().dx();
    let dt = transformed.dt();
    let factor = Complex64::new(0.0, constants.hbar / (2.0 * dt));

    let per_time = (1..len - 1)
        .into_par_iter()
        .map(|k| {
            let t = transformed.times()[k];
            let rhs = dg_rhs(&states[k], potential, schedule.at(t), schedule.gamma_rate, constants, floor_rel)?;
            let (mut res, mut est_sq, mut masked) = (0.0, 0.0, 0usize);
            for i in BOUNDARY_EXCLUSION..n - BOUNDARY_EXCLUSION {
                if rhs.mask[i] {
                    masked += 1;
                    continue;
                }
                let est = factor * (states[k + 1].values()[i] - states[k - 1].values()[i]);
                res += (est - rhs.field.values()[i]).norm_sqr();
                est_sq += est.norm_sqr();
            }
            Ok((t, (dx * res).sqrt(), (dx * est_sq).sqrt(), masked))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ResidualReport {
        times: Vec::with_capacity(per_time.len()),
        residual_l2: Vec::with_capacity(per_time.len()),
        field_l2: Vec::with_capacity(per_time.len()),
        masked_nodes: Vec::with_capacity(per_time.len()),
        boundary_excluded: BOUNDARY_EXCLUSION,
        summary: ResidualSummary {
            max_relative_residual: 0.0,
            refinement_ratio: None,
        },
    };
    for (t, r, f, m) in per_time {
        report.times.push(t);
        report.residual_l2.push(r);
        report.field_l2.push(f);
        report.masked_nodes.push(m);
    }
    report.summary.max_relative_residual = report.relative().into_iter().fold(0.0, f64::max);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Boundary, GridSpec};
    use crate::schrodinger::{evolve, gaussian_packet, EvolutionConfig};

    fn grid(n: usize) -> GridSpec {
        make_grid(n, -10.0, 10.0, Boundary::Dirichlet).unwrap()
    }

    fn window_err(f: &MaskedField, exact: impl Fn(f64) -> f64, half_width: f64) -> f64 {
        let g = f.field.grid();
        (1..g.n_points() - 1)
            .filter(|&i| g.x(i).abs() <= half_width && !f.mask[i])
            .map(|i| (f.values()[i] - exact(g.x(i))).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn functionals_vanish_for_real_and_plane_waves() {
        let c = PhysicalConstants::default();
        let g = grid(256);
        let real = ComplexField::from_fn(g, |x| Complex64::new((-x * x / 2.0).exp(), 0.0)).unwrap();
        let rho = probability_density(&real);
        let j = current_density(&real, &c);
        assert!(r1(&rho, &j, &c, 1e-24).unwrap().field.max_abs() < 1e-13);
        assert!(r4(&rho, &j, &c, 1e-24).unwrap().field.max_abs() < 1e-13);

        let pg = make_grid(64, 0.0, 2.0 * std::f64::consts::PI, Boundary::Periodic).unwrap();
        let pw = ComplexField::from_fn(pg, |x| Complex64::cis(3.0 * x)).unwrap();
        let rho = probability_density(&pw);
        let j = current_density(&pw, &c);
        assert!(r1(&rho, &j, &c, 1e-24).unwrap().field.max_abs() < 1e-12);
        assert!(r4(&rho, &j, &c, 1e-24).unwrap().field.max_abs() < 1e-12);
        assert!(r2(&rho, 1e-24).unwrap().field.max_abs() < 1e-12);
        assert!(r5(&rho, 1e-24).unwrap().field.max_abs() < 1e-12);
    }

    #[test]
    fn functionals_are_scale_invariant() {
        let c = PhysicalConstants::new(1.3, 0.7).unwrap();
        let g = grid(200);
        let psi = gaussian_packet(&g, 0.3, 1.2, 1.7).unwrap();
        let rho = probability_density(&psi);
        let j = current_density(&psi, &c);
        for s in [1e-3, 0.37, 12.0, 4e4] {
            let rs = rho.scale(s);
            let js = j.scale(s);
            let pairs = [
                (r1(&rho, &j, &c, 1e-20).unwrap(), r1(&rs, &js, &c, 1e-20).unwrap()),
                (r2(&rho, 1e-20).unwrap(), r2(&rs, 1e-20).unwrap()),
                (r4(&rho, &j, &c, 1e-20).unwrap(), r4(&rs, &js, &c, 1e-20).unwrap()),
                (r5(&rho, 1e-20).unwrap(), r5(&rs, 1e-20).unwrap()),
            ];
            for (a, b) in pairs {
                assert_eq!(a.mask, b.mask);
                for (x, y) in a.values().iter().zip(b.values()) {
                    assert!((x - y).abs() <= 1e-13 * x.abs().max(1.0), "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn gaussian_functionals_match_closed_forms() {
        let c = PhysicalConstants::default();
        let k = 1.5;
        let errs = |n: usize| {
            let g = grid(n);
            let psi = ComplexField::from_fn(g, |x| Complex64::from_polar((-x * x / 2.0).exp(), k * x)).unwrap();
            let rho = probability_density(&psi);
            let j = current_density(&psi, &c);
            (
                window_err(&r2(&rho, 1e-24).unwrap(), |x| 4.0 * x * x - 2.0, 1.0),
                window_err(&r5(&rho, 1e-24).unwrap(), |x| 4.0 * x * x, 1.0),
                window_err(&r4(&rho, &j, &c, 1e-24).unwrap(), |x| -2.0 * k * x, 1.0),
            )
        };
        let (a2, a5, a4) = errs(512);
        let (b2, b5, b4) = errs(1023);
        assert!(a2 < 5e-3 && a5 < 5e-3 && a4 < 5e-3, "{a2} {a5} {a4}");
        for r in [a2 / b2, a5 / b5, a4 / b4] {
            assert!((3.0..=5.0).contains(&r), "ratio {r}");
        }
    }

    #[test]
    fn constant_density_gives_zero() {
        let g = grid(32);
        let rho = RealField::from_fn(g, |_| 2.5).unwrap();
        assert!(r2(&rho, 1e-24).unwrap().field.max_abs() < 1e-12);
        assert_eq!(r5(&rho, 1e-24).unwrap().field.max_abs(), 0.0);
        assert_eq!(r2(&RealField::zeros(g), 1e-24), Err(Error::AllZeroField));
    }

    #[test]
    fn rhs_reduces_to_hamiltonian_without_gauge() {
        let c = PhysicalConstants::new(0.9, 1.4).unwrap();
        let pot = Potential::Harmonic { omega: 0.8 };
        let psi = gaussian_packet(&grid(256), 1.0, 1.0, 0.5).unwrap();
        let rhs = dg_rhs(&psi, &pot, 0.0, 0.0, &c, 1e-12).unwrap();
        let h = hamiltonian_apply(&psi, &pot, &c).unwrap();
        let scale = h.values().iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for (a, b) in rhs.field.values().iter().zip(h.values()) {
            assert!((a - b).norm() <= 1e-13 * scale);
        }
    }

    #[test]
    fn rhs_homogeneity_and_log_defect() {
        let c = PhysicalConstants::default();
        let pot = Potential::Free;
        let g = make_grid(256, -6.0, 6.0, Boundary::Dirichlet).unwrap();
        let psi = gaussian_packet(&g, 0.2, 1.1, 0.8).unwrap();
        let s = Complex64::new(-1.7, 2.3);
        let scaled = psi.scale_complex(s);

        let a = dg_rhs(&scaled, &pot, 0.7, 0.0, &c, 1e-12).unwrap();
        let b = dg_rhs(&psi, &pot, 0.7, 0.0, &c, 1e-12).unwrap().field.scale_complex(s);
        let norm = b.values().iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for (x, y) in a.field.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= 1e-12 * norm);
        }

        let gd = 0.3;
        let a = dg_rhs(&scaled, &pot, 0.7, gd, &c, 1e-12).unwrap();
        let b = dg_rhs(&psi, &pot, 0.7, gd, &c, 1e-12).unwrap().field.scale_complex(s);
        let shift = -0.5 * gd * s.norm_sqr().ln();
        for ((x, y), z) in a.field.values().iter().zip(b.values()).zip(scaled.values()) {
            let defect = x - y;
            assert!((defect - z * shift).norm() <= 1e-12 * norm);
        }
    }

    #[test]
    fn short_trajectory_is_rejected() {
        let g = grid(64);
        let psi = gaussian_packet(&g, 0.0, 1.0, 0.0).unwrap();
        let cfg = EvolutionConfig::new(1e-3, 1, PhysicalConstants::default()).unwrap();
        let traj = evolve(&psi, &Potential::Free, &cfg).unwrap();
        assert_eq!(
            residual(&traj, &Potential::Free, &GammaSchedule::constant(1.0).unwrap(), &PhysicalConstants::default()),
            Err(Error::TrajectoryTooShort(2))
        );
    }

    #[test]
    fn identity_gauge_residual_is_the_cn_defect() {
        // CN gives i(psi_{k+1} - psi_{k-1})/2dt = H(psi_{k+1} + 2 psi_k + psi_{k-1})/4,
        // so the residual is H(psi_{k+1} - 2 psi_k + psi_{k-1})/4 = O(dt^2).
        let c = PhysicalConstants::default();
        let run = |n: usize, dt: f64, steps: usize| {
            let g = grid(n);
            let psi = gaussian_packet(&g, 0.0, 1.0, 1.0).unwrap();
            let cfg = EvolutionConfig::new(dt, steps, c).unwrap();
            let traj = evolve(&psi, &Potential::Free, &cfg).unwrap();
            residual(&traj, &Potential::Free, &GammaSchedule::constant(0.0).unwrap(), &c).unwrap()
        };
        let coarse = run(256, 2e-3, 50);
        let fine = run(511, 1e-3, 100);
        let r = refinement_ratio(&coarse, &fine);
        assert!(coarse.summary.max_relative_residual < 1e-3);
        assert!((3.0..=5.0).contains(&r), "ratio {r}");
    }

    #[test]
    fn composition_of_gauges_gives_same_residual() {
        let c = PhysicalConstants::default();
        let g = grid(256);
        let psi = gaussian_packet(&g, 0.5, 1.0, 1.0).unwrap();
        let cfg = EvolutionConfig::new(1e-3, 40, c).unwrap();
        let traj = evolve(&psi, &Potential::Free, &cfg).unwrap();
        let (g1, g2) = (0.4, 0.7);
        let both = GammaSchedule::constant(g1 + g2).unwrap();
        let direct = residual(&traj, &Potential::Free, &both, &c).unwrap();

        let first = gauge_trajectory(&traj, &GammaSchedule::constant(g1).unwrap(), 1e-12).unwrap();
        let second = gauge_trajectory(&first, &GammaSchedule::constant(g2).unwrap(), 1e-12).unwrap();
        let seq = residual_of_transformed(&second, &Potential::Free, &both, &c, 1e-12).unwrap();
        for k in 0..direct.times.len() {
            let d = (direct.residual_l2[k] - seq.residual_l2[k]).abs();
            assert!(d <= 1e-12 * direct.field_l2[k], "step {k}: {d}");
        }
    }
}

//! Linear 1D Schrodinger evolution by Crank-Nicolson, and the observables
//! `rho = |psi|^2` and `j = (hbar/m) Im(conj(psi) grad psi)`.
//!
//! The scheme solves `(I + i dt H / 2hbar) psi_new = (I - i dt H / 2hbar) psi`
//! on the interior nodes of a dirichlet grid, with `psi = 0` held on the two
//! end nodes. The interior Hamiltonian is real symmetric, so each step is a
//! Cayley transform and preserves the discrete norm to round-off.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{gradient, laplacian, l2_norm, principal_arg, Boundary, ComplexField, Field, GridSpec, RealField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite() && mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "hbar = {hbar}, mass = {mass} must be positive"
            )));
        }
        Ok(Self { hbar, mass })
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Potential {
    Free,
    /// `V = m omega^2 x^2 / 2`.
    Harmonic { omega: f64 },
    Tabulated { values: Vec<f64> },
}

impl Potential {
    pub fn tabulated(values: &RealField) -> Self {
        Potential::Tabulated {
            values: values.values().to_vec(),
        }
    }

    /// Potential sampled on `grid`.
    pub fn sample(&self, grid: &GridSpec, constants: &PhysicalConstants) -> Result<Vec<f64>> {
        match self {
            Potential::Free => Ok(vec![0.0; grid.n_points()]),
            Potential::Harmonic { omega } => {
                if !(*omega > 0.0 && omega.is_finite()) {
                    return Err(Error::InvalidParameter(format!("omega = {omega}")));
                }
                let k = 0.5 * constants.mass * omega * omega;
                Ok(grid.coordinates().iter().map(|x| k * x * x).collect())
            }
            Potential::Tabulated { values } => {
                if values.len() != grid.n_points() {
                    return Err(Error::LengthMismatch {
                        expected: grid.n_points(),
                        got: values.len(),
                    });
                }
                if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite(i));
                }
                Ok(values.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub steps: usize,
    pub constants: PhysicalConstants,
}

impl EvolutionConfig {
    pub fn new(dt: f64, steps: usize, constants: PhysicalConstants) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {dt}")));
        }
        Ok(Self {
            dt,
            steps,
            constants,
        })
    }
}

/// States saved at every step, starting with the initial state at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    times: Vec<f64>,
    states: Vec<ComplexField>,
}

impl Trajectory {
    pub fn new(dt: f64, states: Vec<ComplexField>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt = {dt}")));
        }
        if let Some(first) = states.first() {
            if states.iter().any(|s| s.grid() != first.grid()) {
                return Err(Error::GridMismatch);
            }
        }
        let times = (0..states.len()).map(|k| k as f64 * dt).collect();
        Ok(Self { dt, times, states })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ComplexField] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.states.first().map(|s| s.grid())
    }

    /// Largest `max(|psi_0|, |psi_{n-1}|, |psi_1|, |psi_{n-2}|) / max|psi|`
    /// over the run: how close the packet came to the box edges.
    pub fn max_boundary_ratio(&self) -> f64 {
        self.states
            .iter()
            .map(|s| {
                let v = s.values();
                let n = v.len();
                let edge = [v[0], v[1], v[n - 2], v[n - 1]]
                    .iter()
                    .fold(0.0f64, |m, z| m.max(z.norm()));
                edge / s.max_modulus()
            })
            .fold(0.0, f64::max)
    }
}

/// `H psi = -(hbar^2 / 2m) laplacian(psi) + V psi`.
pub fn hamiltonian_apply(
    psi: &ComplexField,
    potential: &Potential,
    constants: &PhysicalConstants,
) -> Result<ComplexField> {
    let v = potential.sample(psi.grid(), constants)?;
    let kinetic = -constants.hbar * constants.hbar / (2.0 * constants.mass);
    let lap = laplacian(psi);
    let values = lap
        .values()
        .iter()
        .zip(psi.values())
        .zip(&v)
        .map(|((&l, &z), &vi)| l * kinetic + z * vi)
        .collect();
    Ok(Field::from_parts_unchecked(*psi.grid(), values))
}

/// Pre-factored Crank-Nicolson propagator for a fixed grid, potential and step.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    grid: GridSpec,
    /// `1 - i dt/2hbar * H_ii` on interior nodes.
    rhs_diag: Vec<Complex64>,
    rhs_off: Complex64,
    lhs_off: Complex64,
    /// Thomas forward-sweep factors: `c'_k` and `1 / m_k`.
    c_prime: Vec<Complex64>,
    inv_pivot: Vec<Complex64>,
}

impl CrankNicolson {
    pub fn new(grid: &GridSpec, potential: &Potential, cfg: &EvolutionConfig) -> Result<Self> {
        if grid.boundary() != Boundary::Dirichlet {
            return Err(Error::UnsupportedBoundary("dirichlet"));
        }
        let v = potential.sample(grid, &cfg.constants)?;
        let PhysicalConstants { hbar, mass } = cfg.constants;
        let dx = grid.dx();
        let h_diag_kin = hbar * hbar / (mass * dx * dx);
        let h_off = -hbar * hbar / (2.0 * mass * dx * dx);
        let alpha = Complex64::new(0.0, cfg.dt / (2.0 * hbar));

        let interior = &v[1..v.len() - 1];
        let lhs_diag: Vec<Complex64> = interior
            .iter()
            .map(|&vi| 1.0 + alpha * (h_diag_kin + vi))
            .collect();
        let rhs_diag = interior
            .iter()
            .map(|&vi| 1.0 - alpha * (h_diag_kin + vi))
            .collect();
        let lhs_off = alpha * h_off;

        let m = lhs_diag.len();
        let mut c_prime = vec![Complex64::new(0.0, 0.0); m];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); m];
        let mut prev_c = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let pivot = lhs_diag[k] - lhs_off * prev_c;
            if pivot.norm() < f64::EPSILON {
                return Err(Error::SingularSolve(k + 1));
            }
            inv_pivot[k] = 1.0 / pivot;
            c_prime[k] = lhs_off * inv_pivot[k];
            prev_c = c_prime[k];
        }

        Ok(Self {
            grid: *grid,
            rhs_diag,
            rhs_off: -lhs_off,
            lhs_off,
            c_prime,
            inv_pivot,
        })
    }

    pub fn step(&self, psi: &ComplexField) -> Result<ComplexField> {
        if psi.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let v = psi.values();
        let n = v.len();
        let m = n - 2;
        let zero = Complex64::new(0.0, 0.0);

        // rhs = B psi on interior nodes, psi = 0 on the end nodes
        let at = |i: usize| if i == 0 || i == n - 1 { zero } else { v[i] };
        let mut d = Vec::with_capacity(m);
        for k in 0..m {
            let i = k + 1;
            d.push(self.rhs_diag[k] * v[i] + self.rhs_off * (at(i - 1) + at(i + 1)));
        }

        // forward sweep
        let mut prev = zero;
        for (dk, pivot) in d.iter_mut().zip(&self.inv_pivot) {
            *dk = (*dk - self.lhs_off * prev) * pivot;
            prev = *dk;
        }
        // back substitution
        for k in (0..m - 1).rev() {
            let next = d[k + 1];
            d[k] -= self.c_prime[k] * next;
        }

        let mut out = Vec::with_capacity(n);
        out.push(zero);
        out.extend(d);
        out.push(zero);
        Ok(Field::from_parts_unchecked(self.grid, out))
    }
}

/// One Crank-Nicolson step. Use [`CrankNicolson`] directly for repeated steps.
pub fn cn_step(psi: &ComplexField, potential: &Potential, cfg: &EvolutionConfig) -> Result<ComplexField> {
    CrankNicolson::new(psi.grid(), potential, cfg)?.step(psi)
}

/// `cfg.steps` Crank-Nicolson steps from `psi0`, saving every state.
pub fn evolve(psi0: &ComplexField, potential: &Potential, cfg: &EvolutionConfig) -> Result<Trajectory> {
    let mut states = Vec::with_capacity(cfg.steps + 1);
    states.push(psi0.clone());
    if cfg.steps > 0 {
        let stepper = CrankNicolson::new(psi0.grid(), potential, cfg)?;
        for _ in 0..cfg.steps {
            let next = stepper.step(states.last().expect("nonempty"))?;
            states.push(next);
        }
    }
    Trajectory::new(cfg.dt, states)
}

/// `|psi|^2`.
pub fn probability_density(psi: &ComplexField) -> RealField {
    psi.map(|z| z.norm_sqr())
}

/// `(hbar/m) Im(conj(psi) grad psi)`.
pub fn current_density(psi: &ComplexField, constants: &PhysicalConstants) -> RealField {
    let scale = constants.hbar / constants.mass;
    let grad = gradient(psi);
    psi.zip_with(&grad, |z, dz| scale * (z.conj() * dz).im)
        .expect("gradient lives on the same grid")
}

/// Normalized Gaussian `exp(-(x-x0)^2 / 2 sigma^2 + i k x)`.
pub fn gaussian_packet(grid: &GridSpec, center: f64, sigma: f64, momentum: f64) -> Result<ComplexField> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma = {sigma}")));
    }
    let norm = (PI.sqrt() * sigma).powf(-0.5);
    ComplexField::from_fn(*grid, |x| {
        let u = (x - center) / sigma;
        Complex64::from_polar(norm * (-0.5 * u * u).exp(), momentum * x)
    })
}

/// `<x>` with weight `|psi|^2 dx`, normalized by the discrete norm.
pub fn mean_position(psi: &ComplexField) -> f64 {
    let g = psi.grid();
    let (mut w, mut wx) = (0.0, 0.0);
    for (i, z) in psi.values().iter().enumerate() {
        let p = z.norm_sqr();
        w += p;
        wx += p * g.x(i);
    }
    wx / w
}

/// `<x^2> - <x>^2`.
pub fn position_variance(psi: &ComplexField) -> f64 {
    let g = psi.grid();
    let mean = mean_position(psi);
    let (mut w, mut wx2) = (0.0, 0.0);
    for (i, z) in psi.values().iter().enumerate() {
        let p = z.norm_sqr();
        let d = g.x(i) - mean;
        w += p;
        wx2 += p * d * d;
    }
    wx2 / w
}

/// `dx sum conj(a_i) b_i`.
pub fn overlap(a: &ComplexField, b: &ComplexField) -> Result<Complex64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch);
    }
    let s: Complex64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(s * a.grid().dx())
}

/// Least-squares slope of the unwrapped phase of `<reference | psi(t)>`.
/// For an eigenstate with energy `E` this is `-E / hbar`.
pub fn phase_rate(traj: &Trajectory, reference: &ComplexField) -> Result<f64> {
    let mut phases = Vec::with_capacity(traj.len());
    let mut prev: Option<f64> = None;
    for s in traj.states() {
        let a = principal_arg(overlap(reference, s)?);
        let unwrapped = match prev {
            None => a,
            Some(p) => a + 2.0 * PI * ((p - a) / (2.0 * PI)).round(),
        };
        phases.push(unwrapped);
        prev = Some(unwrapped);
    }
    let t = traj.times();
    let n = t.len() as f64;
    if t.len() < 2 {
        return Err(Error::TrajectoryTooShort(t.len()));
    }
    let tm = t.iter().sum::<f64>() / n;
    let pm = phases.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (ti, pi) in t.iter().zip(&phases) {
        num += (ti - tm) * (pi - pm);
        den += (ti - tm) * (ti - tm);
    }
    Ok(num / den)
}

/// Largest relative change of the discrete norm along a trajectory.
pub fn norm_drift(traj: &Trajectory) -> f64 {
    let Some(first) = traj.states().first() else {
        return 0.0;
    };
    let n0 = l2_norm(first);
    traj.states()
        .iter()
        .map(|s| (l2_norm(s) - n0).abs() / n0)
        .fold(0.0, f64::max)
}

//! Gauge transformations of projectors and general density matrices.
//!
//! For `rho(x, y) = psi(x) conj(psi(y))` the wave-function map induces
//!
//! ```text
//! rho'(x, y) = rho(x, y) exp[(lambda - 1) Ln(rho/|rho|) + (i gamma / 2) ln(rho(x,x) / rho(y,y))]
//! ```
//!
//! and the same expression with a complex `gamma` still leaves the diagonal
//! untouched while giving up Hermiticity. `Ln` is the principal branch, so
//! `Ln(rho/|rho|) = i Arg(rho)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauge::{apply_field, GaugeParams};
use crate::grid::{check_floor, principal_arg, ComplexField, GridSpec};

/// Diagonal entries must be real and nonnegative to within this fraction of
/// the largest diagonal entry.
const DIAGONAL_REAL_TOL: f64 = 1e-12;

/// `(lambda, gamma_c)` with complex `gamma_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexGaugeParams {
    lambda: f64,
    gamma: Complex64,
}

impl ComplexGaugeParams {
    pub fn new(lambda: f64, gamma: Complex64) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidLambda(lambda));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("gamma_c = {gamma}")));
        }
        Ok(Self { lambda, gamma })
    }

    pub fn real(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, Complex64::new(gamma, 0.0))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }
}

impl From<GaugeParams> for ComplexGaugeParams {
    fn from(p: GaugeParams) -> Self {
        Self {
            lambda: p.lambda(),
            gamma: Complex64::new(p.gamma(), 0.0),
        }
    }
}

/// Dense `n x n` matrix of `rho(x_i, x_j)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: GridSpec,
    values: Vec<Complex64>,
    masked: Vec<(usize, usize)>,
}

impl DensityMatrix {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        let n = grid.n_points();
        if values.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|z| !z.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self {
            grid,
            values,
            masked: Vec::new(),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.n_points()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.dim() + j]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    /// `sum_i rho(i, i)`; multiply by `dx` for the discrete trace norm.
    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    /// Entries left untouched by [`apply_density`] because their modulus or a
    /// participating diagonal entry fell below the floor.
    pub fn masked(&self) -> &[(usize, usize)] {
        &self.masked
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// `rho(i, j) = psi_i conj(psi_j)`.
pub fn projector_from(psi: &ComplexField) -> DensityMatrix {
    let v = psi.values();
    let values = v
        .iter()
        .flat_map(|&a| v.iter().map(move |&b| a * b.conj()))
        .collect();
    DensityMatrix {
        grid: *psi.grid(),
        values,
        masked: Vec::new(),
    }
}

fn checked_diagonal(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let diag = rho.diagonal();
    let max = diag.iter().fold(0.0f64, |m, d| m.max(d.re));
    if !(max > 0.0) {
        return Err(Error::NonPositiveDiagonal {
            index: 0,
            value: format!("max diagonal {max}"),
        });
    }
    for (i, d) in diag.iter().enumerate() {
        if d.re < -DIAGONAL_REAL_TOL * max || d.im.abs() > DIAGONAL_REAL_TOL * max {
            return Err(Error::NonPositiveDiagonal {
                index: i,
                value: d.to_string(),
            });
        }
    }
    Ok(diag.into_iter().map(|d| d.re).collect())
}

/// Entrywise gauge map of a density matrix.
///
/// Entry `(i, j)` is transformed when both `rho(i,i)` and `rho(j,j)` exceed
/// `floor_rel * max_k rho(k,k)` and `|rho(i,j)|` exceeds `floor_rel * max|rho|`;
/// otherwise it is copied and listed in [`DensityMatrix::masked`].
pub fn apply_density(
    p: &ComplexGaugeParams,
    rho: &DensityMatrix,
    floor_rel: f64,
) -> Result<DensityMatrix> {
    check_floor(floor_rel)?;
    let diag = checked_diagonal(rho)?;
    let n = rho.dim();
    let diag_floor = floor_rel * diag.iter().cloned().fold(0.0, f64::max);
    let entry_floor = floor_rel * rho.max_abs();
    let active: Vec<bool> = diag.iter().map(|&d| d > diag_floor).collect();
    let log_diag: Vec<f64> = diag.iter().map(|&d| d.ln()).collect();
    let half_i_gamma = Complex64::i() * p.gamma / 2.0;

    let mut values = Vec::with_capacity(n * n);
    let mut masked = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let z = rho.get(i, j);
            if !(active[i] && active[j] && z.norm() > entry_floor) {
                values.push(z);
                masked.push((i, j));
                continue;
            }
            let log_ratio = if i == j { 0.0 } else { log_diag[i] - log_diag[j] };
            let exponent = Complex64::new(0.0, (p.lambda - 1.0) * principal_arg(z))
                + half_i_gamma * log_ratio;
            values.push(z * exponent.exp());
        }
    }
    Ok(DensityMatrix {
        grid: rho.grid,
        values,
        masked,
    })
}

/// `max_i |rho'(i,i) - rho(i,i)| / max_i rho(i,i)`.
pub fn diagonal_deviation(rho: &DensityMatrix, transformed: &DensityMatrix) -> Result<f64> {
    if rho.grid != transformed.grid {
        return Err(Error::GridMismatch);
    }
    let max = rho.diagonal().iter().fold(0.0f64, |m, d| m.max(d.re));
    let dev = (0..rho.dim())
        .map(|i| (transformed.get(i, i) - rho.get(i, i)).norm())
        .fold(0.0, f64::max);
    Ok(if max > 0.0 { dev / max } else { dev })
}

/// `max_{i,j} |rho(i,j) - conj(rho(j,i))| / max|rho|`.
pub fn hermiticity_deviation(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((rho.get(i, j) - rho.get(j, i).conj()).norm());
        }
    }
    let max = rho.max_abs();
    if max > 0.0 {
        dev / max
    } else {
        dev
    }
}

/// Convex combination `p1 rho1 + p2 rho2`.
pub fn mix(rho1: &DensityMatrix, rho2: &DensityMatrix, p1: f64, p2: f64) -> Result<DensityMatrix> {
    if !(p1 >= 0.0 && p2 >= 0.0 && (p1 + p2 - 1.0).abs() <= 1e-12) {
        return Err(Error::BadWeights { p1, p2 });
    }
    if rho1.grid != rho2.grid {
        return Err(Error::GridMismatch);
    }
    let values = rho1
        .values
        .iter()
        .zip(&rho2.values)
        .map(|(&a, &b)| a * p1 + b * p2)
        .collect();
    Ok(DensityMatrix {
        grid: rho1.grid,
        values,
        masked: Vec::new(),
    })
}

/// Gauge map of a mixture compared with the mixture of gauge maps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// `max_{i != j} |N[mix] - mix(N[rho1], N[rho2])|`.
    pub offdiag_gap: f64,
    /// `max_i |N[mix](i,i) - (p1 rho1(i,i) + p2 rho2(i,i))|`.
    pub diag_gap: f64,
}

pub fn convexity_report(
    rho1: &DensityMatrix,
    rho2: &DensityMatrix,
    p1: f64,
    p2: f64,
    p: &ComplexGaugeParams,
    floor_rel: f64,
) -> Result<ConvexityReport> {
    let mixed = mix(rho1, rho2, p1, p2)?;
    let left = apply_density(p, &mixed, floor_rel)?;
    let right = mix(
        &apply_density(p, rho1, floor_rel)?,
        &apply_density(p, rho2, floor_rel)?,
        p1,
        p2,
    )?;
    let n = mixed.dim();
    let mut offdiag_gap: f64 = 0.0;
    let mut diag_gap: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                let expected = rho1.get(i, i) * p1 + rho2.get(i, i) * p2;
                diag_gap = diag_gap.max((left.get(i, i) - expected).norm());
            } else {
                offdiag_gap = offdiag_gap.max((left.get(i, j) - right.get(i, j)).norm());
            }
        }
    }
    Ok(ConvexityReport {
        offdiag_gap,
        diag_gap,
    })
}

/// Density-level versus field-level gauge maps of a pure state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    /// Largest `|N[rho](i,j) - N[psi]_i conj(N[psi]_j)|`, relative to
    /// `max|rho|`, over entries outside the predicted mismatch set.
    pub max_deviation: f64,
    /// Entries where the two constructions disagree beyond the tolerance.
    pub mismatched: Vec<(usize, usize)>,
    /// Entries where `Arg psi_i - Arg psi_j` leaves `(-pi, pi]` and
    /// `lambda` is not an integer, i.e. where `Arg rho(i,j)` sits on another
    /// sheet than the difference of the field phases.
    pub predicted: Vec<(usize, usize)>,
}

impl ConsistencyReport {
    pub fn sets_agree(&self) -> bool {
        self.mismatched == self.predicted
    }
}

/// Compares `apply_density(p, projector_from(psi))` with
/// `projector_from(apply_field(p, psi))`, entry by entry.
pub fn field_consistency(
    p: &GaugeParams,
    psi: &ComplexField,
    floor_rel: f64,
    tol: f64,
) -> Result<ConsistencyReport> {
    let rho = projector_from(psi);
    let via_density = apply_density(&(*p).into(), &rho, floor_rel)?;
    let via_field = projector_from(&apply_field(p, psi, floor_rel)?);
    let scale = rho.max_abs();
    let args: Vec<f64> = psi.values().iter().map(|&z| principal_arg(z)).collect();
    let integer_lambda = p.lambda().fract() == 0.0;

    let n = rho.dim();
    let mut max_deviation: f64 = 0.0;
    let mut mismatched = Vec::new();
    let mut predicted = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let d = args[i] - args[j];
            let off_sheet = !integer_lambda && !(d > -PI && d <= PI);
            if off_sheet {
                predicted.push((i, j));
            }
            let dev = (via_density.get(i, j) - via_field.get(i, j)).norm() / scale;
            if dev > tol {
                mismatched.push((i, j));
            }
            if !off_sheet {
                max_deviation = max_deviation.max(dev);
            }
        }
    }
    Ok(ConsistencyReport {
        max_deviation,
        mismatched,
        predicted,
    })
}

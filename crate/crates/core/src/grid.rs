//! Uniform one-dimensional grids and the fields that live on them.
//!
//! Fields are plain value arrays tagged with their [`GridSpec`]. The finite
//! difference operators here are second order everywhere: central stencils in
//! the interior, periodic wrap on periodic grids and one-sided second-order
//! stencils at the two ends of a dirichlet grid.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest grid accepted anywhere in the crate.
pub const MIN_POINTS: usize = 8;

/// Default relative amplitude floor used when taking logarithms of fields.
pub const DEFAULT_FLOOR_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Dirichlet => "dirichlet",
            Boundary::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirichlet" => Ok(Boundary::Dirichlet),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidParameter(format!("unknown boundary `{other}`"))),
        }
    }
}

/// A uniform 1D grid: node `i` sits at `x_min + i * dx`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    n_points: usize,
    x_min: f64,
    dx: f64,
    boundary: Boundary,
}

impl GridSpec {
    pub fn new(n_points: usize, x_min: f64, dx: f64, boundary: Boundary) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidRange(format!(
                "n_points = {n_points} < {MIN_POINTS}"
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) || !x_min.is_finite() {
            return Err(Error::InvalidRange(format!("x_min = {x_min}, dx = {dx}")));
        }
        Ok(Self {
            n_points,
            x_min,
            dx,
            boundary,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Grid with half the spacing covering the same interval. Dirichlet grids
    /// keep both end points, so every coarse node is also a fine node.
    pub fn refined(&self) -> Self {
        let n_points = match self.boundary {
            Boundary::Dirichlet => 2 * self.n_points - 1,
            Boundary::Periodic => 2 * self.n_points,
        };
        Self {
            n_points,
            x_min: self.x_min,
            dx: self.dx / 2.0,
            boundary: self.boundary,
        }
    }
}

/// Builds a grid covering `[x_min, x_max]`.
///
/// Dirichlet grids include both end points; periodic grids omit `x_max`, which
/// is identified with `x_min`.
pub fn make_grid(n_points: usize, x_min: f64, x_max: f64, boundary: Boundary) -> Result<GridSpec> {
    if !(x_max > x_min) {
        return Err(Error::InvalidRange(format!(
            "x_max = {x_max} must exceed x_min = {x_min}"
        )));
    }
    if n_points < MIN_POINTS {
        return Err(Error::InvalidRange(format!(
            "n_points = {n_points} < {MIN_POINTS}"
        )));
    }
    let cells = match boundary {
        Boundary::Dirichlet => n_points - 1,
        Boundary::Periodic => n_points,
    };
    GridSpec::new(n_points, x_min, (x_max - x_min) / cells as f64, boundary)
}

/// Scalar types a field can hold.
pub trait FieldValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn abs_sq(self) -> f64;
    fn is_finite_value(self) -> bool;
}

impl FieldValue for f64 {
    fn zero() -> Self {
        0.0
    }

    fn abs_sq(self) -> f64 {
        self * self
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl FieldValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }

    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }

    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

/// Values sampled on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: GridSpec,
    values: Vec<T>,
}

pub type ComplexField = Field<Complex64>;
pub type RealField = Field<f64>;

impl<T: FieldValue> Field<T> {
    /// Wraps `values`, checking the length and that every entry is finite.
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::LengthMismatch {
                expected: grid.n_points(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    /// Samples `f` at the node coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> T) -> Result<Self> {
        Self::new(grid, grid.coordinates().into_iter().map(f).collect())
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![T::zero(); grid.n_points()],
        }
    }

    pub(crate) fn from_parts_unchecked(grid: GridSpec, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.n_points());
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U: FieldValue>(&self, f: impl Fn(T) -> U) -> Field<U> {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with<U: FieldValue, V: FieldValue>(
        &self,
        other: &Field<U>,
        f: impl Fn(T, U) -> V,
    ) -> Result<Field<V>> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }
}

impl ComplexField {
    pub fn modulus(&self) -> RealField {
        self.map(|z| z.norm())
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }
}

impl RealField {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// First derivative: `(f[i+1] - f[i-1]) / 2dx` in the interior.
pub fn gradient<T: FieldValue>(f: &Field<T>) -> Field<T> {
    let v = &f.values;
    let n = v.len();
    let dx = f.grid.dx();
    let inv = 1.0 / (2.0 * dx);
    let mut out = vec![T::zero(); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i - 1]) * inv;
    }
    match f.grid.boundary() {
        Boundary::Periodic => {
            out[0] = (v[1] - v[n - 1]) * inv;
            out[n - 1] = (v[0] - v[n - 2]) * inv;
        }
        Boundary::Dirichlet => {
            out[0] = (v[1] * 4.0 - v[0] * 3.0 - v[2]) * inv;
            out[n - 1] = (v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]) * inv;
        }
    }
    Field::from_parts_unchecked(f.grid, out)
}

/// Second derivative with the 3-point stencil `(f[i+1] - 2f[i] + f[i-1]) / dx^2`.
pub fn laplacian<T: FieldValue>(f: &Field<T>) -> Field<T> {
    let v = &f.values;
    let n = v.len();
    let dx = f.grid.dx();
    let inv = 1.0 / (dx * dx);
    let mut out = vec![T::zero(); n];
    for i in 1..n - 1 {
        out[i] = (v[i + 1] - v[i] * 2.0 + v[i - 1]) * inv;
    }
    match f.grid.boundary() {
        Boundary::Periodic => {
            out[0] = (v[1] - v[0] * 2.0 + v[n - 1]) * inv;
            out[n - 1] = (v[0] - v[n - 1] * 2.0 + v[n - 2]) * inv;
        }
        Boundary::Dirichlet => {
            out[0] = (v[0] * 2.0 - v[1] * 5.0 + v[2] * 4.0 - v[3]) * inv;
            out[n - 1] = (v[n - 1] * 2.0 - v[n - 2] * 5.0 + v[n - 3] * 4.0 - v[n - 4]) * inv;
        }
    }
    Field::from_parts_unchecked(f.grid, out)
}

/// Discrete L2 norm `sqrt(dx * sum |f_i|^2)`.
pub fn l2_norm<T: FieldValue>(f: &Field<T>) -> f64 {
    (f.grid.dx() * f.values.iter().map(|v| v.abs_sq()).sum::<f64>()).sqrt()
}

/// Amplitude/phase pair `(A, B) = (ln|psi|, unwrapped phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroField {
    log_amplitude: RealField,
    phase: RealField,
    mask: Vec<bool>,
}

impl HydroField {
    pub fn new(log_amplitude: RealField, phase: RealField, mask: Vec<bool>) -> Result<Self> {
        if log_amplitude.grid() != phase.grid() {
            return Err(Error::GridMismatch);
        }
        if mask.len() != phase.len() {
            return Err(Error::LengthMismatch {
                expected: phase.len(),
                got: mask.len(),
            });
        }
        Ok(Self {
            log_amplitude,
            phase,
            mask,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.phase.grid()
    }

    /// `A = ln|psi|`.
    pub fn log_amplitude(&self) -> &RealField {
        &self.log_amplitude
    }

    /// `B`, continuous across the grid.
    pub fn phase(&self) -> &RealField {
        &self.phase
    }

    /// `true` at nodes whose amplitude was clamped to the floor.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }
}

/// Principal argument in `(-pi, pi]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    // atan2 returns -pi for (negative real, -0.0 imaginary)
    if a <= -PI {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut t = theta - two_pi * ((theta + PI) / two_pi).floor();
    // t is now in [-pi, pi); move the left end point to the right.
    if t <= -PI {
        t += two_pi;
    }
    t
}

/// Splits `psi` into log-amplitude and unwrapped phase.
///
/// The unwrap is a sequential left-to-right scan: each node takes the 2pi
/// shift of its principal argument closest to the previous unmasked phase.
/// The scan is anchored at the principal argument of the first unmasked node.
/// Nodes with `|psi| < floor_rel * max|psi|` are clamped to the floor in `A`,
/// flagged in the mask, and copy the phase of their nearest unmasked left
/// neighbor (leading masked nodes copy the anchor).
pub fn decompose(psi: &ComplexField, floor_rel: f64) -> Result<HydroField> {
    check_floor(floor_rel)?;
    let max = psi.max_modulus();
    if max == 0.0 {
        return Err(Error::AllZeroField);
    }
    let floor = floor_rel * max;
    let two_pi = 2.0 * PI;
    let n = psi.len();

    let mut log_amp = Vec::with_capacity(n);
    let mut mask = Vec::with_capacity(n);
    for z in psi.values() {
        let r = z.norm();
        let clamped = r < floor;
        mask.push(clamped);
        log_amp.push(r.max(floor).ln());
    }

    let anchor = mask.iter().position(|&m| !m).expect("max node is unmasked");
    let mut phase = vec![0.0; n];
    let mut prev = principal_arg(psi.values()[anchor]);
    for i in 0..n {
        if mask[i] {
            phase[i] = prev;
            continue;
        }
        let arg = principal_arg(psi.values()[i]);
        let b = arg + two_pi * ((prev - arg) / two_pi).round();
        phase[i] = b;
        prev = b;
    }

    let grid = *psi.grid();
    HydroField::new(
        Field::from_parts_unchecked(grid, log_amp),
        Field::from_parts_unchecked(grid, phase),
        mask,
    )
}

/// `psi = exp(A + iB)`.
pub fn reconstruct(h: &HydroField) -> ComplexField {
    let values = h
        .log_amplitude
        .values()
        .iter()
        .zip(h.phase.values())
        .map(|(&a, &b)| Complex64::from_polar(a.exp(), b))
        .collect();
    Field::from_parts_unchecked(*h.grid(), values)
}

pub(crate) fn check_floor(floor_rel: f64) -> Result<()> {
    if floor_rel > 0.0 && floor_rel <= 1e-6 {
        Ok(())
    } else {
        Err(Error::InvalidFloor(floor_rel))
    }
}

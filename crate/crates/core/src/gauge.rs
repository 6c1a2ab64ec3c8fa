//! Gauge parameters and the three realizations of the nonlinear gauge map
//! `psi -> |psi| exp(i lambda arg psi + i gamma ln|psi|)`.
//!
//! * pointwise, with the principal argument: lawful only for the principal
//!   (`0 < |lambda| <= 1`) and integer classes, which are semigroups;
//! * branch-tracked: each value carries the integer sheet index of its phase,
//!   which restores the full affine group;
//! * hydrodynamic: acts on `(A, B) = (ln|psi|, unwrapped phase)` with the
//!   lower-triangular matrix `[[1, 0], [gamma, lambda]]`, also a group.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{check_floor, principal_arg, wrap_angle, ComplexField, Field, HydroField};

/// Two phases closer than this (modulo 2pi) are reported equal.
pub const PHASE_EQUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaugeClass {
    /// `-1 <= lambda <= 1`, principal branch of the argument.
    Principal,
    /// Nonzero integer `lambda`.
    Integer,
    /// Any nonzero `lambda`; only for the branch-tracked and hydrodynamic maps.
    Unrestricted,
}

impl GaugeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            GaugeClass::Principal => "principal",
            GaugeClass::Integer => "integer",
            GaugeClass::Unrestricted => "unrestricted",
        }
    }

    fn admits(self, lambda: f64) -> bool {
        match self {
            GaugeClass::Principal => lambda.abs() <= 1.0,
            GaugeClass::Integer => lambda.fract() == 0.0,
            GaugeClass::Unrestricted => true,
        }
    }

    /// The most specific pointwise class containing `lambda`, if any.
    pub fn classify(lambda: f64) -> GaugeClass {
        if lambda.fract() == 0.0 {
            GaugeClass::Integer
        } else if lambda.abs() <= 1.0 {
            GaugeClass::Principal
        } else {
            GaugeClass::Unrestricted
        }
    }
}

impl fmt::Display for GaugeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A gauge transformation `N_{lambda, gamma}` tagged with its class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeParams {
    lambda: f64,
    gamma: f64,
    class: GaugeClass,
}

impl GaugeParams {
    pub fn new(lambda: f64, gamma: f64, class: GaugeClass) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidLambda(lambda));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidGamma(gamma));
        }
        if !class.admits(lambda) {
            return Err(Error::ClassViolation {
                lambda,
                class: class.as_str(),
            });
        }
        Ok(Self {
            lambda,
            gamma,
            class,
        })
    }

    pub fn principal(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, gamma, GaugeClass::Principal)
    }

    pub fn integer(lambda: i64, gamma: f64) -> Result<Self> {
        Self::new(lambda as f64, gamma, GaugeClass::Integer)
    }

    pub fn unrestricted(lambda: f64, gamma: f64) -> Result<Self> {
        Self::new(lambda, gamma, GaugeClass::Unrestricted)
    }

    pub fn identity(class: GaugeClass) -> Self {
        Self {
            lambda: 1.0,
            gamma: 0.0,
            class,
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn class(&self) -> GaugeClass {
        self.class
    }

    /// Same parameters viewed as an element of the full affine group.
    pub fn to_unrestricted(self) -> Self {
        Self {
            class: GaugeClass::Unrestricted,
            ..self
        }
    }

    /// The phase `lambda * Arg z + gamma * ln|z|` this map assigns to `z`
    /// before any reduction to the principal branch.
    pub fn raw_phase(&self, z: Complex64) -> f64 {
        self.lambda * principal_arg(z) + self.gamma * z.norm().ln()
    }

    /// Whether the image of `z` keeps its raw phase inside `(-pi, pi]`.
    ///
    /// For principal-class parameters this is the domain on which a second
    /// principal-class map composes according to the affine law: outside it
    /// the reduced phase differs from the raw one by `2 pi k`, and a non-integer
    /// outer `lambda` turns that into a genuine phase error.
    pub fn keeps_phase_principal(&self, z: Complex64) -> bool {
        let t = self.raw_phase(z);
        t > -PI && t <= PI
    }

    fn require_pointwise(&self) -> Result<()> {
        match self.class {
            GaugeClass::Principal | GaugeClass::Integer => Ok(()),
            GaugeClass::Unrestricted => Err(Error::WrongClass {
                expected: "principal or integer",
                got: self.class.as_str(),
            }),
        }
    }

    fn require_unrestricted(&self) -> Result<()> {
        match self.class {
            GaugeClass::Unrestricted => Ok(()),
            other => Err(Error::WrongClass {
                expected: "unrestricted",
                got: other.as_str(),
            }),
        }
    }
}

/// `N_outer o N_inner = N_{lambda' lambda, lambda' gamma + gamma'}`.
pub fn compose(outer: &GaugeParams, inner: &GaugeParams) -> Result<GaugeParams> {
    if outer.class != inner.class {
        return Err(Error::ClassMismatch {
            outer: outer.class.as_str(),
            inner: inner.class.as_str(),
        });
    }
    GaugeParams::new(
        outer.lambda * inner.lambda,
        outer.lambda * inner.gamma + outer.gamma,
        outer.class,
    )
}

/// Group inverse `(1/lambda, -gamma/lambda)`.
///
/// Principal and integer parameters are only invertible in class when
/// `|lambda| == 1`.
pub fn inverse(p: &GaugeParams) -> Result<GaugeParams> {
    if p.class != GaugeClass::Unrestricted && p.lambda.abs() != 1.0 {
        return Err(Error::NotInvertible(p.class.as_str()));
    }
    GaugeParams::new(1.0 / p.lambda, -p.gamma / p.lambda, p.class)
}

/// The principal-branch map with no class or floor checks.
///
/// Written as `z * exp(i((lambda - 1) Arg z + gamma ln|z|))` for positive
/// `lambda` and with `conj(z)` and `lambda + 1` for negative `lambda`, which
/// equals `|z| exp(i lambda Arg z + i gamma ln|z|)` and makes `N_{1,0}` and
/// `N_{-1,0}` exact.
pub fn principal_map(lambda: f64, gamma: f64, z: Complex64) -> Complex64 {
    principal_map_with_log(lambda, gamma, z, z.norm().ln())
}

fn principal_map_with_log(lambda: f64, gamma: f64, z: Complex64, log_modulus: f64) -> Complex64 {
    let theta = principal_arg(z);
    let (base, sign) = if lambda > 0.0 {
        (z, 1.0)
    } else {
        (z.conj(), -1.0)
    };
    let phase = (lambda - sign) * theta + gamma * log_modulus;
    if phase == 0.0 {
        base
    } else {
        base * Complex64::cis(phase)
    }
}

/// Pointwise gauge map on a single value. Requires the principal or integer
/// class and a modulus of at least `f64::MIN_POSITIVE`.
pub fn apply_pointwise(p: &GaugeParams, z: Complex64) -> Result<Complex64> {
    p.require_pointwise()?;
    let r = z.norm();
    if !(r >= f64::MIN_POSITIVE) {
        return Err(Error::BelowFloor {
            modulus: r,
            floor: f64::MIN_POSITIVE,
        });
    }
    Ok(principal_map(p.lambda, p.gamma, z))
}

/// Pointwise gauge map over a field.
///
/// Nodes with `|psi| < floor_rel * max|psi|` keep their modulus and use the
/// floor in place of `ln|psi|`; use [`floor_mask`] to find them.
pub fn apply_field(p: &GaugeParams, psi: &ComplexField, floor_rel: f64) -> Result<ComplexField> {
    p.require_pointwise()?;
    check_floor(floor_rel)?;
    let max = psi.max_modulus();
    if max == 0.0 {
        return Err(Error::AllZeroField);
    }
    let floor = floor_rel * max;
    let log_floor = floor.ln();
    let values = psi
        .values()
        .iter()
        .map(|&z| {
            let r = z.norm();
            let log_r = if r < floor { log_floor } else { r.ln() };
            principal_map_with_log(p.lambda, p.gamma, z, log_r)
        })
        .collect();
    Ok(Field::from_parts_unchecked(*psi.grid(), values))
}

/// Nodes whose modulus falls below `floor_rel * max|psi|`.
pub fn floor_mask(psi: &ComplexField, floor_rel: f64) -> Vec<bool> {
    let floor = floor_rel * psi.max_modulus();
    psi.values().iter().map(|z| z.norm() < floor).collect()
}

/// A complex value together with the sheet of its argument: the total phase
/// is `arg + 2 pi branch`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchedValue {
    modulus: f64,
    arg: f64,
    branch: i64,
}

impl BranchedValue {
    pub fn new(modulus: f64, arg: f64, branch: i64) -> Result<Self> {
        if !(modulus >= 0.0 && modulus.is_finite()) {
            return Err(Error::InvalidParameter(format!("modulus {modulus}")));
        }
        if !(arg > -PI && arg <= PI) {
            return Err(Error::InvalidParameter(format!(
                "argument {arg} outside (-pi, pi]"
            )));
        }
        Ok(Self {
            modulus,
            arg,
            branch,
        })
    }

    /// Splits a total phase into a principal argument and sheet index.
    pub fn from_phase(modulus: f64, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(Error::InvalidParameter(format!("phase {phase}")));
        }
        let (arg, branch) = split_phase(phase);
        Self::new(modulus, arg, branch)
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    pub fn arg(&self) -> f64 {
        self.arg
    }

    pub fn branch(&self) -> i64 {
        self.branch
    }

    pub fn total_phase(&self) -> f64 {
        self.arg + 2.0 * PI * self.branch as f64
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.arg)
    }
}

/// `theta = arg + 2 pi n` with `arg` in `(-pi, pi]`.
fn split_phase(theta: f64) -> (f64, i64) {
    let two_pi = 2.0 * PI;
    let mut n = ((theta - PI) / two_pi).ceil();
    let mut arg = theta - two_pi * n;
    if arg <= -PI {
        arg += two_pi;
        n -= 1.0;
    } else if arg > PI {
        arg -= two_pi;
        n += 1.0;
    }
    (arg, n as i64)
}

/// Branch-tracked gauge map: the total phase
/// `lambda (arg + 2 pi m) + gamma ln(modulus)` is carried exactly and split
/// back into a principal argument and sheet index.
pub fn apply_branched(p: &GaugeParams, v: &BranchedValue) -> Result<BranchedValue> {
    p.require_unrestricted()?;
    if !(v.modulus >= f64::MIN_POSITIVE) {
        return Err(Error::BelowFloor {
            modulus: v.modulus,
            floor: f64::MIN_POSITIVE,
        });
    }
    let theta = p.lambda * v.total_phase() + p.gamma * v.modulus.ln();
    BranchedValue::from_phase(v.modulus, theta)
}

/// Hydrodynamic gauge map `(A, B) -> (A, gamma A + lambda B)`.
pub fn apply_hydro(p: &GaugeParams, h: &HydroField) -> Result<HydroField> {
    p.require_unrestricted()?;
    let phase = h
        .log_amplitude()
        .zip_with(h.phase(), |a, b| p.gamma * a + p.lambda * b)?;
    HydroField::new(h.log_amplitude().clone(), phase, h.mask().to_vec())
}

/// Branched values of a field, with sheet indices taken from the unwrapped
/// phase of `h`.
pub fn branched_from_hydro(h: &HydroField) -> Vec<BranchedValue> {
    h.log_amplitude()
        .values()
        .iter()
        .zip(h.phase().values())
        .map(|(&a, &b)| {
            let (arg, branch) = split_phase(b);
            BranchedValue {
                modulus: a.exp(),
                arg,
                branch,
            }
        })
        .collect()
}

/// One test point of a composition check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionPoint {
    pub arg_in: f64,
    pub arg_single: f64,
    pub arg_double: f64,
    pub arg_direct: f64,
    pub equal: bool,
}

/// Outcome of applying the principal-branch map twice versus once with the
/// composed parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub lambda: f64,
    pub gamma: f64,
    pub class: GaugeClass,
    pub points: Vec<CompositionPoint>,
    pub max_deviation: f64,
}

impl CounterexampleReport {
    pub fn all_equal(&self) -> bool {
        self.points.iter().all(|p| p.equal)
    }
}

/// Compares `N o N` with `N o N` computed through the affine composition law
/// at unit-modulus points `exp(i arg)`, using the principal-branch map for
/// every application regardless of class.
pub fn counterexample_report(lambda: f64, gamma: f64, args: &[f64]) -> CounterexampleReport {
    let direct_lambda = lambda * lambda;
    let direct_gamma = lambda * gamma + gamma;
    let mut max_deviation: f64 = 0.0;
    let points = args
        .iter()
        .map(|&arg_in| {
            let z = Complex64::cis(arg_in);
            let single = principal_map(lambda, gamma, z);
            let double = principal_map(lambda, gamma, single);
            let direct = principal_map(direct_lambda, direct_gamma, z);
            let arg_double = principal_arg(double);
            let arg_direct = principal_arg(direct);
            let deviation = wrap_angle(arg_double - arg_direct).abs();
            max_deviation = max_deviation.max(deviation);
            CompositionPoint {
                arg_in,
                arg_single: principal_arg(single),
                arg_double,
                arg_direct,
                equal: deviation < PHASE_EQUAL_TOL,
            }
        })
        .collect();
    CounterexampleReport {
        lambda,
        gamma,
        class: GaugeClass::classify(lambda),
        points,
        max_deviation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{decompose, make_grid, reconstruct, Boundary, RealField, DEFAULT_FLOOR_REL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn construction_rules() {
        assert_eq!(GaugeParams::principal(0.0, 1.0), Err(Error::InvalidLambda(0.0)));
        assert!(matches!(
            GaugeParams::principal(1.5, 0.0),
            Err(Error::ClassViolation { .. })
        ));
        assert!(matches!(
            GaugeParams::new(2.5, 0.0, GaugeClass::Integer),
            Err(Error::ClassViolation { .. })
        ));
        assert!(GaugeParams::principal(-1.0, 3.0).is_ok());
        assert!(GaugeParams::unrestricted(7.25, -3.0).is_ok());
        assert!(GaugeParams::unrestricted(1.0, f64::NAN).is_err());
    }

    #[test]
    fn compose_examples() {
        let p = GaugeParams::unrestricted(1.5, 0.0).unwrap();
        let c = compose(&p, &p).unwrap();
        assert_eq!((c.lambda(), c.gamma()), (2.25, 0.0));

        let q = GaugeParams::principal(0.3, 0.7).unwrap();
        let id = GaugeParams::identity(GaugeClass::Principal);
        assert_eq!(compose(&id, &q).unwrap(), q);

        let a = GaugeParams::integer(2, 1.0).unwrap();
        let b = GaugeParams::integer(3, 0.5).unwrap();
        let c = compose(&a, &b).unwrap();
        assert_eq!((c.lambda(), c.gamma()), (6.0, 2.0));
        assert_eq!(c.class(), GaugeClass::Integer);

        assert!(matches!(compose(&a, &q), Err(Error::ClassMismatch { .. })));
    }

    #[test]
    fn inverse_examples() {
        let p = GaugeParams::unrestricted(2.0, 4.0).unwrap();
        let inv = inverse(&p).unwrap();
        assert_eq!((inv.lambda(), inv.gamma()), (0.5, -2.0));
        let id = compose(&inv, &p).unwrap();
        assert_eq!((id.lambda(), id.gamma()), (1.0, 0.0));

        let p = GaugeParams::principal(1.0, 0.8).unwrap();
        let inv = inverse(&p).unwrap();
        assert_eq!((inv.lambda(), inv.gamma()), (1.0, -0.8));

        let conj = GaugeParams::principal(-1.0, 0.0).unwrap();
        let inv = inverse(&conj).unwrap();
        assert_eq!((inv.lambda(), inv.gamma()), (-1.0, 0.0));

        assert_eq!(
            inverse(&GaugeParams::principal(0.5, 0.0).unwrap()),
            Err(Error::NotInvertible("principal"))
        );
        assert_eq!(
            inverse(&GaugeParams::integer(2, 0.0).unwrap()),
            Err(Error::NotInvertible("integer"))
        );
    }

    #[test]
    fn pointwise_examples() {
        let z = Complex64::cis(3.0 * PI / 4.0);
        let out = principal_map(1.5, 0.0, z);
        assert!(close(principal_arg(out), -7.0 * PI / 8.0));

        let id = GaugeParams::identity(GaugeClass::Principal);
        let w = Complex64::new(0.3, -1.7);
        assert_eq!(apply_pointwise(&id, w).unwrap(), w);

        let conj = GaugeParams::principal(-1.0, 0.0).unwrap();
        assert_eq!(
            apply_pointwise(&conj, Complex64::new(1.0, 2.0)).unwrap(),
            Complex64::new(1.0, -2.0)
        );

        let p = GaugeParams::principal(1.0, PI / 2.0).unwrap();
        let out = apply_pointwise(&p, Complex64::new(1f64.exp(), 0.0)).unwrap();
        assert!((out - Complex64::new(0.0, 1f64.exp())).norm() < 1e-15);

        assert!(matches!(
            apply_pointwise(&p, Complex64::new(0.0, 0.0)),
            Err(Error::BelowFloor { .. })
        ));
        let u = GaugeParams::unrestricted(1.5, 0.0).unwrap();
        assert!(matches!(
            apply_pointwise(&u, z),
            Err(Error::WrongClass { .. })
        ));
    }

    fn smooth_field(seed: u64) -> ComplexField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a1, a2, k, c): (f64, f64, f64, f64) =
            (rng.gen_range(0.1..0.4), rng.gen_range(0.1..0.4), rng.gen_range(-1.0..1.0), rng.gen_range(-0.5..0.5));
        let g = make_grid(128, -3.0, 3.0, Boundary::Dirichlet).unwrap();
        ComplexField::from_fn(g, |x| {
            Complex64::from_polar((a1 * (1.3 * x).sin() + a2 * x.cos()).exp(), 0.4 * k * x + c)
        })
        .unwrap()
    }

    #[test]
    fn field_modulus_invariance() {
        let psi = smooth_field(1);
        let p = GaugeParams::integer(-3, 2.2).unwrap();
        let out = apply_field(&p, &psi, DEFAULT_FLOOR_REL).unwrap();
        for (a, b) in psi.values().iter().zip(out.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-14 * a.norm());
        }
        let id = GaugeParams::identity(GaugeClass::Integer);
        assert_eq!(apply_field(&id, &psi, DEFAULT_FLOOR_REL).unwrap(), psi);
    }

    #[test]
    fn field_semigroup_within_principal_class() {
        let psi = smooth_field(2);
        let p1 = GaugeParams::principal(0.5, 0.3).unwrap();
        let p2 = GaugeParams::principal(0.5, -0.1).unwrap();
        let c = compose(&p2, &p1).unwrap();
        assert_eq!(c.lambda(), 0.25);
        assert!(close(c.gamma(), 0.05));
        assert!(psi.values().iter().all(|&z| p1.keeps_phase_principal(z)));
        let seq = apply_field(&p2, &apply_field(&p1, &psi, 1e-12).unwrap(), 1e-12).unwrap();
        let dir = apply_field(&c, &psi, 1e-12).unwrap();
        for (a, b) in seq.values().iter().zip(dir.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn principal_law_breaks_when_inner_phase_wraps() {
        // gamma ln|z| pushes the inner phase past pi, so the outer half-power
        // sees a phase shifted by -2pi.
        let z = Complex64::from_polar(5.0, 2.5);
        let p1 = GaugeParams::principal(1.0, 1.0).unwrap();
        let p2 = GaugeParams::principal(0.5, 0.0).unwrap();
        assert!(!p1.keeps_phase_principal(z));
        let seq = apply_pointwise(&p2, apply_pointwise(&p1, z).unwrap()).unwrap();
        let dir = apply_pointwise(&compose(&p2, &p1).unwrap(), z).unwrap();
        assert!((seq - dir).norm() > 1.0);
    }

    #[test]
    fn field_floor_handling() {
        let g = make_grid(8, 0.0, 1.0, Boundary::Dirichlet).unwrap();
        let mut vals = vec![Complex64::new(1.0, 1.0); 8];
        vals[2] = Complex64::new(0.0, 0.0);
        vals[5] = Complex64::new(1e-20, -1e-20);
        let psi = ComplexField::new(g, vals).unwrap();
        let p = GaugeParams::principal(0.5, 2.0).unwrap();
        let out = apply_field(&p, &psi, 1e-12).unwrap();
        assert_eq!(out.values()[2], Complex64::new(0.0, 0.0));
        assert!((out.values()[5].norm() - psi.values()[5].norm()).abs() < 1e-30);
        assert_eq!(
            floor_mask(&psi, 1e-12),
            vec![false, false, true, false, false, true, false, false]
        );
        assert_eq!(
            apply_field(&p, &ComplexField::zeros(g), 1e-12),
            Err(Error::AllZeroField)
        );
    }

    #[test]
    fn branched_counterexample_values() {
        let p = GaugeParams::unrestricted(1.5, 0.0).unwrap();
        let v = BranchedValue::new(1.0, 3.0 * PI / 4.0, 0).unwrap();
        let once = apply_branched(&p, &v).unwrap();
        assert!(close(once.arg(), -7.0 * PI / 8.0));
        assert_eq!(once.branch(), 1);
        let twice = apply_branched(&p, &once).unwrap();
        assert!(close(twice.arg(), -5.0 * PI / 16.0));
        assert_eq!(twice.branch(), 1);
        let direct = apply_branched(&compose(&p, &p).unwrap(), &v).unwrap();
        assert!(close(direct.arg(), -5.0 * PI / 16.0));
        assert_eq!(direct.branch(), 1);
    }

    #[test]
    fn branched_identity_and_inverse() {
        let id = GaugeParams::identity(GaugeClass::Unrestricted);
        let v = BranchedValue::new(0.7, -2.9, -4).unwrap();
        let same = apply_branched(&id, &v).unwrap();
        assert_eq!(same.branch(), v.branch());
        assert!(close(same.arg(), v.arg()));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let p = GaugeParams::unrestricted(
                rng.gen_range(0.2..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
                rng.gen_range(-3.0..3.0),
            )
            .unwrap();
            let v = BranchedValue::new(
                rng.gen_range(0.01..10.0),
                rng.gen_range(-3.1..3.1),
                rng.gen_range(-5..5),
            )
            .unwrap();
            let back = apply_branched(&inverse(&p).unwrap(), &apply_branched(&p, &v).unwrap()).unwrap();
            assert_eq!(back.branch(), v.branch());
            assert!((back.arg() - v.arg()).abs() < 1e-12);
            assert_eq!(back.modulus(), v.modulus());
        }
    }

    #[test]
    fn branched_rejects_bad_input() {
        assert!(BranchedValue::new(1.0, -PI, 0).is_err());
        assert!(BranchedValue::new(1.0, PI, 0).is_ok());
        let p = GaugeParams::unrestricted(2.0, 0.0).unwrap();
        let zero = BranchedValue::new(0.0, 0.0, 0).unwrap();
        assert!(matches!(apply_branched(&p, &zero), Err(Error::BelowFloor { .. })));
        let q = GaugeParams::integer(2, 0.0).unwrap();
        assert!(matches!(
            apply_branched(&q, &BranchedValue::new(1.0, 0.0, 0).unwrap()),
            Err(Error::WrongClass { .. })
        ));
    }

    #[test]
    fn split_phase_edges() {
        assert_eq!(split_phase(PI), (PI, 0));
        let (a, n) = split_phase(-PI);
        assert!(close(a, PI));
        assert_eq!(n, -1);
        let (a, n) = split_phase(3.0 * PI);
        assert!(close(a, PI));
        assert_eq!(n, 1);
    }

    #[test]
    fn hydro_matrix_action() {
        let g = make_grid(8, 0.0, 1.0, Boundary::Dirichlet).unwrap();
        let h = HydroField::new(
            RealField::from_fn(g, |_| 1.0).unwrap(),
            RealField::from_fn(g, |_| 2.0).unwrap(),
            vec![false; 8],
        )
        .unwrap();
        let p = GaugeParams::unrestricted(2.0, 3.0).unwrap();
        let out = apply_hydro(&p, &h).unwrap();
        assert!(out.log_amplitude().values().iter().all(|&a| a == 1.0));
        assert!(out.phase().values().iter().all(|&b| b == 7.0));
        let id = GaugeParams::identity(GaugeClass::Unrestricted);
        assert_eq!(apply_hydro(&id, &h).unwrap(), h);
        assert!(apply_hydro(&GaugeParams::integer(2, 0.0).unwrap(), &h).is_err());
    }

    #[test]
    fn branched_agrees_with_hydro() {
        let psi = smooth_field(3);
        let h = decompose(&psi, DEFAULT_FLOOR_REL).unwrap();
        let p = GaugeParams::unrestricted(2.7, -1.3).unwrap();
        let via_hydro = reconstruct(&apply_hydro(&p, &h).unwrap());
        for (v, z) in branched_from_hydro(&h).iter().zip(via_hydro.values()) {
            let w = apply_branched(&p, v).unwrap().to_complex();
            assert!((w - z).norm() < 1e-12 * z.norm());
        }
    }

    #[test]
    fn conjugation_is_exact_through_hydro() {
        let psi = smooth_field(4);
        let h = decompose(&psi, DEFAULT_FLOOR_REL).unwrap();
        let c = GaugeParams::unrestricted(-1.0, 0.0).unwrap();
        assert_eq!(
            reconstruct(&apply_hydro(&c, &h).unwrap()),
            reconstruct(&h).conj()
        );
    }

    #[test]
    fn counterexample_three_halves() {
        let r = counterexample_report(1.5, 0.0, &[PI / 4.0, 3.0 * PI / 4.0]);
        assert_eq!(r.class, GaugeClass::Unrestricted);
        let p1 = r.points[0];
        assert!(p1.equal);
        assert!(close(p1.arg_double, 9.0 * PI / 16.0));
        assert!(close(p1.arg_direct, 9.0 * PI / 16.0));
        let p2 = r.points[1];
        assert!(!p2.equal);
        assert!(close(p2.arg_single, -7.0 * PI / 8.0));
        assert!(close(p2.arg_double, 11.0 * PI / 16.0));
        assert!(close(p2.arg_direct, -5.0 * PI / 16.0));
        assert!(close(r.max_deviation, PI));
    }

    #[test]
    fn counterexample_trivial_and_integer() {
        assert!(counterexample_report(1.5, 0.0, &[0.0]).all_equal());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let args: Vec<f64> = (0..1000).map(|_| rng.gen_range(-PI..PI)).collect();
        let r = counterexample_report(2.0, 0.0, &args);
        assert_eq!(r.class, GaugeClass::Integer);
        assert!(r.all_equal(), "max deviation {}", r.max_deviation);
    }
}

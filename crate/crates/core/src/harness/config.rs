//! Flat `key = value` configuration with a per-experiment schema.
//!
//! Resolution order, later wins: schema defaults, config file, `--set` flags.
//! Unknown keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown experiment `{0}` (see `ngt list`)")]
    UnknownExperiment(String),
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{key}` for experiment `{experiment}`")]
    UnknownKey { key: String, experiment: String },
    #[error("key `{key}`: expected {expected}, got `{value}`")]
    TypeError {
        key: String,
        expected: &'static str,
        value: String,
    },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("key `{0}` given twice in the same source")]
    Duplicate(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Counterexample,
    SemigroupSweep,
    HydroGroup,
    GaugeEquivalence,
    Convexity,
    Hermiticity,
    DensityDiagonal,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::Counterexample,
        Experiment::SemigroupSweep,
        Experiment::HydroGroup,
        Experiment::GaugeEquivalence,
        Experiment::Convexity,
        Experiment::Hermiticity,
        Experiment::DensityDiagonal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Counterexample => "counterexample",
            Experiment::SemigroupSweep => "semigroup_sweep",
            Experiment::HydroGroup => "hydro_group",
            Experiment::GaugeEquivalence => "gauge_equivalence",
            Experiment::Convexity => "convexity",
            Experiment::Hermiticity => "hermiticity",
            Experiment::DensityDiagonal => "density_diagonal",
        }
    }

    /// One-line statement of what the experiment demonstrates.
    pub fn claim(self) -> &'static str {
        match self {
            Experiment::Counterexample => {
                "with lambda = 3/2 and the principal argument, applying N twice differs from N_{9/4,0} once the phase leaves (-pi, pi]"
            }
            Experiment::SemigroupSweep => {
                "principal-class and integer-class maps compose as N_{l',g'} N_{l,g} = N_{l'l, l'g+g'} and keep |psi|"
            }
            Experiment::HydroGroup => {
                "on (ln|psi|, unwrapped phase) the maps form the affine group, with inverses and N_{-1,0} = conjugation"
            }
            Experiment::GaugeEquivalence => {
                "N_{1,gamma(t)} of a linear solution satisfies the Doebner-Goldin equation, log term included, with second-order residual convergence"
            }
            Experiment::Convexity => {
                "the gauge map of a mixture equals the mixture of gauge maps on the diagonal only"
            }
            Experiment::Hermiticity => "a complex gamma keeps the diagonal but breaks Hermiticity",
            Experiment::DensityDiagonal => {
                "the density-matrix map leaves rho(x, x) invariant for every (lambda, complex gamma), and keeps Hermiticity iff gamma is real"
            }
        }
    }

    pub fn schema(self) -> &'static [KeySpec] {
        match self {
            Experiment::Counterexample => COUNTEREXAMPLE,
            Experiment::SemigroupSweep => SEMIGROUP,
            Experiment::HydroGroup => HYDRO,
            Experiment::GaugeEquivalence => EQUIVALENCE,
            Experiment::Convexity => CONVEXITY,
            Experiment::Hermiticity => HERMITICITY,
            Experiment::DensityDiagonal => DENSITY,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s.trim())
            .ok_or_else(|| ConfigError::UnknownExperiment(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyType {
    Float,
    /// Nonnegative integer.
    Count,
    Bool,
    FloatList,
    NameList,
}

impl KeyType {
    pub fn as_str(self) -> &'static str {
        match self {
            KeyType::Float => "float",
            KeyType::Count => "unsigned integer",
            KeyType::Bool => "bool",
            KeyType::FloatList => "comma-separated floats",
            KeyType::NameList => "comma-separated names",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub key: &'static str,
    pub ty: KeyType,
    /// `None` marks a required key.
    pub default: Option<&'static str>,
    pub doc: &'static str,
}

const fn key(key: &'static str, ty: KeyType, default: &'static str, doc: &'static str) -> KeySpec {
    KeySpec {
        key,
        ty,
        default: Some(default),
        doc,
    }
}

use KeyType::*;

const COUNTEREXAMPLE: &[KeySpec] = &[
    key("lambda", Float, "1.5", "gauge parameter lambda"),
    key("gamma", Float, "0", "gauge parameter gamma"),
    key("args_over_pi", FloatList, "0.25,0.75", "test arguments, in units of pi"),
];

const SEMIGROUP: &[KeySpec] = &[
    key("seed", Count, "20240601", "RNG seed"),
    key("pairs", Count, "100", "parameter pairs per class"),
    key("fields", Count, "10", "random fields"),
    key("n_points", Count, "256", "grid points"),
    key("x_min", Float, "-5", "left grid edge"),
    key("x_max", Float, "5", "right grid edge"),
    key("phase_amplitude", Float, "1.2", "max |arg psi| of the random fields"),
    key("log_amplitude", Float, "1", "max |ln|psi|| of the random fields"),
    key("gamma_max", Float, "1", "gamma drawn from [-gamma_max, gamma_max]"),
    key("integer_lambda_max", Count, "3", "integer lambda drawn from +-[1, integer_lambda_max]"),
];

const HYDRO: &[KeySpec] = &[
    key("seed", Count, "20240602", "RNG seed"),
    key("pairs", Count, "100", "parameter pairs"),
    key("n_points", Count, "256", "grid points"),
    key("x_min", Float, "-5", "left grid edge"),
    key("x_max", Float, "5", "right grid edge"),
    key("lambda_min", Float, "0.25", "|lambda| drawn from [lambda_min, lambda_max]"),
    key("lambda_max", Float, "3", "|lambda| drawn from [lambda_min, lambda_max]"),
    key("gamma_max", Float, "2", "gamma drawn from [-gamma_max, gamma_max]"),
    key("phase_amplitude", Float, "8", "max |B| of the random hydrodynamic fields"),
    key("log_amplitude", Float, "1", "max |A| of the random hydrodynamic fields"),
];

const EQUIVALENCE: &[KeySpec] = &[
    key("potentials", NameList, "free,harmonic", "potentials to study (free, harmonic)"),
    key("omega", Float, "1", "harmonic frequency"),
    key("gammas", FloatList, "0.5,1", "gamma0 values"),
    key("gamma_rates", FloatList, "0,0.3", "gamma rates (nonzero activates the log term)"),
    key("n_points", Count, "512", "grid points at the coarse level"),
    key("dt", Float, "2e-4", "time step at the coarse level"),
    key("steps", Count, "2000", "time steps at the coarse level"),
    key("refine", Bool, "true", "also run with dx and dt halved"),
    key("free_half_width", Float, "12", "free box is [-w, w]"),
    key("free_center", Float, "0", "free packet center"),
    key("free_sigma", Float, "1.5", "free packet width, psi ~ exp(-(x-c)^2 / 2 sigma^2)"),
    key("harmonic_half_width", Float, "8.5", "harmonic box is [-w, w]"),
    key("harmonic_center", Float, "1", "harmonic packet center"),
    key("harmonic_sigma", Float, "1", "harmonic packet width"),
    key("momentum", Float, "1", "packet momentum"),
    key("clearance_sigmas", Float, "10", "required distance from the packet to the walls, in standard deviations of |psi|^2"),
    key("hbar", Float, "1", "reduced Planck constant"),
    key("mass", Float, "1", "particle mass"),
];

const CONVEXITY: &[KeySpec] = &[
    key("n_points", Count, "128", "grid points"),
    key("x_min", Float, "-8", "left grid edge"),
    key("x_max", Float, "8", "right grid edge"),
    key("center1", Float, "-1.5", "first Gaussian center"),
    key("center2", Float, "1.5", "second Gaussian center"),
    key("sigma", Float, "1", "Gaussian width"),
    key("momentum1", Float, "0.5", "first Gaussian momentum"),
    key("momentum2", Float, "-0.5", "second Gaussian momentum"),
    key("p1", Float, "0.5", "weight of the first state"),
    key("p2", Float, "0.5", "weight of the second state"),
    key("lambda", Float, "1", "gauge parameter lambda"),
    key("gamma", Float, "1", "gauge parameter gamma"),
];

const HERMITICITY: &[KeySpec] = &[
    key("n_points", Count, "128", "grid points"),
    key("x_min", Float, "-8", "left grid edge"),
    key("x_max", Float, "8", "right grid edge"),
    key("center", Float, "1", "witness Gaussian center"),
    key("sigma", Float, "1", "witness Gaussian width"),
    key("lambda", Float, "1", "gauge parameter lambda"),
    key("gamma_re", Float, "0", "real part of the complex gamma"),
    key("gamma_im", Float, "1", "imaginary part of the complex gamma"),
];

const DENSITY: &[KeySpec] = &[
    key("seed", Count, "20240603", "RNG seed"),
    key("draws", Count, "50", "random (lambda, gamma) draws"),
    key("n_points", Count, "96", "grid points"),
    key("x_min", Float, "-6", "left grid edge"),
    key("x_max", Float, "6", "right grid edge"),
    key("lambda_max", Float, "3", "|lambda| drawn from [0.1, lambda_max]"),
    key("gamma_max", Float, "2", "real and imaginary parts of gamma drawn from [-gamma_max, gamma_max]"),
    key("witness_center", Float, "1", "center of the asymmetric Gaussian witness"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Count(u64),
    Bool(bool),
    FloatList(Vec<f64>),
    NameList(Vec<String>),
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Float(v) => v.serialize(s),
            Value::Count(v) => v.serialize(s),
            Value::Bool(v) => v.serialize(s),
            Value::FloatList(v) => v.serialize(s),
            Value::NameList(v) => v.serialize(s),
        }
    }
}

fn parse_value(spec: &KeySpec, raw: &str) -> Result<Value, ConfigError> {
    let raw = raw.trim();
    let bad = || ConfigError::TypeError {
        key: spec.key.to_string(),
        expected: spec.ty.as_str(),
        value: raw.to_string(),
    };
    let float = |s: &str| s.trim().parse::<f64>().ok().filter(|v| v.is_finite());
    match spec.ty {
        KeyType::Float => float(raw).map(Value::Float).ok_or_else(bad),
        KeyType::Count => raw.parse::<u64>().map(Value::Count).map_err(|_| bad()),
        KeyType::Bool => raw.parse::<bool>().map(Value::Bool).map_err(|_| bad()),
        KeyType::FloatList => raw
            .split(',')
            .map(float)
            .collect::<Option<Vec<_>>>()
            .map(Value::FloatList)
            .ok_or_else(bad),
        KeyType::NameList => {
            let names: Vec<String> = raw.split(',').map(|s| s.trim().to_string()).collect();
            if names.iter().any(|n| n.is_empty()) {
                Err(bad())
            } else {
                Ok(Value::NameList(names))
            }
        }
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: k + 1,
            msg: format!("expected `key = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: k + 1,
                msg: "empty key".into(),
            });
        }
        if pairs.iter().any(|(k, _)| k == key) {
            return Err(ConfigError::Duplicate(key.to_string()));
        }
        pairs.push((key.to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

/// Parses one `--set key=value` flag.
pub fn parse_flag(flag: &str) -> Result<(String, String), ConfigError> {
    let (k, v) = flag.split_once('=').ok_or_else(|| ConfigError::Syntax {
        line: 0,
        msg: format!("--set expects key=value, got `{flag}`"),
    })?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

/// A validated configuration with every schema key present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedConfig {
    pub experiment: Experiment,
    pub values: BTreeMap<&'static str, Value>,
}

impl Serialize for Experiment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl ResolvedConfig {
    fn get(&self, key: &str) -> &Value {
        self.values
            .get(key)
            .unwrap_or_else(|| panic!("key `{key}` is not in the {} schema", self.experiment))
    }

    pub fn float(&self, key: &str) -> f64 {
        match self.get(key) {
            Value::Float(v) => *v,
            other => panic!("key `{key}` is {other:?}, not a float"),
        }
    }

    pub fn count(&self, key: &str) -> u64 {
        match self.get(key) {
            Value::Count(v) => *v,
            other => panic!("key `{key}` is {other:?}, not a count"),
        }
    }

    pub fn usize(&self, key: &str) -> usize {
        self.count(key) as usize
    }

    pub fn flag(&self, key: &str) -> bool {
        match self.get(key) {
            Value::Bool(v) => *v,
            other => panic!("key `{key}` is {other:?}, not a bool"),
        }
    }

    pub fn floats(&self, key: &str) -> &[f64] {
        match self.get(key) {
            Value::FloatList(v) => v,
            other => panic!("key `{key}` is {other:?}, not a float list"),
        }
    }

    pub fn names(&self, key: &str) -> &[String] {
        match self.get(key) {
            Value::NameList(v) => v,
            other => panic!("key `{key}` is {other:?}, not a name list"),
        }
    }
}

/// Builds the configuration for `experiment` from file pairs and flag pairs.
///
/// An `experiment` key is accepted in either source and must agree with the
/// experiment being resolved.
pub fn resolve(
    experiment: Experiment,
    file: &[(String, String)],
    flags: &[(String, String)],
) -> Result<ResolvedConfig, ConfigError> {
    let schema = experiment.schema();
    let mut raw: BTreeMap<&'static str, String> = BTreeMap::new();
    for spec in schema {
        if let Some(d) = spec.default {
            raw.insert(spec.key, d.to_string());
        }
    }
    for source in [file, flags] {
        let mut seen = Vec::new();
        for (k, v) in source {
            if seen.contains(k) {
                return Err(ConfigError::Duplicate(k.clone()));
            }
            seen.push(k.clone());
            if k == "experiment" {
                continue;
            }
            let spec = schema
                .iter()
                .find(|s| s.key == k)
                .ok_or_else(|| ConfigError::UnknownKey {
                    key: k.clone(),
                    experiment: experiment.to_string(),
                })?;
            if v.is_empty() {
                return Err(ConfigError::MissingKey(k.clone()));
            }
            raw.insert(spec.key, v.clone());
        }
    }
    let mut values = BTreeMap::new();
    for spec in schema {
        let text = raw
            .get(spec.key)
            .ok_or_else(|| ConfigError::MissingKey(spec.key.to_string()))?;
        values.insert(spec.key, parse_value(spec, text)?);
    }
    Ok(ResolvedConfig { experiment, values })
}

/// Picks the experiment from the flag, falling back to an `experiment` key in
/// the file. A flag that disagrees with the file wins.
pub fn select_experiment(flag: Option<&str>, file: &[(String, String)]) -> Result<Experiment, ConfigError> {
    match flag {
        Some(name) => name.parse(),
        None => file
            .iter()
            .find(|(k, _)| k == "experiment")
            .ok_or_else(|| ConfigError::MissingKey("experiment".into()))?
            .1
            .parse(),
    }
}

/// Text block listing every experiment's keys, types and defaults.
pub fn schema_help() -> String {
    let mut out = String::from("Configuration keys (file `key = value` lines, overridden by --set):\n");
    for e in Experiment::ALL {
        out.push_str(&format!("\n  {}:\n", e.as_str()));
        for s in e.schema() {
            out.push_str(&format!(
                "    {:<20} {:<22} default {:<14} {}\n",
                s.key,
                s.ty.as_str(),
                s.default.unwrap_or("(required)"),
                s.doc
            ));
        }
    }
    out
}

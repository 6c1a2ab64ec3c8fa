//! The named experiments. Each returns its checks, a JSON results block and
//! CSV artifacts; nothing here touches the filesystem.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use super::config::{Experiment, ResolvedConfig};
use super::report::Check;
use super::HarnessError;
use crate::density::{
    apply_density, convexity_report, diagonal_deviation, hermiticity_deviation, mix, projector_from,
    ComplexGaugeParams, DensityMatrix,
};
use crate::gauge::{
    apply_branched, apply_field, apply_hydro, branched_from_hydro, compose, counterexample_report, inverse,
    GaugeClass, GaugeParams, PHASE_EQUAL_TOL,
};
use crate::grid::{make_grid, reconstruct, Boundary, ComplexField, GridSpec, HydroField, RealField, DEFAULT_FLOOR_REL};
use crate::io::{write_density_csv, write_residual_csv};
use crate::residual::{residual, GammaSchedule, ResidualReport};
use crate::schrodinger::{
    evolve, gaussian_packet, mean_position, position_variance, EvolutionConfig, PhysicalConstants, Potential,
    Trajectory,
};
use crate::thresholds::*;

pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

pub struct Outcome {
    pub checks: Vec<Check>,
    pub results: Json,
    pub artifacts: Vec<Artifact>,
}

type Res<T> = std::result::Result<T, HarnessError>;

pub fn execute(cfg: &ResolvedConfig) -> Res<Outcome> {
    match cfg.experiment {
        Experiment::Counterexample => counterexample(cfg),
        Experiment::SemigroupSweep => semigroup_sweep(cfg),
        Experiment::HydroGroup => hydro_group(cfg),
        Experiment::GaugeEquivalence => gauge_equivalence(cfg),
        Experiment::Convexity => convexity(cfg),
        Experiment::Hermiticity => hermiticity(cfg),
        Experiment::DensityDiagonal => density_diagonal(cfg),
    }
}

/// Wall-clock limit checked in the report's `run` block.
pub fn time_limit(e: Experiment) -> Option<f64> {
    match e {
        Experiment::Counterexample => Some(COUNTEREXAMPLE_MAX_SECS),
        Experiment::SemigroupSweep => Some(SEMIGROUP_MAX_SECS),
        Experiment::GaugeEquivalence => Some(EQUIVALENCE_MAX_SECS),
        _ => None,
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> Vec<u8> {
    let mut s = String::from(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s.into_bytes()
}

fn counterexample(cfg: &ResolvedConfig) -> Res<Outcome> {
    let lambda = cfg.float("lambda");
    let gamma = cfg.float("gamma");
    let args: Vec<f64> = cfg.floats("args_over_pi").iter().map(|a| a * PI).collect();
    // Validates lambda; the report itself always uses the principal branch.
    GaugeParams::new(lambda, gamma, GaugeClass::Unrestricted)?;
    let report = counterexample_report(lambda, gamma, &args);

    let mut checks = Vec::new();
    let mut points = Vec::new();
    for (k, p) in report.points.iter().enumerate() {
        // The single application wraps by 2 pi w; the second application
        // turns that into 2 pi w lambda, harmless only for integer w lambda.
        let wrap = ((lambda * p.arg_in - p.arg_single) / (2.0 * PI)).round();
        let predicted_equal = (wrap * lambda).fract() == 0.0;
        let deviation = crate::grid::wrap_angle(p.arg_double - p.arg_direct).abs();
        checks.push(if predicted_equal {
            Check::less(format!("point{k}_double_equals_direct"), deviation, PHASE_EQUAL_TOL)
        } else {
            Check::greater(format!("point{k}_double_differs_from_direct"), deviation, PHASE_EQUAL_TOL)
        });
        points.push(json!({
            "arg_over_pi": p.arg_in / PI,
            "single_over_pi": p.arg_single / PI,
            "double_over_pi": p.arg_double / PI,
            "direct_over_pi": p.arg_direct / PI,
            "wrap": wrap,
            "predicted_equal": predicted_equal,
            "equal": p.equal,
        }));
    }
    let rows = report.points.iter().map(|p| {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{}",
            p.arg_in, p.arg_single, p.arg_double, p.arg_direct, p.equal
        )
    });
    Ok(Outcome {
        checks,
        results: json!({
            "lambda": lambda,
            "gamma": gamma,
            "direct_lambda": lambda * lambda,
            "direct_gamma": lambda * gamma + gamma,
            "max_deviation": report.max_deviation,
            "points": points,
        }),
        artifacts: vec![Artifact {
            name: "points.csv".into(),
            bytes: csv("arg_in,arg_single,arg_double,arg_direct,equal", rows),
        }],
    })
}

/// Smooth real profile bounded by `amplitude`: a normalized sum of three
/// random sinusoids.
fn smooth_profile(grid: &GridSpec, rng: &mut ChaCha8Rng, amplitude: f64) -> RealField {
    let terms: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.2..1.5), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let total: f64 = terms.iter().map(|t| t.0.abs()).sum::<f64>().max(f64::MIN_POSITIVE);
    let values = grid
        .coordinates()
        .iter()
        .map(|&x| amplitude * terms.iter().map(|(a, w, p)| a * (w * x + p).sin()).sum::<f64>() / total)
        .collect();
    RealField::new(*grid, values).expect("finite profile")
}

fn random_field(grid: &GridSpec, rng: &mut ChaCha8Rng, log_amp: f64, phase_amp: f64) -> ComplexField {
    let a = smooth_profile(grid, rng, log_amp);
    let b = smooth_profile(grid, rng, phase_amp);
    a.zip_with(&b, |a, b| Complex64::from_polar(a.exp(), b)).expect("same grid")
}

fn modulus_change(before: &ComplexField, after: &ComplexField) -> f64 {
    before
        .values()
        .iter()
        .zip(after.values())
        .map(|(a, b)| (b.norm() - a.norm()).abs() / a.norm())
        .fold(0.0, f64::max)
}

fn max_diff(a: &ComplexField, b: &ComplexField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn semigroup_sweep(cfg: &ResolvedConfig) -> Res<Outcome> {
    let grid = make_grid(cfg.usize("n_points"), cfg.float("x_min"), cfg.float("x_max"), Boundary::Dirichlet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.count("seed"));
    let (log_amp, phase_amp) = (cfg.float("log_amplitude"), cfg.float("phase_amplitude"));
    let gamma_max = cfg.float("gamma_max");
    let int_max = cfg.count("integer_lambda_max").max(1) as i64;
    let fields: Vec<ComplexField> = (0..cfg.usize("fields"))
        .map(|_| random_field(&grid, &mut rng, log_amp, phase_amp))
        .collect();
    if fields.is_empty() {
        return Err(crate::Error::InvalidParameter("fields must be positive".into()).into());
    }

    let draw_gamma = |rng: &mut ChaCha8Rng| if gamma_max > 0.0 { rng.gen_range(-gamma_max..=gamma_max) } else { 0.0 };
    let mut pairs = Vec::new();
    for _ in 0..cfg.usize("pairs") {
        let mut principal = || -> Res<GaugeParams> {
            let mut l: f64 = 0.0;
            while l.abs() < 1e-3 {
                l = rng.gen_range(-1.0..=1.0);
            }
            let g = draw_gamma(&mut rng);
            Ok(GaugeParams::principal(l, g)?)
        };
        pairs.push((principal()?, principal()?));
    }
    for _ in 0..cfg.usize("pairs") {
        let mut integer = || -> Res<GaugeParams> {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let l = sign * rng.gen_range(1..=int_max);
            let g = draw_gamma(&mut rng);
            Ok(GaugeParams::integer(l, g)?)
        };
        pairs.push((integer()?, integer()?));
    }

    struct PairResult {
        deviation: f64,
        modulus: f64,
        domain_violations: usize,
    }
    let per_pair = pairs
        .par_iter()
        .map(|(inner, outer)| -> Res<PairResult> {
            let composed = compose(outer, inner)?;
            let mut r = PairResult {
                deviation: 0.0,
                modulus: 0.0,
                domain_violations: 0,
            };
            for psi in &fields {
                if inner.class() == GaugeClass::Principal {
                    r.domain_violations += psi.values().iter().filter(|&&z| !inner.keeps_phase_principal(z)).count();
                }
                let once = apply_field(inner, psi, DEFAULT_FLOOR_REL)?;
                let seq = apply_field(outer, &once, DEFAULT_FLOOR_REL)?;
                let direct = apply_field(&composed, psi, DEFAULT_FLOOR_REL)?;
                r.deviation = r.deviation.max(max_diff(&seq, &direct));
                r.modulus = r
                    .modulus
                    .max(modulus_change(psi, &once))
                    .max(modulus_change(psi, &seq))
                    .max(modulus_change(psi, &direct));
            }
            Ok(r)
        })
        .collect::<Res<Vec<_>>>()?;

    let summarize = |class: GaugeClass| {
        let idx: Vec<usize> = (0..pairs.len()).filter(|&k| pairs[k].0.class() == class).collect();
        let dev = idx.iter().map(|&k| per_pair[k].deviation).fold(0.0, f64::max);
        let modulus = idx.iter().map(|&k| per_pair[k].modulus).fold(0.0, f64::max);
        let viol: usize = idx.iter().map(|&k| per_pair[k].domain_violations).sum();
        (idx.len(), dev, modulus, viol)
    };
    let (np, dev_p, mod_p, viol_p) = summarize(GaugeClass::Principal);
    let (ni, dev_i, mod_i, _) = summarize(GaugeClass::Integer);
    let checks = vec![
        Check::less("principal_max_deviation", dev_p, SEMIGROUP_TOL),
        Check::less("integer_max_deviation", dev_i, SEMIGROUP_TOL),
        Check::less("principal_domain_violations", viol_p as f64, 1.0),
        Check::less("max_relative_modulus_change", mod_p.max(mod_i), MODULUS_TOL),
    ];
    let rows = pairs.iter().zip(&per_pair).map(|((inner, outer), r)| {
        format!(
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            inner.class(),
            inner.lambda(),
            inner.gamma(),
            outer.lambda(),
            outer.gamma(),
            r.deviation,
            r.modulus
        )
    });
    Ok(Outcome {
        checks,
        results: json!({
            "fields": fields.len(),
            "n_points": grid.n_points(),
            "principal": {"pairs": np, "max_deviation": dev_p, "max_modulus_change": mod_p, "domain_violations": viol_p},
            "integer": {"pairs": ni, "max_deviation": dev_i, "max_modulus_change": mod_i},
        }),
        artifacts: vec![Artifact {
            name: "pairs.csv".into(),
            bytes: csv(
                "class,lambda_inner,gamma_inner,lambda_outer,gamma_outer,max_deviation,max_modulus_change",
                rows,
            ),
        }],
    })
}

fn max_abs_diff(a: &RealField, b: &RealField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn hydro_group(cfg: &ResolvedConfig) -> Res<Outcome> {
    let grid = make_grid(cfg.usize("n_points"), cfg.float("x_min"), cfg.float("x_max"), Boundary::Dirichlet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.count("seed"));
    let (lmin, lmax, gmax) = (cfg.float("lambda_min"), cfg.float("lambda_max"), cfg.float("gamma_max"));
    if !(lmin > 0.0 && lmax >= lmin) {
        return Err(crate::Error::InvalidParameter(format!("lambda range [{lmin}, {lmax}]")).into());
    }
    let draw = |rng: &mut ChaCha8Rng| -> Res<GaugeParams> {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let l = sign * rng.gen_range(lmin..=lmax);
        let g = if gmax > 0.0 { rng.gen_range(-gmax..=gmax) } else { 0.0 };
        Ok(GaugeParams::unrestricted(l, g)?)
    };
    let mut trials = Vec::new();
    for _ in 0..cfg.usize("pairs") {
        let a = smooth_profile(&grid, &mut rng, cfg.float("log_amplitude"));
        let b = smooth_profile(&grid, &mut rng, cfg.float("phase_amplitude"));
        let h = HydroField::new(a, b, vec![false; grid.n_points()])?;
        trials.push((draw(&mut rng)?, draw(&mut rng)?, h));
    }

    #[derive(Default)]
    struct Trial {
        composition: f64,
        inverse: f64,
        branched: f64,
        conjugation: f64,
        modulus: f64,
    }
    let conj_map = GaugeParams::unrestricted(-1.0, 0.0)?;
    let per_trial = trials
        .par_iter()
        .map(|(p, q, h)| -> Res<Trial> {
            let seq = apply_hydro(q, &apply_hydro(p, h)?)?;
            let direct = apply_hydro(&compose(q, p)?, h)?;
            let back = apply_hydro(&inverse(p)?, &apply_hydro(p, h)?)?;
            let mapped = apply_hydro(p, h)?;
            let branched = branched_from_hydro(h)
                .iter()
                .zip(mapped.phase().values())
                .map(|(v, &b)| apply_branched(p, v).map(|w| (w.total_phase() - b).abs()))
                .collect::<crate::Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let psi = reconstruct(h);
            let conj = reconstruct(&apply_hydro(&conj_map, h)?);
            let recon = reconstruct(&mapped);
            Ok(Trial {
                composition: max_abs_diff(seq.phase(), direct.phase())
                    .max(max_abs_diff(seq.log_amplitude(), direct.log_amplitude())),
                inverse: max_abs_diff(back.phase(), h.phase()).max(max_abs_diff(back.log_amplitude(), h.log_amplitude())),
                branched,
                conjugation: max_diff(&conj, &psi.conj()),
                modulus: modulus_change(&psi, &recon),
            })
        })
        .collect::<Res<Vec<_>>>()?;

    let worst = |f: fn(&Trial) -> f64| per_trial.iter().map(f).fold(0.0, f64::max);
    let (comp, inv, br, conj, modulus) = (
        worst(|t| t.composition),
        worst(|t| t.inverse),
        worst(|t| t.branched),
        worst(|t| t.conjugation),
        worst(|t| t.modulus),
    );
    let checks = vec![
        Check::less("composition_max_deviation", comp, HYDRO_GROUP_TOL),
        Check::less("inverse_round_trip_max_deviation", inv, HYDRO_GROUP_TOL),
        Check::less("branched_vs_hydro_max_deviation", br, HYDRO_GROUP_TOL),
        Check::exact("conjugation_max_deviation", conj),
        Check::less("max_relative_modulus_change", modulus, MODULUS_TOL),
    ];
    let rows = trials.iter().zip(&per_trial).map(|((p, q, _), t)| {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.lambda(),
            p.gamma(),
            q.lambda(),
            q.gamma(),
            t.composition,
            t.inverse,
            t.branched
        )
    });
    Ok(Outcome {
        checks,
        results: json!({
            "pairs": trials.len(),
            "composition_max_deviation": comp,
            "inverse_round_trip_max_deviation": inv,
            "branched_vs_hydro_max_deviation": br,
            "conjugation_max_deviation": conj,
            "max_relative_modulus_change": modulus,
        }),
        artifacts: vec![Artifact {
            name: "pairs.csv".into(),
            bytes: csv(
                "lambda_inner,gamma_inner,lambda_outer,gamma_outer,composition,inverse,branched",
                rows,
            ),
        }],
    })
}

/// Smallest distance from the packet mean to a wall, in standard deviations
/// of `|psi|^2`, over a trajectory.
fn clearance(traj: &Trajectory) -> f64 {
    traj.states()
        .par_iter()
        .map(|s| {
            let g = s.grid();
            let lo = g.x(0);
            let hi = g.x(g.n_points() - 1);
            let mean = mean_position(s);
            (mean - lo).min(hi - mean) / position_variance(s).sqrt()
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn gauge_equivalence(cfg: &ResolvedConfig) -> Res<Outcome> {
    let constants = PhysicalConstants::new(cfg.float("hbar"), cfg.float("mass"))?;
    let momentum = cfg.float("momentum");
    let refine = cfg.flag("refine");
    let required_clearance = cfg.float("clearance_sigmas");

    struct Setup {
        name: String,
        potential: Potential,
        grid: GridSpec,
        psi0: ComplexField,
    }
    let mut setups = Vec::new();
    for name in cfg.names("potentials") {
        let (potential, prefix) = match name.as_str() {
            "free" => (Potential::Free, "free"),
            "harmonic" => (
                Potential::Harmonic {
                    omega: cfg.float("omega"),
                },
                "harmonic",
            ),
            other => {
                return Err(super::ConfigError::TypeError {
                    key: "potentials".into(),
                    expected: "free or harmonic",
                    value: other.into(),
                }
                .into())
            }
        };
        let w = cfg.float(&format!("{prefix}_half_width"));
        let grid = make_grid(cfg.usize("n_points"), -w, w, Boundary::Dirichlet)?;
        let center = cfg.float(&format!("{prefix}_center"));
        let sigma = cfg.float(&format!("{prefix}_sigma"));
        let psi0 = gaussian_packet(&grid, center, sigma, momentum)?;
        setups.push(Setup {
            name: name.clone(),
            potential,
            grid,
            psi0,
        });
    }
    let coarse = EvolutionConfig::new(cfg.float("dt"), cfg.usize("steps"), constants)?;
    let mut levels = vec![coarse];
    if refine {
        levels.push(EvolutionConfig::new(coarse.dt / 2.0, coarse.steps * 2, constants)?);
    }

    // One linear trajectory per (potential, level), shared by every schedule.
    let jobs: Vec<(usize, usize)> = (0..setups.len()).flat_map(|s| (0..levels.len()).map(move |l| (s, l))).collect();
    let trajectories = jobs
        .par_iter()
        .map(|&(s, l)| -> Res<Trajectory> {
            let setup = &setups[s];
            let psi0 = if l == 0 {
                setup.psi0.clone()
            } else {
                let fine = setup.grid.refined();
                gaussian_packet(
                    &fine,
                    cfg.float(&format!("{}_center", setup.name)),
                    cfg.float(&format!("{}_sigma", setup.name)),
                    momentum,
                )?
            };
            Ok(evolve(&psi0, &setup.potential, &levels[l])?)
        })
        .collect::<Res<Vec<_>>>()?;

    let mut checks = Vec::new();
    let mut combos = Vec::new();
    let mut artifacts = Vec::new();
    for (s, setup) in setups.iter().enumerate() {
        let mut level_clearance = Vec::new();
        for l in 0..levels.len() {
            let c = clearance(&trajectories[s * levels.len() + l]);
            level_clearance.push(c);
            checks.push(Check::greater(
                format!("{}_n{}_clearance_sigmas", setup.name, trajectories[s * levels.len() + l].grid().map_or(0, |g| g.n_points())),
                c,
                required_clearance,
            ));
        }
        for &g in cfg.floats("gammas") {
            for &rate in cfg.floats("gamma_rates") {
                let schedule = GammaSchedule::new(g, rate)?;
                let reports = (0..levels.len())
                    .map(|l| residual(&trajectories[s * levels.len() + l], &setup.potential, &schedule, &constants))
                    .collect::<crate::Result<Vec<ResidualReport>>>()?;
                let tag = format!("{}_g{g}_r{rate}", setup.name);
                let mut report0 = reports[0].clone();
                if let Some(fine) = reports.get(1) {
                    report0 = report0.with_refinement(fine);
                }
                checks.push(Check::less(
                    format!("{tag}_max_relative_residual"),
                    report0.summary.max_relative_residual,
                    RESIDUAL_MAX_RELATIVE,
                ));
                if let Some(ratio) = report0.summary.refinement_ratio {
                    checks.push(Check::between(
                        format!("{tag}_refinement_ratio"),
                        ratio,
                        REFINEMENT_RATIO_MIN,
                        REFINEMENT_RATIO_MAX,
                    ));
                }
                let mut level_json = Vec::new();
                for (l, r) in reports.iter().enumerate() {
                    let n = trajectories[s * levels.len() + l].grid().map_or(0, |g| g.n_points());
                    let mut buf = Vec::new();
                    write_residual_csv(&mut buf, r)?;
                    artifacts.push(Artifact {
                        name: format!("residual_{tag}_n{n}.csv"),
                        bytes: buf,
                    });
                    level_json.push(json!({
                        "n_points": n,
                        "dt": levels[l].dt,
                        "steps": levels[l].steps,
                        "max_relative_residual": r.summary.max_relative_residual,
                        "max_masked_nodes": r.masked_nodes.iter().copied().max().unwrap_or(0),
                        "boundary_excluded": r.boundary_excluded,
                        "clearance_sigmas": level_clearance[l],
                    }));
                }
                combos.push(json!({
                    "potential": setup.name,
                    "gamma0": g,
                    "gamma_rate": rate,
                    "levels": level_json,
                    "summary": report0.summary,
                }));
            }
        }
    }
    Ok(Outcome {
        checks,
        results: json!({ "combinations": combos }),
        artifacts,
    })
}

fn density_artifacts(prefix: &str, rho: &DensityMatrix) -> Res<Vec<Artifact>> {
    let mut buf = Vec::new();
    let side = write_density_csv(&mut buf, rho, 1e-6 * rho.max_abs())?;
    let json = serde_json::to_vec_pretty(&side).map_err(std::io::Error::other)?;
    Ok(vec![
        Artifact {
            name: format!("{prefix}.csv"),
            bytes: buf,
        },
        Artifact {
            name: format!("{prefix}.json"),
            bytes: json,
        },
    ])
}

fn convexity(cfg: &ResolvedConfig) -> Res<Outcome> {
    let grid = make_grid(cfg.usize("n_points"), cfg.float("x_min"), cfg.float("x_max"), Boundary::Dirichlet)?;
    let sigma = cfg.float("sigma");
    let psi1 = gaussian_packet(&grid, cfg.float("center1"), sigma, cfg.float("momentum1"))?;
    let psi2 = gaussian_packet(&grid, cfg.float("center2"), sigma, cfg.float("momentum2"))?;
    let (rho1, rho2) = (projector_from(&psi1), projector_from(&psi2));
    let (p1, p2) = (cfg.float("p1"), cfg.float("p2"));
    let p = ComplexGaugeParams::real(cfg.float("lambda"), cfg.float("gamma"))?;
    let report = convexity_report(&rho1, &rho2, p1, p2, &p, DEFAULT_FLOOR_REL)?;

    let mixed = mix(&rho1, &rho2, p1, p2)?;
    let of_mix = apply_density(&p, &mixed, DEFAULT_FLOOR_REL)?;
    let mix_of = mix(
        &apply_density(&p, &rho1, DEFAULT_FLOOR_REL)?,
        &apply_density(&p, &rho2, DEFAULT_FLOOR_REL)?,
        p1,
        p2,
    )?;
    let mut artifacts = density_artifacts("gauge_of_mixture", &of_mix)?;
    artifacts.extend(density_artifacts("mixture_of_gauges", &mix_of)?);
    Ok(Outcome {
        checks: vec![
            Check::less("diag_gap", report.diag_gap, CONVEX_DIAG_TOL),
            Check::greater("offdiag_gap", report.offdiag_gap, CONVEX_OFFDIAG_MIN),
        ],
        results: json!({
            "diag_gap": report.diag_gap,
            "offdiag_gap": report.offdiag_gap,
            "masked_entries": of_mix.masked().len(),
            "max_abs": mixed.max_abs(),
        }),
        artifacts,
    })
}

fn hermiticity(cfg: &ResolvedConfig) -> Res<Outcome> {
    let grid = make_grid(cfg.usize("n_points"), cfg.float("x_min"), cfg.float("x_max"), Boundary::Dirichlet)?;
    let psi = gaussian_packet(&grid, cfg.float("center"), cfg.float("sigma"), 0.0)?;
    let rho = projector_from(&psi);
    let lambda = cfg.float("lambda");
    let (re, im) = (cfg.float("gamma_re"), cfg.float("gamma_im"));
    let witness = apply_density(&ComplexGaugeParams::new(lambda, Complex64::new(re, im))?, &rho, DEFAULT_FLOOR_REL)?;
    let control = apply_density(&ComplexGaugeParams::real(lambda, re)?, &rho, DEFAULT_FLOOR_REL)?;
    let (dev_w, dev_c) = (hermiticity_deviation(&witness), hermiticity_deviation(&control));
    let diag = diagonal_deviation(&rho, &witness)?.max(diagonal_deviation(&rho, &control)?);

    let mut checks = vec![
        Check::less("diagonal_deviation", diag, DIAGONAL_TOL),
        Check::less("real_gamma_hermiticity_deviation", dev_c, HERMITIAN_TOL),
    ];
    checks.push(if im == 0.0 {
        Check::less("witness_hermiticity_deviation", dev_w, HERMITIAN_TOL)
    } else {
        Check::greater("witness_hermiticity_deviation", dev_w, NON_HERMITIAN_MIN)
    });
    Ok(Outcome {
        checks,
        results: json!({
            "gamma": [re, im],
            "witness_hermiticity_deviation": dev_w,
            "real_gamma_hermiticity_deviation": dev_c,
            "diagonal_deviation": diag,
            "masked_entries": witness.masked().len(),
        }),
        artifacts: density_artifacts("witness", &witness)?,
    })
}

/// Smooth, asymmetric, branch-crossing state: a Gaussian envelope around a
/// random center times a random smooth complex factor.
fn random_state(grid: &GridSpec, rng: &mut ChaCha8Rng) -> ComplexField {
    let center = rng.gen_range(-1.0..1.0);
    let f = random_field(grid, rng, 0.5, 3.0);
    let env = gaussian_packet(grid, center, 1.0, 0.0).expect("valid packet");
    f.zip_with(&env, |a, b| a * b).expect("same grid")
}

fn density_diagonal(cfg: &ResolvedConfig) -> Res<Outcome> {
    let grid = make_grid(cfg.usize("n_points"), cfg.float("x_min"), cfg.float("x_max"), Boundary::Dirichlet)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.count("seed"));
    let (lmax, gmax) = (cfg.float("lambda_max"), cfg.float("gamma_max"));
    if !(lmax >= 0.1 && gmax >= 0.25) {
        return Err(crate::Error::InvalidParameter(format!("lambda_max = {lmax}, gamma_max = {gmax}")).into());
    }

    struct Draw {
        p: ComplexGaugeParams,
        pure: DensityMatrix,
        mixed: DensityMatrix,
    }
    let mut draws = Vec::new();
    for k in 0..cfg.usize("draws") {
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let lambda = sign * rng.gen_range(0.1..=lmax);
        let re = rng.gen_range(-gmax..=gmax);
        // Every other draw is real; the rest keep |Im gamma| >= 0.25 so the
        // Hermiticity defect is well above rounding.
        let im = if k % 2 == 0 {
            0.0
        } else {
            let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            s * rng.gen_range(0.25..=gmax)
        };
        let a = random_state(&grid, &mut rng);
        let b = random_state(&grid, &mut rng);
        let w = rng.gen_range(0.2..0.8);
        let pure = projector_from(&a);
        let mixed = mix(&pure, &projector_from(&b), w, 1.0 - w)?;
        draws.push(Draw {
            p: ComplexGaugeParams::new(lambda, Complex64::new(re, im))?,
            pure,
            mixed,
        });
    }

    struct Row {
        diag_pure: f64,
        diag_mixed: f64,
        herm_pure: f64,
        herm_mixed: f64,
    }
    let rows = draws
        .par_iter()
        .map(|d| -> Res<Row> {
            let tp = apply_density(&d.p, &d.pure, DEFAULT_FLOOR_REL)?;
            let tm = apply_density(&d.p, &d.mixed, DEFAULT_FLOOR_REL)?;
            Ok(Row {
                diag_pure: diagonal_deviation(&d.pure, &tp)?,
                diag_mixed: diagonal_deviation(&d.mixed, &tm)?,
                herm_pure: hermiticity_deviation(&tp),
                herm_mixed: hermiticity_deviation(&tm),
            })
        })
        .collect::<Res<Vec<_>>>()?;

    let witness_psi = gaussian_packet(&grid, cfg.float("witness_center"), 1.0, 0.0)?;
    let witness = apply_density(
        &ComplexGaugeParams::new(1.0, Complex64::new(0.0, 1.0))?,
        &projector_from(&witness_psi),
        DEFAULT_FLOOR_REL,
    )?;
    let witness_dev = hermiticity_deviation(&witness);

    let real: Vec<usize> = (0..draws.len()).filter(|&k| draws[k].p.gamma().im == 0.0).collect();
    let complex: Vec<usize> = (0..draws.len()).filter(|&k| draws[k].p.gamma().im != 0.0).collect();
    let max_of = |idx: &[usize], f: &dyn Fn(&Row) -> f64| idx.iter().map(|&k| f(&rows[k])).fold(0.0, f64::max);
    let min_of = |idx: &[usize], f: &dyn Fn(&Row) -> f64| idx.iter().map(|&k| f(&rows[k])).fold(f64::INFINITY, f64::min);
    let all: Vec<usize> = (0..draws.len()).collect();
    let diag_pure = max_of(&all, &|r| r.diag_pure);
    let diag_mixed = max_of(&all, &|r| r.diag_mixed);
    let herm_real = max_of(&real, &|r| r.herm_pure.max(r.herm_mixed));
    let herm_complex = min_of(&complex, &|r| r.herm_pure.min(r.herm_mixed));

    let mut checks = vec![
        Check::less("projector_diagonal_deviation", diag_pure, DIAGONAL_TOL),
        Check::less("mixture_diagonal_deviation", diag_mixed, DIAGONAL_TOL),
    ];
    if !real.is_empty() {
        checks.push(Check::less("real_gamma_max_hermiticity_deviation", herm_real, HERMITIAN_TOL));
    }
    if !complex.is_empty() {
        checks.push(Check::greater("complex_gamma_min_hermiticity_deviation", herm_complex, NON_HERMITIAN_MIN));
    }
    checks.push(Check::greater("witness_hermiticity_deviation", witness_dev, NON_HERMITIAN_MIN));

    let csv_rows = draws.iter().zip(&rows).map(|(d, r)| {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            d.p.lambda(),
            d.p.gamma().re,
            d.p.gamma().im,
            r.diag_pure,
            r.diag_mixed,
            r.herm_pure,
            r.herm_mixed
        )
    });
    Ok(Outcome {
        checks,
        results: json!({
            "draws": draws.len(),
            "real_draws": real.len(),
            "complex_draws": complex.len(),
            "projector_diagonal_deviation": diag_pure,
            "mixture_diagonal_deviation": diag_mixed,
            "real_gamma_max_hermiticity_deviation": herm_real,
            "complex_gamma_min_hermiticity_deviation": if complex.is_empty() { Json::Null } else { json!(herm_complex) },
            "witness_hermiticity_deviation": witness_dev,
        }),
        artifacts: vec![Artifact {
            name: "draws.csv".into(),
            bytes: csv(
                "lambda,gamma_re,gamma_im,diag_projector,diag_mixture,herm_projector,herm_mixture",
                csv_rows,
            ),
        }],
    })
}

//! Seeded ensembles: solve batteries of Dirichlet problems, run every check
//! on each, fit the maximum-principle constant, and aggregate the outcome
//! into one versioned report.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::barriers::Coeffs;
use crate::engine::{self, DbCdInput, LedgerEntry, PdHypothesis, PdSetup};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Window};
use crate::solver::{check_abp, solve_dirichlet, AbpCheck, Grid, Solution};

use super::checks::{
    check_critical_density, check_double_ball, check_harnack, check_power_decay,
    harnack_quotient, CdCheckParams, DbCheckParams, HarnackParams, PdCheckParams,
};
use super::config::Config;
use super::report::{CheckReport, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SuiteParams {
    pub seed: u64,
    /// Primary grid; each run is re-solved on the dyadically refined grid
    /// (2 n - 1 nodes per direction) to measure quotient stability.
    pub grid: (usize, usize),
    pub window: Window,
    /// Standard runs; the first `zero_forcing_runs` of them have f = 0.
    pub runs: usize,
    pub zero_forcing_runs: usize,
    /// Extra runs with the degenerate boundary trace x1^2, exercising the
    /// power-decay gate. Oscillation checks are skipped there: the practical
    /// decay constants assume solutions bounded away from zero.
    pub power_decay_runs: usize,
    pub abp_runs: usize,
    pub lambda: f64,
    pub big_lambda: f64,
    pub level: f64,
    /// Ball enlargement used by the checks. The derived theoretical
    /// enlargements are far larger than any window that resolves the balls;
    /// reports carry both.
    pub eta_check: f64,
    /// Density fraction used by the critical-density gate.
    pub nu_check: f64,
    pub db_center: Point2,
    pub db_radius: f64,
    pub harnack_center: Point2,
    pub harnack_radius: f64,
    /// Practical ceiling asserted on measured Harnack quotients.
    pub quotient_bound: f64,
    pub tolerance: f64,
    /// Inputs for the derived-constant ledger embedded in the report.
    pub engine: PdSetup,
}

impl Default for SuiteParams {
    fn default() -> SuiteParams {
        SuiteParams {
            seed: 42,
            grid: (65, 65),
            window: (-1.0, 1.0, -1.0, 1.0),
            runs: 20,
            zero_forcing_runs: 12,
            power_decay_runs: 2,
            abp_runs: 10,
            lambda: 0.5,
            big_lambda: 2.0,
            level: 1.0,
            eta_check: 4.0,
            nu_check: 0.5,
            db_center: Point2::new(0.1, 0.0),
            db_radius: 1.0 / 6.0,
            harnack_center: Point2::new(0.15, -0.1),
            harnack_radius: 1.0 / 6.0,
            quotient_bound: 50.0,
            tolerance: 1e-3,
            engine: PdSetup {
                input: DbCdInput { gamma: 0.5, c: 0.5, eps: 0.5, eta: 2.0, nu: 0.05 },
                k: 1.0,
                alpha_h: 1.0,
                beta_h: 1.0,
                c_d: 4.0,
                delta_rd: 0.25,
                hypothesis: PdHypothesis::RingCondition,
                c_nu: Some(0.5),
            },
        }
    }
}

impl SuiteParams {
    /// Defaults overridden by whatever keys the config provides.
    pub fn from_config(cfg: &Config) -> Result<SuiteParams> {
        let mut p = SuiteParams::default();
        if let Some(v) = cfg.get_u64("seed")? {
            p.seed = v;
        }
        if let Some(v) = cfg.get_grid("grid")? {
            p.grid = v;
        }
        if let Some(v) = cfg.get_window("window")? {
            p.window = v;
        }
        if let Some(v) = cfg.get_usize("runs")? {
            p.runs = v;
        }
        if let Some(v) = cfg.get_usize("zero_forcing_runs")? {
            p.zero_forcing_runs = v;
        }
        if let Some(v) = cfg.get_usize("power_decay_runs")? {
            p.power_decay_runs = v;
        }
        if let Some(v) = cfg.get_usize("abp_runs")? {
            p.abp_runs = v;
        }
        if let Some(v) = cfg.get_f64("lambda")? {
            p.lambda = v;
        }
        if let Some(v) = cfg.get_f64("big_lambda")? {
            p.big_lambda = v;
        }
        if let Some(v) = cfg.get_f64("level")? {
            p.level = v;
        }
        if let Some(v) = cfg.get_f64("eta_check")? {
            p.eta_check = v;
        }
        if let Some(v) = cfg.get_f64("nu_check")? {
            p.nu_check = v;
        }
        if let Some((a, b)) = cfg.get_pair("db_center")? {
            p.db_center = Point2::new(a, b);
        }
        if let Some(v) = cfg.get_f64("db_radius")? {
            p.db_radius = v;
        }
        if let Some((a, b)) = cfg.get_pair("harnack_center")? {
            p.harnack_center = Point2::new(a, b);
        }
        if let Some(v) = cfg.get_f64("harnack_radius")? {
            p.harnack_radius = v;
        }
        if let Some(v) = cfg.get_f64("quotient_bound")? {
            p.quotient_bound = v;
        }
        if let Some(v) = cfg.get_f64("tolerance")? {
            p.tolerance = v;
        }
        if let Some(v) = cfg.get_f64("gamma")? {
            p.engine.input.gamma = v;
        }
        if let Some(v) = cfg.get_f64("c")? {
            p.engine.input.c = v;
        }
        if let Some(v) = cfg.get_f64("eps")? {
            p.engine.input.eps = v;
        }
        if let Some(v) = cfg.get_f64("eta")? {
            p.engine.input.eta = v;
        }
        if let Some(v) = cfg.get_f64("nu")? {
            p.engine.input.nu = v;
        }
        if let Some(v) = cfg.get_f64("k")? {
            p.engine.k = v;
        }
        if let Some(v) = cfg.get_f64("alpha_holder")? {
            p.engine.alpha_h = v;
        }
        if let Some(v) = cfg.get_f64("beta_holder")? {
            p.engine.beta_h = v;
        }
        if let Some(v) = cfg.get_f64("doubling")? {
            p.engine.c_d = v;
        }
        if let Some(v) = cfg.get_f64("reverse_doubling")? {
            p.engine.delta_rd = v;
        }
        if let Some(v) = cfg.get_str("hypothesis") {
            p.engine.hypothesis = match v {
                "ring" => PdHypothesis::RingCondition,
                "continuity" => PdHypothesis::MeasureContinuity,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "hypothesis must be `ring` or `continuity`, got {other:?}"
                    )))
                }
            };
        }
        if let Some(v) = cfg.get_f64("c_nu")? {
            p.engine.c_nu = Some(v);
        }
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.zero_forcing_runs > self.runs {
            return Err(Error::InvalidInput(format!(
                "zero_forcing_runs = {} exceeds runs = {}",
                self.zero_forcing_runs, self.runs
            )));
        }
        if self.runs == 0 {
            return Err(Error::InvalidInput("need at least one standard run".into()));
        }
        if self.abp_runs < 2 {
            return Err(Error::InvalidInput("need at least 2 abp runs".into()));
        }
        if !(self.level > 0.0) {
            return Err(Error::InvalidInput(format!("level must be positive, got {}", self.level)));
        }
        self.engine.validate()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RunKind {
    ZeroForcing,
    SmoothForcing,
    PowerDecayTrace,
}

impl RunKind {
    fn name(self) -> &'static str {
        match self {
            RunKind::ZeroForcing => "zero_forcing",
            RunKind::SmoothForcing => "smooth_forcing",
            RunKind::PowerDecayTrace => "power_decay_trace",
        }
    }
}

struct Problem {
    kind: RunKind,
    coeffs: Coeffs,
    f: Box<dyn Fn(Point2) -> f64>,
    g: Box<dyn Fn(Point2) -> f64>,
}

pub(crate) fn mix_seed(seed: u64, stream: u64) -> u64 {
    seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn make_problem(params: &SuiteParams, run_id: usize) -> Problem {
    let kind = if run_id < params.zero_forcing_runs {
        RunKind::ZeroForcing
    } else if run_id < params.runs {
        RunKind::SmoothForcing
    } else {
        RunKind::PowerDecayTrace
    };
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, run_id as u64 + 1));
    let e1 = rng.gen_range(params.lambda..=params.big_lambda);
    let e2 = rng.gen_range(params.lambda..=params.big_lambda);
    // zero-forcing and trace runs keep a12 = 0: the discrete system is then
    // an M-matrix and sign structure survives discretization exactly
    let coeffs = match kind {
        RunKind::SmoothForcing => {
            Coeffs::rotated(e1, e2, rng.gen_range(0.0..std::f64::consts::PI))
        }
        _ => Coeffs { a11: e1, a12: 0.0, a22: e2 },
    };
    let level = params.level;
    if kind == RunKind::PowerDecayTrace {
        return Problem {
            kind,
            coeffs,
            f: Box::new(|_| 0.0),
            g: Box::new(move |p| level * p.x1 * p.x1),
        };
    }
    // boundary data bounded below by ~1.05 * level so the density and
    // normalization gates are met by construction
    let base = rng.gen_range(1.35..1.6);
    let b1 = rng.gen_range(-0.1..0.1);
    let b2 = rng.gen_range(-0.1..0.1);
    let osc = rng.gen_range(-0.1..0.1);
    let g = Box::new(move |p: Point2| {
        level * (base + b1 * p.x1 + b2 * p.x2 + osc * (2.0 * p.x1).sin() * (2.0 * p.x2).cos())
    });
    let f: Box<dyn Fn(Point2) -> f64> = if kind == RunKind::ZeroForcing {
        Box::new(|_| 0.0)
    } else {
        let amp = rng.gen_range(0.3..1.0) * level;
        let w1 = rng.gen_range(1.0..3.0);
        let w2 = rng.gen_range(1.0..3.0);
        let ph1 = rng.gen_range(0.0..std::f64::consts::TAU);
        let ph2 = rng.gen_range(0.0..std::f64::consts::TAU);
        Box::new(move |p: Point2| amp * (w1 * p.x1 + ph1).sin() * (w2 * p.x2 + ph2).cos())
    };
    Problem { kind, coeffs, f, g }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub run_id: usize,
    pub kind: String,
    pub coeffs: Coeffs,
    pub min_u: f64,
    /// Runs whose solution dips below -1e-8 are excluded from assertions:
    /// the statements under test presume nonnegative solutions.
    pub discarded: bool,
    pub checks: Vec<CheckReport>,
    pub quotient_primary: f64,
    pub quotient_refined: f64,
    pub quotient_delta_rel: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbpRun {
    pub run_id: usize,
    pub forced: bool,
    pub coeffs: Coeffs,
    pub data: AbpCheck,
    /// fitted_c * S - excess, nonnegative when the fitted constant explains
    /// the dip of this run.
    pub margin: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AbpReport {
    /// Smallest constant explaining every forced run (the max ratio).
    pub fitted_c: f64,
    pub runs: Vec<AbpRun>,
    /// Largest negative dip over the zero-forcing runs; must stay below 1e-8.
    pub max_zero_forcing_dip: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub runs_total: usize,
    pub discarded: usize,
    pub checks_passed: usize,
    pub checks_failed: usize,
    pub checks_vacuous: usize,
    pub db_nonvacuous: usize,
    pub cd_nonvacuous: usize,
    pub pd_nonvacuous: usize,
    pub quotients_finite: bool,
    /// Largest relative quotient change between the primary and refined
    /// grids, over standard (non-trace) runs.
    pub max_quotient_delta_rel: f64,
    pub stability_pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: String,
    pub params: SuiteParams,
    /// Closed-form constants derived from the engine inputs.
    pub theoretical_constants: Vec<LedgerEntry>,
    pub runs: Vec<RunReport>,
    pub abp: AbpReport,
    pub ensemble: EnsembleSummary,
    pub overall_pass: bool,
}

impl SuiteReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn solve_problem(params: &SuiteParams, grid: &Grid, problem: &Problem) -> Result<Solution> {
    let c = problem.coeffs;
    solve_dirichlet(
        grid,
        move |_| c,
        &problem.f,
        &problem.g,
        params.lambda,
        params.big_lambda,
    )
}

const STABILITY_LIMIT: f64 = 0.2;

pub fn run_suite(params: &SuiteParams) -> Result<SuiteReport> {
    params.validate()?;
    let ledger = engine::build_ledger(&params.engine)?;
    let grid1 = Grid::new(params.grid.0, params.grid.1, params.window)?;
    let grid2 = Grid::new(2 * params.grid.0 - 1, 2 * params.grid.1 - 1, params.window)?;

    let total = params.runs + params.power_decay_runs;
    let mut runs = Vec::with_capacity(total);
    let mut max_delta = 0.0f64;
    let mut quotients_finite = true;

    for run_id in 0..total {
        let problem = make_problem(params, run_id);
        let sol1 = solve_problem(params, &grid1, &problem)?;
        let sol2 = solve_problem(params, &grid2, &problem)?;
        let context = format!("seed={};run={}", params.seed, run_id);
        let min_u = sol1.min();
        let discarded = min_u < -1e-8;

        let q1 = harnack_quotient(
            &sol1,
            &problem.f,
            params.harnack_center,
            params.harnack_radius,
            params.eta_check,
        )?;
        let q2 = harnack_quotient(
            &sol2,
            &problem.f,
            params.harnack_center,
            params.harnack_radius,
            params.eta_check,
        )?;
        let delta = if q1.is_finite() && q1 > 0.0 && q2.is_finite() {
            (q2 - q1).abs() / q1
        } else {
            f64::INFINITY
        };

        let mut checks = Vec::new();
        if !discarded {
            if problem.kind != RunKind::PowerDecayTrace {
                checks.push(check_double_ball(
                    &sol1,
                    &problem.f,
                    &DbCheckParams {
                        y: params.db_center,
                        r: params.db_radius,
                        gamma: params.engine.input.gamma,
                        eps: params.engine.input.eps,
                        eta: params.eta_check,
                        tolerance: params.tolerance,
                    },
                    &context,
                )?);
                checks.push(check_critical_density(
                    &sol1,
                    &problem.f,
                    &CdCheckParams {
                        y: params.db_center,
                        r: params.db_radius,
                        level: params.level,
                        nu: params.nu_check,
                        c: params.engine.input.c,
                        eps: params.engine.input.eps,
                        eta: params.eta_check,
                        tolerance: params.tolerance,
                    },
                    &context,
                )?);
            }
            checks.push(check_power_decay(
                &sol1,
                &problem.f,
                &PdCheckParams {
                    x0: params.db_center,
                    r: params.db_radius,
                    level: params.level,
                    m: ledger.power_decay.level.m,
                    gamma_pd: ledger.power_decay.gamma_pd,
                    eps_p: ledger.power_decay.eps_p,
                    eta: params.eta_check,
                    k_max: 3,
                    tolerance: params.tolerance,
                },
                &context,
            )?);
            checks.push(check_harnack(
                &sol1,
                &problem.f,
                &HarnackParams {
                    x0: params.harnack_center,
                    r: params.harnack_radius,
                    eta: params.eta_check,
                    bound: Some(params.quotient_bound),
                    tolerance: params.tolerance,
                },
                &context,
            )?);
            if !q1.is_finite() || !q2.is_finite() {
                quotients_finite = false;
            }
            if problem.kind != RunKind::PowerDecayTrace {
                max_delta = max_delta.max(delta);
            }
        }

        runs.push(RunReport {
            run_id,
            kind: problem.kind.name().to_string(),
            coeffs: problem.coeffs,
            min_u,
            discarded,
            checks,
            quotient_primary: q1,
            quotient_refined: q2,
            quotient_delta_rel: delta,
        });
    }

    let abp = run_abp_ensemble(params, &grid1)?;

    let mut summary = EnsembleSummary {
        runs_total: total,
        discarded: runs.iter().filter(|r| r.discarded).count(),
        checks_passed: 0,
        checks_failed: 0,
        checks_vacuous: 0,
        db_nonvacuous: 0,
        cd_nonvacuous: 0,
        pd_nonvacuous: 0,
        quotients_finite,
        max_quotient_delta_rel: max_delta,
        stability_pass: max_delta < STABILITY_LIMIT,
    };
    let mut any_hard_fail = false;
    for run in &runs {
        for check in &run.checks {
            if check.vacuous {
                summary.checks_vacuous += 1;
            } else {
                if check.pass {
                    summary.checks_passed += 1;
                } else {
                    summary.checks_failed += 1;
                    any_hard_fail = true;
                }
                match check.check.as_str() {
                    "double_ball" => summary.db_nonvacuous += 1,
                    "critical_density" => summary.cd_nonvacuous += 1,
                    "power_decay" => summary.pd_nonvacuous += 1,
                    _ => {}
                }
            }
        }
    }
    let overall_pass =
        !any_hard_fail && quotients_finite && summary.stability_pass && abp.pass;
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION.to_string(),
        params: *params,
        theoretical_constants: ledger.entries(),
        runs,
        abp,
        ensemble: summary,
        overall_pass,
    })
}

fn run_abp_ensemble(params: &SuiteParams, grid: &Grid) -> Result<AbpReport> {
    let forced_runs = params.abp_runs - 2;
    let mut raw = Vec::with_capacity(params.abp_runs);
    for i in 0..params.abp_runs {
        let forced = i < forced_runs;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(params.seed, 0x5000 + i as u64));
        let e1 = rng.gen_range(params.lambda..=params.big_lambda);
        let e2 = rng.gen_range(params.lambda..=params.big_lambda);
        let coeffs = if forced {
            Coeffs::rotated(e1, e2, rng.gen_range(0.0..std::f64::consts::PI))
        } else {
            Coeffs { a11: e1, a12: 0.0, a22: e2 }
        };
        let (f, g): (Box<dyn Fn(Point2) -> f64>, Box<dyn Fn(Point2) -> f64>) = if forced {
            let amp = rng.gen_range(0.3..1.0);
            let w1 = rng.gen_range(1.0..3.0);
            let w2 = rng.gen_range(1.0..3.0);
            // strictly positive forcing: the dip below zero is guaranteed
            let f = move |p: Point2| {
                let s = (w1 * p.x1).sin();
                let c = (w2 * p.x2).cos();
                amp * (0.25 + 0.75 * s * s * c * c)
            };
            (Box::new(f), Box::new(|_: Point2| 0.0))
        } else {
            (Box::new(|_: Point2| 0.0), Box::new(|p: Point2| p.x1.abs()))
        };
        let c = coeffs;
        let sol = solve_dirichlet(grid, move |_| c, &f, &g, params.lambda, params.big_lambda)?;
        let data = check_abp(&sol, &f);
        raw.push((i, forced, coeffs, data));
    }
    let fitted_c = raw
        .iter()
        .filter(|(_, forced, _, _)| *forced)
        .map(|(_, _, _, d)| d.ratio)
        .fold(0.0f64, f64::max);
    let mut runs = Vec::with_capacity(raw.len());
    let mut max_dip = 0.0f64;
    let mut pass = fitted_c.is_finite();
    for (run_id, forced, coeffs, data) in raw {
        let excess = (data.sup_neg_interior - data.sup_neg_boundary).max(0.0);
        let margin = if forced { fitted_c * data.s_norm - excess } else { 0.0 };
        if forced && margin < -1e-12 {
            pass = false;
        }
        if !forced {
            max_dip = max_dip.max(data.sup_neg_interior);
        }
        runs.push(AbpRun { run_id, forced, coeffs, data, margin });
    }
    if max_dip > 1e-8 {
        pass = false;
    }
    Ok(AbpReport { fitted_c, runs, max_zero_forcing_dip: max_dip, pass })
}

/// One scaled replay of a fixed problem: boundary data, forcing, and check
/// level all multiplied by `scale`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetamorphicRun {
    pub scale: f64,
    /// (check name, pass, vacuous) for each check, in a fixed order.
    pub flags: Vec<(String, bool, bool)>,
    /// Quotient measured on the re-solved scaled problem.
    pub quotient_resolved: f64,
    /// Quotient measured on the base solution with values scaled directly;
    /// agrees with the base quotient to near machine precision.
    pub quotient_scaled_values: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetamorphicReport {
    pub schema_version: String,
    pub scales: Vec<f64>,
    pub base_quotient: f64,
    pub runs: Vec<MetamorphicRun>,
    pub flags_invariant: bool,
    /// max over scales of |q_scaled_values - q_base| / q_base.
    pub max_identity_deviation: f64,
}

pub fn run_metamorphic(params: &SuiteParams, scales: &[f64]) -> Result<MetamorphicReport> {
    params.validate()?;
    if scales.is_empty() {
        return Err(Error::InvalidInput("need at least one scale".into()));
    }
    let ledger = engine::build_ledger(&params.engine)?;
    let grid = Grid::new(params.grid.0, params.grid.1, params.window)?;
    // a fixed forced problem: first smooth-forcing slot of the ensemble
    let problem = make_problem(params, params.zero_forcing_runs.min(params.runs - 1));
    let base_sol = solve_problem(params, &grid, &problem)?;
    let base_quotient = harnack_quotient(
        &base_sol,
        &problem.f,
        params.harnack_center,
        params.harnack_radius,
        params.eta_check,
    )?;

    let run_checks = |sol: &Solution, f: &dyn Fn(Point2) -> f64, level: f64, ctx: &str| -> Result<Vec<CheckReport>> {
        Ok(vec![
            check_double_ball(
                sol,
                f,
                &DbCheckParams {
                    y: params.db_center,
                    r: params.db_radius,
                    gamma: params.engine.input.gamma,
                    eps: params.engine.input.eps,
                    eta: params.eta_check,
                    tolerance: params.tolerance,
                },
                ctx,
            )?,
            check_critical_density(
                sol,
                f,
                &CdCheckParams {
                    y: params.db_center,
                    r: params.db_radius,
                    level,
                    nu: params.nu_check,
                    c: params.engine.input.c,
                    eps: params.engine.input.eps,
                    eta: params.eta_check,
                    tolerance: params.tolerance,
                },
                ctx,
            )?,
            check_power_decay(
                sol,
                f,
                &PdCheckParams {
                    x0: params.db_center,
                    r: params.db_radius,
                    level,
                    m: ledger.power_decay.level.m,
                    gamma_pd: ledger.power_decay.gamma_pd,
                    eps_p: ledger.power_decay.eps_p,
                    eta: params.eta_check,
                    k_max: 3,
                    tolerance: params.tolerance,
                },
                ctx,
            )?,
            check_harnack(
                sol,
                f,
                &HarnackParams {
                    x0: params.harnack_center,
                    r: params.harnack_radius,
                    eta: params.eta_check,
                    bound: Some(params.quotient_bound),
                    tolerance: params.tolerance,
                },
                ctx,
            )?,
        ])
    };

    let base_flags: Vec<(String, bool, bool)> = run_checks(&base_sol, &problem.f, params.level, "meta-base")?
        .into_iter()
        .map(|c| (c.check, c.pass, c.vacuous))
        .collect();

    let mut runs = Vec::with_capacity(scales.len());
    let mut flags_invariant = true;
    let mut max_dev = 0.0f64;
    for &scale in scales {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidInput(format!("scales must be positive, got {scale}")));
        }
        let f_scaled = |p: Point2| scale * (problem.f)(p);
        let g_scaled = |p: Point2| scale * (problem.g)(p);
        let c = problem.coeffs;
        let sol =
            solve_dirichlet(&grid, move |_| c, &f_scaled, &g_scaled, params.lambda, params.big_lambda)?;
        let ctx = format!("meta-scale={scale}");
        let flags: Vec<(String, bool, bool)> =
            run_checks(&sol, &f_scaled, scale * params.level, &ctx)?
                .into_iter()
                .map(|c| (c.check, c.pass, c.vacuous))
                .collect();
        if flags != base_flags {
            flags_invariant = false;
        }
        let quotient_resolved = harnack_quotient(
            &sol,
            &f_scaled,
            params.harnack_center,
            params.harnack_radius,
            params.eta_check,
        )?;
        let mut scaled_values = base_sol.clone();
        for v in &mut scaled_values.values {
            *v *= scale;
        }
        let quotient_scaled_values = harnack_quotient(
            &scaled_values,
            &f_scaled,
            params.harnack_center,
            params.harnack_radius,
            params.eta_check,
        )?;
        if base_quotient.is_finite() && base_quotient > 0.0 {
            max_dev = max_dev.max((quotient_scaled_values - base_quotient).abs() / base_quotient);
        }
        runs.push(MetamorphicRun { scale, flags, quotient_resolved, quotient_scaled_values });
    }
    Ok(MetamorphicReport {
        schema_version: SCHEMA_VERSION.to_string(),
        scales: scales.to_vec(),
        base_quotient,
        runs,
        flags_invariant,
        max_identity_deviation: max_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_params() -> SuiteParams {
        SuiteParams {
            grid: (33, 33),
            runs: 4,
            zero_forcing_runs: 2,
            power_decay_runs: 1,
            abp_runs: 4,
            // the 33x33 grid cannot resolve the default ball, which is only
            // ~0.05 wide in x2 near this center; widen it so nodes fall inside
            harnack_radius: 0.25,
            ..SuiteParams::default()
        }
    }

    #[test]
    fn small_ensemble_passes_end_to_end() {
        let report = run_suite(&small_params()).unwrap();
        assert!(report.overall_pass, "{:#?}", report.ensemble);
        assert_eq!(report.runs.len(), 5);
        assert_eq!(report.ensemble.discarded, 0);
        assert!(report.ensemble.db_nonvacuous >= 2);
        assert!(report.ensemble.cd_nonvacuous >= 2);
        assert!(report.ensemble.pd_nonvacuous >= 1);
        assert!(report.ensemble.max_quotient_delta_rel < 0.2);
        assert!(report.abp.pass);
        assert!(report.abp.fitted_c > 0.0);
        assert!(report.abp.max_zero_forcing_dip <= 1e-8);
        assert!(!report.theoretical_constants.is_empty());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(&small_params()).unwrap().to_json().unwrap();
        let b = run_suite(&small_params()).unwrap().to_json().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seed_changes_the_ensemble() {
        let a = run_suite(&small_params()).unwrap();
        let b = run_suite(&SuiteParams { seed: 43, ..small_params() }).unwrap();
        assert_ne!(
            a.runs[0].coeffs.a11, b.runs[0].coeffs.a11,
            "different seeds must draw different ensembles"
        );
    }

    #[test]
    fn metamorphic_flags_and_quotient_identity() {
        let params = SuiteParams { grid: (33, 33), ..small_params() };
        let report = run_metamorphic(&params, &[1.0, 3.0, 0.25]).unwrap();
        assert!(report.flags_invariant, "{:#?}", report.runs);
        assert!(report.max_identity_deviation <= 1e-12, "{}", report.max_identity_deviation);
        for run in &report.runs {
            assert!(run.quotient_resolved.is_finite());
        }
    }

    #[test]
    fn config_overrides_defaults() {
        let cfg = Config::parse(
            "seed = 9\ngrid = 17x21\nlambda = 0.7\nhypothesis = continuity\nnu = 0.01\n",
        )
        .unwrap();
        let p = SuiteParams::from_config(&cfg).unwrap();
        assert_eq!(p.seed, 9);
        assert_eq!(p.grid, (17, 21));
        assert_eq!(p.lambda, 0.7);
        assert_eq!(p.engine.hypothesis, PdHypothesis::MeasureContinuity);
        assert_eq!(p.engine.input.nu, 0.01);
        let bad = Config::parse("hypothesis = maybe\n").unwrap();
        assert!(SuiteParams::from_config(&bad).is_err());
    }

    #[test]
    fn invalid_ensembles_are_rejected() {
        let p = SuiteParams { zero_forcing_runs: 10, runs: 5, ..SuiteParams::default() };
        assert!(run_suite(&p).is_err());
        let p = SuiteParams { level: 0.0, ..SuiteParams::default() };
        assert!(run_suite(&p).is_err());
    }
}

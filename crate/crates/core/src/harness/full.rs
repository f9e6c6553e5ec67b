//! Scoped whole-library verification: geometry, engine, barrier, and solver
//! chapters alongside the PDE ensemble, aggregated into one versioned report.
//!
//! Each chapter reduces to a handful of [`CheckReport`]s with pinned
//! constants, so the aggregate verdict is the conjunction of explicit
//! margins rather than an opaque boolean.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::barriers::{self, Coeffs, RingBarrier};
use crate::engine;
use crate::error::{Error, Result};
use crate::geometry::{self, Point2, Region, SandwichFamily};
use crate::quasimetric;
use crate::solver::{manufactured_error, Grid, Manufactured};

use super::config::Config;
use super::report::{CheckReport, SCHEMA_VERSION};
use super::suite::{self, mix_seed, SuiteParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chapter {
    Geometry,
    Engine,
    Barriers,
    Solver,
    Pde,
}

impl Chapter {
    pub const ALL: [Chapter; 5] = [
        Chapter::Geometry,
        Chapter::Engine,
        Chapter::Barriers,
        Chapter::Solver,
        Chapter::Pde,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Chapter::Geometry => "geometry",
            Chapter::Engine => "engine",
            Chapter::Barriers => "barriers",
            Chapter::Solver => "solver",
            Chapter::Pde => "pde",
        }
    }

    pub fn parse(s: &str) -> Result<Chapter> {
        Chapter::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Chapter::ALL.iter().map(|c| c.name()).collect();
                Error::InvalidInput(format!("unknown chapter {s:?}; expected one of {names:?}"))
            })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FullParams {
    pub chapters: Vec<Chapter>,
    pub suite: SuiteParams,
    /// Seeded (center, radius) pairs for the sandwich and doubling sweeps.
    pub pairs: usize,
    pub boundary_samples: usize,
    /// Scales replayed by the metamorphic stage of the PDE chapter.
    pub scales: Vec<f64>,
}

impl Default for FullParams {
    fn default() -> FullParams {
        FullParams {
            chapters: Chapter::ALL.to_vec(),
            suite: SuiteParams::default(),
            pairs: 100,
            boundary_samples: 256,
            scales: vec![0.1, 1.0, 7.0],
        }
    }
}

impl FullParams {
    /// Defaults overridden by config keys; `only` scopes the chapters, e.g.
    /// `only = geometry, engine`.
    pub fn from_config(cfg: &Config) -> Result<FullParams> {
        let mut p = FullParams { suite: SuiteParams::from_config(cfg)?, ..FullParams::default() };
        if let Some(list) = cfg.get_str("only") {
            p.chapters = list
                .split(',')
                .map(|s| Chapter::parse(s.trim()))
                .collect::<Result<Vec<_>>>()?;
            if p.chapters.is_empty() {
                return Err(Error::InvalidInput("`only` selected no chapters".into()));
            }
        }
        if let Some(v) = cfg.get_usize("pairs")? {
            p.pairs = v;
        }
        if let Some(v) = cfg.get_usize("boundary_samples")? {
            p.boundary_samples = v;
        }
        if let Some(list) = cfg.get_str("scales") {
            p.scales = list
                .split(',')
                .map(|s| {
                    s.trim().parse::<f64>().map_err(|_| {
                        Error::InvalidInput(format!("scales must be numbers, got {s:?}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FullReport {
    pub schema_version: String,
    pub chapters: Vec<String>,
    /// Chapter-level checks (everything except the PDE ensemble).
    pub checks: Vec<CheckReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pde: Option<suite::SuiteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metamorphic: Option<suite::MetamorphicReport>,
    pub checks_total: usize,
    pub overall_pass: bool,
}

impl FullReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn report(check: &str, seed: u64, tolerance: f64) -> CheckReport {
    CheckReport::new(check, &[check.to_string(), format!("seed={seed}")], tolerance)
}

/// Seeded (center, radius) family spread over the window, radii small enough
/// that tripled regions stay comparable to the window.
fn sample_pairs(seed: u64, window: (f64, f64, f64, f64), n: usize) -> Vec<(Point2, f64)> {
    let (x1min, x1max, x2min, x2max) = window;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x6E0));
    (0..n)
        .map(|_| {
            let c = Point2::new(
                rng.gen_range(0.8 * x1min..0.8 * x1max),
                rng.gen_range(0.8 * x2min..0.8 * x2max),
            );
            (c, rng.gen_range(0.05..0.3))
        })
        .collect()
}

pub fn geometry_checks(params: &FullParams) -> Result<Vec<CheckReport>> {
    let seed = params.suite.seed;
    let window = params.suite.window;
    let pairs = sample_pairs(seed, window, params.pairs.max(1));
    let mut out = Vec::new();

    // closed forms at the origin: gauge distance, box measure, dilation ratio
    let mut hand = report("gauge_hand_values", seed, 1e-3);
    let d = geometry::dtilde(Point2::new(0.0, 0.0), Point2::new(0.0, 1.0));
    let area = geometry::region_measure(&Region::metric_box(Point2::new(0.0, 0.0), 1.0)?, 128)?;
    hand.constants.insert("dtilde_origin_unit".into(), 2.0);
    hand.constants.insert("box_area_origin_unit".into(), 4.0);
    hand.measured.insert("dtilde".into(), d);
    hand.measured.insert("box_area_quadrature".into(), area.value);
    hand.margins.insert("dtilde_rel".into(), 1e-3 - (d - 2.0).abs() / 2.0);
    hand.margins.insert("area_rel".into(), 1e-3 - (area.value - 4.0).abs() / 4.0);
    hand.settle_from_margins();
    out.push(hand);

    let mut doubling = report("box_doubling_origin", seed, 1e-3);
    let big = geometry::region_measure(&Region::metric_box(Point2::new(0.0, 0.0), 2.0)?, 128)?;
    let ratio = big.value / area.value;
    doubling.constants.insert("homogeneous_ratio".into(), 8.0);
    doubling.measured.insert("ratio".into(), ratio);
    doubling.margins.insert("ratio_rel".into(), 1e-3 - (ratio - 8.0).abs() / 8.0);
    doubling.settle_from_margins();
    out.push(doubling);

    // box sandwiches: one constant <= 16 certifies both inclusions per family
    for family in [
        SandwichFamily::MetricBall,
        SandwichFamily::G,
        SandwichFamily::H,
        SandwichFamily::CcComposite,
    ] {
        let name = format!("structure_{}", serde_json::to_value(family)?.as_str().unwrap());
        let mut rep = CheckReport::new(
            &name,
            &[name.clone(), format!("seed={seed}"), format!("pairs={}", pairs.len())],
            1e-9,
        );
        rep.constants.insert("c_max".into(), 16.0);
        match geometry::structure_constant(family, &pairs, params.boundary_samples) {
            Ok(res) => {
                rep.measured.insert("constant".into(), res.constant);
                rep.measured.insert("inner_margin".into(), res.inner_witness.margin);
                rep.measured.insert("outer_margin".into(), res.outer_witness.margin);
                rep.margins.insert("c_max_minus_c".into(), 16.0 - res.constant);
                rep.settle_from_margins();
            }
            Err(e) => {
                rep.pass = false;
                rep.reason = format!("sandwich search failed: {e}");
            }
        }
        out.push(rep);
    }

    // fixed inner constant: Box(y, r/4) inside H(y, r) for every sampled pair
    let mut quarter = report("h_inner_quarter_box", seed, 1e-12);
    let mut worst = f64::INFINITY;
    for &(center, r) in &pairs {
        for p in geometry::box_boundary(center, r / 4.0, params.boundary_samples.max(8)) {
            worst = worst.min(r - geometry::level_h(p, center, r));
        }
    }
    quarter.constants.insert("inner_ratio".into(), 4.0);
    quarter.measured.insert("min_level_margin".into(), worst);
    quarter.margins.insert("min_level_margin".into(), worst);
    quarter.settle_from_margins();
    out.push(quarter);

    // the gauge is a quasi distance: K > 1 strictly, small in practice.
    // Random triples almost never violate the plain triangle inequality, so
    // the sweep is seeded with dilates of a violating triple off the seam.
    let mut triangle = report("quasi_triangle", seed, 1e-12);
    let mut triples = quasimetric::halton_triples(window, 600);
    for t in [0.25, 0.5, 1.0, 2.0] {
        triples.push([
            Point2::new(0.0, 0.0),
            Point2::new(t, 0.0),
            Point2::new(t, t * t),
        ]);
    }
    let est = quasimetric::estimate_quasi_triangle_k(geometry::dtilde, &triples)?;
    triangle.constants.insert("k_cap".into(), 2.0);
    triangle.measured.insert("k_lower".into(), est.k_lower);
    triangle.margins.insert("k_above_one".into(), est.k_lower - 1.0);
    triangle.margins.insert("k_below_cap".into(), 2.0 - est.k_lower);
    triangle.settle_from_margins();
    out.push(triangle);

    // closed-form box measure: ratios of the family are exactly computable
    let boxes = |c: Point2, r: f64| -> Result<f64> { Ok(geometry::box_area(c, r)) };
    let mut dbl = report("doubling_box_family", seed, 1e-12);
    let est = quasimetric::doubling_constant(boxes, &pairs)?;
    dbl.constants.insert("c_d_cap".into(), 8.0);
    dbl.measured.insert("c_d".into(), est.c_d);
    dbl.measured.insert("q".into(), est.q);
    dbl.margins.insert("cap_minus_c_d".into(), 8.0 - est.c_d);
    dbl.settle_from_margins();
    out.push(dbl);

    let mut ring = report("ring_modulus_box_family", seed, 1e-12);
    let est = quasimetric::ring_modulus(boxes, &pairs, 0.1)?;
    ring.constants.insert("eps".into(), 0.1);
    ring.measured.insert("omega".into(), est.omega);
    ring.margins.insert("omega_below_one".into(), 1.0 - est.omega);
    ring.margins.insert("omega_nonnegative".into(), est.omega);
    ring.settle_from_margins();
    out.push(ring);

    // mu(B_r)/mu(B_2r) = (r+|y1|)/(4(2r+|y1|)) < 1/4 for boxes
    let mut rev = report("reverse_doubling_box_family", seed, 1e-12);
    let est = quasimetric::reverse_doubling(boxes, &pairs)?;
    rev.constants.insert("delta_cap".into(), 0.25);
    rev.measured.insert("delta".into(), est.delta);
    rev.margins.insert("cap_minus_delta".into(), 0.25 - est.delta);
    rev.settle_from_margins();
    out.push(rev);

    Ok(out)
}

pub fn engine_checks(params: &FullParams) -> Result<Vec<CheckReport>> {
    let ledger = engine::build_ledger(&params.suite.engine)?;
    let mut out = Vec::new();

    let mut ids = report("constant_ledger_identities", params.suite.seed, 1e-12);
    let residual = ledger.identity_residual();
    ids.measured.insert("identity_residual".into(), residual);
    ids.measured
        .insert("ln_c_harnack".into(), ledger.harnack.ln_c_harnack);
    ids.margins.insert("tolerance_minus_residual".into(), 1e-12 - residual);
    ids.settle_from_margins();
    out.push(ids);

    let mut radii = report("nested_radii_stay_above_half", params.suite.seed, 0.0);
    let t = engine::tk_sequence(&ledger.power_decay.level, 10_000)?;
    let min_t = t.iter().copied().fold(f64::INFINITY, f64::min);
    radii.constants.insert("t_1".into(), 0.75);
    radii.measured.insert("t_min".into(), min_t);
    radii.measured.insert("t_limit".into(), ledger.t_limit);
    radii.margins.insert("t_min_above_half".into(), min_t - 0.5);
    radii.margins.insert("t_limit_above_half".into(), ledger.t_limit - 0.5);
    radii.margins.insert("t_head_is_three_quarters".into(), -(t[0] - 0.75).abs());
    radii.settle_from_margins();
    out.push(radii);

    Ok(out)
}

pub fn barrier_checks(params: &FullParams) -> Result<Vec<CheckReport>> {
    let seed = params.suite.seed;
    let (lambda, big_lambda) = (params.suite.lambda, params.suite.big_lambda);
    let alpha = barriers::barrier_alpha(lambda, big_lambda)?;
    let r = 0.25;
    // one center per branch of the ring-constant case analysis
    let centers = [
        ("low", Point2::new(0.1, -0.2)),
        ("mid", Point2::new(0.3, -0.2)),
        ("high", Point2::new(0.55, -0.2)),
        ("far", Point2::new(0.8, -0.2)),
    ];
    let mut out = Vec::new();
    let mut worst_boundary = 0.0f64;

    for (i, (case, y)) in centers.into_iter().enumerate() {
        let field = if i % 2 == 0 {
            Coeffs::IDENTITY
        } else {
            Coeffs::rotated(lambda, big_lambda, 0.7)
        };
        let check = barriers::verify_subsolution(
            alpha,
            y,
            r,
            move |_| field,
            lambda,
            big_lambda,
            2_000,
            mix_seed(seed, 0xBA0 + i as u64),
        )?;
        let barrier = RingBarrier::new(alpha, y, r)?;
        let (b1, b2, b3) = barrier.boundary_residuals(256)?;
        worst_boundary = worst_boundary.max(b1).max(b2).max(b3);

        let name = format!("ring_barrier_{case}");
        let mut rep = CheckReport::new(
            &name,
            &[name.clone(), format!("seed={seed}"), format!("alpha={alpha}")],
            check.tolerance,
        );
        rep.constants.insert("alpha".into(), alpha);
        rep.constants.insert("m3_floor".into(), barriers::gamma_floor(alpha)?);
        rep.measured.insert("min_l_phi".into(), check.min_value);
        rep.measured.insert("scale".into(), check.scale);
        rep.measured.insert("m3".into(), barrier.m3);
        rep.margins.insert("min_l_phi".into(), check.min_value);
        rep.margins
            .insert("m3_above_floor".into(), barrier.m3 - barriers::gamma_floor(alpha)?);
        rep.settle_from_margins();
        out.push(rep);
    }

    let mut boundary = report("barrier_boundary_normalisation", seed, 0.0);
    boundary.measured.insert("worst_residual".into(), worst_boundary);
    boundary.margins.insert("below_1e10".into(), 1e-10 - worst_boundary);
    boundary.settle_from_margins();
    out.push(boundary);

    // positive exponents are not subsolutions: the sign check must reject
    // them decisively, or the admissibility gate means nothing
    let control = RingBarrier::sigma_power(2.0, Point2::new(0.1, -0.2), r)?;
    let control_check = barriers::subsolution_check_for(
        &control,
        |_| Coeffs::IDENTITY,
        lambda,
        big_lambda,
        2_000,
        mix_seed(seed, 0xBAD),
    )?;
    let mut neg = report("positive_exponent_control", seed, 0.0);
    neg.measured.insert("min_l_phi".into(), control_check.min_value);
    neg.measured.insert("scale".into(), control_check.scale);
    neg.margins.insert(
        "violation_dominates_tolerance".into(),
        -control_check.min_value - 1e3 * control_check.tolerance,
    );
    neg.settle_from_margins();
    out.push(neg);

    Ok(out)
}

pub fn solver_checks(params: &FullParams) -> Result<Vec<CheckReport>> {
    let seed = params.suite.seed;
    let (lambda, big_lambda) = (params.suite.lambda, params.suite.big_lambda);
    let window = params.suite.window;
    let field = Coeffs::rotated(lambda, big_lambda, 0.4);
    let coeffs = move |_: Point2| field;
    let mut out = Vec::new();

    // centered differences are exact on the quadratic case
    let mut exact = report("manufactured_quadratic_exact", seed, 0.0);
    let grid = Grid::new(33, 33, window)?;
    let err =
        manufactured_error(&grid, coeffs, Manufactured::QuadraticX2, lambda, big_lambda)?;
    exact.measured.insert("sup_error".into(), err);
    exact.margins.insert("below_1e9".into(), 1e-9 - err);
    exact.settle_from_margins();
    out.push(exact);

    let mut order = report("manufactured_mixed_second_order", seed, 0.0);
    let coarse =
        manufactured_error(&Grid::new(33, 33, window)?, coeffs, Manufactured::Mixed, lambda, big_lambda)?;
    let fine =
        manufactured_error(&Grid::new(65, 65, window)?, coeffs, Manufactured::Mixed, lambda, big_lambda)?;
    let ratio = coarse / fine;
    order.constants.insert("ratio_low".into(), 3.3);
    order.constants.insert("ratio_high".into(), 4.7);
    order.measured.insert("error_coarse".into(), coarse);
    order.measured.insert("error_fine".into(), fine);
    order.measured.insert("ratio".into(), ratio);
    order.margins.insert("ratio_above_low".into(), ratio - 3.3);
    order.margins.insert("ratio_below_high".into(), 4.7 - ratio);
    order.settle_from_margins();
    out.push(order);

    Ok(out)
}

pub fn run_full(params: &FullParams) -> Result<FullReport> {
    let mut checks = Vec::new();
    let mut pde = None;
    let mut metamorphic = None;
    for &chapter in &params.chapters {
        match chapter {
            Chapter::Geometry => checks.extend(geometry_checks(params)?),
            Chapter::Engine => checks.extend(engine_checks(params)?),
            Chapter::Barriers => checks.extend(barrier_checks(params)?),
            Chapter::Solver => checks.extend(solver_checks(params)?),
            Chapter::Pde => {
                pde = Some(suite::run_suite(&params.suite)?);
                if !params.scales.is_empty() {
                    metamorphic = Some(suite::run_metamorphic(&params.suite, &params.scales)?);
                }
            }
        }
    }
    let pde_checks = pde
        .as_ref()
        .map_or(0, |s| s.runs.iter().map(|r| r.checks.len()).sum::<usize>() + s.abp.runs.len());
    let checks_total = checks.len() + pde_checks;
    let mut overall_pass = checks.iter().all(|c| !c.hard_fail());
    if let Some(s) = &pde {
        overall_pass &= s.overall_pass;
    }
    if let Some(m) = &metamorphic {
        overall_pass &= m.flags_invariant && m.max_identity_deviation <= 1e-12;
    }
    Ok(FullReport {
        schema_version: SCHEMA_VERSION.to_string(),
        chapters: params.chapters.iter().map(|c| c.name().to_string()).collect(),
        checks,
        pde,
        metamorphic,
        checks_total,
        overall_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast_params(chapters: Vec<Chapter>) -> FullParams {
        FullParams {
            chapters,
            pairs: 24,
            boundary_samples: 64,
            suite: SuiteParams {
                grid: (33, 33),
                runs: 3,
                zero_forcing_runs: 2,
                power_decay_runs: 1,
                abp_runs: 3,
                harnack_radius: 0.25,
                ..SuiteParams::default()
            },
            scales: vec![1.0, 3.0],
        }
    }

    #[test]
    fn geometry_scope_runs_without_the_solver() {
        let rep = run_full(&fast_params(vec![Chapter::Geometry])).unwrap();
        assert!(rep.pde.is_none() && rep.metamorphic.is_none());
        assert!(rep.overall_pass, "{:#?}", rep.checks);
        assert_eq!(rep.chapters, vec!["geometry"]);
        assert!(rep.checks_total >= 8);
    }

    #[test]
    fn every_chapter_passes_on_small_inputs() {
        let rep = run_full(&fast_params(Chapter::ALL.to_vec())).unwrap();
        assert!(rep.overall_pass, "{:#?}", rep.checks);
        assert!(rep.pde.is_some() && rep.metamorphic.is_some());
        assert!(rep.checks_total >= 12, "only {} checks", rep.checks_total);
        let json = rep.to_json().unwrap();
        assert!(json.contains("\"schema_version\": \"1\""));
    }

    #[test]
    fn config_scoping_and_scales() {
        let cfg = Config::parse("only = engine, solver\nscales = 1, 2\npairs = 10\n").unwrap();
        let p = FullParams::from_config(&cfg).unwrap();
        assert_eq!(p.chapters, vec![Chapter::Engine, Chapter::Solver]);
        assert_eq!(p.scales, vec![1.0, 2.0]);
        assert_eq!(p.pairs, 10);
        assert!(Chapter::parse("nope").is_err());
    }
}

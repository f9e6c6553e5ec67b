//! Command-line front end: region inspection, the constant ledger, single
//! Dirichlet solves, barrier verification, and the scoped check suite.
//!
//! Every subcommand reads the same plain-text `key = value` config (see the
//! README for the key tables), emits a schema-versioned JSON report to
//! `--out` or stdout, and reserves `--csv` for plot data.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use grushin_harnack::barriers::{
    self, barrier_alpha, random_admissible, Coeffs, RingBarrier,
};
use grushin_harnack::engine;
use grushin_harnack::geometry::{self, Point2, Region};
use grushin_harnack::harness::{parse_window, Config, FullParams, SCHEMA_VERSION};
use grushin_harnack::harness::full::run_full;
use grushin_harnack::solver::{solve_dirichlet, Grid, Manufactured};
use grushin_harnack::{Error, Result};

#[derive(Parser)]
#[command(
    name = "grushin",
    version,
    about = "Verification tools for degenerate-elliptic Harnack machinery on the Grushin plane"
)]
struct Cli {
    /// Plain-text `key = value` configuration file.
    #[arg(long, global = true, value_name = "path")]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "path")]
    out: Option<PathBuf>,
    /// Seed override for anything randomised.
    #[arg(long, global = true, value_name = "u64")]
    seed: Option<u64>,
    /// Grid shape override, e.g. 129x65.
    #[arg(long, global = true, value_name = "n1xn2")]
    grid: Option<String>,
    /// Window override `x1min,x1max,x2min,x2max`.
    #[arg(long, global = true, value_name = "w", allow_hyphen_values = true)]
    window: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Measure a gauge region: quadrature area, sampled diameter, bounding
    /// box; `--csv` dumps an `x1,x2,inside` membership grid.
    Geometry {
        /// Write the membership dump here (resolution from --grid).
        #[arg(long, value_name = "path")]
        csv: Option<PathBuf>,
    },
    /// Derive the full structural-constant ledger from the configured
    /// double-ball / critical-density inputs.
    Constants {
        /// Override the covering contraction factor c(nu); default is
        /// 1 - nu/(2 C_D^2).
        #[arg(long, value_name = "f64")]
        c_nu: Option<f64>,
    },
    /// Solve one manufactured Dirichlet problem; `--csv` dumps the solution
    /// grid as `i,j,x1,x2,value`.
    Solve {
        #[arg(long, value_name = "path")]
        csv: Option<PathBuf>,
    },
    /// Check the ring barrier is a subsolution on sampled points; exits
    /// nonzero when the sign condition fails.
    Verify,
    /// Run the scoped verification suite; exits nonzero unless every
    /// non-vacuous check passes.
    Suite,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = match &cli.config {
        Some(path) => Config::from_file(path)?,
        None => Config::empty(),
    };
    match &cli.command {
        Command::Geometry { csv } => geometry_cmd(cli, &cfg, csv.as_deref()),
        Command::Constants { c_nu } => constants_cmd(cli, &cfg, *c_nu),
        Command::Solve { csv } => solve_cmd(cli, &cfg, csv.as_deref()),
        Command::Verify => verify_cmd(cli, &cfg),
        Command::Suite => suite_cmd(cli, &cfg),
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn grid_shape(cli: &Cli, cfg: &Config, default: (usize, usize)) -> Result<(usize, usize)> {
    if let Some(s) = &cli.grid {
        return Grid::parse_shape(s);
    }
    if let Some(shape) = cfg.get_grid("grid")? {
        return Ok(shape);
    }
    match (cfg.get_usize("n1")?, cfg.get_usize("n2")?) {
        (Some(n1), Some(n2)) => Ok((n1, n2)),
        (None, None) => Ok(default),
        _ => Err(Error::InvalidInput("n1 and n2 must be given together".into())),
    }
}

fn window_of(cli: &Cli, cfg: &Config) -> Result<(f64, f64, f64, f64)> {
    if let Some(s) = &cli.window {
        return parse_window(s);
    }
    Ok(cfg.get_window("window")?.unwrap_or((-1.0, 1.0, -1.0, 1.0)))
}

fn seed_of(cli: &Cli, cfg: &Config) -> Result<u64> {
    if let Some(s) = cli.seed {
        return Ok(s);
    }
    Ok(cfg.get_u64("seed")?.unwrap_or(42))
}

fn region_from_config(cfg: &Config) -> Result<Region> {
    let center = cfg
        .get_pair("center")?
        .map_or(Point2::new(0.0, 0.0), |(a, b)| Point2::new(a, b));
    let radius = cfg.get_f64("radius")?.unwrap_or(1.0);
    match cfg.get_str("region").unwrap_or("box") {
        "box" => Region::metric_box(center, radius),
        "ball" => Region::metric_ball(center, radius),
        "g" => Region::g(center, radius),
        "h" => Region::h(center, radius),
        "ring" => {
            let outer = cfg.get_f64("outer_radius")?.unwrap_or(3.0 * radius);
            Region::ring_h(center, radius, outer)
        }
        other => Err(Error::InvalidInput(format!(
            "region must be one of box, ball, g, h, ring; got {other:?}"
        ))),
    }
}

fn geometry_cmd(cli: &Cli, cfg: &Config, csv: Option<&std::path::Path>) -> Result<ExitCode> {
    let region = region_from_config(cfg)?;
    let cells = cfg.get_u64("cells")?.unwrap_or(64) as u32;
    let n_boundary = cfg.get_usize("boundary_samples")?.unwrap_or(256);
    let measure = geometry::region_measure(&region, cells)?;
    let diameter = geometry::region_diameter(&region, n_boundary)?;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "region": region,
        "measure": measure,
        "diameter": diameter,
        "bounding_box": region.bounding_box(),
        "closed_form_box_area": match region {
            Region::Box { center, radius } => Some(geometry::box_area(center, radius)),
            _ => None,
        },
    });
    emit(cli.out.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
    if let Some(path) = csv {
        let (nx, ny) = grid_shape(cli, cfg, (256, 256))?;
        std::fs::write(path, geometry::region_csv(&region, nx, ny))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn constants_cmd(cli: &Cli, cfg: &Config, c_nu: Option<f64>) -> Result<ExitCode> {
    let mut params = FullParams::from_config(cfg)?;
    if let Some(v) = c_nu {
        params.suite.engine.c_nu = Some(v);
    }
    let ledger = engine::build_ledger(&params.suite.engine)?;
    emit(cli.out.as_deref(), &ledger.to_json()?)?;
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(cli: &Cli, cfg: &Config, csv: Option<&std::path::Path>) -> Result<ExitCode> {
    let (n1, n2) = grid_shape(cli, cfg, (65, 65))?;
    let grid = Grid::new(n1, n2, window_of(cli, cfg)?)?;
    let seed = seed_of(cli, cfg)?;
    let lambda = cfg.get_f64("lambda")?.unwrap_or(0.5);
    let big_lambda = cfg.get_f64("big_lambda")?.unwrap_or(2.0);
    let case = Manufactured::parse(cfg.get_str("case").unwrap_or("mixed"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = random_admissible(&mut rng, lambda, big_lambda);
    let sol = solve_dirichlet(
        &grid,
        move |_| coeffs,
        move |_| case.forcing(&coeffs),
        move |p| case.exact(p),
        lambda,
        big_lambda,
    )?;
    let mut sup_error = 0.0f64;
    for j in 0..grid.n2 {
        for i in 0..grid.n1 {
            sup_error = sup_error.max((sol.value(i, j) - case.exact(grid.point(i, j))).abs());
        }
    }
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "grid": { "n1": grid.n1, "n2": grid.n2, "window": grid.window },
        "seed": seed,
        "case": case.name(),
        "coeffs": coeffs,
        "residual": sol.residual,
        "refinement_steps": sol.refinement_steps,
        "min": sol.min(),
        "max": sol.max(),
        "sup_error_vs_exact": sup_error,
    });
    emit(cli.out.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
    if let Some(path) = csv {
        std::fs::write(path, sol.to_csv())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(cli: &Cli, cfg: &Config) -> Result<ExitCode> {
    let lambda = cfg.get_f64("lambda")?.unwrap_or(0.5);
    let big_lambda = cfg.get_f64("big_lambda")?.unwrap_or(2.0);
    let alpha = match cfg.get_f64("alpha")? {
        Some(a) => a,
        None => barrier_alpha(lambda, big_lambda)?,
    };
    let y = cfg
        .get_pair("center")?
        .map_or(Point2::new(0.3, 0.0), |(a, b)| Point2::new(a, b));
    let r = cfg.get_f64("radius")?.unwrap_or(0.25);
    let samples = cfg.get_usize("samples")?.unwrap_or(10_000);
    let seed = seed_of(cli, cfg)?;
    let theta = cfg.get_f64("theta")?.unwrap_or(0.7);
    let field = match cfg.get_str("field").unwrap_or("identity") {
        "identity" => Coeffs::IDENTITY,
        "rotated" => Coeffs::rotated(lambda, big_lambda, theta),
        "random" => random_admissible(&mut ChaCha8Rng::seed_from_u64(seed), lambda, big_lambda),
        other => {
            return Err(Error::InvalidInput(format!(
                "field must be identity, rotated, or random; got {other:?}"
            )))
        }
    };

    let bare = matches!(cfg.get_str("mode"), Some("power"));
    let barrier = if bare {
        RingBarrier::sigma_power(alpha, y, r)?
    } else {
        RingBarrier::new(alpha, y, r)?
    };
    let check =
        barriers::subsolution_check_for(&barrier, move |_| field, lambda, big_lambda, samples, seed)?;
    let boundary_residuals = if bare {
        None
    } else {
        Some(barrier.boundary_residuals(256)?)
    };
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "barrier": barrier,
        "field": field,
        "check": check,
        "boundary_residuals": boundary_residuals,
    });
    emit(cli.out.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
    Ok(if check.pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn suite_cmd(cli: &Cli, cfg: &Config) -> Result<ExitCode> {
    let mut params = FullParams::from_config(cfg)?;
    if let Some(s) = cli.seed {
        params.suite.seed = s;
    }
    if let Some(g) = &cli.grid {
        params.suite.grid = Grid::parse_shape(g)?;
    }
    if let Some(w) = &cli.window {
        params.suite.window = parse_window(w)?;
    }
    let report = run_full(&params)?;
    emit(cli.out.as_deref(), &report.to_json()?)?;
    Ok(if report.overall_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

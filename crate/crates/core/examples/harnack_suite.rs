//! End-to-end verification run: solve an ensemble of random nonnegative
//! problems, test the measure-theoretic gates and the Harnack quotient on
//! each, and check that rescaling the data only rescales the solution.

use grushin_harnack::harness::{run_metamorphic, run_suite, SuiteParams};

fn main() {
    // trimmed ensemble so the example finishes in seconds; defaults are larger
    let params = SuiteParams {
        grid: (65, 65),
        runs: 8,
        zero_forcing_runs: 3,
        power_decay_runs: 1,
        abp_runs: 4,
        ..SuiteParams::default()
    };

    let report = run_suite(&params).unwrap();

    println!("ensemble of {} runs on a {}x{} grid", report.runs.len(), params.grid.0, params.grid.1);
    println!(
        "{:>4} {:<8} {:>12} {:>12} {:>10}  checks",
        "run", "kind", "quotient", "refined", "delta"
    );
    for r in &report.runs {
        let flags: Vec<String> = r
            .checks
            .iter()
            .map(|c| {
                let mark = if c.vacuous { "~" } else if c.pass { "+" } else { "-" };
                format!("{}{}", mark, c.check)
            })
            .collect();
        println!(
            "{:>4} {:<8} {:>12.4} {:>12.4} {:>9.2}%  {}",
            r.run_id,
            r.kind,
            r.quotient_primary,
            r.quotient_refined,
            100.0 * r.quotient_delta_rel,
            flags.join(" ")
        );
    }

    let e = &report.ensemble;
    println!("\nchecks: {} passed, {} failed, {} vacuous", e.checks_passed, e.checks_failed, e.checks_vacuous);
    println!("largest quotient drift under grid refinement: {:.2}%", 100.0 * e.max_quotient_delta_rel);
    println!("fitted maximum-principle constant: {:.4}", report.abp.fitted_c);
    println!("zero-forcing dip: {:.2e}", report.abp.max_zero_forcing_dip);

    let meta = run_metamorphic(&params, &[0.1, 1.0, 7.0]).unwrap();
    println!("\nscaling the data by t in {:?}:", meta.scales);
    println!("  pass/vacuous flags invariant: {}", meta.flags_invariant);
    println!("  quotient identity deviation:  {:.2e}  (exact up to rounding)", meta.max_identity_deviation);

    println!("\noverall pass: {}", report.overall_pass);
}

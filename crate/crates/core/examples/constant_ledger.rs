//! Builds the full constant ledger for the worked parameter set and prints
//! every derived quantity with the formula it came from.  Constants whose
//! value overflows f64 are carried in log space and printed as ln(value).

use grushin_harnack::engine::{build_ledger, DbCdInput, PdHypothesis, PdSetup};

fn main() {
    let setup = PdSetup {
        input: DbCdInput { gamma: 0.5, c: 0.5, eps: 0.5, eta: 2.0, nu: 0.05 },
        k: 1.0,
        alpha_h: 1.0,
        beta_h: 1.0,
        c_d: 4.0,
        delta_rd: 0.25,
        hypothesis: PdHypothesis::RingCondition,
        c_nu: None,
    };

    let ledger = build_ledger(&setup).unwrap();

    println!("{:<14} {:>18}  {}", "name", "value", "formula");
    println!("{}", "-".repeat(78));
    for e in ledger.entries() {
        match (e.value, e.ln_value) {
            (Some(v), _) => println!("{:<14} {:>18.10} {}", e.name, v, e.formula),
            (None, Some(l)) => println!("{:<14} ln = {:>13.6} {}", e.name, l, e.formula),
            _ => println!("{:<14} {:>18} {}", e.name, "-", e.formula),
        }
    }

    println!("\nhead of the nested-radii sequence (must stay in (1/2, 3/4]):");
    for (k, t) in ledger.t_head.iter().enumerate() {
        println!("  T_{} = {:.12}", k + 1, t);
    }
    println!("  limit = {:.12}", ledger.t_limit);

    println!("\nself-consistency residual across the ledger identities: {:.3e}", ledger.identity_residual());
}

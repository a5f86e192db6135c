//! Streaming MSA total weight against the curve c_2 / k.

use msa_lab::streaming::{run_stream, C1Scaling, RevealOrder};
use msa_lab::{FieldChoice, Seed};

fn main() -> msa_lab::Result<()> {
    let (points, state) = run_stream(40, 1, Seed::new(9), RevealOrder::Random, C1Scaling::AcycleSize, FieldChoice::Gf2, 60)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "k", "weight", "c1 * weight", "c2 / k");
    for p in points.iter().step_by(2) {
        println!("{:>6} {:>12.4} {:>12.4} {:>12.4}", p.k, p.total_weight, p.c1_scaled, p.conjecture);
    }
    println!("after {} reveals: total weight {:.5}", state.k(), state.total_weight());
    Ok(())
}

//! Kolmogorov distance between rescaled MSA weights and the limit, as n grows.

use msa_lab::experiment::{run_bulk, Experiment};

fn main() -> msa_lab::Result<()> {
    for n in [50, 100, 200, 400, 800] {
        let r = run_bulk(&Experiment::new(n, 1, 1.0, 20, 1))?;
        println!("n = {n:>4}: mean K = {:.4} (se {:.4})", r.kolmogorov.mean, r.kolmogorov.se);
    }
    Ok(())
}

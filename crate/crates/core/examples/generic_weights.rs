//! Exponential weights and weighted Y(n, p): the F-transformed bulk measure.

use msa_lab::experiment::{run_bulk, Experiment};
use msa_lab::sampler::{weighted_y, Seed};
use msa_lab::{kruskal_msa, FieldChoice, WeightLaw};

fn main() -> msa_lab::Result<()> {
    let mut exp = Experiment::new(300, 1, 1.0, 20, 2);
    exp.law = WeightLaw::Exponential { rate: 1.0 };
    let r = run_bulk(&exp)?;
    println!("exponential(1), n = 300: mean K = {:.4}", r.kolmogorov.mean);

    let n = 200;
    for c in [0.8, 1.0, 1.5] {
        let p = c * (n as f64).ln() / n as f64;
        let hits = (0..50)
            .filter(|&i| kruskal_msa(&weighted_y(n, 1, p, Seed::new(i), &WeightLaw::Uniform01).unwrap(), FieldChoice::Gf2).exists)
            .count();
        println!("weighted Y({n}, {p:.4}): spanning acycle in {hits}/50 samples");
    }
    Ok(())
}

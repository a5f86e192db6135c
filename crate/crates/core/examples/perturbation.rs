//! Small noise moves MSA weights by at most its sup norm.

use msa_lab::experiment::{run_perturbation, Experiment};
use msa_lab::sampler::{Amplitude, NoiseMode, NoiseSpec};

fn main() -> msa_lab::Result<()> {
    for mode in [NoiseMode::Iid, NoiseMode::CommonShift] {
        let noise = NoiseSpec { amplitude: "n^-2".parse::<Amplitude>()?, mode };
        for n in [100, 300] {
            let r = run_perturbation(&Experiment::new(n, 1, 1.0, 10, 3), &noise)?;
            let worst = r.rows.iter().map(|x| x.matching_shift / x.sup_norm).fold(0.0, f64::max);
            println!(
                "{mode:?} n = {n}: max shift / sup norm = {worst:.3}, mean K(mu', mu) = {:.5}",
                r.kolmogorov.mean
            );
        }
    }
    Ok(())
}

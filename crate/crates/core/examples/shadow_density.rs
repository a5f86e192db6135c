//! Shadow of Y_1(n, c/n) against the giant-component prediction (1 - t(c))^2.

use msa_lab::msa::{shadow, ShadowMode, StrictThreshold};
use msa_lab::sampler::{augmented_complex, Seed, WeightLaw};
use msa_lab::{FieldChoice, LimitLaw, Weight};

fn main() -> msa_lab::Result<()> {
    let n = 1500;
    let law = LimitLaw::new(1)?;
    let c = augmented_complex(n, 1, 1.0, Seed::new(5), &WeightLaw::Uniform01)?;
    println!("{:>5} {:>10} {:>10}", "c", "empirical", "s(c)");
    for k in 1..=8 {
        let x = 0.5 * k as f64;
        let thr = StrictThreshold::below(Weight::Finite(x / n as f64));
        let r = shadow(&c, thr, ShadowMode::Sampled(20_000), FieldChoice::Gf2, Seed::new(k))?;
        println!("{x:>5.1} {:>10.4} {:>10.4}", r.density, law.s_of_x(x));
    }
    Ok(())
}

//! Sample Y_d(n, p) and its augmented weighted version, then print the JSON.

use msa_lab::sampler::{augmented_complex, sample_y, Seed, WeightLaw};

fn main() -> msa_lab::Result<()> {
    let (n, d, p) = (8, 2, 0.3);
    let seed = Seed::new(42);
    let faces = sample_y(n, d, p, seed)?;
    println!("Y_{d}({n}, {p}) has {} of {} triangles", faces.len(), msa_lab::complex::binomial(n as u64, 3));

    let c = augmented_complex(n, d, p, seed, &WeightLaw::Uniform01)?;
    println!("augmented complex: {} weighted faces, absent ones at {}", c.present().len(), c.ceiling());
    println!("{}", c.to_json()?);
    Ok(())
}

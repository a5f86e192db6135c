//! Death times of (d-1)-cycles coincide with the MSA weights.

use msa_lab::sampler::{augmented_complex, Seed, WeightLaw};
use msa_lab::{kruskal_msa, persistence_deaths, FieldChoice};

fn main() -> msa_lab::Result<()> {
    let c = augmented_complex(25, 1, 0.5, Seed::new(3), &WeightLaw::Uniform01)?;
    let deaths = persistence_deaths(&c, FieldChoice::Gf2);
    let msa = kruskal_msa(&c, FieldChoice::Gf2);

    let mut a: Vec<f64> = deaths.deaths.iter().map(|w| w.as_f64()).collect();
    a.extend(std::iter::repeat_n(1.0, deaths.ceiling_deaths));
    let mut b: Vec<f64> = msa.faces.iter().map(|f| f.1.as_f64()).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);

    println!("{} deaths ({} at the ceiling), {} MSA faces", a.len(), deaths.ceiling_deaths, b.len());
    println!("identical multisets: {}", a == b);
    println!("largest death {:.5}", a.last().copied().unwrap_or(f64::NAN));
    Ok(())
}

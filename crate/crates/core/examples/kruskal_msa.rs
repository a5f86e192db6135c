//! Minimal spanning acycle of a random 2-complex by the greedy matroid pass.

use msa_lab::complex::face_unrank;
use msa_lab::sampler::{augmented_complex, Seed, WeightLaw};
use msa_lab::{kruskal_msa, FieldChoice};

fn main() -> msa_lab::Result<()> {
    let (n, d) = (7, 2);
    let c = augmented_complex(n, d, 1.0, Seed::new(1), &WeightLaw::Uniform01)?;
    let msa = kruskal_msa(&c, FieldChoice::Gf2);
    println!("spanning acycle of size {} (C(n-1, d) = {})", msa.faces.len(), c.acycle_size());
    for &(r, w) in &msa.faces {
        println!("  {:?}  w = {w}", face_unrank(r, n, d)?.vertices());
    }
    println!("total weight {:.6}", msa.total_weight());
    Ok(())
}

//! Boundary ranks over GF(2), GF(1009) and Q; the six-vertex projective plane
//! has 2-torsion, so GF(2) sees one rank fewer than characteristic zero.

use msa_lab::complex::{boundary_ranks, face_rank, Face};
use msa_lab::FieldChoice;

fn rank(field: FieldChoice, n: u32, faces: &[u64]) -> usize {
    let mut basis = field.basis(msa_lab::complex::binomial(n as u64, 2) as usize);
    for &r in faces {
        let col: Vec<(usize, i8)> = boundary_ranks(r, n, 2).iter().map(|&(t, s)| (t as usize, s)).collect();
        basis.absorb_signed(&col);
    }
    basis.rank()
}

fn main() -> msa_lab::Result<()> {
    let rp2 = [
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
        [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
    ];
    let faces: Vec<u64> = rp2
        .iter()
        .map(|v| face_rank(&Face::new(v, 6)?, 6))
        .collect::<msa_lab::Result<_>>()?;
    for field in [FieldChoice::Gf2, FieldChoice::GfP(1009), FieldChoice::Rational] {
        println!("{:>10}: rank of the boundary of RP^2 = {}", field.to_string(), rank(field, 6, &faces));
    }
    Ok(())
}

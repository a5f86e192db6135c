//! Threshold constants, density and moments of the limiting bulk measure.

use msa_lab::LimitLaw;

fn main() -> msa_lab::Result<()> {
    for d in 1..=3 {
        let law = LimitLaw::new(d)?;
        println!(
            "d = {d}: t_* = {:.7}, c_* = {:.7}, mean = {:.7}, second moment = {:.5}",
            law.t_star(),
            law.c_star(),
            law.mu_moment(1.0)?,
            law.mu_moment(2.0)?
        );
    }
    let law = LimitLaw::new(2)?;
    println!("\n   x   density      tail");
    for i in 0..=12 {
        let x = 0.5 * i as f64;
        println!("{x:>4.1} {:>9.5} {:>9.5}", law.mu_density(x), law.mu_tail(x));
    }
    Ok(())
}

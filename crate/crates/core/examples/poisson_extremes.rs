//! Counts of extremal MSA weights and nearest-face distances against a Poisson
//! process with intensity e^{-x}.

use msa_lab::experiment::{default_intervals, run_extremes, Experiment};

fn main() -> msa_lab::Result<()> {
    let r = run_extremes(&Experiment::new(300, 1, 1.0, 200, 7), &default_intervals())?;
    println!("{:>14} {:>8} {:>8} {:>8} {:>8}", "interval", "target", "msa", "nearest", "var/mean");
    for (a, b) in r.msa.intervals.iter().zip(&r.nearest.intervals) {
        println!(
            "{:>14} {:>8.3} {:>8.3} {:>8.3} {:>8.3}",
            format!("({}, {}]", a.interval.lo, a.interval.hi),
            a.targets[0],
            a.mean,
            b.mean,
            a.dispersion()
        );
    }
    for (c, gap) in &r.discrepancy {
        println!("E|nu(c,inf) - nu'(c,inf)| at c = {c}: {gap:.3}");
    }
    Ok(())
}

//! Semi-wave speeds `c_μ` increase with `μ` towards the minimal KPP speed
//! `c_*`.

use nonlocal_front::semiwave::{kpp_min_speed, speed_table, SemiWaveNumerics};
use nonlocal_front::{Kernel, Reaction};

fn main() -> nonlocal_front::Result<()> {
    let r = Reaction::logistic();
    let num = SemiWaveNumerics::new(0.05, 30.0);
    for (name, k) in [("gaussian", Kernel::gaussian()), ("epanechnikov", Kernel::epanechnikov())] {
        let c_star = kpp_min_speed(&k, &r, 1.0)?;
        let table = speed_table(&k, &r, 1.0, &[0.5, 1.0, 10.0, 100.0], &num)?;
        println!("{name}: c_* = {c_star:.5}");
        println!("{:>8} {:>10} {:>10} {:>12} {:>6}", "mu", "c_mu", "c_* - c", "flux resid", "iters");
        for e in &table.entries {
            println!(
                "{:>8} {:>10.5} {:>10.5} {:>12.2e} {:>6}",
                e.mu,
                e.c,
                c_star - e.c,
                e.flux_residual,
                e.outer_iterations
            );
        }
        println!();
    }
    Ok(())
}

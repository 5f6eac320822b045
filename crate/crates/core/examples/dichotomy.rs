//! Spreading or vanishing. With `d` above `f'(0)` a small initial range
//! with weak boundary expansion dies out, while a large `μ` or `h0` lets
//! the population spread.

use nonlocal_front::free_boundary::{classify, run, InitialProfile, Numerics, ProblemSpec};
use nonlocal_front::stationary::{solve_steady, SteadyNumerics};
use nonlocal_front::{Kernel, Reaction};

fn main() -> nonlocal_front::Result<()> {
    let k = Kernel::epanechnikov();
    let r = Reaction::logistic();
    let d = 3.0;
    let u = solve_steady(&k, &r, d, &SteadyNumerics::new(0.05, 30.0))?;
    let numerics = Numerics::new(0.05, 0.05).with_sampling(1.0).with_probes(vec![0.5, 2.0]);

    println!("{:>6} {:>5} {:>11} {:>10} {:>11}", "mu", "h0", "fate", "h(120)", "max u");
    for mu in [0.05, 0.5, 5.0] {
        for h0 in [0.5, 2.0, 4.0] {
            let spec = ProblemSpec::new(k.clone(), r.clone(), d, mu, h0, InitialProfile::Default)?;
            let traj = run(&spec, 120.0, &numerics)?;
            let c = classify(&traj, &u)?;
            println!(
                "{mu:>6} {h0:>5} {:>11} {:>10.3} {:>11.3e}",
                format!("{:?}", c.fate),
                traj.h.last().unwrap(),
                c.final_max_u
            );
        }
    }
    Ok(())
}

//! Half-line Cauchy problem: `w` converges to the steady state on
//! `[0, c_* t/2]`, stays negligible beyond `1.2 c_* t`, and dominates the
//! free-boundary solution started one time unit later.

use nonlocal_front::free_boundary::{InitialProfile, Numerics, ProblemSpec};
use nonlocal_front::halfline::{run_halfline, upper_solution_check, HalflineSpec};
use nonlocal_front::semiwave::kpp_min_speed;
use nonlocal_front::stationary::{solve_steady, SteadyNumerics};
use nonlocal_front::{Kernel, Reaction};

fn main() -> nonlocal_front::Result<()> {
    let k = Kernel::gaussian();
    let r = Reaction::logistic();
    let spec = HalflineSpec {
        kernel: k.clone(),
        reaction: r.clone(),
        d: 1.0,
        w0: InitialProfile::Default,
        support: 4.0,
        length: 120.0,
    };
    let c_star = kpp_min_speed(&k, &r, 1.0)?;
    let u = solve_steady(&k, &r, 1.0, &SteadyNumerics::new(0.05, 24.0))?;
    let numerics = Numerics::new(0.05, 0.1).with_sampling(5.0).with_snapshots(10.0);
    let out = run_halfline(&spec, 40.0, &numerics, &[0.1, 0.5, 0.9])?;

    println!("c_* = {c_star:.5}");
    println!("{:>6} {:>6} {:>10} {:>10} {:>10}", "t", "level", "inf E", "sup E", "sup E / t");
    for s in out.level_samples.iter().filter(|s| s.t > 0.0) {
        let sup = s.set.sup().unwrap_or(f64::NAN);
        println!(
            "{:>6.0} {:>6.1} {:>10.3} {:>10.3} {:>10.4}",
            s.t,
            s.lambda,
            s.set.inf().unwrap_or(f64::NAN),
            sup,
            sup / s.t
        );
    }

    let last = out.snapshots.last().unwrap();
    let f = &last.field;
    let near = (0..=f.m())
        .take_while(|&i| f.x(i) <= 0.5 * c_star * last.t)
        .map(|i| (f.values()[i] - u.value_at(f.x(i))).abs())
        .fold(0.0, f64::max);
    let far = (0..=f.m())
        .filter(|&i| f.x(i) >= 1.2 * c_star * last.t)
        .map(|i| f.values()[i])
        .fold(0.0, f64::max);
    println!();
    println!("max |w - U| on [0, c_* t/2]  {near:.3e}");
    println!("max w on [1.2 c_* t, L]     {far:.3e}");

    let problem = ProblemSpec::new(k, r, 1.0, 2.0, 2.0, InitialProfile::Plateau { amplitude: 0.3 })?;
    let pair = upper_solution_check(&problem, &spec, 40.0, &Numerics::new(0.05, 0.1))?;
    println!("w(t+1) ≥ u(t): {} (max u - w = {:.3e})", pair.holds, pair.max_u_excess);
    Ok(())
}

//! Behind the front the solution settles onto the steady state; level sets
//! of `u` move at speed `c_μ`.

use nonlocal_front::analysis::{level_set, level_set_track, sup_distance_on_cone};
use nonlocal_front::free_boundary::{run, InitialProfile, Numerics, ProblemSpec};
use nonlocal_front::semiwave::{solve_semiwave, SemiWaveNumerics};
use nonlocal_front::stationary::{solve_steady, SteadyNumerics};
use nonlocal_front::{Kernel, Reaction};

fn main() -> nonlocal_front::Result<()> {
    let t_end = 300.0;
    let spec = ProblemSpec::new(Kernel::epanechnikov(), Reaction::logistic(), 1.0, 2.0, 2.0, InitialProfile::Default)?;
    let traj = run(&spec, t_end, &Numerics::new(0.05, 0.05).with_sampling(1.0).with_snapshots(30.0))?;
    let wave = solve_semiwave(&spec.kernel, &spec.reaction, 1.0, 2.0, &SemiWaveNumerics::new(0.05, 30.0))?;
    let u = solve_steady(&spec.kernel, &spec.reaction, 1.0, &SteadyNumerics::new(0.05, 30.0))?;

    println!("c_mu = {:.5}, U(0) = {:.5}", wave.c, u.values[0]);
    println!("{:>6} {:>14} {:>12} {:>12}", "t", "|u-U| on cone", "inf E_low/t", "sup E_half/t");
    let cone = sup_distance_on_cone(&traj.snapshots, &u, 0.5 * wave.c);
    let low = level_set_track(&traj.snapshots, 0.5 * u.values[0]);
    let half = level_set_track(&traj.snapshots, 0.5);
    for k in 1..traj.snapshots.len() {
        let t = traj.snapshots[k].t;
        let ratio = |x: Option<f64>| x.map_or(f64::NAN, |x| x / t);
        println!(
            "{:>6.0} {:>14.3e} {:>12.5} {:>12.5}",
            t,
            cone[k].distance,
            ratio(low[k].set.inf()),
            ratio(half[k].set.sup())
        );
    }

    let lambda = 0.5 * (u.values[0] + 1.0);
    let last = &traj.snapshots.last().unwrap().field;
    println!();
    println!(
        "level {lambda:.4}: inf E = {:.5}, steady crossing X = {:.5}",
        level_set(last, lambda).inf().unwrap_or(f64::NAN),
        u.inverse_level(lambda)?
    );
    Ok(())
}

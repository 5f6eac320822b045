//! Ordered data stay ordered: larger `μ`, `h0` and `u0` give a larger
//! solution and boundary at every time.

use nonlocal_front::free_boundary::{compare_runs, InitialProfile, Mutation, Numerics, ProblemSpec};
use nonlocal_front::{Kernel, Reaction};

fn main() -> nonlocal_front::Result<()> {
    let k = Kernel::gaussian();
    let r = Reaction::logistic();
    let a = ProblemSpec::new(k.clone(), r.clone(), 1.0, 1.0, 1.5, InitialProfile::Plateau { amplitude: 0.3 })?;
    let b = ProblemSpec::new(k, r, 1.0, 2.0, 2.0, InitialProfile::Plateau { amplitude: 0.6 })?;

    for mutation in [Mutation::None, Mutation::FlipFluxSign] {
        let numerics = Numerics::new(0.05, 0.05).with_sampling(0.5).with_mutation(mutation);
        let rep = compare_runs(&a, &b, 20.0, &numerics)?;
        println!(
            "{mutation:?}: ordered = {}, max u_A - u_B = {:.3e}, max h_A - h_B = {:.3e}",
            rep.holds, rep.max_u_excess, rep.max_h_excess
        );
        if let Some(v) = rep.first_violation {
            println!("  first violation at t = {}, x = {:?}: {} > {}", v.t, v.x, v.lower, v.upper);
        }
    }
    Ok(())
}

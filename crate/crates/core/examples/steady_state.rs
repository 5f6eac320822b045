//! Steady state of the half-line problem and its approximation by truncated
//! kernels `J_n = J·1_{[-n,n]}`.

use nonlocal_front::stationary::{solve_steady, solve_steady_truncated, SteadyNumerics};
use nonlocal_front::{Kernel, Reaction, TruncatedKernel};

fn main() -> nonlocal_front::Result<()> {
    let r = Reaction::logistic();
    let num = SteadyNumerics::new(0.05, 24.0);
    for (name, k) in [("epanechnikov", Kernel::epanechnikov()), ("gaussian", Kernel::gaussian())] {
        let u = solve_steady(&k, &r, 1.0, &num)?;
        println!(
            "{name:<13} U(0) = {:.6}  U(2) = {:.6}  residual {:.1e}  independent {:.1e}  monotone {}",
            u.values[0],
            u.value_at(2.0),
            u.residual,
            u.independent_residual(&k, &r, 1.0),
            u.is_monotone(1e-10)
        );
    }

    let full = solve_steady(&Kernel::gaussian(), &r, 1.0, &num)?;
    println!();
    println!("{:>5} {:>10} {:>10} {:>12}", "n", "|J_n|_1", "plateau", "|U_n - U|");
    for n in [1.0, 1.5, 2.0, 3.0, 4.0] {
        let tk = TruncatedKernel::new(Kernel::gaussian(), n)?;
        let p = solve_steady_truncated(&tk, &r, 1.0, &num)?;
        let dist = p.values.iter().zip(&full.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!("{n:>5.1} {:>10.6} {:>10.6} {dist:>12.3e}", tk.l1_norm(), p.plateau);
    }
    Ok(())
}

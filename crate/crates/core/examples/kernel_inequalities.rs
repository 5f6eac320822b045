//! Two quadrature checks on the kernel: the cutoff-function inequality
//! `∫_l^{k2} J(x-y)ψ(y)dy ≥ (1-ε)ψ(x)` on `[k0, k2]`, and the growth of the
//! boundary flux `∫_0^h ∫_h^∞ J(x-y) dy dx` for algebraic kernels.

use nonlocal_front::analysis::{psi_recipe, verify_flux_asymptotics, verify_psi_inequality};
use nonlocal_front::Kernel;

fn main() -> nonlocal_front::Result<()> {
    println!("{:<14} {:>5} {:>10} {:>12}", "kernel", "eps", "k0", "worst margin");
    for (name, k) in [
        ("epanechnikov", Kernel::epanechnikov()),
        ("gaussian", Kernel::gaussian()),
        ("algebraic 1.8", Kernel::algebraic(1.8)?),
    ] {
        for eps in [0.05, 0.1, 0.2] {
            let p = psi_recipe(&k, 1.0, eps)?;
            let rep = verify_psi_inequality(&k, &p)?;
            println!("{name:<14} {eps:>5} {:>10.3} {:>12.4e}", p.k0, rep.worst_margin);
        }
    }

    let ladder = [100.0, 300.0, 1000.0, 3000.0, 10000.0];
    println!();
    for gamma in [1.2, 1.5, 1.8, 2.0] {
        let s = verify_flux_asymptotics(&Kernel::algebraic(gamma)?, &ladder)?;
        match (s.expected_slope, s.log_ratio_band) {
            (Some(e), _) => println!("gamma {gamma}: log-log slope {:.4}, expected {e:.4}", s.slope),
            (None, Some(b)) => println!("gamma {gamma}: flux / ln h varies by a factor {b:.4}"),
            _ => {}
        }
    }
    Ok(())
}

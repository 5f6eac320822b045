//! Heavy-tailed kernels `J(x) ∝ (1 + |x|)^-γ`: the front accelerates like
//! `t^{1/(γ-1)}` for `γ < 2` and like `t ln t` at `γ = 2`.
//!
//! ```text
//! cargo run --release --example accelerated_spreading [gamma]
//! ```

use nonlocal_front::analysis::{fit_power, fit_tlnt, Window};
use nonlocal_front::free_boundary::{run, InitialProfile, Numerics, ProblemSpec};
use nonlocal_front::{Kernel, Reaction};

fn main() -> nonlocal_front::Result<()> {
    let gamma: f64 = std::env::args().nth(1).map_or(1.8, |a| a.parse().expect("numeric gamma"));
    let (h0, t_end) = if gamma >= 2.0 { (10.0, 100.0) } else { (30.0, 80.0) };
    let spec = ProblemSpec::new(Kernel::algebraic(gamma)?, Reaction::logistic(), 1.0, 2.0, h0, InitialProfile::Default)?;
    let traj = run(&spec, t_end, &Numerics::new(0.1, 0.1).with_sampling(0.5))?;

    println!("{:>8} {:>14}", "t", "h(t)");
    for i in (0..traj.len()).step_by(traj.len() / 8) {
        println!("{:>8.1} {:>14.3}", traj.times[i], traj.h[i]);
    }
    let power = fit_power(&traj, Window::default_for(t_end))?;
    println!();
    println!("power fit exponent {:.4} ± {:.4}", power.leading(), power.band);
    if gamma < 2.0 {
        println!("predicted 1/(γ-1)  {:.4}", 1.0 / (gamma - 1.0));
    } else {
        let tlnt = fit_tlnt(&traj, Window::last_decade(t_end))?;
        println!(
            "h / (t ln t) stays within a factor {:.3} over the last decade",
            tlnt.ratio_band.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}

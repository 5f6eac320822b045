//! Desk-scale property suite across all modules.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{psi_recipe, verify_flux_asymptotics, verify_psi_inequality};
use crate::error::Result;
use crate::free_boundary::{compare_runs, run, InitialProfile, Mutation, Numerics, ProblemSpec};
use crate::grid_field::{Field, Stencil};
use crate::halfline::{upper_solution_check, HalflineSpec};
use crate::kernels::{Kernel, TruncatedKernel};
use crate::quadrature::piecewise_gauss;
use crate::reaction::Reaction;
use crate::semiwave::{kpp_min_speed, solve_semiwave, SemiWaveNumerics};
use crate::stationary::{solve_steady, solve_steady_truncated, SteadyNumerics};

/// Ordered pairs drawn per kernel family in the comparison suite.
pub const PAIRS_PER_FAMILY: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub mutation: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}/{}", c.suite, c.name))
            .collect()
    }

    /// Fixed-width table; identical inputs give identical bytes.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "seed {}  mutation {}", self.seed, if self.mutation { "flip-flux-sign" } else { "none" });
        let _ = writeln!(s, "{:<14} {:<40} {:<6} detail", "suite", "check", "result");
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "{:<14} {:<40} {:<6} {}", c.suite, c.name, verdict, c.detail);
        }
        let n_fail = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "{} checks, {} failed", self.checks.len(), n_fail);
        s
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn push(&mut self, suite: &'static str, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn record(&mut self, suite: &'static str, name: impl Into<String>, outcome: Result<(bool, String)>) {
        match outcome {
            Ok((passed, detail)) => self.push(suite, name, passed, detail),
            Err(e) => self.push(suite, name, false, format!("error: {e}")),
        }
    }
}

fn families() -> Vec<(&'static str, Kernel)> {
    vec![
        ("epanechnikov", Kernel::epanechnikov()),
        ("gaussian", Kernel::gaussian()),
        ("algebraic-1.8", Kernel::algebraic(1.8).expect("valid exponent")),
    ]
}

/// Runs every suite. With `mutate`, the comparison runs use a flipped
/// boundary flux and are expected to fail.
pub fn verify_all(seed: u64, mutate: bool) -> SuiteReport {
    let mut s = Suite { checks: Vec::new() };
    kernel_checks(&mut s);
    reaction_checks(&mut s);
    stencil_checks(&mut s);
    free_boundary_checks(&mut s);
    comparison_checks(&mut s, seed, mutate);
    steady_checks(&mut s);
    semiwave_checks(&mut s);
    halfline_checks(&mut s);
    analysis_checks(&mut s);
    SuiteReport {
        seed,
        mutation: mutate,
        checks: s.checks,
    }
}

fn kernel_checks(s: &mut Suite) {
    for (name, k) in families() {
        let r = 40.0;
        let breaks: Vec<f64> = (0..=4000).map(|i| r * i as f64 / 4000.0).collect();
        let mass = 2.0 * (piecewise_gauss(|x| k.eval(x), 0.0, r, &breaks) + k.tail(r));
        let err = (mass - 1.0).abs();
        s.push("kernels", format!("{name} unit mass"), err < 1e-6, format!("|mass-1| = {err:.2e}"));
        let tails: Vec<f64> = (0..200).map(|i| k.tail(0.1 * i as f64)).collect();
        let monotone = tails.windows(2).all(|w| w[1] <= w[0]);
        let half = (k.tail(0.0) - 0.5).abs();
        s.push(
            "kernels",
            format!("{name} tail shape"),
            monotone && half < 1e-12,
            format!("|tail(0)-1/2| = {half:.2e}"),
        );
    }
}

fn reaction_checks(s: &mut Suite) {
    for (name, r) in [
        ("logistic", Reaction::logistic()),
        ("polynomial", Reaction::polynomial(vec![0.0, 2.0, -1.0, -1.0]).expect("KPP polynomial")),
    ] {
        let us = r.u_star();
        let per_capita: Vec<f64> = (1..=100).map(|i| r.per_capita(us * i as f64 / 100.0)).collect();
        let ok = r.value(0.0) == 0.0 && r.value(us).abs() < 1e-12 && per_capita.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        s.push("reaction", format!("{name} KPP structure"), ok, format!("u* = {us:.6}"));
    }
}

fn stencil_checks(s: &mut Suite) {
    for (name, k) in families() {
        let dx = 0.05;
        let h = 6.0;
        let outcome = (|| -> Result<(bool, String)> {
            let field = Field::from_fn(dx, h, |_| 1.0)?;
            let mut stencil = Stencil::new(&k, dx)?;
            stencil.ensure(field.m());
            let mut out = vec![0.0; field.m() + 1];
            stencil.convolve(&field, &mut out);
            // Interior hats integrate a constant exactly; compare nodes whose
            // hats do not touch the tapered last cell.
            let err = (0..field.m().saturating_sub(1))
                .map(|i| {
                    let x = field.x(i);
                    (out[i] - (k.tail(x - h) - k.tail(x))).abs()
                })
                .fold(0.0, f64::max);
            Ok((err < 1e-6, format!("max error {err:.2e}")))
        })();
        s.record("grid_field", format!("{name} constant convolution"), outcome);
    }
}

fn free_boundary_checks(s: &mut Suite) {
    for (name, k) in families() {
        let outcome = (|| -> Result<(bool, String)> {
            let spec = ProblemSpec::new(k.clone(), Reaction::logistic(), 1.0, 2.0, 2.0, InitialProfile::Default)?;
            let traj = run(&spec, 10.0, &Numerics::new(0.05, 0.05).with_sampling(0.5))?;
            let grows = traj.h.windows(2).all(|w| w[1] >= w[0]);
            let bounded = traj.u_max.iter().all(|u| *u <= 1.0 + 1e-12);
            let h_end = traj.h.last().copied().unwrap_or(f64::NAN);
            Ok((grows && bounded, format!("h(10) = {h_end:.6}")))
        })();
        s.record("free_boundary", format!("{name} h monotone, 0 <= u <= u*"), outcome);
    }
}

/// Ordered pair with `μ_A < μ_B`, `h0_A ≤ h0_B` and plateau amplitudes
/// `a_A ≤ a_B`.
fn random_pair(rng: &mut ChaCha8Rng, kernel: &Kernel) -> Result<(ProblemSpec, ProblemSpec)> {
    let mu_a = rng.gen_range(0.5..3.0);
    let mu_b = mu_a * rng.gen_range(1.2..2.0);
    let h_a = rng.gen_range(1.0..3.0);
    let h_b = h_a + rng.gen_range(0.0..1.0);
    let amp_a = rng.gen_range(0.1..0.7);
    let amp_b = amp_a + rng.gen_range(0.0..(1.0 - amp_a));
    let r = Reaction::logistic();
    let a = ProblemSpec::new(kernel.clone(), r.clone(), 1.0, mu_a, h_a, InitialProfile::Plateau { amplitude: amp_a })?;
    let b = ProblemSpec::new(kernel.clone(), r, 1.0, mu_b, h_b, InitialProfile::Plateau { amplitude: amp_b })?;
    Ok((a, b))
}

fn comparison_checks(s: &mut Suite, seed: u64, mutate: bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mutation = if mutate { Mutation::FlipFluxSign } else { Mutation::None };
    let numerics = Numerics::new(0.05, 0.05).with_mutation(mutation);
    for (name, k) in families() {
        for p in 0..PAIRS_PER_FAMILY {
            let outcome = random_pair(&mut rng, &k).and_then(|(a, b)| {
                let r = compare_runs(&a, &b, 10.0, &numerics)?;
                Ok((
                    r.holds,
                    format!(
                        "mu {:.3}/{:.3} h0 {:.3}/{:.3} max u excess {:.2e}",
                        a.mu, b.mu, a.h0, b.h0, r.max_u_excess
                    ),
                ))
            });
            s.record("comparison", format!("{name} pair {p}"), outcome);
        }
    }
}

fn steady_checks(s: &mut Suite) {
    let r = Reaction::logistic();
    for (name, k) in [("epanechnikov", Kernel::epanechnikov()), ("gaussian", Kernel::gaussian())] {
        let outcome = (|| -> Result<(bool, String)> {
            let u = solve_steady(&k, &r, 1.0, &SteadyNumerics::new(0.05, 24.0))?;
            let inside = u.values.iter().all(|v| *v > 0.0 && *v < u.plateau + 1e-10);
            let res = u.independent_residual(&k, &r, 1.0);
            Ok((
                u.is_monotone(1e-10) && inside && res < 1e-8,
                format!("U(0) = {:.6}, independent residual {res:.2e}", u.values[0]),
            ))
        })();
        s.record("stationary", format!("{name} profile"), outcome);
    }
    let outcome = (|| -> Result<(bool, String)> {
        let num = SteadyNumerics::new(0.05, 24.0);
        let full = solve_steady(&Kernel::gaussian(), &r, 1.0, &num)?;
        let mut dists = Vec::new();
        for n in [1.0, 1.5, 2.0, 3.0] {
            let tk = TruncatedKernel::new(Kernel::gaussian(), n)?;
            let p = solve_steady_truncated(&tk, &r, 1.0, &num)?;
            dists.push(p.values.iter().zip(&full.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        }
        let ok = dists.windows(2).all(|w| w[1] <= w[0]) && dists[dists.len() - 1] < 0.01;
        let detail = dists.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(" ");
        Ok((ok, format!("distances {detail}")))
    })();
    s.record("stationary", "gaussian truncation ladder", outcome);
}

fn semiwave_checks(s: &mut Suite) {
    let k = Kernel::gaussian();
    let r = Reaction::logistic();
    let outcome = (|| -> Result<(bool, String)> {
        let c_star = kpp_min_speed(&k, &r, 1.0)?;
        let num = SemiWaveNumerics::new(0.05, 30.0);
        let mut speeds = Vec::new();
        let mut shape_ok = true;
        for mu in [1.0, 10.0] {
            let w = solve_semiwave(&k, &r, 1.0, mu, &num)?;
            shape_ok &= w.is_decreasing(1e-10) && w.phi.last() == Some(&0.0) && w.flux_residual < 1e-6;
            speeds.push(w.c);
        }
        let ok = shape_ok && speeds[0] < speeds[1] && speeds[1] < c_star;
        Ok((ok, format!("c(1) = {:.5}, c(10) = {:.5}, c* = {c_star:.5}", speeds[0], speeds[1])))
    })();
    s.record("semiwave", "gaussian speeds below c*", outcome);
}

fn halfline_checks(s: &mut Suite) {
    let k = Kernel::epanechnikov();
    let outcome = (|| -> Result<(bool, String)> {
        let problem = ProblemSpec::new(k.clone(), Reaction::logistic(), 1.0, 2.0, 2.0, InitialProfile::Plateau { amplitude: 0.3 })?;
        let hl = HalflineSpec {
            kernel: k.clone(),
            reaction: Reaction::logistic(),
            d: 1.0,
            w0: InitialProfile::Default,
            support: 4.0,
            length: 40.0,
        };
        let r = upper_solution_check(&problem, &hl, 10.0, &Numerics::new(0.05, 0.05))?;
        Ok((r.holds, format!("max u - w {:.2e}", r.max_u_excess)))
    })();
    s.record("halfline", "upper solution", outcome);
}

fn analysis_checks(s: &mut Suite) {
    for (name, k) in families() {
        for eps in [0.05, 0.1, 0.2] {
            let outcome = psi_recipe(&k, 1.0, eps).and_then(|p| {
                let r = verify_psi_inequality(&k, &p)?;
                Ok((r.passed, format!("k0 = {:.3}, worst margin {:.3e}", p.k0, r.worst_margin)))
            });
            s.record("analysis", format!("{name} psi eps={eps}"), outcome);
        }
    }
    let outcome = Kernel::algebraic(1.5).and_then(|k| {
        let r = verify_flux_asymptotics(&k, &[100.0, 300.0, 1000.0, 3000.0, 10000.0])?;
        Ok((r.passed, format!("slope {:.4}", r.slope)))
    });
    s.record("analysis", "flux growth gamma=1.5", outcome);
}

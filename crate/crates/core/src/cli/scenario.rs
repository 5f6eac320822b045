//! Named presets that bundle a configuration with the experiment it feeds.

use std::io::Write;

use serde_json::json;

use super::{Manifest, RunConfig};
use crate::analysis::{
    estimate_linear_speed, fit_power, fit_tlnt, level_set, level_set_track, psi_recipe, sup_distance_on_cone,
    verify_flux_asymptotics, verify_psi_inequality, Window,
};
use crate::error::{Error, Result};
use crate::free_boundary::{classify, run, Fate, InitialProfile, Numerics, ProblemSpec};
use crate::halfline::{run_halfline, upper_solution_check};
use crate::kernels::{Kernel, KernelSpec};
use crate::semiwave::{kpp_min_speed, solve_semiwave};
use crate::stationary::{solve_steady, SteadyNumerics};

pub const SCENARIOS: [&str; 9] = [
    "speed-j1",
    "level-sets",
    "accel-gamma-1.5",
    "accel-gamma-1.8",
    "accel-gamma-2",
    "halfline",
    "flux-asymptotics",
    "psi-inequality",
    "dichotomy",
];

/// `(μ, h0)` grid of the dichotomy sweep.
pub const DICHOTOMY_SWEEP: [(f64, f64); 6] = [(0.05, 0.5), (0.2, 0.5), (0.5, 1.0), (2.0, 8.0), (5.0, 2.0), (20.0, 4.0)];

/// Configuration of a named preset.
pub fn preset(name: &str) -> Result<RunConfig> {
    let mut c = RunConfig {
        scenario: Some(name.to_string()),
        out: format!("out/{name}").into(),
        ..RunConfig::default()
    };
    match name {
        "speed-j1" | "level-sets" => {
            c.t_end = 300.0;
            c.numerics = Numerics::new(0.05, 0.05).with_sampling(0.5).with_snapshots(1.0);
        }
        "accel-gamma-1.5" | "accel-gamma-1.8" | "accel-gamma-2" => {
            let gamma = name.trim_start_matches("accel-gamma-").parse().expect("preset exponent");
            c.kernel = KernelSpec::Algebraic { gamma };
            (c.h0, c.t_end) = if name == "accel-gamma-2" { (10.0, 100.0) } else { (30.0, 80.0) };
            c.numerics = Numerics::new(0.1, 0.1).with_sampling(0.5);
        }
        "halfline" => {
            c.kernel = KernelSpec::Gaussian;
            c.t_end = 40.0;
            c.numerics = Numerics::new(0.05, 0.1).with_sampling(1.0).with_snapshots(1.0);
            c.steady = SteadyNumerics::new(0.05, 24.0);
        }
        "flux-asymptotics" | "psi-inequality" => {}
        "dichotomy" => {
            c.d = 3.0;
            c.t_end = 120.0;
            c.numerics = Numerics::new(0.05, 0.05).with_sampling(1.0).with_probes(vec![0.5, 2.0]);
        }
        other => {
            return Err(Error::Config(format!(
                "unknown scenario `{other}`; known: {}",
                SCENARIOS.join(", ")
            )))
        }
    }
    Ok(c)
}

/// Runs the experiment named by `config.scenario`.
pub fn run_scenario(config: &RunConfig) -> Result<Manifest> {
    let name = config
        .scenario
        .clone()
        .ok_or_else(|| Error::Config("scenario name missing".into()))?;
    config.validate()?;
    let mut m = Manifest::new(&format!("scenario {name}"), config);
    match name.as_str() {
        "speed-j1" => speed(config, &mut m)?,
        "level-sets" => level_sets(config, &mut m)?,
        "accel-gamma-1.5" | "accel-gamma-1.8" | "accel-gamma-2" => accelerated(config, &mut m)?,
        "halfline" => halfline(config, &mut m)?,
        "flux-asymptotics" => flux(&mut m)?,
        "psi-inequality" => psi(&mut m)?,
        "dichotomy" => dichotomy(config, &mut m)?,
        other => return Err(Error::Config(format!("unknown scenario `{other}`"))),
    }
    m.finish()
}

fn verdict(m: &mut Manifest, key: &str, passed: bool) {
    m.record(key, passed);
    m.passed &= passed;
}

fn speed(c: &RunConfig, m: &mut Manifest) -> Result<()> {
    let spec = c.problem()?;
    let traj = run(&spec, c.t_end, &c.numerics)?;
    traj.write_csv(m.create("trajectory.csv")?)?;
    let fit = estimate_linear_speed(&traj, Window::last_fraction(c.t_end, 0.4))?;
    let wave = solve_semiwave(&spec.kernel, &spec.reaction, spec.d, spec.mu, &c.semiwave.numerics)?;
    wave.write_csv(m.create("semiwave.csv")?)?;
    let rel = (fit.leading() - wave.c).abs() / wave.c;
    m.record("speed", fit.leading());
    m.record("c_mu", wave.c);
    m.record("relative_error", rel);
    verdict(m, "speed_within_5pct", rel < 0.05);
    Ok(())
}

fn level_sets(c: &RunConfig, m: &mut Manifest) -> Result<()> {
    let spec = c.problem()?;
    let traj = run(&spec, c.t_end, &c.numerics)?;
    let wave = solve_semiwave(&spec.kernel, &spec.reaction, spec.d, spec.mu, &c.semiwave.numerics)?;
    let u = solve_steady(&spec.kernel, &spec.reaction, spec.d, &c.steady)?;
    let us = spec.reaction.u_star();
    let cone = sup_distance_on_cone(&traj.snapshots, &u, 0.5 * wave.c);
    let final_distance = cone.last().map_or(f64::INFINITY, |s| s.distance);
    m.record("cone_distance", final_distance);
    verdict(m, "cone_converges", final_distance < 0.02 * us);

    let last = &traj.snapshots.last().expect("final snapshot").field;
    let lambda_a = 0.5 * (u.values[0] + us);
    let x_lambda = u.inverse_level(lambda_a)?;
    let inf_a = level_set(last, lambda_a).inf().unwrap_or(f64::NAN);
    m.record("inf_E_upper_level", inf_a);
    m.record("X_lambda", x_lambda);
    verdict(m, "inf_E_matches_steady", (inf_a - x_lambda).abs() < 2.0 * c.numerics.dx);

    let late: Vec<_> = traj.snapshots.iter().filter(|s| s.t >= 0.8 * c.t_end).cloned().collect();
    let ratio_band = |lambda: f64, pick: fn(&crate::analysis::LevelSet) -> Option<f64>| {
        level_set_track(&late, lambda)
            .iter()
            .map(|s| pick(&s.set).map_or(f64::INFINITY, |x| (x / s.t / wave.c - 1.0).abs()))
            .fold(0.0, f64::max)
    };
    let low = ratio_band(0.5 * u.values[0], |s| s.inf());
    let half = ratio_band(0.5 * us, |s| s.sup());
    m.record("inf_E_low_level_deviation", low);
    m.record("sup_E_half_level_deviation", half);
    verdict(m, "inf_E_low_level_speed", low < 0.1);
    verdict(m, "sup_E_half_level_speed", half < 0.1);
    last.write_csv(m.create("final_snapshot.csv")?, c.t_end)?;
    Ok(())
}

fn accelerated(c: &RunConfig, m: &mut Manifest) -> Result<()> {
    let spec = c.problem()?;
    let gamma = spec.kernel.gamma().ok_or_else(|| Error::Config("accelerated scenarios need an algebraic kernel".into()))?;
    let traj = run(&spec, c.t_end, &c.numerics)?;
    traj.write_csv(m.create("trajectory.csv")?)?;
    if gamma < 2.0 {
        let fit = fit_power(&traj, Window::last_fraction(c.t_end, c.fit.fraction))?;
        let target = 1.0 / (gamma - 1.0);
        let rel = (fit.leading() - target).abs() / target;
        m.record("exponent", fit.leading());
        m.record("target", target);
        m.record("fit", &fit);
        verdict(m, "exponent_within_15pct", rel < 0.15);
    } else {
        let fit = fit_tlnt(&traj, Window::last_decade(c.t_end))?;
        m.record("fit", &fit);
        verdict(m, "tlnt_bounded", fit.bounded == Some(true));
    }
    Ok(())
}

fn halfline(c: &RunConfig, m: &mut Manifest) -> Result<()> {
    let spec = c.halfline_spec()?;
    let c_star = kpp_min_speed(&spec.kernel, &spec.reaction, spec.d)?;
    let u = solve_steady(&spec.kernel, &spec.reaction, spec.d, &c.steady)?;
    let out = run_halfline(&spec, c.t_end, &c.numerics, &c.halfline.levels)?;
    out.write_level_csv(m.create("levels.csv")?)?;
    let last = out.snapshots.last().expect("final snapshot");
    let f = &last.field;
    let us = spec.reaction.u_star();
    let near = (0..=f.m())
        .take_while(|&i| f.x(i) <= 0.5 * c_star * last.t)
        .map(|i| (f.values()[i] - u.value_at(f.x(i))).abs())
        .fold(0.0, f64::max);
    let far = (0..=f.m())
        .filter(|&i| f.x(i) >= 1.2 * c_star * last.t)
        .map(|i| f.values()[i])
        .fold(0.0, f64::max);
    m.record("c_star", c_star);
    m.record("distance_inner_cone", near);
    m.record("sup_beyond_outer_cone", far);
    verdict(m, "inner_cone_converges", near < 0.02 * us);
    verdict(m, "outer_cone_small", far < 1e-3);
    let problem = ProblemSpec::new(
        spec.kernel.clone(),
        spec.reaction.clone(),
        spec.d,
        c.mu,
        c.h0.min(spec.support),
        InitialProfile::Plateau { amplitude: 0.3 * us },
    )?;
    let pair = upper_solution_check(&problem, &spec, c.t_end, &c.numerics)?;
    m.record("upper_solution", &pair);
    verdict(m, "upper_solution_holds", pair.holds);
    f.write_csv(m.create("final_snapshot.csv")?, last.t)?;
    Ok(())
}

fn flux(m: &mut Manifest) -> Result<()> {
    let ladder = [100.0, 300.0, 1000.0, 3000.0, 10000.0];
    for gamma in [1.5, 2.0] {
        let r = verify_flux_asymptotics(&Kernel::algebraic(gamma)?, &ladder)?;
        let key = format!("gamma_{gamma}");
        m.record(&key, &r);
        verdict(m, &format!("{key}_passed"), r.passed);
    }
    Ok(())
}

fn psi(m: &mut Manifest) -> Result<()> {
    let mut rows = Vec::new();
    for (name, k) in [
        ("epanechnikov", Kernel::epanechnikov()),
        ("gaussian", Kernel::gaussian()),
        ("algebraic-1.8", Kernel::algebraic(1.8)?),
    ] {
        for eps in [0.05, 0.1, 0.2] {
            let p = psi_recipe(&k, 1.0, eps)?;
            let r = verify_psi_inequality(&k, &p)?;
            m.passed &= r.passed;
            rows.push(json!({"kernel": name, "eps": eps, "params": p, "report": r}));
        }
    }
    let mut bad = psi_recipe(&Kernel::gaussian(), 1.0, 0.1)?;
    bad.k2 = bad.k1 + bad.k0;
    let rejected = verify_psi_inequality(&Kernel::gaussian(), &bad).is_err();
    m.record("cases", rows);
    verdict(m, "bad_hypotheses_rejected", rejected);
    Ok(())
}

fn dichotomy(c: &RunConfig, m: &mut Manifest) -> Result<()> {
    let (k, r) = (c.kernel()?, c.reaction()?);
    let u = solve_steady(&k, &r, c.d, &c.steady)?;
    let mut rows = Vec::new();
    let mut seen = (false, false);
    let mut consistent = true;
    {
        let mut w = m.create("sweep.csv")?;
        writeln!(w, "mu,h0,fate,h_end,final_max_u")?;
        for (mu, h0) in DICHOTOMY_SWEEP {
            let spec = ProblemSpec::new(k.clone(), r.clone(), c.d, mu, h0, c.u0.clone())?;
            let traj = run(&spec, c.t_end, &c.numerics)?;
            let first = classify(&traj, &u)?;
            let again = classify(&run(&spec, c.t_end, &c.numerics)?, &u)?;
            consistent &= first == again;
            seen.0 |= first.fate == Fate::Vanishing;
            seen.1 |= first.fate == Fate::Spreading;
            let fate = serde_json::to_value(first.fate)?;
            writeln!(
                w,
                "{mu},{h0},{},{},{}",
                fate.as_str().unwrap_or("?"),
                traj.h.last().copied().unwrap_or(h0),
                first.final_max_u
            )?;
            rows.push(json!({"mu": mu, "h0": h0, "classification": first}));
        }
    }
    m.record("sweep", rows);
    verdict(m, "vanishing_observed", seen.0);
    verdict(m, "spreading_observed", seen.1);
    verdict(m, "repeat_runs_agree", consistent);
    Ok(())
}

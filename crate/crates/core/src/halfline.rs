//! Cauchy problem on the fixed half line
//!
//! ```text
//! w_t = d ∫_0^∞ J(x - y) w(t, y) dy - d w + f(w),   x ≥ 0
//! ```
//!
//! truncated to `[0, L]`. A monitor aborts the run when the front gets
//! within one kernel width of `L`, so the truncation never feeds back into
//! the solution.

use std::io::Write;

use crate::analysis::{level_set, LevelSample, LevelSet};
use crate::error::{invalid, Error, Result};
use crate::free_boundary::{advance, positive, InitialProfile, Numerics, OrderingReport, ProblemSpec, Simulation, Snapshot, Violation};
use crate::grid_field::{Field, Stencil};
use crate::kernels::Kernel;
use crate::reaction::Reaction;

/// Level above which the truncation monitor trips.
pub const MONITOR_LEVEL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct HalflineSpec {
    pub kernel: Kernel,
    pub reaction: Reaction,
    pub d: f64,
    pub w0: InitialProfile,
    /// `w0` is supported on `[0, support]`.
    pub support: f64,
    /// Truncation length `L`.
    pub length: f64,
}

impl HalflineSpec {
    pub fn validate(&self) -> Result<()> {
        positive("d", self.d)?;
        positive("support", self.support)?;
        positive("length", self.length)?;
        if self.support > 0.25 * self.length {
            return Err(invalid("support", "initial data must sit in [0, L/4]"));
        }
        self.w0.validate()
    }

    pub fn initial_field(&self, dx: f64) -> Result<Field> {
        let us = self.reaction.u_star();
        Field::from_fn(dx, self.length, |x| self.w0.eval(x, self.support, us))
    }
}

/// Stepper for the half-line problem on `[0, L]`.
#[derive(Clone, Debug)]
pub struct HalflineSimulation {
    spec: HalflineSpec,
    stencil: Stencil,
    field: Field,
    dt: f64,
    step: u64,
    monitor_from: usize,
    scratch: Vec<f64>,
}

impl HalflineSimulation {
    pub fn new(spec: HalflineSpec, numerics: &Numerics) -> Result<HalflineSimulation> {
        spec.validate()?;
        numerics.validate()?;
        let field = spec.initial_field(numerics.dx)?;
        let bound = 0.5 / (spec.d + spec.reaction.lipschitz(field.max().max(spec.reaction.u_star())));
        if numerics.dt > bound {
            return Err(Error::UnstableTimeStep { dt: numerics.dt, bound });
        }
        let stencil = Stencil::new(&spec.kernel, numerics.dx)?;
        let width = spec.kernel.core_width();
        let monitor_from = ((spec.length - width) / numerics.dx).floor().max(0.0) as usize;
        Ok(HalflineSimulation {
            spec,
            stencil,
            field,
            dt: numerics.dt,
            step: 0,
            monitor_from,
            scratch: Vec::new(),
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn t(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn step(&mut self) -> Result<()> {
        let t = self.t();
        advance(
            &mut self.field,
            &mut self.stencil,
            &self.spec.reaction,
            self.spec.d,
            self.dt,
            t,
            None,
            &mut self.scratch,
        )?;
        self.step += 1;
        let edge = self.field.values()[self.monitor_from..].iter().copied().fold(0.0, f64::max);
        if edge >= MONITOR_LEVEL {
            return Err(Error::EnlargeDomain { t: self.t(), value: edge });
        }
        Ok(())
    }
}

/// Output of [`run_halfline`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HalflineRun {
    pub times: Vec<f64>,
    pub w_max: Vec<f64>,
    pub probes: Vec<f64>,
    pub probe_values: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub level_samples: Vec<LevelSample>,
}

impl HalflineRun {
    /// Columns `t,lambda,inf_E,sup_E,empty_flag`; empty sets print `nan`.
    pub fn write_level_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,lambda,inf_E,sup_E,empty_flag")?;
        for s in &self.level_samples {
            let (lo, hi, empty) = match s.set {
                LevelSet::Crossings { inf, sup } => (inf, sup, 0),
                LevelSet::Empty => (f64::NAN, f64::NAN, 1),
            };
            writeln!(w, "{},{},{},{},{}", s.t, s.lambda, lo, hi, empty)?;
        }
        Ok(())
    }
}

/// Integrates the half-line problem to `t_end`, recording probes and the
/// level sets of `levels` at every sample.
pub fn run_halfline(spec: &HalflineSpec, t_end: f64, numerics: &Numerics, levels: &[f64]) -> Result<HalflineRun> {
    positive("t_end", t_end)?;
    let us = spec.reaction.u_star();
    if let Some(l) = levels.iter().find(|l| !(**l > 0.0 && **l < us)) {
        return Err(Error::LevelOutOfRange { lambda: *l, lo: 0.0, hi: us });
    }
    let mut sim = HalflineSimulation::new(spec.clone(), numerics)?;
    let n_steps = (t_end / numerics.dt).round() as u64;
    let sample = numerics.steps_between(numerics.sample_every).unwrap_or(1);
    let snap = numerics.steps_between(numerics.snapshot_every);
    let mut run = HalflineRun {
        probes: numerics.probes.clone(),
        ..HalflineRun::default()
    };
    let record = |sim: &HalflineSimulation, run: &mut HalflineRun| {
        let f = sim.field();
        let t = sim.t();
        run.times.push(t);
        run.w_max.push(f.max());
        run.probe_values.push(run.probes.iter().map(|p| f.value_at(*p)).collect());
        for &lambda in levels {
            run.level_samples.push(LevelSample {
                t,
                lambda,
                set: level_set(f, lambda),
            });
        }
    };
    record(&sim, &mut run);
    if snap.is_some() {
        run.snapshots.push(Snapshot {
            t: 0.0,
            field: sim.field().clone(),
        });
    }
    for n in 1..=n_steps {
        sim.step()?;
        if n % sample == 0 || n == n_steps {
            record(&sim, &mut run);
        }
        let snap_now = match snap {
            Some(s) => n % s == 0 || n == n_steps,
            None => n == n_steps,
        };
        if snap_now {
            run.snapshots.push(Snapshot {
                t: sim.t(),
                field: sim.field().clone(),
            });
        }
    }
    Ok(run)
}

/// `{inf, sup}` of `{x : w(x) = λ}`.
pub fn level_set_halfline(field: &Field, lambda: f64) -> LevelSet {
    level_set(field, lambda)
}

/// Checks `w(t + 1, ·) ≥ u(t, ·) - 10·dx·dt` on `[0, h(t)]`, where `u`
/// solves the free-boundary problem and `w` the half-line problem with the
/// same kernel, reaction and `d`. Requires `w(1, ·) ≥ u(0, ·)`.
pub fn upper_solution_check(
    problem: &ProblemSpec,
    halfline: &HalflineSpec,
    t_end: f64,
    numerics: &Numerics,
) -> Result<OrderingReport> {
    if problem.kernel != halfline.kernel || problem.reaction != halfline.reaction || problem.d != halfline.d {
        return Err(Error::Precondition("paired problems must share kernel, reaction and d".into()));
    }
    let mut u = Simulation::new(problem.clone(), numerics)?;
    let mut w = HalflineSimulation::new(halfline.clone(), numerics)?;
    let lead = (1.0 / numerics.dt).round() as u64;
    for _ in 0..lead {
        w.step()?;
    }
    let tol = 10.0 * numerics.dx * numerics.dt;
    {
        let (uf, wf) = (u.field(), w.field());
        if let Some(i) = (0..=uf.m()).find(|&i| uf.values()[i] > wf.values()[i]) {
            return Err(Error::Precondition(format!("w(1) < u0 at x = {}", uf.x(i))));
        }
    }
    let n_steps = (t_end / numerics.dt).round() as u64;
    let sample = numerics.steps_between(numerics.sample_every).unwrap_or(1);
    let mut report = OrderingReport {
        holds: true,
        tolerance: tol,
        samples: 0,
        max_u_excess: f64::NEG_INFINITY,
        max_h_excess: f64::NEG_INFINITY,
        first_violation: None,
    };
    for n in 0..=n_steps {
        if n > 0 {
            u.step()?;
            w.step()?;
        }
        if n % sample != 0 && n != n_steps {
            continue;
        }
        report.samples += 1;
        let (uf, wf) = (u.field(), w.field());
        if uf.m() >= wf.m() {
            return Err(Error::EnlargeDomain { t: u.t(), value: uf.h() });
        }
        report.max_h_excess = report.max_h_excess.max(uf.h() - wf.h());
        for i in 0..=uf.m() {
            let excess = uf.values()[i] - wf.values()[i];
            report.max_u_excess = report.max_u_excess.max(excess);
            if excess > tol && report.first_violation.is_none() {
                report.first_violation = Some(Violation {
                    t: u.t(),
                    x: Some(uf.x(i)),
                    lower: uf.values()[i],
                    upper: wf.values()[i],
                });
            }
        }
    }
    report.holds = report.first_violation.is_none();
    Ok(report)
}

//! Explicit time integration of the free-boundary system: the density on
//! `[0, h(t)]` and the boundary ODE driven by the outward dispersal flux.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid_field::{flux_integral_of, Field, Stencil};
use crate::kernels::Kernel;
use crate::reaction::Reaction;
use crate::stationary::SteadyProfile;

/// Negative values above this magnitude are treated as rounding and clipped.
pub const ROUNDING_GUARD: f64 = 1e-13;

/// Shape of an initial density supported on `[0, a]`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialProfile {
    /// `u* min(1, 2(a - x)/a)`.
    #[default]
    Default,
    /// `amplitude · min(1, 2(a - x)/a)`.
    Plateau { amplitude: f64 },
    /// `amplitude · cos(πx / 2a)`.
    Cosine { amplitude: f64 },
    /// Samples on a uniform grid over `[0, a]`, linearly interpolated. The
    /// last sample must be zero.
    Samples { values: Vec<f64> },
}

impl InitialProfile {
    /// Density at `x` for support `[0, a]` and carrying capacity `u_star`.
    pub fn eval(&self, x: f64, a: f64, u_star: f64) -> f64 {
        if x < 0.0 || x >= a {
            return 0.0;
        }
        let ramp = (2.0 * (a - x) / a).min(1.0);
        match self {
            InitialProfile::Default => u_star * ramp,
            InitialProfile::Plateau { amplitude } => amplitude * ramp,
            InitialProfile::Cosine { amplitude } => amplitude * (std::f64::consts::FRAC_PI_2 * x / a).cos(),
            InitialProfile::Samples { values } => {
                let n = values.len() - 1;
                let s = x / a * n as f64;
                let i = (s.floor() as usize).min(n - 1);
                let frac = s - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InitialProfile::Default => Ok(()),
            InitialProfile::Plateau { amplitude } | InitialProfile::Cosine { amplitude } => {
                if *amplitude > 0.0 && amplitude.is_finite() {
                    Ok(())
                } else {
                    Err(invalid("u0.amplitude", "must be positive"))
                }
            }
            InitialProfile::Samples { values } => {
                if values.len() < 2 {
                    return Err(invalid("u0.values", "need at least two samples"));
                }
                if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(invalid("u0.values", "samples must be finite and nonnegative"));
                }
                if *values.last().unwrap() != 0.0 {
                    return Err(invalid("u0.values", "profile must vanish at the boundary"));
                }
                if !values.iter().any(|v| *v > 0.0) {
                    return Err(invalid("u0.values", "profile must be positive somewhere"));
                }
                Ok(())
            }
        }
    }
}

/// Model parameters of one free-boundary problem.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub kernel: Kernel,
    pub reaction: Reaction,
    pub d: f64,
    pub mu: f64,
    pub h0: f64,
    pub u0: InitialProfile,
}

impl ProblemSpec {
    pub fn new(kernel: Kernel, reaction: Reaction, d: f64, mu: f64, h0: f64, u0: InitialProfile) -> Result<Self> {
        let spec = ProblemSpec {
            kernel,
            reaction,
            d,
            mu,
            h0,
            u0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        positive("d", self.d)?;
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(invalid("mu", "must be nonnegative"));
        }
        positive("h0", self.h0)?;
        self.u0.validate()
    }

    /// `u0` sampled on the grid.
    pub fn initial_field(&self, dx: f64) -> Result<Field> {
        let us = self.reaction.u_star();
        Field::from_fn(dx, self.h0, |x| self.u0.eval(x, self.h0, us))
    }

    /// `0.5 / (d + sup|f'|)` on `[0, upper]`.
    pub fn stability_bound(&self, upper: f64) -> f64 {
        0.5 / (self.d + self.reaction.lipschitz(upper.max(self.reaction.u_star())))
    }
}

pub(crate) fn positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {v}")))
    }
}

/// Deliberate defects used to check that the test harness can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    #[default]
    None,
    /// `h' = -μ ∫∫ J u`.
    FlipFluxSign,
}

/// Discretization and output controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numerics {
    pub dx: f64,
    pub dt: f64,
    /// Time between trajectory samples (rounded to whole steps).
    #[serde(default)]
    pub sample_every: Option<f64>,
    /// Time between stored field snapshots; `None` keeps only the final one.
    #[serde(default)]
    pub snapshot_every: Option<f64>,
    /// Positions where `u` is recorded at every sample.
    #[serde(default)]
    pub probes: Vec<f64>,
    #[serde(default)]
    pub mutation: Mutation,
}

impl Numerics {
    pub fn new(dx: f64, dt: f64) -> Numerics {
        Numerics {
            dx,
            dt,
            sample_every: None,
            snapshot_every: None,
            probes: Vec::new(),
            mutation: Mutation::None,
        }
    }

    pub fn with_sampling(mut self, every: f64) -> Self {
        self.sample_every = Some(every);
        self
    }

    pub fn with_snapshots(mut self, every: f64) -> Self {
        self.snapshot_every = Some(every);
        self
    }

    pub fn with_probes(mut self, probes: Vec<f64>) -> Self {
        self.probes = probes;
        self
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = mutation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("numerics.dx", self.dx)?;
        positive("numerics.dt", self.dt)?;
        if let Some(s) = self.sample_every {
            positive("numerics.sample_every", s)?;
        }
        if let Some(s) = self.snapshot_every {
            positive("numerics.snapshot_every", s)?;
        }
        if self.probes.iter().any(|p| !(*p >= 0.0)) {
            return Err(invalid("numerics.probes", "probe positions must be nonnegative"));
        }
        Ok(())
    }

    pub(crate) fn steps_between(&self, every: Option<f64>) -> Option<u64> {
        every.map(|e| ((e / self.dt).round() as u64).max(1))
    }
}

/// Field stored at a sample time.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
}

/// Time series of one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub h: Vec<f64>,
    pub hdot: Vec<f64>,
    /// `max_x u(t, x)` at each sample.
    pub u_max: Vec<f64>,
    pub probes: Vec<f64>,
    /// `probe_values[k][j]`: probe `j` at sample `k`.
    pub probe_values: Vec<Vec<f64>>,
    pub snapshots: Vec<Snapshot>,
    pub dx: f64,
    /// Kernel length scale, used by [`classify`].
    pub kernel_width: f64,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `h` at the last sample not after `t`.
    pub fn h_at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|s| *s <= t);
        self.h[i.saturating_sub(1)]
    }

    /// Columns `t,h,hdot,u_probe_1..k`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t,h,hdot")?;
        for k in 1..=self.probes.len() {
            write!(w, ",u_probe_{k}")?;
        }
        writeln!(w)?;
        for i in 0..self.times.len() {
            write!(w, "{},{},{}", self.times[i], self.h[i], self.hdot[i])?;
            for v in &self.probe_values[i] {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Reads the `t,h,hdot,...` columns back (probe columns included).
    pub fn read_csv<R: std::io::BufRead>(r: R) -> Result<Trajectory> {
        let mut traj = Trajectory::default();
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Io("empty trajectory file".into()))??;
        let nprobes = header.split(',').count().saturating_sub(3);
        traj.probes = vec![f64::NAN; nprobes];
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Io(format!("bad number `{c}`"))))
                .collect::<Result<_>>()?;
            if cols.len() < 3 {
                return Err(Error::Io(format!("short row `{line}`")));
            }
            traj.times.push(cols[0]);
            traj.h.push(cols[1]);
            traj.hdot.push(cols[2]);
            traj.probe_values.push(cols[3..].to_vec());
        }
        Ok(traj)
    }
}

/// Stateful integrator for one run.
#[derive(Clone, Debug)]
pub struct Simulation {
    spec: ProblemSpec,
    stencil: Stencil,
    field: Field,
    dt: f64,
    step: u64,
    flux_sign: f64,
    /// Bound used for the stability check; refreshed if `u` ever exceeds it.
    checked_upper: f64,
    hdot: f64,
    scratch: Vec<f64>,
}

impl Simulation {
    pub fn new(spec: ProblemSpec, numerics: &Numerics) -> Result<Simulation> {
        spec.validate()?;
        numerics.validate()?;
        let field = spec.initial_field(numerics.dx)?;
        Simulation::from_field(spec, field, numerics.dt, numerics.mutation)
    }

    /// Starts from an arbitrary field (e.g. a degenerate one in tests).
    pub fn from_field(spec: ProblemSpec, field: Field, dt: f64, mutation: Mutation) -> Result<Simulation> {
        let stencil = Stencil::new(&spec.kernel, field.dx())?;
        let upper = field.max().max(spec.reaction.u_star());
        let bound = spec.stability_bound(upper);
        if !(dt > 0.0) || dt > bound {
            return Err(Error::UnstableTimeStep { dt, bound });
        }
        let mut sim = Simulation {
            spec,
            stencil,
            field,
            dt,
            step: 0,
            flux_sign: if mutation == Mutation::FlipFluxSign { -1.0 } else { 1.0 },
            checked_upper: upper,
            hdot: 0.0,
            scratch: Vec::new(),
        };
        sim.hdot = sim.current_hdot();
        Ok(sim)
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn t(&self) -> f64 {
        self.step as f64 * self.dt
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn h(&self) -> f64 {
        self.field.h()
    }

    /// `h'` at the current state.
    pub fn hdot(&self) -> f64 {
        self.hdot
    }

    fn current_hdot(&self) -> f64 {
        self.flux_sign * self.spec.mu * flux_integral_of(&self.spec.kernel, &self.field)
    }

    /// One forward-Euler step of `(u, h)`.
    pub fn step(&mut self) -> Result<()> {
        let t = self.t();
        let hdot = self.hdot;
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
        let new_h = self.field.h() + self.dt * hdot;
        if !new_h.is_finite() {
            return Err(Error::NonFinite { t, node: self.field.m() });
        }
        if hdot >= 0.0 {
            self.field.extend_in_place(new_h)?;
        } else {
            self.field.retract_in_place(new_h);
        }
        let umax = self.field.max();
        if umax > self.checked_upper {
            let bound = self.spec.stability_bound(umax);
            if self.dt > bound {
                return Err(Error::UnstableTimeStep { dt: self.dt, bound });
            }
            self.checked_upper = umax;
        }
        self.step += 1;
        self.hdot = self.current_hdot();
        Ok(())
    }
}

/// One explicit Euler update of `u` on the field's current grid:
/// `u += dt (d (∫J u + extra) - d u + f(u))`. Returns `max |Δu| / dt`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn advance(
    field: &mut Field,
    stencil: &mut Stencil,
    reaction: &Reaction,
    d: f64,
    dt: f64,
    t: f64,
    extra: Option<&[f64]>,
    scratch: &mut Vec<f64>,
) -> Result<f64> {
    let m = field.m();
    stencil.ensure(m);
    scratch.resize(m + 1, 0.0);
    stencil.convolve(field, scratch);
    let values = field.values_mut();
    let mut max_rate = 0.0f64;
    for i in 0..=m {
        let u = values[i];
        let conv = scratch[i] + extra.map_or(0.0, |e| e[i]);
        let rate = d * (conv - u) + reaction.value(u);
        let mut next = u + dt * rate;
        if !next.is_finite() {
            return Err(Error::NonFinite { t, node: i });
        }
        if next < 0.0 {
            if next > -ROUNDING_GUARD {
                next = 0.0;
            } else {
                return Err(Error::Positivity { node: i, value: next });
            }
        }
        max_rate = max_rate.max(rate.abs());
        values[i] = next;
    }
    Ok(max_rate)
}

/// One step from an arbitrary state.
pub fn step(state: &Field, spec: &ProblemSpec, dt: f64) -> Result<Field> {
    let mut sim = Simulation::from_field(spec.clone(), state.clone(), dt, Mutation::None)?;
    sim.step()?;
    Ok(sim.field)
}

fn record(sim: &Simulation, traj: &mut Trajectory, probes: &[f64]) {
    let f = sim.field();
    traj.times.push(sim.t());
    traj.h.push(f.h());
    traj.hdot.push(sim.hdot());
    traj.u_max.push(f.max());
    traj.probe_values.push(probes.iter().map(|p| f.value_at(*p)).collect());
}

/// Integrates to `t_end`, sampling the boundary and probes.
pub fn run(spec: &ProblemSpec, t_end: f64, numerics: &Numerics) -> Result<Trajectory> {
    run_with(spec, t_end, numerics, |_| Ok(()))
}

/// [`run`] with a callback invoked after every step.
pub fn run_with(
    spec: &ProblemSpec,
    t_end: f64,
    numerics: &Numerics,
    mut on_step: impl FnMut(&Simulation) -> Result<()>,
) -> Result<Trajectory> {
    positive("t_end", t_end)?;
    let mut sim = Simulation::new(spec.clone(), numerics)?;
    let n_steps = (t_end / numerics.dt).round() as u64;
    let sample = numerics.steps_between(numerics.sample_every).unwrap_or(1);
    let snap = numerics.steps_between(numerics.snapshot_every);
    let mut traj = Trajectory {
        probes: numerics.probes.clone(),
        dx: numerics.dx,
        kernel_width: spec.kernel.core_width(),
        ..Trajectory::default()
    };
    record(&sim, &mut traj, &numerics.probes);
    if snap.is_some() {
        traj.snapshots.push(Snapshot {
            t: 0.0,
            field: sim.field().clone(),
        });
    }
    for n in 1..=n_steps {
        sim.step()?;
        on_step(&sim)?;
        if n % sample == 0 || n == n_steps {
            record(&sim, &mut traj, &numerics.probes);
        }
        let snap_now = match snap {
            Some(s) => n % s == 0 || n == n_steps,
            None => n == n_steps,
        };
        if snap_now {
            traj.snapshots.push(Snapshot {
                t: sim.t(),
                field: sim.field().clone(),
            });
        }
    }
    Ok(traj)
}

/// Outcome of a paired comparison run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingReport {
    pub holds: bool,
    pub tolerance: f64,
    pub samples: usize,
    /// Largest `u_A - u_B` seen (negative when strictly ordered).
    pub max_u_excess: f64,
    /// Largest `h_A - h_B` seen.
    pub max_h_excess: f64,
    pub first_violation: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub t: f64,
    /// `None` when the boundary ordering failed.
    pub x: Option<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl OrderingReport {
    pub fn into_result(self) -> Result<OrderingReport> {
        match &self.first_violation {
            Some(v) => Err(Error::OrderingViolation {
                t: v.t,
                x: v.x.unwrap_or(f64::NAN),
                lower: v.lower,
                upper: v.upper,
            }),
            None => Ok(self),
        }
    }
}

/// Runs two ordered problems in lockstep and checks `u_A ≤ u_B`,
/// `h_A ≤ h_B` at every sample, within `10·dx·dt`.
pub fn compare_runs(a: &ProblemSpec, b: &ProblemSpec, t_end: f64, numerics: &Numerics) -> Result<OrderingReport> {
    if a.kernel != b.kernel || a.reaction != b.reaction || a.d != b.d {
        return Err(Error::Precondition("paired specs must share kernel, reaction and d".into()));
    }
    if a.h0 > b.h0 || a.mu > b.mu {
        return Err(Error::Precondition("need h0_A ≤ h0_B and μ_A ≤ μ_B".into()));
    }
    let mut sa = Simulation::new(a.clone(), numerics)?;
    let mut sb = Simulation::new(b.clone(), numerics)?;
    let fa = sa.field();
    let fb = sb.field();
    for i in 0..=fa.m() {
        let ub = fb.values().get(i).copied().unwrap_or(0.0);
        if fa.values()[i] > ub {
            return Err(Error::Precondition(format!("u0_A > u0_B at x = {}", fa.x(i))));
        }
    }
    let tol = 10.0 * numerics.dx * numerics.dt;
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
    let check = |sa: &Simulation, sb: &Simulation, report: &mut OrderingReport| {
        report.samples += 1;
        let t = sa.t();
        let (fa, fb) = (sa.field(), sb.field());
        let dh = fa.h() - fb.h();
        report.max_h_excess = report.max_h_excess.max(dh);
        if dh > tol && report.first_violation.is_none() {
            report.first_violation = Some(Violation {
                t,
                x: None,
                lower: fa.h(),
                upper: fb.h(),
            });
        }
        for i in 0..=fa.m() {
            let ua = fa.values()[i];
            let ub = fb.values().get(i).copied().unwrap_or(0.0);
            report.max_u_excess = report.max_u_excess.max(ua - ub);
            if ua - ub > tol && report.first_violation.is_none() {
                report.first_violation = Some(Violation {
                    t,
                    x: Some(fa.x(i)),
                    lower: ua,
                    upper: ub,
                });
            }
        }
    };
    check(&sa, &sb, &mut report);
    for n in 1..=n_steps {
        sa.step()?;
        sb.step()?;
        if n % sample == 0 || n == n_steps {
            check(&sa, &sb, &mut report);
        }
    }
    report.holds = report.first_violation.is_none();
    Ok(report)
}

/// Long-time fate of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fate {
    Spreading,
    Vanishing,
    Undecided,
}

/// Classification together with the measurements it was based on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub fate: Fate,
    /// Growth of `h` over the last half of the run.
    pub late_growth: f64,
    /// Growth of `h` over the last quarter.
    pub final_quarter_growth: f64,
    pub final_max_u: f64,
    /// Largest `|u - U| / U` over the probes at the final sample.
    pub probe_mismatch: f64,
    pub vanishing_threshold: f64,
}

/// Final `max u` below which a stalled run counts as vanishing.
pub const VANISHING_THRESHOLD: f64 = 1e-3;

/// Empirical spreading/vanishing detector.
pub fn classify(traj: &Trajectory, stationary: &SteadyProfile) -> Result<Classification> {
    let t_end = traj.t_end();
    if traj.is_empty() || t_end < 100.0 {
        return Err(Error::Precondition(format!(
            "classification needs t_end ≥ 100, got {t_end}"
        )));
    }
    let h_end = *traj.h.last().unwrap();
    let late_growth = h_end - traj.h_at(0.5 * t_end);
    let final_quarter_growth = h_end - traj.h_at(0.75 * t_end);
    let final_max_u = *traj.u_max.last().unwrap();
    let probe_mismatch = traj
        .probes
        .iter()
        .zip(traj.probe_values.last().unwrap())
        .map(|(p, v)| {
            let u = stationary.value_at(*p);
            (v - u).abs() / u
        })
        .fold(if traj.probes.is_empty() { f64::INFINITY } else { 0.0 }, f64::max);
    let fate = if late_growth > 10.0 * traj.kernel_width && probe_mismatch <= 0.1 {
        Fate::Spreading
    } else if final_quarter_growth < traj.dx && final_max_u < VANISHING_THRESHOLD {
        Fate::Vanishing
    } else {
        Fate::Undecided
    };
    Ok(Classification {
        fate,
        late_growth,
        final_quarter_growth,
        final_max_u,
        probe_mismatch,
        vanishing_threshold: VANISHING_THRESHOLD,
    })
}

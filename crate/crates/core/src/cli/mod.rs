//! Experiment runner behind the `nlfront` binary: each command reads a
//! [`RunConfig`], writes CSV/JSON artifacts into the output directory and
//! returns a [`Manifest`] listing them.

mod config;
mod scenario;
mod verify;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

pub use config::{FitConfig, HalflineConfig, RunConfig, SemiWaveConfig};
pub use scenario::{preset, run_scenario, SCENARIOS};
pub use verify::{verify_all, Check, SuiteReport};

use crate::analysis::{estimate_linear_speed, fit_power, fit_tlnt, Window};
use crate::error::{Error, Result};
use crate::free_boundary::{classify, run, Trajectory};
use crate::halfline::run_halfline;
use crate::semiwave::{solve_semiwave, speed_table};
use crate::stationary::solve_steady;

/// Artifacts and headline numbers of one command.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: RunConfig,
    pub files: Vec<String>,
    pub results: BTreeMap<String, Value>,
    pub passed: bool,
}

impl Manifest {
    fn new(command: &str, config: &RunConfig) -> Manifest {
        Manifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION"),
            seed: config.seed,
            config: config.clone(),
            files: Vec::new(),
            results: BTreeMap::new(),
            passed: true,
        }
    }

    fn record(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("serializable result"));
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.config.out.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(path)?))
    }

    fn finish(mut self) -> Result<Manifest> {
        self.files.push("manifest.json".into());
        let mut w = self.create_unlisted("manifest.json")?;
        serde_json::to_writer_pretty(&mut w, &self)?;
        writeln!(w)?;
        w.flush()?;
        Ok(self)
    }

    fn create_unlisted(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.config.out)?;
        Ok(BufWriter::new(File::create(self.config.out.join(name))?))
    }
}

/// Sizes the global rayon pool; a no-op once the pool exists.
pub fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Free-boundary run: trajectory, snapshots and (for long runs) the
/// spreading/vanishing classification.
pub fn simulate_fb(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let mut m = Manifest::new("simulate-fb", config);
    let spec = config.problem()?;
    let traj = run(&spec, config.t_end, &config.numerics)?;
    traj.write_csv(m.create("trajectory.csv")?)?;
    for (k, s) in traj.snapshots.iter().enumerate() {
        s.field.write_csv(m.create(&format!("snapshots/snapshot_{k:04}.csv"))?, s.t)?;
    }
    m.record("h_end", traj.h.last());
    m.record("hdot_end", traj.hdot.last());
    m.record("u_max_end", traj.u_max.last());
    if config.t_end >= 100.0 {
        match solve_steady(&spec.kernel, &spec.reaction, spec.d, &config.steady).and_then(|u| classify(&traj, &u)) {
            Ok(c) => m.record("classification", c),
            Err(e) => m.record("classification_error", e.to_string()),
        }
    }
    if let Ok(fit) = estimate_linear_speed(&traj, Window::last_fraction(config.t_end, config.fit.fraction)) {
        m.record("linear_speed", fit);
    }
    m.finish()
}

/// Half-line run with level-set tracking.
pub fn simulate_halfline(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let mut m = Manifest::new("simulate-halfline", config);
    let spec = config.halfline_spec()?;
    let run = run_halfline(&spec, config.t_end, &config.numerics, &config.halfline.levels)?;
    run.write_level_csv(m.create("levels.csv")?)?;
    {
        let mut w = m.create("probes.csv")?;
        write!(w, "t,w_max")?;
        for k in 1..=run.probes.len() {
            write!(w, ",w_probe_{k}")?;
        }
        writeln!(w)?;
        for (i, t) in run.times.iter().enumerate() {
            write!(w, "{t},{}", run.w_max[i])?;
            for v in &run.probe_values[i] {
                write!(w, ",{v}")?;
            }
            writeln!(w)?;
        }
    }
    for (k, s) in run.snapshots.iter().enumerate() {
        s.field.write_csv(m.create(&format!("snapshots/snapshot_{k:04}.csv"))?, s.t)?;
    }
    m.record("w_max_end", run.w_max.last());
    m.finish()
}

/// Steady state on `[0, L]`.
pub fn steady_state(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let mut m = Manifest::new("steady-state", config);
    let (k, r) = (config.kernel()?, config.reaction()?);
    let u = solve_steady(&k, &r, config.d, &config.steady)?;
    u.write_csv(m.create("steady.csv")?)?;
    let independent = u.independent_residual(&k, &r, config.d);
    let monotone = u.is_monotone(1e-10);
    m.record("U0", u.values[0]);
    m.record("residual", u.residual);
    m.record("independent_residual", independent);
    m.record("monotone", monotone);
    m.passed = monotone && independent < config.steady.tol;
    m.finish()
}

/// Semi-wave profile for `mu` and the speed table over `semiwave.mus`.
pub fn semiwave(config: &RunConfig) -> Result<Manifest> {
    config.validate()?;
    let mut m = Manifest::new("semiwave", config);
    let (k, r) = (config.kernel()?, config.reaction()?);
    let w = solve_semiwave(&k, &r, config.d, config.mu, &config.semiwave.numerics)?;
    w.write_csv(m.create("semiwave.csv")?)?;
    m.record("c", w.c);
    m.record("flux_residual", w.flux_residual);
    m.record("decreasing", w.is_decreasing(1e-10));
    let table = speed_table(&k, &r, config.d, &config.speed_ladder(), &config.semiwave.numerics)?;
    {
        let mut f = m.create("speed_table.json")?;
        serde_json::to_writer_pretty(&mut f, &table)?;
        writeln!(f)?;
    }
    m.record("c_star", table.c_star);
    m.finish()
}

/// Linear, power and `t ln t` fits of a stored trajectory.
pub fn rates(config: &RunConfig) -> Result<Manifest> {
    let path = config
        .fit
        .trajectory
        .as_ref()
        .ok_or_else(|| Error::Config("rates needs fit.trajectory (or --input)".into()))?;
    let traj = read_trajectory(path)?;
    let t_end = traj.t_end();
    let mut m = Manifest::new("rates", config);
    let window = Window::last_fraction(t_end, config.fit.fraction);
    let report = json!({
        "trajectory": path,
        "linear": estimate_linear_speed(&traj, window).map_err(|e| e.to_string()),
        "power": fit_power(&traj, window).map_err(|e| e.to_string()),
        "tlnt": fit_tlnt(&traj, Window::last_decade(t_end)).map_err(|e| e.to_string()),
    });
    {
        let mut f = m.create("rates.json")?;
        serde_json::to_writer_pretty(&mut f, &report)?;
        writeln!(f)?;
    }
    m.record("rates", report);
    m.finish()
}

fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Trajectory::read_csv(BufReader::new(f))
}

/// Runs the verification suite and writes `verify.txt` and `verify.json`.
pub fn verify(config: &RunConfig, mutate: bool) -> Result<(Manifest, SuiteReport)> {
    let report = verify_all(config.seed, mutate);
    let mut m = Manifest::new("verify", config);
    {
        let mut f = m.create("verify.txt")?;
        f.write_all(report.render().as_bytes())?;
    }
    {
        let mut f = m.create("verify.json")?;
        serde_json::to_writer_pretty(&mut f, &report)?;
        writeln!(f)?;
    }
    m.record("mutation", mutate);
    m.record("failed", report.failed());
    m.passed = report.passed();
    Ok((m.finish()?, report))
}

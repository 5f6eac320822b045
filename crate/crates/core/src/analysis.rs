//! Observables extracted from simulations: spreading rates, level sets,
//! distance to the steady state on expanding cones, and two quadrature
//! checks on the kernel (the cutoff-function inequality and the growth of
//! the boundary flux).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::free_boundary::{Snapshot, Trajectory};
use crate::grid_field::Field;
use crate::kernels::Kernel;
use crate::stationary::SteadyProfile;

/// Fewest samples a fit will accept.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Ratio `max/min` below which `h ≈ t ln t` is accepted.
pub const RATIO_BAND: f64 = 3.0;

/// Time window `[t_min, t_max]` of a fit.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub t_min: f64,
    pub t_max: f64,
}

impl Window {
    /// The last `fraction` of `[0, t_end]`.
    pub fn last_fraction(t_end: f64, fraction: f64) -> Window {
        Window {
            t_min: t_end * (1.0 - fraction),
            t_max: t_end,
        }
    }

    /// Default window: the last 60% of the run.
    pub fn default_for(t_end: f64) -> Window {
        Window::last_fraction(t_end, 0.6)
    }

    /// `[t_end/10, t_end]`.
    pub fn last_decade(t_end: f64) -> Window {
        Window {
            t_min: 0.1 * t_end,
            t_max: t_end,
        }
    }

    fn select(&self, times: &[f64], h: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let (t, v): (Vec<f64>, Vec<f64>) = times
            .iter()
            .zip(h)
            .filter(|(t, _)| **t >= self.t_min && **t <= self.t_max)
            .map(|(t, v)| (*t, *v))
            .unzip();
        if t.len() < MIN_FIT_SAMPLES {
            return Err(Error::WindowTooShort(t.len()));
        }
        Ok((t, v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `h ≈ c t + b`; coefficients `[c, b]`.
    Linear,
    /// `h ≈ C t^p`; coefficients `[p, C]`.
    Power,
    /// `h ≈ C t ln t`; coefficients `[C]`.
    TLogT,
}

/// Least-squares fit of `h(t)` with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub model: RateModel,
    pub coefficients: Vec<f64>,
    pub window: Window,
    pub samples: usize,
    pub r_squared: f64,
    pub residual_rms: f64,
    /// Two standard errors of the leading coefficient.
    pub band: f64,
    /// `max/min` of `h / (t ln t)` (t ln t model only).
    pub ratio_band: Option<f64>,
    /// `ratio_band < 3` (t ln t model only).
    pub bounded: Option<bool>,
}

impl RateFit {
    pub fn leading(&self) -> f64 {
        self.coefficients[0]
    }
}

struct Ols {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    residual_rms: f64,
    slope_se: f64,
}

fn ols(x: &[f64], y: &[f64]) -> Ols {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ols {
        slope,
        intercept,
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        residual_rms: (sse / n).sqrt(),
        slope_se: (sse / (n - 2.0) / sxx).sqrt(),
    }
}

/// Slope of `h` against `t` over `window`.
pub fn estimate_linear_speed(traj: &Trajectory, window: Window) -> Result<RateFit> {
    let (t, h) = window.select(&traj.times, &traj.h)?;
    let f = ols(&t, &h);
    Ok(RateFit {
        model: RateModel::Linear,
        coefficients: vec![f.slope, f.intercept],
        window,
        samples: t.len(),
        r_squared: f.r_squared,
        residual_rms: f.residual_rms,
        band: 2.0 * f.slope_se,
        ratio_band: None,
        bounded: None,
    })
}

/// Exponent `p` from regressing `ln h` on `ln t`.
pub fn fit_power(traj: &Trajectory, window: Window) -> Result<RateFit> {
    if !(window.t_min > 0.0) {
        return Err(invalid("window.t_min", "power fits need t > 0"));
    }
    let (t, h) = window.select(&traj.times, &traj.h)?;
    let lt: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let lh: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let f = ols(&lt, &lh);
    Ok(RateFit {
        model: RateModel::Power,
        coefficients: vec![f.slope, f.intercept.exp()],
        window,
        samples: t.len(),
        r_squared: f.r_squared,
        residual_rms: f.residual_rms,
        band: 2.0 * f.slope_se,
        ratio_band: None,
        bounded: None,
    })
}

/// `h / (t ln t)` over `window`: its least-squares level `C` and whether it
/// stays within a factor-3 band.
pub fn fit_tlnt(traj: &Trajectory, window: Window) -> Result<RateFit> {
    if !(window.t_min > 1.0) {
        return Err(invalid("window.t_min", "t ln t fits need t > 1"));
    }
    let (t, h) = window.select(&traj.times, &traj.h)?;
    let r: Vec<f64> = t.iter().map(|v| v * v.ln()).collect();
    let srr: f64 = r.iter().map(|v| v * v).sum();
    let c = r.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() / srr;
    let n = t.len() as f64;
    let sse: f64 = r.iter().zip(&h).map(|(a, b)| (b - c * a).powi(2)).sum();
    let mh = h.iter().sum::<f64>() / n;
    let syy: f64 = h.iter().map(|v| (v - mh).powi(2)).sum();
    let ratios: Vec<f64> = r.iter().zip(&h).map(|(a, b)| b / a).collect();
    let hi = ratios.iter().copied().fold(f64::MIN, f64::max);
    let lo = ratios.iter().copied().fold(f64::MAX, f64::min);
    let band = hi / lo;
    Ok(RateFit {
        model: RateModel::TLogT,
        coefficients: vec![c],
        window,
        samples: t.len(),
        r_squared: if syy > 0.0 { 1.0 - sse / syy } else { 1.0 },
        residual_rms: (sse / n).sqrt(),
        band: 2.0 * (sse / (n - 1.0) / srr).sqrt(),
        ratio_band: Some(band),
        bounded: Some(band < RATIO_BAND),
    })
}

/// `inf` and `sup` of `{x : u(x) = λ}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LevelSet {
    Crossings { inf: f64, sup: f64 },
    Empty,
}

impl LevelSet {
    pub fn inf(&self) -> Option<f64> {
        match self {
            LevelSet::Crossings { inf, .. } => Some(*inf),
            LevelSet::Empty => None,
        }
    }

    pub fn sup(&self) -> Option<f64> {
        match self {
            LevelSet::Crossings { sup, .. } => Some(*sup),
            LevelSet::Empty => None,
        }
    }
}

/// Crossings of `λ` by the piecewise-linear interpolant of `field`,
/// including the taper to zero on the last partial cell. On a flat stretch
/// at height `λ`, `inf` is its left end and `sup` its right end.
pub fn level_set(field: &Field, lambda: f64) -> LevelSet {
    let u = field.values();
    let dx = field.dx();
    let mut knots: Vec<(f64, f64)> = u.iter().enumerate().map(|(i, v)| (i as f64 * dx, *v)).collect();
    if field.partial_width() > 0.0 {
        knots.push((field.h(), 0.0));
    }
    let mut inf = None;
    let mut sup = None;
    let mut hit = |x: f64| {
        if inf.is_none() {
            inf = Some(x);
        }
        sup = Some(x);
    };
    for k in 0..knots.len() {
        let (x0, a) = knots[k];
        if a == lambda {
            hit(x0);
        }
        if let Some(&(x1, b)) = knots.get(k + 1) {
            if (a - lambda) * (b - lambda) < 0.0 {
                hit(x0 + (x1 - x0) * (lambda - a) / (b - a));
            }
        }
    }
    match (inf, sup) {
        (Some(inf), Some(sup)) => LevelSet::Crossings { inf, sup },
        _ => LevelSet::Empty,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSample {
    pub t: f64,
    pub lambda: f64,
    pub set: LevelSet,
}

/// Level set of every snapshot.
pub fn level_set_track(snapshots: &[Snapshot], lambda: f64) -> Vec<LevelSample> {
    snapshots
        .iter()
        .map(|s| LevelSample {
            t: s.t,
            lambda,
            set: level_set(&s.field, lambda),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConeSample {
    pub t: f64,
    /// `max |u(t, x_i) - U(x_i)|` over nodes with `x_i ≤ min(ct, h(t))`.
    pub distance: f64,
    /// The cone `[0, ct]` reaches past `h(t)`.
    pub exceeds_boundary: bool,
}

/// Sup-norm distance to the steady state on the cone `[0, ct]`.
pub fn sup_distance_on_cone(snapshots: &[Snapshot], profile: &SteadyProfile, c: f64) -> Vec<ConeSample> {
    snapshots
        .iter()
        .map(|s| {
            let f = &s.field;
            let reach = c * s.t;
            let distance = (0..=f.m())
                .take_while(|&i| f.x(i) <= reach)
                .map(|i| (f.values()[i] - profile.value_at(f.x(i))).abs())
                .fold(0.0, f64::max);
            ConeSample {
                t: s.t,
                distance,
                exceeds_boundary: reach > f.h(),
            }
        })
        .collect()
}

/// Parameters of the cutoff-function inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiParameters {
    pub l: f64,
    pub l0: f64,
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub eps: f64,
}

/// Builds admissible parameters: `l0 > l` with `∫_{-l0}^{l0} J > 1 - ε/2`,
/// `k0 > 2 max(l0, 2 l0/ε)`, `k1 = 1.5 k0`, `k2 = 4 k0`.
pub fn psi_recipe(kernel: &Kernel, l: f64, eps: f64) -> Result<PsiParameters> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", "must lie in (0, 1)"));
    }
    if !(l >= 0.0) {
        return Err(invalid("l", "must be nonnegative"));
    }
    // 1 - 2 tail(l0) > 1 - ε/2
    let target = 0.25 * eps;
    let mut hi = 1.0f64.max(l);
    while kernel.tail(hi) >= target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if kernel.tail(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let l0 = (hi * 1.01).max(l * 1.01 + 1e-9);
    let k0 = 1.01 * 2.0 * l0.max(2.0 * l0 / eps);
    Ok(PsiParameters {
        l,
        l0,
        k0,
        k1: 1.5 * k0,
        k2: 4.0 * k0,
        eps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiReport {
    pub passed: bool,
    /// `min_x (LHS(x) - (1-ε) ψ(x))` over the grid.
    pub worst_margin: f64,
    pub worst_x: f64,
    pub points: usize,
}

/// `ψ(y) = min(1, (k2 - y)/k1)`.
fn psi(y: f64, k1: f64, k2: f64) -> f64 {
    ((k2 - y) / k1).min(1.0)
}

/// `∫_l^{k2} J(x - y) ψ(y) dy` in closed form from the kernel's tail and
/// partial first moment.
pub fn psi_lhs(kernel: &Kernel, x: f64, l: f64, k1: f64, k2: f64) -> f64 {
    let b = k2 - k1;
    let t = |z: f64| kernel.tail(z);
    let q = |z: f64| kernel.partial_first_moment(z);
    // ∫_a^b J(x-y) dy = tail(x-b) - tail(x-a)
    let flat = t(x - b) - t(x - l);
    // ∫_b^{k2} J(x-y)(k2-y) dy with s = x - y, k2 - y = (k2 - x) + s;
    // ∫_0^z sJ(s) ds is even in z, so ∫_α^β sJ = q(β) - q(α)
    let ramp = (k2 - x) * (t(x - k2) - t(x - b)) + q(x - b) - q(x - k2);
    flat + ramp / k1
}

/// Minimum over `x ∈ [k0, k2]` of `∫_l^{k2} J(x-y)ψ(y)dy - (1-ε)ψ(x)`.
pub fn verify_psi_inequality(kernel: &Kernel, params: &PsiParameters) -> Result<PsiReport> {
    let PsiParameters { l, k0, k1, k2, eps, .. } = *params;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition("need 0 < ε < 1".into()));
    }
    if !(k2 > k1 && k1 > l && k1 > k0 && k2 - k1 > 2.0 * k0 && k0 > l) {
        return Err(Error::Precondition(format!(
            "need k2 > k1 > l, k1 > k0 > l and k2 - k1 > 2 k0 (l={l}, k0={k0}, k1={k1}, k2={k2})"
        )));
    }
    let n = 20_000;
    let margin = |x: f64| psi_lhs(kernel, x, l, k1, k2) - (1.0 - eps) * psi(x, k1, k2);
    let step = (k2 - k0) / n as f64;
    let mut xs: Vec<f64> = (0..=n).map(|i| k0 + step * i as f64).collect();
    xs.push(k2 - k1);
    let mut worst = f64::INFINITY;
    let mut worst_x = k0;
    for &x in &xs {
        let m = margin(x);
        if m < worst {
            worst = m;
            worst_x = x;
        }
    }
    // golden section over the neighbouring cells pins the minimum down to
    // rounding, so the margin does not depend on where the grid falls
    let (mut a, mut b) = ((worst_x - step).max(k0), (worst_x + step).min(k2));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (margin(c), margin(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - g * (b - a);
            fc = margin(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + g * (b - a);
            fd = margin(d);
        }
    }
    for (x, m) in [(c, fc), (d, fd)] {
        if m < worst {
            worst = m;
            worst_x = x;
        }
    }
    Ok(PsiReport {
        passed: worst >= 0.0,
        worst_margin: worst,
        worst_x,
        points: xs.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxScaling {
    pub gamma: Option<f64>,
    /// Least-squares slope of `ln flux` against `ln h`.
    pub slope: f64,
    /// `2 - γ` for algebraic kernels with `γ < 2`.
    pub expected_slope: Option<f64>,
    /// `max/min` of `flux / ln h` (reported for `γ = 2`).
    pub log_ratio_band: Option<f64>,
    pub passed: bool,
}

/// Growth of `∫_0^h ∫_h^∞ J(x - y) dy dx` along a ladder of `h`.
pub fn verify_flux_asymptotics(kernel: &Kernel, ladder: &[f64]) -> Result<FluxScaling> {
    if ladder.len() < 3 || ladder.iter().any(|h| !(*h > 1.0)) {
        return Err(Error::Precondition("need at least three ladder values above 1".into()));
    }
    let (lo, hi) = ladder.iter().fold((f64::MAX, f64::MIN), |(a, b), h| (a.min(*h), b.max(*h)));
    if hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(Error::Precondition("ladder must span at least two decades".into()));
    }
    let gamma = kernel.gamma();
    if let Some(g) = gamma {
        if g > 2.0 {
            return Err(Error::Precondition(format!("flux stays bounded for γ = {g} > 2")));
        }
    }
    let flux: Vec<f64> = ladder.iter().map(|h| kernel.flux_integral(*h)).collect();
    let lx: Vec<f64> = ladder.iter().map(|h| h.ln()).collect();
    let ly: Vec<f64> = flux.iter().map(|f| f.ln()).collect();
    let slope = ols(&lx, &ly).slope;
    let is_log = matches!(gamma, Some(g) if (g - 2.0).abs() < 1e-12);
    let expected_slope = match gamma {
        Some(g) if !is_log => Some(2.0 - g),
        None => Some(0.0),
        _ => None,
    };
    let log_ratio_band = is_log.then(|| {
        let r: Vec<f64> = flux.iter().zip(&lx).map(|(f, l)| f / l).collect();
        r.iter().copied().fold(f64::MIN, f64::max) / r.iter().copied().fold(f64::MAX, f64::min)
    });
    let passed = match (expected_slope, log_ratio_band) {
        (Some(e), _) => (slope - e).abs() <= 0.05,
        (None, Some(b)) => b < RATIO_BAND,
        _ => false,
    };
    Ok(FluxScaling {
        gamma,
        slope,
        expected_slope,
        log_ratio_band,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(t_end: f64, n: usize, h: impl Fn(f64) -> f64) -> Trajectory {
        let times: Vec<f64> = (0..=n).map(|i| t_end * i as f64 / n as f64).collect();
        let hs = times.iter().map(|t| h(*t)).collect();
        Trajectory {
            times,
            h: hs,
            ..Trajectory::default()
        }
    }

    #[test]
    fn linear_fit_is_exact_on_lines() {
        let traj = series(100.0, 200, |t| 3.0 * t + 5.0);
        let f = estimate_linear_speed(&traj, Window::default_for(100.0)).unwrap();
        assert!((f.leading() - 3.0).abs() < 1e-12);
        assert!((f.coefficients[1] - 5.0).abs() < 1e-9);
        assert!(f.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn linear_fit_band_covers_oscillation() {
        let traj = series(200.0, 2000, |t| 2.0 * t + t.sin());
        let f = estimate_linear_speed(&traj, Window::default_for(200.0)).unwrap();
        assert!((f.leading() - 2.0).abs() < 0.01);
        assert!(f.band > 0.0 && f.band < 0.01);
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let traj = series(100.0, 200, |t| t * t);
        let f = fit_power(&traj, Window::default_for(100.0)).unwrap();
        assert!((f.leading() - 2.0).abs() < 1e-12);
        assert!((f.coefficients[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tlnt_fit_accepts_and_rejects() {
        let traj = series(1000.0, 1000, |t| 4.0 * t * t.max(1e-300).ln());
        let f = fit_tlnt(&traj, Window::last_decade(1000.0)).unwrap();
        assert!((f.leading() - 4.0).abs() < 1e-12);
        assert_eq!(f.bounded, Some(true));
        let sq = series(1000.0, 1000, |t| t * t);
        assert_eq!(fit_tlnt(&sq, Window::last_decade(1000.0)).unwrap().bounded, Some(false));
    }

    #[test]
    fn short_windows_are_rejected() {
        let traj = series(10.0, 10, |t| t);
        assert!(matches!(
            estimate_linear_speed(&traj, Window::default_for(10.0)),
            Err(Error::WindowTooShort(_))
        ));
    }

    #[test]
    fn level_set_of_linear_profile() {
        let f = Field::from_fn(0.1, 10.0, |x| (1.0 - x / 10.0).max(0.0)).unwrap();
        let s = level_set(&f, 0.5);
        assert_eq!(s, LevelSet::Crossings { inf: 5.0, sup: 5.0 });
        assert_eq!(level_set(&f, 1.5), LevelSet::Empty);
    }

    #[test]
    fn level_set_uses_boundary_taper() {
        let f = Field::new(1.0, vec![1.0, 1.0], 1.5).unwrap();
        assert_eq!(level_set(&f, 0.5), LevelSet::Crossings { inf: 1.25, sup: 1.25 });
    }

    #[test]
    fn level_set_plateau_tie_break() {
        let f = Field::new(1.0, vec![0.0, 0.5, 0.5, 0.5, 0.0], 4.0).unwrap();
        assert_eq!(level_set(&f, 0.5), LevelSet::Crossings { inf: 1.0, sup: 3.0 });
    }

    #[test]
    fn cone_distance_vanishes_on_profile() {
        let p = SteadyProfile {
            dx: 0.5,
            length: 10.0,
            values: (0..=20).map(|i| 0.5 + 0.02 * i as f64).collect(),
            plateau: 1.0,
            residual: 0.0,
            steps: 0,
        };
        let field = Field::new(0.5, p.values.clone(), 10.0).unwrap();
        let snaps = vec![Snapshot { t: 2.0, field }];
        let s = sup_distance_on_cone(&snaps, &p, 1.0);
        assert_eq!(s[0].distance, 0.0);
        assert!(!s[0].exceeds_boundary);
        let s = sup_distance_on_cone(&snaps, &p, 0.0);
        assert_eq!(s[0].distance, 0.0);
    }

    #[test]
    fn psi_lhs_matches_direct_quadrature() {
        use crate::quadrature::piecewise_gauss;
        for k in [Kernel::epanechnikov(), Kernel::gaussian(), Kernel::algebraic(1.5).unwrap()] {
            let (l, k1, k2) = (0.0, 6.0, 20.0);
            for x in [3.0, 13.5, 14.0, 19.0] {
                let mut breaks: Vec<f64> = (0..=4000).map(|i| l + (k2 - l) * i as f64 / 4000.0).collect();
                breaks.extend([x - 1.0, x, x + 1.0, k2 - k1]);
                breaks.sort_by(f64::total_cmp);
                let direct = piecewise_gauss(|y| k.eval(x - y) * psi(y, k1, k2), l, k2, &breaks);
                let closed = psi_lhs(&k, x, l, k1, k2);
                assert!((direct - closed).abs() < 1e-8, "{:?} x={x}: {direct} vs {closed}", k.family());
            }
        }
    }

    #[test]
    fn psi_inequality_holds_with_recipe() {
        for k in [Kernel::epanechnikov(), Kernel::gaussian(), Kernel::algebraic(1.5).unwrap()] {
            let p = psi_recipe(&k, 0.0, 0.1).unwrap();
            let r = verify_psi_inequality(&k, &p).unwrap();
            assert!(r.passed, "{:?}: {r:?}", k.family());
        }
    }

    #[test]
    fn psi_margin_improves_with_k0() {
        let k = Kernel::gaussian();
        let p = psi_recipe(&k, 0.0, 0.1).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for scale in [1.0, 1.05, 1.1] {
            let q = PsiParameters { k0: p.k0 * scale, ..p };
            let m = verify_psi_inequality(&k, &q).unwrap().worst_margin;
            assert!(m >= prev - 1e-14, "{m} < {prev}");
            prev = m;
        }
    }

    #[test]
    fn psi_hypotheses_are_enforced() {
        let k = Kernel::epanechnikov();
        let p = psi_recipe(&k, 0.0, 0.1).unwrap();
        let bad = PsiParameters { k2: p.k1 + p.k0, ..p };
        assert!(matches!(verify_psi_inequality(&k, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn flux_scaling_ladders() {
        let ladder: Vec<f64> = (0..=20).map(|i| 10f64.powf(2.0 + 0.1 * i as f64)).collect();
        let r = verify_flux_asymptotics(&Kernel::algebraic(1.5).unwrap(), &ladder).unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_flux_asymptotics(&Kernel::algebraic(2.0).unwrap(), &ladder).unwrap();
        assert!(r.passed && r.log_ratio_band.unwrap() < 3.0, "{r:?}");
        let r = verify_flux_asymptotics(&Kernel::epanechnikov(), &ladder).unwrap();
        assert!(r.slope.abs() < 1e-12);
        assert!(verify_flux_asymptotics(&Kernel::algebraic(3.0).unwrap(), &ladder).is_err());
    }
}

//! Semi-wave pairs `(c, φ)`: decreasing profiles on `(-∞, 0]` with
//! `φ(-∞) = u*`, `φ(0) = 0`, solving
//!
//! ```text
//! d ∫_{-∞}^0 J(x - y) φ(y) dy - d φ + c φ' + f(φ) = 0,   x < 0
//! c = μ ∫_{-∞}^0 ∫_0^∞ J(x - y) φ(x) dy dx
//! ```
//!
//! The profile equation is relaxed in pseudo-time for fixed `c`; `c` is
//! then updated by damped fixed-point iteration on the flux condition,
//! switching to regula falsi once the fixed point is bracketed.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::free_boundary::positive;
use crate::grid_field::{flux_integral_of, Field, Stencil};
use crate::kernels::{Kernel, TruncatedKernel};
use crate::reaction::Reaction;

/// Discretization and iteration controls for [`solve_semiwave`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiWaveNumerics {
    pub dx: f64,
    /// Truncated half-line `[-M, 0]`.
    pub length: f64,
    /// Profile residual at which the pseudo-time relaxation stops.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Outer stop: `|μ·flux(φ_c) - c| < speed_tol`.
    #[serde(default = "default_speed_tol")]
    pub speed_tol: f64,
    /// Damping of the speed update before the fixed point is bracketed;
    /// halved whenever the flux mismatch grows.
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    #[serde(default = "default_max_inner")]
    pub max_inner_steps: usize,
}

/// Smallest inner tolerance; the profile residual cannot go much below
/// rounding.
const INNER_TOL_FLOOR: f64 = 1e-13;

fn default_tol() -> f64 {
    1e-9
}
fn default_speed_tol() -> f64 {
    1e-8
}
fn default_damping() -> f64 {
    0.5
}
fn default_max_outer() -> usize {
    200
}
fn default_max_inner() -> usize {
    2_000_000
}

impl SemiWaveNumerics {
    pub fn new(dx: f64, length: f64) -> SemiWaveNumerics {
        SemiWaveNumerics {
            dx,
            length,
            tol: default_tol(),
            speed_tol: default_speed_tol(),
            damping: default_damping(),
            max_outer: default_max_outer(),
            max_inner_steps: default_max_inner(),
        }
    }
}

/// Converged semi-wave on the grid `x_i = -M + i·dx`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SemiWave {
    pub c: f64,
    pub mu: f64,
    pub dx: f64,
    pub length: f64,
    /// `φ(x_i)`; the last entry is `φ(0) = 0`.
    pub phi: Vec<f64>,
    pub plateau: f64,
    /// `|c - μ·flux(φ)|`.
    pub flux_residual: f64,
    /// Final profile residual.
    pub profile_residual: f64,
    pub outer_iterations: usize,
    /// Flux mismatch after each outer iteration.
    pub history: Vec<f64>,
}

impl SemiWave {
    pub fn x(&self, i: usize) -> f64 {
        -self.length + i as f64 * self.dx
    }

    /// Interpolated `φ(x)`: the plateau left of `-M`, zero for `x ≥ 0`.
    pub fn value_at(&self, x: f64) -> f64 {
        if x >= 0.0 {
            return 0.0;
        }
        let z = x + self.length;
        if z <= 0.0 {
            return self.plateau;
        }
        let s = z / self.dx;
        let i = (s.floor() as usize).min(self.phi.len() - 2);
        let frac = s - i as f64;
        self.phi[i] * (1.0 - frac) + self.phi[i + 1] * frac
    }

    /// Strict decrease wherever `plateau - φ` exceeds `resolution`; nearer
    /// the plateau, changes must stay within `resolution`.
    pub fn is_decreasing(&self, resolution: f64) -> bool {
        let p = self.plateau;
        if *self.phi.last().unwrap() != 0.0 {
            return false;
        }
        if !self.phi.iter().all(|v| *v >= 0.0 && *v < p + resolution) {
            return false;
        }
        self.phi.windows(2).all(|w| {
            if p - w[1] > resolution {
                w[1] < w[0]
            } else {
                (w[1] - w[0]).abs() <= resolution
            }
        })
    }

    /// Columns `x,phi`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,phi")?;
        for (i, v) in self.phi.iter().enumerate() {
            writeln!(w, "{},{}", self.x(i), v)?;
        }
        Ok(())
    }
}

/// Semi-wave speed and profile for boundary coefficient `μ`.
pub fn solve_semiwave(kernel: &Kernel, reaction: &Reaction, d: f64, mu: f64, numerics: &SemiWaveNumerics) -> Result<SemiWave> {
    let c_star = kpp_min_speed(kernel, reaction, d).ok();
    solve(kernel, reaction, d, mu, reaction.u_star(), c_star, numerics)
}

/// Semi-wave for the truncated kernel `J_n`, with plateau `u*_n`.
pub fn solve_semiwave_truncated(
    kernel: &TruncatedKernel,
    reaction: &Reaction,
    d: f64,
    mu: f64,
    numerics: &SemiWaveNumerics,
) -> Result<SemiWave> {
    let plateau = reaction.truncated_equilibrium(d, kernel.l1_norm())?;
    let k = kernel.as_kernel()?;
    let c_star = kpp_min_speed(&k, reaction, d).ok();
    solve(&k, reaction, d, mu, plateau, c_star, numerics)
}

fn solve(
    kernel: &Kernel,
    reaction: &Reaction,
    d: f64,
    mu: f64,
    plateau: f64,
    c_star: Option<f64>,
    numerics: &SemiWaveNumerics,
) -> Result<SemiWave> {
    positive("d", d)?;
    positive("mu", mu)?;
    positive("numerics.tol", numerics.tol)?;
    positive("numerics.speed_tol", numerics.speed_tol)?;
    if !(numerics.damping > 0.0 && numerics.damping <= 1.0) {
        return Err(invalid("numerics.damping", "must lie in (0, 1]"));
    }
    let far_flux = kernel.tail_moment(numerics.length).ok_or(Error::InfiniteFirstMoment)?;
    let dx = numerics.dx;
    let n = (numerics.length / dx).round() as usize;
    if n < 4 {
        return Err(invalid("numerics.length", "domain must span several cells"));
    }
    let length = n as f64 * dx;
    let mut stencil = Stencil::new(kernel, dx)?;
    stencil.ensure(n);
    // z = x + M ∈ [0, M]
    let mut field = Field::from_fn(dx, length, |z| plateau * ((length - z) / 5.0).min(1.0))?;
    let closure: Vec<f64> = (0..=n).map(|i| plateau * kernel.tail(i as f64 * dx)).collect();
    let flux = |f: &Field| mu * (flux_integral_of(kernel, f) + plateau * far_flux);

    let lip = reaction.lipschitz(plateau);
    let mut c = flux(&field);
    if let Some(cs) = c_star {
        c = c.min(0.9 * cs);
    }
    let mut theta = numerics.damping;
    let mut history = Vec::new();
    let mut scratch = vec![0.0; n + 1];
    let mut prev_mismatch = f64::INFINITY;
    // R(c) = μ·flux(φ_c) - c is decreasing in c; once it has changed sign the
    // root is bracketed and Illinois steps replace the damped update.
    let mut lo: Option<(f64, f64)> = None;
    let mut hi: Option<(f64, f64)> = None;
    let mut last_side = 0i8;
    for outer in 1..=numerics.max_outer {
        // A profile solved only to `tol` caps how well the flux can match c,
        // so the inner tolerance follows the mismatch down.
        let inner_tol = numerics.tol.min(0.01 * prev_mismatch).max(INNER_TOL_FLOOR);
        let profile_residual = relax_profile(
            &mut field,
            &stencil,
            reaction,
            d,
            c,
            lip,
            &closure,
            inner_tol,
            numerics.max_inner_steps,
            &mut scratch,
        )?;
        let g = flux(&field);
        let r = g - c;
        let mismatch = r.abs();
        history.push(mismatch);
        if mismatch < numerics.speed_tol {
            return Ok(SemiWave {
                c,
                mu,
                dx,
                length,
                phi: field.values().to_vec(),
                plateau,
                flux_residual: mismatch,
                profile_residual,
                outer_iterations: outer,
                history,
            });
        }
        if r > 0.0 {
            if last_side == 1 {
                if let Some(h) = hi.as_mut() {
                    h.1 *= 0.5;
                }
            }
            lo = Some((c, r));
            last_side = 1;
        } else {
            if last_side == -1 {
                if let Some(l) = lo.as_mut() {
                    l.1 *= 0.5;
                }
            }
            hi = Some((c, r));
            last_side = -1;
        }
        c = match (lo, hi) {
            (Some((a, ra)), Some((b, rb))) => (a * rb - b * ra) / (rb - ra),
            _ => {
                if mismatch > prev_mismatch {
                    theta *= 0.5;
                }
                (1.0 - theta) * c + theta * g
            }
        };
        prev_mismatch = mismatch;
    }
    Err(Error::NoConvergence {
        iterations: numerics.max_outer,
        residual: prev_mismatch,
        history,
    })
}

/// Pseudo-time relaxation of the profile equation at fixed `c`, with the
/// ends pinned to the plateau and to zero. Returns the final residual.
#[allow(clippy::too_many_arguments)]
fn relax_profile(
    field: &mut Field,
    stencil: &Stencil,
    reaction: &Reaction,
    d: f64,
    c: f64,
    lip: f64,
    closure: &[f64],
    tol: f64,
    max_steps: usize,
    conv: &mut [f64],
) -> Result<f64> {
    let n = field.m();
    let dx = field.dx();
    let dt = 0.45 / (d + lip + 1.5 * c / dx);
    let mut rates = vec![0.0; n + 1];
    let mut residual = f64::INFINITY;
    for step in 0..max_steps {
        stencil.convolve(field, conv);
        let phi = field.values();
        residual = 0.0;
        for i in 1..n {
            // Transport is leftward, so the difference looks to the right;
            // second order except next to the pinned zero.
            let dphi = if i + 2 <= n {
                (-phi[i + 2] + 4.0 * phi[i + 1] - 3.0 * phi[i]) / (2.0 * dx)
            } else {
                (phi[i + 1] - phi[i]) / dx
            };
            let r = d * (conv[i] + closure[i] - phi[i]) + c * dphi + reaction.value(phi[i]);
            rates[i] = r;
            residual = residual.max(r.abs());
        }
        if !residual.is_finite() {
            return Err(Error::NonFinite {
                t: step as f64 * dt,
                node: n,
            });
        }
        if residual < tol {
            return Ok(residual);
        }
        let phi = field.values_mut();
        for i in 1..n {
            phi[i] = (phi[i] + dt * rates[i]).max(0.0);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_steps,
        residual,
        history: Vec::new(),
    })
}

/// `c_* = min_{λ>0} (d(∫J e^{λx} - 1) + f'(0)) / λ`, the minimal
/// travelling-wave speed of the whole-line problem.
pub fn kpp_min_speed(kernel: &Kernel, reaction: &Reaction, d: f64) -> Result<f64> {
    positive("d", d)?;
    let r = reaction.growth();
    let g = |l: f64| match kernel.mgf(l) {
        Some(m) if m.is_finite() => (d * (m - 1.0) + r) / l,
        _ => f64::INFINITY,
    };
    let lambdas: Vec<f64> = (0..400).map(|k| 1e-3 * 1.03f64.powi(k)).collect();
    let values: Vec<f64> = lambdas.iter().map(|l| g(*l)).collect();
    let (k, best) = values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if !best.is_finite() {
        return Err(Error::NoExponentialMoment);
    }
    if k == 0 || k + 1 == lambdas.len() {
        return Err(Error::NoConvergence {
            iterations: lambdas.len(),
            residual: best,
            history: Vec::new(),
        });
    }
    let (mut a, mut b) = (lambdas[k - 1], lambdas[k + 1]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = g(x2);
        }
        if b - a < 1e-12 * b {
            break;
        }
    }
    Ok(f1.min(f2))
}

/// Semi-wave speeds over a ladder of `μ`, for the speed table output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedTable {
    pub c_star: Option<f64>,
    pub entries: Vec<SpeedEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedEntry {
    pub mu: f64,
    pub c: f64,
    pub flux_residual: f64,
    pub outer_iterations: usize,
}

pub fn speed_table(kernel: &Kernel, reaction: &Reaction, d: f64, mus: &[f64], numerics: &SemiWaveNumerics) -> Result<SpeedTable> {
    let entries = mus
        .iter()
        .map(|&mu| {
            solve_semiwave(kernel, reaction, d, mu, numerics).map(|w| SpeedEntry {
                mu,
                c: w.c,
                flux_residual: w.flux_residual,
                outer_iterations: w.outer_iterations,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpeedTable {
        c_star: kpp_min_speed(kernel, reaction, d).ok(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_min_speed_is_sqrt_e() {
        let c = kpp_min_speed(&Kernel::gaussian(), &Reaction::logistic(), 1.0).unwrap();
        assert!((c - 1f64.exp().sqrt()).abs() < 1e-9, "{c}");
    }

    #[test]
    fn min_speed_needs_exponential_moment() {
        let e = kpp_min_speed(&Kernel::algebraic(3.0).unwrap(), &Reaction::logistic(), 1.0);
        assert!(matches!(e, Err(Error::NoExponentialMoment)));
    }

    #[test]
    fn heavy_tail_has_no_semiwave() {
        let e = solve_semiwave(
            &Kernel::algebraic(1.5).unwrap(),
            &Reaction::logistic(),
            1.0,
            1.0,
            &SemiWaveNumerics::new(0.1, 20.0),
        );
        assert!(matches!(e, Err(Error::InfiniteFirstMoment)));
    }

    #[test]
    fn epanechnikov_semiwave_is_consistent() {
        let k = Kernel::epanechnikov();
        let r = Reaction::logistic();
        let w = solve_semiwave(&k, &r, 1.0, 2.0, &SemiWaveNumerics::new(0.05, 30.0)).unwrap();
        assert!(w.flux_residual < 1e-6);
        assert!(w.is_decreasing(1e-10));
        assert_eq!(*w.phi.last().unwrap(), 0.0);
        let cs = kpp_min_speed(&k, &r, 1.0).unwrap();
        assert!(w.c > 0.0 && w.c < cs, "c = {}, c* = {cs}", w.c);
    }
}

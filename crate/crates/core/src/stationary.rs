//! Monotone steady states of the half-line problem, computed by relaxing the
//! time-dependent equation to equilibrium on a truncated domain `[0, L]`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::free_boundary::{advance, positive};
use crate::grid_field::{Field, Stencil};
use crate::kernels::{Kernel, TruncatedKernel};
use crate::quadrature::piecewise_gauss;
use crate::reaction::Reaction;

/// Domain and stopping controls for [`solve_steady`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteadyNumerics {
    pub dx: f64,
    /// Truncated domain length `L`; at least 20 kernel core widths.
    pub length: f64,
    /// Stop when `max |residual| < tol`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_steps() -> usize {
    2_000_000
}

impl SteadyNumerics {
    pub fn new(dx: f64, length: f64) -> SteadyNumerics {
        SteadyNumerics {
            dx,
            length,
            tol: default_tol(),
            max_steps: default_max_steps(),
        }
    }
}

/// Steady state on `[0, L]`, continued by its plateau beyond `L`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyProfile {
    pub dx: f64,
    pub length: f64,
    pub values: Vec<f64>,
    /// Limit at infinity: `u*`, or `u*_n` for a truncated kernel.
    pub plateau: f64,
    /// Final `max |d(∫J U - U) + f(U)|` on the grid.
    pub residual: f64,
    pub steps: usize,
}

impl SteadyProfile {
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Linear interpolation on `[0, L]`, the plateau beyond.
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.values[0];
        }
        if x >= self.length {
            return self.plateau;
        }
        let s = x / self.dx;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Point where the profile first reaches `λ`.
    pub fn inverse_level(&self, lambda: f64) -> Result<f64> {
        let lo = self.values[0];
        let hi = self.plateau;
        let found = self.values.iter().position(|v| *v >= lambda);
        let i = match found {
            Some(i) if lambda > lo && lambda < hi => i,
            _ => return Err(Error::LevelOutOfRange { lambda, lo, hi }),
        };
        let (a, b) = (self.values[i - 1], self.values[i]);
        Ok(self.x(i - 1) + self.dx * (lambda - a) / (b - a))
    }

    /// Checks `0 < U < plateau` and strict increase wherever `plateau - U`
    /// exceeds `resolution`; closer to the plateau only `|ΔU| ≤ resolution`
    /// is required, since differences there are below rounding.
    pub fn is_monotone(&self, resolution: f64) -> bool {
        let p = self.plateau;
        if !self.values.iter().all(|v| *v > 0.0 && *v < p + resolution) {
            return false;
        }
        self.values.windows(2).all(|w| {
            if p - w[0] > resolution {
                w[1] > w[0]
            } else {
                w[1] >= w[0] - resolution
            }
        })
    }

    /// Residual recomputed by direct Gauss-Legendre quadrature of
    /// `∫_0^∞ J(x_i - y) U(y) dy` cell by cell, independent of the stencil
    /// tables.
    pub fn independent_residual(&self, kernel: &Kernel, reaction: &Reaction, d: f64) -> f64 {
        let n = self.values.len();
        let reach = kernel.interaction_radius();
        let mut worst = 0.0f64;
        for i in 0..n {
            let x = self.x(i);
            let (lo_cell, hi_cell) = match reach {
                Some(r) => (
                    ((x - r) / self.dx).floor().max(0.0) as usize,
                    (((x + r) / self.dx).ceil() as usize).min(n - 1),
                ),
                None => (0, n - 1),
            };
            let mut conv = 0.0;
            for j in lo_cell..hi_cell {
                let (a, b) = (self.x(j), self.x(j + 1));
                let (ua, ub) = (self.values[j], self.values[j + 1]);
                // s = x - y ranges over [x - b, x - a]
                conv += piecewise_gauss(
                    |s| {
                        let y = x - s;
                        kernel.eval(s) * (ua + (ub - ua) * (y - a) / self.dx)
                    },
                    x - b,
                    x - a,
                    kernel.breakpoints(),
                );
            }
            conv += self.plateau * kernel.tail(self.length - x);
            let u = self.values[i];
            worst = worst.max((d * (conv - u) + reaction.value(u)).abs());
        }
        worst
    }

    /// Columns `x,U`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,U")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.x(i), v)?;
        }
        Ok(())
    }
}

/// Steady state `U` of `d(∫_0^∞ J(x-y)U(y)dy - U) + f(U) = 0` with
/// `U(∞) = u*`.
pub fn solve_steady(kernel: &Kernel, reaction: &Reaction, d: f64, numerics: &SteadyNumerics) -> Result<SteadyProfile> {
    relax(kernel, reaction, d, reaction.u_star(), numerics)
}

/// Steady state for the truncated kernel `J_n`, whose plateau is `u*_n`.
pub fn solve_steady_truncated(
    kernel: &TruncatedKernel,
    reaction: &Reaction,
    d: f64,
    numerics: &SteadyNumerics,
) -> Result<SteadyProfile> {
    let plateau = reaction.truncated_equilibrium(d, kernel.l1_norm())?;
    relax(&kernel.as_kernel()?, reaction, d, plateau, numerics)
}

fn relax(kernel: &Kernel, reaction: &Reaction, d: f64, plateau: f64, numerics: &SteadyNumerics) -> Result<SteadyProfile> {
    positive("d", d)?;
    positive("numerics.tol", numerics.tol)?;
    let dx = numerics.dx;
    let core = kernel.core_width();
    if numerics.length < 20.0 * core {
        return Err(invalid(
            "numerics.length",
            format!("need L ≥ 20 kernel widths ({}), got {}", 20.0 * core, numerics.length),
        ));
    }
    let m = (numerics.length / dx).round() as usize;
    let length = m as f64 * dx;
    let mut stencil = Stencil::new(kernel, dx)?;
    let mut field = Field::from_fn(dx, length, |x| plateau * (x / 5.0 + 0.1).min(1.0))?;
    let closure: Vec<f64> = (0..=m).map(|i| plateau * kernel.tail(length - i as f64 * dx)).collect();
    let dt = 0.9 * 0.5 / (d + reaction.lipschitz(plateau));
    let mut scratch = Vec::new();
    let mut residual = f64::INFINITY;
    let mut steps = 0;
    while steps < numerics.max_steps {
        residual = advance(&mut field, &mut stencil, reaction, d, dt, steps as f64 * dt, Some(&closure), &mut scratch)?;
        steps += 1;
        if residual < numerics.tol {
            break;
        }
    }
    if !(residual < numerics.tol) {
        return Err(Error::NoConvergence {
            iterations: steps,
            residual,
            history: Vec::new(),
        });
    }
    let values = field.values().to_vec();
    let end = *values.last().unwrap();
    if (plateau - end).abs() > 1e-3 {
        return Err(Error::PlateauNotReached {
            value: end,
            expected: plateau,
        });
    }
    Ok(SteadyProfile {
        dx,
        length,
        values,
        plateau,
        residual,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn epan() -> SteadyProfile {
        solve_steady(&Kernel::epanechnikov(), &Reaction::logistic(), 1.0, &SteadyNumerics::new(0.05, 20.0)).unwrap()
    }

    #[test]
    fn epanechnikov_profile_is_monotone_and_converged() {
        let p = epan();
        assert!(p.residual < 1e-8);
        assert!(p.is_monotone(1e-10));
        assert!(p.values[0] > 0.0 && p.values[0] < 1.0);
        let r = p.independent_residual(&Kernel::epanechnikov(), &Reaction::logistic(), 1.0);
        assert!(r < 1e-8, "independent residual {r}");
    }

    #[test]
    fn gaussian_profile_is_monotone() {
        let p = solve_steady(&Kernel::gaussian(), &Reaction::logistic(), 1.0, &SteadyNumerics::new(0.05, 24.0)).unwrap();
        assert!(p.is_monotone(1e-10));
        let r = p.independent_residual(&Kernel::gaussian(), &Reaction::logistic(), 1.0);
        assert!(r < 1e-8, "independent residual {r}");
    }

    #[test]
    fn short_domain_is_rejected() {
        let e = solve_steady(&Kernel::epanechnikov(), &Reaction::logistic(), 1.0, &SteadyNumerics::new(0.05, 10.0));
        assert!(e.is_err());
    }

    #[test]
    fn heavy_tail_misses_plateau() {
        let e = solve_steady(&Kernel::algebraic(1.5).unwrap(), &Reaction::logistic(), 1.0, &SteadyNumerics::new(0.1, 20.0));
        assert!(matches!(e, Err(Error::PlateauNotReached { .. })), "{e:?}");
    }

    #[test]
    fn inverse_level_inverts_interpolant() {
        let p = epan();
        for lambda in [p.values[0] + 1e-3, 0.9, 0.99] {
            let x = p.inverse_level(lambda).unwrap();
            assert!((p.value_at(x) - lambda).abs() < 1e-12);
        }
        assert!(p.inverse_level(1.0).is_err());
        assert!(p.inverse_level(0.0).is_err());
    }

    #[test]
    fn truncation_ladder_converges() {
        let r = Reaction::logistic();
        let num = SteadyNumerics::new(0.05, 24.0);
        let full = solve_steady(&Kernel::gaussian(), &r, 1.0, &num).unwrap();
        let mut prev = f64::INFINITY;
        for n in [1.0, 1.5, 2.0, 3.0] {
            let tk = TruncatedKernel::new(Kernel::gaussian(), n).unwrap();
            let p = solve_steady_truncated(&tk, &r, 1.0, &num).unwrap();
            assert!(p.is_monotone(1e-10));
            let dist = p.values.iter().zip(&full.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dist <= prev, "n = {n}: {dist} > {prev}");
            prev = dist;
        }
        assert!(prev < 0.01);
    }
}

//! Fisher-KPP reaction terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serializable reaction description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReactionSpec {
    /// `growth · u (1 - u / capacity)`.
    Logistic {
        #[serde(default = "one")]
        growth: f64,
        #[serde(default = "one")]
        capacity: f64,
    },
    /// `Σ_k coefficients[k] u^k`.
    Poly { coefficients: Vec<f64> },
}

fn one() -> f64 {
    1.0
}

impl Default for ReactionSpec {
    fn default() -> Self {
        ReactionSpec::Logistic {
            growth: 1.0,
            capacity: 1.0,
        }
    }
}

/// A reaction `f` with `f(0) = 0 < f'(0)`, `f(u*) = 0 > f'(u*)` and
/// `f(u)/u` strictly decreasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Reaction {
    /// Polynomial coefficients, lowest degree first.
    coeffs: Vec<f64>,
    u_star: f64,
    spec: ReactionSpec,
}

impl Default for Reaction {
    fn default() -> Self {
        Reaction::logistic()
    }
}

impl Reaction {
    /// `u (1 - u)`.
    pub fn logistic() -> Reaction {
        Reaction::scaled_logistic(1.0, 1.0).unwrap()
    }

    pub fn scaled_logistic(growth: f64, capacity: f64) -> Result<Reaction> {
        if !(growth > 0.0) || !(capacity > 0.0) || !growth.is_finite() || !capacity.is_finite() {
            return Err(Error::InvalidReaction(format!(
                "logistic needs positive growth and capacity, got {growth}, {capacity}"
            )));
        }
        Ok(Reaction {
            coeffs: vec![0.0, growth, -growth / capacity],
            u_star: capacity,
            spec: ReactionSpec::Logistic { growth, capacity },
        })
    }

    /// Polynomial reaction; `u*` is located as the first positive zero and
    /// the KPP conditions are checked on a sample grid.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Reaction> {
        if coefficients.len() < 3 || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidReaction("need at least a quadratic with finite coefficients".into()));
        }
        if coefficients[0] != 0.0 {
            return Err(Error::InvalidReaction("f(0) must vanish".into()));
        }
        if !(coefficients[1] > 0.0) {
            return Err(Error::InvalidReaction("f'(0) must be positive".into()));
        }
        let mut r = Reaction {
            coeffs: coefficients.clone(),
            u_star: f64::NAN,
            spec: ReactionSpec::Poly { coefficients },
        };
        // first sign change of f(u)/u on (0, 1e6]
        let g = |u: f64| r.per_capita(u);
        let mut lo = 0.0;
        let mut hi = 1e-3;
        while g(hi) > 0.0 {
            lo = hi;
            hi *= 1.5;
            if hi > 1e6 {
                return Err(Error::InvalidReaction("no positive equilibrium found".into()));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        r.u_star = 0.5 * (lo + hi);
        r.validate()?;
        Ok(r)
    }

    pub fn from_spec(spec: &ReactionSpec) -> Result<Reaction> {
        match spec {
            ReactionSpec::Logistic { growth, capacity } => Reaction::scaled_logistic(*growth, *capacity),
            ReactionSpec::Poly { coefficients } => Reaction::polynomial(coefficients.clone()),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.derivative(self.u_star) < 0.0) {
            return Err(Error::InvalidReaction("f'(u*) must be negative".into()));
        }
        let n = 2000;
        let mut prev = f64::INFINITY;
        for i in 1..=n {
            let u = 2.0 * self.u_star * i as f64 / n as f64;
            let q = self.per_capita(u);
            if !(q < prev) {
                return Err(Error::InvalidReaction(format!(
                    "f(u)/u is not strictly decreasing near u = {u}"
                )));
            }
            prev = q;
        }
        Ok(())
    }

    pub fn spec(&self) -> &ReactionSpec {
        &self.spec
    }

    pub fn u_star(&self) -> f64 {
        self.u_star
    }

    /// `f'(0)`.
    pub fn growth(&self) -> f64 {
        self.coeffs[1]
    }

    /// `f(u)` for `u ≥ 0`.
    pub fn eval(&self, u: f64) -> Result<f64> {
        if u < 0.0 || u.is_nan() {
            return Err(Error::NegativeDensity(u));
        }
        Ok(self.value(u))
    }

    /// `f(u)` without the sign check, for solver inner loops.
    #[inline]
    pub fn value(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    /// `f(u)/u`, continuously extended by `f'(0)` at zero.
    pub fn per_capita(&self, u: f64) -> f64 {
        self.coeffs[1..].iter().rev().fold(0.0, |acc, c| acc * u + c)
    }

    pub fn derivative(&self, u: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * u + k as f64 * c)
    }

    /// `sup |f'|` on `[0, upper]`, sampled on a fine grid.
    pub fn lipschitz(&self, upper: f64) -> f64 {
        let n = 4000;
        (0..=n)
            .map(|i| self.derivative(upper * i as f64 / n as f64).abs())
            .fold(0.0, f64::max)
    }

    /// Unique positive root `u_n*` of `d (l1 - 1) u + f(u) = 0` in `(0, u*]`.
    pub fn truncated_equilibrium(&self, d: f64, l1: f64) -> Result<f64> {
        let shift = d * (l1 - 1.0);
        let margin = shift + self.growth();
        if !(margin > 0.0) {
            return Err(Error::TruncationTooSmall { margin });
        }
        if shift == 0.0 {
            return Ok(self.u_star);
        }
        // shift + f(u)/u is strictly decreasing, positive at 0 and ≤ 0 at u*.
        let q = |u: f64| shift + self.per_capita(u);
        let (mut lo, mut hi) = (0.0, self.u_star);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if q(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Largest `ρ` with `f(u) ≥ ρ min{u, u* - u}` on `[0, u*]`.
    pub fn kpp_lower_bound_rho(&self) -> f64 {
        let us = self.u_star;
        let ratio = |u: f64| self.value(u) / u.min(us - u);
        let n = 20_000;
        let mut best = self.growth().min(-self.derivative(us));
        let mut arg = None;
        for i in 1..n {
            let u = us * i as f64 / n as f64;
            let r = ratio(u);
            if r < best {
                best = r;
                arg = Some(i);
            }
        }
        if let Some(i) = arg {
            // golden-section refinement on the bracketing cells
            let (mut a, mut b) = (us * (i - 1) as f64 / n as f64, us * (i + 1) as f64 / n as f64);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..100 {
                let c = b - phi * (b - a);
                let e = a + phi * (b - a);
                if ratio(c) < ratio(e) {
                    b = e;
                } else {
                    a = c;
                }
            }
            best = best.min(ratio(0.5 * (a + b)));
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn logistic_values() {
        let f = Reaction::logistic();
        assert_eq!(f.eval(0.0).unwrap(), 0.0);
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
        assert_eq!(f.eval(0.5).unwrap(), 0.25);
        assert!(matches!(f.eval(-0.1), Err(Error::NegativeDensity(_))));
        assert_eq!(f.growth(), 1.0);
        assert_eq!(f.derivative(1.0), -1.0);
    }

    #[test]
    fn kpp_conditions_by_finite_differences() {
        for f in [
            Reaction::logistic(),
            Reaction::scaled_logistic(2.0, 3.0).unwrap(),
            Reaction::polynomial(vec![0.0, 1.0, 0.0, -1.0]).unwrap(),
        ] {
            let e = 1e-6;
            let us = f.u_star();
            assert!(f.value(0.0).abs() < 1e-14);
            assert!(f.value(us).abs() < 1e-10);
            assert!((f.value(e) - f.value(0.0)) / e > 0.0);
            assert!((f.value(us + e) - f.value(us - e)) / (2.0 * e) < 0.0);
        }
    }

    #[test]
    fn polynomial_u_star() {
        let f = Reaction::polynomial(vec![0.0, 1.0, 0.0, -1.0]).unwrap();
        assert!((f.u_star() - 1.0).abs() < 1e-12);
        // bistable-like u(1-u)(u-0.2) fails f'(0) > 0
        assert!(Reaction::polynomial(vec![0.0, -0.2, 1.2, -1.0]).is_err());
        // f(u)/u = 1 + u - u^2 increases first: not KPP
        assert!(Reaction::polynomial(vec![0.0, 1.0, 1.0, -1.0]).is_err());
        assert!(Reaction::polynomial(vec![0.1, 1.0, -1.0]).is_err());
    }

    #[test]
    fn truncated_equilibrium_examples() {
        let f = Reaction::logistic();
        assert_eq!(f.truncated_equilibrium(3.0, 1.0).unwrap(), 1.0);
        let u = f.truncated_equilibrium(1.0, 0.9).unwrap();
        assert!((u - 0.9).abs() < 1e-14);
        assert!((1.0 * (0.9 - 1.0) * u + f.value(u)).abs() < 1e-12);
        assert!(matches!(
            f.truncated_equilibrium(2.0, 0.4),
            Err(Error::TruncationTooSmall { .. })
        ));
    }

    #[test]
    fn rho_examples() {
        assert!((Reaction::logistic().kpp_lower_bound_rho() - 0.5).abs() < 1e-6);
        let f2 = Reaction::scaled_logistic(2.0, 1.0).unwrap();
        assert!((f2.kpp_lower_bound_rho() - 1.0).abs() < 1e-6);
        let cubic = Reaction::polynomial(vec![0.0, 1.0, 0.0, -1.0]).unwrap();
        let rho = cubic.kpp_lower_bound_rho();
        assert!(rho > 0.0);
        for i in 0..=1000 {
            let u = i as f64 / 1000.0;
            assert!(cubic.value(u) >= rho * u.min(1.0 - u) - 1e-12);
        }
    }

    proptest! {
        #[test]
        fn per_capita_strictly_decreasing(a in 1e-4f64..2.0, b in 1e-4f64..2.0) {
            prop_assume!((a - b).abs() > 1e-9);
            let (u1, u2) = if a < b { (a, b) } else { (b, a) };
            for f in [Reaction::logistic(), Reaction::polynomial(vec![0.0, 1.0, 0.0, -1.0]).unwrap()] {
                prop_assert!(f.value(u1) / u1 > f.value(u2) / u2);
            }
        }

        #[test]
        fn truncated_equilibrium_monotone(d in 0.1f64..3.0, l1a in 0.0f64..1.0, l1b in 0.0f64..1.0) {
            let f = Reaction::logistic();
            let (lo, hi) = if l1a < l1b { (l1a, l1b) } else { (l1b, l1a) };
            if let (Ok(a), Ok(b)) = (f.truncated_equilibrium(d, lo), f.truncated_equilibrium(d, hi)) {
                prop_assert!(a <= b + 1e-15);
                prop_assert!(b <= 1.0);
                let g = d * (lo - 1.0) * a + f.value(a);
                prop_assert!(g.abs() < 1e-12);
            }
        }
    }
}

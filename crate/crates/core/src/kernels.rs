//! Dispersal kernels.
//!
//! Every kernel is even, continuous, bounded, strictly positive at the origin
//! and normalized to unit mass. The three canonical families carry closed-form
//! tails `tail(z) = ∫_z^∞ J`, so the boundary flux never picks up quadrature
//! error from the kernel itself. A tabulated family covers user-supplied
//! kernels.

use std::f64::consts::SQRT_2;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, composite_simpson, piecewise_gauss};

/// Radius beyond which the standard Gaussian density is below 1e-31 and is
/// treated as zero by the banded convolution.
pub const GAUSSIAN_CUTOFF: f64 = 12.0;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// How a tabulated kernel continues past its last sample.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailExtrapolation {
    /// The kernel vanishes past the table; the last sample must be zero.
    None,
    /// `J(R) exp(-rate (x - R))` for `x > R`.
    Exponential { rate: f64 },
    /// `J(R) (x / R)^(-exponent)` for `x > R`.
    Power { exponent: f64 },
}

/// Serializable kernel description, as it appears in run configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum KernelSpec {
    #[serde(alias = "compact-epanechnikov", alias = "compact")]
    Epanechnikov,
    Gaussian,
    Algebraic {
        gamma: f64,
    },
    Tabulated {
        /// Sample spacing on `[0, R]`.
        spacing: f64,
        /// Unnormalized samples `J(0), J(spacing), ...`.
        values: Vec<f64>,
        extrapolation: TailExtrapolation,
    },
}

/// Family tag with its shape parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KernelFamily {
    Epanechnikov,
    Gaussian,
    Algebraic { gamma: f64 },
    Tabulated,
}

/// Finiteness of `∫_0^∞ x J(x) dx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FirstMoment {
    Finite(f64),
    Infinite,
}

impl FirstMoment {
    pub fn is_finite(&self) -> bool {
        matches!(self, FirstMoment::Finite(_))
    }
    pub fn value(&self) -> Option<f64> {
        match self {
            FirstMoment::Finite(v) => Some(*v),
            FirstMoment::Infinite => None,
        }
    }
}

#[derive(Debug)]
struct Table {
    spacing: f64,
    /// Normalized samples.
    values: Vec<f64>,
    /// `upper[i] = ∫_{x_i}^∞ J`, normalized, including the extrapolated tail.
    upper: Vec<f64>,
    extrapolation: TailExtrapolation,
    radius: f64,
    breaks: Vec<f64>,
    /// Length scale inherited from a parent kernel, if any.
    core: Option<f64>,
}

impl Table {
    fn build(spacing: f64, raw: &[f64], extrapolation: TailExtrapolation) -> Result<Table> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::InvalidKernel("tabulated spacing must be positive".into()));
        }
        if raw.len() < 2 {
            return Err(Error::InvalidKernel("tabulated kernel needs at least two samples".into()));
        }
        if raw.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidKernel("tabulated samples must be finite and nonnegative".into()));
        }
        if !(raw[0] > 0.0) {
            return Err(Error::InvalidKernel("J(0) must be positive".into()));
        }
        let radius = spacing * (raw.len() - 1) as f64;
        let last = *raw.last().unwrap();
        let ext_mass = match extrapolation {
            TailExtrapolation::None => {
                if last != 0.0 {
                    return Err(Error::InvalidKernel(
                        "compact tabulated kernel must end at zero (continuity)".into(),
                    ));
                }
                0.0
            }
            TailExtrapolation::Exponential { rate } => {
                if !(rate > 0.0) {
                    return Err(Error::InvalidKernel("exponential rate must be positive".into()));
                }
                last / rate
            }
            TailExtrapolation::Power { exponent } => {
                if !(exponent > 1.0) {
                    return Err(Error::InvalidKernel(
                        "power tail needs exponent > 1 to be integrable".into(),
                    ));
                }
                last * radius / (exponent - 1.0)
            }
        };
        let n = raw.len();
        let mut upper_raw = vec![0.0; n];
        upper_raw[n - 1] = ext_mass;
        for i in (0..n - 1).rev() {
            upper_raw[i] = upper_raw[i + 1] + 0.5 * spacing * (raw[i] + raw[i + 1]);
        }
        let z = 2.0 * upper_raw[0];
        let values = raw.iter().map(|v| v / z).collect();
        let upper = upper_raw.iter().map(|v| v / z).collect();
        let mut breaks: Vec<f64> = (1..n).rev().map(|i| -(i as f64) * spacing).collect();
        breaks.extend((0..n).map(|i| i as f64 * spacing));
        Ok(Table {
            spacing,
            values,
            upper,
            extrapolation,
            radius,
            breaks,
            core: None,
        })
    }

    fn last(&self) -> f64 {
        *self.values.last().unwrap()
    }

    fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x >= self.radius {
            return match self.extrapolation {
                TailExtrapolation::None => 0.0,
                TailExtrapolation::Exponential { rate } => self.last() * (-rate * (x - self.radius)).exp(),
                TailExtrapolation::Power { exponent } => self.last() * (x / self.radius).powf(-exponent),
            };
        }
        let s = x / self.spacing;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// `∫_z^∞ J` for `z ≥ 0`.
    fn upper_tail(&self, z: f64) -> f64 {
        if z >= self.radius {
            return match self.extrapolation {
                TailExtrapolation::None => 0.0,
                TailExtrapolation::Exponential { rate } => {
                    self.last() * (-rate * (z - self.radius)).exp() / rate
                }
                TailExtrapolation::Power { exponent } => {
                    self.last() * self.radius.powf(exponent) * z.powf(1.0 - exponent) / (exponent - 1.0)
                }
            };
        }
        let s = z / self.spacing;
        let i = (s.floor() as usize).min(self.values.len() - 2);
        let right = (i + 1) as f64 * self.spacing;
        let jz = self.eval(z);
        self.upper[i + 1] + 0.5 * (right - z) * (jz + self.values[i + 1])
    }

    fn first_moment(&self) -> FirstMoment {
        let mut acc = 0.0;
        let h = self.spacing;
        for i in 0..self.values.len() - 1 {
            let a = i as f64 * h;
            let (ja, jb) = (self.values[i], self.values[i + 1]);
            // ∫_a^{a+h} x (ja + (jb - ja)(x - a)/h) dx
            acc += ja * (a * h + 0.5 * h * h) + (jb - ja) * (0.5 * a * h + h * h / 3.0);
        }
        let r = self.radius;
        match self.extrapolation {
            TailExtrapolation::None => FirstMoment::Finite(acc),
            TailExtrapolation::Exponential { rate } => {
                FirstMoment::Finite(acc + self.last() * (r / rate + 1.0 / (rate * rate)))
            }
            TailExtrapolation::Power { exponent } if exponent > 2.0 => {
                FirstMoment::Finite(acc + self.last() * r * r / (exponent - 2.0))
            }
            TailExtrapolation::Power { .. } => FirstMoment::Infinite,
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Epanechnikov,
    Gaussian,
    Algebraic { gamma: f64 },
    Tabulated(Arc<Table>),
}

/// An even, unit-mass dispersal kernel `J`.
#[derive(Clone, Debug)]
pub struct Kernel {
    repr: Repr,
    spec: KernelSpec,
    breaks: Arc<[f64]>,
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Kernel {
    /// `(3/4)(1 - x²)₊`.
    pub fn epanechnikov() -> Kernel {
        Kernel {
            repr: Repr::Epanechnikov,
            spec: KernelSpec::Epanechnikov,
            breaks: Arc::from(vec![-1.0, 1.0]),
        }
    }

    /// Standard normal density.
    pub fn gaussian() -> Kernel {
        Kernel {
            repr: Repr::Gaussian,
            spec: KernelSpec::Gaussian,
            breaks: Arc::from(Vec::new()),
        }
    }

    /// `((γ-1)/2)(1 + |x|)^(-γ)`; requires `γ > 1`.
    pub fn algebraic(gamma: f64) -> Result<Kernel> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::InvalidKernel(format!(
                "algebraic kernel needs gamma > 1 to be normalizable, got {gamma}"
            )));
        }
        Ok(Kernel {
            repr: Repr::Algebraic { gamma },
            spec: KernelSpec::Algebraic { gamma },
            breaks: Arc::from(vec![0.0]),
        })
    }

    /// Piecewise-linear kernel from samples on `[0, R]`, normalized on
    /// construction.
    pub fn tabulated(spacing: f64, values: Vec<f64>, extrapolation: TailExtrapolation) -> Result<Kernel> {
        let table = Table::build(spacing, &values, extrapolation.clone())?;
        let breaks = Arc::from(table.breaks.clone());
        Ok(Kernel {
            repr: Repr::Tabulated(Arc::new(table)),
            spec: KernelSpec::Tabulated {
                spacing,
                values,
                extrapolation,
            },
            breaks,
        })
    }

    pub fn from_spec(spec: &KernelSpec) -> Result<Kernel> {
        match spec {
            KernelSpec::Epanechnikov => Ok(Kernel::epanechnikov()),
            KernelSpec::Gaussian => Ok(Kernel::gaussian()),
            KernelSpec::Algebraic { gamma } => Kernel::algebraic(*gamma),
            KernelSpec::Tabulated {
                spacing,
                values,
                extrapolation,
            } => Kernel::tabulated(*spacing, values.clone(), extrapolation.clone()),
        }
    }

    pub fn spec(&self) -> &KernelSpec {
        &self.spec
    }

    pub fn family(&self) -> KernelFamily {
        match &self.repr {
            Repr::Epanechnikov => KernelFamily::Epanechnikov,
            Repr::Gaussian => KernelFamily::Gaussian,
            Repr::Algebraic { gamma } => KernelFamily::Algebraic { gamma: *gamma },
            Repr::Tabulated(_) => KernelFamily::Tabulated,
        }
    }

    /// Decay exponent of the algebraic family.
    pub fn gamma(&self) -> Option<f64> {
        match self.repr {
            Repr::Algebraic { gamma } => Some(gamma),
            _ => None,
        }
    }

    /// Multiplicative constant in front of the shape function.
    pub fn normalization(&self) -> f64 {
        match &self.repr {
            Repr::Epanechnikov => 0.75,
            Repr::Gaussian => INV_SQRT_2PI,
            Repr::Algebraic { gamma } => 0.5 * (gamma - 1.0),
            Repr::Tabulated(t) => t.values[0],
        }
    }

    /// Sorted abscissae where `J` is not smooth.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    /// Length scale used to check grid resolution.
    pub fn core_width(&self) -> f64 {
        match &self.repr {
            Repr::Tabulated(t) if t.core.is_some() => t.core.unwrap(),
            Repr::Tabulated(t) => {
                // upper quartile point
                let mut lo = 0.0;
                let mut hi = t.radius.max(t.spacing);
                while t.upper_tail(hi) > 0.25 {
                    hi *= 2.0;
                }
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if t.upper_tail(mid) > 0.25 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
            _ => 1.0,
        }
    }

    /// Radius past which `J` is zero (or below 1e-31 for the Gaussian).
    /// `None` for heavy tails, which need dense convolution.
    pub fn interaction_radius(&self) -> Option<f64> {
        match &self.repr {
            Repr::Epanechnikov => Some(1.0),
            Repr::Gaussian => Some(GAUSSIAN_CUTOFF),
            Repr::Algebraic { .. } => None,
            Repr::Tabulated(t) => match t.extrapolation {
                TailExtrapolation::None => Some(t.radius),
                _ => None,
            },
        }
    }

    /// `J(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Epanechnikov => {
                let a = x.abs();
                if a >= 1.0 {
                    0.0
                } else {
                    0.75 * (1.0 - a * a)
                }
            }
            Repr::Gaussian => INV_SQRT_2PI * (-0.5 * x * x).exp(),
            Repr::Algebraic { gamma } => 0.5 * (gamma - 1.0) * (1.0 + x.abs()).powf(-gamma),
            Repr::Tabulated(t) => t.eval(x),
        }
    }

    /// `∫_z^∞ J(y) dy`.
    pub fn tail(&self, z: f64) -> f64 {
        if z < 0.0 {
            return self.mass() - self.upper_tail(-z);
        }
        self.upper_tail(z)
    }

    fn upper_tail(&self, z: f64) -> f64 {
        match &self.repr {
            Repr::Epanechnikov => {
                if z >= 1.0 {
                    0.0
                } else {
                    0.5 - 0.75 * z + 0.25 * z * z * z
                }
            }
            Repr::Gaussian => 0.5 * erfc(z / SQRT_2),
            Repr::Algebraic { gamma } => 0.5 * (1.0 + z).powf(1.0 - gamma),
            Repr::Tabulated(t) => t.upper_tail(z),
        }
    }

    /// `∫_0^∞ x J(x) dx`.
    pub fn first_moment(&self) -> FirstMoment {
        match &self.repr {
            Repr::Epanechnikov => FirstMoment::Finite(3.0 / 16.0),
            Repr::Gaussian => FirstMoment::Finite(INV_SQRT_2PI),
            Repr::Algebraic { gamma } => {
                if *gamma > 2.0 {
                    FirstMoment::Finite(0.5 / (gamma - 2.0))
                } else {
                    FirstMoment::Infinite
                }
            }
            Repr::Tabulated(t) => t.first_moment(),
        }
    }

    /// `∫ J(x) e^{λx} dx`, `None` when the integral diverges.
    pub fn mgf(&self, lambda: f64) -> Option<f64> {
        match &self.repr {
            Repr::Epanechnikov => {
                let l = lambda.abs();
                if l < 0.5 {
                    // Σ 3 λ^{2k} / ((2k+1)(2k+3)(2k)!)
                    let mut term = 1.0;
                    let mut acc = 0.0;
                    for k in 0..12 {
                        let kk = 2.0 * k as f64;
                        acc += 3.0 * term / ((kk + 1.0) * (kk + 3.0));
                        term *= l * l / ((kk + 1.0) * (kk + 2.0));
                    }
                    Some(acc)
                } else {
                    Some(3.0 * (l * l.cosh() - l.sinh()) / (l * l * l))
                }
            }
            Repr::Gaussian => Some((0.5 * lambda * lambda).exp()),
            Repr::Algebraic { .. } => {
                if lambda == 0.0 {
                    Some(1.0)
                } else {
                    None
                }
            }
            Repr::Tabulated(t) => {
                let r = t.radius;
                let core = adaptive_simpson(|x| t.eval(x) * (lambda * x).exp(), -r, r, 1e-10);
                let l = lambda.abs();
                match t.extrapolation {
                    TailExtrapolation::None => Some(core),
                    TailExtrapolation::Exponential { rate } if l < rate => Some(
                        core + t.last() * ((l * r).exp() / (rate - l) + (-l * r).exp() / (rate + l)),
                    ),
                    _ if l == 0.0 => Some(1.0),
                    _ => None,
                }
            }
        }
    }

    /// `∫_0^h ∫_h^∞ J(x - y) dy dx = ∫_0^h tail(s) ds`.
    pub fn flux_integral(&self, h: f64) -> f64 {
        if h <= 0.0 {
            return 0.0;
        }
        match &self.repr {
            Repr::Epanechnikov => {
                let z = h.min(1.0);
                0.5 * z - 0.375 * z * z + 0.0625 * z * z * z * z
            }
            Repr::Gaussian => INV_SQRT_2PI - self.tail_moment(h).unwrap(),
            Repr::Algebraic { gamma } => {
                if (*gamma - 2.0).abs() < 1e-12 {
                    0.5 * h.ln_1p()
                } else {
                    0.5 * ((1.0 + h).powf(2.0 - gamma) - 1.0) / (2.0 - gamma)
                }
            }
            Repr::Tabulated(t) => {
                let upto = h.min(t.radius);
                let n = ((upto / t.spacing).ceil() as usize).max(1) * 4;
                let mut v = composite_simpson(|s| t.upper_tail(s), 0.0, upto, n);
                if h > t.radius {
                    v += adaptive_simpson(|s| t.upper_tail(s), t.radius, h, 1e-12);
                }
                v
            }
        }
    }

    /// `∫_z^∞ tail(s) ds` for `z ≥ 0`; `None` when the first moment is
    /// infinite.
    pub fn tail_moment(&self, z: f64) -> Option<f64> {
        let z = z.max(0.0);
        match &self.repr {
            Repr::Epanechnikov => {
                if z >= 1.0 {
                    Some(0.0)
                } else {
                    Some(0.1875 - 0.5 * z + 0.375 * z * z - 0.0625 * z * z * z * z)
                }
            }
            Repr::Gaussian => Some(INV_SQRT_2PI * (-0.5 * z * z).exp() - z * self.upper_tail(z)),
            Repr::Algebraic { gamma } => {
                if *gamma > 2.0 {
                    Some(0.5 * (1.0 + z).powf(2.0 - gamma) / (gamma - 2.0))
                } else {
                    None
                }
            }
            Repr::Tabulated(t) => {
                let fm = t.first_moment().value()?;
                Some(fm - self.flux_integral(z))
            }
        }
    }

    /// `∫_0^{|z|} s J(s) ds` (even in `z`).
    pub fn partial_first_moment(&self, z: f64) -> f64 {
        let a = z.abs();
        match &self.repr {
            Repr::Epanechnikov => {
                let a = a.min(1.0);
                0.75 * (0.5 * a * a - 0.25 * a * a * a * a)
            }
            Repr::Gaussian => INV_SQRT_2PI * -(-0.5 * a * a).exp_m1(),
            Repr::Algebraic { gamma } => {
                let c = 0.5 * (gamma - 1.0);
                let t = 1.0 + a;
                if (*gamma - 2.0).abs() < 1e-12 {
                    c * (t.ln() + 1.0 / t - 1.0)
                } else {
                    c * ((t.powf(2.0 - gamma) - 1.0) / (2.0 - gamma) - (t.powf(1.0 - gamma) - 1.0) / (1.0 - gamma))
                }
            }
            Repr::Tabulated(t) => {
                let core = piecewise_gauss(|s| s * t.eval(s), 0.0, a.min(t.radius), &t.breaks);
                if a > t.radius {
                    core + adaptive_simpson(|s| s * t.eval(s), t.radius, a, 1e-12)
                } else {
                    core
                }
            }
        }
    }

    /// Constants `(ς₁, ς₂)` with `ς₁ |x|^{-γ} ≤ J(x) ≤ ς₂ |x|^{-γ}` for
    /// `|x| ≥ 10` (algebraic family only).
    pub fn decay_bounds(&self) -> Option<(f64, f64)> {
        self.gamma().map(|g| {
            let c = 0.5 * (g - 1.0);
            (c * (10.0f64 / 11.0).powf(g), c)
        })
    }
}

/// Piecewise-linear cutoff: 1 on `[-1, 1]`, `2 - |x|` on `1 ≤ |x| ≤ 2`,
/// 0 beyond.
pub fn cutoff(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a <= 2.0 {
        2.0 - a
    } else {
        0.0
    }
}

/// `J_n(x) = ξ(x/n) J(x)`, compactly supported in `[-2n, 2n]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedKernel {
    base: Kernel,
    n: f64,
}

impl TruncatedKernel {
    pub fn new(base: Kernel, n: f64) -> Result<TruncatedKernel> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::InvalidKernel(format!("truncation radius must be >= 1, got {n}")));
        }
        Ok(TruncatedKernel { base, n })
    }

    pub fn base(&self) -> &Kernel {
        &self.base
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn eval(&self, x: f64) -> f64 {
        cutoff(x / self.n) * self.base.eval(x)
    }

    /// True when `J_n = J` (base support inside `[-n, n]`).
    pub fn is_identity(&self) -> bool {
        matches!(self.base.interaction_radius(), Some(r) if r <= self.n && self.base.family() != KernelFamily::Gaussian)
    }

    /// `‖J_n‖₁` by composite Simpson on `[-2n, 2n]` with step
    /// `min(0.01, n/10⁴)`, split at the cutoff and kernel kinks.
    pub fn l1_norm(&self) -> f64 {
        if self.is_identity() {
            return 1.0;
        }
        let n = self.n;
        let step = 0.01f64.min(n / 1e4);
        let mut knots: Vec<f64> = vec![0.0, n, 2.0 * n];
        knots.extend(self.base.breakpoints().iter().copied().filter(|&b| b > 0.0 && b < 2.0 * n));
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup();
        let mut acc = 0.0;
        for w in knots.windows(2) {
            let panels = ((w[1] - w[0]) / step).ceil() as usize;
            acc += composite_simpson(|x| self.eval(x), w[0], w[1], panels.max(2));
        }
        (2.0 * acc).min(1.0)
    }

    /// Kernel view usable by the discrete operators.
    pub fn as_kernel(&self) -> Result<Kernel> {
        if self.is_identity() {
            return Ok(self.base.clone());
        }
        // Tabulate J_n on a grid fine enough that piecewise-linear
        // interpolation error stays below 1e-9 in sup norm.
        let radius = 2.0 * self.n;
        let spacing = 1e-3f64.min(radius / 2000.0);
        let count = (radius / spacing).round() as usize;
        let spacing = radius / count as f64;
        let values: Vec<f64> = (0..=count).map(|i| self.eval(i as f64 * spacing)).collect();
        let mut values = values;
        *values.last_mut().unwrap() = 0.0;
        Kernel::tabulated_unnormalized(spacing, values, self.l1_norm(), self.base.core_width())
    }
}

impl Kernel {
    /// Compact tabulated kernel whose total mass is `mass` (< 1 allowed):
    /// used for truncated kernels, which are not probability densities.
    fn tabulated_unnormalized(spacing: f64, values: Vec<f64>, mass: f64, core: f64) -> Result<Kernel> {
        let mut k = Kernel::tabulated(spacing, values, TailExtrapolation::None)?;
        if let Repr::Tabulated(t) = &k.repr {
            let scale = mass;
            let table = Table {
                spacing: t.spacing,
                values: t.values.iter().map(|v| v * scale).collect(),
                upper: t.upper.iter().map(|v| v * scale).collect(),
                extrapolation: TailExtrapolation::None,
                radius: t.radius,
                breaks: t.breaks.clone(),
                core: Some(core),
            };
            k.repr = Repr::Tabulated(Arc::new(table));
        }
        Ok(k)
    }

    /// Total mass `∫ J` (1 except for truncated kernels).
    pub fn mass(&self) -> f64 {
        2.0 * self.upper_tail(0.0)
    }
}

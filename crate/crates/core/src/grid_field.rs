//! Density fields on a uniform grid anchored at `x = 0`, and the discrete
//! nonlocal operator.
//!
//! A field holds samples `u(x_i)` at `x_i = i·dx` for `i = 0..=m`, where `m`
//! is the last node not beyond the boundary `h`. Between nodes the density is
//! the piecewise-linear interpolant; inside the last partial cell `[x_m, h]`
//! it tapers linearly to `u(h) = 0`.
//!
//! The convolution `∫_0^h J(x_i - y) u(y) dy` is evaluated by product
//! integration: the kernel is integrated exactly (closed form or 8-point
//! Gauss-Legendre per kink-free piece) against each hat function of the
//! interpolant, so the only discretization error comes from interpolating
//! `u`, which is second order in `dx` just like the trapezoid rule.

use std::io::{BufRead, Write};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quadrature::piecewise_gauss;

/// Below this node count the convolution runs on the calling thread.
const PARALLEL_THRESHOLD: usize = 4096;

/// Index of the last grid node `x_m = m·dx` with `x_m ≤ h`.
pub fn last_node(h: f64, dx: f64) -> usize {
    let mut m = (h / dx).floor().max(0.0) as usize;
    while ((m + 1) as f64) * dx <= h {
        m += 1;
    }
    while m > 0 && (m as f64) * dx > h {
        m -= 1;
    }
    m
}

/// Density samples on `[0, h]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    dx: f64,
    values: Vec<f64>,
    h: f64,
}

impl Field {
    pub fn new(dx: f64, values: Vec<f64>, h: f64) -> Result<Field> {
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(crate::error::invalid("dx", "must be positive"));
        }
        if !(h >= 0.0) || !h.is_finite() {
            return Err(crate::error::invalid("h", "must be finite and nonnegative"));
        }
        let m = last_node(h, dx);
        if values.len() != m + 1 {
            return Err(crate::error::invalid(
                "values",
                format!("expected {} samples for h = {h}, dx = {dx}, got {}", m + 1, values.len()),
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Positivity { node: i, value: *v });
        }
        Ok(Field { dx, values, h })
    }

    /// Samples `profile(x_i)` on the nodes of `[0, h]`.
    pub fn from_fn(dx: f64, h: f64, profile: impl Fn(f64) -> f64) -> Result<Field> {
        let m = last_node(h, dx);
        let values = (0..=m).map(|i| profile(i as f64 * dx)).collect();
        Field::new(dx, values, h)
    }

    pub fn zeros(dx: f64, h: f64) -> Result<Field> {
        Field::from_fn(dx, h, |_| 0.0)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Index of the last node.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    /// Width of the partial cell `[x_m, h]`.
    pub fn partial_width(&self) -> f64 {
        (self.h - self.x(self.m())).max(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Interpolated density, zero at and beyond `h`.
    pub fn value_at(&self, x: f64) -> f64 {
        if x < 0.0 || x >= self.h {
            return 0.0;
        }
        let m = self.m();
        let s = x / self.dx;
        let i = s.floor() as usize;
        if i >= m {
            let delta = self.partial_width();
            if delta <= 0.0 {
                return 0.0;
            }
            return self.values[m] * (self.h - x) / delta;
        }
        let frac = s - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }

    /// Grid grown to a larger boundary; new nodes start at zero.
    pub fn extend(&self, new_h: f64) -> Result<Field> {
        let mut f = self.clone();
        f.extend_in_place(new_h)?;
        Ok(f)
    }

    pub fn extend_in_place(&mut self, new_h: f64) -> Result<()> {
        if new_h < self.h || new_h.is_nan() {
            return Err(Error::BoundaryRetreat { from: self.h, to: new_h });
        }
        let m = last_node(new_h, self.dx);
        self.values.resize(m + 1, 0.0);
        self.h = new_h;
        Ok(())
    }

    /// Drops nodes beyond a smaller boundary. Only reachable through the
    /// flux mutation used to validate the comparison test harness.
    pub(crate) fn retract_in_place(&mut self, new_h: f64) {
        let new_h = new_h.max(0.0);
        let m = last_node(new_h, self.dx);
        self.values.truncate(m + 1);
        self.h = new_h;
    }

    /// `∫_0^h u` with the same interpolant as the operator.
    pub fn mass(&self) -> f64 {
        let m = self.m();
        let mut acc = 0.0;
        for i in 0..m {
            acc += 0.5 * self.dx * (self.values[i] + self.values[i + 1]);
        }
        acc + 0.5 * self.partial_width() * self.values[m]
    }

    /// Snapshot CSV: `# t=<t> h=<h> dx=<dx>`, then `x,u` rows.
    pub fn write_csv<W: Write>(&self, mut w: W, t: f64) -> Result<()> {
        writeln!(w, "# t={t} h={} dx={}", self.h, self.dx)?;
        writeln!(w, "x,u")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{},{}", self.x(i), v)?;
        }
        Ok(())
    }

    /// Parses a snapshot written by [`Field::write_csv`], returning `(t, field)`.
    pub fn read_csv<R: BufRead>(r: R) -> Result<(f64, Field)> {
        let mut t = None;
        let mut h = None;
        let mut dx = None;
        let mut values = Vec::new();
        for line in r.lines() {
            let line = line?;
            let line = line.trim();
            if let Some(meta) = line.strip_prefix('#') {
                for kv in meta.split_whitespace() {
                    let (k, v) = kv.split_once('=').ok_or_else(|| Error::Io(format!("bad metadata `{kv}`")))?;
                    let v: f64 = v.parse().map_err(|_| Error::Io(format!("bad number `{v}`")))?;
                    match k {
                        "t" => t = Some(v),
                        "h" => h = Some(v),
                        "dx" => dx = Some(v),
                        _ => {}
                    }
                }
            } else if line.is_empty() || line.starts_with('x') {
                continue;
            } else {
                let (_, u) = line.split_once(',').ok_or_else(|| Error::Io(format!("bad row `{line}`")))?;
                values.push(u.parse().map_err(|_| Error::Io(format!("bad number `{u}`")))?);
            }
        }
        let missing = || Error::Io("snapshot metadata incomplete".into());
        let field = Field::new(dx.ok_or_else(missing)?, values, h.ok_or_else(missing)?)?;
        Ok((t.ok_or_else(missing)?, field))
    }
}

/// Product-integration weights of a kernel on a grid of spacing `dx`.
///
/// `half(k) = ∫_{(k-1)dx}^{k dx} J(s) (s - (k-1)dx)/dx ds` is the weight of
/// one half of a hat function at node offset `k`; the full hat weight is
/// `half(k) + half(-k)`.
#[derive(Clone, Debug)]
pub struct Stencil {
    kernel: Kernel,
    dx: f64,
    /// Fixed half-width for banded kernels.
    band: Option<usize>,
    /// Current table reach `K`.
    reach: usize,
    /// `half(k)` for `k ∈ [-K, K+1]`, stored at `k + K`.
    half: Vec<f64>,
    /// `full(|k|)` laid out symmetrically: `sym[K + k] = full(|k|)`.
    sym: Vec<f64>,
}

impl Stencil {
    pub fn new(kernel: &Kernel, dx: f64) -> Result<Stencil> {
        let core = kernel.core_width();
        if !(dx > 0.0) || dx > 0.1 * core * (1.0 + 1e-12) {
            return Err(Error::GridTooCoarse { dx, core });
        }
        let band = kernel.interaction_radius().map(|r| (r / dx).ceil() as usize + 1);
        let mut s = Stencil {
            kernel: kernel.clone(),
            dx,
            band,
            reach: 0,
            half: Vec::new(),
            sym: Vec::new(),
        };
        s.build(band.unwrap_or(64));
        Ok(s)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn is_banded(&self) -> bool {
        self.band.is_some()
    }

    fn half_integral(&self, k: isize) -> f64 {
        let dx = self.dx;
        let a = (k - 1) as f64 * dx;
        let b = k as f64 * dx;
        piecewise_gauss(|s| self.kernel.eval(s) * (s - a) / dx, a, b, self.kernel.breakpoints())
    }

    fn build(&mut self, reach: usize) {
        let k = reach as isize;
        self.half = (-k..=k + 1).map(|j| self.half_integral(j)).collect();
        self.reach = reach;
        let full: Vec<f64> = (0..=reach).map(|j| self.half(j as isize) + self.half(-(j as isize))).collect();
        self.sym = (0..=2 * reach).map(|j| full[(j as isize - k).unsigned_abs()]).collect();
    }

    /// Makes sure fields with up to `m + 1` nodes can be convolved.
    pub fn ensure(&mut self, m: usize) {
        if self.band.is_none() && m + 1 > self.reach {
            let target = (2 * (m + 1)).max(64);
            self.build(target);
        }
    }

    fn covers(&self, m: usize) -> bool {
        self.band.is_some() || m < self.reach
    }

    /// `half(k)`; zero outside the band.
    pub fn half(&self, k: isize) -> f64 {
        let kk = self.reach as isize;
        if k < -kk || k > kk + 1 {
            return 0.0;
        }
        self.half[(k + kk) as usize]
    }

    /// Full hat weight at node offset `k`.
    pub fn full(&self, k: isize) -> f64 {
        let a = k.unsigned_abs();
        if a > self.reach {
            return 0.0;
        }
        self.sym[self.reach + a]
    }

    /// `∫_{x_m}^{x_m+δ} J(x_i - y) (1 - (y - x_m)/δ) dy` with `x_i - x_m = offset`.
    fn partial_weight(&self, offset: f64, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        let lo = offset - delta;
        piecewise_gauss(
            |s| self.kernel.eval(s) * (1.0 - (offset - s) / delta),
            lo,
            offset,
            self.kernel.breakpoints(),
        )
    }

    /// Half-width of the node range that interacts with a node.
    fn width(&self, m: usize) -> usize {
        self.band.unwrap_or(m + 1)
    }

    /// `∫_0^h J(x_i - y) u(y) dy` for `i = 0..=m`, written into `out`.
    pub fn convolve(&self, field: &Field, out: &mut [f64]) {
        let m = field.m();
        assert!(self.covers(m), "stencil table too short; call ensure() first");
        assert_eq!(out.len(), m + 1);
        let u = field.values();
        let delta = field.partial_width();
        let dx = self.dx;
        let w = self.width(m);
        let node = |i: usize| -> f64 {
            let mut acc = 0.0;
            if m >= 1 {
                let lo = i.saturating_sub(w).max(1);
                let hi = (i + w).min(m - 1);
                if lo <= hi {
                    // sym[K + j - i] = full(|j - i|)
                    let base = self.reach + lo - i;
                    acc += dot(&self.sym[base..base + (hi - lo + 1)], &u[lo..=hi]);
                }
                acc += self.half(i as isize) * u[0];
                acc += self.half(m as isize - i as isize) * u[m];
            }
            if delta > 0.0 && (m - i) <= w {
                acc += self.partial_weight((i as f64 - m as f64) * dx, delta) * u[m];
            }
            acc
        };
        if m + 1 >= PARALLEL_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = node(i));
        } else {
            out.iter_mut().enumerate().for_each(|(i, o)| *o = node(i));
        }
    }

    /// `d (∫_0^h J(x_i - y) u(y) dy - u_i)` at every node.
    pub fn nonlocal_rate(&self, field: &Field, d: f64) -> Vec<f64> {
        let mut out = vec![0.0; field.m() + 1];
        self.convolve(field, &mut out);
        for (o, u) in out.iter_mut().zip(field.values()) {
            *o = d * (*o - u);
        }
        out
    }

    /// `μ ∫_0^h u(x) tail(h - x) dx` with the field's interpolant.
    pub fn boundary_flux(&self, field: &Field, mu: f64) -> f64 {
        mu * flux_integral_of(&self.kernel, field)
    }
}

/// `∫_0^h u(x) tail(h - x) dx` for the piecewise-linear interpolant.
pub fn flux_integral_of(kernel: &Kernel, field: &Field) -> f64 {
    let m = field.m();
    let h = field.h();
    let dx = field.dx();
    let u = field.values();
    let breaks = kernel.breakpoints();
    let reach = kernel.interaction_radius();
    let mut acc = 0.0;
    // partial cell, s = h - x ∈ [0, δ], hat weight (δ - s)... u(x) = u_m (h - x)/δ = u_m s/δ
    let delta = field.partial_width();
    if delta > 0.0 {
        acc += u[m] * piecewise_gauss(|s| kernel.tail(s) * s / delta, 0.0, delta, breaks);
    }
    let first = match reach {
        Some(r) => {
            let lowest = h - r - dx;
            if lowest <= 0.0 {
                0
            } else {
                ((lowest / dx).floor() as usize).min(m)
            }
        }
        None => 0,
    };
    for j in (first..m).rev() {
        let (ul, ur) = (u[j], u[j + 1]);
        if ul == 0.0 && ur == 0.0 {
            continue;
        }
        let xl = j as f64 * dx;
        let s_lo = h - xl - dx;
        let s_hi = h - xl;
        let mid = 0.5 * (s_lo + s_hi);
        // u(x) = ul (x_{j+1} - x)/dx + ur (x - x_j)/dx; in s: x - x_mid = mid - s
        let i0 = piecewise_gauss(|s| kernel.tail(s), s_lo, s_hi, breaks);
        let i1 = piecewise_gauss(|s| kernel.tail(s) * (s - mid), s_lo, s_hi, breaks);
        let wl = (0.5 * dx * i0 + i1) / dx;
        let wr = (0.5 * dx * i0 - i1) / dx;
        acc += ul * wl + ur * wr;
    }
    acc
}

/// Sum in a fixed order with eight independent lanes.
#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut lanes = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            lanes[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    ((lanes[0] + lanes[4]) + (lanes[1] + lanes[5])) + ((lanes[2] + lanes[6]) + (lanes[3] + lanes[7])) + tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre;

    /// Brute-force `∫_0^h J(x - y) u(y) dy` with the field interpolant,
    /// integrating every cell (and sub-cell between kernel kinks) with
    /// 8-point Gauss-Legendre directly in `y`.
    fn oracle_conv(k: &Kernel, f: &Field, x: f64) -> f64 {
        let mut knots: Vec<f64> = (0..=f.m()).map(|i| f.x(i)).collect();
        knots.push(f.h());
        for b in k.breakpoints() {
            let y = x - b;
            if y > 0.0 && y < f.h() {
                knots.push(y);
            }
        }
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup();
        knots
            .windows(2)
            .map(|w| gauss_legendre(|y| k.eval(x - y) * f.value_at(y), w[0], w[1]))
            .sum()
    }

    fn hat_field(dx: f64, h: f64) -> Field {
        Field::from_fn(dx, h, |x| (1.0 - (x - 2.0).abs() / 1.5).max(0.0)).unwrap()
    }

    #[test]
    fn last_node_respects_boundary() {
        assert_eq!(last_node(2.0, 0.05), 40);
        assert_eq!(last_node(0.049, 0.05), 0);
        assert_eq!(last_node(0.1, 0.1), 1);
        for i in 0..1000 {
            let h = 0.0137 * i as f64;
            let m = last_node(h, 0.05);
            assert!(m as f64 * 0.05 <= h && h < (m + 1) as f64 * 0.05);
        }
    }

    #[test]
    fn zero_field_has_zero_rate() {
        let k = Kernel::epanechnikov();
        let s = Stencil::new(&k, 0.05).unwrap();
        let f = Field::zeros(0.05, 3.33).unwrap();
        assert!(s.nonlocal_rate(&f, 1.0).iter().all(|r| *r == 0.0));
        assert_eq!(s.boundary_flux(&f, 2.0), 0.0);
    }

    #[test]
    fn constant_field_rate_vanishes_in_the_interior() {
        for k in [Kernel::epanechnikov(), Kernel::gaussian()] {
            let s = Stencil::new(&k, 0.05).unwrap();
            let f = Field::from_fn(0.05, 40.0, |_| 0.7).unwrap();
            let r = s.nonlocal_rate(&f, 1.0);
            for (i, v) in r.iter().enumerate() {
                let x = f.x(i);
                if x > 15.0 && x < 25.0 {
                    assert!(v.abs() < 1e-4, "x = {x}: {v}");
                }
            }
        }
    }

    #[test]
    fn convolution_matches_brute_force() {
        for (k, h) in [
            (Kernel::epanechnikov(), 4.03),
            (Kernel::gaussian(), 4.0),
            (Kernel::algebraic(1.5).unwrap(), 4.07),
        ] {
            let mut s = Stencil::new(&k, 0.05).unwrap();
            let f = hat_field(0.05, h);
            s.ensure(f.m());
            let mut out = vec![0.0; f.m() + 1];
            s.convolve(&f, &mut out);
            for i in 0..=f.m() {
                let o = oracle_conv(&k, &f, f.x(i));
                assert!((out[i] - o).abs() < 1e-12, "{:?} node {i}: {} vs {o}", k.family(), out[i]);
            }
        }
    }

    #[test]
    fn convolution_with_partial_cell_and_single_node() {
        let k = Kernel::epanechnikov();
        let s = Stencil::new(&k, 0.1).unwrap();
        let f = Field::new(0.1, vec![0.8], 0.07).unwrap();
        let mut out = vec![0.0; 1];
        s.convolve(&f, &mut out);
        assert!((out[0] - oracle_conv(&k, &f, 0.0)).abs() < 1e-14);
        let f = Field::from_fn(0.1, 1.234, |x| 1.0 + x).unwrap();
        let mut out = vec![0.0; f.m() + 1];
        s.convolve(&f, &mut out);
        for i in 0..=f.m() {
            assert!((out[i] - oracle_conv(&k, &f, f.x(i))).abs() < 1e-13);
        }
    }

    #[test]
    fn richardson_ratio_is_second_order() {
        let k = Kernel::gaussian();
        let profile = |x: f64| (-(x - 5.0) * (x - 5.0) / 4.0).exp();
        let probe = 4.0;
        let rate_at = |dx: f64| {
            let s = Stencil::new(&k, dx).unwrap();
            let f = Field::from_fn(dx, 10.0, profile).unwrap();
            let r = s.nonlocal_rate(&f, 1.0);
            r[(probe / dx).round() as usize]
        };
        let (a, b, c) = (rate_at(0.1), rate_at(0.05), rate_at(0.025));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    }

    #[test]
    fn flux_for_saturated_compact_field() {
        let k = Kernel::epanechnikov();
        let s = Stencil::new(&k, 0.05).unwrap();
        let f = Field::from_fn(0.05, 10.0, |_| 1.0).unwrap();
        assert_eq!(f.partial_width(), 0.0);
        let v = s.boundary_flux(&f, 2.0);
        assert!((v - 2.0 * 0.1875).abs() < 1e-13, "{v}");
        assert_eq!(s.boundary_flux(&f, 4.0), 2.0 * v);
    }

    #[test]
    fn flux_matches_double_quadrature() {
        use crate::quadrature::adaptive_simpson;
        let fields = [
            Field::from_fn(0.05, 3.217, |x| 0.5 + 0.4 * (3.0 * x).sin()).unwrap(),
            Field::from_fn(0.05, 5.5, |x| (x / 5.5) * (1.0 - x / 5.5) * 4.0).unwrap(),
            Field::from_fn(0.05, 2.61, |x| (-x).exp()).unwrap(),
        ];
        for (k, reach) in [(Kernel::epanechnikov(), 1.0f64), (Kernel::gaussian(), 14.0), (Kernel::algebraic(3.0).unwrap(), 0.0)] {
            let s = Stencil::new(&k, 0.05).unwrap();
            for f in &fields {
                let h = f.h();
                let inner = |x: f64| {
                    if reach > 0.0 {
                        adaptive_simpson(|y| k.eval(x - y), h, h + reach, 1e-14)
                    } else {
                        // y = h + t/(1-t)
                        adaptive_simpson(
                            |t| if t >= 1.0 { 0.0 } else { k.eval(x - h - t / (1.0 - t)) / ((1.0 - t) * (1.0 - t)) },
                            0.0,
                            1.0,
                            1e-14,
                        )
                    }
                };
                let mut knots: Vec<f64> = (0..=f.m()).map(|i| f.x(i)).collect();
                knots.push(h);
                let direct: f64 = knots
                    .windows(2)
                    .filter(|w| w[1] > w[0])
                    .map(|w| adaptive_simpson(|x| f.value_at(x) * inner(x), w[0], w[1], 1e-12))
                    .sum();
                let v = s.boundary_flux(f, 1.0);
                assert!((v - direct).abs() < 1e-6 * direct, "{:?}: {v} vs {direct}", k.family());
            }
        }
    }

    #[test]
    fn extend_examples() {
        let f = Field::from_fn(0.1, 1.05, |x| 1.0 - x).unwrap();
        assert_eq!(f.extend(1.05).unwrap(), f);
        let g = f.extend(1.35).unwrap();
        assert_eq!(g.m(), f.m() + 3);
        assert!(g.values()[f.m() + 1..].iter().all(|v| *v == 0.0));
        assert_eq!(&g.values()[..=f.m()], f.values());
        let mut step = f.clone();
        for i in 1..=30 {
            step.extend_in_place(1.05 + 0.01 * i as f64).unwrap();
        }
        assert_eq!(step.values(), f.extend(1.35).unwrap().values());
        assert!(matches!(f.extend(1.0), Err(Error::BoundaryRetreat { .. })));
    }

    #[test]
    fn rejects_coarse_grid() {
        assert!(matches!(
            Stencil::new(&Kernel::epanechnikov(), 0.2),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn dense_and_parallel_paths_agree_bitwise() {
        let k = Kernel::algebraic(1.8).unwrap();
        let mut s = Stencil::new(&k, 0.05).unwrap();
        let f = Field::from_fn(0.05, 250.0, |x| (0.1 * x).sin().abs()).unwrap();
        s.ensure(f.m());
        let mut par = vec![0.0; f.m() + 1];
        s.convolve(&f, &mut par);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let mut other = vec![0.0; f.m() + 1];
        pool.install(|| s.convolve(&f, &mut other));
        assert_eq!(par, other);
    }

    #[test]
    fn snapshot_csv_round_trip() {
        let f = Field::from_fn(0.05, 1.234, |x| 1.0 - x * 0.5).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf, 3.5).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# t=3.5 h=1.234 dx=0.05\nx,u\n"));
        let (t, g) = Field::read_csv(&buf[..]).unwrap();
        assert_eq!(t, 3.5);
        assert_eq!(g, f);
    }
}

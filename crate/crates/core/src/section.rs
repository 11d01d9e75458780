//! Section spaces: the local function space a spline lives in on one
//! break-point interval, with closed-form derivatives and antiderivatives of
//! its generators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, falling, Scalar};

/// Catalog of supported section families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family<T> {
    /// `{1, t, ..., t^{m-1}}`.
    Polynomial,
    /// `{1, t, ..., t^{m-3}, cos(θt), sin(θt)}`, `m >= 3`.
    Trigonometric { theta: T },
    /// `{1, t, ..., t^{m-3}, cosh(φt), sinh(φt)}`, `m >= 3`.
    Hyperbolic { phi: T },
    /// `{1, ..., t^{m-5}, cos(θt), sin(θt), cosh(φt), sinh(φt)}`, `m >= 5`.
    TrigHyperbolic { theta: T, phi: T },
    /// `{1, ..., t^{m-5}, cos(θt), sin(θt), t cos(θt), t sin(θt)}`, `m >= 5`.
    TrigEnvelope { theta: T },
    /// `{1, t, (1-t)^3 / q_1(t), t^3 / q_2(t)}` with `q_k = 1 + (ν_k - 3)(1-t)t`, `m = 4`.
    RationalTension { nu1: T, nu2: T },
    /// `{1, cos(θt), sin(θt), cos(2θt), sin(2θt)}`, `m = 5`.
    MultiFrequency { theta: T },
    /// `{1, t, ..., t^{m-3}, (1-t)^{n1}, t^{n2}}`, `m >= 3`. Only quasi
    /// extended Chebyshev in general.
    VariableDegree { n1: u32, n2: u32 },
}

impl<T: Scalar> Family<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Polynomial => "polynomial",
            Family::Trigonometric { .. } => "trigonometric",
            Family::Hyperbolic { .. } => "hyperbolic",
            Family::TrigHyperbolic { .. } => "trig_hyperbolic",
            Family::TrigEnvelope { .. } => "trig_envelope",
            Family::RationalTension { .. } => "rational_tension",
            Family::MultiFrequency { .. } => "multi_frequency",
            Family::VariableDegree { .. } => "variable_degree",
        }
    }

    /// Local map used when the caller does not choose one.
    pub fn default_map(&self) -> LocalMap {
        match self {
            Family::Polynomial
            | Family::Trigonometric { .. }
            | Family::Hyperbolic { .. }
            | Family::TrigHyperbolic { .. } => LocalMap::Shift,
            _ => LocalMap::Normalized,
        }
    }

    /// False for families that are only quasi extended Chebyshev, where the
    /// vanishing orders of transition functions must be detected.
    pub fn is_extended_chebyshev(&self) -> bool {
        !matches!(self, Family::VariableDegree { .. })
    }

    /// Whether `reparametrize` splitting keeps the family closed.
    pub fn supports_reparametrize(&self) -> bool {
        !matches!(
            self,
            Family::RationalTension { .. } | Family::VariableDegree { .. }
        )
    }

    fn scaled_frequencies(&self, factor: T) -> Self {
        match *self {
            Family::Trigonometric { theta } => Family::Trigonometric { theta: theta * factor },
            Family::Hyperbolic { phi } => Family::Hyperbolic { phi: phi * factor },
            Family::TrigHyperbolic { theta, phi } => Family::TrigHyperbolic {
                theta: theta * factor,
                phi: phi * factor,
            },
            Family::TrigEnvelope { theta } => Family::TrigEnvelope { theta: theta * factor },
            Family::MultiFrequency { theta } => Family::MultiFrequency { theta: theta * factor },
            other => other,
        }
    }

    fn generators(&self, order: usize) -> Result<Vec<Generator<T>>> {
        let unsupported = |reason: &str| Error::UnsupportedOrder {
            family: self.name(),
            order,
            reason: reason.to_string(),
        };
        let powers = |n: usize| (0..n as u32).map(Generator::Power);
        let gens = match *self {
            Family::Polynomial => {
                if order == 0 {
                    return Err(unsupported("order must be at least 1"));
                }
                powers(order).collect()
            }
            Family::Trigonometric { theta } => {
                if order < 3 {
                    return Err(unsupported("order must be at least 3"));
                }
                powers(order - 2)
                    .chain([Generator::Cos(theta), Generator::Sin(theta)])
                    .collect()
            }
            Family::Hyperbolic { phi } => {
                if order < 3 {
                    return Err(unsupported("order must be at least 3"));
                }
                powers(order - 2)
                    .chain([Generator::Cosh(phi), Generator::Sinh(phi)])
                    .collect()
            }
            Family::TrigHyperbolic { theta, phi } => {
                if order < 5 {
                    return Err(unsupported("order must be at least 5"));
                }
                powers(order - 4)
                    .chain([
                        Generator::Cos(theta),
                        Generator::Sin(theta),
                        Generator::Cosh(phi),
                        Generator::Sinh(phi),
                    ])
                    .collect()
            }
            Family::TrigEnvelope { theta } => {
                if order < 5 {
                    return Err(unsupported("order must be at least 5"));
                }
                powers(order - 4)
                    .chain([
                        Generator::Cos(theta),
                        Generator::Sin(theta),
                        Generator::TCos(theta),
                        Generator::TSin(theta),
                    ])
                    .collect()
            }
            Family::RationalTension { nu1, nu2 } => {
                if order != 4 {
                    return Err(unsupported("the family has fixed order 4"));
                }
                vec![
                    Generator::Power(0),
                    Generator::Power(1),
                    Generator::RationalLeft(nu1),
                    Generator::RationalRight(nu2),
                ]
            }
            Family::MultiFrequency { theta } => {
                if order != 5 {
                    return Err(unsupported("the family has fixed order 5"));
                }
                let two = T::lit(2.0);
                vec![
                    Generator::Power(0),
                    Generator::Cos(theta),
                    Generator::Sin(theta),
                    Generator::Cos(two * theta),
                    Generator::Sin(two * theta),
                ]
            }
            Family::VariableDegree { n1, n2 } => {
                if order < 3 {
                    return Err(unsupported("order must be at least 3"));
                }
                powers(order - 2)
                    .chain([Generator::OneMinusPow(n1), Generator::Power(n2)])
                    .collect()
            }
        };
        Ok(gens)
    }

    fn validate(&self, order: usize, local_length: T) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParameter(msg));
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{}: {name} must be positive and finite, got {v}",
                    self.name()
                )))
            }
        };
        let pi = T::PI();
        match *self {
            Family::Polynomial => {}
            Family::Trigonometric { theta }
            | Family::TrigHyperbolic { theta, .. }
            | Family::MultiFrequency { theta } => {
                positive("theta", theta)?;
                if let Family::TrigHyperbolic { phi, .. } = *self {
                    positive("phi", phi)?;
                }
                if theta * local_length >= pi {
                    return invalid(format!(
                        "{}: theta * interval length = {} must be below pi",
                        self.name(),
                        theta * local_length
                    ));
                }
            }
            Family::Hyperbolic { phi } => positive("phi", phi)?,
            Family::TrigEnvelope { theta } => {
                positive("theta", theta)?;
                if theta * local_length >= T::lit(2.0) * pi {
                    return invalid(format!(
                        "trig_envelope: theta * interval length = {} must be below 2 pi",
                        theta * local_length
                    ));
                }
            }
            Family::RationalTension { nu1, nu2 } => {
                for (name, nu) in [("nu1", nu1), ("nu2", nu2)] {
                    if !(nu >= T::lit(3.0)) || !nu.is_finite() {
                        return invalid(format!("rational_tension: {name} = {nu} must be >= 3"));
                    }
                }
            }
            Family::VariableDegree { n1, n2 } => {
                let min = order as u32 - 2;
                if n1 < min || n2 < min {
                    return invalid(format!(
                        "variable_degree: exponents ({n1}, {n2}) must be >= {min} for order {order}"
                    ));
                }
                if n1 == min && n2 == min {
                    return invalid(format!(
                        "variable_degree: exponents ({n1}, {n2}) make the generators linearly dependent"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Affine change of variable from the global abscissa `x` to the local
/// parameter `t` of a section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalMap {
    /// `t = x - x_i`
    Shift,
    /// `t = (x - x_i) / (x_{i+1} - x_i)`
    Normalized,
}

/// How a section is split when a new break-point is inserted inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SplitStrategy {
    /// Keep the parent generators and parent local map on both children.
    #[default]
    Restrict,
    /// Give each child its own local map and rescale frequencies so the
    /// child is the same family expressed in child coordinates.
    Reparametrize,
}

/// One generator of a section, as a function of the local parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Generator<T> {
    Power(u32),
    OneMinusPow(u32),
    Cos(T),
    Sin(T),
    Cosh(T),
    Sinh(T),
    TCos(T),
    TSin(T),
    RationalLeft(T),
    RationalRight(T),
}

impl<T: Scalar> Generator<T> {
    fn derivative(&self, r: usize, t: T) -> T {
        match *self {
            Generator::Power(k) => {
                if r as u32 > k {
                    T::zero()
                } else {
                    falling(T::from_u32(k).unwrap(), r) * t.powi((k - r as u32) as i32)
                }
            }
            Generator::OneMinusPow(n) => {
                if r as u32 > n {
                    T::zero()
                } else {
                    let sign = if r.is_multiple_of(2) { T::one() } else { -T::one() };
                    sign * falling(T::from_u32(n).unwrap(), r)
                        * (T::one() - t).powi((n - r as u32) as i32)
                }
            }
            Generator::Cos(w) => trig_derivative(w, r, t, 0),
            Generator::Sin(w) => trig_derivative(w, r, t, 3),
            Generator::Cosh(w) => {
                let v = if r.is_multiple_of(2) { (w * t).cosh() } else { (w * t).sinh() };
                w.powi(r as i32) * v
            }
            Generator::Sinh(w) => {
                let v = if r.is_multiple_of(2) { (w * t).sinh() } else { (w * t).cosh() };
                w.powi(r as i32) * v
            }
            Generator::TCos(w) | Generator::TSin(w) => {
                let phase = if matches!(self, Generator::TCos(_)) { 0 } else { 3 };
                let mut v = t * trig_derivative(w, r, t, phase);
                if r > 0 {
                    v += T::from_usize_lossy(r) * trig_derivative(w, r - 1, t, phase);
                }
                v
            }
            Generator::RationalLeft(nu) => rational_derivative(nu, r, t, true),
            Generator::RationalRight(nu) => rational_derivative(nu, r, t, false),
        }
    }

    /// `G(t1) - G(t0)` for an antiderivative `G`.
    fn integral(&self, t0: T, t1: T) -> T {
        let prim = |t: T| -> T {
            match *self {
                Generator::Power(k) => {
                    let k1 = T::from_u32(k + 1).unwrap();
                    t.powi(k as i32 + 1) / k1
                }
                Generator::OneMinusPow(n) => {
                    let n1 = T::from_u32(n + 1).unwrap();
                    -(T::one() - t).powi(n as i32 + 1) / n1
                }
                Generator::Cos(w) => (w * t).sin() / w,
                Generator::Sin(w) => -(w * t).cos() / w,
                Generator::Cosh(w) => (w * t).sinh() / w,
                Generator::Sinh(w) => (w * t).cosh() / w,
                Generator::TCos(w) => t * (w * t).sin() / w + (w * t).cos() / (w * w),
                Generator::TSin(w) => -t * (w * t).cos() / w + (w * t).sin() / (w * w),
                Generator::RationalLeft(_) | Generator::RationalRight(_) => unreachable!(),
            }
        };
        match *self {
            Generator::RationalRight(nu) => rational_right_integral(nu, t0, t1),
            // The left generator is the mirror image of the right one.
            Generator::RationalLeft(nu) => {
                rational_right_integral(nu, T::one() - t1, T::one() - t0)
            }
            _ => prim(t1) - prim(t0),
        }
    }
}

/// `D^r cos(w t + phase·π/2)` where phase 0 is cos and phase 3 is sin.
fn trig_derivative<T: Scalar>(w: T, r: usize, t: T, phase: usize) -> T {
    let a = w * t;
    let v = match (r + phase) % 4 {
        0 => a.cos(),
        1 => -a.sin(),
        2 => -a.cos(),
        _ => a.sin(),
    };
    w.powi(r as i32) * v
}

/// Derivatives of `P(t) / (1 + c(1-t)t)` by power series division, where
/// `P` is `(1-t)^3` (left) or `t^3` (right) and `c = ν - 3`.
fn rational_derivative<T: Scalar>(nu: T, r: usize, t: T, left: bool) -> T {
    let c = nu - T::lit(3.0);
    let q = [
        T::one() + c * (T::one() - t) * t,
        c * (T::one() - T::lit(2.0) * t),
        -c,
    ];
    let mut u = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let p = if j > 3 {
            T::zero()
        } else if left {
            let s = if j % 2 == 0 { T::one() } else { -T::one() };
            s * binomial::<T>(3, j) * (T::one() - t).powi(3 - j as i32)
        } else {
            binomial::<T>(3, j) * t.powi(3 - j as i32)
        };
        let mut acc = p;
        for k in 1..=j.min(2) {
            acc -= q[k] * u[j - k];
        }
        u.push(acc / q[0]);
    }
    factorial::<T>(r) * u[r]
}

/// `∫_{t0}^{t1} t^3 / (1 + c(1-t)t) dt`.
fn rational_right_integral<T: Scalar>(nu: T, t0: T, t1: T) -> T {
    let c = nu - T::lit(3.0);
    if c < T::lit(0.5) {
        // Poles are far from [0, 1]; Gauss-Legendre is exact to rounding and
        // avoids the cancellation of the partial fraction form.
        let f = |t: T| t.powi(3) / (T::one() + c * (T::one() - t) * t);
        return gauss_legendre(f, t0, t1);
    }
    // Denominator -c t^2 + c t + 1; t^3 = (a1 t + a0) Q(t) + (b1 t + b0).
    let a1 = -T::one() / c;
    let a0 = -T::one() / c;
    // t^3 - (a1 t + a0)(-c t^2 + c t + 1)
    //   = t^3 - [ -c a1 t^3 + (c a1 - c a0) t^2 + (a1 + c a0) t + a0 ]
    let b1 = -(a1 + c * a0);
    let b0 = -a0;
    let s = (T::one() + T::lit(4.0) / c).sqrt();
    let half = T::lit(0.5);
    let r1 = (T::one() + s) * half;
    let r2 = (T::one() - s) * half;
    let big_a = (b1 * r1 + b0) / (-c * (r1 - r2));
    let big_b = (b1 * r2 + b0) / (-c * (r2 - r1));
    let prim = |t: T| {
        a1 * t * t * half + a0 * t + big_a * (t - r1).abs().ln() + big_b * (t - r2).abs().ln()
    };
    prim(t1) - prim(t0)
}

fn gauss_legendre<T: Scalar, F: Fn(T) -> T>(f: F, lo: T, hi: T) -> T {
    const N: usize = 20;
    let half = T::lit(0.5);
    let mid = (lo + hi) * half;
    let rad = (hi - lo) * half;
    let mut sum = T::zero();
    for i in 1..=N {
        let mut x = (T::PI() * (T::lit(i as f64) - T::lit(0.25)) / T::lit(N as f64 + 0.5)).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (T::one(), x);
            for k in 2..=N {
                let kf = T::from_usize_lossy(k);
                let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = T::from_usize_lossy(N) * (x * p1 - p0) / (x * x - T::one());
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() <= T::epsilon() {
                break;
            }
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        sum += w * f(mid + rad * x);
    }
    sum * rad
}

/// A section space on one interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Section<T> {
    family: Family<T>,
    lo: T,
    hi: T,
    map: LocalMap,
    origin: T,
    scale: T,
    generators: Vec<Generator<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> Section<T> {
    /// Builds a section with the family's default local map.
    pub fn new(family: Family<T>, interval: (T, T), order: usize) -> Result<Self> {
        Self::with_map(family, interval, order, family.default_map())
    }

    pub fn with_map(
        family: Family<T>,
        (lo, hi): (T, T),
        order: usize,
        map: LocalMap,
    ) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "section interval [{lo}, {hi}] must be finite and nondegenerate"
            )));
        }
        let scale = match map {
            LocalMap::Shift => T::one(),
            LocalMap::Normalized => hi - lo,
        };
        Self::from_parts(family, (lo, hi), order, map, lo, scale)
    }

    /// Section whose local variable is `(x - origin) / scale`, as produced
    /// by splitting or translating another section.
    pub fn with_frame(
        family: Family<T>,
        interval: (T, T),
        order: usize,
        map: LocalMap,
        origin: T,
        scale: T,
    ) -> Result<Self> {
        if !(scale > T::zero()) || !origin.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "local frame needs a finite origin and positive scale, got ({origin}, {scale})"
            )));
        }
        Self::from_parts(family, interval, order, map, origin, scale)
    }

    fn from_parts(
        family: Family<T>,
        (lo, hi): (T, T),
        order: usize,
        map: LocalMap,
        origin: T,
        scale: T,
    ) -> Result<Self> {
        let generators = family.generators(order)?;
        // Constraints are checked on the span of local parameters the
        // section actually covers.
        family.validate(order, (hi - lo) / scale)?;
        Ok(Self {
            family,
            lo,
            hi,
            map,
            origin,
            scale,
            weights: vec![T::one(); generators.len()],
            generators,
        })
    }

    /// Divides each generator by its largest sampled magnitude on the interval.
    pub fn with_scaling(mut self) -> Self {
        const SAMPLES: usize = 64;
        for h in 0..self.order() {
            let mut max = T::zero();
            for s in 0..=SAMPLES {
                let x = self.lo
                    + (self.hi - self.lo) * T::from_usize_lossy(s) / T::from_usize_lossy(SAMPLES);
                max = max.max(self.generators[h].derivative(0, self.local(x)).abs());
            }
            if max > T::zero() && max.is_finite() {
                self.weights[h] = T::one() / max;
            }
        }
        self
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn order(&self) -> usize {
        self.generators.len()
    }

    pub fn interval(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    /// `(origin, scale)` of the local variable.
    pub fn frame(&self) -> (T, T) {
        (self.origin, self.scale)
    }

    pub fn local_map(&self) -> LocalMap {
        self.map
    }

    pub fn is_scaled(&self) -> bool {
        self.weights.iter().any(|&w| w != T::one())
    }

    /// Local parameter `t` of the abscissa `x`.
    pub fn local(&self, x: T) -> T {
        (x - self.origin) / self.scale
    }

    /// `D^r u_h(x)` (derivatives with respect to `x`); `h` is 0-based.
    pub fn eval_generator(&self, h: usize, r: usize, x: T) -> Result<T> {
        self.check_index(h)?;
        self.check_x(x)?;
        Ok(self.generator_unchecked(h, r, x))
    }

    /// `∫_{lo}^{x} u_h`.
    pub fn antiderivative_generator(&self, h: usize, x: T) -> Result<T> {
        self.check_index(h)?;
        self.check_x(x)?;
        Ok(self.integral_unchecked(h, self.lo, x))
    }

    pub(crate) fn generator_unchecked(&self, h: usize, r: usize, x: T) -> T {
        let d = self.generators[h].derivative(r, self.local(x));
        self.weights[h] * d / self.scale.powi(r as i32)
    }

    /// Fills `out[h] = D^r u_h(x)` for every generator.
    pub(crate) fn eval_all(&self, r: usize, x: T, out: &mut [T]) {
        let t = self.local(x);
        let s = self.scale.powi(r as i32);
        for (h, o) in out.iter_mut().enumerate() {
            *o = self.weights[h] * self.generators[h].derivative(r, t) / s;
        }
    }

    /// `∫_{x0}^{x1} u_h`.
    pub(crate) fn integral_unchecked(&self, h: usize, x0: T, x1: T) -> T {
        self.weights[h] * self.scale * self.generators[h].integral(self.local(x0), self.local(x1))
    }

    fn check_index(&self, h: usize) -> Result<()> {
        if h >= self.order() {
            return Err(Error::IndexOutOfRange {
                index: h,
                valid: format!("0..{}", self.order()),
            });
        }
        Ok(())
    }

    fn check_x(&self, x: T) -> Result<()> {
        if !(x >= self.lo && x <= self.hi) {
            return Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                lo: self.lo.to_f64_lossy(),
                hi: self.hi.to_f64_lossy(),
            });
        }
        Ok(())
    }

    /// Splits the section at an interior abscissa.
    pub fn split(&self, at: T, strategy: SplitStrategy) -> Result<(Self, Self)> {
        if !(at > self.lo && at < self.hi) {
            return Err(Error::UnsupportedSplit(format!(
                "split point {at} must lie strictly inside [{}, {}]",
                self.lo, self.hi
            )));
        }
        match strategy {
            SplitStrategy::Restrict => Ok((self.restricted(self.lo, at), self.restricted(at, self.hi))),
            SplitStrategy::Reparametrize => {
                if !self.family.supports_reparametrize() {
                    return Err(Error::UnsupportedSplit(format!(
                        "{} sections only support the restrict strategy",
                        self.family.name()
                    )));
                }
                Ok((self.reparametrized(self.lo, at)?, self.reparametrized(at, self.hi)?))
            }
        }
    }

    /// Same generators and local map on a sub-interval.
    pub fn restricted(&self, lo: T, hi: T) -> Self {
        Self { lo, hi, ..self.clone() }
    }

    fn reparametrized(&self, lo: T, hi: T) -> Result<Self> {
        let scale = match self.map {
            LocalMap::Shift => T::one(),
            LocalMap::Normalized => hi - lo,
        };
        let family = self.family.scaled_frequencies(scale / self.scale);
        let child = Self::from_parts(family, (lo, hi), self.order(), self.map, lo, scale)?;
        Ok(if self.is_scaled() { child.with_scaling() } else { child })
    }

    /// Copy of the section moved by `dx` along the abscissa.
    pub fn translated(&self, dx: T) -> Self {
        Self {
            lo: self.lo + dx,
            hi: self.hi + dx,
            origin: self.origin + dx,
            ..self.clone()
        }
    }

    /// True when both sections are restrictions of one function space, so
    /// they can be merged across their common end.
    pub fn same_space(&self, other: &Self) -> bool {
        self.generators == other.generators
            && self.origin == other.origin
            && self.scale == other.scale
            && self.weights == other.weights
    }

    /// The union of two adjacent sections that share one function space.
    pub(crate) fn merged(&self, other: &Self) -> Self {
        Self {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
            ..self.clone()
        }
    }

    /// A section of the same family and map with a different order.
    pub(crate) fn with_family_order(&self, family: Family<T>, order: usize) -> Result<Self> {
        Self::from_parts(family, (self.lo, self.hi), order, self.map, self.origin, self.scale)
    }
}

impl<T: Scalar> fmt::Display for Section<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} order {} on [{}, {}]",
            self.family.name(),
            self.order(),
            self.lo,
            self.hi
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(s: &Section<f64>) {
        let (lo, hi) = s.interval();
        let h = 1e-5;
        for k in 0..s.order() {
            for j in 1..20 {
                let x = lo + (hi - lo) * j as f64 / 20.0;
                for r in 1..s.order() {
                    let exact = s.eval_generator(k, r, x).unwrap();
                    let fd = (s.eval_generator(k, r - 1, x + h).unwrap()
                        - s.eval_generator(k, r - 1, x - h).unwrap())
                        / (2.0 * h);
                    let scale = exact.abs().max(1.0);
                    assert!(
                        (exact - fd).abs() / scale < 1e-6,
                        "{s} generator {k} r {r} x {x}: {exact} vs {fd}"
                    );
                }
                let fd = (s.antiderivative_generator(k, x + h).unwrap()
                    - s.antiderivative_generator(k, x - h).unwrap())
                    / (2.0 * h);
                let v = s.eval_generator(k, 0, x).unwrap();
                assert!((v - fd).abs() / v.abs().max(1.0) < 1e-6, "{s} antiderivative {k}");
            }
        }
    }

    fn catalog() -> Vec<Section<f64>> {
        vec![
            Section::new(Family::Polynomial, (0.2, 1.1), 5).unwrap(),
            Section::new(Family::Trigonometric { theta: 2.0 }, (0.0, 0.25), 3).unwrap(),
            Section::new(Family::Trigonometric { theta: 1.5 }, (0.5, 2.0), 5).unwrap(),
            Section::new(Family::Hyperbolic { phi: 4.0 }, (0.5, 1.0), 3).unwrap(),
            Section::new(Family::TrigHyperbolic { theta: 1.0, phi: 1.0 }, (0.0, 0.5), 6).unwrap(),
            Section::new(Family::TrigEnvelope { theta: 1.0 }, (1.0, 2.0), 5).unwrap(),
            Section::new(Family::RationalTension { nu1: 4.0, nu2: 8.0 }, (0.0, 0.7), 4).unwrap(),
            Section::new(Family::RationalTension { nu1: 3.2, nu2: 3.0 }, (0.3, 0.7), 4).unwrap(),
            Section::new(Family::MultiFrequency { theta: 2.0 }, (4.0, 5.0), 5).unwrap(),
            Section::new(Family::VariableDegree { n1: 10, n2: 5 }, (1.0, 2.0), 5).unwrap(),
        ]
    }

    #[test]
    fn derivatives_and_antiderivatives_match_finite_differences() {
        for s in catalog() {
            fd_check(&s);
            fd_check(&s.clone().with_scaling());
        }
    }

    #[test]
    fn generator_examples() {
        let p = Section::new(Family::Polynomial, (0.0, 1.0), 3).unwrap();
        assert_eq!(p.eval_generator(2, 1, 0.5).unwrap(), 1.0);
        assert_eq!(p.antiderivative_generator(0, 1.0).unwrap(), 1.0);
        let t = Section::new(Family::Trigonometric { theta: 2.0 }, (0.0, 1.0), 3).unwrap();
        assert_eq!(t.eval_generator(1, 0, 0.0).unwrap(), 1.0);
        let x = std::f64::consts::FRAC_PI_8;
        let v = t.antiderivative_generator(1, x).unwrap();
        assert!((v - (std::f64::consts::FRAC_PI_4).sin() / 2.0).abs() < 1e-15);
        let r = Section::<f64>::new(Family::RationalTension { nu1: 4.0, nu2: 4.0 }, (0.0, 1.0), 4).unwrap();
        assert!((r.eval_generator(3, 0, 1.0).unwrap() - 1.0).abs() < 1e-15);
        for s in catalog() {
            for h in 0..s.order() {
                assert_eq!(s.antiderivative_generator(h, s.interval().0).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn rational_integral_matches_quadrature() {
        for nu in [3.0, 3.3, 4.0, 8.0, 30.0] {
            let f = |t: f64| t.powi(3) / (1.0 + (nu - 3.0) * (1.0 - t) * t);
            let exact = rational_right_integral(nu, 0.1, 0.9);
            // composite Simpson
            let n = 2000;
            let h = 0.8 / n as f64;
            let mut s = f(0.1) + f(0.9);
            for i in 1..n {
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(0.1 + i as f64 * h);
            }
            s *= h / 3.0;
            assert!((exact - s).abs() < 1e-12, "nu {nu}: {exact} vs {s}");
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(
            Section::new(Family::Trigonometric { theta: 4.0 }, (0.0, 1.0), 3),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            Section::new(Family::RationalTension { nu1: 2.0, nu2: 4.0 }, (0.0, 1.0), 4),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            Section::new(Family::MultiFrequency { theta: 1.0 }, (0.0, 1.0), 4),
            Err(Error::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            Section::new(Family::VariableDegree { n1: 2, n2: 2 }, (0.0, 1.0), 5),
            Err(Error::InvalidParameter(_))
        ));
        assert!(Section::new(Family::Polynomial, (1.0, 1.0), 2).is_err());
        let p = Section::new(Family::Polynomial, (0.0, 1.0), 3).unwrap();
        assert!(p.eval_generator(0, 0, 1.5).is_err());
        assert!(p.eval_generator(3, 0, 0.5).is_err());
    }

    /// Least-squares residual of each parent generator on `child`.
    fn containment_residual(parent: &Section<f64>, child: &Section<f64>) -> f64 {
        use crate::linalg::{least_squares, Matrix};
        let (lo, hi) = child.interval();
        let xs: Vec<f64> = (0..50).map(|j| lo + (hi - lo) * j as f64 / 49.0).collect();
        let a = Matrix::from_rows(
            &xs.iter()
                .map(|&x| (0..child.order()).map(|h| child.eval_generator(h, 0, x).unwrap()).collect())
                .collect::<Vec<_>>(),
        );
        let rhs: Vec<Vec<f64>> = (0..parent.order())
            .map(|h| xs.iter().map(|&x| parent.eval_generator(h, 0, x).unwrap()).collect())
            .collect();
        least_squares(&a, &rhs).unwrap().1
    }

    #[test]
    fn split_children_contain_parent() {
        let trig = Section::with_map(Family::Trigonometric { theta: 2.0 }, (0.0, 1.0), 3, LocalMap::Normalized)
            .unwrap();
        let (l, r) = trig.split(0.5, SplitStrategy::Reparametrize).unwrap();
        assert_eq!(*l.family(), Family::Trigonometric { theta: 1.0 });
        assert_eq!(*r.family(), Family::Trigonometric { theta: 1.0 });
        for parent in catalog() {
            let (lo, hi) = parent.interval();
            let at = lo + 0.3 * (hi - lo);
            for strategy in [SplitStrategy::Restrict, SplitStrategy::Reparametrize] {
                match parent.split(at, strategy) {
                    Ok((l, r)) => {
                        assert!(containment_residual(&parent, &l) < 1e-9, "{parent} {strategy:?}");
                        assert!(containment_residual(&parent, &r) < 1e-9, "{parent} {strategy:?}");
                    }
                    Err(Error::UnsupportedSplit(_)) => {
                        assert!(!parent.family().supports_reparametrize())
                    }
                    Err(e) => panic!("{e}"),
                }
            }
        }
        assert!(trig.split(1.0, SplitStrategy::Restrict).is_err());
    }

    #[test]
    fn f32_sections_evaluate() {
        let s = Section::<f32>::new(Family::Trigonometric { theta: 2.0 }, (0.0, 1.0), 4).unwrap();
        let v = s.eval_generator(2, 0, 0.5).unwrap();
        assert!((v - 1f32.cos()).abs() < 1e-6);
    }
}

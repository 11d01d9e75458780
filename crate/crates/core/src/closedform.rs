//! Closed-form order-4 B-splines on simple knots for sections
//! `{1, t, u(t), v(t)}` in the normalized local variable
//! `t = (x - x_j) / (x_{j+1} - x_j)`.
//!
//! Every formula goes through the profile `F` with `F(0) = F'(0) = F''(0) = 0`,
//! and only needs `F(1)` and `F'(1)` besides `F` itself.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::section::Family;

/// Shape shared by all sections of the space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormCase<T> {
    /// `u, v = cos(θt), sin(θt)`, `0 < θ < π`.
    Trigonometric { theta: T },
    /// `u, v = cosh(φt), sinh(φt)`, `φ > 0`.
    Hyperbolic { phi: T },
    /// `u, v = (1-t)^3 / q(t), t^3 / q(t)` with `q = 1 + (ν-3)(1-t)t`, `ν >= 3`.
    RationalTension { nu: T },
}

impl<T: Scalar> ClosedFormCase<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ClosedFormCase::Trigonometric { theta } => theta > T::zero() && theta < T::PI(),
            ClosedFormCase::Hyperbolic { phi } => phi > T::zero() && phi.is_finite(),
            ClosedFormCase::RationalTension { nu } => nu >= T::lit(3.0) && nu.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("closed-form parameter out of range: {self:?}")))
        }
    }

    /// Section family the pipeline should use to build the same space, with
    /// the normalized local map.
    pub fn family(&self) -> Family<T> {
        match *self {
            ClosedFormCase::Trigonometric { theta } => Family::Trigonometric { theta },
            ClosedFormCase::Hyperbolic { phi } => Family::Hyperbolic { phi },
            ClosedFormCase::RationalTension { nu } => Family::RationalTension { nu1: nu, nu2: nu },
        }
    }

    fn profile(&self, t: T) -> T {
        match *self {
            ClosedFormCase::Trigonometric { theta } => theta * t - (theta * t).sin(),
            ClosedFormCase::Hyperbolic { phi } => phi * t - (phi * t).sinh(),
            ClosedFormCase::RationalTension { nu } => {
                t * t * t / (T::one() + (nu - T::lit(3.0)) * (T::one() - t) * t)
            }
        }
    }

    /// `(F(1), F'(1))`.
    fn profile_end(&self) -> (T, T) {
        match *self {
            ClosedFormCase::Trigonometric { theta } => (theta - theta.sin(), theta * (T::one() - theta.cos())),
            ClosedFormCase::Hyperbolic { phi } => (phi - phi.sinh(), phi * (T::one() - phi.cosh())),
            ClosedFormCase::RationalTension { nu } => (T::one(), nu),
        }
    }
}

/// `N_{i,4}(x)` on a knot vector whose knots `t_i..=t_{i+4}` are simple.
/// Right-continuous; zero outside `[t_i, t_{i+4})`.
pub fn eval_closed_n4<T: Scalar>(case: &ClosedFormCase<T>, knots: &[T], i: usize, x: T) -> Result<T> {
    case.validate()?;
    if i + 4 >= knots.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            valid: format!("0..{}", knots.len().saturating_sub(4)),
        });
    }
    let t = &knots[i..=i + 4];
    if t.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter(format!(
            "closed forms need simple knots, got {:?}",
            t.iter().map(|v| v.to_f64_lossy()).collect::<Vec<_>>()
        )));
    }
    if x < t[0] || x >= t[4] {
        return Ok(T::zero());
    }
    // h[k] = h_{i+k}
    let h: Vec<T> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let (f1, df1) = case.profile_end();
    let f = |u: T| case.profile(u);
    let g = |k: usize, u: T| f1 * (h[k] - h[k - 1]) - df1 * h[k] * u;
    let big_h = |k: usize| f1 * (h[k] + h[k + 1] + h[k + 2]) + (df1 - T::lit(3.0) * f1) * h[k + 1];
    let (h0, h1) = (big_h(0), big_h(1));
    let one = T::one();
    let v = if x < t[1] {
        let tau = (x - t[0]) / h[0];
        h[0] * h[0] * f(tau) / (h0 * (h[0] + h[1]))
    } else if x < t[2] {
        let tau = (x - t[1]) / h[1];
        -(one / h0 + one / h1) * h[1] * h[1] * f(tau) / (h[1] + h[2])
            - (g(1, tau) - h[1] * h[1] * f(one - tau) / (h[0] + h[1])) / h0
    } else if x < t[3] {
        let tau = (x - t[2]) / h[2];
        one - (one / h0 + one / h1) * h[2] * h[2] * f(one - tau) / (h[1] + h[2])
            + (g(2, tau) + h[2] * h[2] * f(tau) / (h[2] + h[3])) / h1
    } else {
        let tau = (x - t[3]) / h[3];
        h[3] * h[3] * f(one - tau) / (h1 * (h[2] + h[3]))
    };
    Ok(v)
}

//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use chebspline::{ExtendedPartition, Family, Section, SplineSpace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Cox-de Boor recurrence for the polynomial B-spline `N_{i,m}` (order `m`)
/// on a clamped knot vector, right-continuous with the last interval closed.
pub fn cox_de_boor(knots: &[f64], i: usize, m: usize, x: f64) -> f64 {
    let b = knots[knots.len() - 1];
    if m == 1 {
        let (lo, hi) = (knots[i], knots[i + 1]);
        if lo < hi && ((lo <= x && x < hi) || (x == b && hi == b)) {
            return 1.0;
        }
        return 0.0;
    }
    let mut v = 0.0;
    let d1 = knots[i + m - 1] - knots[i];
    if d1 > 0.0 {
        v += (x - knots[i]) / d1 * cox_de_boor(knots, i, m - 1, x);
    }
    let d2 = knots[i + m] - knots[i + 1];
    if d2 > 0.0 {
        v += (knots[i + m] - x) / d2 * cox_de_boor(knots, i + 1, m - 1, x);
    }
    v
}

/// Boehm's polynomial knot insertion: returns the α values for
/// `i in l-m+2..=l` (0-based) where `t_l <= t < t_{l+1}`.
pub fn boehm_alpha(knots: &[f64], m: usize, t: f64, i: usize) -> f64 {
    (t - knots[i]) / (knots[i + m - 1] - knots[i])
}

/// Classical Bézier degree elevation of control points (degree n -> n+1).
pub fn bezier_elevate(ctrl: &[f64]) -> Vec<f64> {
    let n = ctrl.len() - 1;
    let mut out = Vec::with_capacity(n + 2);
    out.push(ctrl[0]);
    for i in 1..=n {
        let a = i as f64 / (n + 1) as f64;
        out.push(a * ctrl[i - 1] + (1.0 - a) * ctrl[i]);
    }
    out.push(ctrl[n]);
    out
}

/// De Casteljau evaluation of a polynomial Bézier segment on [0, 1].
pub fn de_casteljau(ctrl: &[f64], t: f64) -> f64 {
    let mut p = ctrl.to_vec();
    for k in 1..p.len() {
        for i in 0..p.len() - k {
            p[i] = (1.0 - t) * p[i] + t * p[i + 1];
        }
    }
    p[0]
}

/// Polynomial spline space with the given break-points and multiplicities.
pub fn poly_space(bps: &[f64], mults: &[usize], m: usize) -> Arc<SplineSpace<f64>> {
    family_space(bps, mults, m, |_| Family::Polynomial)
}

pub fn family_space(
    bps: &[f64],
    mults: &[usize],
    m: usize,
    family: impl Fn(usize) -> Family<f64>,
) -> Arc<SplineSpace<f64>> {
    let p = ExtendedPartition::clamped(bps, mults, m).unwrap();
    let secs = bps
        .windows(2)
        .enumerate()
        .map(|(j, w)| Section::new(family(j), (w[0], w[1]), m).unwrap())
        .collect();
    Arc::new(SplineSpace::new(p, secs).unwrap())
}

/// Random strictly increasing break-points on [0, len] with `n` interior
/// points separated by at least `gap`.
pub fn random_breakpoints(rng: &mut impl Rng, n: usize, len: f64, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..len)).collect();
        v.push(0.0);
        v.push(len);
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

pub fn samples(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
}

/// Closed C¹ curve made of a line, a half circle over two sections, a cubic
/// and a cardioid arc: it lies in the multi-order space with orders 2, 3, 3, 4, 5 on unit intervals, so a least-squares
/// fit from samples reproduces it.
pub fn multi_order_curve(x: f64) -> [f64; 2] {
    let theta = PI / 2.0;
    let phi = 2.0 * PI / 3.0;
    let circle = |u: f64| [(theta * u).cos(), (theta * u).sin()];
    let dcircle = |u: f64| [-theta * (theta * u).sin(), theta * (theta * u).cos()];
    // Cardioid (1 + cos a)(cos a, sin a), scaled and moved so that its end
    // point feeds the line into the circle with matching tangent.
    let card = |u: f64| {
        let a = phi * u + PI / 3.0;
        let r = 1.0 + a.cos();
        [0.5 * r * a.cos(), 0.5 * r * a.sin()]
    };
    let dcard = |u: f64| {
        let a = phi * u + PI / 3.0;
        let r = 1.0 + a.cos();
        let dr = -a.sin();
        [0.5 * phi * (dr * a.cos() - r * a.sin()), 0.5 * phi * (dr * a.sin() + r * a.cos())]
    };
    let start = circle(0.0);
    let p0 = [start[0] - dcircle(0.0)[0], start[1] - dcircle(0.0)[1]];
    let shift = [p0[0] - card(1.0)[0], p0[1] - card(1.0)[1]];
    let cardioid = |u: f64| [card(u)[0] + shift[0], card(u)[1] + shift[1]];
    match x {
        x if x <= 1.0 => [p0[0] + x * (start[0] - p0[0]), p0[1] + x * (start[1] - p0[1])],
        x if x <= 3.0 => circle(x - 1.0),
        x if x <= 4.0 => {
            let u = x - 3.0;
            let (p, dp, q, dq) = (circle(2.0), dcircle(2.0), cardioid(0.0), dcard(0.0));
            let h = [
                2.0 * u.powi(3) - 3.0 * u * u + 1.0,
                u.powi(3) - 2.0 * u * u + u,
                -2.0 * u.powi(3) + 3.0 * u * u,
                u.powi(3) - u * u,
            ];
            [0, 1].map(|k| h[0] * p[k] + h[1] * dp[k] + h[2] * q[k] + h[3] * dq[k])
        }
        x => cardioid(x - 4.0),
    }
}

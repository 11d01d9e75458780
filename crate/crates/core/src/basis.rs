//! Spline spaces, B-spline and Bernstein bases built from transition
//! functions, splines and tensor-product surfaces.

use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::extensions::ConnectionMatrix;
use crate::partition::ExtendedPartition;
use crate::scalar::Scalar;
use crate::section::Section;
use crate::transition::{Side, TransitionTable};

/// Anything whose basis is `N_i = f_i - f_{i+1}` for a table of transition
/// functions.
pub trait Basis<T: Scalar> {
    fn dim(&self) -> usize;

    fn domain(&self) -> (T, T);

    fn table(&self) -> &TransitionTable<T>;

    /// Closed support `[lo, hi]` of `N_i`.
    fn support(&self, i: usize) -> (T, T);

    /// Basis indices that may be nonzero on the given side of `x`.
    fn active(&self, x: T, side: Side) -> Range<usize>;

    fn check_domain(&self, x: T) -> Result<()> {
        let (a, b) = self.domain();
        if x >= a && x <= b {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                lo: a.to_f64_lossy(),
                hi: b.to_f64_lossy(),
            })
        }
    }

    /// At the domain ends only the inner side exists.
    fn resolve_side(&self, x: T, side: Side) -> Side {
        let (a, b) = self.domain();
        if x == a {
            Side::Right
        } else if x == b {
            Side::Left
        } else {
            side
        }
    }

    /// `D^r f_i(x)` for `i in 0..=dim`.
    fn transition(&self, i: usize, r: usize, x: T, side: Side) -> Result<T> {
        self.check_domain(x)?;
        let side = self.resolve_side(x, side);
        self.table().eval_derivative(i, r, x, side)
    }

    /// `D^r N_i(x)`.
    fn basis(&self, i: usize, r: usize, x: T, side: Side) -> Result<T> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                valid: format!("0..{}", self.dim()),
            });
        }
        Ok(self.transition(i, r, x, side)? - self.transition(i + 1, r, x, side)?)
    }

    /// `D^r N_i(x)` for the basis functions active at `x`, with the index of
    /// the first one.
    fn nonzero_basis(&self, r: usize, x: T, side: Side) -> Result<(usize, Vec<T>)> {
        self.check_domain(x)?;
        let side = self.resolve_side(x, side);
        let range = self.active(x, side);
        let table = self.table();
        let f: Vec<T> = (range.start..=range.end)
            .map(|i| table.eval_derivative_unchecked(&table.rows()[i], r, x, side))
            .collect();
        Ok((range.start, f.windows(2).map(|w| w[0] - w[1]).collect()))
    }

    /// `D^r N_i(x)` for every basis function.
    fn all_basis(&self, r: usize, x: T, side: Side) -> Result<Vec<T>> {
        let (start, vals) = self.nonzero_basis(r, x, side)?;
        let mut out = vec![T::zero(); self.dim()];
        out[start..start + vals.len()].copy_from_slice(&vals);
        Ok(out)
    }
}

/// A single-order piecewise Chebyshevian spline space with its transition
/// functions.
#[derive(Debug, Clone, PartialEq)]
pub struct SplineSpace<T> {
    partition: ExtendedPartition<T>,
    connections: Vec<Option<ConnectionMatrix<T>>>,
    table: TransitionTable<T>,
    tolerance: T,
}

impl<T: Scalar> SplineSpace<T> {
    pub fn new(partition: ExtendedPartition<T>, sections: Vec<Section<T>>) -> Result<Self> {
        Self::with_options(partition, sections, Vec::new(), T::default_residual_tolerance())
    }

    /// Full constructor. `connections` is empty or has one entry per
    /// break-point (`None` meaning ordinary parametric continuity).
    pub fn with_options(
        partition: ExtendedPartition<T>,
        sections: Vec<Section<T>>,
        connections: Vec<Option<ConnectionMatrix<T>>>,
        tolerance: T,
    ) -> Result<Self> {
        let sections = check_sections(&partition, sections)?;
        let connections = check_connections(&partition, connections)?;
        let table = TransitionTable::build(&partition, &sections, &connections, tolerance)?;
        Ok(Self {
            partition,
            connections,
            table,
            tolerance,
        })
    }

    /// Space spanned by the Bernstein basis of one section.
    pub fn bernstein(section: Section<T>) -> Result<Self> {
        let (a, b) = section.interval();
        let m = section.order();
        Self::new(ExtendedPartition::clamped(&[a, b], &[], m)?, vec![section])
    }

    /// Periodic space of period `L = x_P - x_0`. `breakpoints` is one period
    /// `x_0 < ... < x_P`, `multiplicities` belong to `x_0..x_{P-1}` and
    /// `sections` to the `P` intervals. The knot vector is the periodic
    /// extension restricted to the `m - 1` knots around each end, so the
    /// space has dimension `K + m - 1` on the domain `[x_0, x_P]`.
    pub fn periodic(
        order: usize,
        breakpoints: &[T],
        multiplicities: &[usize],
        sections: Vec<Section<T>>,
    ) -> Result<Self> {
        let p = breakpoints.len().saturating_sub(1);
        if p == 0 || multiplicities.len() != p || sections.len() != p {
            return Err(Error::InvalidPartition(format!(
                "periodic space needs P + 1 break-points, P multiplicities and P sections \
                 (got {}, {}, {})",
                breakpoints.len(),
                multiplicities.len(),
                sections.len()
            )));
        }
        if multiplicities[0] == 0 || multiplicities.iter().any(|&mu| mu >= order) {
            return Err(Error::InvalidPartition(format!(
                "periodic multiplicities must satisfy 1 <= μ_0 and μ < {order}"
            )));
        }
        let period = breakpoints[p] - breakpoints[0];
        let per_period: usize = multiplicities.iter().sum();
        let wraps = (order / per_period + 2) as i64;
        // (value, multiplicity, base interval, shift)
        let mut all = Vec::new();
        for w in -wraps..=wraps {
            let shift = period * T::from_i64(w).unwrap();
            for k in 0..p {
                all.push((breakpoints[k] + shift, multiplicities[k], k, shift));
            }
        }
        let mut knots = Vec::new();
        for &(x, mu, _, _) in &all {
            knots.extend(std::iter::repeat_n(x, mu));
        }
        let zero = knots
            .iter()
            .position(|&t| t == breakpoints[0])
            .expect("x_0 is a knot");
        let window = &knots[zero + 1 - order..zero + per_period + order];
        let (first, last) = (window[0], window[window.len() - 1]);
        let kept: Vec<_> = all
            .into_iter()
            .filter(|&(x, _, _, _)| x >= first && x <= last)
            .collect();
        let bps: Vec<T> = kept.iter().map(|e| e.0).collect();
        let mults: Vec<usize> = bps
            .iter()
            .map(|&x| window.iter().filter(|&&t| t == x).count())
            .collect();
        let secs = kept[..kept.len() - 1]
            .iter()
            .map(|&(_, _, k, shift)| sections[k].translated(shift))
            .collect();
        let partition = ExtendedPartition::from_breakpoints(order, &bps, &mults)?;
        Self::with_options(partition, secs, Vec::new(), T::default_residual_tolerance())
    }

    pub fn is_periodic(&self) -> bool {
        !self.partition.is_clamped()
    }

    pub(crate) fn from_parts(
        partition: ExtendedPartition<T>,
        connections: Vec<Option<ConnectionMatrix<T>>>,
        table: TransitionTable<T>,
        tolerance: T,
    ) -> Self {
        Self {
            partition,
            connections,
            table,
            tolerance,
        }
    }

    pub fn partition(&self) -> &ExtendedPartition<T> {
        &self.partition
    }

    pub fn sections(&self) -> &[Section<T>] {
        self.table.sections()
    }

    pub fn connections(&self) -> &[Option<ConnectionMatrix<T>>] {
        &self.connections
    }

    pub fn has_connections(&self) -> bool {
        self.connections.iter().any(Option::is_some)
    }

    pub fn order(&self) -> usize {
        self.partition.order()
    }

    pub fn knots(&self) -> &[T] {
        self.partition.knots()
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    /// Value of the `i`-th Bernstein function of a one-section space.
    pub fn bernstein_basis(&self, i: usize, x: T) -> Result<T> {
        if self.partition.intervals() != 1 || !self.partition.is_clamped() {
            return Err(Error::InvalidPartition(
                "Bernstein basis needs a single-section clamped space".into(),
            ));
        }
        self.basis(i, 0, x, Side::Right)
    }
}

fn check_sections<T: Scalar>(
    partition: &ExtendedPartition<T>,
    sections: Vec<Section<T>>,
) -> Result<Vec<Section<T>>> {
    let bps = partition.breakpoints();
    if sections.len() != partition.intervals() {
        return Err(Error::Inconsistent(format!(
            "{} sections for {} break-point intervals",
            sections.len(),
            partition.intervals()
        )));
    }
    let span = bps[bps.len() - 1] - bps[0];
    let close = |u: T, v: T| (u - v).abs() <= T::lit(64.0) * T::epsilon() * span.max(T::one());
    sections
        .into_iter()
        .enumerate()
        .map(|(j, s)| {
            let (lo, hi) = s.interval();
            if !close(lo, bps[j]) || !close(hi, bps[j + 1]) {
                return Err(Error::Inconsistent(format!(
                    "section {j} covers [{lo}, {hi}] but the break-points are [{}, {}]",
                    bps[j],
                    bps[j + 1]
                )));
            }
            if s.order() != partition.order() {
                return Err(Error::Inconsistent(format!(
                    "section {j} has order {} but the space has order {}",
                    s.order(),
                    partition.order()
                )));
            }
            Ok(if lo == bps[j] && hi == bps[j + 1] {
                s
            } else {
                s.restricted(bps[j], bps[j + 1])
            })
        })
        .collect()
}

fn check_connections<T: Scalar>(
    partition: &ExtendedPartition<T>,
    connections: Vec<Option<ConnectionMatrix<T>>>,
) -> Result<Vec<Option<ConnectionMatrix<T>>>> {
    let n = partition.breakpoints().len();
    if connections.is_empty() {
        return Ok(vec![None; n]);
    }
    if connections.len() != n {
        return Err(Error::Inconsistent(format!(
            "{} connection entries for {n} break-points",
            connections.len()
        )));
    }
    for (j, c) in connections.iter().enumerate() {
        let Some(c) = c else { continue };
        if j == 0 || j == n - 1 {
            return Err(Error::InvalidConnection {
                breakpoint: j,
                reason: "end break-points take no connection matrix".into(),
            });
        }
        let want = partition.order() - partition.multiplicities()[j];
        if c.dim() != want {
            return Err(Error::InvalidConnection {
                breakpoint: j,
                reason: format!("matrix has order {} but m - μ = {want}", c.dim()),
            });
        }
    }
    Ok(connections)
}

impl<T: Scalar> Basis<T> for SplineSpace<T> {
    fn dim(&self) -> usize {
        self.partition.dim()
    }

    fn domain(&self) -> (T, T) {
        self.partition.domain()
    }

    fn table(&self) -> &TransitionTable<T> {
        &self.table
    }

    fn support(&self, i: usize) -> (T, T) {
        let k = self.partition.knots();
        (k[i], k[i + self.order()])
    }

    fn active(&self, x: T, side: Side) -> Range<usize> {
        let m = self.order();
        let inner = &self.partition.knots()[m..self.dim()];
        let count = match side {
            Side::Right => inner.partition_point(|&t| t <= x),
            Side::Left => inner.partition_point(|&t| t < x),
        };
        let l = m - 1 + count;
        l + 1 - m..l + 1
    }
}

/// Linear combination `Σ c_i N_i` with points `c_i ∈ R^d`.
#[derive(Debug, Clone)]
pub struct Spline<T, S = SplineSpace<T>> {
    space: Arc<S>,
    coefficients: Vec<Vec<T>>,
}

impl<T: Scalar, S: Basis<T>> Spline<T, S> {
    pub fn new(space: Arc<S>, coefficients: Vec<Vec<T>>) -> Result<Self> {
        if coefficients.len() != space.dim() {
            return Err(Error::Inconsistent(format!(
                "{} coefficients for a space of dimension {}",
                coefficients.len(),
                space.dim()
            )));
        }
        let d = coefficients.first().map_or(0, Vec::len);
        if d == 0 || coefficients.iter().any(|c| c.len() != d) {
            return Err(Error::Inconsistent(
                "coefficients must be nonempty points of one dimension".into(),
            ));
        }
        Ok(Self {
            space,
            coefficients,
        })
    }

    pub fn space(&self) -> &Arc<S> {
        &self.space
    }

    pub fn coefficients(&self) -> &[Vec<T>] {
        &self.coefficients
    }

    /// Dimension of the points.
    pub fn point_dim(&self) -> usize {
        self.coefficients[0].len()
    }

    pub fn eval(&self, x: T) -> Result<Vec<T>> {
        self.derivative(0, x, Side::Right)
    }

    /// `D^r s(x)` from the given side.
    pub fn derivative(&self, r: usize, x: T, side: Side) -> Result<Vec<T>> {
        let (start, vals) = self.space.nonzero_basis(r, x, side)?;
        let mut p = vec![T::zero(); self.point_dim()];
        for (k, &n) in vals.iter().enumerate() {
            for (pj, &cj) in p.iter_mut().zip(&self.coefficients[start + k]) {
                *pj += n * cj;
            }
        }
        Ok(p)
    }

    /// `∫_{x0}^{x1} s`, exact through the transition functions.
    pub fn integrate(&self, x0: T, x1: T) -> Result<Vec<T>> {
        self.space.check_domain(x0)?;
        self.space.check_domain(x1)?;
        let table = self.space.table();
        let mut p = vec![T::zero(); self.point_dim()];
        for i in 0..self.space.dim() {
            let w = table.integral_unchecked(&table.rows()[i], x0, x1);
            if w == T::zero() {
                continue;
            }
            for (k, pk) in p.iter_mut().enumerate() {
                let prev = if i == 0 { T::zero() } else { self.coefficients[i - 1][k] };
                *pk += w * (self.coefficients[i][k] - prev);
            }
        }
        Ok(p)
    }
}

/// Tensor-product surface `Σ_i Σ_j c_ij N_i(u) N_j(v)`.
#[derive(Debug, Clone)]
pub struct TensorSurface<T> {
    u: Arc<SplineSpace<T>>,
    v: Arc<SplineSpace<T>>,
    net: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> TensorSurface<T> {
    /// `net[i][j]` is the control point of `N_i(u) N_j(v)`.
    pub fn new(u: Arc<SplineSpace<T>>, v: Arc<SplineSpace<T>>, net: Vec<Vec<Vec<T>>>) -> Result<Self> {
        if net.len() != u.dim() || net.iter().any(|row| row.len() != v.dim()) {
            return Err(Error::Inconsistent(format!(
                "control net must be {} x {}",
                u.dim(),
                v.dim()
            )));
        }
        let d = net[0][0].len();
        if d == 0 || net.iter().flatten().any(|p| p.len() != d) {
            return Err(Error::Inconsistent("control points must share one dimension".into()));
        }
        Ok(Self { u, v, net })
    }

    pub fn u_space(&self) -> &Arc<SplineSpace<T>> {
        &self.u
    }

    pub fn v_space(&self) -> &Arc<SplineSpace<T>> {
        &self.v
    }

    pub fn net(&self) -> &[Vec<Vec<T>>] {
        &self.net
    }

    pub fn eval(&self, u: T, v: T) -> Result<Vec<T>> {
        self.derivative((0, 0), u, v, (Side::Right, Side::Right))
    }

    /// Mixed partial derivative `D_u^{ru} D_v^{rv}` from the given sides.
    pub fn derivative(&self, (ru, rv): (usize, usize), u: T, v: T, sides: (Side, Side)) -> Result<Vec<T>> {
        let (su, nu) = self.u.nonzero_basis(ru, u, sides.0)?;
        let (sv, nv) = self.v.nonzero_basis(rv, v, sides.1)?;
        let mut p = vec![T::zero(); self.net[0][0].len()];
        for (a, &bu) in nu.iter().enumerate() {
            for (b, &bv) in nv.iter().enumerate() {
                let w = bu * bv;
                for (pk, &ck) in p.iter_mut().zip(&self.net[su + a][sv + b]) {
                    *pk += w * ck;
                }
            }
        }
        Ok(p)
    }
}

//! Extended partitions: break-points, multiplicities and the knot vector.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Break-points with multiplicities and the knot vector they induce.
///
/// Indices are 0-based: knots `t[0..2m+K)`, domain `[t[m-1], t[m+K]]`.
/// Every break-point, including the two ends, carries a multiplicity; the
/// ends of a clamped partition have multiplicity `m`. Interior break-points
/// with multiplicity 0 contribute no knot but still separate sections.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedPartition<T> {
    order: usize,
    breakpoints: Vec<T>,
    multiplicities: Vec<usize>,
    knots: Vec<T>,
    knot_breakpoint: Vec<usize>,
}

impl<T: Scalar> ExtendedPartition<T> {
    /// Clamped partition from all break-points (ends included) and the
    /// multiplicities of the interior ones.
    pub fn clamped(breakpoints: &[T], interior_multiplicities: &[usize], order: usize) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidPartition(
                "need at least the two end break-points".into(),
            ));
        }
        if interior_multiplicities.len() != breakpoints.len() - 2 {
            return Err(Error::InvalidPartition(format!(
                "{} interior break-points but {} multiplicities",
                breakpoints.len() - 2,
                interior_multiplicities.len()
            )));
        }
        if let Some((i, &mu)) = interior_multiplicities
            .iter()
            .enumerate()
            .find(|(_, &mu)| mu >= order)
        {
            return Err(Error::MultiplicityOverflow {
                at: breakpoints[i + 1].to_f64_lossy(),
                multiplicity: mu,
                order,
            });
        }
        let mut mults = Vec::with_capacity(breakpoints.len());
        mults.push(order);
        mults.extend_from_slice(interior_multiplicities);
        mults.push(order);
        Self::from_breakpoints(order, breakpoints, &mults)
    }

    /// General constructor with a multiplicity for every break-point. The
    /// ends need not be clamped; this is how periodic partitions and
    /// multi-order knot sequences are represented.
    pub fn from_breakpoints(order: usize, breakpoints: &[T], multiplicities: &[usize]) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidPartition("order must be positive".into()));
        }
        if breakpoints.len() != multiplicities.len() || breakpoints.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "{} break-points but {} multiplicities",
                breakpoints.len(),
                multiplicities.len()
            )));
        }
        if breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPartition("break-points must be finite".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidPartition(format!(
                "break-points must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        if let Some(i) = (0..breakpoints.len()).find(|&i| multiplicities[i] > order) {
            return Err(Error::MultiplicityOverflow {
                at: breakpoints[i].to_f64_lossy(),
                multiplicity: multiplicities[i],
                order,
            });
        }
        let mut knots = Vec::new();
        let mut knot_breakpoint = Vec::new();
        for (j, (&x, &mu)) in breakpoints.iter().zip(multiplicities).enumerate() {
            for _ in 0..mu {
                knots.push(x);
                knot_breakpoint.push(j);
            }
        }
        let p = Self {
            order,
            breakpoints: breakpoints.to_vec(),
            multiplicities: multiplicities.to_vec(),
            knots,
            knot_breakpoint,
        };
        if p.knots.len() < 2 * order {
            return Err(Error::InvalidPartition(format!(
                "{} knots cannot support order {order}",
                p.knots.len()
            )));
        }
        let (a, b) = p.domain();
        if !(a < b) {
            return Err(Error::InvalidPartition(format!("empty domain [{a}, {b}]")));
        }
        Ok(p)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn knots(&self) -> &[T] {
        &self.knots
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Multiplicity of every break-point, ends included.
    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn interior_multiplicities(&self) -> &[usize] {
        &self.multiplicities[1..self.multiplicities.len() - 1]
    }

    /// Number of break-point intervals (sections).
    pub fn intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// `K`, the number of interior knots.
    pub fn interior_knots(&self) -> usize {
        self.knots.len() - 2 * self.order
    }

    /// Dimension `m + K` of the spline space.
    pub fn dim(&self) -> usize {
        self.knots.len() - self.order
    }

    /// `[a, b] = [t_{m-1}, t_{m+K}]`. For clamped partitions these are the
    /// end break-points; periodic partitions carry extra break-points
    /// outside the domain.
    pub fn domain(&self) -> (T, T) {
        (self.knots[self.order - 1], self.knots[self.dim()])
    }

    pub fn is_clamped(&self) -> bool {
        self.multiplicities[0] == self.order && *self.multiplicities.last().unwrap() == self.order
    }

    /// Break-point index of knot `i`.
    pub fn knot_breakpoint(&self, i: usize) -> usize {
        self.knot_breakpoint[i]
    }

    /// Index of the break-point equal to `x`, if any.
    pub fn breakpoint_index(&self, x: T) -> Option<usize> {
        self.breakpoints.iter().position(|&b| b == x)
    }

    /// Break-point interval containing `x`, right-continuous with the last
    /// interval closed.
    pub fn interval_of(&self, x: T) -> usize {
        let n = self.intervals();
        let pos = self.breakpoints[1..n].partition_point(|&b| b <= x);
        pos.min(n - 1)
    }

    /// Knot interval index `ℓ` with `t_ℓ <= x < t_{ℓ+1}` and `t_ℓ < t_{ℓ+1}`;
    /// `x = b` maps to the last nontrivial interval `m + K - 1`.
    pub fn locate(&self, x: T) -> Result<usize> {
        let (a, b) = self.domain();
        if !(x >= a && x <= b) {
            return Err(Error::OutOfDomain {
                x: x.to_f64_lossy(),
                lo: a.to_f64_lossy(),
                hi: b.to_f64_lossy(),
            });
        }
        let m = self.order;
        let last = self.dim() - 1;
        if x == b {
            return Ok(last);
        }
        let pos = self.knots[m..=last].partition_point(|&t| t <= x);
        Ok(m - 1 + pos)
    }

    /// `(μ^L_i, μ^R_i)`: copies of `t_i` at or left of `i`, and at or right of `i`.
    pub fn end_multiplicities(&self, i: usize) -> Result<(usize, usize)> {
        if i >= self.knots.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                valid: format!("0..{}", self.knots.len()),
            });
        }
        let t = self.knots[i];
        let left = self.knots[..=i].iter().rev().take_while(|&&s| s == t).count();
        let right = self.knots[i..].iter().take_while(|&&s| s == t).count();
        Ok((left, right))
    }

    /// `k^R_i = m - μ^R_i - 1` (may be -1 at a clamped end).
    pub fn k_right(&self, i: usize) -> isize {
        let (_, r) = self.end_multiplicities(i).expect("knot index in range");
        self.order as isize - r as isize - 1
    }

    /// `k^L_i = m - μ^L_i - 1`.
    pub fn k_left(&self, i: usize) -> isize {
        let (l, _) = self.end_multiplicities(i).expect("knot index in range");
        self.order as isize - l as isize - 1
    }

    /// Smoothness order `m - μ - 1` across interior break-point `j`.
    pub fn continuity(&self, j: usize) -> isize {
        self.order as isize - self.multiplicities[j] as isize - 1
    }
}

//! Geometric continuity through connection matrices, multi-order spaces
//! and vanishing-order detection for quasi extended Chebyshev sections.

use std::ops::Range;

use crate::basis::{Basis, SplineSpace};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::refine::{insert_knot_space, AlphaFormula, RefinementStep};
use crate::scalar::Scalar;
use crate::section::{Section, SplitStrategy};
use crate::transition::{solve_row, Row, RowSpec, Side, TransitionTable};

/// Lower-triangular matrix relating left and right derivatives at a
/// break-point: `M (D^0 s(x-), ..., D^k s(x-))^T = (D^0 s(x+), ..., D^k s(x+))^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionMatrix<T> {
    matrix: Matrix<T>,
}

impl<T: Scalar> ConnectionMatrix<T> {
    pub fn new(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let bad = |reason: String| Err(Error::InvalidConnection { breakpoint: 0, reason });
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return bad(format!("matrix must be square and nonempty, got {n} rows"));
        }
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return bad(format!("entry ({i}, {j}) is not finite"));
                }
                if j > i && v != T::zero() {
                    return bad(format!("entry ({i}, {j}) above the diagonal is nonzero"));
                }
                if (i == 0 || j == 0) && v != if i == j { T::one() } else { T::zero() } {
                    return bad("first row and column must be (1, 0, ..., 0)".into());
                }
            }
            if !(row[i] > T::zero()) {
                return bad(format!("diagonal entry {i} must be positive"));
            }
        }
        Ok(Self {
            matrix: Matrix::from_rows(rows),
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn get(&self, r: usize, s: usize) -> T {
        self.matrix[(r, s)]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.dim()).map(|i| self.matrix.row(i).to_vec()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix::identity(self.dim())
    }

    /// Matrix with its last row and column removed, as required when the
    /// multiplicity of its break-point grows by one.
    pub fn shrunk(&self) -> Self {
        let n = self.dim() - 1;
        let rows: Vec<Vec<T>> = (0..n).map(|i| self.matrix.row(i)[..n].to_vec()).collect();
        Self {
            matrix: Matrix::from_rows(&rows),
        }
    }
}

/// End of a transition function's nontrivial interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowEnd {
    /// `t_i`, approached from the right.
    Start,
    /// `t_{i+m-1}`, approached from the left.
    End,
}

/// Default relative threshold below which a derivative counts as zero.
pub const VANISHING_THRESHOLD: f64 = 1e-7;

/// Highest derivative order probed before giving up.
const MAX_PROBE: usize = 128;

/// Number of vanishing derivatives of `f_i` (at `Start`) or of `f_i - 1`
/// (at `End`), minus one: the largest `k̄` with `D^r = 0` for all `r <= k̄`.
/// A derivative is zero when its magnitude is at most
/// `threshold * max(1, scale)`, with `scale` the largest magnitude of that
/// derivative sampled over the adjacent piece.
pub fn detect_vanishing_order<T: Scalar>(
    table: &TransitionTable<T>,
    i: usize,
    end: RowEnd,
    threshold: T,
) -> Result<usize> {
    let Row::Hermite(h) = table.row(i)? else {
        return Err(Error::DegenerateRow { row: i, max_order: 0 });
    };
    let (lo, hi) = h.support();
    let (first, last) = h.span();
    let bps = table.breakpoints();
    let (x, side, piece) = match end {
        RowEnd::Start => (lo, Side::Right, (bps[first], bps[first + 1])),
        RowEnd::End => (hi, Side::Left, (bps[last - 1], bps[last])),
    };
    const SAMPLES: usize = 32;
    for r in 0..MAX_PROBE {
        let mut v = table.eval_derivative(i, r, x, side)?;
        if r == 0 && end == RowEnd::End {
            v -= T::one();
        }
        let mut scale = T::one();
        for s in 1..SAMPLES {
            let y = piece.0 + (piece.1 - piece.0) * T::from_usize_lossy(s) / T::from_usize_lossy(SAMPLES);
            scale = scale.max(table.eval_derivative(i, r, y, Side::Right)?.abs());
        }
        if v.abs() > threshold * scale {
            if r == 0 {
                return Err(Error::DegenerateRow { row: i, max_order: 0 });
            }
            return Ok(r - 1);
        }
    }
    Err(Error::DegenerateRow {
        row: i,
        max_order: MAX_PROBE,
    })
}

/// Detected vanishing orders of every solved row of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct QecProfile {
    /// `(i, k̄^R_i, k̄^L_{i+m-1})` per solved row.
    pub rows: Vec<(usize, usize, usize)>,
}

impl QecProfile {
    pub fn detect<T: Scalar>(table: &TransitionTable<T>, threshold: T) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, row) in table.rows().iter().enumerate() {
            if matches!(row, Row::Hermite(_)) {
                rows.push((
                    i,
                    detect_vanishing_order(table, i, RowEnd::Start, threshold)?,
                    detect_vanishing_order(table, i, RowEnd::End, threshold)?,
                ));
            }
        }
        Ok(Self { rows })
    }
}

/// Knot insertion into a space with connection matrices. The matrix at an
/// existing break-point loses its last row and column; a fresh break-point
/// gets the identity.
pub fn refine_gc_space<T: Scalar>(
    space: &SplineSpace<T>,
    at: T,
    strategy: SplitStrategy,
) -> Result<RefinementStep<T>> {
    insert_knot_space(space, at, strategy, AlphaFormula::Start)
}

/// Spline space whose sections have different orders, joined with
/// prescribed continuity `k_i` at each interior break-point.
///
/// Knots come in two sequences: `t` repeats `x_0` `m_0` times and `x_i`
/// `m_i - k_i - 1` times, `s` repeats `x_i` `m_{i-1} - k_i - 1` times and
/// `x_{q+1}` `m_q` times. `N_i` is supported on `[t_i, s_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiOrderSpace<T> {
    breakpoints: Vec<T>,
    continuity: Vec<usize>,
    t: Vec<T>,
    s: Vec<T>,
    table: TransitionTable<T>,
}

impl<T: Scalar> MultiOrderSpace<T> {
    /// `sections[j]` covers `[x_j, x_{j+1}]`; `continuity[i-1]` is `k_i`.
    pub fn new(sections: Vec<Section<T>>, continuity: &[usize]) -> Result<Self> {
        Self::with_tolerance(sections, continuity, T::default_residual_tolerance())
    }

    pub fn with_tolerance(sections: Vec<Section<T>>, continuity: &[usize], tolerance: T) -> Result<Self> {
        if sections.is_empty() || continuity.len() + 1 != sections.len() {
            return Err(Error::InvalidPartition(format!(
                "{} sections need {} continuity orders, got {}",
                sections.len(),
                sections.len().saturating_sub(1),
                continuity.len()
            )));
        }
        let mut breakpoints = vec![sections[0].interval().0];
        for (j, s) in sections.iter().enumerate() {
            let (lo, hi) = s.interval();
            if lo != breakpoints[j] {
                return Err(Error::InvalidPartition(format!(
                    "section {j} starts at {lo}, expected {}",
                    breakpoints[j]
                )));
            }
            breakpoints.push(hi);
        }
        let orders: Vec<usize> = sections.iter().map(Section::order).collect();
        for (i, &k) in continuity.iter().enumerate() {
            let bound = orders[i].min(orders[i + 1]);
            if k >= bound {
                return Err(Error::InvalidPartition(format!(
                    "continuity {k} at break-point {} must be below min(m_{}, m_{}) = {bound}",
                    i + 1,
                    i,
                    i + 1
                )));
            }
        }
        let q = continuity.len();
        let mut t = vec![breakpoints[0]; orders[0]];
        let mut s = Vec::new();
        for i in 1..=q {
            let k = continuity[i - 1];
            t.extend(std::iter::repeat_n(breakpoints[i], orders[i] - k - 1));
            s.extend(std::iter::repeat_n(breakpoints[i], orders[i - 1] - k - 1));
        }
        s.extend(std::iter::repeat_n(breakpoints[q + 1], orders[q]));
        debug_assert_eq!(t.len(), s.len());
        let dim = t.len();
        for i in 0..dim {
            if !(t[i] < s[i]) || (i > 0 && t[i] > s[i - 1]) {
                return Err(Error::InvalidPartition(format!(
                    "knot sequences give an empty support or gap at index {i}"
                )));
            }
        }

        let bp_index = |x: T| breakpoints.iter().position(|&b| b == x).expect("knot is a break-point");
        let mut rows = Vec::with_capacity(dim + 1);
        rows.push(Row::Unit);
        for i in 1..dim {
            let (lo, hi) = (t[i], s[i - 1]);
            if lo == hi {
                rows.push(Row::Step(lo));
                continue;
            }
            let first = bp_index(lo);
            let last = bp_index(hi);
            let mu_r = t[i..].iter().take_while(|&&x| x == lo).count();
            let mu_l = s[..i].iter().rev().take_while(|&&x| x == hi).count();
            let spec = RowSpec {
                first,
                last,
                left_zeros: orders[first].checked_sub(mu_r).ok_or_else(|| {
                    Error::Inconsistent(format!("row {i}: left multiplicity exceeds the order"))
                })?,
                right_conditions: orders[last - 1].checked_sub(mu_l).ok_or_else(|| {
                    Error::Inconsistent(format!("row {i}: right multiplicity exceeds the order"))
                })?,
                continuity: (first + 1..last).map(|j| continuity[j - 1] + 1).collect(),
                connections: vec![None; last - first - 1],
            };
            rows.push(Row::Hermite(solve_row(i, &sections, &breakpoints, &spec, tolerance)?));
        }
        rows.push(Row::Zero);
        let table = TransitionTable::from_rows(sections, breakpoints.clone(), rows);
        Ok(Self {
            breakpoints,
            continuity: continuity.to_vec(),
            t,
            s,
            table,
        })
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn sections(&self) -> &[Section<T>] {
        self.table.sections()
    }

    pub fn continuity(&self) -> &[usize] {
        &self.continuity
    }

    pub fn orders(&self) -> Vec<usize> {
        self.sections().iter().map(Section::order).collect()
    }

    /// Start knots `t_i`.
    pub fn start_knots(&self) -> &[T] {
        &self.t
    }

    /// End knots `s_i`.
    pub fn end_knots(&self) -> &[T] {
        &self.s
    }
}

impl<T: Scalar> Basis<T> for MultiOrderSpace<T> {
    fn dim(&self) -> usize {
        self.t.len()
    }

    fn domain(&self) -> (T, T) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    fn table(&self) -> &TransitionTable<T> {
        &self.table
    }

    fn support(&self, i: usize) -> (T, T) {
        (self.t[i], self.s[i])
    }

    fn active(&self, x: T, side: Side) -> Range<usize> {
        let (start, end) = match side {
            Side::Right => (
                self.s.partition_point(|&v| v <= x),
                self.t.partition_point(|&v| v <= x),
            ),
            Side::Left => (
                self.s.partition_point(|&v| v < x),
                self.t.partition_point(|&v| v < x),
            ),
        };
        start.min(end)..end
    }
}

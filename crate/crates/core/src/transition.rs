//! Transition functions: assembly and solution of the Hermite systems that
//! determine each `f_i`, and their evaluation.
//!
//! Row `i` of the table is `f_i = Σ_{j >= i} N_j`. Rows are indexed
//! `0..=dim`; row 0 is identically one and row `dim` identically zero on the
//! domain.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::extensions::ConnectionMatrix;
use crate::linalg::{Lu, Matrix};
use crate::partition::ExtendedPartition;
use crate::scalar::Scalar;
use crate::section::Section;

/// Which one-sided limit to take at a break-point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    Left,
    #[default]
    Right,
}

/// Solved transition function, piecewise over sections `first..last`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteRow<T> {
    first: usize,
    last: usize,
    lo: T,
    hi: T,
    coefficients: Vec<Vec<T>>,
    left_zeros: usize,
    right_conditions: usize,
    condition: T,
    residual: T,
}

impl<T: Scalar> HermiteRow<T> {
    /// Section (break-point interval) range where the row is nontrivial.
    pub fn span(&self) -> (usize, usize) {
        (self.first, self.last)
    }

    pub fn support(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    /// Coefficients in each section's generators, one vector per section.
    pub fn coefficients(&self) -> &[Vec<T>] {
        &self.coefficients
    }

    /// Estimated 1-norm condition number of the solved system.
    pub fn condition(&self) -> T {
        self.condition
    }

    /// Relative residual of the solved system.
    pub fn residual(&self) -> T {
        self.residual
    }

    pub(crate) fn shift_sections(&mut self, by: usize) {
        self.first += by;
        self.last += by;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Row<T> {
    /// `f ≡ 1` on the domain.
    Unit,
    /// `f ≡ 0` on the domain.
    Zero,
    /// Jump from 0 to 1 at a knot of full multiplicity.
    Step(T),
    Hermite(HermiteRow<T>),
}

/// Conditions determining one transition function.
#[derive(Debug, Clone)]
pub(crate) struct RowSpec<'a, T> {
    /// Sections `first..last` carry unknowns.
    pub first: usize,
    pub last: usize,
    /// `D^r f(x_first+) = 0` for `r < left_zeros`.
    pub left_zeros: usize,
    /// `D^r f(x_last-) = δ_{r0}` for `r < right_conditions`.
    pub right_conditions: usize,
    /// Derivatives matched at each interior break-point `first+1..last`.
    pub continuity: Vec<usize>,
    pub connections: Vec<Option<&'a ConnectionMatrix<T>>>,
}

/// Assembles and solves the Hermite system of one row.
pub(crate) fn solve_row<T: Scalar>(
    row: usize,
    sections: &[Section<T>],
    breakpoints: &[T],
    spec: &RowSpec<'_, T>,
    tolerance: T,
) -> Result<HermiteRow<T>> {
    let secs = &sections[spec.first..spec.last];
    let offsets: Vec<usize> = secs
        .iter()
        .scan(0, |acc, s| {
            let o = *acc;
            *acc += s.order();
            Some(o)
        })
        .collect();
    let n: usize = secs.iter().map(Section::order).sum();
    let equations = spec.left_zeros + spec.continuity.iter().sum::<usize>() + spec.right_conditions;
    if equations != n {
        return Err(Error::Inconsistent(format!(
            "transition row {row}: {equations} conditions for {n} unknowns"
        )));
    }
    let mut a = Matrix::zeros(n, n);
    let mut c = vec![T::zero(); n];
    let mut buf = vec![T::zero(); secs.iter().map(Section::order).max().unwrap_or(0)];
    let mut eq = 0;

    let x0 = breakpoints[spec.first];
    let s0 = &secs[0];
    for r in 0..spec.left_zeros {
        s0.eval_all(r, x0, &mut buf[..s0.order()]);
        for h in 0..s0.order() {
            a[(eq, h)] = buf[h];
        }
        eq += 1;
    }

    for (k, &count) in spec.continuity.iter().enumerate() {
        let j = spec.first + k + 1;
        let x = breakpoints[j];
        let (left, right) = (&secs[k], &secs[k + 1]);
        let (ol, or) = (offsets[k], offsets[k + 1]);
        let mut left_derivs = vec![vec![T::zero(); left.order()]; count];
        for (s, d) in left_derivs.iter_mut().enumerate() {
            left.eval_all(s, x, d);
        }
        for r in 0..count {
            match spec.connections[k] {
                Some(mat) => {
                    for (s, ld) in left_derivs.iter().enumerate().take(r + 1) {
                        let w = mat.get(r, s);
                        if w != T::zero() {
                            for (h, &v) in ld.iter().enumerate() {
                                a[(eq, ol + h)] += w * v;
                            }
                        }
                    }
                }
                None => {
                    for h in 0..left.order() {
                        a[(eq, ol + h)] = left_derivs[r][h];
                    }
                }
            }
            right.eval_all(r, x, &mut buf[..right.order()]);
            for h in 0..right.order() {
                a[(eq, or + h)] = -buf[h];
            }
            eq += 1;
        }
    }

    let xe = breakpoints[spec.last];
    let se = secs.last().expect("row spans at least one section");
    let oe = *offsets.last().unwrap();
    for r in 0..spec.right_conditions {
        se.eval_all(r, xe, &mut buf[..se.order()]);
        for h in 0..se.order() {
            a[(eq, oe + h)] = buf[h];
        }
        if r == 0 {
            c[eq] = T::one();
        }
        eq += 1;
    }

    let singular = |residual: T, condition: T| Error::Singular {
        row,
        residual: residual.to_f64_lossy(),
        condition: condition.to_f64_lossy(),
    };
    let lu = Lu::factor(&a).map_err(|_| singular(T::infinity(), T::infinity()))?;
    let b = lu.solve(&c);
    let condition = lu.condition_estimate();
    let ab = a.mul_vec(&b);
    let diff = ab
        .iter()
        .zip(&c)
        .map(|(&p, &q)| (p - q).abs())
        .fold(T::zero(), T::max);
    let b_norm = b.iter().map(|v| v.abs()).fold(T::zero(), T::max);
    let residual = diff / (a.norm_inf() * b_norm + T::one());
    if !(residual <= tolerance) || b.iter().any(|v| !v.is_finite()) {
        return Err(singular(residual, condition));
    }
    let coefficients = secs
        .iter()
        .zip(&offsets)
        .map(|(s, &o)| b[o..o + s.order()].to_vec())
        .collect();
    Ok(HermiteRow {
        first: spec.first,
        last: spec.last,
        lo: x0,
        hi: xe,
        coefficients,
        left_zeros: spec.left_zeros,
        right_conditions: spec.right_conditions,
        condition,
        residual,
    })
}

/// Conditions of row `i` of a single-order space.
pub(crate) fn standard_row_spec<'a, T: Scalar>(
    partition: &ExtendedPartition<T>,
    connections: &'a [Option<ConnectionMatrix<T>>],
    i: usize,
) -> Option<RowSpec<'a, T>> {
    let m = partition.order();
    let knots = partition.knots();
    if knots[i] == knots[i + m - 1] {
        return None;
    }
    let first = partition.knot_breakpoint(i);
    let last = partition.knot_breakpoint(i + m - 1);
    let (_, mu_r) = partition.end_multiplicities(i).expect("row index in range");
    let (mu_l, _) = partition
        .end_multiplicities(i + m - 1)
        .expect("row index in range");
    let mults = partition.multiplicities();
    Some(RowSpec {
        first,
        last,
        left_zeros: m - mu_r,
        right_conditions: m - mu_l,
        continuity: (first + 1..last).map(|j| m - mults[j]).collect(),
        connections: (first + 1..last)
            .map(|j| connections.get(j).and_then(Option::as_ref))
            .collect(),
    })
}

/// Builds row `i` of a single-order space.
pub(crate) fn build_standard_row<T: Scalar>(
    partition: &ExtendedPartition<T>,
    sections: &[Section<T>],
    connections: &[Option<ConnectionMatrix<T>>],
    i: usize,
    tolerance: T,
) -> Result<Row<T>> {
    let dim = partition.dim();
    if i == 0 {
        return Ok(Row::Unit);
    }
    if i == dim {
        return Ok(Row::Zero);
    }
    match standard_row_spec(partition, connections, i) {
        None => Ok(Row::Step(partition.knots()[i])),
        Some(spec) => {
            solve_row(i, sections, partition.breakpoints(), &spec, tolerance).map(Row::Hermite)
        }
    }
}

/// All transition functions of a space, together with the sections they
/// are expressed in.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTable<T> {
    sections: Vec<Section<T>>,
    breakpoints: Vec<T>,
    rows: Vec<Row<T>>,
}

impl<T: Scalar> TransitionTable<T> {
    /// Builds every row of a single-order space.
    pub fn build(
        partition: &ExtendedPartition<T>,
        sections: &[Section<T>],
        connections: &[Option<ConnectionMatrix<T>>],
        tolerance: T,
    ) -> Result<Self> {
        let rows = (0..=partition.dim())
            .map(|i| build_standard_row(partition, sections, connections, i, tolerance))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(sections.to_vec(), partition.breakpoints().to_vec(), rows))
    }

    pub(crate) fn from_rows(sections: Vec<Section<T>>, breakpoints: Vec<T>, rows: Vec<Row<T>>) -> Self {
        Self {
            sections,
            breakpoints,
            rows,
        }
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> Result<&Row<T>> {
        self.rows.get(i).ok_or_else(|| Error::IndexOutOfRange {
            index: i,
            valid: format!("0..={}", self.rows.len().saturating_sub(1)),
        })
    }

    pub fn sections(&self) -> &[Section<T>] {
        &self.sections
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Largest estimated condition number among the solved rows.
    pub fn max_condition(&self) -> T {
        self.rows
            .iter()
            .filter_map(|r| match r {
                Row::Hermite(h) => Some(h.condition),
                _ => None,
            })
            .fold(T::one(), T::max)
    }

    /// `f_i(x)` (right-continuous).
    pub fn eval(&self, i: usize, x: T) -> Result<T> {
        Ok(self.eval_derivative_unchecked(self.row(i)?, 0, x, Side::Right))
    }

    /// `D^r f_i(x)` taken from the given side.
    pub fn eval_derivative(&self, i: usize, r: usize, x: T, side: Side) -> Result<T> {
        Ok(self.eval_derivative_unchecked(self.row(i)?, r, x, side))
    }

    pub(crate) fn eval_derivative_unchecked(&self, row: &Row<T>, r: usize, x: T, side: Side) -> T {
        let constant = |v: bool| {
            if v && r == 0 {
                T::one()
            } else {
                T::zero()
            }
        };
        match row {
            Row::Unit => constant(true),
            Row::Zero => T::zero(),
            Row::Step(at) => constant(x > *at || (x == *at && side == Side::Right)),
            Row::Hermite(h) => {
                if x < h.lo || (x == h.lo && side == Side::Left) {
                    return T::zero();
                }
                if x > h.hi || (x == h.hi && side == Side::Right) {
                    return constant(true);
                }
                // Values imposed by the interpolation conditions are returned
                // exactly rather than through the solved coefficients.
                if x == h.lo && r < h.left_zeros {
                    return T::zero();
                }
                if x == h.hi && r < h.right_conditions {
                    return constant(true);
                }
                let j = self.piece(h, x, side);
                let sec = &self.sections[j];
                h.coefficients[j - h.first]
                    .iter()
                    .enumerate()
                    .map(|(k, &b)| b * sec.generator_unchecked(k, r, x))
                    .sum()
            }
        }
    }

    /// Section index holding `x` for a Hermite row, at break-points chosen by side.
    fn piece(&self, h: &HermiteRow<T>, x: T, side: Side) -> usize {
        let inner = &self.breakpoints[h.first + 1..h.last];
        let k = match side {
            Side::Right => inner.partition_point(|&b| b <= x),
            Side::Left => inner.partition_point(|&b| b < x),
        };
        h.first + k
    }

    /// `∫_{x0}^{x1} f_i` with exact antiderivatives.
    pub fn integral(&self, i: usize, x0: T, x1: T) -> Result<T> {
        let row = self.row(i)?;
        Ok(self.integral_unchecked(row, x0, x1))
    }

    pub(crate) fn integral_unchecked(&self, row: &Row<T>, x0: T, x1: T) -> T {
        if x1 < x0 {
            return -self.integral_unchecked(row, x1, x0);
        }
        match row {
            Row::Unit => x1 - x0,
            Row::Zero => T::zero(),
            Row::Step(at) => (x1 - x0.max(*at)).max(T::zero()),
            Row::Hermite(h) => {
                let mut total = (x1 - x0.max(h.hi)).max(T::zero());
                for j in h.first..h.last {
                    let (lo, hi) = (self.breakpoints[j], self.breakpoints[j + 1]);
                    let (a, b) = (x0.max(lo), x1.min(hi));
                    if a < b {
                        let sec = &self.sections[j];
                        total += h.coefficients[j - h.first]
                            .iter()
                            .enumerate()
                            .map(|(k, &c)| c * sec.integral_unchecked(k, a, b))
                            .sum::<T>();
                    }
                }
                total
            }
        }
    }

    /// CSV dump, one line per row:
    /// `row,kind,first,last,condition,residual,coefficients...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,kind,first,last,condition,residual,coefficients\n");
        for (i, row) in self.rows.iter().enumerate() {
            match row {
                Row::Unit => writeln!(out, "{i},unit,,,,,").unwrap(),
                Row::Zero => writeln!(out, "{i},zero,,,,,").unwrap(),
                Row::Step(at) => writeln!(out, "{i},step,,,,,{:.16e}", at.to_f64_lossy()).unwrap(),
                Row::Hermite(h) => {
                    write!(
                        out,
                        "{i},hermite,{},{},{:.6e},{:.3e}",
                        h.first,
                        h.last,
                        h.condition.to_f64_lossy(),
                        h.residual.to_f64_lossy()
                    )
                    .unwrap();
                    for c in h.coefficients.iter().flatten() {
                        write!(out, ",{:.16e}", c.to_f64_lossy()).unwrap();
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

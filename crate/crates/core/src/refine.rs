//! Knot insertion, Bézier extraction, order elevation, knot removal and
//! periodic to clamped conversion.

use std::sync::Arc;

use crate::basis::{Basis, Spline, SplineSpace};
use crate::error::{Error, Result};
use crate::extensions::{detect_vanishing_order, ConnectionMatrix, RowEnd, VANISHING_THRESHOLD};
use crate::linalg::{least_squares, Matrix};
use crate::partition::ExtendedPartition;
use crate::scalar::Scalar;
use crate::section::{Family, Section, SplitStrategy};
use crate::transition::{build_standard_row, Row, Side, TransitionTable};

/// Which end of the affected transition functions the insertion
/// coefficients are read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaFormula {
    /// Right derivatives at `t_i`.
    #[default]
    Start,
    /// Left derivatives at `t_{i+m-1}`.
    End,
}

/// Result of inserting one knot into a space.
#[derive(Debug, Clone)]
pub struct RefinementStep<T> {
    /// Inserted knot.
    pub at: T,
    /// Knot interval `ℓ` of the original partition holding `at`.
    pub interval: usize,
    /// Multiplicity of `at` after insertion.
    pub multiplicity: usize,
    /// `α_i` for every index of the refined space:
    /// `ĉ_i = α_i c_i + (1 - α_i) c_{i-1}`.
    pub alpha: Vec<T>,
    pub space: Arc<SplineSpace<T>>,
}

impl<T: Scalar> RefinementStep<T> {
    /// Indices `ℓ-m+2..=ℓ-r+1` whose coefficients are not trivially 0 or 1.
    pub fn nontrivial(&self) -> std::ops::RangeInclusive<usize> {
        let m = self.space.order();
        let lo = (self.interval + 2).saturating_sub(m);
        let hi = (self.interval + 1).saturating_sub(self.multiplicity);
        lo..=hi
    }

    /// Refined control points of a spline on the original space.
    pub fn refine_coefficients(&self, c: &[Vec<T>]) -> Vec<Vec<T>> {
        self.alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let cur = c.get(i);
                let prev = i.checked_sub(1).and_then(|j| c.get(j));
                match (cur, prev) {
                    (Some(p), Some(q)) => p.iter().zip(q).map(|(&x, &y)| a * x + (T::one() - a) * y).collect(),
                    (Some(p), None) => p.clone(),
                    (None, Some(q)) => q.clone(),
                    (None, None) => unreachable!("refined index beyond both neighbours"),
                }
            })
            .collect()
    }
}

/// Inserts `at` into a space.
pub fn insert_knot_space<T: Scalar>(
    space: &SplineSpace<T>,
    at: T,
    strategy: SplitStrategy,
    formula: AlphaFormula,
) -> Result<RefinementStep<T>> {
    let m = space.order();
    let part = space.partition();
    let knots = part.knots();
    let (a, b) = part.domain();
    if !(at >= a && at <= b) {
        return Err(Error::OutOfDomain {
            x: at.to_f64_lossy(),
            lo: a.to_f64_lossy(),
            hi: b.to_f64_lossy(),
        });
    }
    let l = knots.partition_point(|&t| t <= at) - 1;
    let r = knots.iter().filter(|&&t| t == at).count() + 1;
    if r >= m {
        return Err(Error::MultiplicityOverflow {
            at: at.to_f64_lossy(),
            multiplicity: r,
            order: m,
        });
    }

    let mut bps = part.breakpoints().to_vec();
    let mut mults = part.multiplicities().to_vec();
    let mut secs = space.sections().to_vec();
    let mut conns = space.connections().to_vec();
    let fresh = match part.breakpoint_index(at) {
        Some(j) => {
            mults[j] += 1;
            if let Some(c) = &conns[j] {
                conns[j] = Some(c.shrunk());
            }
            false
        }
        None => {
            let j = part.interval_of(at);
            let (left, right) = secs[j].split(at, strategy)?;
            secs.splice(j..=j, [left, right]);
            bps.insert(j + 1, at);
            mults.insert(j + 1, 1);
            let identity = space.has_connections().then(|| ConnectionMatrix::identity(m - 1));
            conns.insert(j + 1, identity);
            true
        }
    };
    let new_part = ExtendedPartition::from_breakpoints(m, &bps, &mults)?;
    let dim = new_part.dim();
    let tol = space.tolerance();

    // Only rows whose knots straddle the new knot change.
    let old_rows = space.table().rows();
    let first_rebuilt = l + 2 - m;
    let last_rebuilt = l + 1;
    let mut rows = Vec::with_capacity(dim + 1);
    for i in 0..=dim {
        let row = if i < first_rebuilt {
            old_rows[i].clone()
        } else if i <= last_rebuilt {
            build_standard_row(&new_part, &secs, &conns, i, tol)?
        } else {
            let mut row = old_rows[i - 1].clone();
            if let (true, Row::Hermite(h)) = (fresh, &mut row) {
                h.shift_sections(1);
            }
            row
        };
        rows.push(row);
    }
    let new_table = TransitionTable::from_rows(secs, bps, rows);

    let old_table = space.table();
    let mut alpha = vec![T::zero(); dim];
    for (i, al) in alpha.iter_mut().enumerate() {
        *al = if i + m <= l + 1 {
            T::one()
        } else if i + r <= l + 1 {
            insertion_ratio(space, old_table, &new_table, i, formula)?
        } else {
            T::zero()
        };
    }
    let refined = SplineSpace::from_parts(new_part, conns, new_table, tol);
    Ok(RefinementStep {
        at,
        interval: l,
        multiplicity: r,
        alpha,
        space: Arc::new(refined),
    })
}

/// `α_i` from the ratio of the first non-vanishing derivatives of the old
/// and new transition functions.
fn insertion_ratio<T: Scalar>(
    space: &SplineSpace<T>,
    old: &TransitionTable<T>,
    new: &TransitionTable<T>,
    i: usize,
    formula: AlphaFormula,
) -> Result<T> {
    let part = space.partition();
    let m = space.order();
    let knots = part.knots();
    let threshold = T::lit(VANISHING_THRESHOLD);
    match formula {
        AlphaFormula::Start => {
            let x = knots[i];
            let ec = old.sections()[part.knot_breakpoint(i)].family().is_extended_chebyshev();
            let k = if ec {
                part.k_right(i) as usize
            } else {
                detect_vanishing_order(old, i, RowEnd::Start, threshold)?
            };
            let num = old.eval_derivative(i, k + 1, x, Side::Right)?;
            let den = new.eval_derivative(i, k + 1, x, Side::Right)?;
            Ok(num / den)
        }
        AlphaFormula::End => {
            let e = i + m - 1;
            let x = knots[e];
            let ec = old.sections()[part.knot_breakpoint(e) - 1]
                .family()
                .is_extended_chebyshev();
            let k = if ec {
                part.k_left(e) as usize
            } else {
                detect_vanishing_order(old, i, RowEnd::End, threshold)?
            };
            let num = old.eval_derivative(i, k + 1, x, Side::Left)?;
            let den = new.eval_derivative(i + 1, k + 1, x, Side::Left)?;
            // f_i = α f̂_i + (1 - α) f̂_{i+1} and f̂_i ≡ 1 left of t_{i+m-1}
            // to this order, so the ratio is 1 - α.
            Ok(T::one() - num / den)
        }
    }
}

/// Inserts a knot into a spline, reading the coefficients at `t_i`.
pub fn insert_knot<T: Scalar>(
    spline: &Spline<T>,
    at: T,
    strategy: SplitStrategy,
) -> Result<(RefinementStep<T>, Spline<T>)> {
    insert_with(spline, at, strategy, AlphaFormula::Start)
}

/// Inserts a knot into a spline, reading the coefficients at `t_{i+m-1}`.
pub fn insert_knot_right<T: Scalar>(
    spline: &Spline<T>,
    at: T,
    strategy: SplitStrategy,
) -> Result<(RefinementStep<T>, Spline<T>)> {
    insert_with(spline, at, strategy, AlphaFormula::End)
}

fn insert_with<T: Scalar>(
    spline: &Spline<T>,
    at: T,
    strategy: SplitStrategy,
    formula: AlphaFormula,
) -> Result<(RefinementStep<T>, Spline<T>)> {
    let step = insert_knot_space(spline.space(), at, strategy, formula)?;
    let coefficients = step.refine_coefficients(spline.coefficients());
    let refined = Spline::new(step.space.clone(), coefficients)?;
    Ok((step, refined))
}

/// Spline with every interior break-point raised to multiplicity `m - 1`,
/// and its control points split per break-point interval.
#[derive(Debug, Clone)]
pub struct BezierSegments<T> {
    pub spline: Spline<T>,
    /// `segments[j]` holds the `m` control points of interval `j` in the
    /// Bernstein basis of its section.
    pub segments: Vec<Vec<Vec<T>>>,
}

pub fn to_bezier_segments<T: Scalar>(spline: &Spline<T>) -> Result<BezierSegments<T>> {
    let m = spline.space().order();
    if spline.space().is_periodic() {
        return Err(Error::InvalidPartition(
            "convert periodic splines to clamped form before Bézier extraction".into(),
        ));
    }
    let mut s = spline.clone();
    let interior: Vec<T> = {
        let bps = s.space().partition().breakpoints();
        bps[1..bps.len() - 1].to_vec()
    };
    for x in interior {
        loop {
            let part = s.space().partition();
            let j = part.breakpoint_index(x).expect("break-point kept by insertion");
            if part.multiplicities()[j] + 1 >= m {
                break;
            }
            s = insert_knot(&s, x, SplitStrategy::Restrict)?.1;
        }
    }
    let n = s.space().partition().intervals();
    let segments = (0..n)
        .map(|j| s.coefficients()[j * (m - 1)..j * (m - 1) + m].to_vec())
        .collect();
    Ok(BezierSegments { spline: s, segments })
}

/// Coefficients of one elevation step, per segment.
#[derive(Debug, Clone)]
pub struct ElevationStep<T> {
    pub r: usize,
    /// `γ_0..γ_{n+r}` per segment (`n = m - 1`).
    pub gamma: Vec<Vec<T>>,
    /// `δ_0..δ_{n+2}` per segment (empty for `r = 1`).
    pub delta: Vec<Vec<T>>,
    /// Target sections of order `m + r`.
    pub targets: Vec<Section<T>>,
}

/// Containing space of order `m + r` used when the caller supplies none.
pub fn default_elevation_target<T: Scalar>(section: &Section<T>, r: usize) -> Result<Section<T>> {
    let m = section.order();
    let n = m + r;
    let family = *section.family();
    let target = match family {
        Family::Polynomial
        | Family::Hyperbolic { .. }
        | Family::TrigHyperbolic { .. }
        | Family::TrigEnvelope { .. }
        | Family::VariableDegree { .. } => family,
        Family::Trigonometric { theta } => match (m, r) {
            (3, 2) => Family::TrigHyperbolic { theta, phi: theta },
            (4, 2) => Family::TrigEnvelope { theta },
            _ => family,
        },
        Family::RationalTension { .. } | Family::MultiFrequency { .. } => {
            return Err(Error::UnsupportedOrder {
                family: family.name(),
                order: n,
                reason: "no built-in containing space; supply the target sections".into(),
            })
        }
    };
    section.with_family_order(target, n)
}

/// Least-squares residual of the generators of `inner` in `outer`.
fn containment_residual<T: Scalar>(inner: &Section<T>, outer: &Section<T>) -> Result<T> {
    const SAMPLES: usize = 50;
    let (lo, hi) = inner.interval();
    let xs: Vec<T> = (0..SAMPLES)
        .map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / T::from_usize_lossy(SAMPLES - 1))
        .collect();
    let rows: Vec<Vec<T>> = xs
        .iter()
        .map(|&x| (0..outer.order()).map(|h| outer.generator_unchecked(h, 0, x)).collect())
        .collect();
    let rhs: Vec<Vec<T>> = (0..inner.order())
        .map(|h| xs.iter().map(|&x| inner.generator_unchecked(h, 0, x)).collect())
        .collect();
    let scale = rhs
        .iter()
        .flatten()
        .fold(T::one(), |acc, v| acc.max(v.abs()));
    let (_, residual) = least_squares(&Matrix::from_rows(&rows), &rhs).map_err(|_| Error::NotContained {
        residual: f64::INFINITY,
    })?;
    Ok(residual / scale)
}

fn resolve_targets<T: Scalar>(
    space: &SplineSpace<T>,
    r: usize,
    targets: Option<&[Section<T>]>,
) -> Result<Vec<Section<T>>> {
    if !(1..=2).contains(&r) {
        return Err(Error::InvalidParameter(format!(
            "elevation amount must be 1 or 2, got {r}"
        )));
    }
    if space.has_connections() {
        return Err(Error::InvalidConnection {
            breakpoint: 0,
            reason: "order elevation of geometrically continuous spaces is not supported".into(),
        });
    }
    let sections = space.sections();
    let targets = match targets {
        Some(t) => {
            if t.len() != sections.len() {
                return Err(Error::Inconsistent(format!(
                    "{} target sections for {} sections",
                    t.len(),
                    sections.len()
                )));
            }
            t.to_vec()
        }
        None => sections
            .iter()
            .map(|s| default_elevation_target(s, r))
            .collect::<Result<_>>()?,
    };
    for (s, t) in sections.iter().zip(&targets) {
        if t.order() != s.order() + r || t.interval() != s.interval() {
            return Err(Error::Inconsistent(format!(
                "target {t} does not match section {s} elevated by {r}"
            )));
        }
        let residual = containment_residual(s, t)?;
        if residual > T::lit(1e-8) {
            return Err(Error::NotContained {
                residual: residual.to_f64_lossy(),
            });
        }
    }
    Ok(targets)
}

/// Space of order `m + r` with every multiplicity raised by `r`, i.e. the
/// space that order elevation lands in.
pub fn elevated_space<T: Scalar>(
    space: &SplineSpace<T>,
    r: usize,
    targets: Option<&[Section<T>]>,
) -> Result<SplineSpace<T>> {
    let targets = resolve_targets(space, r, targets)?;
    let part = space.partition();
    if !part.is_clamped() {
        return Err(Error::InvalidPartition("order elevation needs a clamped space".into()));
    }
    let mults: Vec<usize> = part.interior_multiplicities().iter().map(|&mu| mu + r).collect();
    let p = ExtendedPartition::clamped(part.breakpoints(), &mults, space.order() + r)?;
    SplineSpace::with_options(p, targets, Vec::new(), space.tolerance())
}

/// `(γ, δ)` relating the Bernstein bases of `source` and `target`.
fn elevation_coefficients<T: Scalar>(source: &Section<T>, target: &Section<T>, r: usize) -> Result<(Vec<T>, Vec<T>)> {
    let g = SplineSpace::bernstein(source.clone())?;
    let gt = SplineSpace::bernstein(target.clone())?;
    let a = source.interval().0;
    let n = source.order() - 1;
    let d = |space: &SplineSpace<T>, i: usize, k: usize| -> Result<T> {
        if i > space.dim() {
            return Ok(T::zero());
        }
        space.transition(i, k, a, Side::Right)
    };
    let gamma: Vec<T> = (0..=n + r)
        .map(|i| Ok(d(&g, i, i)? / d(&gt, i, i)?))
        .collect::<Result<_>>()?;
    if r == 1 {
        return Ok((gamma, Vec::new()));
    }
    let mut delta = vec![T::zero(); n + 3];
    for i in 0..=n + 1 {
        let corr = (d(&g, i, i + 1)? - gamma[i] * d(&gt, i, i + 1)?) / d(&gt, i + 1, i + 1)?;
        let next = if i < n + 2 { gamma.get(i + 1).copied().unwrap_or(T::zero()) } else { T::zero() };
        delta[i + 1] = gamma[i] - next + corr;
    }
    Ok((gamma, delta))
}

/// Elevates the order of a spline by `r ∈ {1, 2}`: Bézier extraction,
/// per-segment elevation, then knot removal back to multiplicities
/// `μ_i + r`.
pub fn elevate_order<T: Scalar>(
    spline: &Spline<T>,
    r: usize,
    targets: Option<&[Section<T>]>,
) -> Result<(ElevationStep<T>, Spline<T>)> {
    let space = spline.space();
    let targets = resolve_targets(space, r, targets)?;
    let original_mults = space.partition().interior_multiplicities().to_vec();
    let bezier = to_bezier_segments(spline)?;
    let m = space.order();

    let mut gammas = Vec::new();
    let mut deltas = Vec::new();
    let mut coefficients: Vec<Vec<T>> = Vec::new();
    for (j, (seg, target)) in bezier.segments.iter().zip(&targets).enumerate() {
        let source = &bezier.spline.space().sections()[j];
        let (gamma, delta) = elevation_coefficients(source, target, r)?;
        let zero = vec![T::zero(); seg[0].len()];
        let at = |i: isize| -> &Vec<T> {
            if i < 0 || i as usize >= seg.len() {
                &zero
            } else {
                &seg[i as usize]
            }
        };
        let elevated: Vec<Vec<T>> = (0..m + r)
            .map(|i| {
                let ii = i as isize;
                let (g, dl) = (gamma[i], if r == 2 { delta[i] } else { T::zero() });
                let rest = T::one() - g - dl;
                (0..seg[0].len())
                    .map(|k| {
                        let mut v = g * at(ii)[k];
                        if r == 1 {
                            v += rest * at(ii - 1)[k];
                        } else {
                            v += dl * at(ii - 1)[k] + rest * at(ii - 2)[k];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let skip = usize::from(j > 0);
        coefficients.extend(elevated.into_iter().skip(skip));
        gammas.push(gamma);
        deltas.push(delta);
    }

    let bps = space.partition().breakpoints().to_vec();
    let n_int = bps.len() - 2;
    let fine = ExtendedPartition::clamped(&bps, &vec![m + r - 1; n_int], m + r)?;
    let fine_space = SplineSpace::with_options(fine, targets.clone(), Vec::new(), space.tolerance())?;
    let mut s = Spline::new(Arc::new(fine_space), coefficients)?;
    let tol = T::lit(1e-9);
    for (k, &mu) in original_mults.iter().enumerate() {
        for _ in mu + r..m + r - 1 {
            s = remove_knot(&s, bps[k + 1], tol)?;
        }
    }
    Ok((
        ElevationStep {
            r,
            gamma: gammas,
            delta: deltas,
            targets,
        },
        s,
    ))
}

/// Removes one copy of the knot `at` if the spline stays representable.
/// The coarse coefficients solve `ĉ_i = α_i c_i + (1 - α_i) c_{i-1}` in
/// the least-squares sense; the removal is accepted when the residual is at
/// most `tolerance` times the largest coefficient magnitude.
pub fn remove_knot<T: Scalar>(spline: &Spline<T>, at: T, tolerance: T) -> Result<Spline<T>> {
    let space = spline.space();
    let part = space.partition();
    let j = part
        .breakpoint_index(at)
        .filter(|&j| j > 0 && j + 1 < part.breakpoints().len() && part.multiplicities()[j] > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{at} is not an interior knot")))?;
    if space.connections()[j].is_some() {
        return Err(Error::InvalidConnection {
            breakpoint: j,
            reason: "cannot remove a knot carrying a connection matrix".into(),
        });
    }
    let mut bps = part.breakpoints().to_vec();
    let mut mults = part.multiplicities().to_vec();
    let mut secs = space.sections().to_vec();
    let mut conns = space.connections().to_vec();
    mults[j] -= 1;
    if mults[j] == 0 && secs[j - 1].same_space(&secs[j]) {
        let merged = secs[j - 1].merged(&secs[j]);
        secs.splice(j - 1..=j, [merged]);
        bps.remove(j);
        mults.remove(j);
        conns.remove(j);
    }
    let coarse_part = ExtendedPartition::from_breakpoints(part.order(), &bps, &mults)?;
    let coarse = SplineSpace::with_options(coarse_part, secs, conns, space.tolerance())?;
    let step = insert_knot_space(&coarse, at, SplitStrategy::Restrict, AlphaFormula::Start)?;

    let n = coarse.dim();
    let mut a = Matrix::zeros(n + 1, n);
    for (i, &al) in step.alpha.iter().enumerate() {
        if i < n {
            a[(i, i)] = al;
        }
        if i > 0 {
            a[(i, i - 1)] = T::one() - al;
        }
    }
    let d = spline.point_dim();
    let rhs: Vec<Vec<T>> = (0..d)
        .map(|k| spline.coefficients().iter().map(|c| c[k]).collect())
        .collect();
    let (sol, residual) = least_squares(&a, &rhs).map_err(|_| Error::RemovalFailed {
        at: at.to_f64_lossy(),
        residual: f64::INFINITY,
        tolerance: tolerance.to_f64_lossy(),
    })?;
    let scale = spline
        .coefficients()
        .iter()
        .flatten()
        .fold(T::one(), |acc, v| acc.max(v.abs()));
    if !(residual <= tolerance * scale) {
        return Err(Error::RemovalFailed {
            at: at.to_f64_lossy(),
            residual: residual.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    let coefficients = (0..n).map(|i| (0..d).map(|k| sol[k][i]).collect()).collect();
    Spline::new(Arc::new(coarse), coefficients)
}

/// Converts a spline on a periodic partition into the equivalent spline on
/// the clamped partition of its domain. Clamped input is returned as is.
pub fn periodic_to_clamped<T: Scalar>(spline: &Spline<T>) -> Result<Spline<T>> {
    if !spline.space().is_periodic() {
        return Ok(spline.clone());
    }
    let m = spline.space().order();
    let (a, b) = spline.space().domain();
    let mult = |s: &Spline<T>, x: T| s.space().knots().iter().filter(|&&t| t == x).count();
    let mut s = spline.clone();
    while mult(&s, a) < m - 1 {
        s = insert_with(&s, a, SplitStrategy::Restrict, AlphaFormula::Start)?.1;
    }
    while mult(&s, b) < m - 1 {
        s = insert_with(&s, b, SplitStrategy::Restrict, AlphaFormula::End)?.1;
    }
    let knots = s.space().knots();
    let first = knots.iter().position(|&t| t == a).unwrap();
    let last = knots.iter().position(|&t| t == b).unwrap();
    // With m - 1 copies of an end knot, exactly one basis function is
    // nonzero there; it starts the clamped representation.
    let coefficients = s.coefficients()[first - 1..last].to_vec();

    let part = s.space().partition();
    let bps = part.breakpoints();
    let ia = part.breakpoint_index(a).unwrap();
    let ib = part.breakpoint_index(b).unwrap();
    let new_bps = bps[ia..=ib].to_vec();
    let interior = part.multiplicities()[ia + 1..ib].to_vec();
    let secs = s.space().sections()[ia..ib].to_vec();
    let p = ExtendedPartition::clamped(&new_bps, &interior, m)?;
    let space = SplineSpace::with_options(p, secs, Vec::new(), s.space().tolerance())?;
    Spline::new(Arc::new(space), coefficients)
}

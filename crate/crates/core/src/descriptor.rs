//! JSON descriptors for sections, spaces, splines and surfaces.
//!
//! Descriptors hold `f64` values and build into any scalar type.

use std::collections::BTreeMap;
use std::ops::Range;
use std::path::Path;
use std::sync::Arc;

use serde::de::{self, DeserializeOwned};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::Value;

use crate::basis::{Basis, Spline, SplineSpace, TensorSurface};
use crate::error::{Error, Result};
use crate::extensions::{ConnectionMatrix, MultiOrderSpace};
use crate::partition::ExtendedPartition;
use crate::scalar::Scalar;
use crate::section::{Family, LocalMap, Section};
use crate::transition::{Side, TransitionTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionDesc {
    pub family: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    /// Defaults to the break-point interval the section sits on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[f64; 2]>,
    /// Defaults to the space order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub local_map: Option<LocalMap>,
    /// Local variable `(x - origin) / scale` when it differs from the map's
    /// default for the interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub scaled: bool,
}

fn param(params: &BTreeMap<String, f64>, names: &[&str], family: &str) -> Result<f64> {
    names
        .iter()
        .find_map(|n| params.get(*n).copied())
        .ok_or_else(|| Error::Descriptor(format!("{family} section needs parameter \"{}\"", names[0])))
}

fn exponent(params: &BTreeMap<String, f64>, names: &[&str]) -> Result<u32> {
    let v = param(params, names, "variable_degree")?;
    if v < 0.0 || v.fract() != 0.0 || v > f64::from(u32::MAX) {
        return Err(Error::Descriptor(format!("exponent {} must be a nonnegative integer", names[0])));
    }
    Ok(v as u32)
}

impl SectionDesc {
    pub fn family<T: Scalar>(&self) -> Result<Family<T>> {
        let p = &self.params;
        let name = self.family.as_str();
        let get = |names: &[&str]| param(p, names, name).map(T::lit);
        Ok(match name {
            "polynomial" => Family::Polynomial,
            "trigonometric" => Family::Trigonometric { theta: get(&["theta"])? },
            "hyperbolic" => Family::Hyperbolic { phi: get(&["phi"])? },
            "trig_hyperbolic" => Family::TrigHyperbolic {
                theta: get(&["theta"])?,
                phi: get(&["phi"])?,
            },
            "trig_envelope" => Family::TrigEnvelope { theta: get(&["theta"])? },
            "rational_tension" => Family::RationalTension {
                nu1: get(&["nu1", "nu"])?,
                nu2: get(&["nu2", "nu"])?,
            },
            "multi_frequency" => Family::MultiFrequency { theta: get(&["theta"])? },
            "variable_degree" => Family::VariableDegree {
                n1: exponent(p, &["n1", "n"])?,
                n2: exponent(p, &["n2", "n"])?,
            },
            other => return Err(Error::Descriptor(format!("unknown section family \"{other}\""))),
        })
    }

    /// Builds the section, filling the interval and order from the space
    /// when the descriptor leaves them out.
    pub fn build<T: Scalar>(&self, interval: Option<(f64, f64)>, order: Option<usize>) -> Result<Section<T>> {
        let family = self.family::<T>()?;
        let [lo, hi] = match (self.interval, interval) {
            (Some(iv), _) => iv,
            (None, Some((a, b))) => [a, b],
            (None, None) => return Err(Error::Descriptor("section needs an interval".into())),
        };
        let order = self
            .order
            .or(order)
            .ok_or_else(|| Error::Descriptor("section needs an order".into()))?;
        let map = self.local_map.unwrap_or(family.default_map());
        let iv = (T::lit(lo), T::lit(hi));
        let section = match self.frame {
            Some([origin, scale]) => Section::with_frame(family, iv, order, map, T::lit(origin), T::lit(scale))?,
            None => Section::with_map(family, iv, order, map)?,
        };
        Ok(if self.scaled { section.with_scaling() } else { section })
    }

    pub fn from_section<T: Scalar>(s: &Section<T>) -> Self {
        let f = |v: T| v.to_f64_lossy();
        let mut params = BTreeMap::new();
        match *s.family() {
            Family::Polynomial => {}
            Family::Trigonometric { theta }
            | Family::TrigEnvelope { theta }
            | Family::MultiFrequency { theta } => {
                params.insert("theta".into(), f(theta));
            }
            Family::Hyperbolic { phi } => {
                params.insert("phi".into(), f(phi));
            }
            Family::TrigHyperbolic { theta, phi } => {
                params.insert("theta".into(), f(theta));
                params.insert("phi".into(), f(phi));
            }
            Family::RationalTension { nu1, nu2 } => {
                params.insert("nu1".into(), f(nu1));
                params.insert("nu2".into(), f(nu2));
            }
            Family::VariableDegree { n1, n2 } => {
                params.insert("n1".into(), f64::from(n1));
                params.insert("n2".into(), f64::from(n2));
            }
        }
        let (lo, hi) = s.interval();
        let (origin, scale) = s.frame();
        let default_scale = match s.local_map() {
            LocalMap::Shift => T::one(),
            LocalMap::Normalized => hi - lo,
        };
        let frame = (origin != lo || scale != default_scale).then(|| [f(origin), f(scale)]);
        Self {
            family: s.family().name().into(),
            params,
            interval: Some([f(lo), f(hi)]),
            order: Some(s.order()),
            local_map: Some(s.local_map()),
            frame,
            scaled: s.is_scaled(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionDesc {
    pub at: f64,
    pub matrix: Vec<Vec<f64>>,
}

/// Sections given either one per interval or as a single template.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SectionsDesc {
    PerInterval(Vec<SectionDesc>),
    Uniform(SectionDesc),
}

impl<'de> Deserialize<'de> for SectionsDesc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        if v.is_array() {
            tracked(v).map(SectionsDesc::PerInterval)
        } else {
            tracked(v).map(SectionsDesc::Uniform)
        }
    }
}

/// Deserializes a buffered value, keeping the path of any error inside it.
fn tracked<T: DeserializeOwned, E: de::Error>(v: Value) -> std::result::Result<T, E> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        if path == "." {
            E::custom(inner)
        } else {
            E::custom(join_path(&path, &inner))
        }
    })
}

/// Prefixes `path` to a message, merging it with a path the message
/// already starts with.
fn join_path(path: &str, message: &str) -> String {
    if let Some((inner, rest)) = message.strip_prefix('`').and_then(|m| m.split_once('`')) {
        let sep = if inner.starts_with('[') { "" } else { "." };
        format!("`{path}{sep}{inner}`{rest}")
    } else {
        format!("`{path}`: {message}")
    }
}

impl SectionsDesc {
    fn build<T: Scalar>(&self, bps: &[f64], order: Option<usize>) -> Result<Vec<Section<T>>> {
        let n = bps.len().saturating_sub(1);
        match self {
            SectionsDesc::Uniform(d) => (0..n).map(|j| d.build((bps[j], bps[j + 1]).into(), order)).collect(),
            SectionsDesc::PerInterval(v) => {
                if v.len() != n {
                    return Err(Error::Descriptor(format!("{} sections for {n} intervals", v.len())));
                }
                v.iter()
                    .enumerate()
                    .map(|(j, d)| d.build(Some((bps[j], bps[j + 1])), order))
                    .collect()
            }
        }
    }
}

/// Fields of the `clamped` and `extended` kinds. For `clamped` the
/// multiplicities are the interior ones and the ends get `m`; for
/// `extended` every break-point, ends included, has one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDesc {
    pub order: usize,
    pub breakpoints: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub sections: SectionsDesc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub connections: Vec<ConnectionDesc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// One period `x_0 < ... < x_P`; `multiplicities` belong to `x_0..x_{P-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicDesc {
    pub order: usize,
    pub breakpoints: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub sections: SectionsDesc,
}

/// Sections carry their own orders; `continuity[i]` is `k` at the `i`-th
/// interior break-point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiOrderDesc {
    pub breakpoints: Vec<f64>,
    pub sections: SectionsDesc,
    pub continuity: Vec<usize>,
}

/// A space, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDesc {
    Clamped(PartitionDesc),
    Periodic(PeriodicDesc),
    Extended(PartitionDesc),
    MultiOrder(MultiOrderDesc),
}

impl<'de> Deserialize<'de> for SpaceDesc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let Value::Object(mut fields) = Value::deserialize(d)? else {
            return Err(de::Error::custom("a space must be a JSON object"));
        };
        let kind = match fields.remove("kind") {
            Some(Value::String(k)) => k,
            Some(_) => return Err(de::Error::custom("`kind` must be a string")),
            None => return Err(de::Error::missing_field("kind")),
        };
        let rest = Value::Object(fields);
        match kind.as_str() {
            "clamped" => tracked(rest).map(SpaceDesc::Clamped),
            "periodic" => tracked(rest).map(SpaceDesc::Periodic),
            "extended" => tracked(rest).map(SpaceDesc::Extended),
            "multi_order" => tracked(rest).map(SpaceDesc::MultiOrder),
            other => Err(de::Error::unknown_variant(
                other,
                &["clamped", "periodic", "extended", "multi_order"],
            )),
        }
    }
}

/// Any space a descriptor can produce.
#[derive(Debug, Clone, PartialEq)]
pub enum AnySpace<T> {
    Single(SplineSpace<T>),
    MultiOrder(MultiOrderSpace<T>),
}

impl<T: Scalar> AnySpace<T> {
    pub fn order(&self) -> Option<usize> {
        match self {
            AnySpace::Single(s) => Some(s.order()),
            AnySpace::MultiOrder(_) => None,
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        match self {
            AnySpace::Single(s) => s.partition().breakpoints(),
            AnySpace::MultiOrder(s) => s.breakpoints(),
        }
    }

    pub fn single(self) -> Result<SplineSpace<T>> {
        match self {
            AnySpace::Single(s) => Ok(s),
            AnySpace::MultiOrder(_) => Err(Error::Descriptor(
                "this operation needs a single-order space".into(),
            )),
        }
    }
}

impl<T: Scalar> Basis<T> for AnySpace<T> {
    fn dim(&self) -> usize {
        match self {
            AnySpace::Single(s) => s.dim(),
            AnySpace::MultiOrder(s) => s.dim(),
        }
    }

    fn domain(&self) -> (T, T) {
        match self {
            AnySpace::Single(s) => s.domain(),
            AnySpace::MultiOrder(s) => s.domain(),
        }
    }

    fn table(&self) -> &TransitionTable<T> {
        match self {
            AnySpace::Single(s) => s.table(),
            AnySpace::MultiOrder(s) => s.table(),
        }
    }

    fn support(&self, i: usize) -> (T, T) {
        match self {
            AnySpace::Single(s) => s.support(i),
            AnySpace::MultiOrder(s) => s.support(i),
        }
    }

    fn active(&self, x: T, side: Side) -> Range<usize> {
        match self {
            AnySpace::Single(s) => s.active(x, side),
            AnySpace::MultiOrder(s) => s.active(x, side),
        }
    }
}

fn connections<T: Scalar>(bps: &[f64], descs: &[ConnectionDesc]) -> Result<Vec<Option<ConnectionMatrix<T>>>> {
    if descs.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![None; bps.len()];
    for d in descs {
        let j = bps
            .iter()
            .position(|&b| b == d.at)
            .ok_or_else(|| Error::Descriptor(format!("connection at {} is not a break-point", d.at)))?;
        let rows: Vec<Vec<T>> = d.matrix.iter().map(|r| r.iter().map(|&v| T::lit(v)).collect()).collect();
        out[j] = Some(ConnectionMatrix::new(&rows).map_err(|e| match e {
            Error::InvalidConnection { reason, .. } => Error::InvalidConnection { breakpoint: j, reason },
            other => other,
        })?);
    }
    Ok(out)
}

fn lits<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::lit(x)).collect()
}

impl SpaceDesc {
    pub fn build<T: Scalar>(&self) -> Result<AnySpace<T>> {
        match self {
            SpaceDesc::Clamped(d) | SpaceDesc::Extended(d) => {
                let bps = lits::<T>(&d.breakpoints);
                let p = if matches!(self, SpaceDesc::Clamped(_)) {
                    ExtendedPartition::clamped(&bps, &d.multiplicities, d.order)?
                } else {
                    ExtendedPartition::from_breakpoints(d.order, &bps, &d.multiplicities)?
                };
                let secs = d.sections.build(&d.breakpoints, Some(d.order))?;
                let tol = d.tolerance.map_or(T::default_residual_tolerance(), T::lit);
                let c = connections(&d.breakpoints, &d.connections)?;
                Ok(AnySpace::Single(SplineSpace::with_options(p, secs, c, tol)?))
            }
            SpaceDesc::Periodic(d) => {
                let secs = d.sections.build(&d.breakpoints, Some(d.order))?;
                Ok(AnySpace::Single(SplineSpace::periodic(
                    d.order,
                    &lits::<T>(&d.breakpoints),
                    &d.multiplicities,
                    secs,
                )?))
            }
            SpaceDesc::MultiOrder(d) => {
                let secs = d.sections.build(&d.breakpoints, None)?;
                Ok(AnySpace::MultiOrder(MultiOrderSpace::new(secs, &d.continuity)?))
            }
        }
    }

    /// Descriptor of a single-order space: `clamped` when the partition is
    /// clamped, `extended` otherwise.
    pub fn from_space<T: Scalar>(space: &SplineSpace<T>) -> Self {
        let part = space.partition();
        let breakpoints: Vec<f64> = part.breakpoints().iter().map(|v| v.to_f64_lossy()).collect();
        let sections = SectionsDesc::PerInterval(space.sections().iter().map(SectionDesc::from_section).collect());
        let connections = space
            .connections()
            .iter()
            .enumerate()
            .filter_map(|(j, c)| {
                c.as_ref().map(|c| ConnectionDesc {
                    at: breakpoints[j],
                    matrix: c
                        .to_rows()
                        .iter()
                        .map(|r| r.iter().map(|v| v.to_f64_lossy()).collect())
                        .collect(),
                })
            })
            .collect();
        let tolerance = (space.tolerance() != T::default_residual_tolerance()).then(|| space.tolerance().to_f64_lossy());
        let clamped = part.is_clamped();
        let d = PartitionDesc {
            order: part.order(),
            breakpoints,
            multiplicities: if clamped {
                part.interior_multiplicities().to_vec()
            } else {
                part.multiplicities().to_vec()
            },
            sections,
            connections,
            tolerance,
        };
        if clamped {
            SpaceDesc::Clamped(d)
        } else {
            SpaceDesc::Extended(d)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplineDesc {
    pub space: SpaceDesc,
    pub coefficients: Vec<Vec<f64>>,
}

impl SplineDesc {
    pub fn build<T: Scalar>(&self) -> Result<Spline<T, AnySpace<T>>> {
        let space = Arc::new(self.space.build::<T>()?);
        Spline::new(space, self.coefficients.iter().map(|c| lits(c)).collect())
    }

    /// Builds a spline on a single-order space, for refinement.
    pub fn build_single<T: Scalar>(&self) -> Result<Spline<T>> {
        let space = Arc::new(self.space.build::<T>()?.single()?);
        Spline::new(space, self.coefficients.iter().map(|c| lits(c)).collect())
    }

    pub fn from_spline<T: Scalar>(s: &Spline<T>) -> Self {
        Self {
            space: SpaceDesc::from_space(s.space()),
            coefficients: s
                .coefficients()
                .iter()
                .map(|c| c.iter().map(|v| v.to_f64_lossy()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceDesc {
    pub u: SpaceDesc,
    pub v: SpaceDesc,
    /// `net[i][j]` multiplies `N_i(u) N_j(v)`.
    pub net: Vec<Vec<Vec<f64>>>,
}

impl SurfaceDesc {
    pub fn build<T: Scalar>(&self) -> Result<TensorSurface<T>> {
        let u = Arc::new(self.u.build::<T>()?.single()?);
        let v = Arc::new(self.v.build::<T>()?.single()?);
        let net = self
            .net
            .iter()
            .map(|row| row.iter().map(|c| lits(c)).collect())
            .collect();
        TensorSurface::new(u, v, net)
    }
}

/// Parses JSON, reporting the field path and, when known, the line of any
/// error.
pub fn from_json<D: for<'de> Deserialize<'de>>(text: &str) -> Result<D> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let mut message = inner.to_string();
        let mut at = String::new();
        if inner.line() > 0 {
            at = format!("line {}, column {}: ", inner.line(), inner.column());
            let suffix = format!(" at line {} column {}", inner.line(), inner.column());
            if let Some(m) = message.strip_suffix(&suffix) {
                message = m.to_string();
            }
        }
        if path != "." {
            message = join_path(&path, &message);
        }
        Error::Descriptor(format!("{at}{message}"))
    })
}

pub fn read_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Descriptor(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text).map_err(|e| match e {
        Error::Descriptor(msg) => Error::Descriptor(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("descriptors serialize")
}

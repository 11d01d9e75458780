use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use chebspline::descriptor::{read_json, to_json, AnySpace, SectionDesc, SpaceDesc, SplineDesc, SurfaceDesc};
use chebspline::refine::{
    elevate_order, elevated_space, insert_knot, insert_knot_right, insert_knot_space, periodic_to_clamped,
    to_bezier_segments, AlphaFormula,
};
use chebspline::{Basis, Family, Section, Side, Spline, SplineSpace, SplitStrategy};

use crate::svg::{Plot, Polyline};
use crate::{CliError, Format, Formula, Io};

type Result<T> = std::result::Result<T, CliError>;

fn sample_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv(header: &[String], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn basis_rows<B: Basis<f64>>(space: &B, r: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let (a, b) = space.domain();
    sample_points(a, b, n)
        .into_iter()
        .map(|x| {
            let mut row = vec![x];
            row.extend(space.all_basis(r, x, Side::Right)?);
            Ok(row)
        })
        .collect()
}

fn basis_output<B: Basis<f64>>(space: &B, r: usize, n: usize, format: Format) -> Result<String> {
    let rows = basis_rows(space, r, n)?;
    Ok(match format {
        Format::Csv => {
            let header: Vec<String> = std::iter::once("x".to_string())
                .chain((1..=space.dim()).map(|i| format!("N_{i}")))
                .collect();
            csv(&header, &rows)
        }
        Format::Svg => {
            let lines = (0..space.dim())
                .map(|i| Polyline::new(rows.iter().map(|row| (row[0], row[i + 1])).collect(), i))
                .collect();
            Plot {
                lines,
                ..Plot::default()
            }
            .render(640.0, 320.0)
        }
    })
}

/// The space of a space descriptor, or of a spline descriptor.
fn read_space(path: &Path) -> Result<AnySpace<f64>> {
    let v: serde_json::Value = read_json(path)?;
    let space = if v.get("space").is_some() {
        read_json::<SplineDesc>(path)?.space
    } else {
        read_json::<SpaceDesc>(path)?
    };
    Ok(space.build()?)
}

pub fn basis(io: &Io, r: usize, transitions: Option<&Path>) -> Result<()> {
    let space = read_space(&io.input)?;
    let n = io.samples as usize;
    emit(io.output.as_deref(), &basis_output(&space, r, n, io.format)?)?;
    if let Some(path) = transitions {
        let (a, b) = space.domain();
        let rows = sample_points(a, b, n)
            .into_iter()
            .map(|x| {
                let mut row = vec![x];
                for i in 0..space.dim() {
                    row.push(space.transition(i, r, x, Side::Right)?);
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        let header: Vec<String> = std::iter::once("x".to_string())
            .chain((1..=space.dim()).map(|i| format!("f_{i}")))
            .collect();
        emit(Some(path), &csv(&header, &rows))?;
    }
    Ok(())
}

fn curve_samples<S: Basis<f64>>(s: &Spline<f64, S>, r: usize, n: usize) -> Result<Vec<Vec<f64>>> {
    let (a, b) = s.space().domain();
    sample_points(a, b, n)
        .into_iter()
        .map(|x| {
            let mut row = vec![x];
            row.extend(s.derivative(r, x, Side::Right)?);
            Ok(row)
        })
        .collect()
}

/// Teeth of a curvature comb: from each sample `p` to `p - scale κ n`.
fn comb<S: Basis<f64>>(s: &Spline<f64, S>, n: usize, scale: f64) -> Result<Vec<Polyline>> {
    let (a, b) = s.space().domain();
    let mut raw = Vec::new();
    for x in sample_points(a, b, n) {
        let p = s.eval(x)?;
        let d1 = s.derivative(1, x, Side::Right)?;
        let d2 = s.derivative(2, x, Side::Right)?;
        let speed = d1[0].hypot(d1[1]);
        if speed == 0.0 {
            continue;
        }
        let kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / speed.powi(3);
        let normal = (-d1[1] / speed, d1[0] / speed);
        raw.push(((p[0], p[1]), kappa, normal));
    }
    let kmax = raw.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let (x0, x1, y0, y1) = raw.iter().fold((f64::MAX, f64::MIN, f64::MAX, f64::MIN), |acc, r| {
        (acc.0.min(r.0 .0), acc.1.max(r.0 .0), acc.2.min(r.0 .1), acc.3.max(r.0 .1))
    });
    let size = (x1 - x0).hypot(y1 - y0);
    let k = if kmax > 0.0 { scale * size / kmax } else { 0.0 };
    let tips: Vec<(f64, f64)> = raw
        .iter()
        .map(|&((px, py), kappa, (nx, ny))| (px - k * kappa * nx, py - k * kappa * ny))
        .collect();
    let mut lines: Vec<Polyline> = raw
        .iter()
        .zip(&tips)
        .map(|(r, &t)| Polyline::styled(vec![r.0, t], "#999999", 0.5, false))
        .collect();
    lines.push(Polyline::styled(tips, "#999999", 0.8, false));
    Ok(lines)
}

pub fn eval(io: &Io, r: usize, comb_scale: Option<f64>) -> Result<()> {
    let spline = read_json::<SplineDesc>(&io.input)?.build::<f64>()?;
    let n = io.samples as usize;
    let rows = curve_samples(&spline, r, n)?;
    let d = spline.point_dim();
    let text = match io.format {
        Format::Csv => {
            let header: Vec<String> = std::iter::once("t".to_string())
                .chain((1..=d).map(|k| format!("p{k}")))
                .collect();
            csv(&header, &rows)
        }
        Format::Svg => {
            let mut plot = Plot::default();
            if d >= 2 {
                plot.equal_aspect = true;
                let poly: Vec<(f64, f64)> = spline.coefficients().iter().map(|c| (c[0], c[1])).collect();
                plot.lines.push(Polyline::styled(poly.clone(), "#555555", 0.8, true));
                plot.dots = poly;
                if let Some(scale) = comb_scale.filter(|_| r == 0) {
                    plot.lines.extend(comb(&spline, n.min(400), scale)?);
                }
                plot.lines
                    .push(Polyline::new(rows.iter().map(|row| (row[1], row[2])).collect(), 0));
            } else {
                plot.lines
                    .push(Polyline::new(rows.iter().map(|row| (row[0], row[1])).collect(), 0));
            }
            plot.render(600.0, 600.0)
        }
    };
    emit(io.output.as_deref(), &text)
}

/// Largest componentwise difference of two splines over `n` samples.
fn deviation(p: &Spline<f64>, q: &Spline<f64>, n: usize) -> Result<f64> {
    let (a, b) = p.space().domain();
    let mut worst = 0.0f64;
    for x in sample_points(a, b, n) {
        let (u, v) = (p.eval(x)?, q.eval(x)?);
        for (s, t) in u.iter().zip(&v) {
            worst = worst.max((s - t).abs());
        }
    }
    Ok(worst)
}

fn write_spline(io: &Io, s: &Spline<f64>) -> Result<()> {
    emit(io.output.as_deref(), &(to_json(&SplineDesc::from_spline(s)) + "\n"))
}

fn report(what: &str, before: &Spline<f64>, after: &Spline<f64>, n: usize) -> Result<()> {
    let dev = deviation(before, after, n)?;
    eprintln!(
        "{what}: dimension {} -> {}, max deviation {dev:.3e} over {n} samples",
        before.space().dim(),
        after.space().dim()
    );
    Ok(())
}

pub fn insert(io: &Io, at: &[f64], midpoints: bool, strategy: SplitStrategy, formula: Formula) -> Result<()> {
    let spline = read_json::<SplineDesc>(&io.input)?.build_single::<f64>()?;
    let mut knots = at.to_vec();
    if midpoints {
        let (a, b) = spline.space().domain();
        let bps = spline.space().partition().breakpoints();
        knots.extend(
            bps.windows(2)
                .filter(|w| w[0] >= a && w[1] <= b)
                .map(|w| 0.5 * (w[0] + w[1])),
        );
    }
    if knots.is_empty() {
        return Err(CliError::Usage("give --at or --midpoints".into()));
    }
    let mut s = spline.clone();
    for &t in &knots {
        s = match formula {
            Formula::Start => insert_knot(&s, t, strategy)?.1,
            Formula::End => insert_knot_right(&s, t, strategy)?.1,
        };
    }
    report("insert", &spline, &s, io.samples as usize)?;
    write_spline(io, &s)
}

pub fn elevate(io: &Io, r: usize, targets: Option<&Path>) -> Result<()> {
    let spline = read_json::<SplineDesc>(&io.input)?.build_single::<f64>()?;
    let targets = match targets {
        Some(p) => {
            let descs: Vec<SectionDesc> = read_json(p)?;
            let bps = spline.space().partition().breakpoints();
            if descs.len() + 1 != bps.len() {
                return Err(CliError::Usage(format!(
                    "{} target sections for {} intervals",
                    descs.len(),
                    bps.len() - 1
                )));
            }
            let order = spline.space().order() + r;
            Some(
                descs
                    .iter()
                    .enumerate()
                    .map(|(j, d)| d.build::<f64>(Some((bps[j], bps[j + 1])), Some(order)))
                    .collect::<chebspline::Result<Vec<Section<f64>>>>()?,
            )
        }
        None => None,
    };
    let (_, e) = elevate_order(&spline, r, targets.as_deref())?;
    report("elevate", &spline, &e, io.samples as usize)?;
    write_spline(io, &e)
}

pub fn bezier(io: &Io) -> Result<()> {
    let spline = read_json::<SplineDesc>(&io.input)?.build_single::<f64>()?;
    let bz = to_bezier_segments(&spline)?;
    let text = match io.format {
        Format::Csv => {
            let mut out = String::from("segment,lo,hi,index");
            for k in 1..=spline.point_dim() {
                let _ = write!(out, ",p{k}");
            }
            out.push('\n');
            for (j, (pts, sec)) in bz.segments.iter().zip(bz.spline.space().sections()).enumerate() {
                let (lo, hi) = sec.interval();
                for (i, p) in pts.iter().enumerate() {
                    let _ = write!(out, "{j},{lo:.16e},{hi:.16e},{i}");
                    for v in p {
                        let _ = write!(out, ",{v:.16e}");
                    }
                    out.push('\n');
                }
            }
            out
        }
        Format::Svg => {
            if spline.point_dim() < 2 {
                return Err(CliError::Usage("SVG Bézier plots need planar control points".into()));
            }
            let mut plot = Plot {
                equal_aspect: true,
                ..Plot::default()
            };
            for pts in &bz.segments {
                let poly: Vec<(f64, f64)> = pts.iter().map(|c| (c[0], c[1])).collect();
                plot.dots.extend(&poly);
                plot.lines.push(Polyline::styled(poly, "#555555", 0.8, true));
            }
            let rows = curve_samples(&spline, 0, io.samples as usize)?;
            plot.lines
                .push(Polyline::new(rows.iter().map(|row| (row[1], row[2])).collect(), 0));
            plot.render(600.0, 600.0)
        }
    };
    eprintln!("bezier: {} segments", bz.segments.len());
    emit(io.output.as_deref(), &text)
}

pub fn clamp(io: &Io) -> Result<()> {
    let spline = read_json::<SplineDesc>(&io.input)?.build_single::<f64>()?;
    let c = periodic_to_clamped(&spline)?;
    report("clamp", &spline, &c, io.samples as usize)?;
    write_spline(io, &c)
}

pub fn surface(io: &Io) -> Result<()> {
    let surf = read_json::<SurfaceDesc>(&io.input)?.build::<f64>()?;
    let n = io.samples as usize;
    let (u0, u1) = surf.u_space().domain();
    let (v0, v1) = surf.v_space().domain();
    let d = surf.net()[0][0].len();
    let mut rows = Vec::with_capacity(n * n);
    for u in sample_points(u0, u1, n) {
        for v in sample_points(v0, v1, n) {
            let mut row = vec![u, v];
            row.extend(surf.eval(u, v)?);
            rows.push(row);
        }
    }
    let text = match io.format {
        Format::Csv => {
            let header: Vec<String> = ["u", "v"]
                .iter()
                .map(|s| s.to_string())
                .chain((1..=d).map(|k| format!("p{k}")))
                .collect();
            csv(&header, &rows)
        }
        Format::Svg => {
            // Wireframe in an oblique projection.
            let project = |p: &[f64]| {
                let z = p.get(2).copied().unwrap_or(0.0);
                (p[0] + 0.5 * p[1], z + 0.3 * p[1])
            };
            let mut plot = Plot {
                equal_aspect: true,
                ..Plot::default()
            };
            for i in 0..n {
                plot.lines.push(Polyline::styled(
                    (0..n).map(|j| project(&rows[i * n + j][2..])).collect(),
                    "#1f77b4",
                    0.6,
                    false,
                ));
                plot.lines.push(Polyline::styled(
                    (0..n).map(|j| project(&rows[j * n + i][2..])).collect(),
                    "#1f77b4",
                    0.6,
                    false,
                ));
            }
            plot.render(600.0, 600.0)
        }
    };
    emit(io.output.as_deref(), &text)
}

/// `max_i |D^r N_i(x+) - D^r N_i(x-)|`.
fn max_jump(space: &SplineSpace<f64>, r: usize, x: f64) -> Result<f64> {
    let left = space.all_basis(r, x, Side::Left)?;
    let right = space.all_basis(r, x, Side::Right)?;
    Ok(left.iter().zip(&right).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
}

pub fn kref_demo(dir: &Path, n: usize, format: Format) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let section = Section::new(Family::Trigonometric { theta: 2.0 }, (0.0, 1.0), 3)?;
    let base = SplineSpace::bernstein(section)?;
    let mid = 0.5;
    let insert = |s: &SplineSpace<f64>| -> Result<Arc<SplineSpace<f64>>> {
        Ok(insert_knot_space(s, mid, SplitStrategy::Restrict, AlphaFormula::Start)?.space)
    };
    let hp_inserted = insert(&base)?;
    let hp = elevated_space(&hp_inserted, 1, None)?;
    let k_elevated = elevated_space(&base, 1, None)?;
    let k = insert(&k_elevated)?;
    let ext = match format {
        Format::Csv => "csv",
        Format::Svg => "svg",
    };
    let panels: [(&str, &SplineSpace<f64>); 5] = [
        ("base", &base),
        ("hp_inserted", &hp_inserted),
        ("hp_elevated", &hp),
        ("k_elevated", &k_elevated),
        ("k_inserted", &k),
    ];
    for (name, space) in panels {
        let path = dir.join(format!("{name}.{ext}"));
        emit(Some(&path), &basis_output(space, 0, n, format)?)?;
    }
    for (name, space) in [("h-p", &hp), ("k", k.as_ref())] {
        println!(
            "{name}: {} functions of order {}, max jump at {mid}: D1 {:.3e}, D2 {:.3e}",
            space.dim(),
            space.order(),
            max_jump(space, 1, mid)?,
            max_jump(space, 2, mid)?
        );
    }
    Ok(())
}


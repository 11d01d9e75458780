//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use chebspline::closedform::{eval_closed_n4, ClosedFormCase};
use chebspline::descriptor::{read_json, AnySpace, SpaceDesc, SplineDesc};
use chebspline::extensions::{QecProfile, VANISHING_THRESHOLD};
use chebspline::linalg::{least_squares, Matrix};
use chebspline::refine::{elevate_order, insert_knot, insert_knot_right, to_bezier_segments};
use chebspline::{
    Basis, ConnectionMatrix, ExtendedPartition, Family, LocalMap, Row, Section, Side, Spline, SplineSpace,
    SplitStrategy,
};
use common::*;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SAMPLES: usize = 1000;

fn figures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figures")
}

fn load_space(name: &str) -> AnySpace<f64> {
    let path = figures().join(name);
    if name.ends_with("_spline.json") {
        let d: SplineDesc = read_json(&path).unwrap();
        d.space.build().unwrap()
    } else {
        let d: SpaceDesc = read_json(&path).unwrap();
        d.build().unwrap()
    }
}

fn load_spline(name: &str) -> Spline<f64> {
    let d: SplineDesc = read_json(&figures().join(name)).unwrap();
    d.build_single().unwrap()
}

/// Every committed descriptor with a space in it.
const SPACE_FILES: [&str; 15] = [
    "ex01_three_sections_theta2_phi4_space.json",
    "ex01_three_sections_theta10_phi15_space.json",
    "fig01_mixed_order6_space.json",
    "fig04_kref_base_space.json",
    "fig05_trig_to_envelope_spline.json",
    "fig05_trig_to_trig_hyperbolic_spline.json",
    "fig06_periodic_rational_spline.json",
    "fig07_gc_beta-7_spline.json",
    "fig07_gc_beta0_spline.json",
    "fig07_gc_beta14_spline.json",
    "fig08_zero_multiplicity_spline.json",
    "fig09_multi_order_spline.json",
    "fig10_qec_n5_spline.json",
    "fig10_qec_n10_spline.json",
    "fig10_qec_n50_spline.json",
];

fn unity_and_min<B: Basis<f64>>(space: &B, n: usize) -> (f64, f64) {
    let (a, b) = space.domain();
    let mut worst = 0.0f64;
    let mut min = f64::INFINITY;
    for x in samples(a, b, n) {
        let v = space.all_basis(0, x, Side::Right).unwrap();
        worst = worst.max((v.iter().sum::<f64>() - 1.0).abs());
        min = v.iter().copied().fold(min, f64::min);
    }
    (worst, min)
}

fn max_gap<S: Basis<f64>, U: Basis<f64>>(p: &Spline<f64, S>, q: &Spline<f64, U>, n: usize) -> f64 {
    let (a, b) = p.space().domain();
    samples(a, b, n)
        .map(|x| {
            let (u, v) = (p.eval(x).unwrap(), q.eval(x).unwrap());
            u.iter().zip(&v).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn partition_of_unity() -> Outcome {
    let mut worst = (0.0f64, "");
    let mut slowest = (0.0f64, "");
    for name in [
        "fig01_mixed_order6_space.json",
        "fig04_kref_base_space.json",
        "fig05_trig_to_envelope_spline.json",
        "fig05_trig_to_trig_hyperbolic_spline.json",
        "fig06_periodic_rational_spline.json",
        "fig07_gc_beta-7_spline.json",
        "fig07_gc_beta0_spline.json",
        "fig07_gc_beta14_spline.json",
        "fig08_zero_multiplicity_spline.json",
        "fig09_multi_order_spline.json",
    ] {
        let start = Instant::now();
        let space = load_space(name);
        let (err, _) = unity_and_min(&space, SAMPLES);
        let secs = start.elapsed().as_secs_f64();
        if err > worst.0 {
            worst = (err, name);
        }
        if secs > slowest.0 {
            slowest = (secs, name);
        }
    }
    let msg = format!(
        "max |Σ N - 1| {:.2e} ({}), slowest build+sample {:.3}s ({})",
        worst.0, worst.1, slowest.0, slowest.1
    );
    if worst.0 <= 1e-10 && slowest.0 <= 1.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn polynomial_oracle() -> Outcome {
    let mut rng = rng(101);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(1..=6);
        let bps = random_breakpoints(&mut rng, n, 4.0, 0.02);
        let mults: Vec<usize> = (0..n).map(|_| rng.gen_range(1..m)).collect();
        let space = poly_space(&bps, &mults, m);
        let knots = space.knots().to_vec();
        for x in samples(0.0, 4.0, 400) {
            let vals = space.all_basis(0, x, Side::Right).unwrap();
            for (i, v) in vals.iter().enumerate() {
                worst = worst.max((v - cox_de_boor(&knots, i, m, x)).abs());
            }
        }
    }
    let msg = format!("50 knot vectors, orders 2-6, max error {worst:.2e}");
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn closed_form() -> Outcome {
    let mut rng = rng(102);
    let mut worst = [0.0f64; 3];
    for (case, w) in worst.iter_mut().enumerate() {
        for _ in 0..20 {
            let c = match case {
                0 => ClosedFormCase::Trigonometric { theta: rng.gen_range(0.05..3.1) },
                1 => ClosedFormCase::Hyperbolic { phi: rng.gen_range(0.05..5.0) },
                _ => ClosedFormCase::RationalTension { nu: rng.gen_range(3.0..30.0) },
            };
            let n = rng.gen_range(4..=8);
            let bps = random_breakpoints(&mut rng, n, 5.0, 0.05);
            let p = ExtendedPartition::clamped(&bps, &vec![1; n], 4).unwrap();
            let secs = bps
                .windows(2)
                .map(|w| Section::with_map(c.family(), (w[0], w[1]), 4, LocalMap::Normalized).unwrap())
                .collect();
            let sp = SplineSpace::new(p, secs).unwrap();
            let knots = sp.knots().to_vec();
            for x in samples(0.0, 5.0, 500).filter(|&x| x < 5.0) {
                for i in 3..=sp.dim() - 4 {
                    let want = eval_closed_n4(&c, &knots, i, x).unwrap();
                    let got = sp.basis(i, 0, x, Side::Right).unwrap();
                    *w = w.max((want - got).abs() / want.abs().max(1.0));
                }
            }
        }
    }
    let msg = format!(
        "relative error trig {:.2e}, hyperbolic {:.2e}, rational {:.2e}",
        worst[0], worst[1], worst[2]
    );
    if worst.iter().all(|&w| w <= 1e-8) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Closed forms of the two middle transition functions of the quadratic
/// space with polynomial, trigonometric and hyperbolic sections on
/// `[0, ¼, ½, 1]`, local variable `x - x_j`.
fn three_section_rows(theta: f64, phi: f64) -> [[f64; 6]; 2] {
    let (h0, h1, h2) = (0.25, 0.25, 0.5);
    let tn = (theta / 2.0 * h1).tan();
    let b33 = 1.0 / (h0 * h0 + 2.0 * h0 / theta * tn);
    let b34 = 1.0 + 1.0 / ((theta * h1).cos() - theta / 2.0 * h0 * (theta * h1).sin() - 1.0);
    let b35 = (1.0 - b34) * (theta * h1).cos();
    let b36 = 1.0 / (theta / 2.0 * h0 + tn);
    let th = (phi / 2.0 * h2).tanh();
    let b41 = 1.0 / (1.0 - (theta * h1).cos() + theta / phi * (theta * h1).sin() * th);
    let b44 = 1.0 + 1.0 / ((phi * h2).cosh() + phi / theta * tn * (phi * h2).sinh() - 1.0);
    let b45 = (1.0 - b44) * (phi * h2).cosh();
    let b46 = 1.0 / (phi / theta * tn + th);
    [[0.0, 0.0, b33, b34, b35, b36], [b41, -b41, 0.0, b44, b45, b46]]
}

fn three_section_coefficients() -> Outcome {
    let mut worst = 0.0f64;
    for (file, theta, phi) in [
        ("ex01_three_sections_theta2_phi4_space.json", 2.0, 4.0),
        ("ex01_three_sections_theta10_phi15_space.json", 10.0, 15.0),
    ] {
        let space = load_space(file).single().unwrap();
        if space.knots() != [0.0, 0.0, 0.0, 0.25, 0.5, 1.0, 1.0, 1.0] {
            return Err(format!("{file}: unexpected knots {:?}", space.knots()));
        }
        let want = three_section_rows(theta, phi);
        for (k, row) in [2, 3].into_iter().enumerate() {
            let Row::Hermite(h) = &space.table().rows()[row] else {
                return Err(format!("{file}: row {row} is not a solved row"));
            };
            let got: Vec<f64> = h.coefficients().iter().flatten().copied().collect();
            if got.len() != 6 {
                return Err(format!("{file}: row {row} has {} coefficients", got.len()));
            }
            for (g, w) in got.iter().zip(&want[k]) {
                worst = worst.max((g - w).abs());
            }
        }
    }
    let msg = format!("theta/phi in {{(2, 4), (10, 15)}}, max coefficient error {worst:.2e}");
    if worst <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn insertion_invariance() -> Outcome {
    let mut rng = rng(103);
    let (mut dev, mut alpha_out, mut formula_gap) = (0.0f64, 0.0f64, 0.0f64);
    let mut inserted = 0;
    let files = [
        "fig05_trig_to_envelope_spline.json",
        "fig05_trig_to_trig_hyperbolic_spline.json",
        "fig06_periodic_rational_spline.json",
        "fig07_gc_beta-7_spline.json",
        "fig07_gc_beta0_spline.json",
        "fig07_gc_beta14_spline.json",
        "fig08_zero_multiplicity_spline.json",
        "fig10_qec_n5_spline.json",
        "fig10_qec_n10_spline.json",
        "fig10_qec_n50_spline.json",
    ];
    for file in files {
        let original = load_spline(file);
        let (a, b) = original.space().domain();
        let mut cur = original.clone();
        for _ in 0..10 {
            let at = rng.gen_range(a..b);
            let (start, next) =
                insert_knot(&cur, at, SplitStrategy::Restrict).map_err(|e| format!("{file} at {at}: {e}"))?;
            let (end, _) = insert_knot_right(&cur, at, SplitStrategy::Restrict)
                .map_err(|e| format!("{file} at {at}: {e}"))?;
            for i in start.nontrivial() {
                let al = start.alpha[i];
                alpha_out = alpha_out.max(-al).max(al - 1.0);
                formula_gap = formula_gap.max((al - end.alpha[i]).abs());
            }
            cur = next;
            inserted += 1;
        }
        dev = dev.max(max_gap(&original, &cur, SAMPLES));
    }
    let msg = format!(
        "{inserted} insertions over {} splines: deviation {dev:.2e}, α outside [0,1] by {:.2e}, \
         start/end formula gap {formula_gap:.2e} (multi-order spline excluded: no insertion there)",
        files.len(),
        alpha_out.max(0.0)
    );
    if dev <= 1e-9 && alpha_out <= 1e-12 && formula_gap <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn order_elevation() -> Outcome {
    let mut rng = rng(104);
    let mut bezier_err = 0.0f64;
    let mut dev = 0.0f64;
    let mut bad_mults = Vec::new();
    let mut check = |s: &Spline<f64>, e: &Spline<f64>, r: usize, dev: &mut f64| {
        *dev = dev.max(max_gap(s, e, SAMPLES));
        let want: Vec<usize> = s.space().partition().interior_multiplicities().iter().map(|m| m + r).collect();
        if e.space().partition().interior_multiplicities() != want.as_slice() || e.space().order() != s.space().order() + r
        {
            bad_mults.push(format!("{want:?} vs {:?}", e.space().partition().interior_multiplicities()));
        }
    };
    for _ in 0..20 {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(0..=3);
        let bps = random_breakpoints(&mut rng, n, 2.0, 0.1);
        let mults: Vec<usize> = (0..n).map(|_| rng.gen_range(1..m)).collect();
        let space = poly_space(&bps, &mults, m);
        let c: Vec<Vec<f64>> = (0..space.dim()).map(|_| vec![rng.gen_range(-1.0..1.0)]).collect();
        let s = Spline::new(space, c).unwrap();
        let (_, e) = elevate_order(&s, 1, None).map_err(|e| e.to_string())?;
        check(&s, &e, 1, &mut dev);
        let before = to_bezier_segments(&s).unwrap().segments;
        let after = to_bezier_segments(&e).unwrap().segments;
        for (p, q) in before.iter().zip(&after) {
            let ctrl: Vec<f64> = p.iter().map(|v| v[0]).collect();
            for (w, g) in bezier_elevate(&ctrl).iter().zip(q) {
                bezier_err = bezier_err.max((w - g[0]).abs());
            }
        }
    }
    for (file, targets) in [
        ("fig05_trig_to_envelope_spline.json", "fig05_envelope_targets.json"),
        ("fig05_trig_to_trig_hyperbolic_spline.json", "fig05_trig_hyperbolic_targets.json"),
    ] {
        let s = load_spline(file);
        let descs: Vec<chebspline::descriptor::SectionDesc> = read_json(&figures().join(targets)).unwrap();
        let secs: Vec<Section<f64>> = descs
            .iter()
            .zip(s.space().sections())
            .map(|(d, sec)| {
                let (lo, hi) = sec.interval();
                d.build(Some((lo, hi)), Some(sec.order() + 2)).unwrap()
            })
            .collect();
        let (_, e) = elevate_order(&s, 2, Some(&secs)).map_err(|e| format!("{file}: {e}"))?;
        check(&s, &e, 2, &mut dev);
    }
    let msg = format!(
        "r=1 polynomial vs Bézier elevation {bezier_err:.2e}; curve deviation {dev:.2e} \
         (20 polynomial r=1, 2 trigonometric r=2); multiplicity mismatches {}",
        bad_mults.len()
    );
    if bezier_err <= 1e-12 && dev <= 1e-9 && bad_mults.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg} {bad_mults:?}"))
    }
}

fn max_jump(space: &SplineSpace<f64>, r: usize, x: f64) -> f64 {
    let l = space.all_basis(r, x, Side::Left).unwrap();
    let rr = space.all_basis(r, x, Side::Right).unwrap();
    l.iter().zip(&rr).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn k_refinement() -> Outcome {
    use chebspline::refine::{elevated_space, insert_knot_space, AlphaFormula};
    let base = load_space("fig04_kref_base_space.json").single().unwrap();
    let insert = |s: &SplineSpace<f64>| insert_knot_space(s, 0.5, SplitStrategy::Restrict, AlphaFormula::Start);
    let hp = elevated_space(&insert(&base).map_err(|e| e.to_string())?.space, 1, None).map_err(|e| e.to_string())?;
    let k_el = elevated_space(&base, 1, None).map_err(|e| e.to_string())?;
    let k = insert(&k_el).map_err(|e| e.to_string())?.space;
    let (hp1, hp2) = (max_jump(&hp, 1, 0.5), max_jump(&hp, 2, 0.5));
    let (k1, k2) = (max_jump(&k, 1, 0.5), max_jump(&k, 2, 0.5));
    let msg = format!(
        "h-p: {} functions, D1 jump {hp1:.2e}, D2 jump {hp2:.2e}; k: {} functions, D1 jump {k1:.2e}, D2 jump {k2:.2e}",
        hp.dim(),
        k.dim()
    );
    if hp.dim() == 6 && hp1 < 1e-8 && hp2 > 1e-3 && k.dim() == 5 && k2 < 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn geometric_continuity() -> Outcome {
    let s = load_spline("fig07_gc_beta0_spline.json");
    let mut agree = 0.0f64;
    for r in 1..=2 {
        let l = s.derivative(r, 1.5, Side::Left).unwrap();
        let rr = s.derivative(r, 1.5, Side::Right).unwrap();
        for (a, b) in l.iter().zip(&rr) {
            agree = agree.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
        }
    }
    let mut unity = 0.0f64;
    let mut min = f64::INFINITY;
    for file in ["fig07_gc_beta-7_spline.json", "fig07_gc_beta14_spline.json"] {
        let (u, lo) = unity_and_min(&load_space(file), SAMPLES);
        unity = unity.max(u);
        min = min.min(lo);
    }
    let sp = s.space();
    let identity: Vec<Option<ConnectionMatrix<f64>>> = sp
        .partition()
        .multiplicities()
        .iter()
        .enumerate()
        .map(|(j, &mu)| (j > 0 && j + 1 < sp.partition().breakpoints().len()).then(|| ConnectionMatrix::identity(sp.order() - mu)))
        .collect();
    let gc = SplineSpace::with_options(sp.partition().clone(), sp.sections().to_vec(), identity, sp.tolerance())
        .map_err(|e| e.to_string())?;
    let plain = SplineSpace::with_options(sp.partition().clone(), sp.sections().to_vec(), Vec::new(), sp.tolerance())
        .map_err(|e| e.to_string())?;
    let same = gc.table().rows() == plain.table().rows();
    let msg = format!(
        "β=0 one-sided D1/D2 gap at 3/2 {agree:.2e}; β∈{{-7,14}} unity {unity:.2e}, min N {min:.2e}; \
         identity matrices reproduce parametric rows: {same}"
    );
    if agree <= 1e-8 && unity <= 1e-10 && min >= -1e-12 && same {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Largest relative one-sided jump of `D^r N_i` at `x` over all `i`.
fn basis_jump<B: Basis<f64>>(space: &B, r: usize, x: f64) -> f64 {
    let l = space.all_basis(r, x, Side::Left).unwrap();
    let rr = space.all_basis(r, x, Side::Right).unwrap();
    l.iter()
        .zip(&rr)
        .map(|(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(1.0))
        .fold(0.0, f64::max)
}

fn zero_multiplicity() -> Outcome {
    let space = load_space("fig08_zero_multiplicity_spline.json").single().unwrap();
    let part = space.partition();
    let bps = part.breakpoints();
    let mut worst = 0.0f64;
    let mut report = Vec::new();
    for (j, &mu) in part.interior_multiplicities().iter().enumerate() {
        let x = bps[j + 1];
        let through = space.order() - mu - 1;
        let jump = (0..=through).map(|r| basis_jump(&space, r, x)).fold(0.0, f64::max);
        worst = worst.max(jump);
        let next = basis_jump(&space, through + 1, x);
        report.push(format!("x={x} μ={mu}: C{through} gap {jump:.1e}, D{} jump {next:.1e}", through + 1));
    }
    let msg = format!("dimension {}; {}", space.dim(), report.join("; "));
    if space.dim() == 6 && worst <= 1e-8 && part.interior_multiplicities().contains(&0) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn multi_order() -> Outcome {
    let d: SplineDesc = read_json(&figures().join("fig09_multi_order_spline.json")).unwrap();
    let s = d.build::<f64>().unwrap();
    let AnySpace::MultiOrder(sp) = s.space().as_ref() else {
        return Err("descriptor is not a multi-order space".into());
    };
    let dim_ok = sp.dim() == sp.start_knots().len() && sp.dim() == sp.end_knots().len();
    let xs: Vec<f64> = samples(0.0, 5.0, SAMPLES).collect();
    let rows: Vec<Vec<f64>> = xs.iter().map(|&x| sp.all_basis(0, x, Side::Right).unwrap()).collect();
    let rhs: Vec<Vec<f64>> = (0..2).map(|k| xs.iter().map(|&x| multi_order_curve(x)[k]).collect()).collect();
    let (_, residual) = least_squares(&Matrix::from_rows(&rows), &rhs).map_err(|_| "singular fit".to_string())?;
    let committed = xs
        .iter()
        .map(|&x| {
            let p = s.eval(x).unwrap();
            let q = multi_order_curve(x);
            (p[0] - q[0]).abs().max((p[1] - q[1]).abs())
        })
        .fold(0.0, f64::max);
    let msg = format!(
        "dimension {} = |start knots| {}; fit residual {residual:.2e}; committed spline deviation {committed:.2e}",
        sp.dim(),
        sp.start_knots().len()
    );
    if dim_ok && residual <= 1e-9 && committed <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Vanishing order expected at a row end from the generators alone.
/// In a variable-degree section of order `m`, once `m - 1` conditions fix
/// every generator except the power that is flat at that end, the row is a
/// multiple of that power and vanishes through order `n - 1`.
fn predicted_order(section: &Section<f64>, bound: isize, at_start: bool) -> isize {
    match *section.family() {
        Family::VariableDegree { n1, n2 } if bound + 1 >= section.order() as isize - 1 => {
            let n = if at_start { n2 } else { n1 };
            bound.max(n as isize - 1)
        }
        _ => bound,
    }
}

fn quasi_extended() -> Outcome {
    let mut unity = 0.0f64;
    let mut mismatches = Vec::new();
    let mut exceeded = 0;
    for n in [5, 10, 50] {
        let space = load_space(&format!("fig10_qec_n{n}_spline.json")).single().unwrap();
        unity = unity.max(unity_and_min(&space, SAMPLES).0);
        let part = space.partition();
        let m = space.order();
        let prof = QecProfile::detect(space.table(), VANISHING_THRESHOLD).map_err(|e| e.to_string())?;
        for &(i, kr, kl) in &prof.rows {
            let Row::Hermite(h) = &space.table().rows()[i] else { continue };
            let (first, last) = h.span();
            let want_r = predicted_order(&space.sections()[first], part.k_right(i), true);
            let want_l = predicted_order(&space.sections()[last - 1], part.k_left(i + m - 1), false);
            if kr as isize != want_r || kl as isize != want_l {
                mismatches.push(format!("n={n} row {i}: detected ({kr},{kl}) predicted ({want_r},{want_l})"));
            }
            exceeded += usize::from(kr as isize > part.k_right(i)) + usize::from(kl as isize > part.k_left(i + m - 1));
        }
    }
    let msg = format!(
        "n∈{{5,10,50}} unity {unity:.2e}; {exceeded} row ends above the EC bound, {} disagree with the prediction",
        mismatches.len()
    );
    if unity <= 1e-10 && exceeded > 0 && mismatches.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", mismatches.join("; ")))
    }
}

/// `(expected vanishing order, section right of t_i)` of `N_i` at `t_i`.
fn start_order(space: &AnySpace<f64>, i: usize) -> (isize, Section<f64>) {
    match space {
        AnySpace::Single(sp) => {
            let t = sp.knots()[i];
            let j = sp.partition().interval_of(t);
            let sec = sp.sections()[j].clone();
            let bound = sp.partition().k_right(i);
            (predicted_order(&sec, bound, true), sec)
        }
        AnySpace::MultiOrder(sp) => {
            let t = sp.start_knots()[i];
            let j = sp.breakpoints().partition_point(|&b| b <= t).saturating_sub(1).min(sp.sections().len() - 1);
            let sec = sp.sections()[j].clone();
            let mu = sp.start_knots()[i..].iter().take_while(|&&s| s == t).count();
            (sec.order() as isize - mu as isize - 1, sec)
        }
    }
}

fn endpoint_zero_counts() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    for name in SPACE_FILES {
        let space = load_space(name);
        let (a, b) = space.domain();
        for i in 0..space.dim() {
            let (lo, _) = space.support(i);
            if lo < a || lo >= b {
                continue;
            }
            let (k, sec) = start_order(&space, i);
            let piece_end = space.breakpoints().iter().copied().find(|&x| x > lo).unwrap_or(b);
            let scale = |r: usize| {
                (1..32)
                    .map(|s| lo + (piece_end - lo) * s as f64 / 32.0)
                    .map(|y| space.basis(i, r, y, Side::Right).unwrap().abs())
                    .fold(0.0, f64::max)
            };
            for r in 0..=k.max(-1) + 1 {
                let r = r as usize;
                let v = space.basis(i, r, lo, Side::Right).unwrap().abs();
                let sc = scale(r);
                let ok = if (r as isize) <= k { v <= 1e-8 * sc.max(1.0) } else { v > 1e-6 * sc };
                if !ok {
                    failures.push(format!("{name} N_{i} D{r} at {lo}: {v:.2e} (scale {sc:.2e}, {})", sec.family().name()));
                }
            }
            checked += 1;
        }
    }
    let msg = format!(
        "{checked} basis functions over {} spaces, {} violations",
        SPACE_FILES.len(),
        failures.len()
    );
    if failures.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}: {}", failures.join("; ")))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("partition of unity", partition_of_unity),
        ("polynomial oracle", polynomial_oracle),
        ("closed-form oracle", closed_form),
        ("three-section row coefficients", three_section_coefficients),
        ("knot insertion invariance", insertion_invariance),
        ("order elevation", order_elevation),
        ("k-refinement", k_refinement),
        ("geometric continuity", geometric_continuity),
        ("zero multiplicity", zero_multiplicity),
        ("multi-order", multi_order),
        ("quasi extended Chebyshev", quasi_extended),
        ("endpoint zero counts", endpoint_zero_counts),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match std::panic::catch_unwind(check) {
            Ok(Ok(msg)) => println!("PASS {name}: {msg}"),
            Ok(Err(msg)) => {
                failed += 1;
                println!("FAIL {name}: {msg}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

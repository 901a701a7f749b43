//! Figure emission: section SVG with contour families, contour CSV
//! polylines, snake and section CSV exports.  All writers are pure
//! string-builders with fixed-precision formatting, so identical inputs
//! give byte-identical output.

use std::fmt::Write as _;

use crate::error::Result;
use crate::polynomials::{Box2, MultiPoly};
use crate::surface::{cross_section_with_extent, CrossSection, SurfaceSpec};

const SECTION_SAMPLES_PER_ARC: usize = 200;
const CONTOUR_GRID: usize = 300;

/// One contour polyline at a fixed level.
#[derive(Debug, Clone)]
pub struct ContourLine {
    pub level: f64,
    pub points: Vec<(f64, f64)>,
}

/// Marching-squares contours of (x, z) -> f over the window; saddle cells
/// are disambiguated by the cell-center value.
pub fn contour_polylines(
    f: &dyn Fn(f64, f64) -> f64,
    window: &Box2,
    cells: usize,
    level: f64,
) -> Vec<ContourLine> {
    let n = cells.max(2);
    let dx = (window.x_hi - window.x_lo) / n as f64;
    let dz = (window.z_hi - window.z_lo) / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| window.x_lo + i as f64 * dx).collect();
    let zs: Vec<f64> = (0..=n).map(|k| window.z_lo + k as f64 * dz).collect();
    // nodes exactly on the level are perturbed off it so every crossing is
    // interior to an edge and each crossing point joins exactly two segments
    let values: Vec<Vec<f64>> = zs
        .iter()
        .map(|&z| {
            xs.iter()
                .map(|&x| {
                    let v = f(x, z) - level;
                    if v == 0.0 {
                        f64::MIN_POSITIVE
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();

    let interp = |a: f64, fa: f64, b: f64, fb: f64| -> f64 {
        if fa == fb {
            0.5 * (a + b)
        } else {
            a + (b - a) * (fa / (fa - fb))
        }
    };

    let mut segments: Vec<((f64, f64), (f64, f64))> = Vec::new();
    for k in 0..n {
        for i in 0..n {
            let (x0, x1) = (xs[i], xs[i + 1]);
            let (z0, z1) = (zs[k], zs[k + 1]);
            let f00 = values[k][i];
            let f10 = values[k][i + 1];
            let f01 = values[k + 1][i];
            let f11 = values[k + 1][i + 1];
            let code = (usize::from(f00 > 0.0))
                | (usize::from(f10 > 0.0) << 1)
                | (usize::from(f11 > 0.0) << 2)
                | (usize::from(f01 > 0.0) << 3);
            if code == 0 || code == 15 {
                continue;
            }
            // edge crossings: bottom, right, top, left
            let bottom = || (interp(x0, f00, x1, f10), z0);
            let right = || (x1, interp(z0, f10, z1, f11));
            let top = || (interp(x0, f01, x1, f11), z1);
            let left = || (x0, interp(z0, f00, z1, f01));
            match code {
                1 | 14 => segments.push((left(), bottom())),
                2 | 13 => segments.push((bottom(), right())),
                3 | 12 => segments.push((left(), right())),
                4 | 11 => segments.push((right(), top())),
                6 | 9 => segments.push((bottom(), top())),
                7 | 8 => segments.push((left(), top())),
                5 | 10 => {
                    let center = f(0.5 * (x0 + x1), 0.5 * (z0 + z1)) - level;
                    let flip = (code == 5) == (center > 0.0);
                    if flip {
                        segments.push((left(), bottom()));
                        segments.push((right(), top()));
                    } else {
                        segments.push((left(), top()));
                        segments.push((bottom(), right()));
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    chain_segments(segments, level)
}

fn quantize(p: (f64, f64)) -> (i64, i64) {
    ((p.0 * 1e8).round() as i64, (p.1 * 1e8).round() as i64)
}

fn chain_segments(segments: Vec<((f64, f64), (f64, f64))>, level: f64) -> Vec<ContourLine> {
    use std::collections::HashMap;
    // nodes sitting exactly on the level yield zero-length segments
    let segments: Vec<_> = segments
        .into_iter()
        .filter(|seg| quantize(seg.0) != quantize(seg.1))
        .collect();
    let mut adjacency: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, seg) in segments.iter().enumerate() {
        adjacency.entry(quantize(seg.0)).or_default().push(idx);
        adjacency.entry(quantize(seg.1)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut out = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut chain = vec![segments[start].0, segments[start].1];
        // extend forward then backward
        for forward in [true, false] {
            loop {
                let tip = if forward { *chain.last().unwrap() } else { chain[0] };
                let Some(candidates) = adjacency.get(&quantize(tip)) else {
                    break;
                };
                let Some(&next) = candidates.iter().find(|&&c| !used[c]) else {
                    break;
                };
                used[next] = true;
                let (a, b) = segments[next];
                let append = if quantize(a) == quantize(tip) { b } else { a };
                if forward {
                    chain.push(append);
                } else {
                    chain.insert(0, append);
                }
            }
        }
        out.push(ContourLine { level, points: chain });
    }
    out
}

/// Sampled polyline of every section arc, capped at the plot extent.
pub fn section_polylines(cs: &CrossSection) -> Vec<Vec<(f64, f64)>> {
    (0..cs.arcs().len())
        .map(|i| {
            (0..=SECTION_SAMPLES_PER_ARC)
                .map(|s| {
                    let p = cs.point(i, s as f64 / SECTION_SAMPLES_PER_ARC as f64);
                    (p[0], p[2])
                })
                .collect()
        })
        .collect()
}

/// Bounding window of the section (rays capped), padded by 10%.
pub fn section_window(cs: &CrossSection) -> Box2 {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut z_lo = f64::INFINITY;
    let mut z_hi = f64::NEG_INFINITY;
    for line in section_polylines(cs) {
        for (x, z) in line {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            z_lo = z_lo.min(z);
            z_hi = z_hi.max(z);
        }
    }
    let pad_x = 0.1 * (x_hi - x_lo).max(1.0);
    let pad_z = 0.1 * (z_hi - z_lo).max(1.0);
    Box2::new(x_lo - pad_x, x_hi + pad_x, z_lo - pad_z, z_hi + pad_z).expect("nonempty window")
}

/// Section figure: bold traversal plus contour family of p at fixed y,
/// x rightward and z upward, viewport fitted to the section.
pub fn render_section_svg(
    spec: &SurfaceSpec,
    p: &MultiPoly,
    c: f64,
    levels: &[f64],
    plot_radius: f64,
) -> Result<String> {
    let extent = plot_radius.max(c.abs() + 0.5);
    let cs = cross_section_with_extent(spec, c, extent);
    let window = section_window(&cs);

    const SCALE: f64 = 120.0;
    let width = (window.x_hi - window.x_lo) * SCALE;
    let height = (window.z_hi - window.z_lo) * SCALE;
    let map = |x: f64, z: f64| -> (f64, f64) {
        ((x - window.x_lo) * SCALE, (window.z_hi - z) * SCALE)
    };
    let path_of = |points: &[(f64, f64)]| -> String {
        let mut d = String::new();
        for (i, &(x, z)) in points.iter().enumerate() {
            let (px, py) = map(x, z);
            let _ = write!(d, "{}{px:.3} {py:.3}", if i == 0 { "M" } else { " L" });
        }
        d
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    let eval = |x: f64, z: f64| p.eval(&[x, c, z]).unwrap_or(f64::NAN);
    for &level in levels {
        for contour in contour_polylines(&eval, &window, CONTOUR_GRID, level) {
            if contour.points.len() < 2 {
                continue;
            }
            let _ = writeln!(
                svg,
                "  <path d=\"{}\" fill=\"none\" stroke=\"#8aa5c8\" stroke-width=\"1\"/>",
                path_of(&contour.points)
            );
        }
    }
    for line in section_polylines(&cs) {
        let _ = writeln!(
            svg,
            "  <path d=\"{}\" fill=\"none\" stroke=\"black\" stroke-width=\"3.5\"/>",
            path_of(&line)
        );
    }
    for k in 0..spec.l() {
        let (px, py) = map(0.0, k as f64);
        let _ = writeln!(svg, "  <circle cx=\"{px:.3}\" cy=\"{py:.3}\" r=\"4\" fill=\"black\"/>");
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Raw contour polylines as CSV rows (level, polyline_id, x, z).
pub fn render_contours_csv(
    spec: &SurfaceSpec,
    p: &MultiPoly,
    c: f64,
    levels: &[f64],
    plot_radius: f64,
) -> Result<String> {
    let extent = plot_radius.max(c.abs() + 0.5);
    let cs = cross_section_with_extent(spec, c, extent);
    let window = section_window(&cs);
    let eval = |x: f64, z: f64| p.eval(&[x, c, z]).unwrap_or(f64::NAN);
    let mut out = String::from("level,polyline,x,z\n");
    for &level in levels {
        for (id, contour) in contour_polylines(&eval, &window, CONTOUR_GRID, level)
            .iter()
            .enumerate()
        {
            for &(x, z) in &contour.points {
                let _ = writeln!(out, "{level},{id},{x:.12e},{z:.12e}");
            }
        }
    }
    Ok(out)
}

/// Section traversal as CSV rows (arc_id, s, x, z).
pub fn render_section_csv(cs: &CrossSection) -> String {
    let mut out = String::from("arc_id,s,x,z\n");
    for i in 0..cs.arcs().len() {
        for step in 0..=SECTION_SAMPLES_PER_ARC {
            let s = step as f64 / SECTION_SAMPLES_PER_ARC as f64;
            let p = cs.point(i, s);
            let _ = writeln!(out, "{i},{s:.6},{:.12e},{:.12e}", p[0], p[2]);
        }
    }
    out
}

/// The snake curve as CSV rows (z, x, dx_dz).
pub fn render_snake_csv(spec: &SurfaceSpec, samples: usize) -> String {
    let mut out = String::from("z,x,dx_dz\n");
    let top = (spec.l() - 1) as f64;
    for i in 0..=samples {
        let z = top * i as f64 / samples as f64;
        let _ = writeln!(out, "{z:.8},{:.12e},{:.12e}", spec.snake().g(z), spec.snake().g_prime(z));
    }
    out
}

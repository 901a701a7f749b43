//! Fiber intersection counting along cross-sections, transversality
//! determinants on the surface tangent bases, and the conjugate planar
//! vector field seen through the (q, p) chart.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linflow::ambient_field;
use crate::polynomials::{MultiPoly, UniPoly, VAR_X, VAR_Y, VAR_Z};
use crate::surface::{cross_section, equilibria, CrossSection, SectionArc, SurfaceSpec};
use crate::verify::{TamingPair, VerificationReport};

/// Minimum |det| for an intersection to count as transverse.
pub const DEFAULT_DET_TOLERANCE: f64 = 1e-6;

/// Hits closer than this to an equilibrium are flagged separately and not
/// held to the determinant threshold.
pub const NEAR_EQUILIBRIUM_RADIUS: f64 = 1e-6;

const BRIDGE_SCAN_STEPS: usize = 256;
const BISECT_ITERATIONS: usize = 200;

/// One intersection of a fiber {y = c, p = kappa} with the cross-section.
#[derive(Debug, Clone)]
pub struct SectionHit {
    pub arc: usize,
    pub s: f64,
    pub point: [f64; 3],
}

fn dedup_push(hits: &mut Vec<SectionHit>, hit: SectionHit) {
    let same = hits.iter().any(|h| {
        let scale = 1.0 + h.point.iter().map(|v| v.abs()).fold(0.0, f64::max);
        h.point
            .iter()
            .zip(&hit.point)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            <= 1e-8 * scale
    });
    if !same {
        hits.push(hit);
    }
}

/// All intersections of p = kappa with the cross-section traversal.
///
/// Straight arcs are solved exactly by Sturm isolation of the restricted
/// univariate polynomial (rays over their full unbounded extent, via the
/// Cauchy root bound); bridge arcs by a sign-change scan plus bisection.
pub fn section_hits(
    cs: &CrossSection,
    p: &MultiPoly,
    kappa: f64,
) -> Result<Vec<SectionHit>> {
    let c = cs.y_value();
    let mut hits: Vec<SectionHit> = Vec::new();

    for (i, arc) in cs.arcs().iter().enumerate() {
        match arc {
            SectionArc::Line { z, x_from, x_to, .. } => {
                let u = p
                    .substitute(VAR_Y, c)?
                    .substitute(VAR_Z, *z)?
                    .to_univariate(VAR_X)?;
                let shifted = UniPoly::new(
                    u.coeffs()
                        .iter()
                        .enumerate()
                        .map(|(k, &ck)| if k == 0 { ck - kappa } else { ck })
                        .collect(),
                );
                if shifted.degree() == 0 {
                    if shifted.leading_coeff() == 0.0 {
                        return Err(Error::NumericalFailure(
                            "fiber level coincides with a constant arc restriction".into(),
                        ));
                    }
                    continue;
                }
                // unbounded rays: every real root lies within the Cauchy bound
                let cauchy = 1.0
                    + shifted.coeffs()[..shifted.degree()]
                        .iter()
                        .map(|ck| (ck / shifted.leading_coeff()).abs())
                        .fold(0.0, f64::max);
                let is_ray = matches!(
                    arc,
                    SectionArc::Line { kind: crate::surface::LineKind::BottomRay, .. }
                        | SectionArc::Line { kind: crate::surface::LineKind::TopRay, .. }
                );
                let (mut lo, mut hi) = (x_from.min(*x_to), x_from.max(*x_to));
                if is_ray {
                    let outward = if x_from.abs() > x_to.abs() { *x_from } else { *x_to };
                    if outward >= 0.0 {
                        hi = hi.max(cauchy);
                    } else {
                        lo = lo.min(-cauchy);
                    }
                }
                if lo == hi {
                    continue;
                }
                for (a, b) in shifted.isolate_roots(lo, hi, 1e-12)? {
                    let x = 0.5 * (a + b);
                    let span = x_to - x_from;
                    let s = if span == 0.0 { 0.0 } else { (x - x_from) / span };
                    dedup_push(&mut hits, SectionHit { arc: i, s, point: [x, c, *z] });
                }
            }
            SectionArc::Bridge { .. } => {
                let f = |s: f64| -> Result<f64> { Ok(p.eval(&cs.point(i, s))? - kappa) };
                let mut prev = f(0.0)?;
                if prev == 0.0 {
                    dedup_push(&mut hits, SectionHit { arc: i, s: 0.0, point: cs.point(i, 0.0) });
                }
                for step in 1..=BRIDGE_SCAN_STEPS {
                    let s = step as f64 / BRIDGE_SCAN_STEPS as f64;
                    let value = f(s)?;
                    if value == 0.0 {
                        dedup_push(&mut hits, SectionHit { arc: i, s, point: cs.point(i, s) });
                    } else if prev != 0.0 && prev.signum() != value.signum() {
                        let s0 = (step - 1) as f64 / BRIDGE_SCAN_STEPS as f64;
                        let s_root = bisect(&f, s0, s, prev)?;
                        dedup_push(&mut hits, SectionHit {
                            arc: i,
                            s: s_root,
                            point: cs.point(i, s_root),
                        });
                    }
                    prev = value;
                }
            }
        }
    }
    Ok(hits)
}

fn bisect(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64) -> Result<f64> {
    for _ in 0..BISECT_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = f(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v.signum() == f_lo.signum() {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Tangent basis of the surface at a hit, from the piece parametrizations.
fn tangent_basis(cs: &CrossSection, hit: &SectionHit) -> ([f64; 3], [f64; 3]) {
    match cs.arcs()[hit.arc] {
        SectionArc::Line { .. } => ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        SectionArc::Bridge { sigma, .. } => {
            let (dx_dz, _) = cs.velocity(hit.arc, hit.s);
            let [x, y, _] = hit.point;
            let r = (x * x + y * y).sqrt().max(f64::MIN_POSITIVE);
            // d/dy of sigma sqrt(g^2 + y^2) at the hit
            let dy = sigma * y / r;
            ([dx_dz, 0.0, 1.0], [dy, 1.0, 0.0])
        }
    }
}

fn dot3(a: &[f64], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// At-most-one fiber intersections with transverse crossings.
///
/// For every fiber (c, kappa) the intersections with the cross-section are
/// found by bisection on sign changes; the count must be at most one and
/// the 2x2 matrix of (dq, dp) against a tangent basis of the surface must
/// have |det| >= tol at each hit.
pub fn verify_transversality(
    spec: &SurfaceSpec,
    tp: &TamingPair,
    fibers: &[(f64, f64)],
    tol: f64,
) -> Result<VerificationReport> {
    tp.require_q_is_y()?;
    let mut report =
        VerificationReport::new(format!("transversality(l={})", spec.l()), -tol);
    let eq = equilibria(spec);
    let dq: Vec<MultiPoly> = (0..3).map(|v| tp.q.partial(v)).collect::<Result<_>>()?;
    let dp: Vec<MultiPoly> = (0..3).map(|v| tp.p.partial(v)).collect::<Result<_>>()?;

    let mut min_det = f64::INFINITY;
    for &(c, kappa) in fibers {
        let cs = cross_section(spec, c);
        let hits = section_hits(&cs, &tp.p, kappa)?;
        report.add_samples(1);
        report.record(
            format!("fiber (y={c}, p={kappa}): intersection count"),
            hits.len() as f64,
            1.0,
            hits.len() <= 1,
        );
        for hit in &hits {
            let near_equilibrium = eq.iter().any(|e| {
                hit.point
                    .iter()
                    .zip(e)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
                    <= NEAR_EQUILIBRIUM_RADIUS
            });
            let (u, v) = tangent_basis(&cs, hit);
            let dq_at: Vec<f64> = dq.iter().map(|g| g.eval(&hit.point)).collect::<Result<_>>()?;
            let dp_at: Vec<f64> = dp.iter().map(|g| g.eval(&hit.point)).collect::<Result<_>>()?;
            let det = dot3(&dq_at, u) * dot3(&dp_at, v) - dot3(&dq_at, v) * dot3(&dp_at, u);
            if near_equilibrium {
                report.record(
                    format!("fiber (y={c}, p={kappa}): |det| at near-equilibrium hit (flagged)"),
                    det.abs(),
                    tol,
                    true,
                );
            } else {
                min_det = min_det.min(det.abs());
                report.record(
                    format!("fiber (y={c}, p={kappa}): |det| at hit"),
                    det.abs(),
                    tol,
                    det.abs() >= tol,
                );
            }
        }
    }
    if min_det.is_finite() {
        report.worst_residual = -min_det;
    }
    Ok(report.finish())
}

/// Deterministic random fibers (c, kappa) for the sampled suites.
pub fn random_fibers<R: Rng>(rng: &mut R, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-8.0..8.0)))
        .collect()
}

/// The conjugate planar field at a chart point, together with the recovered
/// surface preimage.
#[derive(Debug, Clone)]
pub struct ConjugateSample {
    pub w: [f64; 2],
    pub preimage: [f64; 3],
    pub field: [f64; 2],
}

/// Pushforward of the ambient generator through the (q, p) chart at
/// w = (c, kappa): locates the unique preimage on the section by bisection
/// and returns (grad q . F, grad p . F) there.  `None` when the fiber
/// misses the section, which cannot happen once taming is verified.
pub fn conjugate_field(
    spec: &SurfaceSpec,
    tp: &TamingPair,
    w: [f64; 2],
) -> Result<Option<ConjugateSample>> {
    tp.require_q_is_y()?;
    let cs = cross_section(spec, w[0]);
    let hits = section_hits(&cs, &tp.p, w[1])?;
    let Some(hit) = hits.first() else {
        return Ok(None);
    };
    let f = ambient_field(hit.point);
    let dq = tp.q.eval_gradient(&hit.point)?;
    let dp = tp.p.eval_gradient(&hit.point)?;
    Ok(Some(ConjugateSample {
        w,
        preimage: hit.point,
        field: [dot3(&dq, f), dot3(&dp, f)],
    }))
}

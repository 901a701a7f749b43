//! Injectivity-at-scale of the embedded projection: surface points pushed
//! through the degree embedding and projected onto the two functionals
//! pulled back from (q, p) must separate whenever the ambient points do.

use rand::Rng;

use crate::error::{Error, Result};
use crate::surface::{sample_random_point, SurfaceSpec};
use crate::symspace::{delta_embed, functional_from_polynomial, pairing, PolySpaceBasis};
use crate::verify::{TamingPair, VerificationReport};

/// Ambient separation at which two samples count as distinct.
pub const DEFAULT_SEPARATION_DELTA: f64 = 1e-2;

/// Required projected separation for ambient-separated samples; two orders
/// below the smallest separation observed on the reference surfaces.
pub const DEFAULT_COLLISION_EPS: f64 = 1e-7;

const SAMPLE_RADIUS: f64 = 2.5;
const MAX_EMBED_DEGREE: usize = 8;

/// Samples the surface, embeds through the degree map, projects through the
/// functionals of (q, p), and asserts that any two samples at ambient
/// distance >= delta land at projected distance >= eps.
pub fn graphlike_check<R: Rng>(
    spec: &SurfaceSpec,
    tp: &TamingPair,
    n_samples: usize,
    delta: f64,
    eps: f64,
    rng: &mut R,
) -> Result<VerificationReport> {
    if tp.degree > MAX_EMBED_DEGREE {
        return Err(Error::InvalidParameter(format!(
            "embedding degree {} beyond the supported {MAX_EMBED_DEGREE}",
            tp.degree
        )));
    }
    let mut report = VerificationReport::new(
        format!("graphlike(l={}, m={}, n={n_samples})", spec.l(), tp.degree),
        -eps,
    );
    let basis = PolySpaceBasis::new(3, tp.degree)?;
    let eta_q = functional_from_polynomial(&tp.q, &basis)?;
    let eta_p = functional_from_polynomial(&tp.p, &basis)?;

    // half free samples, half drawn as same-height pairs along the
    // cross-sections: collisions of a degenerate projection live on shared
    // level sets of q, so those pairs are the discriminating ones
    let mut ambient = Vec::with_capacity(n_samples);
    while ambient.len() + 2 <= n_samples / 2 + 1 {
        let c: f64 = rng.random_range(-2.0..2.0);
        let cs = crate::surface::cross_section(spec, c);
        for _ in 0..2 {
            let arc = rng.random_range(0..cs.arcs().len());
            let s: f64 = rng.random_range(0.0..1.0);
            ambient.push(cs.point(arc, s));
        }
    }
    while ambient.len() < n_samples {
        let (x, _) = sample_random_point(spec, rng, SAMPLE_RADIUS);
        ambient.push(x);
    }
    let mut projected = Vec::with_capacity(n_samples);
    for x in &ambient {
        let w = delta_embed(&basis, x)?;
        projected.push([pairing(&eta_q, &w)?, pairing(&eta_p, &w)?]);
    }
    report.add_samples(n_samples);

    let mut min_projected = f64::INFINITY;
    let mut violations = 0usize;
    for i in 0..n_samples {
        for j in i + 1..n_samples {
            let d_ambient = ambient[i]
                .iter()
                .zip(&ambient[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d_ambient < delta {
                continue;
            }
            let d_proj = projected[i]
                .iter()
                .zip(&projected[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            min_projected = min_projected.min(d_proj);
            if d_proj < eps {
                violations += 1;
            }
        }
    }
    if min_projected.is_finite() {
        report.worst_residual = -min_projected;
    }
    report.record(
        "separated pairs with colliding projections",
        violations as f64,
        0.0,
        violations == 0,
    );
    report.record(
        "min projected distance over separated pairs",
        min_projected,
        eps,
        min_projected >= eps,
    );
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomials::{taming_q, MultiPoly};
    use crate::surface::build_surface;
    use rand::SeedableRng;

    fn rng() -> rand_chacha::ChaCha12Rng {
        rand_chacha::ChaCha12Rng::seed_from_u64(0x91af)
    }

    #[test]
    fn example_pair_projects_injectively() {
        let spec = build_surface(2, 0.5).unwrap();
        let report = graphlike_check(
            &spec,
            &TamingPair::example2(),
            2000,
            DEFAULT_SEPARATION_DELTA,
            DEFAULT_COLLISION_EPS,
            &mut rng(),
        )
        .unwrap();
        assert!(report.pass, "{}", report.summary_line());
    }

    #[test]
    fn constant_projection_collides() {
        let spec = build_surface(2, 0.5).unwrap();
        let tp = TamingPair::new(taming_q(), MultiPoly::zero(3), 3).unwrap();
        let report = graphlike_check(&spec, &tp, 300, 1e-2, 1e-7, &mut rng()).unwrap();
        assert!(!report.pass);
    }

    #[test]
    fn degree_cap_is_enforced() {
        let spec = build_surface(6, 0.5).unwrap();
        let tp = TamingPair::for_surface(6, 8.0).unwrap(); // degree 11
        assert!(graphlike_check(&spec, &tp, 10, 1e-2, 1e-7, &mut rng()).is_err());
    }
}

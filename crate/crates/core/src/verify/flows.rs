//! Flow-level suites: equivariance of the degree embedding under the lifted
//! generator, and invariance plus conservation along surface orbits.

use rand::Rng;

use crate::error::Result;
use crate::linflow::{closed_form_flow3, conserved_quantity, hyperbolic_generator};
use crate::surface::{build_surface, membership, sample_random_point};
use crate::symspace::{delta_embed, lifted_flow, PolySpaceBasis};
use crate::verify::VerificationReport;

/// Equivariance of the degree embedding: the lifted flow applied to an
/// embedded point equals the embedding of the flowed point, relative to
/// 1 + the embedded sup norm.
pub fn equivariance_suite<R: Rng>(
    degrees: &[usize],
    samples_per_degree: usize,
    tol: f64,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("equivariance", tol);
    let a = hyperbolic_generator(0);
    for &m in degrees {
        let basis = PolySpaceBasis::new(3, m)?;
        let mut worst = 0.0f64;
        for _ in 0..samples_per_degree {
            let t: f64 = rng.random_range(-2.0..2.0);
            let x = [
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ];
            let embedded = delta_embed(&basis, &x)?;
            let lhs = lifted_flow(&a, m, t)?.matvec(embedded.coords())?;
            let rhs = delta_embed(&basis, &closed_form_flow3(t, x))?;
            let scale = 1.0 + embedded.max_abs();
            let gap = lhs
                .iter()
                .zip(rhs.coords())
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max);
            worst = worst.max(gap / scale);
            report.add_samples(1);
        }
        report.record_residual(format!("m={m}: worst relative equivariance gap"), worst, tol);
    }
    Ok(report.finish())
}

/// Random surface points stay on the surface under the flow and conserve
/// x^2 - y^2.
pub fn invariance_suite<R: Rng>(
    ls: &[usize],
    amplitude: f64,
    samples_per_surface: usize,
    membership_tol: f64,
    conservation_tol: f64,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("invariance", conservation_tol);
    for &l in ls {
        let spec = build_surface(l, amplitude)?;
        let mut misses = 0usize;
        let mut worst_drift = 0.0f64;
        for _ in 0..samples_per_surface {
            let (x, _) = sample_random_point(&spec, rng, 3.0);
            let t: f64 = rng.random_range(-2.0..2.0);
            let moved = closed_form_flow3(t, x);
            let tol = membership_tol * (1.0 + x.iter().map(|v| v * v).sum::<f64>());
            if membership(&spec, moved, tol).is_none() {
                misses += 1;
            }
            let drift = (conserved_quantity(moved) - conserved_quantity(x)).abs()
                / (1.0 + x[0] * x[0] + x[1] * x[1]);
            worst_drift = worst_drift.max(drift);
            report.add_samples(1);
        }
        report.record(
            format!("l={l}: flowed samples losing membership"),
            misses as f64,
            0.0,
            misses == 0,
        );
        report.record_residual(
            format!("l={l}: worst relative conservation drift"),
            worst_drift,
            conservation_tol,
        );
    }
    Ok(report.finish())
}

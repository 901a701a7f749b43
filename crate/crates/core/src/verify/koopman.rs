//! Koopman eigenfunction checks restricted to the surface, and the
//! least-squares fit certifying that a span of observables is carried into
//! itself by the flow.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linflow::closed_form_flow3;
use crate::polynomials::MultiPoly;
use crate::surface::{sample_random_point, SurfaceSpec};
use crate::verify::VerificationReport;

const SAMPLE_RADIUS: f64 = 2.0;
const GRAM_CONDITION_LIMIT: f64 = 1e8;

/// Integrated eigenfunction equation along sampled trajectories:
/// |psi(flow(t, x)) - e^(lambda t) psi(x)| stays below
/// tol * (1 + |psi(x)| e^|lambda t|).
pub fn koopman_eigencheck<R: Rng>(
    spec: &SurfaceSpec,
    psi: &MultiPoly,
    lambda: f64,
    n_traj: usize,
    t_grid: &[f64],
    tol: f64,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut report =
        VerificationReport::new(format!("koopman_eigencheck(lambda={lambda})"), tol);
    let mut worst = 0.0f64;
    let mut worst_label = String::new();
    for _ in 0..n_traj {
        let (x0, _) = sample_random_point(spec, rng, SAMPLE_RADIUS);
        let psi0 = psi.eval(&x0)?;
        for &t in t_grid {
            let moved = closed_form_flow3(t, x0);
            let lhs = psi.eval(&moved)?;
            let rhs = (lambda * t).exp() * psi0;
            let residual =
                (lhs - rhs).abs() / (1.0 + psi0.abs() * (lambda * t).abs().exp());
            if residual > worst {
                worst = residual;
                worst_label = format!("x0={x0:?} t={t}");
            }
            report.add_samples(1);
        }
    }
    report.record_residual(format!("worst integrated residual ({worst_label})"), worst, tol);
    Ok(report.finish())
}

/// Coefficient matrix and residual of one least-squares Koopman fit.
#[derive(Debug, Clone)]
pub struct KoopmanFit {
    pub t: f64,
    /// coefficients[i][j]: psi_i o flow(t) ~ sum_j coefficients[i][j] psi_j.
    pub coefficients: Vec<Vec<f64>>,
    pub residual: f64,
    pub gram_condition: f64,
}

/// Fits psi_i(flow(t, x)) on span{psi_j(x)} over sampled surface points by
/// normal equations, monitoring the Gram condition number.
pub fn fit_koopman_matrix<R: Rng>(
    spec: &SurfaceSpec,
    basis_fns: &[MultiPoly],
    t: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<KoopmanFit> {
    let k = basis_fns.len();
    if k == 0 {
        return Err(Error::InvalidParameter("empty observable basis".into()));
    }
    let n = n_samples.max(10 * k);
    let mut design = vec![vec![0.0; k]; n];
    let mut targets = vec![vec![0.0; n]; k];
    for row in 0..n {
        let (x, _) = sample_random_point(spec, rng, SAMPLE_RADIUS);
        let moved = closed_form_flow3(t, x);
        for (j, f) in basis_fns.iter().enumerate() {
            design[row][j] = f.eval(&x)?;
        }
        for (i, f) in basis_fns.iter().enumerate() {
            targets[i][row] = f.eval(&moved)?;
        }
    }

    // Gram matrix and its condition estimate
    let mut gram = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in 0..k {
            gram[a][b] = (0..n).map(|r| design[r][a] * design[r][b]).sum();
        }
    }
    let inverse = invert(&gram).ok_or(Error::DegenerateGram {
        cond: f64::INFINITY,
        limit: GRAM_CONDITION_LIMIT,
    })?;
    let cond = inf_norm(&gram) * inf_norm(&inverse);
    if cond > GRAM_CONDITION_LIMIT {
        return Err(Error::DegenerateGram { cond, limit: GRAM_CONDITION_LIMIT });
    }

    let mut coefficients = vec![vec![0.0; k]; k];
    let mut residual = 0.0f64;
    for i in 0..k {
        let rhs: Vec<f64> = (0..k)
            .map(|a| (0..n).map(|r| design[r][a] * targets[i][r]).sum())
            .collect();
        for a in 0..k {
            coefficients[i][a] = (0..k).map(|b| inverse[a][b] * rhs[b]).sum();
        }
        for row in 0..n {
            let predicted: f64 = (0..k).map(|j| coefficients[i][j] * design[row][j]).sum();
            let scale = 1.0 + targets[i][row].abs();
            residual = residual.max((targets[i][row] - predicted).abs() / scale);
        }
    }
    Ok(KoopmanFit { t, coefficients, residual, gram_condition: cond })
}

/// The span of `basis_fns` is flow-invariant: for each t the fit residual
/// stays below tol.
pub fn invariant_subspace_check<R: Rng>(
    spec: &SurfaceSpec,
    basis_fns: &[MultiPoly],
    t_grid: &[f64],
    tol: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let mut report =
        VerificationReport::new(format!("invariant_subspace(k={})", basis_fns.len()), tol);
    for &t in t_grid {
        let fit = fit_koopman_matrix(spec, basis_fns, t, n_samples, rng)?;
        report.add_samples(n_samples);
        report.record_residual(format!("t={t}: worst relative fit residual"), fit.residual, tol);
        report.record(
            format!("t={t}: Gram condition estimate"),
            fit.gram_condition,
            GRAM_CONDITION_LIMIT,
            fit.gram_condition <= GRAM_CONDITION_LIMIT,
        );
    }
    Ok(report.finish())
}

fn inf_norm(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense inverse by Gauss-Jordan with partial pivoting; None if singular.
fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = m.len();
    let mut aug: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| {
            aug[a][col].abs().partial_cmp(&aug[b][col].abs()).unwrap()
        })?;
        if aug[pivot][col] == 0.0 {
            return None;
        }
        aug.swap(col, pivot);
        let p = aug[col][col];
        for v in aug[col].iter_mut() {
            *v /= p;
        }
        for row in 0..k {
            if row == col {
                continue;
            }
            let f = aug[row][col];
            if f == 0.0 {
                continue;
            }
            for j in 0..2 * k {
                let delta = f * aug[col][j];
                aug[row][j] -= delta;
            }
        }
    }
    Some(aug.into_iter().map(|row| row[k..].to_vec()).collect())
}

/// The three eigenfunction candidates x + y, x - y, z.
pub fn standard_observables() -> Vec<MultiPoly> {
    let x = MultiPoly::variable(3, crate::polynomials::VAR_X).unwrap();
    let y = MultiPoly::variable(3, crate::polynomials::VAR_Y).unwrap();
    let z = MultiPoly::variable(3, crate::polynomials::VAR_Z).unwrap();
    vec![x.add(&y).unwrap(), x.sub(&y).unwrap(), z]
}

/// Invariance of span{x + y, x - y, z} with the fitted matrices pinned to
/// diag(e^t, e^-t, 1).
pub fn standard_subspace_suite<R: Rng>(
    spec: &SurfaceSpec,
    t_grid: &[f64],
    tol: f64,
    n_samples: usize,
    rng: &mut R,
) -> Result<VerificationReport> {
    let obs = standard_observables();
    let mut report = VerificationReport::new("invariant_subspace(standard)", tol);
    for &t in t_grid {
        let fit = fit_koopman_matrix(spec, &obs, t, n_samples, rng)?;
        report.add_samples(n_samples);
        report.record_residual(format!("t={t}: worst relative fit residual"), fit.residual, tol);
        let expected = [[t.exp(), 0.0, 0.0], [0.0, (-t).exp(), 0.0], [0.0, 0.0, 1.0]];
        let mut gap = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                gap = gap.max((fit.coefficients[i][j] - expected[i][j]).abs());
            }
        }
        report.record_residual(
            format!("t={t}: worst deviation from diag(e^t, e^-t, 1)"),
            gap,
            tol,
        );
    }
    Ok(report.finish())
}

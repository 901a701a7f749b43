//! The polynomial-space target of the degree embedding: multi-index basis,
//! the embedding itself, the lifted linear generator and the pullback of
//! linear functionals to polynomials.
//!
//! Coordinates on each symmetric-power block are plain monomials v^alpha
//! (no multinomial weights); the pullback convention absorbs all the
//! combinatorics, so `functional_from_polynomial` is a coefficient copy and
//! pairing(functional(p), embed(v)) = p(v) - p(0) holds exactly.  Constant
//! terms are invisible through the embedding because its constant coordinate
//! is identically zero.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linflow::{matrix_exp, SquareMatrix};
use crate::polynomials::{MultiIndex, MultiPoly};

/// dim P^m = C(n + m, n), the number of multi-indices of total degree <= m.
pub fn basis_dim(n: usize, m: usize) -> Result<usize> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidParameter("basis_dim requires n, m >= 1".into()));
    }
    let mut acc: u128 = 1;
    for k in 1..=n as u128 {
        acc = acc
            .checked_mul(m as u128 + k)
            .ok_or_else(|| Error::Overflow(format!("binomial({}+{n}, {n})", m)))?
            / k;
    }
    usize::try_from(acc).map_err(|_| Error::Overflow(format!("binomial({}+{n}, {n})", m)))
}

/// Ordered monomial basis of all multi-indices with total degree <= m,
/// graded-lex, starting at the constant index.
#[derive(Debug, Serialize)]
pub struct PolySpaceBasis {
    n: usize,
    m: usize,
    index_list: Vec<MultiIndex>,
    #[serde(skip)]
    positions: HashMap<MultiIndex, usize>,
}

impl PolySpaceBasis {
    pub fn new(n: usize, m: usize) -> Result<Arc<Self>> {
        let dim = basis_dim(n, m)?;
        let mut index_list = Vec::with_capacity(dim);
        let mut current = vec![0u32; n];
        enumerate_indices(&mut current, 0, m as u32, &mut index_list);
        index_list.sort();
        debug_assert_eq!(index_list.len(), dim);
        let positions = index_list
            .iter()
            .enumerate()
            .map(|(i, idx)| (idx.clone(), i))
            .collect();
        Ok(Arc::new(Self { n, m, index_list, positions }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.index_list.len()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.index_list
    }

    pub fn position(&self, idx: &MultiIndex) -> Option<usize> {
        self.positions.get(idx).copied()
    }
}

fn enumerate_indices(current: &mut Vec<u32>, var: usize, budget: u32, out: &mut Vec<MultiIndex>) {
    if var == current.len() {
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in 0..=budget {
        current[var] = e;
        enumerate_indices(current, var + 1, budget - e, out);
    }
    current[var] = 0;
}

/// Coordinate vector of a point of the polynomial space.
#[derive(Debug, Clone)]
pub struct PolySpaceElement {
    basis: Arc<PolySpaceBasis>,
    coords: Vec<f64>,
}

/// Linear functional on the polynomial space, in the dual coordinates.
#[derive(Debug, Clone)]
pub struct Covector {
    basis: Arc<PolySpaceBasis>,
    coords: Vec<f64>,
}

impl PolySpaceElement {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn basis(&self) -> &Arc<PolySpaceBasis> {
        &self.basis
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

impl Covector {
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn from_coords(basis: Arc<PolySpaceBasis>, coords: Vec<f64>) -> Result<Self> {
        if coords.len() != basis.dim() {
            return Err(Error::DimensionMismatch(format!(
                "covector length {} vs basis dim {}",
                coords.len(),
                basis.dim()
            )));
        }
        Ok(Self { basis, coords })
    }
}

fn check_same_basis(a: &PolySpaceBasis, b: &PolySpaceBasis) -> Result<()> {
    if a.n != b.n || a.m != b.m {
        return Err(Error::BasisMismatch {
            expected_n: a.n,
            expected_m: a.m,
            got_n: b.n,
            got_m: b.m,
        });
    }
    Ok(())
}

/// The degree embedding: coordinate at alpha is the monomial v^alpha for
/// |alpha| >= 1, and 0 at the constant index.
pub fn delta_embed(basis: &Arc<PolySpaceBasis>, v: &[f64]) -> Result<PolySpaceElement> {
    if v.len() != basis.n {
        return Err(Error::DimensionMismatch(format!(
            "point length {} vs basis variable count {}",
            v.len(),
            basis.n
        )));
    }
    let coords = basis
        .index_list
        .iter()
        .map(|idx| if idx.total_degree() == 0 { 0.0 } else { idx.eval(v) })
        .collect();
    Ok(PolySpaceElement { basis: Arc::clone(basis), coords })
}

/// Dot product of dual and primal coordinates.
pub fn pairing(eta: &Covector, w: &PolySpaceElement) -> Result<f64> {
    check_same_basis(&eta.basis, &w.basis)?;
    Ok(eta.coords.iter().zip(&w.coords).map(|(a, b)| a * b).sum())
}

/// Covector whose coordinate at alpha is the coefficient of x^alpha in p.
///
/// The constant coordinate carries p's constant term, which the embedding
/// cannot see; pairing(result, delta_embed(v)) = p(v) - p(0) for all v.
pub fn functional_from_polynomial(p: &MultiPoly, basis: &Arc<PolySpaceBasis>) -> Result<Covector> {
    if p.nvars() != basis.n {
        return Err(Error::DimensionMismatch(format!(
            "polynomial in {} variables vs basis in {}",
            p.nvars(),
            basis.n
        )));
    }
    if p.degree() as usize > basis.m {
        return Err(Error::DegreeTooHigh { degree: p.degree() as usize, max: basis.m });
    }
    let mut coords = vec![0.0; basis.dim()];
    for (idx, c) in p.terms() {
        let pos = basis
            .position(idx)
            .expect("degree-checked index is in the basis");
        coords[pos] = c;
    }
    Ok(Covector { basis: Arc::clone(basis), coords })
}

/// The lifted generator A^(m): the unique linear map such that the degree
/// embedding intertwines the flows, built row by row from
/// d/dt x^alpha = sum_i alpha_i x^(alpha - e_i) (A x)_i.
pub fn lift_generator(a: &SquareMatrix, m: usize) -> Result<SquareMatrix> {
    let n = a.dim();
    let basis = PolySpaceBasis::new(n, m)?;
    let dim = basis.dim();
    let mut lifted = SquareMatrix::zeros(dim);
    for (row, alpha) in basis.indices().iter().enumerate() {
        if alpha.total_degree() == 0 {
            continue;
        }
        for (i, &ei) in alpha.exponents().iter().enumerate() {
            if ei == 0 {
                continue;
            }
            for j in 0..n {
                let aij = a.get(i, j);
                if aij == 0.0 {
                    continue;
                }
                let mut exps = alpha.exponents().to_vec();
                exps[i] -= 1;
                exps[j] += 1;
                let beta = MultiIndex::new(exps);
                let col = basis
                    .position(&beta)
                    .expect("degree is preserved, index stays in the basis");
                let prev = lifted.get(row, col);
                lifted.set(row, col, prev + f64::from(ei) * aij);
            }
        }
    }
    Ok(lifted)
}

/// exp(A^(m) t).
pub fn lifted_flow(a: &SquareMatrix, m: usize, t: f64) -> Result<SquareMatrix> {
    matrix_exp(&lift_generator(a, m)?, t)
}

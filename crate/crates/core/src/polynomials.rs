//! Sparse multivariate polynomial arithmetic, the concrete taming
//! polynomials, the constant M, and Sturm-sequence sign-change counting.
//!
//! Multi-indices are ordered graded-lexicographically: lower total degree
//! first, and within a degree the index with the lexicographically larger
//! exponent tuple first, so for three variables the order starts
//! 1, x, y, z, x^2, xy, xz, y^2, yz, z^2, ...  Serialization follows the
//! same order, which keeps every emitted artifact deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exponent tuple of one monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn zeros(nvars: usize) -> Self {
        Self(vec![0; nvars])
    }

    /// The i-th coordinate index e_i.
    pub fn unit(nvars: usize, var: usize) -> Self {
        let mut e = vec![0; nvars];
        e[var] = 1;
        Self(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Monomial value prod_i point_i^(alpha_i).
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .map(|(&e, &x)| x.powi(e as i32))
            .product()
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(MultiIndex(Vec::<u32>::deserialize(deserializer)?))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            // within a degree: lexicographically larger tuple first
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse real polynomial keyed by exponent multi-index.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, f64>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(MultiIndex::zeros(nvars), c);
        p
    }

    /// The polynomial x_var.
    pub fn variable(nvars: usize, var: usize) -> Result<Self> {
        if var >= nvars {
            return Err(Error::InvalidParameter(format!(
                "variable index {var} out of range for {nvars} variables"
            )));
        }
        let mut p = Self::zero(nvars);
        p.add_term(MultiIndex::unit(nvars, var), 1.0);
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.terms.iter().map(|(k, &v)| (k, v))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> f64 {
        self.terms.get(idx).copied().unwrap_or(0.0)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::total_degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|k| k.exponents()[var]).max().unwrap_or(0)
    }

    /// Adds `c` to the coefficient at `idx`, dropping the term if it cancels
    /// to exactly zero.
    pub fn add_term(&mut self, idx: MultiIndex, c: f64) {
        use std::collections::btree_map::Entry;
        assert_eq!(idx.len(), self.nvars, "multi-index length must match nvars");
        if c == 0.0 {
            return;
        }
        match self.terms.entry(idx) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let next = *slot.get() + c;
                if next == 0.0 {
                    slot.remove();
                } else {
                    *slot.get_mut() = next;
                }
            }
        }
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "polynomial in {} variables evaluated at a point of length {}",
                self.nvars,
                point.len()
            )));
        }
        Ok(self.terms().map(|(idx, c)| c * idx.eval(point)).sum())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (idx, c) in other.terms() {
            out.add_term(idx.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = MultiPoly::zero(self.nvars);
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                let idx = MultiIndex::new(
                    a.exponents()
                        .iter()
                        .zip(b.exponents())
                        .map(|(x, y)| x + y)
                        .collect(),
                );
                out.add_term(idx, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> MultiPoly {
        if c == 0.0 {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Result<MultiPoly> {
        if var >= self.nvars {
            return Err(Error::InvalidParameter(format!(
                "variable index {var} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (idx, c) in self.terms() {
            let e = idx.exponents()[var];
            if e == 0 {
                continue;
            }
            let mut exps = idx.exponents().to_vec();
            exps[var] -= 1;
            out.add_term(MultiIndex::new(exps), c * f64::from(e));
        }
        Ok(out)
    }

    /// Gradient evaluated at a point.
    pub fn eval_gradient(&self, point: &[f64]) -> Result<Vec<f64>> {
        (0..self.nvars)
            .map(|v| self.partial(v)?.eval(point))
            .collect()
    }

    /// Substitutes a fixed value for one variable, keeping the variable count.
    pub fn substitute(&self, var: usize, value: f64) -> Result<MultiPoly> {
        if var >= self.nvars {
            return Err(Error::InvalidParameter(format!(
                "variable index {var} out of range for {} variables",
                self.nvars
            )));
        }
        let mut out = MultiPoly::zero(self.nvars);
        for (idx, c) in self.terms() {
            let e = idx.exponents()[var];
            let mut exps = idx.exponents().to_vec();
            exps[var] = 0;
            out.add_term(MultiIndex::new(exps), c * value.powi(e as i32));
        }
        Ok(out)
    }

    /// Extract the polynomial as univariate in `var`; every other exponent
    /// must be zero.
    pub fn to_univariate(&self, var: usize) -> Result<UniPoly> {
        let mut coeffs = vec![0.0; self.degree_in(var) as usize + 1];
        for (idx, c) in self.terms() {
            for (v, &e) in idx.exponents().iter().enumerate() {
                if v != var && e != 0 {
                    return Err(Error::NotUnivariate { var });
                }
            }
            coeffs[idx.exponents()[var] as usize] += c;
        }
        Ok(UniPoly::new(coeffs))
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "polynomials in {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    nvars: usize,
    terms: Vec<TermJson>,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            nvars: self.nvars,
            terms: self
                .terms()
                .map(|(idx, c)| TermJson { exp: idx.exponents().to_vec(), coef: c })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(deserializer)?;
        let mut p = MultiPoly::zero(raw.nvars);
        for term in raw.terms {
            if term.exp.len() != raw.nvars {
                return Err(D::Error::custom("exponent tuple length does not match nvars"));
            }
            p.add_term(MultiIndex::new(term.exp), term.coef);
        }
        Ok(p)
    }
}

/// Closed rectangle in the (x, z) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2 {
    pub x_lo: f64,
    pub x_hi: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

impl Box2 {
    pub fn new(x_lo: f64, x_hi: f64, z_lo: f64, z_hi: f64) -> Result<Self> {
        if !(x_lo < x_hi && z_lo < z_hi) {
            return Err(Error::InvalidParameter(format!(
                "degenerate box [{x_lo},{x_hi}]x[{z_lo},{z_hi}]"
            )));
        }
        if ![x_lo, x_hi, z_lo, z_hi].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("box bound".into()));
        }
        Ok(Self { x_lo, x_hi, z_lo, z_hi })
    }
}

// Variable layout shared by the whole crate: 0 = x, 1 = y, 2 = z.
pub const VAR_X: usize = 0;
pub const VAR_Y: usize = 1;
pub const VAR_Z: usize = 2;

/// q(x, y, z) = y.
pub fn taming_q() -> MultiPoly {
    MultiPoly::variable(3, VAR_Y).expect("static construction")
}

/// Pi(z) = prod_{j=1}^{l-1} (z - (2j-1)/2), the turn-level product.
pub fn turn_product(l: usize) -> Result<MultiPoly> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("turn_product requires l >= 2, got {l}")));
    }
    let z = MultiPoly::variable(3, VAR_Z)?;
    let mut prod = MultiPoly::constant(3, 1.0);
    for j in 1..l {
        let root = (2 * j - 1) as f64 / 2.0;
        prod = prod.mul(&z.sub(&MultiPoly::constant(3, root))?)?;
    }
    Ok(prod)
}

/// p(x, y, z) = (1 + y^2)^(l-1) M z + x Pi(z), fully expanded.
pub fn taming_p(l: usize, m_const: f64) -> Result<MultiPoly> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("taming_p requires l >= 2, got {l}")));
    }
    if !(m_const > 0.0) {
        return Err(Error::InvalidParameter(format!("taming_p requires M > 0, got {m_const}")));
    }
    let y = MultiPoly::variable(3, VAR_Y)?;
    let one_plus_y2 = MultiPoly::constant(3, 1.0).add(&y.mul(&y)?)?;
    let mut weight = MultiPoly::constant(3, 1.0);
    for _ in 0..l - 1 {
        weight = weight.mul(&one_plus_y2)?;
    }
    let z = MultiPoly::variable(3, VAR_Z)?;
    let first = weight.mul(&z)?.scale(m_const);
    let x = MultiPoly::variable(3, VAR_X)?;
    first.add(&x.mul(&turn_product(l)?)?)
}

/// The degree-3 pair's second polynomial, (z - 1/2)(x + (1 + y^2)), expanded.
pub fn example2_p() -> MultiPoly {
    let x = MultiPoly::variable(3, VAR_X).unwrap();
    let y = MultiPoly::variable(3, VAR_Y).unwrap();
    let z = MultiPoly::variable(3, VAR_Z).unwrap();
    let half = MultiPoly::constant(3, 0.5);
    let one_plus_y2 = MultiPoly::constant(3, 1.0).add(&y.mul(&y).unwrap()).unwrap();
    z.sub(&half)
        .unwrap()
        .mul(&x.add(&one_plus_y2).unwrap())
        .unwrap()
}

/// (1 + margin) * max over the box of |x Pi'(z)|.
///
/// |x Pi'| is linear in |x|, so the maximum sits at a box x-extreme; the
/// z-maximum of |Pi'| is taken over the box z-endpoints and the critical
/// points of Pi' (roots of Pi'' isolated by Sturm bisection).
pub fn compute_m(l: usize, r: &Box2, margin: f64) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("compute_m requires l >= 2, got {l}")));
    }
    if !(margin >= 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be >= 0, got {margin}")));
    }
    if !(r.x_lo >= -1.0 && r.x_hi <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "box x-interval [{}, {}] must lie within [-1, 1]",
            r.x_lo, r.x_hi
        )));
    }
    let x_max = r.x_lo.abs().max(r.x_hi.abs());
    let pi = turn_product(l)?.to_univariate(VAR_Z)?;
    let dpi = pi.derivative();
    let ddpi = dpi.derivative();

    let mut candidates = vec![r.z_lo, r.z_hi];
    if ddpi.degree() >= 1 {
        for (lo, hi) in ddpi.isolate_roots(r.z_lo, r.z_hi, 1e-12)? {
            candidates.push(0.5 * (lo + hi));
        }
    }
    let pi_max = candidates
        .iter()
        .map(|&z| dpi.eval(z).abs())
        .fold(0.0f64, f64::max);
    Ok((1.0 + margin) * x_max * pi_max)
}

/// Number of sign alternations of an (effectively univariate in z)
/// polynomial over [lo, hi]: roots are isolated with a Sturm sequence and
/// each isolating interval contributes one alternation exactly when the
/// polynomial changes sign across it.
pub fn count_sign_changes(p: &MultiPoly, interval: (f64, f64)) -> Result<usize> {
    let (mut lo, mut hi) = interval;
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!("empty interval [{lo}, {hi}]")));
    }
    let u = p.to_univariate(VAR_Z)?;
    if u.degree() == 0 {
        return Ok(0);
    }
    // nudge endpoints off exact roots so Sturm counts interior roots only
    let eps = 1e-12;
    if u.eval(lo) == 0.0 {
        lo += eps * (1.0 + lo.abs());
    }
    if u.eval(hi) == 0.0 {
        hi -= eps * (1.0 + hi.abs());
    }
    let intervals = u.isolate_roots(lo, hi, 1e-13)?;
    if intervals.is_empty() {
        return Ok(0);
    }
    // sample the sign in the gaps between consecutive roots, where the
    // polynomial is far from its rounding floor; a sign flip between two
    // neighbouring gaps is one alternation at the root separating them
    let mut sample_points = vec![lo];
    for pair in intervals.windows(2) {
        sample_points.push(0.5 * (pair[0].1 + pair[1].0));
    }
    sample_points.push(hi);
    let mut changes = 0;
    let mut last_sign = 0.0f64;
    for pt in sample_points {
        let v = u.eval(pt);
        if v == 0.0 {
            continue;
        }
        if last_sign != 0.0 && v.signum() != last_sign {
            changes += 1;
        }
        last_sign = v.signum();
    }
    Ok(changes)
}

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    pub fn leading_coeff(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.degree() == 0 {
            return UniPoly::new(vec![0.0]);
        }
        UniPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(i, &c)| c * (i + 1) as f64)
                .collect(),
        )
    }

    /// Euclidean remainder of self by divisor, with a relative cutoff that
    /// drops coefficients drowned by rounding.
    fn rem(&self, divisor: &UniPoly) -> UniPoly {
        let mut r = self.coeffs.clone();
        let d = divisor.degree();
        let lead = divisor.leading_coeff();
        let scale = self
            .coeffs
            .iter()
            .chain(divisor.coeffs.iter())
            .fold(0.0f64, |m, c| m.max(c.abs()));
        while r.len() > d && r.len() > 1 {
            let k = r.len() - 1;
            let q = r[k] / lead;
            for i in 0..=d {
                r[k - d + i] -= q * divisor.coeffs[i];
            }
            r.pop();
            while r.len() > 1 && r.last().map(|c| c.abs() <= 1e-14 * scale) == Some(true) {
                r.pop();
            }
        }
        UniPoly::new(r)
    }

    /// Canonical Sturm chain p, p', -rem(...), ...
    fn sturm_chain(&self) -> Vec<UniPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        while !chain.last().unwrap().is_zero() && chain.last().unwrap().degree() > 0 {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(UniPoly::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        chain
    }

    fn sign_variations(chain: &[UniPoly], x: f64) -> usize {
        let mut variations = 0;
        let mut last = 0.0f64;
        for p in chain {
            let v = p.eval(x);
            if v == 0.0 {
                continue;
            }
            if last != 0.0 && v.signum() != last.signum() {
                variations += 1;
            }
            last = v;
        }
        variations
    }

    /// Number of distinct real roots in (lo, hi] by Sturm's theorem.
    pub fn count_roots(&self, lo: f64, hi: f64) -> usize {
        let chain = self.sturm_chain();
        Self::sign_variations(&chain, lo).saturating_sub(Self::sign_variations(&chain, hi))
    }

    /// Isolating intervals, each containing exactly one distinct root of
    /// self in (lo, hi], refined by bisection to the given width.
    pub fn isolate_roots(&self, lo: f64, hi: f64, width: f64) -> Result<Vec<(f64, f64)>> {
        if self.is_zero() {
            return Err(Error::NumericalFailure("root isolation of the zero polynomial".into()));
        }
        let chain = self.sturm_chain();
        let mut out = Vec::new();
        let mut stack = vec![(lo, hi)];
        let mut guard = 0usize;
        while let Some((a, b)) = stack.pop() {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::NumericalFailure("root isolation did not terminate".into()));
            }
            let count =
                Self::sign_variations(&chain, a).saturating_sub(Self::sign_variations(&chain, b));
            if count == 0 {
                continue;
            }
            if count == 1 && (b - a) <= width.max(1e-15 * (1.0 + a.abs().max(b.abs()))) {
                out.push((a, b));
                continue;
            }
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                out.push((a, b));
                continue;
            }
            stack.push((a, mid));
            stack.push((mid, b));
        }
        out.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_xx_minus_yy() -> MultiPoly {
        let x = MultiPoly::variable(3, VAR_X).unwrap();
        let y = MultiPoly::variable(3, VAR_Y).unwrap();
        x.mul(&x).unwrap().sub(&y.mul(&y).unwrap()).unwrap()
    }

    #[test]
    fn graded_lex_order_matches_convention() {
        let idx = |v: [u32; 2]| MultiIndex::new(v.to_vec());
        let mut set: Vec<MultiIndex> = vec![
            idx([0, 2]),
            idx([1, 1]),
            idx([0, 0]),
            idx([2, 0]),
            idx([0, 1]),
            idx([1, 0]),
        ];
        set.sort();
        let expected: Vec<MultiIndex> = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
            .into_iter()
            .map(idx)
            .collect();
        assert_eq!(set, expected);
    }

    #[test]
    fn eval_examples() {
        assert_eq!(poly_xx_minus_yy().eval(&[2.0, 1.0, 0.0]).unwrap(), 3.0);
        // direct hand expansion of (z - 1/2)(x + (1 + y^2)) at (0, 0, 1)
        assert_eq!(example2_p().eval(&[0.0, 0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(MultiPoly::zero(3).eval(&[4.0, 5.0, 6.0]).unwrap(), 0.0);
        assert!(MultiPoly::zero(3).eval(&[1.0]).is_err());
    }

    #[test]
    fn partial_examples() {
        let x = MultiPoly::variable(3, VAR_X).unwrap();
        let z = MultiPoly::variable(3, VAR_Z).unwrap();
        let half = MultiPoly::constant(3, 0.5);
        let p = x.mul(&z.sub(&half).unwrap()).unwrap();
        assert_eq!(p.partial(VAR_X).unwrap(), z.sub(&half).unwrap());

        let dpdx = taming_p(4, 4.0).unwrap().partial(VAR_X).unwrap();
        assert_eq!(dpdx, turn_product(4).unwrap());

        let y = MultiPoly::variable(3, VAR_Y).unwrap();
        let y2 = y.mul(&y).unwrap();
        assert_eq!(y2.degree(), 2);
        assert_eq!(y2.coeff(&MultiIndex::new(vec![0, 2, 0])), 1.0);
        assert!(p.partial(7).is_err());
    }

    #[test]
    fn taming_q_is_y() {
        let q = taming_q();
        assert_eq!(q.eval(&[3.0, 7.0, 2.0]).unwrap(), 7.0);
        assert_eq!(q.degree(), 1);
        assert_eq!(q.partial(VAR_Y).unwrap(), MultiPoly::constant(3, 1.0));
    }

    #[test]
    fn turn_product_expansions() {
        let p2 = turn_product(2).unwrap();
        let z = MultiPoly::variable(3, VAR_Z).unwrap();
        assert_eq!(p2, z.sub(&MultiPoly::constant(3, 0.5)).unwrap());
        assert_eq!(p2.eval(&[0.0, 0.0, 0.5]).unwrap(), 0.0);

        // expansion oracle: (z-1/2)(z-3/2)(z-5/2) = z^3 - 4.5 z^2 + 5.75 z - 1.875,
        // all coefficients exactly representable
        let p4 = turn_product(4).unwrap().to_univariate(VAR_Z).unwrap();
        assert_eq!(p4.coeffs(), &[-1.875, 5.75, -4.5, 1.0]);
        assert!(turn_product(1).is_err());
    }

    #[test]
    fn taming_p_matches_figure_constants() {
        // 4z(1+y^2)^3 + x(z-1/2)(z-3/2)(z-5/2)
        let p = taming_p(4, 4.0).unwrap();
        assert_eq!(p.degree(), 7);
        let y = MultiPoly::variable(3, VAR_Y).unwrap();
        let y2 = y.mul(&y).unwrap();
        let one = MultiPoly::constant(3, 1.0);
        let w = one.add(&y2).unwrap();
        let w3 = w.mul(&w).unwrap().mul(&w).unwrap();
        let z = MultiPoly::variable(3, VAR_Z).unwrap();
        let x = MultiPoly::variable(3, VAR_X).unwrap();
        let expected = w3
            .mul(&z)
            .unwrap()
            .scale(4.0)
            .add(&x.mul(&turn_product(4).unwrap()).unwrap())
            .unwrap();
        assert_eq!(p, expected);

        // (1+y^2) z + x(z - 1/2)
        let p2 = taming_p(2, 1.0).unwrap();
        let expected2 = one
            .add(&y2)
            .unwrap()
            .mul(&z)
            .unwrap()
            .add(&x.mul(&turn_product(2).unwrap()).unwrap())
            .unwrap();
        assert_eq!(p2, expected2);
        assert_eq!(taming_p(2, 3.0).unwrap().degree(), 3);
        assert!(taming_p(2, 0.0).is_err());
        assert!(taming_p(0, 1.0).is_err());
    }

    #[test]
    fn example2_p_relates_to_taming_p() {
        // polynomial subtraction oracle: difference is -(1+y^2)/2
        let diff = example2_p().sub(&taming_p(2, 1.0).unwrap()).unwrap();
        let y = MultiPoly::variable(3, VAR_Y).unwrap();
        let expected = MultiPoly::constant(3, 1.0)
            .add(&y.mul(&y).unwrap())
            .unwrap()
            .scale(-0.5);
        assert_eq!(diff, expected);

        // the factor x + (1 + y^2) vanishes at (-1, 0, z)
        for &z in &[-3.0, 0.0, 0.5, 2.5] {
            assert_eq!(example2_p().eval(&[-1.0, 0.0, z]).unwrap(), 0.0);
        }
    }

    #[test]
    fn compute_m_examples() {
        let b = |x0, x1, z0, z1| Box2::new(x0, x1, z0, z1).unwrap();
        let m = compute_m(4, &b(-1.0, 1.0, 0.0, 3.0), 0.0).unwrap();
        assert!((m - 5.75).abs() <= 1e-9, "got {m}");
        let m = compute_m(4, &b(-1.0, 1.0, 0.25, 2.75), 0.0).unwrap();
        assert!((m - 3.6875).abs() <= 1e-9, "got {m}");
        let m = compute_m(2, &b(-1.0, 1.0, 0.0, 1.0), 0.0).unwrap();
        assert!((m - 1.0).abs() <= 1e-12, "got {m}");
        assert!(compute_m(4, &b(-2.0, 1.0, 0.0, 3.0), 0.0).is_err());
        assert!(Box2::new(1.0, -1.0, 0.0, 1.0).is_err());
    }

    /// Brute-force dense-grid oracle for the box maximum.
    #[test]
    fn compute_m_matches_grid_oracle() {
        let r = Box2::new(-0.55, 0.55, 0.25, 2.75).unwrap();
        let m = compute_m(4, &r, 0.0).unwrap();
        let dpi = turn_product(4)
            .unwrap()
            .to_univariate(VAR_Z)
            .unwrap()
            .derivative();
        let n = 200_000;
        let mut grid_max = 0.0f64;
        for i in 0..=n {
            let z = r.z_lo + (r.z_hi - r.z_lo) * i as f64 / n as f64;
            grid_max = grid_max.max(0.55 * dpi.eval(z).abs());
        }
        assert!((m - grid_max).abs() <= 1e-6, "exact {m} vs grid {grid_max}");
    }

    #[test]
    fn compute_m_is_monotone_in_the_box() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(77);
        for l in 2..=5 {
            for _ in 0..20 {
                let x1: f64 = rng.random_range(0.1..1.0);
                let z0: f64 = rng.random_range(0.0..1.0);
                let z1: f64 = z0 + rng.random_range(0.1..2.0);
                let inner = Box2::new(-x1 * 0.7, x1 * 0.7, z0 + 0.05, z1 - 0.05).unwrap();
                let outer = Box2::new(-x1, x1, z0, z1).unwrap();
                let mi = compute_m(l, &inner, 0.0).unwrap();
                let mo = compute_m(l, &outer, 0.0).unwrap();
                assert!(mo >= mi - 1e-12, "l={l} inner {mi} outer {mo}");
            }
        }
    }

    #[test]
    fn sign_change_examples() {
        assert_eq!(count_sign_changes(&turn_product(4).unwrap(), (0.0, 3.0)).unwrap(), 3);

        let z = MultiPoly::variable(3, VAR_Z).unwrap();
        let z2p1 = z.mul(&z).unwrap().add(&MultiPoly::constant(3, 1.0)).unwrap();
        assert_eq!(count_sign_changes(&z2p1, (-10.0, 10.0)).unwrap(), 0);

        let lin = z.sub(&MultiPoly::constant(3, 0.5)).unwrap();
        assert_eq!(count_sign_changes(&lin, (0.0, 1.0)).unwrap(), 1);

        let x = MultiPoly::variable(3, VAR_X).unwrap();
        assert!(count_sign_changes(&x.mul(&z).unwrap(), (0.0, 1.0)).is_err());
    }

    #[test]
    fn sign_changes_ignore_even_multiplicity() {
        // (z - 1)^2 (z - 2): only the simple root alternates
        let z = MultiPoly::variable(3, VAR_Z).unwrap();
        let f1 = z.sub(&MultiPoly::constant(3, 1.0)).unwrap();
        let f2 = z.sub(&MultiPoly::constant(3, 2.0)).unwrap();
        let p = f1.mul(&f1).unwrap().mul(&f2).unwrap();
        assert_eq!(count_sign_changes(&p, (0.0, 3.0)).unwrap(), 1);
    }

    #[test]
    fn turn_product_sign_changes_for_small_l() {
        for l in 2..=8 {
            let p = turn_product(l).unwrap();
            assert_eq!(
                count_sign_changes(&p, (0.0, (l - 1) as f64)).unwrap(),
                l - 1,
                "l = {l}"
            );
        }
    }

    #[test]
    fn taming_p_restricts_to_weighted_height_on_x_zero() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for l in 2..=5 {
            let p = taming_p(l, 2.5).unwrap();
            for _ in 0..40 {
                let y: f64 = rng.random_range(-2.0..2.0);
                let z: f64 = rng.random_range(-2.0..2.0);
                let got = p.eval(&[0.0, y, z]).unwrap();
                let want = (1.0 + y * y).powi(l as i32 - 1) * 2.5 * z;
                assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn poly_json_shape_and_order() {
        let p = example2_p();
        let s = serde_json::to_string(&p).unwrap();
        // graded-lex: constant term first, then y^2-free degree-1 and up
        assert!(s.starts_with("{\"nvars\":3,\"terms\":[{\"exp\":[0,0,0],\"coef\":-0.5}"));
        let q: MultiPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn unipoly_basics() {
        let p = UniPoly::new(vec![-1.875, 5.75, -4.5, 1.0]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval(0.5), 0.0);
        let d = p.derivative();
        assert_eq!(d.coeffs(), &[5.75, -9.0, 3.0]);
        assert_eq!(p.count_roots(0.0, 3.0), 3);
        let roots = p.isolate_roots(0.0, 3.0, 1e-10).unwrap();
        assert_eq!(roots.len(), 3);
        for (interval, want) in roots.iter().zip([0.5, 1.5, 2.5]) {
            let mid = 0.5 * (interval.0 + interval.1);
            assert!((mid - want).abs() <= 1e-9);
        }
    }
}

//! Linear dynamics: the hyperbolic generator, matrix exponentials, the
//! closed-form 3-D flow and its conserved quantity.
//!
//! The 3-D block generator produces the standard hyperbolic flow in the
//! (x, y) plane and leaves z untouched; `closed_form_flow3` is the oracle of
//! record for that system and `matrix_exp` is validated against it, never the
//! other way around.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Documented range for `matrix_exp`: inputs with `||A t||_inf` beyond this
/// are rejected instead of silently overflowing.
pub const MATRIX_EXP_NORM_LIMIT: f64 = 50.0;

/// Dense real square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("matrix entry".into()));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "row length {} does not match row count {dim}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Self::new(dim, entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.dim)
    }

    pub fn scaled(&self, c: f64) -> SquareMatrix {
        SquareMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        SquareMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        SquareMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimensions must agree");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix dim {} vs vector length {}",
                self.dim,
                x.len()
            )));
        }
        let n = self.dim;
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.get(i, j) * x[j];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Operator infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> f64 {
        self.rows()
            .map(|r| r.iter().map(|e| e.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0f64, |m, e| m.max(e.abs()))
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for SquareMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson {
            dim: self.dim,
            rows: self.rows().map(|r| r.to_vec()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SquareMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        if raw.rows.len() != raw.dim {
            return Err(D::Error::custom("row count does not match dim"));
        }
        SquareMatrix::from_rows(&raw.rows).map_err(D::Error::custom)
    }
}

/// The (3 + extra_dims)-dimensional generator: hyperbolic block
/// [[0,1,0],[1,0,0],[0,0,0]] in the first three coordinates, identity on the
/// remaining ones.
pub fn hyperbolic_generator(extra_dims: usize) -> SquareMatrix {
    let n = 3 + extra_dims;
    let mut a = SquareMatrix::zeros(n);
    a.set(0, 1, 1.0);
    a.set(1, 0, 1.0);
    for i in 3..n {
        a.set(i, i, 1.0);
    }
    a
}

/// exp(A t) by scaling-and-squaring over a truncated Taylor series.
///
/// The argument is scaled so `||B||_inf <= 1/4`, the series is summed to
/// machine precision and the result squared back up; relative accuracy is
/// better than 1e-12 on the documented range `||A t||_inf <= 50`.
pub fn matrix_exp(a: &SquareMatrix, t: f64) -> Result<SquareMatrix> {
    if !t.is_finite() {
        return Err(Error::NonFinite("time argument".into()));
    }
    let norm = a.inf_norm() * t.abs();
    if norm > MATRIX_EXP_NORM_LIMIT {
        return Err(Error::ExpOutOfRange { norm, limit: MATRIX_EXP_NORM_LIMIT });
    }

    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let b = a.scaled(t / f64::powi(2.0, squarings as i32));

    let mut result = SquareMatrix::identity(a.dim());
    let mut term = SquareMatrix::identity(a.dim());
    for k in 1..=40u32 {
        term = term.mul(&b).scaled(1.0 / f64::from(k));
        result = result.add(&term);
        if term.max_abs() <= f64::EPSILON * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mul(&result);
    }
    Ok(result)
}

/// exp(A t) x.
pub fn flow_point(a: &SquareMatrix, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    matrix_exp(a, t)?.matvec(x)
}

/// Closed-form flow of the 3-D hyperbolic system:
/// (x cosh t + y sinh t, x sinh t + y cosh t, z).
///
/// Oracle of record for `matrix_exp` on `hyperbolic_generator(0)`.
pub fn closed_form_flow3(t: f64, p: [f64; 3]) -> [f64; 3] {
    let (c, s) = (t.cosh(), t.sinh());
    [p[0] * c + p[1] * s, p[0] * s + p[1] * c, p[2]]
}

/// x^2 - y^2, constant along every orbit of the hyperbolic flow.
pub fn conserved_quantity(p: [f64; 3]) -> f64 {
    p[0] * p[0] - p[1] * p[1]
}

/// The generator applied pointwise: (y, x, 0).
pub fn ambient_field(p: [f64; 3]) -> [f64; 3] {
    [p[1], p[0], 0.0]
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain Taylor summation without scaling; independent of the
    /// scaling-and-squaring path it checks.
    fn series_exp_oracle(a: &SquareMatrix, t: f64, terms: usize) -> SquareMatrix {
        let b = a.scaled(t);
        let mut result = SquareMatrix::identity(a.dim());
        let mut term = SquareMatrix::identity(a.dim());
        for k in 1..=terms {
            term = term.mul(&b).scaled(1.0 / k as f64);
            result = result.add(&term);
        }
        result
    }

    fn seeded_rng() -> impl rand::Rng {
        use rand::SeedableRng;
        rand_chacha::ChaCha12Rng::seed_from_u64(0x11f1)
    }

    #[test]
    fn generator_matches_block_layout() {
        let a = hyperbolic_generator(0);
        let expected = [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.get(i, j), expected[i][j]);
            }
        }
        let row_sums: Vec<f64> = a.rows().map(|r| r.iter().sum()).collect();
        assert_eq!(row_sums, vec![1.0, 1.0, 0.0]);

        let a4 = hyperbolic_generator(1);
        assert_eq!(a4.dim(), 4);
        assert_eq!(a4.get(3, 3), 1.0);
        for i in 0..4 {
            for j in 0..4 {
                if i < 3 && j < 3 {
                    assert_eq!(a4.get(i, j), a.get(i, j));
                } else if (i, j) != (3, 3) {
                    assert_eq!(a4.get(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = SquareMatrix::zeros(3);
        let e = matrix_exp(&z, 7.0).unwrap();
        assert_eq!(e, SquareMatrix::identity(3));
    }

    #[test]
    fn exp_of_generator_matches_cosh_sinh() {
        let a = hyperbolic_generator(0);
        let e = matrix_exp(&a, 1.0).unwrap();
        let c1 = 1.0f64.cosh();
        let s1 = 1.0f64.sinh();
        let expected = [[c1, s1, 0.0], [s1, c1, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((e.get(i, j) - expected[i][j]).abs() <= 1e-14 * (1.0 + c1));
            }
        }
        // cross-check against the independent series oracle
        let oracle = series_exp_oracle(&a, 1.0, 30);
        for i in 0..3 {
            for j in 0..3 {
                assert!((e.get(i, j) - oracle.get(i, j)).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn exp_of_extended_generator_is_block_diagonal() {
        let e = matrix_exp(&hyperbolic_generator(1), 1.0).unwrap();
        let e3 = matrix_exp(&hyperbolic_generator(0), 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(e.get(i, j), e3.get(i, j));
            }
        }
        assert!((e.get(3, 3) - 1.0f64.exp()).abs() <= 1e-13);
        for i in 0..3 {
            assert_eq!(e.get(i, 3), 0.0);
            assert_eq!(e.get(3, i), 0.0);
        }
    }

    #[test]
    fn exp_rejects_out_of_range_arguments() {
        let a = SquareMatrix::from_rows(&[vec![60.0, 0.0], vec![0.0, -60.0]]).unwrap();
        match matrix_exp(&a, 1.0) {
            Err(Error::ExpOutOfRange { .. }) => {}
            other => panic!("expected range error, got {other:?}"),
        }
        // right at the edge still works
        let b = SquareMatrix::from_rows(&[vec![50.0]]).unwrap();
        let e = matrix_exp(&b, 1.0).unwrap();
        assert!((e.get(0, 0) - 50.0f64.exp()).abs() / 50.0f64.exp() <= 1e-12);
    }

    #[test]
    fn flow_point_examples() {
        let a = hyperbolic_generator(0);
        let p = flow_point(&a, 0.0, &[2.0, 3.0, 5.0]).unwrap();
        assert_eq!(p, vec![2.0, 3.0, 5.0]);

        let p = flow_point(&a, 1.0, &[1.0, 0.0, 5.0]).unwrap();
        assert!((p[0] - 1.0f64.cosh()).abs() <= 1e-13);
        assert!((p[1] - 1.0f64.sinh()).abs() <= 1e-13);
        assert!((p[2] - 5.0).abs() <= 1e-13);

        for &t in &[-2.0, -0.5, 0.3, 1.7] {
            let p = flow_point(&a, t, &[0.0, 0.0, 4.0]).unwrap();
            assert!(p[0].abs() <= 1e-15 && p[1].abs() <= 1e-15);
            assert_eq!(p[2], 4.0);
        }
    }

    #[test]
    fn flow_point_rejects_dimension_mismatch() {
        let a = hyperbolic_generator(0);
        assert!(matches!(
            flow_point(&a, 1.0, &[1.0, 2.0]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    /// High-order integration of the vector field (y, x, 0) as an oracle for
    /// the closed form.
    #[test]
    fn closed_form_matches_rk4_integration() {
        let field = |p: [f64; 3]| [p[1], p[0], 0.0];
        let mut p = [1.0, 0.0, 0.0];
        let steps = 20_000;
        let h = 1.0 / steps as f64;
        for _ in 0..steps {
            let k1 = field(p);
            let k2 = field([p[0] + 0.5 * h * k1[0], p[1] + 0.5 * h * k1[1], p[2]]);
            let k3 = field([p[0] + 0.5 * h * k2[0], p[1] + 0.5 * h * k2[1], p[2]]);
            let k4 = field([p[0] + h * k3[0], p[1] + h * k3[1], p[2]]);
            p[0] += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
            p[1] += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        }
        let q = closed_form_flow3(1.0, [1.0, 0.0, 0.0]);
        assert!((p[0] - q[0]).abs() <= 1e-12);
        assert!((p[1] - q[1]).abs() <= 1e-12);
        assert!((q[0] - 1.0f64.cosh()).abs() <= 1e-15);
        assert!((q[1] - 1.0f64.sinh()).abs() <= 1e-15);
    }

    #[test]
    fn closed_form_on_invariant_lines() {
        for &t in &[-1.3, 0.0, 0.4, 2.0] {
            let p = closed_form_flow3(t, [1.0, 1.0, 0.0]);
            assert!((p[0] - t.exp()).abs() <= 1e-13 * t.exp().max(1.0));
            assert!((p[1] - t.exp()).abs() <= 1e-13 * t.exp().max(1.0));
            let q = closed_form_flow3(t, [1.0, -1.0, 0.0]);
            assert!((q[0] - (-t).exp()).abs() <= 1e-13 * (-t).exp().max(1.0));
            assert!((q[1] + (-t).exp()).abs() <= 1e-13 * (-t).exp().max(1.0));
        }
    }

    #[test]
    fn conserved_quantity_examples() {
        assert_eq!(conserved_quantity([2.0, 1.0, 0.0]), 3.0);
        assert_eq!(conserved_quantity([0.7, 0.7, 9.0]), 0.0);
        for i in 0..20 {
            let t = -3.0 + 0.3 * i as f64;
            let p = closed_form_flow3(t, [2.0, 1.0, 0.0]);
            assert!((conserved_quantity(p) - 3.0).abs() <= 1e-10 * (1.0 + p[0] * p[0] + p[1] * p[1]));
        }
    }

    #[test]
    fn group_law_on_random_times() {
        use rand::Rng;
        let mut rng = seeded_rng();
        let a = hyperbolic_generator(0);
        for _ in 0..100 {
            let s: f64 = rng.random_range(-3.0..3.0);
            let t: f64 = rng.random_range(-3.0..3.0);
            let lhs = matrix_exp(&a, s + t).unwrap();
            let rhs = matrix_exp(&a, s).unwrap().mul(&matrix_exp(&a, t).unwrap());
            let scale = 1.0 + lhs.inf_norm();
            assert!(lhs.sub(&rhs).max_abs() <= 1e-10 * scale, "s={s} t={t}");
        }
    }

    #[test]
    fn matrix_exp_agrees_with_closed_form_oracle() {
        use rand::Rng;
        let mut rng = seeded_rng();
        let a = hyperbolic_generator(0);
        for _ in 0..100 {
            let t: f64 = rng.random_range(-3.0..3.0);
            let x = [
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
                rng.random_range(-10.0..10.0),
            ];
            let via_exp = flow_point(&a, t, &x).unwrap();
            let closed = closed_form_flow3(t, x);
            let scale = 1.0 + (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            for i in 0..3 {
                assert!((via_exp[i] - closed[i]).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn z_plane_and_quadrants_are_invariant() {
        use rand::Rng;
        let mut rng = seeded_rng();
        for _ in 0..100 {
            let x: f64 = rng.random_range(-5.0..5.0);
            let y: f64 = rng.random_range(-5.0..5.0);
            if (x.abs() - y.abs()).abs() < 1e-3 {
                continue; // skip points too close to the cone
            }
            let z: f64 = rng.random_range(-2.0..2.0);
            let s_right = (x - y.abs()).signum();
            let s_left = (-x - y.abs()).signum();
            for i in 0..10 {
                let t = -2.0 + 0.4 * i as f64;
                let p = closed_form_flow3(t, [x, y, z]);
                assert_eq!(p[2], z);
                assert_eq!((p[0] - p[1].abs()).signum(), s_right);
                assert_eq!((-p[0] - p[1].abs()).signum(), s_left);
            }
        }
    }

    #[test]
    fn matrix_json_round_trips() {
        let a = hyperbolic_generator(1);
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with("{\"dim\":4,\"rows\":[["));
        let b: SquareMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}

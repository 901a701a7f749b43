//! Run configuration: one flat JSON document mirrored by the CLI flags,
//! hashed into every artifact for provenance.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polynomials::{compute_m, Box2};

/// Tolerance map keys used by the verification driver.
pub const SUITE_NAMES: [&str; 8] = [
    "taming",
    "transversality",
    "graphlike",
    "koopman",
    "subspace",
    "equivariance",
    "invariance",
    "conservation",
];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Number of isolated equilibria.
    pub l: usize,
    /// Snake amplitude, in (0, 1).
    pub a: f64,
    /// Embedding degree; None means the construction default 2l - 1.
    pub m: Option<usize>,
    /// The taming constant M; None means computed from the certifying box.
    pub m_const: Option<f64>,
    /// Certifying box [x_lo, x_hi, z_lo, z_hi]; None means the default box
    /// around the turns.
    pub m_box: Option<[f64; 4]>,
    /// Strictness margin applied when computing M.
    pub m_margin: f64,
    /// Heights of the cross-sections used by the taming sweep.
    pub y_grid: Vec<f64>,
    /// Per-suite tolerances.
    pub tolerances: BTreeMap<String, f64>,
    /// Seed of the single random generator used by sampled suites.
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Section height used by the plots.
    pub y_value: f64,
    /// Radius cap for meshes, plots and sampled points.
    pub plot_radius: f64,
    /// Sampling density (points per unit) for meshes and curve exports.
    pub density: f64,
    /// Contour levels drawn by the section figure.
    pub contour_levels: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tolerances = SUITE_NAMES
            .iter()
            .map(|&name| {
                let tol = match name {
                    "taming" => 1e-8,
                    "transversality" => 1e-6,
                    "graphlike" => 1e-7,
                    "koopman" => 1e-9,
                    "subspace" => 1e-8,
                    "equivariance" => 1e-8,
                    "invariance" => 1e-6,
                    "conservation" => 1e-10,
                    _ => unreachable!(),
                };
                (name.to_owned(), tol)
            })
            .collect();
        Self {
            l: 2,
            a: 0.5,
            m: None,
            m_const: None,
            m_box: None,
            m_margin: 0.05,
            y_grid: vec![0.0, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0],
            tolerances,
            seed: 0,
            output_dir: PathBuf::from("out"),
            y_value: 0.0,
            plot_radius: 2.5,
            density: 10.0,
            contour_levels: vec![-4.0, -2.0, -1.0, -0.5, -0.2, 0.2, 0.5, 1.0, 2.0, 4.0],
        }
    }
}

/// Default certifying box: x within the padded amplitude, z within a
/// quarter-unit pad of the turn heights [1/2, l - 3/2].
pub fn default_m_box(l: usize, a: f64) -> Result<Box2> {
    Box2::new(-a - 0.05, a + 0.05, 0.25, l as f64 - 1.25)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l < 2 {
            return Err(Error::InvalidParameter(format!("l must be >= 2, got {}", self.l)));
        }
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::InvalidParameter(format!("a must lie in (0, 1), got {}", self.a)));
        }
        if let Some(m) = self.m_const {
            if !(m > 0.0) {
                return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
            }
        }
        for (name, tol) in &self.tolerances {
            if !(*tol > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "tolerance {name} must be positive, got {tol}"
                )));
            }
        }
        if !(self.plot_radius > 0.0 && self.density > 0.0) {
            return Err(Error::InvalidParameter("plot_radius and density must be positive".into()));
        }
        if self.y_grid.is_empty() {
            return Err(Error::InvalidParameter("y_grid must not be empty".into()));
        }
        self.resolve_m_box()?;
        Ok(())
    }

    pub fn embed_degree(&self) -> usize {
        self.m.unwrap_or(2 * self.l - 1)
    }

    pub fn resolve_m_box(&self) -> Result<Box2> {
        match self.m_box {
            Some([x_lo, x_hi, z_lo, z_hi]) => Box2::new(x_lo, x_hi, z_lo, z_hi),
            None => default_m_box(self.l, self.a),
        }
    }

    /// The taming constant in force: explicit, or computed from the box
    /// with the strictness margin.
    pub fn resolve_m_const(&self) -> Result<f64> {
        match self.m_const {
            Some(m) => Ok(m),
            None => compute_m(self.l, &self.resolve_m_box()?, self.m_margin),
        }
    }

    pub fn tolerance(&self, suite: &str) -> f64 {
        self.tolerances
            .get(suite)
            .copied()
            .unwrap_or_else(|| Self::default().tolerances[suite])
    }

    /// Hash of the canonical JSON form with the output location normalized
    /// away; timestamps never enter artifacts, so identical config and seed
    /// reproduce identical bytes wherever they are written.
    pub fn config_hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

//! JSON model configuration.

use std::path::Path;

use plsigma::catalog::{self, CatalogEntry};
use plsigma::checks::Sampling;
use plsigma::lattice::StudySettings;
use plsigma::{Cocommutator, StructureConstants, Tolerances};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A bialgebra plus numerical settings. Indices are 0-based.
///
/// `bracket` lists `(i, j, k, c_ij^k)` and `cocommutator` lists
/// `(i, j, k, f^{ij}_k)`; the antisymmetric partner of each entry is implied
/// and must not be listed. `r_matrix` lists `(i, j, r^{ij})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: String,
    pub dimension: usize,
    #[serde(default)]
    pub bracket: Vec<(usize, usize, usize, f64)>,
    #[serde(default)]
    pub cocommutator: Vec<(usize, usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_matrix: Option<Vec<(usize, usize, f64)>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub lattice: StudySettings,
}

impl ModelConfig {
    /// Parse and validate. Schema errors carry serde's line and column.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// A config file path, or `catalog:<name>` for a built-in entry.
    pub fn load(source: &str) -> Result<Self, CliError> {
        if let Some(name) = source.strip_prefix("catalog:") {
            let entry = catalog::lookup(name)
                .ok_or_else(|| CliError::Input(format!("unknown catalog entry `{name}`")))?;
            return Ok(Self::from_entry(&entry));
        }
        let text = std::fs::read_to_string(Path::new(source))
            .map_err(|e| CliError::Input(format!("cannot read {source}: {e}")))?;
        Self::from_json(&text)
    }

    pub fn from_entry(entry: &CatalogEntry) -> Self {
        Self {
            name: entry.name.clone(),
            dimension: entry.dimension,
            bracket: entry.bracket.clone(),
            cocommutator: entry.cocommutator.clone(),
            r_matrix: entry.r_matrix.clone(),
            tolerances: Tolerances::default(),
            sampling: Sampling::default(),
            lattice: StudySettings::default(),
        }
    }

    pub fn constants(&self) -> Result<StructureConstants, CliError> {
        StructureConstants::from_entries(self.dimension, &self.bracket)
            .map_err(|e| CliError::Input(format!("bracket: {e}")))
    }

    pub fn cocommutator(&self) -> Result<Cocommutator, CliError> {
        Cocommutator::from_entries(self.dimension, &self.cocommutator)
            .map_err(|e| CliError::Input(format!("cocommutator: {e}")))
    }

    pub fn r(&self) -> Option<nalgebra::DMatrix<f64>> {
        self.r_matrix.as_ref().map(|entries| {
            let mut r = nalgebra::DMatrix::zeros(self.dimension, self.dimension);
            for &(i, j, v) in entries {
                r[(i, j)] = v;
            }
            r
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::Input(format!("{field}: {msg}")));
        if self.dimension == 0 {
            return bad("dimension", "must be positive".into());
        }
        self.constants()?;
        self.cocommutator()?;
        if let Some(entries) = &self.r_matrix {
            let n = self.dimension;
            let mut seen = vec![false; n * n];
            for &(i, j, v) in entries {
                if i >= n || j >= n {
                    return bad("r_matrix", format!("index ({i}, {j}) out of range for dimension {n}"));
                }
                if !v.is_finite() {
                    return bad("r_matrix", format!("non-finite value at ({i}, {j})"));
                }
                if std::mem::replace(&mut seen[i * n + j], true) {
                    return bad("r_matrix", format!("duplicate entry for ({i}, {j})"));
                }
            }
        }
        let t = &self.tolerances;
        for (field, v) in [
            ("tol", t.tol),
            ("antisymmetry", t.antisymmetry),
            ("chart_condition", t.chart_condition),
            ("coboundary_residual", t.coboundary_residual),
            ("fd_step", t.fd_step),
            ("semisimple_det", t.semisimple_det),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("tolerances.{field}"), format!("must be positive, got {v}"));
            }
        }
        let s = &self.sampling;
        if s.points == 0 || s.derivative_points == 0 {
            return bad("sampling", "point counts must be positive".into());
        }
        if !(s.half_width.is_finite() && s.half_width > 0.0) {
            return bad("sampling.half_width", format!("must be positive, got {}", s.half_width));
        }
        let l = &self.lattice;
        if l.sizes.len() < 2 || l.sizes.iter().any(|&m| m < 3) {
            return bad("lattice.sizes", "need at least two grids of 3 or more nodes".into());
        }
        if !(l.amplitude.is_finite() && l.amplitude >= 0.0) {
            return bad("lattice.amplitude", format!("must be non-negative, got {}", l.amplitude));
        }
        if let Some(x0) = &l.x0 {
            if x0.len() != self.dimension || x0.iter().any(|v| !v.is_finite()) {
                return bad("lattice.x0", format!("need {} finite coordinates", self.dimension));
            }
        }
        Ok(())
    }
}

//! JSON problem configuration.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::admissibility::{CandidateMatrix, EXACT_LEVEL_TOL};
use crate::error::{Error, Result};
use crate::operator::OperatorSpec;
use crate::perron::{BoundaryData, DomainSpec};

/// Smallest `δ` used by any of the tabulated examples.
pub const DEFAULT_DELTA: f64 = 0.001;
pub const DEFAULT_S_MAX: f64 = 1e6;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_C2: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub level_tol: f64,
    pub samples: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: DEFAULT_REL_TOL,
            level_tol: EXACT_LEVEL_TOL,
            samples: crate::verification::DEFAULT_SAMPLES,
        }
    }
}

/// An ellipsoidal domain with its boundary data, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainFile {
    #[serde(flatten)]
    pub domain: DomainSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<BoundaryData>,
}

impl DomainFile {
    pub fn boundary_data(&self) -> BoundaryData {
        self.phi.clone().unwrap_or_else(|| BoundaryData::zero(self.domain.dim()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let d: DomainFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        d.domain.validate()?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerronSection {
    #[serde(flatten)]
    pub domain: DomainFile,
    /// Prescribed constant in the original frame; `c_star + 1` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub operator: OperatorSpec,
    pub matrix: CandidateMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub c1: f64,
    #[serde(default = "default_c2")]
    pub c2: f64,
    #[serde(default = "default_s_max")]
    pub s_max: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perron: Option<PerronSection>,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}
fn default_c2() -> f64 {
    DEFAULT_C2
}
fn default_s_max() -> f64 {
    DEFAULT_S_MAX
}

impl ProblemConfig {
    pub fn new(operator: OperatorSpec, matrix: CandidateMatrix) -> Self {
        ProblemConfig {
            operator,
            matrix,
            b: None,
            delta: DEFAULT_DELTA,
            c1: 0.0,
            c2: DEFAULT_C2,
            s_max: DEFAULT_S_MAX,
            tolerances: Tolerances::default(),
            perron: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ProblemConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn dim(&self) -> usize {
        self.operator.dim()
    }

    pub fn linear_term(&self) -> Vec<f64> {
        self.b.clone().unwrap_or_else(|| vec![0.0; self.dim()])
    }

    /// Schema checks beyond what deserialization enforces.
    pub fn validate(&self) -> Result<()> {
        self.operator.validate()?;
        let n = self.dim();
        let check = |got: usize| {
            if got == n {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { expected: n, got })
            }
        };
        check(self.matrix.dim())?;
        if let Some(b) = &self.b {
            check(b.len())?;
        }
        if let Some(p) = &self.perron {
            check(p.domain.domain.dim())?;
            p.domain.domain.validate()?;
        }
        if !(self.delta >= 0.0) {
            return Err(Error::Invalid(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(self.c2 >= 1.0) {
            return Err(Error::Invalid(format!("c2 must be >= 1, got {}", self.c2)));
        }
        if !(self.s_max > 1.0) {
            return Err(Error::Invalid(format!("s_max must exceed 1, got {}", self.s_max)));
        }
        let t = &self.tolerances;
        if !(t.rel_tol > 0.0 && t.rel_tol < 1.0) || !(t.level_tol > 0.0) || t.samples == 0 {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        Ok(())
    }
}

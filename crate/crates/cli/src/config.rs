//! Run configuration: JSON schema, defaults, and flag overrides.

use serde::{Deserialize, Serialize};

use pairbound::grid::{Bc, Symmetry};
use pairbound::potentials::PotentialSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub potential: PotentialSpec,
    #[serde(default)]
    pub grid1d: Grid1dConfig,
    #[serde(default)]
    pub grid2d: Grid2dConfig,
    #[serde(default)]
    pub certificate: CertificateConfig,
    #[serde(default)]
    pub counting: CountingConfig,
    #[serde(default)]
    pub weyl: WeylConfig,
    /// Output directory for reports and data files.
    #[serde(default = "default_outputs")]
    pub outputs: String,
}

fn default_outputs() -> String {
    "out".to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid1dConfig {
    pub x_max: f64,
    pub n_points: usize,
    #[serde(default = "default_bc_origin")]
    pub bc_origin: Bc,
}

fn default_bc_origin() -> Bc {
    Bc::Neumann
}

impl Default for Grid1dConfig {
    fn default() -> Self {
        Self { x_max: 40.0, n_points: 40_000, bc_origin: Bc::Neumann }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2dConfig {
    #[serde(rename = "X")]
    pub x_extent: f64,
    pub h: f64,
    #[serde(default = "default_outer_bc")]
    pub outer_bc: Bc,
    #[serde(default = "default_symmetry")]
    pub symmetry: Symmetry,
    /// Margin below the essential threshold; when absent it is derived from
    /// a coarse-grid Richardson estimate of the discretization error.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(default = "default_true")]
    pub stability: bool,
    #[serde(default)]
    pub q_minus_full_dirichlet: bool,
}

fn default_outer_bc() -> Bc {
    Bc::Dirichlet
}

fn default_symmetry() -> Symmetry {
    Symmetry::Plus
}

fn default_true() -> bool {
    true
}

impl Default for Grid2dConfig {
    fn default() -> Self {
        Self {
            x_extent: 20.0,
            h: 0.05,
            outer_bc: Bc::Dirichlet,
            symmetry: Symmetry::Plus,
            margin: None,
            stability: true,
            q_minus_full_dirichlet: false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateConfig {
    pub rho: f64,
    /// Largest cutoff scale the doubling schedule may reach.
    pub n_max: usize,
}

impl Default for CertificateConfig {
    fn default() -> Self {
        Self { rho: 0.75, n_max: 256 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingConfig {
    #[serde(rename = "R")]
    pub r_values: Vec<f64>,
}

impl Default for CountingConfig {
    fn default() -> Self {
        Self { r_values: vec![5.0, 10.0, 20.0] }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeylConfig {
    pub k: f64,
    pub n_values: Vec<usize>,
}

impl Default for WeylConfig {
    fn default() -> Self {
        Self { k: 0.0, n_values: vec![8, 16, 32] }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.schema != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema version {} (expected {SCHEMA_VERSION})",
                self.schema
            ));
        }
        self.potential.validate().map_err(|e| e.to_string())?;
        if !(self.grid1d.x_max > 0.0) || self.grid1d.n_points < 8 {
            return Err(format!(
                "grid1d needs x_max > 0 and n_points >= 8, got x_max = {}, n_points = {}",
                self.grid1d.x_max, self.grid1d.n_points
            ));
        }
        if !(self.grid2d.x_extent > 0.0 && self.grid2d.h > 0.0) {
            return Err("grid2d needs X > 0 and h > 0".to_string());
        }
        if let Some(m) = self.grid2d.margin {
            if !(m > 0.0) {
                return Err(format!("grid2d margin must be positive, got {m}"));
            }
        }
        if !(self.certificate.rho > 0.5 && self.certificate.rho < 1.0) {
            return Err(format!(
                "certificate rho must lie in (0.5, 1), got {}",
                self.certificate.rho
            ));
        }
        if self.counting.r_values.iter().any(|r| !(*r > 0.0)) {
            return Err("counting R values must be positive".to_string());
        }
        if self.weyl.k < 0.0 {
            return Err(format!("weyl k must be >= 0, got {}", self.weyl.k));
        }
        if self.outputs.is_empty() {
            return Err("outputs directory must not be empty".to_string());
        }
        Ok(())
    }
}

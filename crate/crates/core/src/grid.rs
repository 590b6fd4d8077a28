//! Cell-centered grids for the half-line and the folded triangle.
//!
//! Nodes sit at `x_i = (i + 1/2) h`, never at the origin, so potentials that
//! blow up at `x = 0` are never sampled there. Boundary conditions are
//! realized by mirror ghost values: symmetric for Neumann, antisymmetric for
//! Dirichlet, both second-order accurate for eigenvalues.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Boundary condition at a grid edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bc {
    Neumann,
    Dirichlet,
}

impl Bc {
    /// Diagonal correction relative to the interior stencil value `2/h²`:
    /// mirror ghost `u(-x) = u(x)` removes `1/h²`, antisymmetric ghost
    /// `u(-x) = -u(x)` adds `1/h²`.
    pub(crate) fn diag_shift(self, inv_h2: f64) -> f64 {
        match self {
            Bc::Neumann => -inv_h2,
            Bc::Dirichlet => inv_h2,
        }
    }
}

/// Uniform cell-centered grid on `(0, x_max)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_max: f64,
    pub n_points: usize,
    pub bc_origin: Bc,
    pub bc_outer: Bc,
}

impl Grid1D {
    pub fn new(x_max: f64, n_points: usize, bc_origin: Bc, bc_outer: Bc) -> Result<Self> {
        if !(x_max > 0.0) || !x_max.is_finite() {
            return Err(Error::Precondition(format!(
                "grid needs x_max > 0, got {x_max}"
            )));
        }
        if n_points < 8 {
            return Err(Error::Precondition(format!(
                "grid needs at least 8 points, got {n_points}"
            )));
        }
        Ok(Self { x_max, n_points, bc_origin, bc_outer })
    }

    /// Operator `h` of the pair problem: Neumann at the origin.
    pub fn neumann(x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_max, n_points, Bc::Neumann, Bc::Dirichlet)
    }

    /// Operator `h₀`: Dirichlet at the origin.
    pub fn dirichlet(x_max: f64, n_points: usize) -> Result<Self> {
        Self::new(x_max, n_points, Bc::Dirichlet, Bc::Dirichlet)
    }

    pub fn spacing(&self) -> f64 {
        self.x_max / self.n_points as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }
}

/// Exchange-parity sector of the two-particle problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Even in the relative coordinate: Neumann on the edge `x₁ = 0`.
    Plus,
    /// Odd in the relative coordinate: Dirichlet on the edge `x₁ = 0`.
    Minus,
}

/// Cell-centered grid on the truncated triangle `{0 < x₁ ≤ x₂ < X}`.
///
/// Nodes are pairs `((i + 1/2) h, (j + 1/2) h)` with `i ≤ j < m`, `m = X/h`;
/// the node count is `m (m + 1) / 2`. The diagonal `x₁ = x₂` carries a
/// Neumann fold for both symmetry sectors: it is the image of the half-line
/// endpoints of the original coordinates, where the form domain imposes
/// natural conditions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Grid2D {
    pub x_extent: f64,
    pub h: f64,
    pub symmetry: Symmetry,
    pub outer_bc: Bc,
    /// Literal reading of the antisymmetric sector's form domain, with
    /// Dirichlet on the whole boundary including the diagonal. Off by
    /// default; the parity construction only forces vanishing on `x₁ = 0`.
    #[serde(default)]
    pub q_minus_full_dirichlet: bool,
}

impl Grid2D {
    pub fn new(x_extent: f64, h: f64, symmetry: Symmetry, outer_bc: Bc) -> Result<Self> {
        if !(x_extent > 0.0 && h > 0.0) {
            return Err(Error::Precondition(format!(
                "grid needs X > 0 and h > 0, got X = {x_extent}, h = {h}"
            )));
        }
        let m = x_extent / h;
        if (m - m.round()).abs() > 1e-9 * m.max(1.0) {
            return Err(Error::Precondition(format!(
                "X/h must be integral, got {x_extent}/{h} = {m}"
            )));
        }
        if m.round() < 4.0 {
            return Err(Error::Precondition(format!(
                "grid needs at least 4 lines, got {}",
                m.round()
            )));
        }
        Ok(Self { x_extent, h, symmetry, outer_bc, q_minus_full_dirichlet: false })
    }

    /// Number of node lines `m = X/h`.
    pub fn lines(&self) -> usize {
        (self.x_extent / self.h).round() as usize
    }

    /// Total node count `m (m + 1) / 2`.
    pub fn node_count(&self) -> usize {
        let m = self.lines();
        m * (m + 1) / 2
    }

    /// Linear index of node `(i, j)`, `i ≤ j`: lines ordered by `j`, nodes
    /// within a line by `i`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= j && j < self.lines());
        j * (j + 1) / 2 + i
    }

    pub fn coord(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.h
    }
}

//! The two-particle operators `Q₊`/`Q₋` on the truncated triangle
//! `{0 < x₁ ≤ x₂ < X}` in rotated coordinates.
//!
//! The triangle with a Neumann fold on the diagonal is realized exactly as
//! the swap-symmetric subspace of the full square with the symmetrized
//! potential `v(min(x₁, x₂))`: in the orthonormal symmetrized basis the
//! folded matrix keeps the 5-point couplings, with weight `√2` on edges
//! adjacent to the fold line. This keeps the matrix exactly symmetric and
//! makes the Dirichlet/Neumann dominance between the two parity sectors a
//! per-index matrix inequality.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::grid::{Bc, Grid2D, Symmetry};
use crate::linalg::lanczos::{shift_invert_eigs, EigenPairs, LanczosOptions, Want};
use crate::linalg::skyline::SkylineSym;
use crate::linalg::sparse::Csr;
use crate::oned::EigResult1D;
use crate::potentials::PotentialSpec;
use crate::Result;

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Treatment of internal cuts when assembling on a sub-region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutBc {
    /// Natural (Neumann) cut: blocked directions contribute nothing.
    Neumann,
    /// Ghost-zero Dirichlet cut: blocked directions keep their diagonal
    /// weight, couplings dropped.
    GhostZero,
}

/// Assembled folded operator on (a sub-region of) the triangle.
#[derive(Clone, Debug)]
pub struct Operator2D {
    /// Compressed dimension (number of active nodes).
    pub n: usize,
    /// Number of node lines `m` of the ambient triangle.
    pub lines: usize,
    pub h: f64,
    /// Map from full-triangle index `j(j+1)/2 + i` to compressed index.
    index_of: Vec<u32>,
    triplets: Vec<(u32, u32, f64)>,
    pub csr: Csr,
}

const ABSENT: u32 = u32::MAX;

impl Operator2D {
    /// Compressed index of node `(i, j)` if active.
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        let p = self.index_of[j * (j + 1) / 2 + i];
        (p != ABSENT).then_some(p as usize)
    }

    /// Envelope factorization input (row-envelope storage of the triplets).
    pub fn skyline(&self) -> Result<SkylineSym> {
        SkylineSym::from_upper_triplets(self.n, &self.triplets)
    }

    /// Lower Gershgorin bound of the assembled matrix.
    pub fn gershgorin_low(&self) -> f64 {
        let mut lo = f64::INFINITY;
        for r in 0..self.n {
            let mut diag = 0.0;
            let mut radius = 0.0;
            for p in self.csr.row_ptr[r]..self.csr.row_ptr[r + 1] {
                if self.csr.cols[p] as usize == r {
                    diag = self.csr.vals[p];
                } else {
                    radius += self.csr.vals[p].abs();
                }
            }
            lo = lo.min(diag - radius);
        }
        lo
    }
}

/// Assemble the folded operator on the nodes of the triangle selected by
/// `mask`, with per-node potential `potential(i, j)`. Real edges carry the
/// symmetry/outer conditions; mask boundaries carry `cut`.
pub fn assemble_region<P, M>(
    lines: usize,
    h: f64,
    symmetry_bc: Bc,
    outer_bc: Bc,
    antisym_fold: bool,
    cut: CutBc,
    mask: M,
    mut potential: P,
) -> Result<Operator2D>
where
    P: FnMut(usize, usize) -> Result<f64>,
    M: Fn(usize, usize) -> bool,
{
    let m = lines;
    let inv_h2 = 1.0 / (h * h);
    let full = m * (m + 1) / 2;
    let mut index_of = vec![ABSENT; full];
    let mut n = 0u32;
    for j in 0..m {
        for i in 0..=j {
            if (i < j || !antisym_fold) && mask(i, j) {
                index_of[j * (j + 1) / 2 + i] = n;
                n += 1;
            }
        }
    }
    let n = n as usize;
    if n == 0 {
        return Err(Error::Domain("empty assembly region".into()));
    }
    let active = |i: usize, j: usize| -> bool {
        i <= j && j < m && index_of[j * (j + 1) / 2 + i] != ABSENT
    };
    // per-direction diagonal contribution for a blocked direction
    let edge_c = |bc: Bc| -> f64 {
        match bc {
            Bc::Neumann => 0.0,
            Bc::Dirichlet => 2.0 * inv_h2,
        }
    };
    let cut_c = match cut {
        CutBc::Neumann => 0.0,
        CutBc::GhostZero => inv_h2,
    };

    let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(3 * n);
    for j in 0..m {
        for i in 0..=j {
            if !active(i, j) {
                continue;
            }
            let q = index_of[j * (j + 1) / 2 + i];
            let mut diag = potential(i, j)?;
            if !diag.is_finite() {
                return Err(Error::NonFinitePotential { index: q as usize, x: (i as f64 + 0.5) * h });
            }
            if i == j {
                // fold node: the up and left directions carry their mirror
                // twins, so every contribution is doubled and the coupling
                // weight is sqrt(2) in the orthonormal folded basis
                if j + 1 == m {
                    diag += 2.0 * edge_c(outer_bc);
                } else if active(i, j + 1) {
                    diag += 2.0 * inv_h2;
                    triplets.push((q, index_of[(j + 1) * (j + 2) / 2 + i], -SQRT2 * inv_h2));
                } else {
                    diag += 2.0 * cut_c;
                }
                if i == 0 {
                    diag += 2.0 * edge_c(symmetry_bc);
                } else if active(i - 1, j) {
                    diag += 2.0 * inv_h2;
                    // coupling emitted by (i-1, j) as its right neighbor
                } else {
                    diag += 2.0 * cut_c;
                }
            } else {
                // left
                if i == 0 {
                    diag += edge_c(symmetry_bc);
                } else if active(i - 1, j) {
                    diag += inv_h2;
                } else {
                    diag += cut_c;
                }
                // right: (i+1, j), in-triangle since i+1 <= j
                if i + 1 == j && antisym_fold {
                    diag += inv_h2; // fold node removed: ghost zero
                } else if active(i + 1, j) {
                    diag += inv_h2;
                    let w = if i + 1 == j { -SQRT2 * inv_h2 } else { -inv_h2 };
                    triplets.push((q, index_of[j * (j + 1) / 2 + i + 1], w));
                } else {
                    diag += cut_c;
                }
                // down: (i, j-1), in-triangle since j-1 >= i
                if j == i + 1 && antisym_fold {
                    diag += inv_h2;
                } else if active(i, j - 1) {
                    diag += inv_h2;
                    // coupling emitted by (i, j-1) as its up neighbor
                } else {
                    diag += cut_c;
                }
                // up
                if j + 1 == m {
                    diag += edge_c(outer_bc);
                } else if active(i, j + 1) {
                    diag += inv_h2;
                    triplets.push((q, index_of[(j + 1) * (j + 2) / 2 + i], -inv_h2));
                } else {
                    diag += cut_c;
                }
            }
            triplets.push((q, q, diag));
        }
    }
    let csr = Csr::from_upper_triplets(n, &triplets)?;
    Ok(Operator2D { n, lines: m, h, index_of, triplets, csr })
}

/// Assemble `Q₊` or `Q₋` on the full truncated triangle of `grid`.
pub fn assemble_q2d(spec: &PotentialSpec, grid: &Grid2D) -> Result<Operator2D> {
    spec.validate()?;
    let m = grid.lines();
    let h = grid.h;
    let symmetry_bc = match grid.symmetry {
        Symmetry::Plus => Bc::Neumann,
        Symmetry::Minus => Bc::Dirichlet,
    };
    let antisym_fold = grid.symmetry == Symmetry::Minus && grid.q_minus_full_dirichlet;
    let mut vcache: Vec<Option<f64>> = vec![None; m];
    assemble_region(
        m,
        h,
        symmetry_bc,
        grid.outer_bc,
        antisym_fold,
        CutBc::Neumann,
        |_, _| true,
        |i, _| {
            if let Some(v) = vcache[i] {
                return Ok(v);
            }
            let v = spec.eval_v((i as f64 + 0.5) * h)?;
            vcache[i] = Some(v);
            Ok(v)
        },
    )
}

/// `k` smallest eigenpairs of an assembled operator, via a factorization at
/// a certified below-spectrum shift.
pub fn lowest_eigs(op: &Operator2D, k: usize, opts: &LanczosOptions) -> Result<EigenPairs> {
    if k == 0 || k >= op.n {
        return Err(Error::Precondition(format!(
            "lowest_eigs needs 0 < k < dimension, got k = {k}, n = {}",
            op.n
        )));
    }
    let lo = op.gershgorin_low();
    let sigma = lo - 0.01 * lo.abs().max(1.0);
    let sky = op.skyline()?;
    let factors = sky.factorize_shifted(sigma)?;
    shift_invert_eigs(&op.csr, &factors, Want::KSmallest(k), opts)
}

/// Eigenvalues below `sigma` together with the exact count from the
/// factorization inertia. The shift sits in the spectral window of
/// interest, so the targeted eigenvalues are the extreme ones of the
/// inverse. A shift landing numerically on an eigenvalue is nudged down a
/// few times before giving up.
pub fn eigs_below(op: &Operator2D, sigma: f64, opts: &LanczosOptions) -> Result<(usize, EigenPairs)> {
    let sky = op.skyline()?;
    let mut shift = sigma;
    let mut last_err = None;
    for attempt in 0..3 {
        match sky.factorize_shifted(shift) {
            Ok(factors) => {
                let count = factors.negative;
                if count == 0 {
                    return Ok((
                        0,
                        EigenPairs { values: vec![], vectors: vec![], residuals: vec![], iterations: 0 },
                    ));
                }
                let pairs = shift_invert_eigs(&op.csr, &factors, Want::BelowShift(count), opts)?;
                return Ok((count, pairs));
            }
            Err(e) => {
                last_err = Some(e);
                shift -= (sigma.abs().max(1.0)) * 1e-6 * 10f64.powi(attempt);
            }
        }
    }
    Err(last_err.unwrap())
}

/// Stability metadata of [`discrete_below`]: the same window recomputed on
/// a 1.5× larger truncation and on a halved spacing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub count_larger_x: usize,
    pub count_finer_h: usize,
    /// Per-eigenvalue movement against the base list (index-matched).
    pub shift_larger_x: Vec<f64>,
    pub shift_finer_h: Vec<f64>,
    /// False when a count changed or an eigenvalue moved by more than
    /// `10 × margin`.
    pub stable: bool,
}

/// Discrete spectrum below `eps0_ref - margin` on the given grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumReport2D {
    pub symmetry: Symmetry,
    pub x_extent: f64,
    pub h: f64,
    pub eps0_ref: f64,
    pub margin: f64,
    /// Sorted ascending; every entry is `< eps0_ref - margin`.
    pub eigenvalues_below: Vec<f64>,
    pub count: usize,
    /// Independent count from the factorization inertia at the same shift.
    pub count_by_inertia: usize,
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityReport>,
    /// Eigenvectors of the base solve (triangle node order); not embedded
    /// in JSON reports.
    #[serde(skip)]
    pub vectors: Vec<Vec<f64>>,
}

/// Compute every eigenvalue below `eps0_ref - margin` for the sector chosen
/// by the grid, with optional refinement stability checks (`X → 1.5X`,
/// `h → h/2`).
pub fn discrete_below(
    spec: &PotentialSpec,
    grid: &Grid2D,
    eps0_ref: f64,
    margin: f64,
    with_stability: bool,
    opts: &LanczosOptions,
) -> Result<SpectrumReport2D> {
    if !(margin > 0.0) {
        return Err(Error::Precondition(format!("margin must be positive, got {margin}")));
    }
    let sigma = eps0_ref - margin;
    let solve = |g: &Grid2D| -> Result<(usize, EigenPairs)> {
        let op = assemble_q2d(spec, g)?;
        eigs_below(&op, sigma, opts)
    };
    let (count_by_inertia, pairs) = solve(grid)?;
    let count = pairs.values.len();

    let stability = if with_stability {
        let bigger = Grid2D {
            x_extent: grid.x_extent * 1.5,
            ..grid.clone()
        };
        let finer = Grid2D { h: grid.h / 2.0, ..grid.clone() };
        let (_, p_big) = solve(&bigger)?;
        let (_, p_fine) = solve(&finer)?;
        let shift_of = |other: &EigenPairs| -> Vec<f64> {
            pairs
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| b - a)
                .collect()
        };
        let shift_larger_x = shift_of(&p_big);
        let shift_finer_h = shift_of(&p_fine);
        let moved = shift_larger_x
            .iter()
            .chain(shift_finer_h.iter())
            .any(|d| d.abs() > 10.0 * margin);
        let stable =
            p_big.values.len() == count && p_fine.values.len() == count && !moved;
        Some(StabilityReport {
            count_larger_x: p_big.values.len(),
            count_finer_h: p_fine.values.len(),
            shift_larger_x,
            shift_finer_h,
            stable,
        })
    } else {
        None
    };

    Ok(SpectrumReport2D {
        symmetry: grid.symmetry,
        x_extent: grid.x_extent,
        h: grid.h,
        eps0_ref,
        margin,
        eigenvalues_below: pairs.values,
        count,
        count_by_inertia,
        residuals: pairs.residuals,
        stability,
        vectors: pairs.vectors,
    })
}

/// Relative residual `‖(Q₊ - (ε₀ + k²)) φ_n‖ / ‖φ_n‖` of the spectral test
/// family `φ_n(x₁, x₂) = ψ₀(x₁) τ(n - x₁) · cos(k x₂) τ(x₂ - n) τ(2n - x₂)`,
/// sampled on the grid and applied through the assembled operator. Decreases
/// toward zero in `n`, witnessing `ε₀ + k²` in the spectrum.
pub fn weyl_residual(
    spec: &PotentialSpec,
    psi0: &EigResult1D,
    k: f64,
    n: usize,
    grid: &Grid2D,
) -> Result<f64> {
    if k < 0.0 {
        return Err(Error::Precondition(format!("momentum k must be >= 0, got {k}")));
    }
    if n < 2 {
        return Err(Error::Precondition(format!("scale n must be >= 2, got {n}")));
    }
    if 2.0 * n as f64 >= grid.x_extent {
        return Err(Error::Domain(format!(
            "test-function support [{}, {}] exceeds the grid (X = {})",
            n - 1,
            2 * n - 1,
            grid.x_extent
        )));
    }
    let h = grid.h;
    if (psi0.grid.spacing() - h).abs() > 1e-12 * h {
        return Err(Error::Precondition(format!(
            "psi0 grid spacing {} must match the 2D grid spacing {h}",
            psi0.grid.spacing()
        )));
    }
    let m = grid.lines();
    if psi0.psi0.len() < m {
        return Err(Error::Precondition(format!(
            "psi0 must cover the 2D grid: has {} samples, need {m}",
            psi0.psi0.len()
        )));
    }
    let op = assemble_q2d(spec, grid)?;
    let ramp = crate::cutoff::ramp;
    let mut f = vec![0.0f64; m];
    let mut g = vec![0.0f64; m];
    let nn = n as f64;
    for t in 0..m {
        let x = (t as f64 + 0.5) * h;
        f[t] = psi0.psi0[t] * ramp(nn - x);
        g[t] = (k * x).cos() * ramp(x - nn) * ramp(2.0 * nn - x);
    }
    // coefficients in the symmetrized basis: sqrt(2) on off-diagonal nodes
    let mut c = vec![0.0f64; op.n];
    for j in 0..m {
        if g[j] == 0.0 {
            continue;
        }
        for i in 0..=j {
            if f[i] == 0.0 {
                continue;
            }
            if let Some(p) = op.index(i, j) {
                c[p] = if i == j { f[i] * g[j] } else { SQRT2 * f[i] * g[j] };
            }
        }
    }
    let lambda = psi0.eps0 + k * k;
    Ok(op.csr.residual(lambda, &c))
}

/// Side-by-side spectra of the original-coordinates operator on the square
/// and the folded sector operators, with exchange-symmetry classification.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SquareCrosscheck {
    /// `(eigenvalue, exchange indicator ⟨ψ, Sψ⟩)` sorted by eigenvalue.
    pub square: Vec<(f64, f64)>,
    pub q_plus: Vec<f64>,
    pub q_minus: Vec<f64>,
    pub max_diff_plus: f64,
    pub max_diff_minus: f64,
    pub warnings: Vec<String>,
}

/// Assemble the pair operator directly on `[0, X]²` in original coordinates
/// (potential `v(|x₁ - x₂|/√2)`, Neumann on the axes), compute its lowest
/// `k` eigenpairs, classify them by exchange symmetry, and compare the two
/// symmetry classes against the folded sector operators assembled on the
/// rotated image of the same square.
pub fn full_square_crosscheck(
    spec: &PotentialSpec,
    x_extent: f64,
    h: f64,
    k: usize,
    opts: &LanczosOptions,
) -> Result<SquareCrosscheck> {
    spec.validate()?;
    let m = (x_extent / h).round() as usize;
    if ((x_extent / h) - m as f64).abs() > 1e-9 {
        return Err(Error::Precondition("X/h must be integral".into()));
    }
    let n = m * m;
    let inv_h2 = 1.0 / (h * h);
    let coord = |t: usize| (t as f64 + 0.5) * h;

    // original-coordinates operator, row-major indexing p = i*m + j
    let mut triplets: Vec<(u32, u32, f64)> = Vec::with_capacity(3 * n);
    for i in 0..m {
        for j in 0..m {
            let p = (i * m + j) as u32;
            let arg = (coord(i) - coord(j)).abs() / SQRT2;
            let v = spec.eval_extended(arg)?;
            let mut diag = v + 4.0 * inv_h2;
            if i == 0 {
                diag -= inv_h2; // Neumann axis
            }
            if j == 0 {
                diag -= inv_h2;
            }
            if i + 1 == m {
                diag += inv_h2; // outer Dirichlet
            } else {
                triplets.push((p, p + m as u32, -inv_h2));
            }
            if j + 1 == m {
                diag += inv_h2;
            } else {
                triplets.push((p, p + 1, -inv_h2));
            }
            triplets.push((p, p, diag));
        }
    }
    let csr = Csr::from_upper_triplets(n, &triplets)?;
    let sky = SkylineSym::from_upper_triplets(n, &triplets)?;
    let mut lo = f64::INFINITY;
    for r in 0..n {
        let mut diag = 0.0;
        let mut radius = 0.0;
        for p in csr.row_ptr[r]..csr.row_ptr[r + 1] {
            if csr.cols[p] as usize == r {
                diag = csr.vals[p];
            } else {
                radius += csr.vals[p].abs();
            }
        }
        lo = lo.min(diag - radius);
    }
    let sigma = lo - 0.01 * lo.abs().max(1.0);
    let factors = sky.factorize_shifted(sigma)?;
    let pairs = shift_invert_eigs(&csr, &factors, Want::KSmallest(k), opts)?;

    let mut warnings = Vec::new();
    let mut square = Vec::new();
    let mut sym_list = Vec::new();
    let mut anti_list = Vec::new();
    for (t, lam) in pairs.values.iter().enumerate() {
        let psi = &pairs.vectors[t];
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                s += psi[i * m + j] * psi[j * m + i];
            }
        }
        square.push((*lam, s));
        if s > 0.98 {
            sym_list.push(*lam);
        } else if s < -0.98 {
            anti_list.push(*lam);
        } else {
            warnings.push(format!(
                "eigenvalue {lam} has mixed exchange indicator {s:.3}; treating as a degenerate pair"
            ));
            sym_list.push(*lam);
            anti_list.push(*lam);
        }
    }

    // folded sectors on the rotated image of the square: the image is the
    // region x₁ + x₂ < √2 X of the triangle, truncated by a ghost-zero
    // staircase along the anti-diagonal.
    let cut = SQRT2 * x_extent;
    let m_big = (cut / h).ceil() as usize + 2;
    let sector = |sym: Symmetry| -> Result<Vec<f64>> {
        let symmetry_bc = match sym {
            Symmetry::Plus => Bc::Neumann,
            Symmetry::Minus => Bc::Dirichlet,
        };
        let mut vcache: Vec<Option<f64>> = vec![None; m_big];
        let op = assemble_region(
            m_big,
            h,
            symmetry_bc,
            Bc::Dirichlet,
            false,
            CutBc::GhostZero,
            |i, j| ((i + j) as f64 + 1.0) * h < cut,
            |i, _| {
                if let Some(v) = vcache[i] {
                    return Ok(v);
                }
                let v = spec.eval_v((i as f64 + 0.5) * h)?;
                vcache[i] = Some(v);
                Ok(v)
            },
        )?;
        let want = k.min(op.n - 1);
        Ok(lowest_eigs(&op, want, opts)?.values)
    };
    let q_plus = sector(Symmetry::Plus)?;
    let q_minus = sector(Symmetry::Minus)?;

    let diff = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max)
    };
    let max_diff_plus = diff(&sym_list, &q_plus);
    let max_diff_minus = diff(&anti_list, &q_minus);

    Ok(SquareCrosscheck {
        square,
        q_plus,
        q_minus,
        max_diff_plus,
        max_diff_minus,
        warnings,
    })
}

/// CSV of one horizontal slice (fixed `x₂` line) of an eigenvector on the
/// triangle, for external plotting.
pub fn eigenvector_slice_csv(op: &Operator2D, vec: &[f64], j_line: usize) -> Result<String> {
    if j_line >= op.lines {
        return Err(Error::Precondition(format!(
            "slice line {j_line} outside grid with {} lines",
            op.lines
        )));
    }
    let mut out = String::from("x1,value\n");
    for i in 0..=j_line {
        if let Some(p) = op.index(i, j_line) {
            out.push_str(&format!("{:.17e},{:.17e}\n", (i as f64 + 0.5) * op.h, vec[p]));
        }
    }
    Ok(out)
}

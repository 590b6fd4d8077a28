//! Profile (skyline) LDLᵀ factorization for symmetric matrices whose rows
//! have contiguous envelopes, which is exactly what the line-ordered
//! triangle and square grids produce.
//!
//! The factorization at a shift `A - σI` serves two purposes at once:
//! spectrum slicing (the number of negative entries of `D` equals the number
//! of eigenvalues below `σ` by Sylvester's law of inertia) and the inverse
//! applications needed by shift-invert Lanczos. No pivoting is performed;
//! shifts are expected to stay away from eigenvalues, and a near-zero pivot
//! is reported so the caller can nudge the shift.

use crate::error::Error;
use crate::Result;

/// Symmetric matrix in row-envelope storage. Row `r` stores the contiguous
/// columns `start[r] ..= r`.
#[derive(Clone, Debug)]
pub struct SkylineSym {
    pub n: usize,
    start: Vec<usize>,
    row_ptr: Vec<usize>,
    vals: Vec<f64>,
}

impl SkylineSym {
    /// Assemble from upper-triangle triplets (`i ≤ j`). The envelope of each
    /// row is the span from its leftmost coupling to the diagonal.
    pub fn from_upper_triplets(n: usize, triplets: &[(u32, u32, f64)]) -> Result<Self> {
        let mut start: Vec<usize> = (0..n).collect();
        for &(i, j, _) in triplets {
            let (i, j) = (i as usize, j as usize);
            if i > j || j >= n {
                return Err(Error::Domain(format!("triplet ({i}, {j}) not upper-triangular")));
            }
            if i < start[j] {
                start[j] = i;
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for r in 0..n {
            row_ptr[r + 1] = row_ptr[r] + (r - start[r] + 1);
        }
        let mut vals = vec![0.0f64; row_ptr[n]];
        for &(i, j, v) in triplets {
            let (i, j) = (i as usize, j as usize);
            vals[row_ptr[j] + (i - start[j])] += v;
        }
        Ok(Self { n, start, row_ptr, vals })
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// LDLᵀ of `A - σI`. Returns the factorization plus the inertia
    /// (number of negative pivots) below `σ`.
    pub fn factorize_shifted(&self, sigma: f64) -> Result<LdlFactors> {
        let n = self.n;
        let mut l_vals = vec![0.0f64; self.vals.len()];
        let mut d = vec![0.0f64; n];
        let mut g = vec![0.0f64; n]; // scratch: g[c] = L[r][c] * D[c] for current row
        let mut negative = 0usize;
        let mut min_abs_pivot = f64::INFINITY;
        let mut scale = 0.0f64;
        for r in 0..n {
            scale = scale.max(self.vals[self.row_ptr[r + 1] - 1].abs());
        }
        let scale = scale.max(sigma.abs()).max(1.0);

        for r in 0..n {
            let s_r = self.start[r];
            let base = self.row_ptr[r];
            // g <- raw row of A - sigma I
            for c in s_r..r {
                g[c] = self.vals[base + (c - s_r)];
            }
            let mut diag = self.vals[self.row_ptr[r + 1] - 1] - sigma;
            // eliminate: g[c] -= sum_k g[k] * L[c][k]
            for c in s_r..r {
                let s_c = self.start[c];
                let lo = s_r.max(s_c);
                if lo < c {
                    let lrow = &l_vals[self.row_ptr[c] + (lo - s_c)..self.row_ptr[c] + (c - s_c)];
                    let grow = &g[lo..c];
                    let mut acc = 0.0;
                    for (a, b) in lrow.iter().zip(grow.iter()) {
                        acc += a * b;
                    }
                    g[c] -= acc;
                }
            }
            // finish the row: L[r][c] = g[c]/D[c], diag -= g.L[r]
            for c in s_r..r {
                let l_rc = g[c] / d[c];
                l_vals[base + (c - s_r)] = l_rc;
                diag -= g[c] * l_rc;
            }
            if diag == 0.0 {
                diag = 1e-300;
            }
            if diag < 0.0 {
                negative += 1;
            }
            min_abs_pivot = min_abs_pivot.min(diag.abs());
            d[r] = diag;
            l_vals[self.row_ptr[r + 1] - 1] = 1.0;
        }

        if min_abs_pivot < 1e-13 * scale {
            return Err(Error::Domain(format!(
                "shift sigma = {sigma} is numerically on an eigenvalue (pivot {min_abs_pivot:e}); nudge the shift"
            )));
        }
        Ok(LdlFactors {
            n,
            start: self.start.clone(),
            row_ptr: self.row_ptr.clone(),
            l_vals,
            d,
            negative,
            sigma,
        })
    }
}

/// Unit-lower-triangular factor in the same envelope, with the pivot vector.
#[derive(Clone, Debug)]
pub struct LdlFactors {
    pub n: usize,
    start: Vec<usize>,
    row_ptr: Vec<usize>,
    l_vals: Vec<f64>,
    d: Vec<f64>,
    /// Eigenvalue count of `A` strictly below the factorization shift.
    pub negative: usize,
    pub sigma: f64,
}

impl LdlFactors {
    /// Solve `(A - σI) x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        // forward: L y = b
        for r in 0..n {
            let s_r = self.start[r];
            if s_r < r {
                let lrow = &self.l_vals[self.row_ptr[r]..self.row_ptr[r + 1] - 1];
                let mut acc = 0.0;
                for (a, xv) in lrow.iter().zip(&x[s_r..r]) {
                    acc += a * xv;
                }
                x[r] -= acc;
            }
        }
        // diagonal
        for r in 0..n {
            x[r] /= self.d[r];
        }
        // backward: Lᵀ x = y
        for r in (0..n).rev() {
            let s_r = self.start[r];
            if s_r < r {
                let xr = x[r];
                let lrow = &self.l_vals[self.row_ptr[r]..self.row_ptr[r + 1] - 1];
                for (a, xv) in lrow.iter().zip(x[s_r..r].iter_mut()) {
                    *xv -= a * xr;
                }
            }
        }
    }
}

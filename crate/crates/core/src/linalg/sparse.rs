//! Minimal symmetric CSR matrix: assembly from triplets, matrix-vector
//! products, and coordinate-triplet export for debugging.

use std::io::Write;

use crate::error::Error;
use crate::Result;

/// Compressed sparse rows; stores the full symmetric pattern.
#[derive(Clone, Debug)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl Csr {
    /// Build from upper-triangle triplets `(i, j, v)` with `i ≤ j`; the
    /// symmetric counterpart is filled in automatically.
    pub fn from_upper_triplets(n: usize, triplets: &[(u32, u32, f64)]) -> Result<Self> {
        let mut counts = vec![0usize; n + 1];
        for &(i, j, _) in triplets {
            counts[i as usize + 1] += 1;
            if i != j {
                counts[j as usize + 1] += 1;
            }
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let nnz = counts[n];
        let mut cols = vec![0u32; nnz];
        let mut vals = vec![0.0f64; nnz];
        let mut cursor = counts.clone();
        for &(i, j, v) in triplets {
            if !v.is_finite() {
                return Err(Error::Domain(format!(
                    "non-finite matrix entry at ({i}, {j})"
                )));
            }
            let p = cursor[i as usize];
            cols[p] = j;
            vals[p] = v;
            cursor[i as usize] += 1;
            if i != j {
                let q = cursor[j as usize];
                cols[q] = i;
                vals[q] = v;
                cursor[j as usize] += 1;
            }
        }
        // sort each row by column for reproducible iteration order
        let mut csr = Csr { n, row_ptr: counts, cols, vals };
        csr.sort_rows();
        Ok(csr)
    }

    fn sort_rows(&mut self) {
        for r in 0..self.n {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            let mut pairs: Vec<(u32, f64)> = (a..b).map(|p| (self.cols[p], self.vals[p])).collect();
            pairs.sort_unstable_by_key(|&(c, _)| c);
            for (k, (c, v)) in pairs.into_iter().enumerate() {
                self.cols[a + k] = c;
                self.vals[a + k] = v;
            }
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for r in 0..self.n {
            let mut s = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.vals[p] * x[self.cols[p] as usize];
            }
            y[r] = s;
        }
    }

    /// ℓ² residual `‖A x - lambda x‖ / ‖x‖`.
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n];
        self.apply(x, &mut y);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.n {
            let r = y[i] - lambda * x[i];
            num += r * r;
            den += x[i] * x[i];
        }
        (num / den).sqrt()
    }

    /// Exact symmetry check (the assembly is symmetric by construction; this
    /// guards against future edits).
    pub fn is_symmetric(&self) -> bool {
        for r in 0..self.n {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p] as usize;
                let v = self.vals[p];
                let (a, b) = (self.row_ptr[c], self.row_ptr[c + 1]);
                let back = self.cols[a..b].binary_search(&(r as u32));
                match back {
                    Ok(k) if self.vals[a + k] == v => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Plain-text `row col value` triplet dump (upper triangle), one entry
    /// per line, for external inspection.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> Result<()> {
        for r in 0..self.n {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.cols[p] as usize;
                if c >= r {
                    writeln!(w, "{} {} {:.17e}", r, c, self.vals[p])?;
                }
            }
        }
        Ok(())
    }
}

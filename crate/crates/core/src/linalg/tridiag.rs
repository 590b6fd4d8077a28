//! Symmetric tridiagonal eigensolves: Sturm-sequence bisection for selected
//! eigenvalues plus inverse iteration for eigenvectors. Everything is O(n)
//! per eigenpair and fully deterministic, which is what the half-line
//! discretizations need at any size.

use crate::error::Error;
use crate::linalg::SplitMix64;
use crate::Result;

/// Symmetric tridiagonal matrix: `diag` of length n, `off` of length n-1.
#[derive(Clone, Debug)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
        y
    }

    /// Number of eigenvalues strictly below `sigma` (Sturm sequence count).
    pub fn count_below(&self, sigma: f64) -> usize {
        let n = self.n();
        let mut count = 0usize;
        let mut q = self.diag[0] - sigma;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if q == 0.0 {
                q = 1e-300;
            }
            q = self.diag[i] - sigma - self.off[i - 1] * self.off[i - 1] / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds for the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based) by bisection on the Sturm
    /// count, run down to floating-point interval collapse.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..1100 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.count_below(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solve `(T - sigma) x = b` in place by LDLᵀ elimination without
    /// pivoting. Fine for inverse iteration even when `sigma` is close to an
    /// eigenvalue: the growth aligns the solution with the eigenvector.
    pub fn solve_shifted(&self, sigma: f64, b: &mut [f64]) {
        let n = self.n();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0] - sigma;
        if d[0] == 0.0 {
            d[0] = 1e-300;
        }
        for i in 1..n {
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = self.diag[i] - sigma - l[i - 1] * self.off[i - 1];
            if d[i] == 0.0 {
                d[i] = 1e-300;
            }
        }
        for i in 1..n {
            b[i] -= l[i - 1] * b[i - 1];
        }
        b[n - 1] /= d[n - 1];
        for i in (0..n - 1).rev() {
            b[i] = b[i] / d[i] - l[i] * b[i + 1];
        }
    }

    /// Eigenvector for an eigenvalue approximation `lambda` by two rounds of
    /// inverse iteration from a deterministic start; returns the normalized
    /// (ℓ²) vector.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.n();
        let mut rng = SplitMix64(0x5EED_1D01 ^ n as u64);
        let mut x: Vec<f64> = (0..n).map(|_| 1.0 + 0.01 * rng.next_signed_unit()).collect();
        // shift slightly off the eigenvalue so the solve stays well-defined
        let scale = lambda.abs().max(1.0);
        let sigma = lambda + 1e-14 * scale;
        for _ in 0..3 {
            self.solve_shifted(sigma, &mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let inv = 1.0 / norm;
            x.iter_mut().for_each(|v| *v *= inv);
        }
        x
    }

    /// Lowest `k` eigenpairs; vectors ℓ²-normalized. Consecutive vectors are
    /// Gram-Schmidt-orthogonalized only when eigenvalues nearly coincide.
    pub fn lowest_pairs(&self, k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
        if k > self.n() {
            return Err(Error::Precondition(format!(
                "asked for {k} eigenpairs of a {}x{} matrix",
                self.n(),
                self.n()
            )));
        }
        let mut out: Vec<(f64, Vec<f64>)> = Vec::with_capacity(k);
        for idx in 0..k {
            let lam = self.eigenvalue(idx);
            let mut vec = self.eigenvector(lam);
            for (plam, pvec) in &out {
                if (lam - plam).abs() < 1e-9 * lam.abs().max(1.0) {
                    let dot: f64 = vec.iter().zip(pvec).map(|(a, b)| a * b).sum();
                    vec.iter_mut().zip(pvec).for_each(|(a, b)| *a -= dot * b);
                    let norm = vec.iter().map(|v| v * v).sum::<f64>().sqrt();
                    vec.iter_mut().for_each(|v| *v /= norm);
                }
            }
            out.push((lam, vec));
        }
        Ok(out)
    }

    /// ℓ² residual `‖T x - lambda x‖ / ‖x‖`.
    pub fn residual(&self, lambda: f64, x: &[f64]) -> f64 {
        let tx = self.apply(x);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..x.len() {
            let r = tx[i] - lambda * x[i];
            num += r * r;
            den += x[i] * x[i];
        }
        (num / den).sqrt()
    }
}

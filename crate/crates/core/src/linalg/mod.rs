//! Deterministic dense-free linear algebra kernels: symmetric tridiagonal
//! eigensolves by Sturm bisection, compressed sparse rows for stencil
//! application, a profile (skyline) LDLᵀ factorization for shift-invert and
//! spectrum slicing, and block Lanczos with full reorthogonalization.

pub mod dense_small;
pub mod lanczos;
pub mod skyline;
pub mod sparse;
pub mod tridiag;

/// SplitMix64: tiny deterministic generator for starting blocks.
#[derive(Clone, Debug)]
pub struct SplitMix64(pub u64);

impl SplitMix64 {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `(-1, 1)`.
    pub fn next_signed_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
    }
}

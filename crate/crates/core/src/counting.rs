//! Finiteness of the discrete spectrum, made checkable: the localization
//! pair `(χ₁, χ₂)` at scale `R`, the localization energy `W_R`, the
//! effective one-dimensional potential `Z_R = U_R + R V_R` obtained by
//! projecting onto the one-particle ground state, its Bargmann integral
//! `∫ |x| Z_R`, and a direct count of the negative eigenvalues of
//! `q₀ = -d²/dx² - Z_R`.

use serde::{Deserialize, Serialize};

use crate::cutoff::{partition_pair, partition_pair_d1, smoothstep_d1};
use crate::error::Error;
use crate::linalg::tridiag::Tridiag;
use crate::oned::EigResult1D;
use crate::potentials::{PotentialSpec, TailValue};
use crate::quad::{linear_fit, trapezoid_xy};
use crate::Result;

/// Smooth partition pair at separation scale `R`:
/// `χ₁^R(x₁, x₂) = χ₁((x₂ - x₁)/R)`, `χ₂^R` likewise, with
/// `χ₁² + χ₂² = 1` exactly.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CuttingProfile {
    pub r: f64,
}

/// Number of deterministic samples used for suprema over the ramp.
const SUP_SAMPLES: usize = 20_000;

pub fn cutting_profile(r: f64) -> Result<CuttingProfile> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Precondition(format!("scale R must be positive, got {r}")));
    }
    Ok(CuttingProfile { r })
}

impl CuttingProfile {
    /// `(χ₁, χ₂)` at the unscaled argument.
    pub fn pair(&self, t: f64) -> (f64, f64) {
        partition_pair(t)
    }

    /// `(χ₁', χ₂')` at the unscaled argument.
    pub fn pair_d1(&self, t: f64) -> (f64, f64) {
        partition_pair_d1(t)
    }

    /// Localization energy `W_R(x₁, x₂) = |∇χ₁^R|² + |∇χ₂^R|²`; supported
    /// on `R < x₂ - x₁ < 2R`.
    pub fn w(&self, x1: f64, x2: f64) -> f64 {
        let u = (x2 - x1) / self.r;
        let (d1, d2) = partition_pair_d1(u);
        2.0 / (self.r * self.r) * (d1 * d1 + d2 * d2)
    }

    /// Supremum of `W_R` over a fixed deterministic sampling of the ramp.
    /// The closed form makes `sup W_R · R²` a constant independent of `R`.
    pub fn sup_w(&self) -> f64 {
        let mut best = 0.0f64;
        for k in 0..=SUP_SAMPLES {
            let u = 1.0 + k as f64 / SUP_SAMPLES as f64;
            let sd = smoothstep_d1(u - 1.0);
            let val = std::f64::consts::PI * std::f64::consts::PI
                / (2.0 * self.r * self.r)
                * sd
                * sd;
            best = best.max(val);
        }
        best
    }
}

/// Evaluate `W_R` (kept as a free function mirroring the operation map).
pub fn wr_eval(profile: &CuttingProfile, x1: f64, x2: f64) -> f64 {
    profile.w(x1, x2)
}

/// Effective one-dimensional potential at the given `x₂` samples:
/// `Z_R(x₂) = ∫_{ℝ₊ ∩ [x₂-2R, x₂-R]} (W_R + R W_R²)(x₁, x₂) ψ₀(x₁)² dx₁`,
/// quadrature on the ground-state grid.
pub fn effective_z(psi0: &EigResult1D, profile: &CuttingProfile, x2_grid: &[f64]) -> Vec<f64> {
    let h = psi0.grid.spacing();
    let n = psi0.psi0.len();
    let r = profile.r;
    let mut z = Vec::with_capacity(x2_grid.len());
    for &x2 in x2_grid {
        if x2 <= r {
            z.push(0.0);
            continue;
        }
        let lo = (x2 - 2.0 * r).max(0.0);
        let hi = x2 - r;
        // node index range covering [lo, hi]
        let i_lo = ((lo / h - 0.5).ceil().max(0.0)) as usize;
        let i_hi = ((hi / h - 0.5).floor()) as usize;
        if i_lo >= n || i_hi < i_lo {
            z.push(0.0);
            continue;
        }
        let i_hi = i_hi.min(n - 1);
        let mut acc = 0.0;
        let mut prev: Option<f64> = None;
        for i in i_lo..=i_hi {
            let x1 = psi0.grid.node(i);
            let w = profile.w(x1, x2);
            let val = (w + r * w * w) * psi0.psi0[i] * psi0.psi0[i];
            if let Some(p) = prev {
                acc += 0.5 * (p + val) * h;
            }
            prev = Some(val);
        }
        z.push(acc);
    }
    z
}

/// Bargmann integral with an analytic bound for the part of the tail beyond
/// the grid.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BargmannBound {
    /// Trapezoid value of `∫ |x| Z(x) dx` over the sampled range.
    pub grid_integral: f64,
    /// `∫_{X_end}^∞ x Z(X_end) e^{-a (x - X_end)} dx` from the fitted rate.
    pub tail_bound: f64,
    /// Fitted exponential decay rate of `Z` on its tail.
    pub fitted_rate: f64,
    pub total: f64,
}

pub fn bargmann_bound(x2: &[f64], z: &[f64]) -> Result<BargmannBound> {
    if x2.len() != z.len() || x2.len() < 4 {
        return Err(Error::Precondition("bargmann_bound needs matched samples (>= 4)".into()));
    }
    if z.iter().any(|&v| v < -1e-14) {
        return Err(Error::Precondition("Z_R must be nonnegative".into()));
    }
    let z_max = z.iter().cloned().fold(0.0f64, f64::max);
    if z_max == 0.0 {
        return Ok(BargmannBound { grid_integral: 0.0, tail_bound: 0.0, fitted_rate: 0.0, total: 0.0 });
    }
    let weighted: Vec<f64> = x2.iter().zip(z).map(|(x, v)| x.abs() * v).collect();
    let grid_integral = trapezoid_xy(x2, &weighted);

    // fit log Z on the decaying stretch after the peak
    let peak = z
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let floor = z_max * 1e-60;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in peak..z.len() {
        if z[i] > floor {
            xs.push(x2[i]);
            ys.push(z[i].ln());
        }
    }
    if xs.len() < 4 {
        return Err(Error::Domain(
            "Z_R tail too short to fit a decay rate on this grid".into(),
        ));
    }
    let (slope, _) = linear_fit(&xs, &ys);
    if slope >= 0.0 {
        return Err(Error::Domain(format!(
            "Z_R tail not integrable on this grid (fitted slope {slope:e} >= 0)"
        )));
    }
    let a = -slope;
    let x_end = *xs.last().unwrap();
    let z_end = z[x2.iter().position(|&x| x == x_end).unwrap_or(z.len() - 1)];
    let tail_bound = z_end * (x_end / a + 1.0 / (a * a));
    Ok(BargmannBound {
        grid_integral,
        tail_bound,
        fitted_rate: a,
        total: grid_integral + tail_bound,
    })
}

/// Negative-eigenvalue count of `q₀ = -d²/dx² - Z_R` on `(-X, X)` with
/// Dirichlet ends (a full-line surrogate; Dirichlet walls can only
/// undercount, which is the conservative direction for a verification
/// bound).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NegativeCount {
    pub count: usize,
    /// Count recomputed on a 1.5× larger interval.
    pub count_larger: usize,
    /// True when the two counts disagree.
    pub unstable: bool,
}

/// Threshold below which an eigenvalue is considered strictly negative.
pub const COUNT_TOL: f64 = 1e-9;

pub fn count_negative_q0(x2: &[f64], z: &[f64], x_extent: f64, h: f64) -> Result<NegativeCount> {
    if x2.len() != z.len() || x2.is_empty() {
        return Err(Error::Precondition("count_negative_q0 needs matched samples".into()));
    }
    let support_end = x2
        .iter()
        .zip(z)
        .filter(|(_, &v)| v > 0.0)
        .map(|(&x, _)| x)
        .fold(0.0f64, f64::max);
    if x_extent < support_end {
        return Err(Error::Precondition(format!(
            "truncation X = {x_extent} does not cover the support of Z (ends at {support_end})"
        )));
    }
    let count_at = |xx: f64| -> usize {
        let n = (2.0 * xx / h).round() as usize;
        let hh = 2.0 * xx / n as f64;
        let inv_h2 = 1.0 / (hh * hh);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let x = -xx + (i as f64 + 0.5) * hh;
            diag.push(2.0 * inv_h2 - interp(x2, z, x));
        }
        diag[0] += inv_h2;
        let last = n - 1;
        diag[last] += inv_h2;
        let t = Tridiag { diag, off: vec![-inv_h2; n - 1] };
        t.count_below(-COUNT_TOL)
    };
    let count = count_at(x_extent);
    let count_larger = count_at(1.5 * x_extent);
    Ok(NegativeCount { count, count_larger, unstable: count != count_larger })
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] || x >= *xs.last().unwrap() {
        return 0.0;
    }
    let j = xs.partition_point(|&t| t <= x);
    let (a, b) = (j - 1, j.min(xs.len() - 1));
    if a == b {
        return ys[a];
    }
    let w = (x - xs[a]) / (xs[b] - xs[a]);
    ys[a] + w * (ys[b] - ys[a])
}

/// The admissibility conditions the finiteness argument imposes on `R`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Admissibility {
    /// `v(x₁) - sup W_R ≥ ε₀` for all sampled `x₁ > R` (exterior sector).
    pub exterior_ok: bool,
    /// `E₂ - 1/R - sup W_R ≥ ε₀` (projection complement).
    pub gap_ok: bool,
    /// Human-readable name of the violated inequality, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated: Option<String>,
}

/// Full finiteness audit at a given localization scale.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountingBoundReport {
    pub r: f64,
    pub sup_wr: f64,
    pub eps0: f64,
    /// Gap surrogate used in the admissibility check.
    pub e2_effective: f64,
    /// Sampled `(x₂, Z_R(x₂))` profile.
    pub z_profile: Vec<(f64, f64)>,
    pub bargmann: BargmannBound,
    pub n_q0: usize,
    pub q0_unstable: bool,
    pub admissible_r: bool,
    pub checks: Admissibility,
}

impl CountingBoundReport {
    /// Two-column text of the `Z_R` profile.
    pub fn z_profile_text(&self) -> String {
        let mut out = String::with_capacity(self.z_profile.len() * 48);
        for (x, z) in &self.z_profile {
            out.push_str(&format!("{x:.17e} {z:.17e}\n"));
        }
        out
    }
}

/// Run the whole counting chain at scale `R`: admissibility, `Z_R`,
/// Bargmann integral, and the direct count for `q₀`. Failed admissibility
/// is reported, not raised.
pub fn finiteness_audit(
    spec: &PotentialSpec,
    psi0: &EigResult1D,
    r: f64,
) -> Result<CountingBoundReport> {
    let profile = cutting_profile(r)?;
    let sup_wr = profile.sup_w();
    let eps0 = psi0.eps0;
    let v_inf = spec.tail_value();
    let e2_effective = match v_inf {
        TailValue::Finite(v) if psi0.e2_above_tail => v,
        _ => psi0.e2,
    };

    // (i) exterior-sector condition on the sampled grid beyond R
    let grid = &psi0.grid;
    let mut exterior_ok = true;
    for i in 0..grid.n_points {
        let x = grid.node(i);
        if x > r {
            let v = spec.eval_v(x)?;
            if v - sup_wr < eps0 {
                exterior_ok = false;
                break;
            }
        }
    }
    // (ii) complement-projection condition
    let gap_ok = e2_effective - 1.0 / r - sup_wr >= eps0;
    let violated = match (exterior_ok, gap_ok) {
        (false, _) => Some("v(x1) - sup W_R >= eps0 for x1 > R".to_string()),
        (true, false) => Some("E2 - 1/R - sup W_R >= eps0".to_string()),
        _ => None,
    };
    let admissible_r = exterior_ok && gap_ok;

    // Z_R on a grid reaching past the support of the localized weight
    let x2_end = grid.x_max + 2.0 * r;
    let hz = (r / 400.0).min(0.05).max(grid.spacing());
    let n2 = (x2_end / hz).ceil() as usize;
    let x2_grid: Vec<f64> = (0..=n2).map(|i| i as f64 * hz).collect();
    let z = effective_z(psi0, &profile, &x2_grid);
    let bargmann = bargmann_bound(&x2_grid, &z)?;
    let q0 = count_negative_q0(&x2_grid, &z, x2_end + 10.0, 0.01)?;

    let z_profile: Vec<(f64, f64)> = x2_grid.into_iter().zip(z).collect();
    Ok(CountingBoundReport {
        r,
        sup_wr,
        eps0,
        e2_effective,
        z_profile,
        bargmann,
        n_q0: q0.count,
        q0_unstable: q0.unstable,
        admissible_r,
        checks: Admissibility { exterior_ok, gap_ok, violated },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use crate::oned::ground_state;

    #[test]
    fn profile_plateaus_and_identity() {
        let p = cutting_profile(5.0).unwrap();
        let (c1, c2) = p.pair(0.5);
        assert_eq!((c1, c2), (1.0, 0.0));
        for k in 0..10_000 {
            let t = 3.0 * k as f64 / 10_000.0;
            let (a, b) = p.pair(t);
            assert!((a * a + b * b - 1.0).abs() < 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn w_support_is_the_ramp_band() {
        let p = cutting_profile(4.0).unwrap();
        assert_eq!(p.w(0.0, 2.0), 0.0); // separation R/2
        assert_eq!(p.w(0.0, 9.0), 0.0); // separation > 2R
        assert!(p.w(0.0, 6.0) > 0.0); // inside (R, 2R)
        assert!(p.w(1.0, 7.0) >= 0.0);
    }

    #[test]
    fn sup_w_scales_like_inverse_r_squared() {
        let s5 = cutting_profile(5.0).unwrap().sup_w();
        let s10 = cutting_profile(10.0).unwrap().sup_w();
        let s20 = cutting_profile(20.0).unwrap().sup_w();
        let c5 = s5 * 25.0;
        let c10 = s10 * 100.0;
        let c20 = s20 * 400.0;
        assert!((c5 - c10).abs() <= 1e-10 * c5);
        assert!((c5 - c20).abs() <= 1e-10 * c5);
        // closed form pi^2/2 * (15/8)^2
        let closed = std::f64::consts::PI.powi(2) / 2.0 * (15.0f64 / 8.0).powi(2);
        assert!((c5 - closed).abs() < 1e-12 * closed);
    }

    #[test]
    fn z_vanishes_below_r_and_is_bounded() {
        let spec = PotentialSpec::square_well(4.0, 1.0);
        let grid = Grid1D::neumann(30.0, 15_000).unwrap();
        let psi = ground_state(&spec, &grid).unwrap();
        let p = cutting_profile(5.0).unwrap();
        let x2: Vec<f64> = (0..=800).map(|i| i as f64 * 0.05).collect();
        let z = effective_z(&psi, &p, &x2);
        let sup = p.sup_w();
        let bound = sup + 5.0 * sup * sup;
        for (x, v) in x2.iter().zip(&z) {
            if *x <= 5.0 {
                assert_eq!(*v, 0.0, "Z must vanish for x2 <= R (x2 = {x})");
            }
            assert!(*v <= bound + 1e-12, "Z({x}) = {v} exceeds {bound}");
            assert!(*v >= 0.0);
        }
        assert!(z.iter().any(|&v| v > 0.0));
    }

    #[test]
    fn bargmann_zero_for_zero_z() {
        let x2: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let z = vec![0.0; 10];
        let b = bargmann_bound(&x2, &z).unwrap();
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn growing_tail_is_an_error() {
        let x2: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
        let z: Vec<f64> = x2.iter().map(|x| 0.1 + 0.01 * x).collect();
        assert!(bargmann_bound(&x2, &z).is_err());
    }

    #[test]
    fn count_zero_for_free_operator() {
        let x2: Vec<f64> = (0..50).map(|i| i as f64 * 0.2).collect();
        let z = vec![0.0; 50];
        let c = count_negative_q0(&x2, &z, 20.0, 0.01).unwrap();
        assert_eq!(c.count, 0);
        assert!(!c.unstable);
    }

    #[test]
    fn monotone_z_gives_monotone_count() {
        // square bump potentials: deeper bump never fewer negative levels
        let x2: Vec<f64> = (0..=600).map(|i| i as f64 * 0.05).collect();
        let bump = |depth: f64| -> Vec<f64> {
            x2.iter()
                .map(|&x| if (10.0..14.0).contains(&x) { depth } else { 0.0 })
                .collect()
        };
        let c1 = count_negative_q0(&x2, &bump(0.5), 40.0, 0.01).unwrap().count;
        let c2 = count_negative_q0(&x2, &bump(2.0), 40.0, 0.01).unwrap().count;
        assert!(c2 >= c1);
        assert!(c1 >= 1);
    }

    #[test]
    fn well_audit_r5_is_admissible_and_sound() {
        let spec = PotentialSpec::square_well(4.0, 1.0);
        let grid = Grid1D::neumann(30.0, 15_000).unwrap();
        let psi = ground_state(&spec, &grid).unwrap();
        let rep = finiteness_audit(&spec, &psi, 5.0).unwrap();
        assert!(rep.admissible_r, "checks: {:?}", rep.checks);
        assert!(rep.n_q0 as f64 <= rep.bargmann.total.ceil());
        assert!(rep.n_q0 >= 1);
        assert!(!rep.q0_unstable);
    }

    #[test]
    fn square_well_small_r_violates_exterior() {
        let spec = PotentialSpec::square_well(4.0, 1.0);
        let grid = Grid1D::neumann(30.0, 15_000).unwrap();
        let psi = ground_state(&spec, &grid).unwrap();
        // R = 0.5 < a = 1: the well region x1 in (0.5, 1) has v = -4 < eps0
        let rep = finiteness_audit(&spec, &psi, 0.5).unwrap();
        assert!(!rep.checks.exterior_ok);
        assert!(!rep.admissible_r);
    }
}

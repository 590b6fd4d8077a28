//! Smooth cutoff profiles shared by the certificate, Weyl-sequence and
//! counting modules.
//!
//! All profiles are built from the quintic smoothstep
//! `s(u) = 6u⁵ - 15u⁴ + 10u³` on `[0, 1]`, which is C² across the joins and
//! has closed-form derivatives, so every derived constant
//! (`‖χ'‖_∞ = 15/8`, `∫ χ'² = 10/7`, ...) is reproducible.

/// Quintic smoothstep: 0 for `u ≤ 0`, 1 for `u ≥ 1`, C² in between.
pub fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
    }
}

/// First derivative of [`smoothstep`].
pub fn smoothstep_d1(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        30.0 * u * u * (1.0 - u) * (1.0 - u)
    }
}

/// Second derivative of [`smoothstep`].
pub fn smoothstep_d2(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    }
}

/// Plateau cutoff `χ`: 1 for `t ≤ 1`, 0 for `t ≥ 2`, `χ(t) = 1 - s(t - 1)`
/// in between. `sup |χ'| = 15/8` at `t = 3/2`.
pub fn chi(t: f64) -> f64 {
    1.0 - smoothstep(t - 1.0)
}

/// First derivative of [`chi`]; supported on `(1, 2)`.
pub fn chi_d1(t: f64) -> f64 {
    -smoothstep_d1(t - 1.0)
}

/// Second derivative of [`chi`].
pub fn chi_d2(t: f64) -> f64 {
    -smoothstep_d2(t - 1.0)
}

/// Supremum of `|χ'|`, attained at the ramp midpoint.
pub const CHI_D1_SUP: f64 = 15.0 / 8.0;

/// Smooth ramp `τ`: 0 for `t ≤ 1`, 1 for `t ≥ 2`. Used by Weyl sequences.
pub fn ramp(t: f64) -> f64 {
    smoothstep(t - 1.0)
}

/// Ninth-order smoothstep, C⁴ across the joins. Quadratures are insensitive
/// to the joins of the quintic profile, but stencil differencing is not:
/// a jump in the third derivative costs three-point stencils half an order.
/// Identities that apply the discrete operator to a cutoff use this one.
pub fn smoothstep_c4(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else if u >= 1.0 {
        1.0
    } else {
        u * u * u * u * u * (126.0 + u * (-420.0 + u * (540.0 + u * (-315.0 + 70.0 * u))))
    }
}

/// First derivative of [`smoothstep_c4`]: `630 u⁴ (1-u)⁴`.
pub fn smoothstep_c4_d1(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let a = u * (1.0 - u);
        630.0 * a * a * a * a
    }
}

/// Second derivative of [`smoothstep_c4`]: `2520 u³ (1-u)³ (1-2u)`.
pub fn smoothstep_c4_d2(u: f64) -> f64 {
    if u <= 0.0 || u >= 1.0 {
        0.0
    } else {
        let a = u * (1.0 - u);
        2520.0 * a * a * a * (1.0 - 2.0 * u)
    }
}

/// C⁴ plateau cutoff: 1 for `t ≤ 1`, 0 for `t ≥ 2`.
pub fn bump_chi(t: f64) -> f64 {
    1.0 - smoothstep_c4(t - 1.0)
}

pub fn bump_chi_d1(t: f64) -> f64 {
    -smoothstep_c4_d1(t - 1.0)
}

pub fn bump_chi_d2(t: f64) -> f64 {
    -smoothstep_c4_d2(t - 1.0)
}

/// Partition-of-unity pair `(χ₁, χ₂)` with `χ₁ = 1` for `t ≤ 1`,
/// `χ₂ = 1` for `t ≥ 2` and `χ₁² + χ₂² = 1` exactly by construction:
/// `χ₁ = cos((π/2) s(t-1))`, `χ₂ = sin((π/2) s(t-1))`.
pub fn partition_pair(t: f64) -> (f64, f64) {
    let a = std::f64::consts::FRAC_PI_2 * smoothstep(t - 1.0);
    (a.cos(), a.sin())
}

/// Derivatives `(χ₁', χ₂')` of the partition pair; both vanish outside `(1, 2)`.
pub fn partition_pair_d1(t: f64) -> (f64, f64) {
    let s = smoothstep(t - 1.0);
    let sd = smoothstep_d1(t - 1.0);
    let a = std::f64::consts::FRAC_PI_2 * s;
    let f = std::f64::consts::FRAC_PI_2 * sd;
    (-f * a.sin(), f * a.cos())
}

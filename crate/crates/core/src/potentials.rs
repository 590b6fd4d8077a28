//! Interaction potentials on the half-line and checks of the standing
//! assumptions: bounded negative part (A), a bound ground state of the
//! one-particle operator (B), and a ground energy strictly below the values
//! of the potential at infinity (C).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::quad::trapezoid_xy;
use crate::Result;

/// Extended real used for the value of the potential at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailValue {
    Finite(f64),
    Infinite,
}

impl TailValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, TailValue::Infinite)
    }

    /// Finite value, or `+∞` as an `f64`.
    pub fn as_f64(self) -> f64 {
        match self {
            TailValue::Finite(v) => v,
            TailValue::Infinite => f64::INFINITY,
        }
    }
}

impl Serialize for TailValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TailValue::Finite(v) => s.serialize_f64(*v),
            TailValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for TailValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(TailValue::Finite(v)),
            Raw::Str(s) if s == "inf" => Ok(TailValue::Infinite),
            Raw::Str(s) => Err(D::Error::custom(format!(
                "tail must be a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Potential family. JSON layout: `{"kind": "...", "params": {...}, "tail": number|"inf"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum PotentialKind {
    /// `v(x) = ω² x²`.
    Harmonic { omega2: f64 },
    /// `v = -v0` on `(0, a)`, `0` from `a` on.
    SquareWell { v0: f64, a: f64 },
    /// `v(x) = 4 ε ((σ/x̂)¹² - (σ/x̂)⁶)` with `x̂ = max(x, x_min)`.
    ///
    /// The clamp keeps the `x⁻¹²` core evaluable on a grid; it only modifies
    /// the positive part of `v`, so assumptions (A)-(C) are unaffected.
    LennardJonesSoft { eps_lj: f64, sigma: f64, x_min: f64 },
    /// Piecewise-linear interpolation of samples; the tail value must be
    /// declared since no finite table determines a liminf.
    Tabulated { x: Vec<f64>, v: Vec<f64> },
}

/// A potential together with its declared value at infinity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialSpec {
    #[serde(flatten)]
    pub kind: PotentialKind,
    /// Declared tail for `Tabulated`; for built-ins this is computed and any
    /// declared value is checked against the closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<TailValue>,
}

impl PotentialSpec {
    pub fn harmonic(omega2: f64) -> Self {
        Self { kind: PotentialKind::Harmonic { omega2 }, tail: None }
    }

    pub fn square_well(v0: f64, a: f64) -> Self {
        Self { kind: PotentialKind::SquareWell { v0, a }, tail: None }
    }

    pub fn lennard_jones_soft(eps_lj: f64, sigma: f64, x_min: f64) -> Self {
        Self { kind: PotentialKind::LennardJonesSoft { eps_lj, sigma, x_min }, tail: None }
    }

    /// Parameter sanity; called by every consumer that builds an operator.
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            PotentialKind::Harmonic { omega2 } => {
                if !(*omega2 > 0.0) || !omega2.is_finite() {
                    return Err(Error::Precondition(format!(
                        "harmonic stiffness must be positive and finite, got {omega2}"
                    )));
                }
            }
            PotentialKind::SquareWell { v0, a } => {
                if !(*v0 >= 0.0) || !v0.is_finite() {
                    return Err(Error::Precondition(format!(
                        "square well depth must be nonnegative, got {v0}"
                    )));
                }
                if !(*a > 0.0) || !a.is_finite() {
                    return Err(Error::Precondition(format!(
                        "square well width must be positive, got {a}"
                    )));
                }
            }
            PotentialKind::LennardJonesSoft { eps_lj, sigma, x_min } => {
                if !(*eps_lj > 0.0 && *sigma > 0.0 && *x_min > 0.0) {
                    return Err(Error::Precondition(format!(
                        "lennard_jones_soft needs eps_lj, sigma, x_min > 0, got ({eps_lj}, {sigma}, {x_min})"
                    )));
                }
            }
            PotentialKind::Tabulated { x, v } => {
                if x.len() != v.len() || x.len() < 2 {
                    return Err(Error::Precondition(
                        "tabulated potential needs matching x/v arrays of length >= 2".into(),
                    ));
                }
                if self.tail.is_none() {
                    return Err(Error::Precondition(
                        "tabulated potential must declare its tail value".into(),
                    ));
                }
                if !x.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::Precondition(
                        "tabulated abscissae must be strictly increasing".into(),
                    ));
                }
                if x[0] <= 0.0 {
                    return Err(Error::Precondition(
                        "tabulated abscissae must be positive".into(),
                    ));
                }
                if !v.iter().all(|t| t.is_finite()) {
                    return Err(Error::Precondition(
                        "tabulated values must be finite".into(),
                    ));
                }
            }
        }
        // a tail declared on a built-in kind must agree with the closed form
        if let (Some(declared), false) = (self.tail, matches!(self.kind, PotentialKind::Tabulated { .. })) {
            let computed = self.tail_value();
            let ok = match (declared, computed) {
                (TailValue::Infinite, TailValue::Infinite) => true,
                (TailValue::Finite(a), TailValue::Finite(b)) => {
                    (a - b).abs() <= 1e-9 * (1.0 + b.abs())
                }
                _ => false,
            };
            if !ok {
                return Err(Error::Precondition(format!(
                    "declared tail {declared:?} contradicts the built-in tail {computed:?}"
                )));
            }
        }
        Ok(())
    }

    /// Evaluate `v(x)` for `x > 0`.
    pub fn eval_v(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Precondition(format!("eval_v needs x > 0, got {x}")));
        }
        self.eval_extended(x)
    }

    /// Evaluation that also accepts `x = 0` as the limit from the right.
    /// Needed when sampling `v(|x₁ - x₂|/√2)` on a grid where `x₁ = x₂`.
    pub fn eval_extended(&self, x: f64) -> Result<f64> {
        match &self.kind {
            PotentialKind::Harmonic { omega2 } => Ok(omega2 * x * x),
            PotentialKind::SquareWell { v0, a } => Ok(if x < *a { -v0 } else { 0.0 }),
            PotentialKind::LennardJonesSoft { eps_lj, sigma, x_min } => {
                let xh = x.max(*x_min);
                let r6 = (sigma / xh).powi(6);
                Ok(4.0 * eps_lj * (r6 * r6 - r6))
            }
            PotentialKind::Tabulated { x: xs, v: vs } => {
                if x < xs[0] {
                    return Err(Error::Domain(format!(
                        "tabulated potential queried at x = {x} below first sample {}",
                        xs[0]
                    )));
                }
                if x > *xs.last().unwrap() {
                    return match self.tail {
                        Some(TailValue::Finite(t)) => Ok(t),
                        Some(TailValue::Infinite) => Err(Error::Domain(format!(
                            "tabulated potential with infinite declared tail queried at x = {x} beyond table"
                        ))),
                        None => Err(Error::Domain(format!(
                            "tabulated potential queried at x = {x} beyond table and no tail declared"
                        ))),
                    };
                }
                let j = xs.partition_point(|&t| t <= x).min(xs.len() - 1);
                let (j0, j1) = (j - 1, j);
                let w = (x - xs[j0]) / (xs[j1] - xs[j0]);
                Ok(vs[j0] + w * (vs[j1] - vs[j0]))
            }
        }
    }

    /// `v_∞ = liminf v(x)` as `x → ∞`.
    pub fn tail_value(&self) -> TailValue {
        match &self.kind {
            PotentialKind::Harmonic { .. } => TailValue::Infinite,
            PotentialKind::SquareWell { .. } => TailValue::Finite(0.0),
            PotentialKind::LennardJonesSoft { .. } => TailValue::Finite(0.0),
            PotentialKind::Tabulated { v, .. } => self
                .tail
                .unwrap_or(TailValue::Finite(*v.last().unwrap())),
        }
    }

    /// A length scale on which the potential's features live; used to build
    /// probe grids.
    pub fn feature_scale(&self) -> f64 {
        match &self.kind {
            PotentialKind::Harmonic { omega2 } => omega2.powf(-0.25).max(1e-3),
            PotentialKind::SquareWell { a, .. } => *a,
            PotentialKind::LennardJonesSoft { sigma, .. } => *sigma,
            PotentialKind::Tabulated { x, .. } => *x.last().unwrap(),
        }
    }

    /// Abscissae where `v` is non-smooth; probe grids align to these so that
    /// quadrature does not smear jumps.
    pub fn feature_knots(&self) -> Vec<f64> {
        match &self.kind {
            PotentialKind::Harmonic { .. } => vec![],
            PotentialKind::SquareWell { a, .. } => {
                vec![a * (1.0 - 1e-12), *a]
            }
            PotentialKind::LennardJonesSoft { sigma, x_min, .. } => {
                vec![*x_min, sigma * 2f64.powf(1.0 / 6.0)]
            }
            PotentialKind::Tabulated { x, .. } => x.clone(),
        }
    }
}

/// How assumptions (B)/(C) were settled by inspecting the potential alone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CondCase {
    /// `v_∞ = +∞`: the resolvent is compact and (B), (C) hold.
    InfiniteTail,
    /// `v_∞` finite and `∫ (v - v_∞) < 0`: a bound state exists below `v_∞`.
    IntegrableDeficit,
    /// Neither criterion applies; (B) must be checked a posteriori by the
    /// one-dimensional solver.
    Inconclusive,
}

/// Outcome of [`check_assumptions`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Negative part of `v` bounded on the probe grid (assumption (A)).
    pub a_ok: bool,
    /// Observed supremum of `max(-v, 0)`.
    pub v_neg_sup: f64,
    /// `v_∞`.
    pub tail: TailValue,
    pub cond_case: CondCase,
    /// `∫ (v - v_∞)` when the tail is finite.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficit_integral: Option<f64>,
    /// Diagnostic when the deficit quadrature did not settle.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Geometric-then-uniform probe grid from near the origin to `xmax`, with
/// the potential's feature knots spliced in. `points_hint` controls the
/// uniform part's resolution.
pub fn probe_grid(spec: &PotentialSpec, xmax: f64, points_hint: usize) -> Vec<f64> {
    let scale = spec.feature_scale().min(xmax / 2.0);
    let mut xs: Vec<f64> = Vec::new();
    // geometric section resolves structure near the origin; tabulated kinds
    // are only evaluable from their first abscissa on
    let x_lo = match &spec.kind {
        PotentialKind::Tabulated { x, .. } => x[0],
        _ => 1e-12,
    };
    let x_hi = (2.0 * scale).min(xmax);
    let geo_n = 400;
    let ratio = (x_hi / x_lo).powf(1.0 / geo_n as f64);
    let mut x = x_lo;
    for _ in 0..=geo_n {
        xs.push(x);
        x *= ratio;
    }
    // uniform section covers the tail
    let n_uni = points_hint.max(64);
    let h = (xmax - x_hi) / n_uni as f64;
    if h > 0.0 {
        for i in 1..=n_uni {
            xs.push(x_hi + h * i as f64);
        }
    }
    for k in spec.feature_knots() {
        if k > 0.0 && k < xmax {
            xs.push(k);
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15 * (1.0 + b.abs()));
    xs
}

/// Check assumption (A) and decide between the two sufficient conditions for
/// (B)/(C): infinite tail, or finite tail with a strictly negative integral
/// deficit. The probe grid must resolve the potential's features; `probe_grid`
/// takes care of that for the built-in kinds.
pub fn check_assumptions(
    spec: &PotentialSpec,
    probe_xmax: f64,
    tol: f64,
) -> Result<AssumptionReport> {
    spec.validate()?;
    if !(probe_xmax > 0.0) || !(tol > 0.0) {
        return Err(Error::Precondition(
            "check_assumptions needs probe_xmax > 0 and tol > 0".into(),
        ));
    }
    let xs = probe_grid(spec, probe_xmax, 16_000);
    let mut v_neg_sup = 0.0f64;
    let mut vals = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = spec.eval_extended(x)?;
        if !v.is_finite() {
            return Err(Error::Domain(format!("potential not finite at x = {x}")));
        }
        v_neg_sup = v_neg_sup.max(-v);
        vals.push(v);
    }
    let tail = spec.tail_value();

    if tail.is_infinite() {
        return Ok(AssumptionReport {
            a_ok: true,
            v_neg_sup,
            tail,
            cond_case: CondCase::InfiniteTail,
            deficit_integral: None,
            note: None,
        });
    }

    let v_inf = tail.as_f64();
    let deficit: Vec<f64> = vals.iter().map(|v| v - v_inf).collect();
    let full = trapezoid_xy(&xs, &deficit);
    // convergence check: the last quarter of the window must not still be moving
    let cut = xs.partition_point(|&x| x <= 0.75 * probe_xmax);
    let partial = trapezoid_xy(&xs[..cut.max(2)], &deficit[..cut.max(2)]);
    let tail_contrib = full - partial;

    if tail_contrib.abs() > tol.max(1e-10 * full.abs()) {
        return Ok(AssumptionReport {
            a_ok: true,
            v_neg_sup,
            tail,
            cond_case: CondCase::Inconclusive,
            deficit_integral: Some(full),
            note: Some(format!(
                "deficit integral not settled on (0, {probe_xmax}): last-quarter contribution {tail_contrib:e} exceeds tolerance; v - v_inf may not be integrable"
            )),
        });
    }

    let cond_case = if full < -tol {
        CondCase::IntegrableDeficit
    } else {
        CondCase::Inconclusive
    };
    Ok(AssumptionReport {
        a_ok: true,
        v_neg_sup,
        tail,
        cond_case,
        deficit_integral: Some(full),
        note: None,
    })
}

//! Test-side numerical oracles, kept independent of the library's own
//! solver paths: a Householder+implicit-QL dense symmetric eigensolver, a
//! Simpson integrator, and a shooting/bisection eigenvalue finder for the
//! half-line problem.

#![allow(dead_code)]

/// Dense symmetric eigenvalues via Householder tridiagonalization followed
/// by the implicit-shift QL iteration. Input row-major, returns ascending
/// eigenvalues.
pub fn dense_sym_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n];
    tred2(&mut m, n, &mut d, &mut e);
    tql2(&mut d, &mut e, n);
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    d
}

/// Householder reduction to tridiagonal form (vectors discarded).
fn tred2(a: &mut [f64], n: usize, d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        if l > 0 {
            let mut scale = 0.0f64;
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0f64;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in j + 1..=l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    e[0] = 0.0;
    for i in 0..n {
        d[i] = a[i * n + i];
    }
}

/// Implicit-shift QL for a symmetric tridiagonal (d, e), eigenvalues only.
fn tql2(d: &mut [f64], e: &mut [f64], n: usize) {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 50, "QL iteration failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Composite Simpson rule on a uniform grid given by a closure; `n` must be
/// even.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2 && n % 2 == 0);
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Shooting oracle for the lowest eigenvalue of `-ψ'' + v ψ = E ψ` on
/// `(0, x_end)` with a Neumann condition at the origin: integrate outward
/// with RK4 and bisect `E` on the sign of `ψ(x_end)` (the ground state has
/// no interior node, so the endpoint sign flips exactly at `ε₀`).
pub fn shooting_ground_energy<V: Fn(f64) -> f64>(
    v: V,
    e_lo: f64,
    e_hi: f64,
    x_end: f64,
    steps: usize,
) -> f64 {
    let endpoint_sign = |e: f64| -> f64 {
        let h = x_end / steps as f64;
        let mut y = 1.0f64; // psi
        let mut yp = 0.0f64; // psi'
        let mut x = 0.0f64;
        for _ in 0..steps {
            // RK4 on (psi, psi')' = (psi', (v - E) psi)
            let f = |x: f64, y: f64, yp: f64| (yp, (v(x) - e) * y);
            let (k1, l1) = f(x, y, yp);
            let (k2, l2) = f(x + h / 2.0, y + h / 2.0 * k1, yp + h / 2.0 * l1);
            let (k3, l3) = f(x + h / 2.0, y + h / 2.0 * k2, yp + h / 2.0 * l2);
            let (k4, l4) = f(x + h, y + h * k3, yp + h * l3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            yp += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
            x += h;
            // renormalize to avoid overflow in classically forbidden regions
            let m = y.abs().max(yp.abs());
            if m > 1e100 {
                y /= m;
                yp /= m;
            }
        }
        y
    };
    let (mut lo, mut hi) = (e_lo, e_hi);
    let s_lo = endpoint_sign(lo);
    assert!(
        s_lo * endpoint_sign(hi) < 0.0,
        "shooting bracket does not straddle the ground energy"
    );
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if endpoint_sign(mid) * s_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Shooting oracle specialized to piecewise-constant potentials: the
/// transfer across each constant segment is the exact cos/cosh propagator,
/// so the only error is the bisection width. `segments` are
/// `(right_endpoint, value)` with the last endpoint acting as `x_end`.
/// Neumann data at the origin; bisection on the endpoint sign.
pub fn shooting_piecewise_constant(segments: &[(f64, f64)], e_lo: f64, e_hi: f64) -> f64 {
    let endpoint = |e: f64| -> f64 {
        let mut psi = 1.0f64;
        let mut dpsi = 0.0f64;
        let mut x = 0.0f64;
        for &(right, v) in segments {
            let len = right - x;
            let w = v - e;
            if w.abs() < 1e-14 {
                psi += dpsi * len;
            } else if w > 0.0 {
                let k = w.sqrt();
                let (c, s) = ((k * len).cosh(), (k * len).sinh());
                let (p, d) = (psi * c + dpsi / k * s, psi * k * s + dpsi * c);
                psi = p;
                dpsi = d;
            } else {
                let k = (-w).sqrt();
                let (c, s) = ((k * len).cos(), (k * len).sin());
                let (p, d) = (psi * c + dpsi / k * s, -psi * k * s + dpsi * c);
                psi = p;
                dpsi = d;
            }
            // keep magnitudes bounded; sign is all that matters
            let m = psi.abs().max(dpsi.abs());
            if m > 1e100 {
                psi /= m;
                dpsi /= m;
            }
            x = right;
        }
        psi
    };
    let (mut lo, mut hi) = (e_lo, e_hi);
    let s_lo = endpoint(lo);
    assert!(s_lo * endpoint(hi) < 0.0, "bracket does not straddle the ground energy");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if endpoint(mid) * s_lo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn oracle_self_checks() {
    // dense eigenvalues of the (2, -1) tridiagonal
    let n = 12;
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        a[i * n + i] = 2.0;
        if i + 1 < n {
            a[i * n + i + 1] = -1.0;
            a[(i + 1) * n + i] = -1.0;
        }
    }
    let eig = dense_sym_eigenvalues(&a, n);
    for (k, lam) in eig.iter().enumerate() {
        let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
        assert!((lam - exact).abs() < 1e-12);
    }
    // Simpson integrates cubics exactly
    let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 64);
    assert!((v - 0.0).abs() < 1e-13);
    // shooting on the half-line harmonic oscillator with Neumann origin
    let e = shooting_ground_energy(|x| x * x, 0.0, 3.0, 14.0, 40_000);
    assert!((e - 1.0).abs() < 1e-8, "shooting harmonic: {e}");
}

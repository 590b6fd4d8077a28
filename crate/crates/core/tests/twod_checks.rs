//! Cross-validation of the two-particle solver: dense oracle agreement,
//! exactness of the diagonal fold, sector dominance, Neumann bracketing,
//! threshold behavior, and the rotated-versus-original crosscheck.

mod common;

use pairbound::grid::{Bc, Grid1D, Grid2D, Symmetry};
use pairbound::linalg::lanczos::LanczosOptions;
use pairbound::oned::ground_state;
use pairbound::potentials::PotentialSpec;
use pairbound::twod::{
    assemble_q2d, assemble_region, discrete_below, eigs_below, full_square_crosscheck,
    lowest_eigs, weyl_residual, CutBc,
};

fn dense_of(op: &pairbound::twod::Operator2D) -> Vec<f64> {
    let n = op.n;
    let mut dense = vec![0.0f64; n * n];
    for r in 0..n {
        for p in op.csr.row_ptr[r]..op.csr.row_ptr[r + 1] {
            dense[r * n + op.csr.cols[p] as usize] = op.csr.vals[p];
        }
    }
    common::dense_sym_eigenvalues(&dense, n)
}

#[test]
fn lanczos_agrees_with_dense_oracle_on_triangle() {
    let spec = PotentialSpec::harmonic(1.0);
    let grid = Grid2D::new(6.0, 0.375, Symmetry::Plus, Bc::Dirichlet).unwrap();
    let op = assemble_q2d(&spec, &grid).unwrap();
    assert!(op.n <= 200, "keep the dense oracle small, n = {}", op.n);
    let oracle = dense_of(&op);
    let got = lowest_eigs(&op, 5, &LanczosOptions::default()).unwrap();
    for k in 0..5 {
        assert!(
            (got.values[k] - oracle[k]).abs() <= 1e-8,
            "k = {k}: {} vs {}",
            got.values[k],
            oracle[k]
        );
    }
}

#[test]
fn fold_reproduces_square_symmetric_subspace_exactly() {
    // assemble the full square with the symmetrized potential by hand and
    // classify its eigenvalues by exchange parity; the folded triangle must
    // reproduce the symmetric sublist to rounding
    let m = 10usize;
    let h = 0.4f64;
    let spec = PotentialSpec::harmonic(1.0);
    let coord = |t: usize| (t as f64 + 0.5) * h;
    let inv_h2 = 1.0 / (h * h);
    let n = m * m;
    let mut dense = vec![0.0f64; n * n];
    for i in 0..m {
        for j in 0..m {
            let p = i * m + j;
            let v = coord(i).min(coord(j)).powi(2);
            let mut diag = 4.0 * inv_h2 + v;
            if i == 0 {
                diag -= inv_h2;
            }
            if j == 0 {
                diag -= inv_h2;
            }
            if i + 1 == m {
                diag += inv_h2;
            } else {
                dense[p * n + (p + m)] = -inv_h2;
                dense[(p + m) * n + p] = -inv_h2;
            }
            if j + 1 == m {
                diag += inv_h2;
            } else {
                dense[p * n + (p + 1)] = -inv_h2;
                dense[(p + 1) * n + p] = -inv_h2;
            }
            dense[p * n + p] = diag;
        }
    }
    // symmetric-subspace matrix in the orthonormal symmetrized basis
    let mut sym_nodes = Vec::new();
    for j in 0..m {
        for i in 0..=j {
            sym_nodes.push((i, j));
        }
    }
    let ns = sym_nodes.len();
    let basis_coeff = |(i, j): (usize, usize), (a, b): (usize, usize)| -> f64 {
        // coefficient of square node (a, b) in the symmetrized basis vector
        if i == j {
            if (a, b) == (i, j) {
                1.0
            } else {
                0.0
            }
        } else if (a, b) == (i, j) || (a, b) == (j, i) {
            std::f64::consts::FRAC_1_SQRT_2
        } else {
            0.0
        }
    };
    let mut sym_dense = vec![0.0f64; ns * ns];
    for (r, &nr) in sym_nodes.iter().enumerate() {
        for (c, &nc) in sym_nodes.iter().enumerate() {
            let mut acc = 0.0;
            for a in 0..m {
                for b in 0..m {
                    let ca = basis_coeff(nr, (a, b));
                    if ca == 0.0 {
                        continue;
                    }
                    for a2 in 0..m {
                        for b2 in 0..m {
                            let cb = basis_coeff(nc, (a2, b2));
                            if cb != 0.0 {
                                acc += ca * dense[(a * m + b) * n + (a2 * m + b2)] * cb;
                            }
                        }
                    }
                }
            }
            sym_dense[r * ns + c] = acc;
        }
    }
    let oracle = common::dense_sym_eigenvalues(&sym_dense, ns);

    let grid = Grid2D::new(m as f64 * h, h, Symmetry::Plus, Bc::Dirichlet).unwrap();
    let op = assemble_q2d(&spec, &grid).unwrap();
    let folded = dense_of(&op);
    assert_eq!(folded.len(), oracle.len());
    for k in 0..folded.len() {
        assert!(
            (folded[k] - oracle[k]).abs() < 1e-9,
            "k = {k}: {} vs {}",
            folded[k],
            oracle[k]
        );
    }
}

#[test]
fn degenerate_strip_reproduces_one_dimensional_operator() {
    // a one-node-wide column of the triangle with Neumann cuts carries the
    // pure x2 Laplacian plus a constant potential: compare against the 1D
    // assembly on the same interval
    let spec = PotentialSpec::square_well(4.0, 1.0);
    let m = 40usize;
    let h = 0.25f64;
    let op = assemble_region(
        m,
        h,
        Bc::Neumann,
        Bc::Dirichlet,
        false,
        CutBc::Neumann,
        |i, j| i == 0 && j >= 1,
        |i, _| spec.eval_v((i as f64 + 0.5) * h),
    )
    .unwrap();
    let strip = dense_of(&op);

    let v0 = spec.eval_v(0.5 * h).unwrap();
    let g1 = Grid1D::new((m - 1) as f64 * h, m - 1, Bc::Neumann, Bc::Dirichlet).unwrap();
    let t = pairbound::oned::assemble_h1d(&PotentialSpec::square_well(0.0, 1.0), &g1).unwrap();
    for k in 0..4 {
        let expect = t.eigenvalue(k) + v0;
        assert!(
            (strip[k] - expect).abs() < 1e-10,
            "k = {k}: {} vs {expect}",
            strip[k]
        );
    }
}

#[test]
fn sector_dominance_lowest_four() {
    let spec = PotentialSpec::harmonic(1.0);
    let opts = LanczosOptions::default();
    let gp = Grid2D::new(12.0, 0.1, Symmetry::Plus, Bc::Dirichlet).unwrap();
    let gm = Grid2D::new(12.0, 0.1, Symmetry::Minus, Bc::Dirichlet).unwrap();
    let ep = lowest_eigs(&assemble_q2d(&spec, &gp).unwrap(), 4, &opts).unwrap();
    let em = lowest_eigs(&assemble_q2d(&spec, &gm).unwrap(), 4, &opts).unwrap();
    for t in 0..4 {
        assert!(em.values[t] >= ep.values[t] - 1e-9);
    }
}

#[test]
fn neumann_bracketing_of_the_sector_decomposition() {
    // cutting the triangle along x1 = L and x2 = L with natural conditions
    // can only lower the bottom of the spectrum
    let spec = PotentialSpec::harmonic(1.0);
    let m = 48usize;
    let h = 0.25f64;
    let jl = 24usize; // cut at L = 6
    let opts = LanczosOptions::default();
    let pot = |i: usize, _j: usize| spec.eval_v((i as f64 + 0.5) * h);

    let full = assemble_region(m, h, Bc::Neumann, Bc::Dirichlet, false, CutBc::Neumann, |_, _| true, pot)
        .unwrap();
    let lam_full = lowest_eigs(&full, 1, &opts).unwrap().values[0];

    let piece = |mask: Box<dyn Fn(usize, usize) -> bool>| -> f64 {
        let op = assemble_region(m, h, Bc::Neumann, Bc::Dirichlet, false, CutBc::Neumann, mask, pot)
            .unwrap();
        lowest_eigs(&op, 1, &opts).unwrap().values[0]
    };
    let lam1 = piece(Box::new(move |_i, j| j < jl));
    let lam2 = piece(Box::new(move |i, j| i < jl && j >= jl));
    let lam3 = piece(Box::new(move |i, _j| i >= jl));
    let lam_min = lam1.min(lam2).min(lam3);
    assert!(
        lam_full >= lam_min - 1e-10,
        "bracketing violated: {lam_full} < min({lam1}, {lam2}, {lam3})"
    );
}

#[test]
fn threshold_window_fills_while_bound_count_stays() {
    // the number of levels inside a window around the threshold grows with
    // the truncation (discretized continuum onset); the count strictly
    // below stays fixed
    let spec = PotentialSpec::harmonic(1.0);
    let eps0 = 1.0;
    let margin = 0.2;
    let counts = |x: f64| -> (usize, usize) {
        let grid = Grid2D::new(x, 0.1, Symmetry::Plus, Bc::Dirichlet).unwrap();
        let op = assemble_q2d(&spec, &grid).unwrap();
        let sky = op.skyline().unwrap();
        let below = sky.factorize_shifted(eps0 - margin).unwrap().negative;
        let upto = sky.factorize_shifted(eps0 + margin).unwrap().negative;
        (below, upto - below)
    };
    let (below_small, window_small) = counts(8.0);
    let (below_big, window_big) = counts(20.0);
    assert_eq!(below_small, 1);
    assert_eq!(below_big, 1);
    assert!(
        window_big > window_small,
        "window population should grow: {window_small} -> {window_big}"
    );
}

#[test]
fn certificate_consistency_with_discrete_below() {
    // a certified spec must show at least one 2D level below the threshold
    let spec = PotentialSpec::square_well(4.0, 1.0);
    let g1 = Grid1D::neumann(70.0, 35_000).unwrap();
    let psi = ground_state(&spec, &g1).unwrap();
    let mass = pairbound::certificate::mass_function(&psi);
    let rep = pairbound::certificate::find_certificate(&mass, 0.75).unwrap();
    assert_eq!(rep.verdict, pairbound::certificate::Verdict::Certified);

    let grid = Grid2D::new(16.0, 0.1, Symmetry::Plus, Bc::Dirichlet).unwrap();
    let rep2d = discrete_below(&spec, &grid, psi.eps0, 0.02, false, &LanczosOptions::default())
        .unwrap();
    assert!(rep2d.count >= 1);
    assert_eq!(rep2d.count, rep2d.count_by_inertia);
}

#[test]
fn weyl_residuals_decrease_and_match_quotient() {
    let spec = PotentialSpec::harmonic(1.0);
    let grid = Grid2D::new(36.0, 0.1, Symmetry::Plus, Bc::Dirichlet).unwrap();
    let g1 = Grid1D::new(36.0, 360, Bc::Neumann, Bc::Dirichlet).unwrap();
    let psi = ground_state(&spec, &g1).unwrap();
    let r8 = weyl_residual(&spec, &psi, 0.0, 8, &grid).unwrap();
    let r16 = weyl_residual(&spec, &psi, 0.0, 16, &grid).unwrap();
    assert!(r16 < r8, "residual must decrease: {r8} -> {r16}");
    // k = 1: the Rayleigh quotient of the test function sits within the
    // residual of the target energy
    let k = 1.0;
    let op = assemble_q2d(&spec, &grid).unwrap();
    let r = weyl_residual(&spec, &psi, k, 8, &grid).unwrap();
    // rebuild the test function to evaluate its quotient
    let m = grid.lines();
    let mut c = vec![0.0f64; op.n];
    for j in 0..m {
        let x2 = (j as f64 + 0.5) * grid.h;
        let g = (k * x2).cos()
            * pairbound::cutoff::ramp(x2 - 8.0)
            * pairbound::cutoff::ramp(16.0 - x2);
        if g == 0.0 {
            continue;
        }
        for i in 0..=j {
            let x1 = (i as f64 + 0.5) * grid.h;
            let f = psi.psi0[i] * pairbound::cutoff::ramp(8.0 - x1);
            if f == 0.0 {
                continue;
            }
            if let Some(p) = op.index(i, j) {
                c[p] = if i == j { f * g } else { std::f64::consts::SQRT_2 * f * g };
            }
        }
    }
    let mut y = vec![0.0f64; op.n];
    op.csr.apply(&c, &mut y);
    let num: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
    let den: f64 = c.iter().map(|a| a * a).sum();
    let quotient = num / den;
    let target = psi.eps0 + k * k;
    assert!(
        (quotient - target).abs() <= r + 1e-12,
        "quotient {quotient} vs target {target}, residual {r}"
    );
}

#[test]
fn square_crosscheck_classifies_and_matches() {
    let spec = PotentialSpec::harmonic(1.0);
    let rep = full_square_crosscheck(&spec, 8.0, 0.2, 4, &LanczosOptions::default()).unwrap();
    assert!(rep.warnings.is_empty(), "{:?}", rep.warnings);
    for (_, s) in &rep.square {
        assert!(s.abs() > 0.98, "mixed exchange indicator {s}");
    }
    assert!(rep.max_diff_plus < 5e-2, "plus sublist differs by {}", rep.max_diff_plus);
    if !rep.q_minus.is_empty() {
        assert!(rep.max_diff_minus < 5e-2);
    }
}

#[test]
fn outer_truncation_monotonicity() {
    // outer Dirichlet dominates outer Neumann, and the two approach each
    // other as the truncation grows (for levels below the threshold)
    let spec = PotentialSpec::harmonic(1.0);
    let opts = LanczosOptions::default();
    let lowest = |x: f64, bc: Bc| -> f64 {
        let grid = Grid2D::new(x, 0.1, Symmetry::Plus, bc).unwrap();
        lowest_eigs(&assemble_q2d(&spec, &grid).unwrap(), 1, &opts).unwrap().values[0]
    };
    let (d8, n8) = (lowest(8.0, Bc::Dirichlet), lowest(8.0, Bc::Neumann));
    let (d12, n12) = (lowest(12.0, Bc::Dirichlet), lowest(12.0, Bc::Neumann));
    assert!(d8 >= n8 - 1e-12);
    assert!(d12 >= n12 - 1e-12);
    assert!(d12 - n12 <= d8 - n8 + 1e-12, "gap must shrink: {} vs {}", d12 - n12, d8 - n8);
}

#[test]
fn eigs_below_reports_empty_when_shift_is_below_spectrum() {
    let spec = PotentialSpec::harmonic(1.0);
    let grid = Grid2D::new(8.0, 0.25, Symmetry::Plus, Bc::Dirichlet).unwrap();
    let op = assemble_q2d(&spec, &grid).unwrap();
    let (count, pairs) = eigs_below(&op, -5.0, &LanczosOptions::default()).unwrap();
    assert_eq!(count, 0);
    assert!(pairs.values.is_empty());
}

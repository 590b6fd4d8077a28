//! Subcommand pipelines: wire configs into the solver modules and emit
//! JSON reports plus data files. Every report embeds the fully resolved
//! configuration so a run can be reproduced from its own output.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use pairbound::certificate::{self, CertificateReport, Verdict};
use pairbound::counting;
use pairbound::grid::{Bc, Grid1D, Grid2D};
use pairbound::linalg::lanczos::LanczosOptions;
use pairbound::oned::{self, BoundStateCheck, EigResult1D};
use pairbound::potentials::{self, TailValue};
use pairbound::report::to_json_pretty;
use pairbound::twod;
use pairbound::Error as CoreError;

use crate::config::RunConfig;

/// Failure classification for exit codes: configuration problems exit 2,
/// numerical/computational failures exit 1.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Compute(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Compute(m) => write!(f, "computation failed: {m}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match &e {
            CoreError::NonConvergence { .. }
            | CoreError::GroundStateSign { .. }
            | CoreError::InternalConsistency(_) => CliError::Compute(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Envelope written around every report body.
#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    schema: u32,
    subcommand: &'a str,
    /// Machine-readable name of the mathematical statement this report
    /// checks.
    verifies: &'a str,
    config: &'a RunConfig,
    report: T,
}

fn write_report<T: Serialize>(
    dir: &Path,
    file: &str,
    subcommand: &str,
    verifies: &str,
    config: &RunConfig,
    body: T,
) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file);
    let doc = Report { schema: crate::config::SCHEMA_VERSION, subcommand, verifies, config, report: body };
    let text = to_json_pretty(&doc).map_err(CliError::from)?;
    fs::write(&path, text)?;
    Ok(path)
}

fn grid1d(config: &RunConfig) -> CliResult<Grid1D> {
    Grid1D::new(
        config.grid1d.x_max,
        config.grid1d.n_points,
        config.grid1d.bc_origin,
        Bc::Dirichlet,
    )
    .map_err(CliError::from)
}

fn grid2d(config: &RunConfig) -> CliResult<Grid2D> {
    let mut g = Grid2D::new(
        config.grid2d.x_extent,
        config.grid2d.h,
        config.grid2d.symmetry,
        config.grid2d.outer_bc,
    )?;
    g.q_minus_full_dirichlet = config.grid2d.q_minus_full_dirichlet;
    Ok(g)
}

fn solve_ground(config: &RunConfig) -> CliResult<EigResult1D> {
    let grid = grid1d(config)?;
    Ok(oned::ground_state(&config.potential, &grid)?)
}

// ---------------------------------------------------------------- potential

#[derive(Serialize)]
struct PotentialBody {
    assumptions: potentials::AssumptionReport,
}

pub fn run_check_potential(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let rep = potentials::check_assumptions(&config.potential, config.grid1d.x_max, 1e-8)?;
    let out = Path::new(&config.outputs);
    let p = write_report(
        out,
        "assumptions.json",
        "check-potential",
        "bounded-negative-part-and-tail-conditions",
        config,
        PotentialBody { assumptions: rep },
    )?;
    Ok(vec![p])
}

// ---------------------------------------------------------------- spectrum1d

#[derive(Serialize)]
struct Spectrum1dBody {
    eps0: f64,
    e2: f64,
    e2_above_tail: bool,
    residual: f64,
    gap_surrogate: f64,
    bound_state: BoundStateCheck,
    agmon: Option<oned::AgmonReport>,
    audit: oned::AppendixAudit,
}

pub fn run_spectrum1d(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let result = solve_ground(config)?;
    let spec = &config.potential;
    let check = oned::assumption_b_check(spec, &result, 1e-6)?;
    let agmon = match spec.tail_value() {
        TailValue::Finite(v) if !(result.eps0 < v) => None,
        _ => Some(oned::agmon_check(spec, &result, 0.9)?),
    };
    let audit = oned::appendix_audit(
        spec,
        &result,
        oned::BumpSpec { scale: result.grid.x_max / 3.0 },
    )?;
    let body = Spectrum1dBody {
        eps0: result.eps0,
        e2: result.e2,
        e2_above_tail: result.e2_above_tail,
        residual: result.residual,
        gap_surrogate: result.gap(spec.tail_value()),
        bound_state: check,
        agmon,
        audit,
    };
    let out = Path::new(&config.outputs);
    let mut paths = vec![write_report(
        out,
        "spectrum1d.json",
        "spectrum1d",
        "one-particle-ground-pair-and-spectral-gap",
        config,
        body,
    )?];
    let csv = out.join("psi0.csv");
    fs::write(&csv, result.psi_csv())?;
    paths.push(csv);
    Ok(paths)
}

// ---------------------------------------------------------------- certify

#[derive(Serialize)]
struct CertifyBody {
    bound_state: BoundStateCheck,
    certificate: CertificateReport,
}

/// Certificate driver: confirm the one-particle bound state, run the
/// schedule, extend the grid once if it was too short, and cross-check the
/// certified scale against the direct 2D Rayleigh quotient.
pub fn certify_once(
    config: &RunConfig,
    rho: f64,
) -> CliResult<(BoundStateCheck, CertificateReport)> {
    let spec = &config.potential;
    let mut result = solve_ground(config)?;
    let check = oned::assumption_b_check(spec, &result, 1e-6)?;
    if !check.confirmed {
        return Err(CliError::Compute(format!(
            "one-particle bound state not confirmed (eps0 = {}, below_tail = {}, truncation_stable = {}): the certificate construction needs an isolated ground state below the tail",
            check.eps0, check.below_tail, check.truncation_stable
        )));
    }
    let n_cap = config.certificate.n_max;
    let mut mass = certificate::mass_function(&result);
    let mut report = find_with_cap(&mass, rho, n_cap)?;
    if report.verdict == Verdict::Inconclusive && 2.0 * n_cap as f64 > config.grid1d.x_max {
        // schedule was grid-limited: extend once and retry
        let h = result.grid.spacing();
        let x_big = (2.0 * n_cap as f64 + 8.0).max(2.0 * config.grid1d.x_max);
        let grid = Grid1D::new(
            x_big,
            (x_big / h).round() as usize,
            result.grid.bc_origin,
            result.grid.bc_outer,
        )?;
        result = oned::ground_state(spec, &grid)?;
        mass = certificate::mass_function(&result);
        report = find_with_cap(&mass, rho, n_cap)?;
    }
    if report.verdict == Verdict::Certified {
        let gap = certificate::rayleigh_crosscheck(spec, &result, rho, report.n)?;
        report.gap_2d = gap;
        if !(gap < 0.0) {
            report.verdict = Verdict::Inconclusive;
        }
    }
    Ok((check, report))
}

fn find_with_cap(
    mass: &certificate::MassFunction,
    rho: f64,
    n_cap: usize,
) -> CliResult<CertificateReport> {
    let mut rep = certificate::find_certificate(mass, rho)?;
    rep.trace.retain(|t| t.n <= n_cap);
    if rep.trace.is_empty() {
        return Err(CliError::Config(format!(
            "certificate n_max = {n_cap} leaves no schedule entries"
        )));
    }
    if rep.n > n_cap {
        let last = *rep.trace.last().unwrap();
        rep.n = last.n;
        rep.a = last.a;
        rep.b_n = last.b_n;
        rep.c_n = last.c_n;
        rep.d_n = last.d_n;
        rep.g_n = last.g_n;
        let abs_tol = rep.abs_tol;
        rep.verdict = if last.g_n < -abs_tol { Verdict::Certified } else { Verdict::Inconclusive };
    }
    Ok(rep)
}

pub fn run_certify(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let (check, report) = certify_once(config, config.certificate.rho)?;
    let out = Path::new(&config.outputs);
    let trace = report.trace_csv();
    let mut paths = vec![write_report(
        out,
        "certificate.json",
        "certify",
        "variational-certificate-negative-rayleigh-gap",
        config,
        CertifyBody { bound_state: check, certificate: report },
    )?];
    let csv = out.join("gn_trace.csv");
    fs::write(&csv, trace)?;
    paths.push(csv);
    Ok(paths)
}

// ---------------------------------------------------------------- spectrum2d

#[derive(Serialize)]
struct Spectrum2dBody {
    margin_used: f64,
    margin_source: String,
    report: twod::SpectrumReport2D,
}

/// Default margin: five times a Richardson-style error estimate obtained
/// from two coarse solves at spacings 2h and 4h.
fn auto_margin(config: &RunConfig, eps0_ref: f64) -> CliResult<f64> {
    let opts = LanczosOptions::default();
    let coarse = |factor: f64| -> CliResult<f64> {
        let h = config.grid2d.h * factor;
        let m = (config.grid2d.x_extent / h).round().max(8.0);
        let g = Grid2D::new(m * h, h, config.grid2d.symmetry, config.grid2d.outer_bc)?;
        let op = twod::assemble_q2d(&config.potential, &g)?;
        Ok(twod::lowest_eigs(&op, 1, &opts)?.values[0])
    };
    let l2 = coarse(2.0)?;
    let l4 = coarse(4.0)?;
    let est = (l2 - l4).abs().max(1e-6 * eps0_ref.abs().max(1.0));
    Ok(5.0 * est)
}

pub fn run_spectrum2d(config: &RunConfig, export_operator: bool) -> CliResult<Vec<PathBuf>> {
    let result = solve_ground(config)?;
    let eps0_ref = result.eps0;
    let (margin, margin_source) = match config.grid2d.margin {
        Some(m) => (m, "config".to_string()),
        None => (auto_margin(config, eps0_ref)?, "auto-richardson".to_string()),
    };
    let grid = grid2d(config)?;
    let rep = twod::discrete_below(
        &config.potential,
        &grid,
        eps0_ref,
        margin,
        config.grid2d.stability,
        &LanczosOptions::default(),
    )?;
    let out = Path::new(&config.outputs);
    fs::create_dir_all(out)?;
    let mut paths = Vec::new();
    // slice of the lowest bound state along its strongest line, for plotting
    if let Some(vec0) = rep.vectors.first() {
        let op = twod::assemble_q2d(&config.potential, &grid)?;
        let m = grid.lines();
        // the bound state concentrates near the fold; scan the diagonal
        let mut best = (0usize, 0.0f64);
        for j in 0..m {
            if let Some(p) = op.index(j, j) {
                let v = vec0[p].abs();
                if v > best.1 {
                    best = (j, v);
                }
            }
        }
        let csv = twod::eigenvector_slice_csv(&op, vec0, best.0)?;
        let slice_path = out.join("lowest_state_slice.csv");
        fs::write(&slice_path, csv)?;
        paths.push(slice_path);
        if export_operator {
            let mut buf = Vec::new();
            op.csr.write_triplets(&mut buf).map_err(CliError::from)?;
            let op_path = out.join("operator.txt");
            fs::write(&op_path, buf)?;
            paths.push(op_path);
        }
    }
    paths.insert(
        0,
        write_report(
            out,
            "spectrum2d.json",
            "spectrum2d",
            "bound-states-below-essential-threshold",
            config,
            Spectrum2dBody { margin_used: margin, margin_source, report: rep },
        )?,
    );
    Ok(paths)
}

// ---------------------------------------------------------------- weyl

#[derive(Serialize)]
struct WeylBody {
    k: f64,
    eps0: f64,
    target: f64,
    residuals: Vec<WeylEntry>,
}

#[derive(Serialize)]
struct WeylEntry {
    n: usize,
    residual: f64,
}

pub fn run_weyl(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let spec = &config.potential;
    let g2 = grid2d(config)?;
    // the 1D samples must live on the x1 lines of the 2D grid
    let n1 = g2.lines();
    let g1 = Grid1D::new(g2.x_extent, n1, Bc::Neumann, Bc::Dirichlet)?;
    let psi = oned::ground_state(spec, &g1)?;
    let mut residuals = Vec::new();
    for &n in &config.weyl.n_values {
        let r = twod::weyl_residual(spec, &psi, config.weyl.k, n, &g2)?;
        residuals.push(WeylEntry { n, residual: r });
    }
    let body = WeylBody {
        k: config.weyl.k,
        eps0: psi.eps0,
        target: psi.eps0 + config.weyl.k * config.weyl.k,
        residuals,
    };
    let out = Path::new(&config.outputs);
    let p = write_report(
        out,
        "weyl.json",
        "weyl",
        "essential-spectrum-onset-residuals",
        config,
        body,
    )?;
    Ok(vec![p])
}

// ---------------------------------------------------------------- count-bound

#[derive(Serialize)]
struct CountBody {
    reports: Vec<counting::CountingBoundReport>,
}

pub fn run_count_bound(config: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let result = solve_ground(config)?;
    let out = Path::new(&config.outputs);
    fs::create_dir_all(out)?;
    let mut reports = Vec::new();
    let mut paths = Vec::new();
    for &r in &config.counting.r_values {
        let rep = counting::finiteness_audit(&config.potential, &result, r)?;
        let profile_path = out.join(format!("z_profile_R{r}.txt"));
        fs::write(&profile_path, rep.z_profile_text())?;
        paths.push(profile_path);
        reports.push(rep);
    }
    paths.insert(
        0,
        write_report(
            out,
            "counting.json",
            "count-bound",
            "bargmann-finiteness-counting-chain",
            config,
            CountBody { reports },
        )?,
    );
    Ok(paths)
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepBody {
    rhos: Vec<f64>,
    reports: Vec<CertificateReport>,
}

pub fn run_sweep(config: &RunConfig, rhos: &[f64]) -> CliResult<Vec<PathBuf>> {
    if rhos.is_empty() {
        return Err(CliError::Config("sweep needs at least one rho".into()));
    }
    for r in rhos {
        if !(*r > 0.5 && *r < 1.0) {
            return Err(CliError::Config(format!(
                "sweep rho must lie in (0.5, 1), got {r}"
            )));
        }
    }
    // fan out over the worker pool; results collected in input order
    let results: Vec<CliResult<CertificateReport>> = rhos
        .par_iter()
        .map(|&rho| certify_once(config, rho).map(|(_, rep)| rep))
        .collect();
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    let out = Path::new(&config.outputs);
    let p = write_report(
        out,
        "sweep.json",
        "sweep",
        "certificate-rho-sweep",
        config,
        SweepBody { rhos: rhos.to_vec(), reports },
    )?;
    Ok(vec![p])
}

// ---------------------------------------------------------------- crosscheck

#[derive(Serialize)]
struct CrosscheckBody {
    report: twod::SquareCrosscheck,
}

pub fn run_crosscheck(config: &RunConfig, k: usize) -> CliResult<Vec<PathBuf>> {
    let rep = twod::full_square_crosscheck(
        &config.potential,
        config.grid2d.x_extent,
        config.grid2d.h,
        k,
        &LanczosOptions::default(),
    )?;
    let out = Path::new(&config.outputs);
    let p = write_report(
        out,
        "crosscheck.json",
        "crosscheck",
        "rotated-fold-against-original-coordinates",
        config,
        CrosscheckBody { report: rep },
    )?;
    Ok(vec![p])
}

//! Command-line interface: solve, sweep, limit validation, mesh export, and
//! period verification, with stable machine-readable output formats.
//!
//! Exit codes: 0 success, 2 bracket failure, 3 accuracy failure (period or
//! cycle residuals out of tolerance), 4 limit-threshold failure, 64 usage
//! error. All commands are deterministic given their flags: two runs with
//! identical flags produce byte-identical files. The environment variable
//! `PERIODFORGE_THREADS` caps the worker count; output ordering does not
//! depend on scheduling.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::limits::{self, LimitReport};
use crate::mesh::{self, io::MeshFormat};
use crate::params::SurfaceParams;
use crate::period_solver::{self, SolveConfig};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for a failed lambda bracket.
pub const EXIT_BRACKET: i32 = 2;
/// Exit code for residuals out of tolerance.
pub const EXIT_ACCURACY: i32 = 3;
/// Exit code for a limit check missing its frozen threshold.
pub const EXIT_LIMIT: i32 = 4;
/// Exit code for usage errors (bad flags, out-of-domain arguments).
pub const EXIT_USAGE: i32 = 64;

/// Doubly periodic minimal surfaces: period solving, limit validation, and
/// mesh export.
#[derive(Debug, Parser)]
#[command(name = "periodforge", version, disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the period problem at one (x, rho) and write a params JSON.
    Solve(SolveArgs),
    /// Solve along an x grid and write the solution curve as CSV.
    Sweep(SweepArgs),
    /// Validate the closed-form limits and write CSV reports.
    Limits(LimitsArgs),
    /// Build, assemble, tile, and export a surface mesh from solved params.
    Mesh(MeshArgs),
    /// Re-verify period closure of a params file.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Branch point location in (0, 1).
    #[arg(long)]
    x: f64,
    /// Angle parameter in (-pi/2, 0].
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    /// Lower end of the lambda scan bracket.
    #[arg(long, default_value_t = 1.05)]
    lambda_lo: f64,
    /// Upper end of the lambda scan bracket.
    #[arg(long, default_value_t = 20.0)]
    lambda_hi: f64,
    /// Root tolerance on c1 - c2.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Absolute quadrature tolerance per integral.
    #[arg(long, default_value_t = 1e-11)]
    quad_tol: f64,
    /// Output path for the params JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Angle parameter in (-pi/2, 0].
    #[arg(long, allow_hyphen_values = true)]
    rho: f64,
    /// Smallest x of the grid.
    #[arg(long)]
    x_min: f64,
    /// Largest x of the grid.
    #[arg(long)]
    x_max: f64,
    /// Number of grid points (geometric spacing).
    #[arg(long)]
    steps: usize,
    /// Root tolerance on c1 - c2.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Absolute quadrature tolerance per integral.
    #[arg(long, default_value_t = 1e-11)]
    quad_tol: f64,
    /// Output path for the CSV (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LimitsArgs {
    /// Which limit family to check: x0, x1, wdata, or residue.
    #[arg(long)]
    which: String,
    /// Scale parameter for the x -> 0 checks.
    #[arg(long, default_value_t = 2.0)]
    lambda: f64,
    /// Angle parameter for the x -> 0 and residue checks.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rho: f64,
    /// End branch point for the x -> 1 checks, e.g. 0.5i or 0.2+0.3i.
    #[arg(long, default_value = "0.5i")]
    y: String,
    /// Gauss-map scale constant for the wdata check.
    #[arg(long, default_value_t = 1.0)]
    c_scale: f64,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-11)]
    quad_tol: f64,
    /// Directory receiving one CSV per check.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct MeshArgs {
    /// Params JSON produced by the solve command.
    #[arg(long)]
    params: PathBuf,
    /// Grid resolution (>= 8).
    #[arg(long, default_value_t = 64)]
    resolution: usize,
    /// Tiled copies on each side of the fundamental piece.
    #[arg(long, default_value_t = 0)]
    copies: usize,
    /// Output format: obj or ply.
    #[arg(long, default_value = "obj")]
    format: MeshFormat,
    /// End-cut radius around ybar (default 0.05 x distance to the domain
    /// boundary).
    #[arg(long)]
    eps_end: Option<f64>,
    /// Output mesh path; the discrete-checks sidecar is written next to it
    /// with a .checks.json suffix.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Params JSON produced by the solve command.
    #[arg(long)]
    params: PathBuf,
    /// Absolute quadrature tolerance for the boundary-loop integrals.
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Output path for the report JSON (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Period-closure residuals as serialized in params files.
#[derive(Debug, Serialize, serde::Deserialize)]
struct ResidualRecord {
    p1: f64,
    p2: f64,
    p3: f64,
    residue: f64,
    alpha_consistency: f64,
}

/// The params JSON schema written by solve and read by mesh and verify.
#[derive(Debug, Serialize, serde::Deserialize)]
struct ParamsRecord {
    schema: String,
    version: String,
    x: f64,
    rho: f64,
    lambda: f64,
    y_re: f64,
    y_im: f64,
    alpha: f64,
    c: f64,
    residuals: ResidualRecord,
    quadrature_tol: f64,
}

impl ParamsRecord {
    fn new(p: &SurfaceParams, rep: &period_solver::PeriodReport, quad_tol: f64) -> Self {
        ParamsRecord {
            schema: "periodforge.solve.v1".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            x: p.x,
            rho: p.rho,
            lambda: p.lambda,
            y_re: p.y.re,
            y_im: p.y.im,
            alpha: p.alpha,
            c: p.c,
            residuals: ResidualRecord {
                p1: rep.period_residuals[0],
                p2: rep.period_residuals[1],
                p3: rep.period_residuals[2],
                residue: rep.residue_reality,
                alpha_consistency: rep.alpha_consistency,
            },
            quadrature_tol: quad_tol,
        }
    }

    fn params(&self) -> crate::Result<SurfaceParams> {
        SurfaceParams::new(
            self.x,
            self.rho,
            self.lambda,
            Complex64::new(self.y_re, self.y_im),
            self.alpha,
            self.c,
        )
    }
}

/// Parse a complex number from forms like `0.5`, `0.5i`, `-i`, `0.2+0.3i`.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("bad complex number {s:?} (expected forms like 0.5, 0.5i, 0.2+0.3i)");
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(re) = t.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    let body = t.strip_suffix('i').ok_or_else(bad)?;
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let unit = |part: &str| -> Result<f64, String> {
        match part {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => other.parse().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            Ok(Complex64::new(re, unit(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, unit(body)?)),
    }
}

/// Map a library error to the exit-code contract.
fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Bracket { .. } => EXIT_BRACKET,
        Error::Accuracy { .. }
        | Error::Mesh(_)
        | Error::InvalidSolution { .. }
        | Error::Indeterminate(..) => EXIT_ACCURACY,
        Error::Domain(_) | Error::NoAlpha { .. } | Error::Parse { .. } => EXIT_USAGE,
        _ => 1,
    }
}

/// Write `contents` to `path`, or to stdout when no path was given.
fn write_output(path: Option<&Path>, contents: &str) -> crate::Result<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|e| Error::io(p.display().to_string(), e)),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read_params(path: &Path) -> crate::Result<(ParamsRecord, SurfaceParams)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let record: ParamsRecord = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let params = record.params()?;
    Ok((record, params))
}

fn check_solve_domain(x: f64, rho: f64) -> crate::Result<()> {
    if !(0.0 < x && x < 1.0) {
        return Err(Error::Domain(format!("--x {x} not in (0, 1)")));
    }
    if !(-std::f64::consts::FRAC_PI_2 < rho && rho <= 0.0) {
        return Err(Error::Domain(format!("--rho {rho} not in (-pi/2, 0]")));
    }
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> crate::Result<()> {
    check_solve_domain(args.x, args.rho)?;
    let mut cfg = SolveConfig::new(args.rho, args.x);
    cfg.lambda_bracket = (args.lambda_lo, args.lambda_hi);
    cfg.tol_root = args.tol;
    cfg.tol_quad = args.quad_tol;
    if !(args.lambda_lo > 1.0 && args.lambda_lo < args.lambda_hi) {
        return Err(Error::Domain(format!(
            "lambda bracket ({}, {}) must satisfy 1 < lo < hi",
            args.lambda_lo, args.lambda_hi
        )));
    }
    let solved = period_solver::solve_lambda(&cfg)?;
    let report = period_solver::verify_periods(&solved, args.quad_tol.max(1e-12))?;
    let record = ParamsRecord::new(&solved, &report, args.quad_tol);
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn cmd_sweep(args: &SweepArgs) -> crate::Result<()> {
    check_solve_domain(args.x_min, args.rho)?;
    if !(0.0 < args.x_min && args.x_min <= args.x_max && args.x_max < 1.0) {
        return Err(Error::Domain(format!(
            "x grid ({}, {}) must satisfy 0 < x_min <= x_max < 1",
            args.x_min, args.x_max
        )));
    }
    if args.steps == 0 {
        return Err(Error::Domain("steps must be >= 1".into()));
    }
    let grid: Vec<f64> = if args.steps == 1 {
        vec![args.x_min]
    } else {
        let ratio = (args.x_max / args.x_min).powf(1.0 / (args.steps - 1) as f64);
        (0..args.steps)
            .map(|i| args.x_min * ratio.powi(i as i32))
            .collect()
    };
    let mut cfg = SolveConfig::new(args.rho, args.x_min);
    cfg.tol_root = args.tol;
    cfg.tol_quad = args.quad_tol;
    let result = period_solver::sweep_x(args.rho, &grid, &cfg)?;

    let mut buf = String::new();
    buf.push_str("# schema=periodforge.sweep.v1\n");
    buf.push_str(
        "x,lambda,y_re,y_im,alpha,c,c1,c2,res_p1,res_p2,res_p3,res_residue,scaled_residue\n",
    );
    for p in &result.solutions {
        let rep = period_solver::verify_periods(p, args.quad_tol.max(1e-12))?;
        let scaled = (p.lambda / p.x) * crate::curve::residue_dh(p).re;
        buf.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
            p.x,
            p.lambda,
            p.y.re,
            p.y.im,
            p.alpha,
            p.c,
            rep.c1,
            rep.c2,
            rep.period_residuals[0],
            rep.period_residuals[1],
            rep.period_residuals[2],
            rep.residue_reality,
            scaled,
        ));
    }
    if let Some(t) = &result.truncated {
        buf.push_str(&format!(
            "# truncated at x={:.16e}: {}\n",
            t.x,
            t.reason.replace('\n', " ")
        ));
    }
    write_output(args.out.as_deref(), &buf)
}

/// One limit check with its frozen pass condition.
struct CheckOutcome {
    report: LimitReport,
    /// Human-readable reason on failure, None on pass.
    failure: Option<String>,
}

fn judge(report: LimitReport, threshold: Option<f64>, relative_to: f64) -> CheckOutcome {
    let mut reasons = Vec::new();
    if !report.errors_decreasing() {
        reasons.push(format!("{}: error sequence not decreasing", report.label));
    }
    if let Some(tol) = threshold {
        let err = report.final_error() / relative_to;
        if !(err < tol) {
            reasons.push(format!(
                "{}: final error {err:.3e} >= threshold {tol:.3e}",
                report.label
            ));
        }
    }
    CheckOutcome {
        report,
        failure: (!reasons.is_empty()).then(|| reasons.join("; ")),
    }
}

fn limit_outcomes(args: &LimitsArgs) -> crate::Result<Vec<CheckOutcome>> {
    let tol = args.quad_tol;
    match args.which.as_str() {
        "x0" => {
            let x_seq = [1e-2, 1e-3, 1e-4];
            let (i2, i4) = limits::check_i2_i4_limits(args.rho, args.lambda, &x_seq, tol)?;
            let target = i4.rows.last().map(|r| r.target).unwrap_or(1.0);
            Ok(vec![judge(i2, None, 1.0), judge(i4, Some(5e-2), target)])
        }
        "x1" => {
            let y = parse_complex(&args.y).map_err(Error::Domain)?;
            let x_seq = [0.9, 0.99, 0.999];
            let (i6, i7) = limits::check_x1_limits(y, &x_seq, tol)?;
            Ok(vec![judge(i6, Some(1e-2), 1.0), judge(i7, Some(2e-2), 1.0)])
        }
        "wdata" => {
            let x_seq = [1e-2, 1e-3, 1e-4];
            let test_set: Vec<Complex64> = (0..10)
                .map(|k| Complex64::from_polar(1.5, 0.3 + 0.25 * k as f64))
                .collect();
            let rep = limits::check_weierstrass_convergence(
                args.rho,
                args.lambda,
                args.c_scale,
                &x_seq,
                &test_set,
                tol,
            )?;
            Ok(vec![judge(rep, None, 1.0)])
        }
        "residue" => {
            let grid = [4e-3, 2e-3, 1e-3];
            let cfg = SolveConfig::new(args.rho, grid[0]);
            let sweep = period_solver::sweep_x(args.rho, &grid, &cfg)?;
            let rep = limits::check_residue_limit(args.rho, &sweep.solutions);
            Ok(vec![judge(rep, Some(5e-2), 1.0)])
        }
        other => Err(Error::Domain(format!(
            "unknown --which {other:?} (expected x0, x1, wdata, or residue)"
        ))),
    }
}

fn cmd_limits(args: &LimitsArgs) -> crate::Result<i32> {
    let outcomes = limit_outcomes(args)?;
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Error::io(args.out_dir.display().to_string(), e))?;
    let mut worst: Option<String> = None;
    for outcome in &outcomes {
        let path = args.out_dir.join(format!("{}.csv", outcome.report.label));
        let mut buf = Vec::new();
        outcome
            .report
            .write_csv(&mut buf)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        std::fs::write(&path, &buf).map_err(|e| Error::io(path.display().to_string(), e))?;
        if let Some(reason) = &outcome.failure {
            if worst.is_none() {
                worst = Some(reason.clone());
            }
        }
    }
    if let Some(reason) = worst {
        eprintln!("limit threshold failure: {reason}");
        return Ok(EXIT_LIMIT);
    }
    Ok(EXIT_OK)
}

/// Sidecar schema for the mesh command's discrete-checks report.
#[derive(Debug, Serialize)]
struct MeshSidecar {
    schema: String,
    version: String,
    resolution: usize,
    copies: usize,
    cycle_residual: f64,
    tree_deviation: f64,
    checks: mesh::DiscreteReport,
    end_fit_eta: f64,
    end_fit_mu: f64,
    end_fit_rss: f64,
}

fn cmd_mesh(args: &MeshArgs) -> crate::Result<()> {
    let (record, params) = read_params(&args.params)?;
    let grid = mesh::build_grid(&params, args.resolution, args.eps_end)?;
    let half = mesh::integrate_surface(&params, &grid)?;
    let piece = mesh::assemble_piece(&half, &params)?;
    let checks = mesh::discrete_checks(&piece, &params)?;
    let (eta, mu, rss) = mesh::fit_end_growth(&piece)?;
    let tiled;
    let out_mesh = if args.copies > 0 {
        tiled = mesh::tile_surface(&piece, args.copies)?;
        &tiled
    } else {
        &piece
    };
    mesh::io::export_mesh(out_mesh, args.format, &args.out)?;
    let sidecar = MeshSidecar {
        schema: "periodforge.meshchecks.v1".to_string(),
        version: record.version,
        resolution: args.resolution,
        copies: args.copies,
        cycle_residual: piece.cycle_residual,
        tree_deviation: piece.tree_deviation,
        checks,
        end_fit_eta: eta,
        end_fit_mu: mu,
        end_fit_rss: rss,
    };
    let sidecar_path = sidecar_path(&args.out);
    let mut text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    text.push('\n');
    std::fs::write(&sidecar_path, text)
        .map_err(|e| Error::io(sidecar_path.display().to_string(), e))
}

/// The sidecar lives next to the mesh with a `.checks.json` suffix.
pub fn sidecar_path(mesh_out: &Path) -> PathBuf {
    let mut name = mesh_out.file_name().unwrap_or_default().to_os_string();
    name.push(".checks.json");
    mesh_out.with_file_name(name)
}

fn cmd_verify(args: &VerifyArgs) -> crate::Result<i32> {
    let (_, params) = read_params(&args.params)?;
    let rep = period_solver::verify_periods(&params, args.quad_tol)?;
    #[derive(Serialize)]
    struct VerifyRecord {
        schema: String,
        residuals: ResidualRecord,
        c1: f64,
        c2: f64,
    }
    let record = VerifyRecord {
        schema: "periodforge.verify.v1".to_string(),
        residuals: ResidualRecord {
            p1: rep.period_residuals[0],
            p2: rep.period_residuals[1],
            p3: rep.period_residuals[2],
            residue: rep.residue_reality,
            alpha_consistency: rep.alpha_consistency,
        },
        c1: rep.c1,
        c2: rep.c2,
    };
    let mut text = serde_json::to_string_pretty(&record).expect("record serializes");
    text.push('\n');
    write_output(args.out.as_deref(), &text)?;
    let pass = rep.period_residuals.iter().all(|&r| r < 1e-7)
        && rep.residue_reality < 1e-8
        && rep.alpha_consistency < 1e-6;
    Ok(if pass { EXIT_OK } else { EXIT_ACCURACY })
}

/// Cap the rayon worker count from `PERIODFORGE_THREADS` when set.
fn configure_threads() {
    if let Ok(v) = std::env::var("PERIODFORGE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

/// Run the CLI on the given argument list and return the process exit code.
///
/// Never panics on malformed input: parse and domain errors map to exit 64
/// with diagnostics on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    configure_threads();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Keep clap's conventional success exit for --help / --version.
            let code = if e.exit_code() == 0 { 0 } else { EXIT_USAGE };
            let _ = e.print();
            let _ = std::io::stdout().flush();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => cmd_solve(a).map(|()| EXIT_OK),
        Command::Sweep(a) => cmd_sweep(a).map(|()| EXIT_OK),
        Command::Limits(a) => cmd_limits(a),
        Command::Mesh(a) => cmd_mesh(a).map(|()| EXIT_OK),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("0.5i").unwrap(), Complex64::new(0.0, 0.5));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("0.2+0.3i").unwrap(), Complex64::new(0.2, 0.3));
        assert_eq!(
            parse_complex("0.2-0.3i").unwrap(),
            Complex64::new(0.2, -0.3)
        );
        assert_eq!(
            parse_complex("1e-2+2e-3i").unwrap(),
            Complex64::new(1e-2, 2e-3)
        );
        assert!(parse_complex("frog").is_err());
        assert!(parse_complex("1+2j").is_err());
    }

    #[test]
    fn sidecar_next_to_mesh() {
        let p = sidecar_path(Path::new("/tmp/out/surface.obj"));
        assert_eq!(p, Path::new("/tmp/out/surface.obj.checks.json"));
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run(["periodforge", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["periodforge", "solve", "--x", "nope"]), EXIT_USAGE);
    }
}

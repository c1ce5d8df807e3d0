//! Solve the period problem: fix `rho`, parametrize the end position by
//! `ybar(x) = x e^{i rho} / (e^{i rho} + i lambda)`, root-find `lambda` so
//! that the two horizontal period conditions `c^2 = c1` and `c^2 = c2` agree,
//! and verify period closure on the boundary loop of the fundamental domain.
//!
//! The three closure conditions are
//!
//! ```text
//! cos alpha = A_num / A_den,
//! c^2 = c1 = (I1 + I2) / (I4 - I3),
//! c^2 = c2 = (I5 - I6) / (I7 - I8),
//! ```
//!
//! and a solution exists where the continuous functions `c1(lambda)` and
//! `c2(lambda)` cross transversally.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::curve::{continue_sqrt_step, eval_v2, segment_distance};
use crate::error::{Error, Result};
use crate::params::{self, SurfaceParams};
use crate::quadrature::{adaptive_gk_complex, integral_set, IntegralSet};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Configuration for [`solve_lambda`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    /// Angle parameter in `(-pi/2, 0]`.
    pub rho: f64,
    /// Branch point location in `(0, 1)`.
    pub x: f64,
    /// Scan and root bracket for `lambda`, both bounds `> 1`.
    pub lambda_bracket: (f64, f64),
    /// Tolerance on `c1 - c2` at the root, relative to `max(1, |c1|)`.
    pub tol_root: f64,
    /// Absolute quadrature tolerance per integral.
    pub tol_quad: f64,
    /// Iteration cap for the root finder.
    pub max_iter: usize,
    /// Number of points in the initial geometric scan grid.
    pub scan_points: usize,
}

impl SolveConfig {
    /// Defaults: bracket `(1.05, 20)`, 64-point geometric scan,
    /// `tol_root = 1e-8`, `tol_quad = 1e-11`, 80 iterations.
    pub fn new(rho: f64, x: f64) -> Self {
        SolveConfig {
            rho,
            x,
            lambda_bracket: (1.05, 20.0),
            tol_root: 1e-8,
            tol_quad: 1e-11,
            max_iter: 80,
            scan_points: 64,
        }
    }
}

/// Period-closure residuals for a parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodReport {
    /// `|Re oint phi_k|` along a loop homotopic to the boundary of the
    /// fundamental domain, for `k = 1, 2, 3`.
    pub period_residuals: [f64; 3],
    /// `|Re{2 pi i Res(dh, ybar)}|`.
    pub residue_reality: f64,
    /// First horizontal period candidate `(I1 + I2) / (I4 - I3)`.
    pub c1: f64,
    /// Second horizontal period candidate `(I5 - I6) / (I7 - I8)`.
    pub c2: f64,
    /// `|cos alpha - 2 Re{y} / (1 + |y|^2)|`.
    pub alpha_consistency: f64,
}

/// End position `ybar` for the family parameters, checked to lie in the
/// interior of the lower half disk.
///
/// # Errors
/// Domain error when `ybar` escapes the fundamental domain (`x` too large
/// for this `lambda, rho`).
pub fn ybar_of(x: f64, rho: f64, lambda: f64) -> Result<Complex64> {
    if !(0.0 < x && x < 1.0) {
        return Err(Error::Domain(format!("x = {x} not in (0, 1)")));
    }
    if !(lambda > 1.0) {
        return Err(Error::Domain(format!("lambda = {lambda} not > 1")));
    }
    let yb = params::ybar_of(x, rho, lambda);
    if yb.norm() >= 1.0 || yb.im >= 0.0 {
        return Err(Error::Domain(format!(
            "ybar = {yb} outside the open lower half disk"
        )));
    }
    Ok(yb)
}

/// The two angle-defining circle integrals `(A_num, A_den)` for a given `y`.
///
/// Both depend only on `Y = y + 1/y`, not on `alpha`, `x`, or `c`.
pub fn alpha_integrals(y: Complex64, tol: f64) -> Result<(f64, f64)> {
    use crate::quadrature::{integrate_path, Integrand, PathKind, PathSpec};
    let stub = SurfaceParams::from_curve_data(0.5, y, std::f64::consts::FRAC_PI_2, 1.0)?;
    let num = PathSpec {
        kind: PathKind::UnitCircleArc,
        a: 0.0,
        b: std::f64::consts::PI,
        integrand: Integrand::DhCosWeight,
    };
    let den = PathSpec {
        kind: PathKind::UnitCircleArc,
        a: 0.0,
        b: std::f64::consts::PI,
        integrand: Integrand::DhPlain,
    };
    let (n, _) = integrate_path(&stub, &num, tol)?;
    let (d, _) = integrate_path(&stub, &den, tol)?;
    Ok((n, d))
}

/// `alpha = arccos(A_num / A_den)` for the `y` of `params`.
///
/// # Errors
/// No-solution error when the ratio leaves `[-1, 1]`.
pub fn solve_alpha(params: &SurfaceParams, tol: f64) -> Result<f64> {
    solve_alpha_for_y(params.y, tol)
}

/// [`solve_alpha`] from `y` directly.
pub fn solve_alpha_for_y(y: Complex64, tol: f64) -> Result<f64> {
    let (num, den) = alpha_integrals(y, tol)?;
    if den <= 0.0 {
        return Err(Error::Indeterminate(format!("A_den = {den} not positive")));
    }
    let ratio = num / den;
    if ratio.abs() >= 1.0 {
        return Err(Error::NoAlpha { ratio });
    }
    Ok(ratio.acos())
}

/// Both horizontal period candidates `(c1, c2)` from an already computed
/// [`IntegralSet`].
///
/// # Errors
/// Indeterminate error when a denominator is smaller than `1e3` times its
/// accumulated quadrature error.
pub fn c1_c2_from_set(set: &IntegralSet) -> Result<(f64, f64)> {
    let d1 = set.i4 - set.i3;
    let d2 = set.i7 - set.i8;
    let e1 = 1e3 * (set.err[3] + set.err[2]);
    let e2 = 1e3 * (set.err[6] + set.err[7]);
    if d1.abs() <= e1 {
        return Err(Error::Indeterminate(format!(
            "|I4 - I3| = {:.3e} below noise floor {:.3e}",
            d1.abs(),
            e1
        )));
    }
    if d2.abs() <= e2 {
        return Err(Error::Indeterminate(format!(
            "|I7 - I8| = {:.3e} below noise floor {:.3e}",
            d2.abs(),
            e2
        )));
    }
    Ok(((set.i1 + set.i2) / d1, (set.i5 - set.i6) / d2))
}

/// Both horizontal period candidates for `params` (with `alpha` already set).
pub fn compute_c1_c2(params: &SurfaceParams, tol: f64) -> Result<(f64, f64)> {
    let set = integral_set(params, tol)?;
    c1_c2_from_set(&set)
}

/// Candidate parameter tuple at `(x, rho, lambda)`: `y` from the conjugate of
/// `ybar`, `alpha` from the integral ratio, `c = 1` placeholder.
pub fn candidate_params(x: f64, rho: f64, lambda: f64, tol: f64) -> Result<SurfaceParams> {
    let y = ybar_of(x, rho, lambda)?.conj();
    let alpha = solve_alpha_for_y(y, tol)?;
    SurfaceParams::new(x, rho, lambda, y, alpha, 1.0)
}

/// `h(lambda) = c1 - c2` at fixed `(x, rho)`, plus the candidates.
fn period_gap(x: f64, rho: f64, lambda: f64, tol: f64) -> Result<(f64, f64, f64)> {
    let p = candidate_params(x, rho, lambda, tol)?;
    let (c1, c2) = compute_c1_c2(&p, tol)?;
    Ok((c1 - c2, c1, c2))
}

/// Root-find `lambda` in the configured bracket so that `c1 = c2`, and
/// return the fully solved parameter tuple with `c = sqrt(c1)`.
///
/// Scans a geometric grid for a sign change of `h = c1 - c2`, then closes in
/// by bisection with secant acceleration (Brent). Grid points where the
/// quadrature reports an indeterminate denominator are skipped rather than
/// treated as sign information.
///
/// # Errors
/// Bracket error when no sign change exists on the grid; invalid-solution
/// error when the root has `c^2 <= 0`.
pub fn solve_lambda(config: &SolveConfig) -> Result<SurfaceParams> {
    let (lo, hi) = config.lambda_bracket;
    if !(1.0 < lo && lo < hi) {
        return Err(Error::Domain(format!("bad lambda bracket ({lo}, {hi})")));
    }
    let n = config.scan_points.max(2);
    let grid: Vec<f64> = (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect();
    let gaps: Vec<Option<f64>> = grid
        .par_iter()
        .map(|&lam| {
            period_gap(config.x, config.rho, lam, config.tol_quad)
                .ok()
                .map(|g| g.0)
        })
        .collect();
    let mut bracket = None;
    let mut prev: Option<(f64, f64)> = None;
    for (i, gap) in gaps.iter().enumerate() {
        if let Some(g) = gap {
            if let Some((la, ga)) = prev {
                if ga * g < 0.0 {
                    bracket = Some((la, ga, grid[i], *g));
                    break;
                }
            }
            prev = Some((grid[i], *g));
        }
    }
    let (mut a, mut fa, mut b, mut fb) = bracket.ok_or(Error::Bracket { lo, hi })?;

    // Brent's method on the bracket.
    let f = |lam: f64| period_gap(config.x, config.rho, lam, config.tol_quad).map(|g| g.0);
    let (mut c_pt, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    let mut root = b;
    for _ in 0..config.max_iter {
        if fb * fc > 0.0 {
            c_pt = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c_pt;
            c_pt = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 1e-14;
        let xm = 0.5 * (c_pt - b);
        root = b;
        if xm.abs() <= tol1 || fb == 0.0 {
            break;
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Secant / inverse quadratic step.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c_pt {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 {
            d
        } else {
            tol1 * xm.signum()
        };
        fb = f(b)?;
    }

    let (gap, c1, c2) = period_gap(config.x, config.rho, root, config.tol_quad)?;
    if gap.abs() > config.tol_root * c1.abs().max(1.0) {
        return Err(Error::Accuracy {
            achieved: gap.abs(),
            tol: config.tol_root * c1.abs().max(1.0),
        });
    }
    let csq = c1;
    if csq <= 0.0 || c2 <= 0.0 {
        return Err(Error::InvalidSolution {
            c2: csq,
            lambda: root,
        });
    }
    let y = ybar_of(config.x, config.rho, root)?.conj();
    let alpha = solve_alpha_for_y(y, config.tol_quad)?;
    SurfaceParams::new(config.x, config.rho, root, y, alpha, csq.sqrt())
}

/// Sheet sign factors along the boundary loop, fixed by analytic
/// continuation of `v = w (Z - 2 cos alpha)` from the principal normalization
/// `w > 0` on `(0, x)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct GammaSigns {
    /// `w / |w|` on `(x, 1)`: `+-i`.
    pub seg_x1: Complex64,
    /// `v / |v|` on the lower unit semicircle: `+-i`.
    pub arc: Complex64,
    /// `w / |w|` on `(-1, 0)`: `+-i`.
    pub seg_m10: Complex64,
}

/// Continue `v` along a polyline and return the final value.
fn continue_v_polyline(
    params: &SurfaceParams,
    path: &[Complex64],
    v_start: Complex64,
) -> Result<Complex64> {
    let f2 = |z: Complex64| eval_v2(params, z);
    let mut v = v_start;
    for seg in path.windows(2) {
        v = continue_sqrt_step(&f2, seg[0], v, seg[1], 52)?;
    }
    Ok(v)
}

/// Snap a unit complex number to `+i` or `-i`, failing loudly if it is not
/// close to either.
fn snap_imaginary(u: Complex64, what: &str) -> Result<Complex64> {
    let unit = u / u.norm();
    if (unit - I).norm() < 0.2 {
        Ok(I)
    } else if (unit + I).norm() < 0.2 {
        Ok(-I)
    } else {
        Err(Error::Indeterminate(format!(
            "branch sign on {what} not purely imaginary: {unit}"
        )))
    }
}

/// Determine the boundary-loop sheet signs at runtime.
pub(crate) fn gamma_signs(params: &SurfaceParams) -> Result<GammaSigns> {
    let x = params.x;
    let m1 = 0.5 * (x + 1.0);
    let start = Complex64::new(0.5 * x, 0.0);
    let yb = params.ybar();

    // Indent depth below the real axis near the branch point x: pick the
    // first candidate whose polyline stays clear of every branch point.
    let base = 0.25 * x.min(1.0 - x);
    let branch_pts = params.finite_branch_points();
    let mut depth = None;
    for factor in [1.0, 0.45, 1.6, 0.2] {
        let d = base * factor;
        let path = [
            start,
            start - I * d,
            Complex64::new(m1, -d),
            Complex64::new(m1, 0.0),
        ];
        let clear = path.windows(2).all(|seg| {
            branch_pts
                .iter()
                .all(|&p| segment_distance(p, seg[0], seg[1]) > 0.05 * d)
        });
        if clear {
            depth = Some(d);
            break;
        }
    }
    let d = depth.ok_or_else(|| Error::Continuation {
        near: Complex64::new(x, 0.0),
        clearance: base,
    })?;

    // v is real and positive at x/2 on the principal sheet.
    let v0 = eval_v2(params, start)?.sqrt();
    let path_a = [
        start,
        start - I * d,
        Complex64::new(m1, -d),
        Complex64::new(m1, 0.0),
    ];
    let v_m1 = continue_v_polyline(params, &path_a, v0)?;
    let big_z_m1 = m1 + 1.0 / m1;
    let w_m1 = v_m1 / (big_z_m1 - 2.0 * params.alpha.cos());
    let seg_x1 = snap_imaginary(w_m1, "(x, 1)")?;

    // Hug a circle of radius between |ybar| and 1 to reach the arc midpoint
    // and then the midpoint of (-1, 0).
    let r = ((1.0 + yb.norm()) * 0.5).clamp(0.8, 0.95);
    let arc_pt = |theta: f64| r * Complex64::from_polar(1.0, -theta);
    let mut path_b = vec![Complex64::new(m1, 0.0), Complex64::new(r, 0.0)];
    for k in 1..=4 {
        path_b.push(arc_pt(k as f64 * std::f64::consts::FRAC_PI_8));
    }
    path_b.push(-I);
    let v_arc = continue_v_polyline(params, &path_b, v_m1)?;
    let arc = snap_imaginary(v_arc, "lower semicircle")?;

    let mut path_c = vec![-I, arc_pt(std::f64::consts::FRAC_PI_2)];
    for k in 5..=8 {
        path_c.push(arc_pt(k as f64 * std::f64::consts::FRAC_PI_8));
    }
    path_c.push(Complex64::new(-0.5, 0.0));
    let v_m2 = continue_v_polyline(params, &path_c, v_arc)?;
    let big_z_m2 = -0.5 + 1.0 / -0.5;
    let w_m2 = v_m2 / (big_z_m2 - 2.0 * params.alpha.cos());
    let seg_m10 = snap_imaginary(w_m2, "(-1, 0)")?;

    Ok(GammaSigns {
        seg_x1,
        arc,
        seg_m10,
    })
}

/// Complex form triple against the contour parameter.
type PhiTriple = (Complex64, Complex64, Complex64);

/// Form coefficients against `dt` on a real segment `z = t`, given the sheet
/// sign `sigma = w / |w|` there.
fn phi_on_segment(params: &SurfaceParams, t: f64, sigma: Complex64) -> PhiTriple {
    let big_y = params.big_y();
    let z = t + 1.0 / t;
    let n = z * z - 2.0 * big_y.re * z + big_y.norm_sqr();
    let d1 = z - params.big_x();
    let d2 = z - 2.0 * params.alpha.cos();
    let w_abs = (n / d1.abs()).sqrt() / d2.abs();
    let w = sigma * w_abs;
    let g = I * params.c * w;
    let dh = -I * d2 / (t * n);
    (0.5 * (1.0 / g - g) * dh, 0.5 * I * (1.0 / g + g) * dh, dh)
}

/// Form coefficients against `dt` on the lower semicircle `z = e^{-it}`,
/// written in terms of `v = w (Z - 2 cos alpha)` so the pole of `w` at
/// `t = alpha` cancels explicitly. `sigma = v / |v|`.
fn phi_on_arc(params: &SurfaceParams, t: f64, sigma: Complex64) -> PhiTriple {
    let big_y = params.big_y();
    let ct = t.cos();
    let nc = 4.0 * ct * ct - 4.0 * big_y.re * ct + big_y.norm_sqr();
    let d1 = params.big_x() - 2.0 * ct;
    let d2 = 2.0 * ct - 2.0 * params.alpha.cos();
    let v = sigma * (nc / d1).sqrt();
    let c = params.c;
    // dh against dt is -d2 / nc; 1/g dh = -d2^2 / (i c v nc); g dh = -i c v / nc.
    let inv_g_dh = -d2 * d2 / (I * c * v * nc);
    let g_dh = -I * c * v / nc;
    (
        0.5 * (inv_g_dh - g_dh),
        0.5 * I * (inv_g_dh + g_dh),
        Complex64::new(-d2 / nc, 0.0),
    )
}

/// Integrate a complex triple over `[a, b]` with the square-root endpoint
/// substitution on both halves.
fn integrate_triple<F: Fn(f64) -> PhiTriple>(f: &F, a: f64, b: f64, tol: f64) -> Result<PhiTriple> {
    let m = 0.5 * (a + b);
    let mut total = (
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
    );
    for (p, q, flip) in [(a, m, false), (b, m, true)] {
        let len = (q - p).abs();
        let dir = if flip { -1.0 } else { 1.0 };
        for idx in 0..3 {
            let g = |u: f64| {
                let t = p + dir * len * u * u;
                let (p1, p2, p3) = f(t);
                let jac = 2.0 * len * u;
                match idx {
                    0 => p1 * jac,
                    1 => p2 * jac,
                    _ => p3 * jac,
                }
            };
            let (val, _) = adaptive_gk_complex(&g, 0.0, 1.0, tol)?;
            match idx {
                0 => total.0 += val,
                1 => total.1 += val,
                _ => total.2 += val,
            }
        }
    }
    Ok(total)
}

/// Integrate `Re oint (phi1, phi2, phi3)` along the exact boundary of the
/// fundamental domain (the loop `0 -> x -> 1 -> lower semicircle -> -1 -> 0`)
/// and report the closure residuals.
///
/// Sheet signs on each boundary piece come from analytic continuation of
/// `v = w (Z - 2 cos alpha)`; the branch-point corners are integrable and are
/// handled by the same square-root substitution as the modulus integrals, so
/// the loop is genuinely homotopic to the domain boundary (no corner
/// indentation bias).
///
/// Also reports `|Re{2 pi i Res(dh, ybar)}|`, both horizontal period
/// candidates, and the `cos alpha` consistency residual.
///
/// # Errors
/// Continuation or quadrature failures are propagated.
pub fn verify_periods(params: &SurfaceParams, tol: f64) -> Result<PeriodReport> {
    let signs = gamma_signs(params)?;
    let x = params.x;
    let one = Complex64::new(1.0, 0.0);

    let p1 = integrate_triple(&|t| phi_on_segment(params, t, one), 0.0, x, tol)?;
    let p2 = integrate_triple(&|t| phi_on_segment(params, t, signs.seg_x1), x, 1.0, tol)?;
    let p3 = integrate_triple(
        &|t| phi_on_arc(params, t, signs.arc),
        0.0,
        std::f64::consts::PI,
        tol,
    )?;
    let p4 = integrate_triple(
        &|t| phi_on_segment(params, t, signs.seg_m10),
        -1.0,
        0.0,
        tol,
    )?;

    let total = (
        p1.0 + p2.0 + p3.0 + p4.0,
        p1.1 + p2.1 + p3.1 + p4.1,
        p1.2 + p2.2 + p3.2 + p4.2,
    );

    let res = crate::curve::residue_dh(params);
    let residue_reality = (2.0 * std::f64::consts::PI * res.im).abs();

    let set = integral_set(params, tol.max(1e-12))?;
    let (c1, c2) = c1_c2_from_set(&set)?;
    let alpha_consistency =
        (params.alpha.cos() - 2.0 * params.y.re / (1.0 + params.y.norm_sqr())).abs();

    Ok(PeriodReport {
        period_residuals: [total.0.re.abs(), total.1.re.abs(), total.2.re.abs()],
        residue_reality,
        c1,
        c2,
        alpha_consistency,
    })
}

/// The horizontal translation period of the tiling.
///
/// The path runs from the end of the unit-circle image down the segment
/// `(x, 1)` on one sheet and back up on the other. The height components
/// cancel exactly and the two horizontal components double, so the result
/// is `-2 Re{(p1, p2)}` of the one-sheet segment integral with a zero third
/// component; its first component vanishes on solved parameters because the
/// segment image is a straight line parallel to one horizontal axis.
///
/// # Errors
/// Continuation or quadrature failures are propagated.
pub fn translation_period(params: &SurfaceParams, tol: f64) -> Result<[f64; 3]> {
    let signs = gamma_signs(params)?;
    let p = integrate_triple(
        &|t| phi_on_segment(params, t, signs.seg_x1),
        params.x,
        1.0,
        tol,
    )?;
    Ok([-2.0 * p.0.re, -2.0 * p.1.re, 0.0])
}

/// Where and why a sweep stopped early.
#[derive(Debug, Clone)]
pub struct SweepTruncation {
    /// The `x` value that failed.
    pub x: f64,
    /// Human-readable failure description.
    pub reason: String,
}

/// Result of [`sweep_x`]: the solved curve, possibly truncated.
#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    /// Solved tuples, one per successful grid point, in grid order.
    pub solutions: Vec<SurfaceParams>,
    /// Set when a later grid point failed and the curve was cut short.
    pub truncated: Option<SweepTruncation>,
}

/// Solve along an ascending `x` grid, warm-starting each `lambda` bracket
/// from the previous solution.
///
/// # Errors
/// A failure at the first grid point aborts; later failures truncate the
/// result and record the reason.
pub fn sweep_x(rho: f64, x_grid: &[f64], config: &SolveConfig) -> Result<SweepResult> {
    let mut out = SweepResult::default();
    let mut warm: Option<f64> = None;
    for (i, &x) in x_grid.iter().enumerate() {
        let mut cfg = SolveConfig { rho, x, ..*config };
        if let Some(lam) = warm {
            cfg.lambda_bracket = (
                (lam / 1.3).max(config.lambda_bracket.0),
                (lam * 1.3).min(config.lambda_bracket.1),
            );
            cfg.scan_points = 16;
        }
        let solved = match solve_lambda(&cfg) {
            Ok(p) => Ok(p),
            // Warm bracket may have missed the root; retry with full scan.
            Err(_) if warm.is_some() => solve_lambda(&SolveConfig { rho, x, ..*config }),
            Err(e) => Err(e),
        };
        match solved {
            Ok(p) => {
                warm = Some(p.lambda);
                out.solutions.push(p);
            }
            Err(e) => {
                if i == 0 {
                    return Err(e);
                }
                out.truncated = Some(SweepTruncation {
                    x,
                    reason: e.to_string(),
                });
                break;
            }
        }
    }
    Ok(out)
}

//! Surface meshing: integrate the Weierstrass forms over the fundamental
//! domain, assemble the fundamental piece by its symmetry group, tile the
//! doubly periodic surface, and run discrete differential-geometry checks.
//!
//! The pipeline is `build_grid` -> `integrate_surface` -> `assemble_piece`
//! -> `tile_surface` -> `export_mesh` (see [`io`]), with [`discrete_checks`]
//! and [`fit_end_growth`] as validation probes at any stage.
//!
//! The grid is log-polar around the origin over the lower half disk, so the
//! real axis and the unit circle are coordinate lines; a small polar block
//! around the end puncture `ybar` fills a rectangular hole cut around it,
//! and the domain is cut open from the end circle down to `z = 0` so it is
//! simply connected and the square root `w` has a single consistent branch
//! over it. Vertex positions come from `X = Re integral of (phi1, phi2,
//! phi3)` accumulated over a spanning tree of grid edges with the basepoint
//! `X(0) = 0`; closure of the remaining grid cycles is reported as a
//! residual and doubles as a period check at the mesh level.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::{continue_sqrt_step, eval_v2, eval_w2, Branch};
use crate::error::{Error, Result};
use crate::params::SurfaceParams;
use crate::quadrature::adaptive_gk_c3;

pub mod io;

pub use io::{export_mesh, read_obj, read_ply, MeshFormat};

const I: Complex64 = Complex64::new(0.0, 1.0);
const TAU: f64 = 2.0 * std::f64::consts::PI;

/// Which boundary piece of the fundamental domain a node sits on.
///
/// The letters follow the corner labels of the domain walk
/// `S(0) -> L(x) -> A(1) -> E(-1) -> S(0)`: two real segments through the
/// puncture of the `z = 0` corner, the segment `(x, 1)`, the lower unit
/// semicircle, and the circular cut around the end at `ybar`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    /// Real segment `(-1, 0)`; image on a horizontal axis.
    SegES,
    /// Real segment `(0, x)`; image on the other horizontal axis.
    SegSL,
    /// Real segment `(x, 1)`; image a vertical-plane line.
    SegLA,
    /// Lower unit semicircle; image a planar symmetry curve.
    ArcAE,
    /// Circular cut of radius `eps_end` around `ybar` (the catenoidal end).
    EndCut,
}

/// Triangulated grid over the fundamental domain minus the end disk, cut
/// open along a path from the end circle to the corner `z = 0`.
///
/// The cut is recorded as `seam`: pairs of coincident nodes (one per side)
/// that carry different sheets of `w` and weld to opposite sheets during
/// assembly.
#[derive(Debug, Clone)]
pub struct DomainGrid {
    /// Node positions in the `z`-plane.
    pub nodes: Vec<Complex64>,
    /// Positively oriented triangles over `nodes`.
    pub cells: Vec<[usize; 3]>,
    /// Boundary tag per node (`None` for interior nodes).
    pub boundary: Vec<Option<BoundaryTag>>,
    /// Radius of the excluded disk around `ybar`.
    pub eps_end: f64,
    /// Coincident node pairs along the opened cut.
    seam: Vec<(usize, usize)>,
    /// The node at the basepoint corner `z = 0`.
    root: usize,
    /// A well-separated interior node used as an orientation probe.
    probe: usize,
}

impl DomainGrid {
    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Default end-cut radius: `0.05 *` distance from `ybar` to the domain
/// boundary.
pub fn default_eps_end(params: &SurfaceParams) -> f64 {
    let yb = params.ybar();
    0.05 * (-yb.im).min(1.0 - yb.norm())
}

/// Build the graded triangulation of `D^- \ {|z - ybar| < eps_end}`.
///
/// The bulk of the half disk is covered log-polar around the origin: the
/// real axis and the unit circle are coordinate lines, the radial step is
/// at most twice the angular step (ratio at most 1.5 per ring), and extra
/// rings are inserted toward the branch-point corner `x` and toward the
/// origin, which is capped by a triangle fan. A rectangular (in log-polar
/// index space) hole around `ybar` is filled by a small polar block graded
/// from the end circle of radius `eps_end` out to the hole perimeter.
/// Finally the mesh is cut open along a node path from the end circle down
/// to `z = 0`, which makes the domain simply connected; the coincident
/// node pairs are recorded in the grid seam.
///
/// Pass `eps_end = None` for the default of [`default_eps_end`].
///
/// # Errors
/// `resolution < 8`, or an `eps_end` disk that does not fit inside the
/// hole around `ybar`.
pub fn build_grid(
    params: &SurfaceParams,
    resolution: usize,
    eps_end: Option<f64>,
) -> Result<DomainGrid> {
    if resolution < 8 {
        return Err(Error::Mesh(format!(
            "resolution {resolution} below the minimum of 8"
        )));
    }
    let yb = params.ybar();
    let clearance = (-yb.im).min(1.0 - yb.norm());
    let eps = eps_end.unwrap_or(0.05 * clearance);
    if !(eps > 0.0) || eps >= clearance {
        return Err(Error::Mesh(format!(
            "end cut radius {eps:.3e} does not leave the disk around ybar \
             interior to the domain (clearance {clearance:.3e})"
        )));
    }

    let x = params.x;
    let n_th = 2 * resolution;
    let dth = std::f64::consts::PI / n_th as f64;
    let dlr = (2.0 * dth).min(1.5f64.ln());

    // Radial ladder in ln R from the fan cap up to the unit circle, with
    // the row R = x exact and two halving rows on each side of it.
    let r_fan = (1e-6 * dth * dth).min(1e-3 * x).min(1e-2 * yb.norm());
    let lnx = x.ln();
    let n_dn = ((lnx - r_fan.ln()) / dlr).ceil().max(1.0) as usize;
    let step_dn = (lnx - r_fan.ln()) / n_dn as f64;
    let n_up = ((-lnx) / dlr).ceil().max(1.0) as usize;
    let step_up = -lnx / n_up as f64;
    let mut lr: Vec<f64> = Vec::with_capacity(n_dn + n_up + 5);
    for i in 0..n_dn {
        lr.push(r_fan.ln() + i as f64 * step_dn);
    }
    lr.push(lnx - 0.5 * step_dn);
    lr.push(lnx - 0.25 * step_dn);
    lr.push(lnx);
    lr.push(lnx + 0.25 * step_up);
    lr.push(lnx + 0.5 * step_up);
    for i in 1..n_up {
        lr.push(lnx + i as f64 * step_up);
    }
    lr.push(0.0);
    let n_r = lr.len();
    let mut rv: Vec<f64> = lr.iter().map(|l| l.exp()).collect();
    let x_row = n_dn + 2;
    rv[x_row] = x;
    rv[n_r - 1] = 1.0;

    // Hole placement: rows and columns around ybar, sized toward a fixed
    // log-radius and angle extent and grown if the end disk needs more
    // room, always keeping a full layer of cells around the hole.
    let r_y = yb.norm();
    let th_y = yb.arg();
    let c = lr
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - r_y.ln()).abs().total_cmp(&(b.1 - r_y.ln()).abs()))
        .map(|(i, _)| i)
        .unwrap();
    let ic = ((((th_y + std::f64::consts::PI) / dth).round() as usize).max(1)).min(n_th - 1);
    let mut w_r = ((0.2 / dlr).round() as usize).max(2);
    let mut w_t = ((0.2 / dth).round() as usize).max(2);
    w_r = w_r.min(c.saturating_sub(1)).min(n_r.saturating_sub(2 + c));
    w_t = w_t.min(ic - 1).min(n_th - 1 - ic);
    let need = 2.5 * eps;
    loop {
        if w_r < 1 || w_t < 1 {
            return Err(Error::Mesh(format!(
                "no room for the hole around ybar = {yb} at resolution {resolution}"
            )));
        }
        let m_r = (r_y - rv[c - w_r]).min(rv[c + w_r] - r_y);
        let a_lo = th_y + std::f64::consts::PI - (ic - w_t) as f64 * dth;
        let a_hi = (ic + w_t) as f64 * dth - std::f64::consts::PI - th_y;
        let m_t = r_y * a_lo.min(a_hi).min(std::f64::consts::FRAC_PI_2).sin();
        if m_r >= need && m_t >= need {
            break;
        }
        let mut grew = false;
        if m_r < need && c - w_r > 1 && c + w_r < n_r - 2 {
            w_r += 1;
            grew = true;
        }
        if m_t < need && ic - w_t > 1 && ic + w_t < n_th - 1 {
            w_t += 1;
            grew = true;
        }
        if !grew {
            return Err(Error::Mesh(format!(
                "end cut radius {eps:.3e} too large for the hole around ybar \
                 (margin {:.3e} available)",
                (r_y - rv[c - w_r]).min(rv[c + w_r] - r_y) / 2.5
            )));
        }
    }

    // Log-polar nodes, skipping the hole interior. Axis rows are written
    // with exact real parts so the corners x, 1, -1 are exact nodes.
    let hole = |r: usize, i: usize| r > c - w_r && r < c + w_r && i > ic - w_t && i < ic + w_t;
    let mut nodes: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    let mut boundary: Vec<Option<BoundaryTag>> = vec![Some(BoundaryTag::SegSL)];
    let mut idx = vec![vec![usize::MAX; n_th + 1]; n_r];
    for r in 0..n_r {
        for i in 0..=n_th {
            if hole(r, i) {
                continue;
            }
            let z = if i == 0 {
                Complex64::new(-rv[r], 0.0)
            } else if i == n_th {
                Complex64::new(rv[r], 0.0)
            } else {
                Complex64::from_polar(rv[r], -std::f64::consts::PI + i as f64 * dth)
            };
            let tag = if i == 0 {
                Some(BoundaryTag::SegES)
            } else if r == n_r - 1 {
                Some(BoundaryTag::ArcAE)
            } else if i == n_th {
                Some(if rv[r] < x {
                    BoundaryTag::SegSL
                } else {
                    BoundaryTag::SegLA
                })
            } else {
                None
            };
            idx[r][i] = nodes.len();
            nodes.push(z);
            boundary.push(tag);
        }
    }

    let mut cells: Vec<[usize; 3]> = Vec::with_capacity(2 * n_r * n_th);
    for i in 0..n_th {
        cells.push([0, idx[0][i], idx[0][i + 1]]);
    }
    for r in 0..n_r - 1 {
        for i in 0..n_th {
            let q = [idx[r][i], idx[r + 1][i], idx[r + 1][i + 1], idx[r][i + 1]];
            if q.contains(&usize::MAX) {
                continue;
            }
            cells.push([q[0], q[1], q[2]]);
            cells.push([q[0], q[2], q[3]]);
        }
    }

    // Hole perimeter, counterclockwise around ybar, starting at the node
    // the cut will leave through (inner row, column ic).
    let (b0, b1, t0, t1) = (c - w_r, c + w_r, ic - w_t, ic + w_t);
    let mut perim: Vec<usize> = Vec::with_capacity(4 * (w_r + w_t));
    for i in (t0..=ic).rev() {
        perim.push(idx[b0][i]);
    }
    for r in b0 + 1..=b1 {
        perim.push(idx[r][t0]);
    }
    for i in t0 + 1..=t1 {
        perim.push(idx[b1][i]);
    }
    for r in (b0..b1).rev() {
        perim.push(idx[r][t1]);
    }
    for i in (ic + 1..t1).rev() {
        perim.push(idx[b0][i]);
    }
    let m_a = perim.len();

    // End block: per-column geometric grading from the end circle out to
    // the perimeter node, with roughly unit-aspect cells.
    let exits: Vec<f64> = perim.iter().map(|&p| (nodes[p] - yb).norm()).collect();
    let min_exit = exits.iter().cloned().fold(f64::INFINITY, f64::min);
    if eps >= 0.5 * min_exit {
        return Err(Error::Mesh(format!(
            "end cut radius {eps:.3e} does not leave room inside the hole \
             around ybar (nearest side {min_exit:.3e})"
        )));
    }
    // Ring spacing ramps from the bulk grid step at the perimeter (so the
    // two blocks meet without a size jump) up to roughly unit-aspect cells
    // toward the end circle, via a quadratic ramp in the log radius.
    let dlr_a = TAU / m_a as f64;
    let l_max = exits.iter().map(|&e| (e / eps).ln()).fold(0.0f64, f64::max);
    let k_a = ((l_max / dlr_a).ceil() as usize).max(3);
    let mut a_ids = vec![vec![0usize; m_a]; k_a + 1];
    for j in 0..m_a {
        let dir = (nodes[perim[j]] - yb) / exits[j];
        let l = (exits[j] / eps).ln();
        let beta = (k_a as f64 * dlr / l).min(1.0);
        for (k, row) in a_ids.iter_mut().enumerate().take(k_a) {
            let u = 1.0 - k as f64 / k_a as f64;
            let frac = 1.0 - u * (beta + (1.0 - beta) * u);
            row[j] = nodes.len();
            nodes.push(yb + eps * (exits[j] / eps).powf(frac) * dir);
            boundary.push(if k == 0 {
                Some(BoundaryTag::EndCut)
            } else {
                None
            });
        }
        a_ids[k_a][j] = perim[j];
    }
    for j in 0..m_a {
        let j2 = (j + 1) % m_a;
        for k in 0..k_a {
            cells.push([a_ids[k][j], a_ids[k + 1][j], a_ids[k + 1][j2]]);
            cells.push([a_ids[k][j], a_ids[k + 1][j2], a_ids[k][j2]]);
        }
    }

    // Cut open from the end circle, out through the hole perimeter, down
    // the column toward the origin, ending at the branch-point corner 0
    // (which stays single).
    let mut path: Vec<usize> = (0..k_a).map(|k| a_ids[k][0]).collect();
    path.push(perim[0]);
    for r in (0..b0).rev() {
        path.push(idx[r][ic]);
    }
    path.push(0);
    let seam = cut_path(&mut nodes, &mut boundary, &mut cells, &path)?;

    // A few rounds of damped Laplacian smoothing over the end block and the
    // hole perimeter even out the cell shapes where the two blocks meet
    // (sharpest at the hole corners). Boundary, seam, and bulk nodes stay
    // fixed, so the exact corners and coordinate lines are untouched.
    let mut movable = vec![false; nodes.len()];
    for row in a_ids.iter().skip(1) {
        for &id in row {
            movable[id] = true;
        }
    }
    let adj = node_adjacency(nodes.len(), &cells);
    for &p in &perim {
        for &n in &adj[p] {
            movable[n] = true;
        }
    }
    for (i, t) in boundary.iter().enumerate() {
        if t.is_some() {
            movable[i] = false;
        }
    }
    for &(a, b) in &seam {
        movable[a] = false;
        movable[b] = false;
    }
    for _ in 0..2 {
        let snapshot = nodes.clone();
        for i in 0..nodes.len() {
            if !movable[i] {
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for &n in &adj[i] {
                s += snapshot[n];
            }
            nodes[i] = 0.5 * (snapshot[i] + s / adj[i].len() as f64);
        }
    }

    // Orientation probe: an interior node far from the hole, the axis, the
    // circle, and the cut.
    let i_p = if ic < n_th / 2 {
        3 * n_th / 4
    } else {
        n_th / 4
    };
    let r_p = lr
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 + 0.7).abs().total_cmp(&(b.1 + 0.7).abs()))
        .map(|(i, _)| i)
        .unwrap()
        .clamp(1, n_r - 2);
    let probe = idx[r_p][i_p];

    Ok(DomainGrid {
        nodes,
        cells,
        boundary,
        eps_end: eps,
        seam,
        root: 0,
        probe,
    })
}

/// Cut the triangulation open along a node path whose first node is on the
/// mesh boundary and whose last node stays single (a branch point). Every
/// other path node is duplicated and the cells on the left of the directed
/// path are reattached to the duplicate; returns the (right, left) pairs.
fn cut_path(
    nodes: &mut Vec<Complex64>,
    boundary: &mut Vec<Option<BoundaryTag>>,
    cells: &mut [[usize; 3]],
    path: &[usize],
) -> Result<Vec<(usize, usize)>> {
    use std::collections::HashMap;
    let mut ecells: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (ci, f) in cells.iter().enumerate() {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            ecells.entry((a.min(b), a.max(b))).or_default().push(ci);
        }
    }
    // Collect the left-side cell fan of every path node first (on the
    // uncut connectivity), then apply all replacements.
    let mut fans: Vec<Vec<usize>> = Vec::with_capacity(path.len() - 1);
    for w in 0..path.len() - 1 {
        let (v, nxt) = (path[w], path[w + 1]);
        let prv = if w > 0 { Some(path[w - 1]) } else { None };
        let inc = ecells
            .get(&(v.min(nxt), v.max(nxt)))
            .filter(|cs| cs.len() == 2)
            .ok_or_else(|| Error::Mesh("cut path leaves the mesh interior".into()))?;
        let dir = nodes[nxt] - nodes[v];
        let start = *inc
            .iter()
            .find(|&&ci| {
                let third = cells[ci].into_iter().find(|&t| t != v && t != nxt).unwrap();
                (dir.conj() * (nodes[third] - nodes[v])).im > 0.0
            })
            .ok_or_else(|| Error::Mesh("degenerate cell beside the cut path".into()))?;
        // Sweep the fan of cells around `v` from the starting cell until
        // the previous path edge or the mesh boundary closes it off.
        let mut fan = vec![start];
        let (mut cur, mut from) = (start, nxt);
        loop {
            let other = cells[cur]
                .into_iter()
                .find(|&t| t != v && t != from)
                .unwrap();
            if Some(other) == prv {
                break;
            }
            match ecells[&(v.min(other), v.max(other))]
                .iter()
                .find(|&&cc| cc != cur)
            {
                Some(&nc) => {
                    fan.push(nc);
                    from = other;
                    cur = nc;
                }
                None => break,
            }
        }
        fans.push(fan);
    }
    let mut seam = Vec::with_capacity(fans.len());
    for (w, fan) in fans.iter().enumerate() {
        let v = path[w];
        let nv = nodes.len();
        nodes.push(nodes[v]);
        boundary.push(boundary[v]);
        for &ci in fan {
            for t in cells[ci].iter_mut() {
                if *t == v {
                    *t = nv;
                }
            }
        }
        seam.push((v, nv));
    }
    Ok(seam)
}

/// Per-vertex origin information carried through assembly and tiling.
#[derive(Debug, Clone, Copy)]
pub struct VertexInfo {
    /// Domain point the vertex was integrated at.
    pub z: Complex64,
    /// Sheet of `w` over `z`.
    pub branch: Branch,
    /// Symmetry-copy id (0 for the base half, increasing through assembly
    /// and tiling).
    pub copy: u32,
}

/// A triangle mesh of (part of) the surface with provenance and symmetry
/// metadata.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    /// Vertex positions; the basepoint image `X(0)` is the origin.
    pub vertices: Vec<[f64; 3]>,
    /// Triangles over `vertices`.
    pub faces: Vec<[usize; 3]>,
    /// Unit analytic normals (stereographic unprojection of the Gauss map).
    pub normals: Vec<[f64; 3]>,
    /// Per-vertex origin information.
    pub provenance: Vec<VertexInfo>,
    /// Boundary tag per vertex (`None` for interior).
    pub boundary: Vec<Option<BoundaryTag>>,
    /// Max accumulated period over independent grid cycles.
    pub cycle_residual: f64,
    /// Max position deviation between the two spanning-tree integrations.
    pub tree_deviation: f64,
    /// Grid structure, present on meshes straight out of
    /// [`integrate_surface`].
    half: Option<HalfStructure>,
    /// Symmetry structure, present on meshes out of [`assemble_piece`].
    piece: Option<PieceStructure>,
}

#[derive(Debug, Clone)]
struct HalfStructure {
    /// Coincident vertex pairs along the opened monodromy cut.
    seam: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
struct PieceStructure {
    /// Coordinate axis containing the image of `[0, x]` (0 or 1).
    axis: usize,
    /// The other horizontal axis: the translation direction.
    trans_axis: usize,
    /// Half-spacing of the tiling: the symmetry planes sit at
    /// `x_trans_axis = +-offset`.
    offset: f64,
    /// Vertex pairing under the 180-degree rotation about the vertical axis.
    partner: Vec<usize>,
    /// Horizontal translation period from the segment integral.
    translation: [f64; 3],
}

impl SurfaceMesh {
    /// A mesh with no elements (still exportable).
    pub fn empty() -> SurfaceMesh {
        SurfaceMesh {
            vertices: Vec::new(),
            faces: Vec::new(),
            normals: Vec::new(),
            provenance: Vec::new(),
            boundary: Vec::new(),
            cycle_residual: 0.0,
            tree_deviation: 0.0,
            half: None,
            piece: None,
        }
    }

    /// Bounding-box diagonal.
    pub fn diameter(&self) -> f64 {
        if self.vertices.is_empty() {
            return 0.0;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for v in &self.vertices {
            for c in 0..3 {
                lo[c] = lo[c].min(v[c]);
                hi[c] = hi[c].max(v[c]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2) + (hi[2] - lo[2]).powi(2)).sqrt()
    }

    /// Which coordinate axis contains the image of `[0, x]`, when known.
    pub fn detected_axis(&self) -> Option<usize> {
        self.piece.as_ref().map(|p| p.axis)
    }

    /// The horizontal translation period of the tiling, when known.
    pub fn translation_vector(&self) -> Option<[f64; 3]> {
        self.piece.as_ref().map(|p| p.translation)
    }
}

/// The three form coefficients against `dz` at `(z, v)`, written in terms of
/// `v = w (Z - 2 cos alpha)` so they stay finite across the pole of `w` on
/// the unit circle.
fn phi_v(params: &SurfaceParams, z: Complex64, v: Complex64) -> [Complex64; 3] {
    let big_y = params.big_y();
    let big_z = z + 1.0 / z;
    let n = big_z * big_z - 2.0 * big_y.re * big_z + big_y.norm_sqr();
    let d2 = big_z - 2.0 * params.alpha.cos();
    let c = params.c;
    let g_dh = c * v / (z * n);
    let inv_g_dh = -d2 * d2 / (c * v * z * n);
    [
        0.5 * (inv_g_dh - g_dh),
        0.5 * I * (inv_g_dh + g_dh),
        -I * d2 / (z * n),
    ]
}

/// Integral of the form triple along the straight edge from `z0` to `z1`,
/// transporting `v` by continuation from `(z0, v0)`.
///
/// With `singular_end` set, `z1` is a branch-point corner (`0` or `x`) and
/// the square-root substitution `z(u) = z1 + (z0 - z1) u^2` removes the
/// endpoint singularity; `v` is still anchored at the regular end.
fn edge_integral(
    params: &SurfaceParams,
    z0: Complex64,
    v0: Complex64,
    z1: Complex64,
    singular_end: bool,
    tol: f64,
) -> Result<[Complex64; 3]> {
    let f2 = |z: Complex64| eval_v2(params, z);
    let failure = std::cell::RefCell::new(None);
    let nanv = [Complex64::new(f64::NAN, 0.0); 3];
    let val = if singular_end {
        let span = z0 - z1;
        let f = |u: f64| {
            let z = z1 + span * (u * u);
            let v = match continue_sqrt_step(&f2, z0, v0, z, 52) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return nanv;
                }
            };
            let phi = phi_v(params, z, v);
            let jac = 2.0 * u * span;
            [phi[0] * jac, phi[1] * jac, phi[2] * jac]
        };
        let (v, _) = adaptive_gk_c3(&f, 0.0, 1.0, tol)?;
        // f integrates from the corner to z0; flip for z0 -> z1.
        [-v[0], -v[1], -v[2]]
    } else {
        let dz = z1 - z0;
        let f = |t: f64| {
            let z = z0 + t * dz;
            let v = match continue_sqrt_step(&f2, z0, v0, z, 52) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return nanv;
                }
            };
            let phi = phi_v(params, z, v);
            [phi[0] * dz, phi[1] * dz, phi[2] * dz]
        };
        let (v, _) = adaptive_gk_c3(&f, 0.0, 1.0, tol)?;
        v
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    if val.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Mesh(format!(
            "edge integral from {z0} to {z1} did not stay finite"
        )));
    }
    Ok(val)
}

/// Is this node one of the branch-point corners `z = 0` or `z = x`?
fn is_singular_corner(params: &SurfaceParams, z: Complex64) -> bool {
    z == Complex64::new(0.0, 0.0) || z == Complex64::new(params.x, 0.0)
}

/// Node adjacency lists from the cell connectivity (sorted, deduplicated).
fn node_adjacency(n: usize, cells: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for f in cells {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// Transport `v` to every non-corner grid node by breadth-first continuation
/// along grid edges, seeded from the principal branch at `z = x/2`.
fn propagate_v(params: &SurfaceParams, grid: &DomainGrid) -> Result<Vec<Option<Complex64>>> {
    let f2 = |z: Complex64| eval_v2(params, z);
    let start = Complex64::new(0.5 * params.x, 0.0);
    let v_start = eval_v2(params, start)?.sqrt();
    let adj = node_adjacency(grid.nodes.len(), &grid.cells);

    // Seed at a node the straight segment from z = x/2 reaches while
    // keeping its distance to every branch point comparable to the branch
    // point's distance from x/2, so the continuation picks up no stray
    // monodromy; the cut-open grid then has one consistent branch.
    let mut order: Vec<usize> = (0..grid.nodes.len())
        .filter(|&i| !is_singular_corner(params, grid.nodes[i]))
        .collect();
    order.sort_by(|&a, &b| {
        (grid.nodes[a] - start)
            .norm()
            .total_cmp(&(grid.nodes[b] - start).norm())
            .then(a.cmp(&b))
    });
    let mut seeded = None;
    for &i in order.iter().take(64) {
        let z = grid.nodes[i];
        let clear = params
            .finite_branch_points()
            .iter()
            .all(|&p| crate::curve::segment_distance(p, start, z) >= 0.3 * (p - start).norm());
        if !clear {
            continue;
        }
        if let Ok(v) = continue_sqrt_step(&f2, start, v_start, z, 52) {
            seeded = Some((i, v));
            break;
        }
    }
    let (seed, v_seed) =
        seeded.ok_or_else(|| Error::Mesh("could not seed the branch near z = x/2".into()))?;

    let mut vvals: Vec<Option<Complex64>> = vec![None; grid.nodes.len()];
    vvals[seed] = Some(v_seed);
    let mut queue = VecDeque::from([seed]);
    while let Some(i) = queue.pop_front() {
        let vi = vvals[i].unwrap();
        for &n in &adj[i] {
            if vvals[n].is_some() || is_singular_corner(params, grid.nodes[n]) {
                continue;
            }
            let v = continue_sqrt_step(&f2, grid.nodes[i], vi, grid.nodes[n], 52)?;
            vvals[n] = Some(v);
            queue.push_back(n);
        }
    }
    Ok(vvals)
}

/// Unique undirected edges in deterministic first-use order, plus a lookup
/// from the ordered node pair to the edge id.
fn edge_list(
    cells: &[[usize; 3]],
) -> (
    Vec<(usize, usize)>,
    std::collections::HashMap<(usize, usize), usize>,
) {
    let mut ids = std::collections::HashMap::new();
    let mut edges = Vec::new();
    for f in cells {
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let key = (a.min(b), a.max(b));
            ids.entry(key).or_insert_with(|| {
                edges.push(key);
                edges.len() - 1
            });
        }
    }
    (edges, ids)
}

/// Integrals of the form triple along every edge, from the lower to the
/// higher node id.
fn all_edge_integrals(
    params: &SurfaceParams,
    grid: &DomainGrid,
    vvals: &[Option<Complex64>],
    edges: &[(usize, usize)],
    tol: f64,
) -> Result<Vec<[Complex64; 3]>> {
    let one_edge = |u: usize, t: usize| -> Result<[Complex64; 3]> {
        let (zu, zt) = (grid.nodes[u], grid.nodes[t]);
        if let Some(vu) = vvals[u] {
            edge_integral(params, zu, vu, zt, vvals[t].is_none(), tol)
        } else {
            let vt = vvals[t]
                .ok_or_else(|| Error::Mesh("grid edge joins two branch-point corners".into()))?;
            let v = edge_integral(params, zt, vt, zu, true, tol)?;
            Ok([-v[0], -v[1], -v[2]])
        }
    };
    edges.par_iter().map(|&(u, t)| one_edge(u, t)).collect()
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm3(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

fn dot3f(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Accumulate positions from the root over a spanning tree of the edge
/// graph: breadth-first or depth-first traversal gives two distinct trees.
fn tree_positions(
    grid: &DomainGrid,
    eadj: &[Vec<(usize, usize, f64)>],
    ev: &[[Complex64; 3]],
    depth_first: bool,
) -> Vec<[f64; 3]> {
    let mut x = vec![[0.0f64; 3]; grid.nodes.len()];
    let mut seen = vec![false; grid.nodes.len()];
    seen[grid.root] = true;
    let mut frontier = VecDeque::from([grid.root]);
    loop {
        let i = if depth_first {
            match frontier.pop_back() {
                Some(i) => i,
                None => break,
            }
        } else {
            match frontier.pop_front() {
                Some(i) => i,
                None => break,
            }
        };
        for &(n, e, s) in &eadj[i] {
            if seen[n] {
                continue;
            }
            seen[n] = true;
            x[n] = add3(x[i], [s * ev[e][0].re, s * ev[e][1].re, s * ev[e][2].re]);
            frontier.push_back(n);
        }
    }
    x
}

/// Unit normal from the Gauss map written as a ratio `g = num / den`,
/// stable when either factor vanishes (`den = 0` at the zeros of
/// `Z - 2 cos alpha` on the unit circle, where the normal is vertical).
fn normal_from_ratio(num: Complex64, den: Complex64) -> [f64; 3] {
    if num.norm_sqr() >= den.norm_sqr() {
        let u = den / num;
        let u2 = u.norm_sqr();
        let d = 1.0 + u2;
        [2.0 * u.re / d, -2.0 * u.im / d, (1.0 - u2) / d]
    } else {
        let g = num / den;
        let n2 = g.norm_sqr();
        let d = 1.0 + n2;
        [2.0 * g.re / d, 2.0 * g.im / d, (n2 - 1.0) / d]
    }
}

/// Unit normal from the Gauss map value, stable at `g = 0` and `g = inf`.
fn normal_from_g(g: Complex64) -> [f64; 3] {
    let n2 = g.norm_sqr();
    if !n2.is_finite() || n2 > 1.0 {
        let u = 1.0 / g;
        let u2 = u.norm_sqr();
        let d = 1.0 + u2;
        [2.0 * u.re / d, -2.0 * u.im / d, (1.0 - u2) / d]
    } else {
        let d = 1.0 + n2;
        [2.0 * g.re / d, 2.0 * g.im / d, (n2 - 1.0) / d]
    }
}

/// Integrate the surface over a grid.
///
/// Positions accumulate `Re integral phi` along a spanning tree rooted at
/// the `z = 0` corner (so `X(0)` is the origin exactly); the branch of `w`
/// is transported by analytic continuation of `v = w (Z - 2 cos alpha)`.
/// Two independent spanning trees are integrated and their deviation
/// reported, and the accumulated period around every grid quad is collected
/// into `cycle_residual`.
///
/// # Errors
/// Continuation failures near branch points are propagated; a cycle
/// residual above `1e-6 *` diameter (periods not closed) is an accuracy
/// error.
pub fn integrate_surface(params: &SurfaceParams, grid: &DomainGrid) -> Result<SurfaceMesh> {
    let tol = 1e-12;
    let vvals = propagate_v(params, grid)?;
    let (edges, edge_ids) = edge_list(&grid.cells);
    let ev = all_edge_integrals(params, grid, &vvals, &edges, tol)?;

    let mut eadj: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); grid.nodes.len()];
    for (e, &(u, t)) in edges.iter().enumerate() {
        eadj[u].push((t, e, 1.0));
        eadj[t].push((u, e, -1.0));
    }

    let xs = tree_positions(grid, &eadj, &ev, false);
    let xs_alt = tree_positions(grid, &eadj, &ev, true);
    let tree_deviation = xs
        .iter()
        .zip(&xs_alt)
        .map(|(a, b)| norm3(sub3(*a, *b)))
        .fold(0.0, f64::max);

    let mut cycle_residual = 0.0f64;
    for f in &grid.cells {
        let mut loop_sum = [0.0; 3];
        for (a, b) in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let e = edge_ids[&(a.min(b), a.max(b))];
            let sg = if a < b { 1.0 } else { -1.0 };
            for c in 0..3 {
                loop_sum[c] += sg * ev[e][c].re;
            }
        }
        cycle_residual = cycle_residual.max(norm3(loop_sum));
    }

    let cos_a = params.alpha.cos();
    let mut normals = Vec::with_capacity(xs.len());
    let mut provenance = Vec::with_capacity(xs.len());
    for (i, &z) in grid.nodes.iter().enumerate() {
        let (normal, branch) = match vvals[i] {
            Some(v) => {
                let d2 = z + 1.0 / z - 2.0 * cos_a;
                let normal = normal_from_ratio(I * params.c * v, d2);
                let branch = match eval_w2(params, z) {
                    Ok(w2) => {
                        // Compare v = w (Z - 2 cos alpha) against the
                        // principal sqrt, scaled to stay finite at the
                        // zeros of the scaling factor.
                        let s = w2.sqrt() * d2;
                        if (v - s).norm() <= (v + s).norm() {
                            Branch::Plus
                        } else {
                            Branch::Minus
                        }
                    }
                    Err(_) => Branch::Plus,
                };
                (normal, branch)
            }
            None => {
                // Corner z = 0 has g = 0; corner z = x has g = inf.
                let g = if z.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(f64::INFINITY, 0.0)
                };
                (normal_from_g(g), Branch::Plus)
            }
        };
        normals.push(normal);
        provenance.push(VertexInfo { z, branch, copy: 0 });
    }

    let mut mesh = SurfaceMesh {
        vertices: xs,
        faces: grid.cells.clone(),
        normals,
        provenance,
        boundary: grid.boundary.clone(),
        cycle_residual,
        tree_deviation,
        half: Some(HalfStructure {
            seam: grid.seam.clone(),
        }),
        piece: None,
    };

    // Orient faces so discrete normals agree with the analytic Gauss map.
    let probe = grid.probe;
    let dn = discrete_vertex_normals(&mesh);
    let dot = dn[probe][0] * mesh.normals[probe][0]
        + dn[probe][1] * mesh.normals[probe][1]
        + dn[probe][2] * mesh.normals[probe][2];
    if dot < 0.0 {
        for f in &mut mesh.faces {
            f.swap(1, 2);
        }
    }

    let bound = 1e-6 * mesh.diameter();
    if cycle_residual > bound {
        return Err(Error::Accuracy {
            achieved: cycle_residual,
            tol: bound,
        });
    }
    Ok(mesh)
}

fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm3(sub3(a, b))
}

/// Assemble the fundamental piece with the default weld tolerance `1e-9`.
///
/// See [`assemble_piece_with`].
pub fn assemble_piece(half: &SurfaceMesh, params: &SurfaceParams) -> Result<SurfaceMesh> {
    assemble_piece_with(half, params, 1e-9)
}

/// Assemble the fundamental piece from the half-domain mesh.
///
/// The second sheet is the 180-degree rotation of the first about the
/// vertical axis, welded along the seam; the result is then rotated 180
/// degrees about the horizontal line containing the image of `[0, x]`
/// (axis detected from the mesh) and welded along the two axis segments.
/// Duplicate boundary vertices merge within `weld_tol`; a mismatch above
/// it means the periods are not closed or a branch is inconsistent.
pub fn assemble_piece_with(
    half: &SurfaceMesh,
    params: &SurfaceParams,
    weld_tol: f64,
) -> Result<SurfaceMesh> {
    let hs = half.half.as_ref().ok_or_else(|| {
        Error::Mesh("assemble_piece expects the half-domain mesh from integrate_surface".into())
    })?;
    let n = half.vertices.len();
    let rot3 = |p: [f64; 3]| [-p[0], -p[1], p[2]];

    let mut seam_err = 0.0f64;
    for &(a, b) in &hs.seam {
        seam_err = seam_err.max(dist3(rot3(half.vertices[a]), half.vertices[b]));
    }
    if seam_err > weld_tol {
        return Err(Error::Mesh(format!(
            "seam weld mismatch {seam_err:.3e} exceeds tolerance {weld_tol:.1e}: \
             periods not closed or branch inconsistent"
        )));
    }

    let mut vertices = half.vertices.clone();
    let mut normals = half.normals.clone();
    let mut provenance = half.provenance.clone();
    let mut boundary = half.boundary.clone();
    let mut faces = half.faces.clone();

    // Second sheet: rotate about the vertical axis; each seam side welds
    // onto the opposite side of the first sheet, and fixed points of the
    // rotation (the basepoint corner on the vertical axis) stay single.
    let mut map1 = vec![usize::MAX; n];
    for &(a, b) in &hs.seam {
        map1[a] = b;
        map1[b] = a;
    }
    for i in 0..n {
        if map1[i] != usize::MAX {
            continue;
        }
        if dist3(rot3(half.vertices[i]), half.vertices[i]) <= weld_tol {
            map1[i] = i;
        } else {
            map1[i] = vertices.len();
            vertices.push(rot3(half.vertices[i]));
            normals.push(rot3(half.normals[i]));
            let p = half.provenance[i];
            provenance.push(VertexInfo {
                z: p.z,
                branch: match p.branch {
                    Branch::Plus => Branch::Minus,
                    Branch::Minus => Branch::Plus,
                },
                copy: 1,
            });
            boundary.push(half.boundary[i]);
        }
    }
    for f in &half.faces {
        faces.push([map1[f[0]], map1[f[1]], map1[f[2]]]);
    }
    let mut partner = vec![usize::MAX; vertices.len()];
    for i in 0..n {
        partner[i] = map1[i];
        partner[map1[i]] = i;
    }

    // Detect which horizontal axis carries the image of [0, x].
    let mut best = (0.0f64, [0.0f64; 3]);
    for i in 0..n {
        if boundary[i] == Some(BoundaryTag::SegSL) {
            let v = vertices[i];
            let r = norm3(v);
            if r > best.0 {
                best = (r, v);
            }
        }
    }
    if best.0 == 0.0 {
        return Err(Error::Mesh(
            "no axis-segment vertices to detect the axis from".into(),
        ));
    }
    let axis = if best.1[0].abs() >= best.1[1].abs() {
        0
    } else {
        1
    };
    let rot_a = |p: [f64; 3]| {
        if axis == 0 {
            [p[0], -p[1], -p[2]]
        } else {
            [-p[0], p[1], -p[2]]
        }
    };

    // Second half-piece: rotate about the horizontal line; vertices on the
    // two axis segments are fixed either individually or through their
    // vertical-rotation partner and weld there.
    let np = vertices.len();
    let mut map2 = vec![usize::MAX; np];
    let mut sym_err = 0.0f64;
    let pieces_faces = faces.clone();
    for i in 0..np {
        let q = rot_a(vertices[i]);
        let d_self = dist3(q, vertices[i]);
        let d_part = dist3(q, vertices[partner[i]]);
        let required = matches!(
            boundary[i],
            Some(BoundaryTag::SegSL) | Some(BoundaryTag::SegES)
        );
        if d_self <= weld_tol && d_self <= d_part {
            map2[i] = i;
            if required {
                sym_err = sym_err.max(d_self);
            }
        } else if d_part <= weld_tol {
            map2[i] = partner[i];
            if required {
                sym_err = sym_err.max(d_part);
            }
        } else if required {
            return Err(Error::Mesh(format!(
                "axis weld mismatch {:.3e} exceeds tolerance {weld_tol:.1e}",
                d_self.min(d_part)
            )));
        } else {
            map2[i] = vertices.len();
            vertices.push(q);
            // The half-turn about a line inside the surface reverses its
            // orientation, so the image normal is the negated rotation.
            let nr = rot_a(normals[i]);
            normals.push([-nr[0], -nr[1], -nr[2]]);
            let p = provenance[i];
            provenance.push(VertexInfo {
                z: p.z,
                branch: p.branch,
                copy: p.copy + 2,
            });
            boundary.push(boundary[i]);
        }
    }
    let _ = sym_err;
    // Flipped winding: the half-turn about an in-surface line reverses
    // orientation.
    for f in &pieces_faces {
        faces.push([map2[f[0]], map2[f[2]], map2[f[1]]]);
    }
    partner.resize(vertices.len(), usize::MAX);
    for i in 0..np {
        let (a, b) = (map2[i], map2[partner[i]]);
        if a >= np {
            partner[a] = b;
        }
    }

    // Tiling geometry: the symmetry planes are perpendicular to the other
    // horizontal axis at +-offset, through the planar boundary curve.
    let trans_axis = 1 - axis;
    let mut acc = 0.0;
    let mut cnt = 0usize;
    for i in 0..vertices.len() {
        if boundary[i] == Some(BoundaryTag::ArcAE) {
            acc += vertices[i][trans_axis].abs();
            cnt += 1;
        }
    }
    let offset = if cnt > 0 { acc / cnt as f64 } else { 0.0 };
    let translation = crate::period_solver::translation_period(params, 1e-10)?;

    Ok(SurfaceMesh {
        vertices,
        faces,
        normals,
        provenance,
        boundary,
        cycle_residual: half.cycle_residual,
        tree_deviation: half.tree_deviation,
        half: None,
        piece: Some(PieceStructure {
            axis,
            trans_axis,
            offset,
            partner,
            translation,
        }),
    })
}

/// Tile `2 * copies + 1` fundamental regions by iterated reflection in the
/// vertical symmetry planes through the planar boundary curves.
///
/// Every second region is an induced pure translation; adjacent regions
/// share their boundary curve vertices exactly, so the weld is by index.
///
/// # Errors
/// Requires a mesh from [`assemble_piece`].
pub fn tile_surface(piece: &SurfaceMesh, copies: usize) -> Result<SurfaceMesh> {
    let ps = piece
        .piece
        .as_ref()
        .ok_or_else(|| Error::Mesh("tile_surface expects the mesh from assemble_piece".into()))?;
    if copies == 0 {
        return Ok(piece.clone());
    }
    let a = ps.trans_axis;
    let b = ps.offset;
    let n = piece.vertices.len();

    let mut vertices = piece.vertices.clone();
    let mut normals = piece.normals.clone();
    let mut provenance = piece.provenance.clone();
    let mut boundary = piece.boundary.clone();
    let mut faces = piece.faces.clone();

    // idx[i] for the previously placed region on each side.
    let mut prev_pos: Vec<usize> = (0..n).collect();
    let mut prev_neg: Vec<usize> = (0..n).collect();
    for step in 1..=copies as i64 {
        for (sign, prev) in [(1i64, &mut prev_pos), (-1i64, &mut prev_neg)] {
            let j = sign * step;
            let odd = step % 2 == 1;
            // Vertices shared with the previous region sit on the plane
            // x_a = s * b of the base piece.
            let s = (sign as f64) * if step % 2 == 1 { 1.0 } else { -1.0 };
            let mut cur = vec![usize::MAX; n];
            for i in 0..n {
                let p = piece.vertices[i];
                let on_shared =
                    piece.boundary[i] == Some(BoundaryTag::ArcAE) && p[a].signum() == s.signum();
                if on_shared {
                    cur[i] = prev[i];
                    continue;
                }
                let mut q = p;
                q[a] = 2.0 * (j as f64) * b + if odd { -p[a] } else { p[a] };
                cur[i] = vertices.len();
                vertices.push(q);
                let mut nrm = piece.normals[i];
                if odd {
                    nrm[a] = -nrm[a];
                }
                normals.push(nrm);
                let pv = piece.provenance[i];
                provenance.push(VertexInfo {
                    z: pv.z,
                    branch: pv.branch,
                    copy: pv.copy + 4 * (j + copies as i64) as u32,
                });
                boundary.push(piece.boundary[i]);
            }
            for f in &piece.faces {
                let t = [cur[f[0]], cur[f[1]], cur[f[2]]];
                faces.push(if odd { [t[0], t[2], t[1]] } else { t });
            }
            *prev = cur;
        }
    }

    Ok(SurfaceMesh {
        vertices,
        faces,
        normals,
        provenance,
        boundary,
        cycle_residual: piece.cycle_residual,
        tree_deviation: piece.tree_deviation,
        half: None,
        piece: None,
    })
}

/// Angle-weighted discrete vertex normals (face normals weighted by the
/// tip angle at the vertex, then normalized; zero where degenerate). The
/// angle weighting keeps the estimate unbiased on irregular one-rings.
fn discrete_vertex_normals(mesh: &SurfaceMesh) -> Vec<[f64; 3]> {
    let mut acc = vec![[0.0f64; 3]; mesh.vertices.len()];
    for f in &mesh.faces {
        let (p, q, r) = (
            mesh.vertices[f[0]],
            mesh.vertices[f[1]],
            mesh.vertices[f[2]],
        );
        let u = sub3(q, p);
        let v = sub3(r, p);
        let cr = [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ];
        let l = norm3(cr);
        if l == 0.0 {
            continue;
        }
        for t in 0..3 {
            let a = mesh.vertices[f[t]];
            let e1 = sub3(mesh.vertices[f[(t + 1) % 3]], a);
            let e2 = sub3(mesh.vertices[f[(t + 2) % 3]], a);
            let ang = (dot3f(e1, e2) / (norm3(e1) * norm3(e2)))
                .clamp(-1.0, 1.0)
                .acos();
            let w = ang / l;
            acc[f[t]] = add3(acc[f[t]], [w * cr[0], w * cr[1], w * cr[2]]);
        }
    }
    for a in &mut acc {
        let l = norm3(*a);
        if l > 0.0 {
            *a = [a[0] / l, a[1] / l, a[2] / l];
        }
    }
    acc
}

/// Vertices touching a boundary edge (an edge with only one incident face).
fn boundary_vertices(mesh: &SurfaceMesh) -> Vec<bool> {
    use std::collections::HashMap;
    let mut count: HashMap<(usize, usize), u32> = HashMap::new();
    for f in &mesh.faces {
        for e in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let key = (e.0.min(e.1), e.0.max(e.1));
            *count.entry(key).or_insert(0) += 1;
        }
    }
    let mut on = vec![false; mesh.vertices.len()];
    for (&(u, v), &c) in &count {
        if c == 1 {
            on[u] = true;
            on[v] = true;
        }
    }
    on
}

/// Discrete differential-geometry and symmetry report.
#[derive(Debug, Clone, Serialize)]
pub struct DiscreteReport {
    /// Max angle (degrees) between discrete vertex normals and the analytic
    /// Gauss map, over interior vertices.
    pub gauss_max_angle_deg: f64,
    /// RMS cotangent-weighted discrete mean curvature over interior
    /// vertices, normalized by the mean edge length.
    pub mean_curvature_rms: f64,
    /// Mean edge length of the mesh.
    pub mean_edge_length: f64,
    /// Max distance of the axis-segment images from their straight lines
    /// through the origin.
    pub line_residual: f64,
    /// Max deviation of the circle-image vertices from their common plane
    /// offset.
    pub plane_residual: f64,
    /// Deviation of the angle between the two axis lines from a right
    /// angle (radians).
    pub line_angle_residual: f64,
    /// Max vertex mismatch under the 180-degree vertical rotation, when the
    /// pairing is known (assembled piece).
    pub rotation_residual: Option<f64>,
    /// Worst in-triangle edge-length-ratio deviation against the conformal
    /// factor prediction (guarded against corner triangles).
    pub conformality_residual: f64,
    /// Horizontal translation period from the segment integral.
    pub translation: [f64; 3],
    /// Which coordinate axis carries the image of `[0, x]`, when known.
    pub detected_axis: Option<usize>,
}

/// Angle between two unit vectors, degrees.
fn angle_deg(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).clamp(-1.0, 1.0);
    d.acos().to_degrees()
}

/// Conformal stretch factor `(1/2)(|g| + 1/|g|) |h'(z)|` at a regular point.
fn conformal_factor(params: &SurfaceParams, z: Complex64) -> Option<f64> {
    let w2 = eval_w2(params, z).ok()?;
    let dh = crate::curve::eval_dh(params, z).ok()?;
    let ga = params.c * w2.norm().sqrt();
    if !(ga > 0.0) || !ga.is_finite() {
        return None;
    }
    Some(0.5 * (ga + 1.0 / ga) * dh.norm())
}

/// Run the discrete checks against the analytic data.
///
/// Reports Gauss-map agreement, discrete mean curvature, the symmetry
/// residuals (collinearity, coplanarity, orthogonality, rotational
/// invariance when available), a guarded conformality check, and the
/// translation period.
///
/// # Errors
/// Requires a mesh with provenance; propagates quadrature failures from the
/// translation-period integral.
pub fn discrete_checks(mesh: &SurfaceMesh, params: &SurfaceParams) -> Result<DiscreteReport> {
    if mesh.provenance.len() != mesh.vertices.len() || mesh.vertices.is_empty() {
        return Err(Error::Mesh(
            "discrete_checks needs a mesh with provenance".into(),
        ));
    }
    let on_boundary = boundary_vertices(mesh);
    let dn = discrete_vertex_normals(mesh);

    let mut gauss_max = 0.0f64;
    for i in 0..mesh.vertices.len() {
        if on_boundary[i] || norm3(dn[i]) == 0.0 {
            continue;
        }
        gauss_max = gauss_max.max(angle_deg(dn[i], mesh.normals[i]));
    }

    // Cotangent-weighted mean curvature.
    let mut hacc = vec![[0.0f64; 3]; mesh.vertices.len()];
    let mut area = vec![0.0f64; mesh.vertices.len()];
    for f in &mesh.faces {
        let v = [
            mesh.vertices[f[0]],
            mesh.vertices[f[1]],
            mesh.vertices[f[2]],
        ];
        let cross = {
            let u = sub3(v[1], v[0]);
            let w = sub3(v[2], v[0]);
            [
                u[1] * w[2] - u[2] * w[1],
                u[2] * w[0] - u[0] * w[2],
                u[0] * w[1] - u[1] * w[0],
            ]
        };
        let a2 = norm3(cross);
        if a2 == 0.0 {
            continue;
        }
        for corner in 0..3 {
            let (i, j, k) = (f[corner], f[(corner + 1) % 3], f[(corner + 2) % 3]);
            // cot of the angle at vertex i, opposite edge (j, k).
            let e1 = sub3(v[(corner + 1) % 3], v[corner]);
            let e2 = sub3(v[(corner + 2) % 3], v[corner]);
            let dot = e1[0] * e2[0] + e1[1] * e2[1] + e1[2] * e2[2];
            let cot = dot / a2;
            // This cot weights the edge (j, k) for both endpoints.
            let d = sub3(mesh.vertices[j], mesh.vertices[k]);
            for c in 0..3 {
                hacc[j][c] += cot * d[c];
                hacc[k][c] -= cot * d[c];
            }
            let _ = i;
        }
        for &i in f {
            area[i] += a2 / 6.0;
        }
    }
    let mut h2_sum = 0.0;
    let mut h_count = 0usize;
    for i in 0..mesh.vertices.len() {
        if on_boundary[i] || area[i] == 0.0 {
            continue;
        }
        let h = norm3(hacc[i]) / (4.0 * area[i]);
        h2_sum += h * h;
        h_count += 1;
    }
    let mut edge_sum = 0.0;
    let mut edge_count = 0usize;
    for f in &mesh.faces {
        for e in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            edge_sum += dist3(mesh.vertices[e.0], mesh.vertices[e.1]);
            edge_count += 1;
        }
    }
    let mean_edge = if edge_count > 0 {
        edge_sum / edge_count as f64
    } else {
        0.0
    };
    let h_rms = if h_count > 0 {
        (h2_sum / h_count as f64).sqrt() * mean_edge
    } else {
        0.0
    };

    // Line fits through the origin for the two axis segments.
    let line_dir = |tag: BoundaryTag| -> Option<[f64; 3]> {
        let mut best = (0.0f64, [0.0f64; 3]);
        for i in 0..mesh.vertices.len() {
            if mesh.boundary[i] == Some(tag) {
                let r = norm3(mesh.vertices[i]);
                if r > best.0 {
                    best = (r, mesh.vertices[i]);
                }
            }
        }
        if best.0 == 0.0 {
            return None;
        }
        let d = best.1;
        Some([d[0] / best.0, d[1] / best.0, d[2] / best.0])
    };
    let line_res = |tag: BoundaryTag, dir: [f64; 3]| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..mesh.vertices.len() {
            if mesh.boundary[i] == Some(tag) {
                let v = mesh.vertices[i];
                let t = v[0] * dir[0] + v[1] * dir[1] + v[2] * dir[2];
                worst = worst.max(dist3(v, [t * dir[0], t * dir[1], t * dir[2]]));
            }
        }
        worst
    };
    let (mut line_residual, mut line_angle_residual) = (f64::NAN, f64::NAN);
    if let (Some(d1), Some(d2)) = (line_dir(BoundaryTag::SegSL), line_dir(BoundaryTag::SegES)) {
        line_residual = line_res(BoundaryTag::SegSL, d1).max(line_res(BoundaryTag::SegES, d2));
        let dot = (d1[0] * d2[0] + d1[1] * d2[1] + d1[2] * d2[2])
            .abs()
            .clamp(0.0, 1.0);
        line_angle_residual = (std::f64::consts::FRAC_PI_2 - dot.acos()).abs();
    }

    // Coplanarity of the circle image: the plane is perpendicular to one
    // horizontal axis; detect it as the coordinate with the smaller spread
    // of absolute values.
    let arc_ids: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&i| mesh.boundary[i] == Some(BoundaryTag::ArcAE))
        .collect();
    let mut plane_residual = f64::NAN;
    if !arc_ids.is_empty() {
        let spread = |c: usize| {
            let vals: Vec<f64> = arc_ids.iter().map(|&i| mesh.vertices[i][c].abs()).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            (
                vals.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max),
                mean,
            )
        };
        let (s0, _) = spread(0);
        let (s1, _) = spread(1);
        let axis = if s0 <= s1 { 0 } else { 1 };
        let (res, _) = spread(axis);
        plane_residual = res;
    }

    let rotation_residual = mesh.piece.as_ref().map(|ps| {
        let mut worst = 0.0f64;
        for i in 0..mesh.vertices.len() {
            let p = ps.partner[i];
            if p == usize::MAX {
                continue;
            }
            let q = [
                -mesh.vertices[i][0],
                -mesh.vertices[i][1],
                mesh.vertices[i][2],
            ];
            worst = worst.max(dist3(q, mesh.vertices[p]));
        }
        worst
    });

    // Guarded conformality: within each triangle, compare image edge-length
    // ratios against the conformal-factor prediction, skipping edges where
    // the factor varies too strongly or is singular (corners).
    let mut conformality = 0.0f64;
    for f in &mesh.faces {
        let mut ratios: Vec<f64> = Vec::with_capacity(3);
        for e in [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])] {
            let (zu, zv) = (mesh.provenance[e.0].z, mesh.provenance[e.1].z);
            let dz = (zv - zu).norm();
            if dz == 0.0 {
                continue;
            }
            let lm = conformal_factor(params, 0.5 * (zu + zv));
            let (lu, lm, lv) = match (
                conformal_factor(params, zu),
                lm,
                conformal_factor(params, zv),
            ) {
                (Some(a), Some(m), Some(b)) => (a, m, b),
                _ => continue,
            };
            let ratio = lu.max(lv) / lu.min(lv);
            if ratio > 1.5 {
                continue;
            }
            // Simpson approximation of the image length integral of the
            // factor along the edge.
            let pred = (lu + 4.0 * lm + lv) / 6.0 * dz;
            ratios.push(dist3(mesh.vertices[e.0], mesh.vertices[e.1]) / pred);
        }
        for i in 0..ratios.len() {
            for j in (i + 1)..ratios.len() {
                conformality = conformality.max((ratios[i] / ratios[j] - 1.0).abs());
            }
        }
    }

    Ok(DiscreteReport {
        gauss_max_angle_deg: gauss_max,
        mean_curvature_rms: h_rms,
        mean_edge_length: mean_edge,
        line_residual,
        plane_residual,
        line_angle_residual,
        rotation_residual,
        conformality_residual: conformality,
        translation: crate::period_solver::translation_period(params, 1e-10)?,
        detected_axis: mesh.piece.as_ref().map(|p| p.axis),
    })
}

/// Least-squares fit of the catenoidal end profile
/// `x3 = (eta / 2) ln((x1 - p)^2 + (x2 - q)^2) + mu` over the vertices on
/// and adjacent to the end cut of the base copy, with the end axis `(p, q)`
/// estimated as the end-ring centroid.
///
/// Returns `(eta, mu, rms residual)`.
///
/// # Errors
/// Needs at least a few end-cut vertices.
pub fn fit_end_growth(mesh: &SurfaceMesh) -> Result<(f64, f64, f64)> {
    let base_end: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&i| mesh.boundary[i] == Some(BoundaryTag::EndCut) && mesh.provenance[i].copy < 2)
        .collect();
    if base_end.len() < 4 {
        return Err(Error::Mesh("too few end-cut vertices to fit".into()));
    }
    let mut in_end = vec![false; mesh.vertices.len()];
    for &i in &base_end {
        in_end[i] = true;
    }
    let mut sample = in_end.clone();
    for f in &mesh.faces {
        if f.iter().any(|&i| in_end[i]) {
            for &i in f {
                sample[i] = true;
            }
        }
    }
    let (mut p, mut q) = (0.0, 0.0);
    for &i in &base_end {
        p += mesh.vertices[i][0];
        q += mesh.vertices[i][1];
    }
    p /= base_end.len() as f64;
    q /= base_end.len() as f64;

    // Linear least squares in (eta/2, mu) against t = ln r^2.
    let (mut st, mut stt, mut sy, mut sty, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for i in 0..mesh.vertices.len() {
        if !sample[i] || mesh.provenance[i].copy >= 2 {
            continue;
        }
        let v = mesh.vertices[i];
        let r2 = (v[0] - p).powi(2) + (v[1] - q).powi(2);
        if r2 <= 0.0 {
            continue;
        }
        let t = r2.ln();
        let y = v[2];
        st += t;
        stt += t * t;
        sy += y;
        sty += t * y;
        n += 1.0;
        rows.push((t, y));
    }
    let det = n * stt - st * st;
    if det.abs() < 1e-300 {
        return Err(Error::Mesh(
            "degenerate end fit (single ring radius)".into(),
        ));
    }
    let half_eta = (n * sty - st * sy) / det;
    let mu = (stt * sy - st * sty) / det;
    let mut ss = 0.0;
    for &(t, y) in &rows {
        ss += (y - half_eta * t - mu).powi(2);
    }
    Ok((2.0 * half_eta, mu, (ss / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_params() -> SurfaceParams {
        // A valid (not period-solved) tuple for grid-geometry tests.
        SurfaceParams::new(0.3, -0.2, 2.0, Complex64::new(0.05, 0.2), 1.4, 1.0).unwrap()
    }

    #[test]
    fn grid_has_all_tags_and_positive_cells() {
        let p = demo_params();
        let g = build_grid(&p, 8, None).unwrap();
        for tag in [
            BoundaryTag::SegES,
            BoundaryTag::SegSL,
            BoundaryTag::SegLA,
            BoundaryTag::ArcAE,
            BoundaryTag::EndCut,
        ] {
            assert!(g.boundary.contains(&Some(tag)), "missing {tag:?}");
        }
        for cell in &g.cells {
            let (a, b, c) = (g.nodes[cell[0]], g.nodes[cell[1]], g.nodes[cell[2]]);
            let cross = ((b - a).conj() * (c - a)).im;
            assert!(cross > 0.0, "cell not positively oriented");
        }
    }

    #[test]
    fn grid_node_count_scales_quadratically() {
        let p = demo_params();
        let n8 = build_grid(&p, 8, None).unwrap().node_count();
        let n16 = build_grid(&p, 16, None).unwrap().node_count();
        let ratio = n16 as f64 / n8 as f64;
        assert!(ratio > 2.5 && ratio < 6.0, "ratio {ratio}");
    }

    #[test]
    fn grid_rejects_bad_inputs() {
        let p = demo_params();
        assert!(build_grid(&p, 4, None).is_err());
        assert!(build_grid(&p, 8, Some(10.0)).is_err());
    }

    #[test]
    fn grid_contains_exact_corners() {
        let p = demo_params();
        let g = build_grid(&p, 8, None).unwrap();
        for corner in [0.0, p.x, 1.0, -1.0] {
            assert!(
                g.nodes.iter().any(|z| z.im == 0.0 && z.re == corner),
                "corner {corner} missing"
            );
        }
    }

    #[test]
    fn empty_mesh_roundtrips_diameter() {
        let m = SurfaceMesh::empty();
        assert_eq!(m.diameter(), 0.0);
    }
}

//! Mesh file formats: ASCII OBJ and binary little-endian PLY, with readers
//! for round-trip validation.
//!
//! OBJ records are `v x y z`, `vn x y z`, and `f i//i j//j k//k` with
//! 1-based indices. PLY is `binary_little_endian 1.0` with per-vertex
//! `x y z nx ny nz` as 32-bit floats and faces as a uchar count followed by
//! 32-bit int indices. Both writers are byte-stable across runs.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::curve::Branch;
use crate::error::{Error, Result};

use super::{SurfaceMesh, VertexInfo};

/// Supported mesh file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    /// ASCII Wavefront OBJ.
    Obj,
    /// Binary little-endian PLY.
    Ply,
}

impl std::str::FromStr for MeshFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply),
            other => Err(format!(
                "unknown mesh format {other:?} (expected obj or ply)"
            )),
        }
    }
}

/// A mesh carrying only geometry (as produced by the readers).
fn bare_mesh(
    vertices: Vec<[f64; 3]>,
    normals: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
) -> SurfaceMesh {
    let n = vertices.len();
    SurfaceMesh {
        provenance: vec![
            VertexInfo {
                z: Complex64::new(0.0, 0.0),
                branch: Branch::Plus,
                copy: 0,
            };
            n
        ],
        boundary: vec![None; n],
        vertices,
        faces,
        normals,
        cycle_residual: 0.0,
        tree_deviation: 0.0,
        half: None,
        piece: None,
    }
}

/// Validate face indices before writing.
fn check_faces(mesh: &SurfaceMesh) -> Result<()> {
    let n = mesh.vertices.len();
    for f in &mesh.faces {
        if f.iter().any(|&i| i >= n) {
            return Err(Error::Mesh(format!(
                "face {f:?} indexes outside the {n} vertices"
            )));
        }
    }
    if mesh.normals.len() != n {
        return Err(Error::Mesh(format!(
            "{} normals for {n} vertices",
            mesh.normals.len()
        )));
    }
    Ok(())
}

/// Write a mesh to `path` in the requested format.
///
/// # Errors
/// Invalid meshes (out-of-range faces, normal count mismatch) and I/O
/// failures, the latter tagged with the path.
pub fn export_mesh(mesh: &SurfaceMesh, format: MeshFormat, path: &Path) -> Result<()> {
    check_faces(mesh)?;
    let io_err = |e: std::io::Error| Error::io(path.display().to_string(), e);
    let file = std::fs::File::create(path).map_err(io_err)?;
    let mut w = std::io::BufWriter::new(file);
    match format {
        MeshFormat::Obj => write_obj(mesh, &mut w),
        MeshFormat::Ply => write_ply(mesh, &mut w),
    }
    .map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn write_obj<W: Write>(mesh: &SurfaceMesh, w: &mut W) -> std::io::Result<()> {
    writeln!(w, "# periodforge.mesh.v1")?;
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
    }
    for n in &mesh.normals {
        writeln!(w, "vn {} {} {}", n[0], n[1], n[2])?;
    }
    for f in &mesh.faces {
        writeln!(
            w,
            "f {}//{} {}//{} {}//{}",
            f[0] + 1,
            f[0] + 1,
            f[1] + 1,
            f[1] + 1,
            f[2] + 1,
            f[2] + 1
        )?;
    }
    Ok(())
}

fn write_ply<W: Write>(mesh: &SurfaceMesh, w: &mut W) -> std::io::Result<()> {
    write!(
        w,
        "ply\nformat binary_little_endian 1.0\ncomment periodforge.mesh.v1\n\
         element vertex {}\nproperty float x\nproperty float y\nproperty float z\n\
         property float nx\nproperty float ny\nproperty float nz\n\
         element face {}\nproperty list uchar int vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.faces.len()
    )?;
    for (v, n) in mesh.vertices.iter().zip(&mesh.normals) {
        for val in [v[0], v[1], v[2], n[0], n[1], n[2]] {
            w.write_all(&(val as f32).to_le_bytes())?;
        }
    }
    for f in &mesh.faces {
        w.write_all(&[3u8])?;
        for &i in f {
            w.write_all(&(i as i32).to_le_bytes())?;
        }
    }
    Ok(())
}

/// Read an ASCII OBJ written by [`export_mesh`] (or any OBJ restricted to
/// `v`/`vn`/triangular `f` records).
///
/// # Errors
/// I/O failures and malformed records, tagged with the path.
pub fn read_obj(path: &Path) -> Result<SurfaceMesh> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let parse_err = |line_no: usize, msg: &str| Error::Parse {
        path: path.display().to_string(),
        message: format!("line {}: {msg}", line_no + 1),
    };
    let mut vertices = Vec::new();
    let mut normals = Vec::new();
    let mut faces = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") | Some("vn") => {
                let kind = &line[..2.min(line.len())];
                let mut vals = [0.0f64; 3];
                for v in &mut vals {
                    *v = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_err(no, "expected three coordinates"))?;
                }
                if kind.starts_with("vn") {
                    normals.push(vals);
                } else {
                    vertices.push(vals);
                }
            }
            Some("f") => {
                let mut idx = [0usize; 3];
                for v in &mut idx {
                    let tok = it
                        .next()
                        .ok_or_else(|| parse_err(no, "expected three face corners"))?;
                    let first = tok.split('/').next().unwrap_or("");
                    let one_based: usize =
                        first.parse().map_err(|_| parse_err(no, "bad face index"))?;
                    if one_based == 0 {
                        return Err(parse_err(no, "face index 0 (OBJ is 1-based)"));
                    }
                    *v = one_based - 1;
                }
                if it.next().is_some() {
                    return Err(parse_err(no, "only triangles are supported"));
                }
                faces.push(idx);
            }
            _ => {}
        }
    }
    if normals.is_empty() {
        normals = vec![[0.0; 3]; vertices.len()];
    }
    if normals.len() != vertices.len() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            message: format!("{} normals for {} vertices", normals.len(), vertices.len()),
        });
    }
    let mesh = bare_mesh(vertices, normals, faces);
    check_faces(&mesh)?;
    Ok(mesh)
}

/// Read a binary little-endian PLY written by [`export_mesh`].
///
/// # Errors
/// I/O failures and header/layout mismatches, tagged with the path.
pub fn read_ply(path: &Path) -> Result<SurfaceMesh> {
    let io_err = |e: std::io::Error| Error::io(path.display().to_string(), e);
    let parse_err = |msg: String| Error::Parse {
        path: path.display().to_string(),
        message: msg,
    };
    let file = std::fs::File::open(path).map_err(io_err)?;
    let mut r = std::io::BufReader::new(file);

    let mut n_vertex = None;
    let mut n_face = None;
    let mut saw_format = false;
    loop {
        let mut line = String::new();
        if r.read_line(&mut line).map_err(io_err)? == 0 {
            return Err(parse_err("truncated header".into()));
        }
        let line = line.trim_end();
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["ply"] | ["comment", ..] | ["property", ..] => {}
            ["format", "binary_little_endian", "1.0"] => saw_format = true,
            ["element", "vertex", n] => {
                n_vertex = n.parse::<usize>().ok();
            }
            ["element", "face", n] => {
                n_face = n.parse::<usize>().ok();
            }
            ["end_header"] => break,
            other => {
                return Err(parse_err(format!("unexpected header line {other:?}")));
            }
        }
    }
    if !saw_format {
        return Err(parse_err("not binary_little_endian 1.0".into()));
    }
    let n_vertex = n_vertex.ok_or_else(|| parse_err("missing vertex element".into()))?;
    let n_face = n_face.ok_or_else(|| parse_err("missing face element".into()))?;

    let mut vertices = Vec::with_capacity(n_vertex);
    let mut normals = Vec::with_capacity(n_vertex);
    let mut buf4 = [0u8; 4];
    for _ in 0..n_vertex {
        let mut vals = [0.0f64; 6];
        for v in &mut vals {
            r.read_exact(&mut buf4).map_err(io_err)?;
            *v = f32::from_le_bytes(buf4) as f64;
        }
        vertices.push([vals[0], vals[1], vals[2]]);
        normals.push([vals[3], vals[4], vals[5]]);
    }
    let mut faces = Vec::with_capacity(n_face);
    let mut buf1 = [0u8; 1];
    for _ in 0..n_face {
        r.read_exact(&mut buf1).map_err(io_err)?;
        if buf1[0] != 3 {
            return Err(parse_err(format!(
                "non-triangular face of {} corners",
                buf1[0]
            )));
        }
        let mut idx = [0usize; 3];
        for v in &mut idx {
            r.read_exact(&mut buf4).map_err(io_err)?;
            let i = i32::from_le_bytes(buf4);
            if i < 0 {
                return Err(parse_err("negative face index".into()));
            }
            *v = i as usize;
        }
        faces.push(idx);
    }
    let mesh = bare_mesh(vertices, normals, faces);
    check_faces(&mesh)?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_mesh() -> SurfaceMesh {
        bare_mesh(
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.5], [0.0, 1.0, -0.25]],
            vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![[0, 1, 2]],
        )
    }

    #[test]
    fn obj_roundtrip_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.obj");
        let m = sample_mesh();
        export_mesh(&m, MeshFormat::Obj, &path).unwrap();
        let back = read_obj(&path).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.normals, m.normals);
        assert_eq!(back.faces, m.faces);
    }

    #[test]
    fn ply_roundtrip_connectivity_and_f32_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.ply");
        let m = sample_mesh();
        export_mesh(&m, MeshFormat::Ply, &path).unwrap();
        let back = read_ply(&path).unwrap();
        assert_eq!(back.faces, m.faces);
        for (a, b) in back.vertices.iter().zip(&m.vertices) {
            for c in 0..3 {
                assert_eq!(a[c], b[c] as f32 as f64);
            }
        }
    }

    #[test]
    fn empty_mesh_valid_files() {
        let dir = tempfile::tempdir().unwrap();
        let m = SurfaceMesh::empty();
        let p1 = dir.path().join("e.obj");
        let p2 = dir.path().join("e.ply");
        export_mesh(&m, MeshFormat::Obj, &p1).unwrap();
        export_mesh(&m, MeshFormat::Ply, &p2).unwrap();
        assert_eq!(read_obj(&p1).unwrap().vertices.len(), 0);
        assert_eq!(read_ply(&p2).unwrap().faces.len(), 0);
    }

    #[test]
    fn out_of_range_face_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = sample_mesh();
        m.faces[0] = [0, 1, 7];
        assert!(export_mesh(&m, MeshFormat::Obj, &dir.path().join("bad.obj")).is_err());
    }
}

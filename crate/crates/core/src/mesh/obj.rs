//! Minimal Wavefront OBJ support: `v x y z` and triangular `f i j k` records.
//!
//! Indices are 1-based. `f` tokens of the form `i/t/n` keep only the vertex
//! index. Every other record type is ignored.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{MeshError, Point3, TriMesh};

#[derive(Debug, Error)]
pub enum ObjError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<TriMesh, ObjError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ObjError::Io { path: path.to_owned(), source })?;
    parse_obj(&text)
}

pub fn parse_obj(text: &str) -> Result<TriMesh, ObjError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let parse_err = |message: String| ObjError::Parse { line, message };
        let mut tokens = raw.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|e| parse_err(format!("bad coordinate {t:?}: {e}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != 3 {
                    return Err(parse_err("vertex needs three coordinates".into()));
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx = tokens
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or_default();
                        let i: i64 = head.parse().map_err(|e| parse_err(format!("bad index {t:?}: {e}")))?;
                        match i {
                            i if i > 0 => Ok(i as usize - 1),
                            i if i < 0 && (-i) as usize <= vertices.len() => Ok(vertices.len() - (-i) as usize),
                            _ => Err(parse_err(format!("invalid vertex index {i}"))),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if idx.len() != 3 {
                    return Err(parse_err(format!("only triangles are supported, got {} indices", idx.len())));
                }
                faces.push([idx[0], idx[1], idx[2]]);
            }
            _ => {}
        }
    }
    Ok(TriMesh::new(vertices, faces)?)
}

/// Writes vertices then faces, coordinates with 17 significant digits.
pub fn write_obj<W: Write>(mesh: &TriMesh, mut out: W) -> io::Result<()> {
    for p in mesh.vertices() {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", p.x, p.y, p.z)?;
    }
    for f in mesh.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

pub fn write_obj_file(mesh: &TriMesh, path: impl AsRef<Path>) -> io::Result<()> {
    let file = fs::File::create(path)?;
    let mut out = io::BufWriter::new(file);
    write_obj(mesh, &mut out)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TET: &str = "# tetrahedron\n\
        o tet\n\
        v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\n\
        vn 0 0 1\n\
        f 1 2 3\nf 1/1/1 4/2/1 2/3/1\nf 1 3 4\nf -3 -1 -2\n";

    #[test]
    fn parses_and_ignores_other_records() {
        let mesh = parse_obj(TET).unwrap();
        assert_eq!(mesh.vertex_count(), 4);
        assert_eq!(mesh.faces(), &[[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]);
        assert!(mesh.is_closed());
    }

    #[test]
    fn write_then_read_is_bit_exact() {
        let mesh = crate::surfaces::gen_icosphere(1, 1.3).unwrap();
        let mut buf = Vec::new();
        write_obj(&mesh, &mut buf).unwrap();
        let back = parse_obj(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.vertices(), mesh.vertices());
        assert_eq!(back.faces(), mesh.faces());
    }

    #[test]
    fn rejects_quads_and_bad_tokens() {
        let quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
        assert!(matches!(parse_obj(quad), Err(ObjError::Parse { line: 5, .. })));
        assert!(matches!(parse_obj("v 0 0 x\n"), Err(ObjError::Parse { line: 1, .. })));
        assert!(matches!(parse_obj("v 0 0 0\nf 0 1 2\n"), Err(ObjError::Parse { .. })));
    }

    #[test]
    fn missing_file_reports_path() {
        let err = read_obj("/nonexistent/mesh.obj").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/mesh.obj"));
    }
}

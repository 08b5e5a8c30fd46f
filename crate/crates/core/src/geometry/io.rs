//! XYZ point clouds and ASCII OBJ meshes.
//!
//! XYZ: one point per line, 2 or 3 whitespace-separated floats, `#` comments.
//! OBJ: `v` and `f` records only; polygons are fan-triangulated.

use super::TriangleMesh;
use crate::cloud::{PointCloud, Vec3};
use crate::error::{LjlError, Result};
use crate::format::sig9;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

fn parse_err(line: usize, message: impl Into<String>) -> LjlError {
    LjlError::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_xyz<R: Read>(reader: R) -> Result<PointCloud> {
    let mut dim = None;
    let mut points = Vec::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let vals = body
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(n + 1, format!("{t:?}: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if vals.len() != 2 && vals.len() != 3 {
            return Err(parse_err(n + 1, format!("expected 2 or 3 values, got {}", vals.len())));
        }
        match dim {
            None => dim = Some(vals.len()),
            Some(d) if d != vals.len() => {
                return Err(parse_err(n + 1, format!("mixed dimensions: {d} then {}", vals.len())))
            }
            _ => {}
        }
        points.push(Vec3::new(vals[0], vals[1], vals.get(2).copied().unwrap_or(0.0)));
    }
    PointCloud::new(dim.unwrap_or(3), points).map_err(|e| parse_err(0, e.to_string()))
}

pub fn read_xyz(path: impl AsRef<Path>) -> Result<PointCloud> {
    parse_xyz(File::open(path)?)
}

pub fn write_xyz_to<W: Write>(cloud: &PointCloud, mut w: W) -> Result<()> {
    for p in cloud.iter() {
        if cloud.dim() == 2 {
            writeln!(w, "{} {}", sig9(p.x), sig9(p.y))?;
        } else {
            writeln!(w, "{} {} {}", sig9(p.x), sig9(p.y), sig9(p.z))?;
        }
    }
    Ok(())
}

pub fn write_xyz(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_xyz_to(cloud, &mut w)?;
    w.flush()?;
    Ok(())
}

fn obj_index(token: &str, nverts: usize, line: usize) -> Result<usize> {
    let head = token.split('/').next().unwrap_or("");
    let i: i64 = head
        .parse()
        .map_err(|_| parse_err(line, format!("bad face index {token:?}")))?;
    let idx = if i > 0 {
        i - 1
    } else if i < 0 {
        nverts as i64 + i
    } else {
        -1
    };
    if idx < 0 {
        return Err(parse_err(line, format!("face index {i} out of range")));
    }
    Ok(idx as usize)
}

pub fn parse_obj<R: Read>(reader: R) -> Result<TriangleMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("v") => {
                let xyz = tok
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|e| parse_err(n + 1, format!("{t:?}: {e}"))))
                    .collect::<Result<Vec<f64>>>()?;
                if xyz.len() != 3 {
                    return Err(parse_err(n + 1, "vertex needs 3 coordinates"));
                }
                vertices.push(Vec3::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx = tok
                    .map(|t| obj_index(t, vertices.len(), n + 1))
                    .collect::<Result<Vec<usize>>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(n + 1, "face needs at least 3 vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriangleMesh::new(vertices, faces)
}

pub fn read_obj(path: impl AsRef<Path>) -> Result<TriangleMesh> {
    parse_obj(File::open(path)?)
}

pub fn write_obj(mesh: &TriangleMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in mesh.vertices() {
        writeln!(w, "v {} {} {}", sig9(v.x), sig9(v.y), sig9(v.z))?;
    }
    for f in mesh.faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xyz_reads_comments_and_2d() {
        let c = parse_xyz("# header\n0 0\n\n 0.25 0\n".as_bytes()).unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.len(), 2);
        assert_eq!(c.points()[1].x, 0.25);
        assert!(parse_xyz("0 0\n1 2 3\n".as_bytes()).is_err());
        assert!(parse_xyz("0 zero\n".as_bytes()).is_err());
        assert!(parse_xyz("1\n".as_bytes()).is_err());
    }

    #[test]
    fn xyz_roundtrip_at_nine_digits() {
        let c = PointCloud::from_xyz(&[[0.123456789123, -2.5, 1e-3], [1.0, 2.0, 3.0]]).unwrap();
        let mut buf = Vec::new();
        write_xyz_to(&c, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "0.123456789 -2.5 0.001\n1 2 3\n");
        let back = parse_xyz(buf.as_slice()).unwrap();
        assert!((back.points()[0].x - 0.123456789).abs() < 1e-15);
    }

    #[test]
    fn obj_fan_triangulates_and_ignores_extras() {
        let src = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\nusemtl x\nf 1/1/1 2/2/1 3/3/1 4/4/1\n";
        let m = parse_obj(src.as_bytes()).unwrap();
        assert_eq!(m.faces(), &[[0, 1, 2], [0, 2, 3]]);
        let neg = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf -3 -2 -1\n".as_bytes()).unwrap();
        assert_eq!(neg.faces(), &[[0, 1, 2]]);
        assert!(parse_obj("v 0 0 0\nf 1 2 3\n".as_bytes()).is_err());
        assert!(parse_obj("v 0 0\n".as_bytes()).is_err());
    }
}

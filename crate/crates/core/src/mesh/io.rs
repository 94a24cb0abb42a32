//! OBJ / OFF readers and writers, and an SVG edge dump for planar meshes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Face, PlanarMesh, TriangleMesh};
use crate::error::{Error, Result};
use crate::geom::{bbox2, Vec2, Vec3};
use crate::scalar::Real;

/// Formats `x` with `digits` significant digits, trimming trailing zeros.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { format!("{x}") };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..(digits as i32)).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{:.*e}", digits - 1, x)
    }
}

fn parse_f64(tok: Option<&str>, line: usize) -> Result<f64> {
    tok.ok_or_else(|| Error::Parse {
        line,
        msg: "missing coordinate".into(),
    })?
    .parse::<f64>()
    .map_err(|e| Error::Parse {
        line,
        msg: e.to_string(),
    })
}

fn parse_obj_index(tok: &str, count: usize, line: usize) -> Result<usize> {
    let head = tok.split('/').next().unwrap_or("");
    let i: i64 = head.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad face index '{tok}'"),
    })?;
    let idx = if i < 0 { count as i64 + i } else { i - 1 };
    if idx < 0 {
        return Err(Error::Parse {
            line,
            msg: format!("face index '{tok}' out of range"),
        });
    }
    Ok(idx as usize)
}

/// Parses OBJ text: `v` and `f` records (1-based, negative indices allowed).
/// `vt` records are kept as parametric coordinates when there is one per vertex.
pub fn parse_obj<T: Real>(text: &str) -> Result<TriangleMesh<T>> {
    let mut verts = Vec::new();
    let mut uvs = Vec::new();
    let mut faces: Vec<Face> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some("v") => {
                let x = parse_f64(toks.next(), line)?;
                let y = parse_f64(toks.next(), line)?;
                let z = parse_f64(toks.next(), line)?;
                verts.push(Vec3::new(T::lit(x), T::lit(y), T::lit(z)));
            }
            Some("vt") => {
                let u = parse_f64(toks.next(), line)?;
                let v = parse_f64(toks.next(), line)?;
                uvs.push(Vec2::new(T::lit(u), T::lit(v)));
            }
            Some("f") => {
                let idx: Vec<&str> = toks.collect();
                if idx.len() != 3 {
                    return Err(Error::NonTriangularFace { line });
                }
                let mut f = [0usize; 3];
                for (k, t) in idx.iter().enumerate() {
                    f[k] = parse_obj_index(t, verts.len(), line)?;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    let mesh = TriangleMesh::new(verts, faces)?;
    if !uvs.is_empty() && uvs.len() == mesh.vertices.len() {
        mesh.with_uv(uvs)
    } else {
        Ok(mesh)
    }
}

/// Parses OFF text.
pub fn parse_off<T: Real>(text: &str) -> Result<TriangleMesh<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let rest_of_header = match header.strip_prefix("OFF") {
        Some(stripped) => stripped.trim(),
        None => {
            return Err(Error::Parse {
                line: hl,
                msg: "missing OFF header".into(),
            })
        }
    };
    let (cl, counts) = if rest_of_header.is_empty() {
        lines.next().ok_or(Error::Parse {
            line: hl + 1,
            msg: "missing counts".into(),
        })?
    } else {
        (hl, rest_of_header)
    };
    let nums: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::Parse {
            line: cl,
            msg: e.to_string(),
        })?;
    if nums.len() < 2 {
        return Err(Error::Parse {
            line: cl,
            msg: "expected vertex and face counts".into(),
        });
    }
    let (nv, nf) = (nums[0], nums[1]);
    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (line, l) = lines.next().ok_or(Error::Parse {
            line: cl,
            msg: "unexpected end of vertex list".into(),
        })?;
        let mut t = l.split_whitespace();
        let x = parse_f64(t.next(), line)?;
        let y = parse_f64(t.next(), line)?;
        let z = parse_f64(t.next(), line)?;
        verts.push(Vec3::new(T::lit(x), T::lit(y), T::lit(z)));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (line, l) = lines.next().ok_or(Error::Parse {
            line: cl,
            msg: "unexpected end of face list".into(),
        })?;
        let vals: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                msg: e.to_string(),
            })?;
        if vals.first() != Some(&3) || vals.len() < 4 {
            return Err(Error::NonTriangularFace { line });
        }
        faces.push([vals[1], vals[2], vals[3]]);
    }
    TriangleMesh::new(verts, faces)
}

/// Loads an OBJ or OFF file, chosen by extension (falling back to the header).
pub fn load_mesh<T: Real>(path: impl AsRef<Path>) -> Result<TriangleMesh<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("off") => parse_off(&text),
        Some("obj") => parse_obj(&text),
        _ if text.trim_start().starts_with("OFF") => parse_off(&text),
        _ => parse_obj(&text),
    }
}

/// Shortest decimal form that parses back to the same `f64`.
fn fmt_exact<T: Real>(x: T) -> String {
    let x = x.as_f64();
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn obj_string<T: Real>(mesh: &TriangleMesh<T>) -> String {
    let mut s = String::new();
    for v in &mesh.vertices {
        let _ = writeln!(s, "v {} {} {}", fmt_exact(v.x), fmt_exact(v.y), fmt_exact(v.z));
    }
    if let Some(uv) = &mesh.uv {
        for t in uv {
            let _ = writeln!(s, "vt {} {}", fmt_exact(t.x), fmt_exact(t.y));
        }
        for f in &mesh.faces {
            let _ = writeln!(s, "f {0}/{0} {1}/{1} {2}/{2}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
    } else {
        for f in &mesh.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
    }
    s
}

pub fn off_string<T: Real>(mesh: &TriangleMesh<T>) -> String {
    let mut s = String::from("OFF\n");
    let _ = writeln!(s, "{} {} 0", mesh.vertices.len(), mesh.faces.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{} {} {}", fmt_exact(v.x), fmt_exact(v.y), fmt_exact(v.z));
    }
    for f in &mesh.faces {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

/// Writes OBJ or OFF according to the file extension (OBJ by default).
pub fn save_mesh<T: Real>(mesh: &TriangleMesh<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_off = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("off"));
    let text = if is_off { off_string(mesh) } else { obj_string(mesh) };
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn svg_string<T: Real>(mesh: &PlanarMesh<T>) -> String {
    let (lo, hi) = bbox2(mesh.vertices.iter().copied()).unwrap_or((Vec2::zero(), Vec2::new(T::one(), T::one())));
    let (lo, hi) = (lo.to_f64(), hi.to_f64());
    let w = (hi[0] - lo[0]).max(1e-12);
    let h = (hi[1] - lo[1]).max(1e-12);
    let stroke = 0.001 * w.max(h);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        fmt_sig(lo[0], 9),
        fmt_sig(lo[1], 9),
        fmt_sig(w, 9),
        fmt_sig(h, 9)
    );
    // flip y so the picture is not mirrored
    let _ = writeln!(
        s,
        r#"<g transform="translate(0 {}) scale(1 -1)" stroke="black" stroke-width="{}" fill="none">"#,
        fmt_sig(lo[1] + hi[1], 9),
        fmt_sig(stroke, 4)
    );
    for [a, b] in mesh.edges() {
        let (p, q) = (mesh.vertices[a].to_f64(), mesh.vertices[b].to_f64());
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            fmt_sig(p[0], 9),
            fmt_sig(p[1], 9),
            fmt_sig(q[0], 9),
            fmt_sig(q[1], 9)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn write_svg<T: Real>(mesh: &PlanarMesh<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, svg_string(mesh)).map_err(|e| Error::io(path, e))
}

//! Wavefront OBJ and ASCII PLY loading, OBJ writing.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Mesh, MeshError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    PlyAscii,
}

impl MeshFormat {
    /// Guesses the format from a file extension (`obj` or `ply`).
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext.to_ascii_lowercase().as_str() {
            "obj" => Some(Self::Obj),
            "ply" => Some(Self::PlyAscii),
            _ => None,
        }
    }
}

/// Parses a mesh. Polygons with more than three corners are fan-triangulated
/// from their first corner, in file order.
pub fn load_mesh(bytes: &[u8], format: MeshFormat) -> Result<Mesh, MeshError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        MeshError::Parse {
            line,
            message: "invalid UTF-8".into(),
        }
    })?;
    match format {
        MeshFormat::Obj => parse_obj(text),
        MeshFormat::PlyAscii => parse_ply(text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, MeshError> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("invalid {what} `{tok}`")))
}

fn fan(polygon: &[u32], faces: &mut Vec<[u32; 3]>) {
    for w in polygon[1..].windows(2) {
        faces.push([polygon[0], w[0], w[1]]);
    }
}

fn parse_obj(text: &str) -> Result<Mesh, MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut polygon = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut toks = content.split_whitespace();
        match toks.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for (a, c) in p.iter_mut().enumerate() {
                    *c = number(toks.next(), line, ["x", "y", "z"][a])?;
                }
                vertices.push(p);
            }
            Some("f") => {
                polygon.clear();
                for tok in toks {
                    // `v`, `v/vt`, `v//vn` or `v/vt/vn`; only the position index matters.
                    let idx: i64 = number(tok.split('/').next(), line, "face index")?;
                    let resolved = match idx {
                        0 => return Err(parse_err(line, "face index 0 is invalid in OBJ")),
                        i if i > 0 => i - 1,
                        i => vertices.len() as i64 + i,
                    };
                    if resolved < 0 || resolved > u32::MAX as i64 {
                        return Err(MeshError::Structural(format!(
                            "line {line}: face index {idx} does not resolve to a vertex"
                        )));
                    }
                    polygon.push(resolved as u32);
                }
                if polygon.len() < 3 {
                    return Err(parse_err(line, "face needs at least 3 vertices"));
                }
                fan(&polygon, &mut faces);
            }
            _ => {}
        }
    }
    Mesh::new(vertices, faces)
}

struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<String>,
    has_list: bool,
}

fn parse_ply(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_err(1, "missing `ply` magic")),
    }
    let mut elements: Vec<PlyElement> = Vec::new();
    let mut header_done = false;
    for (line, l) in lines.by_ref() {
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some("format") => {
                if toks.next() != Some("ascii") {
                    return Err(parse_err(line, "only ASCII PLY is supported"));
                }
            }
            Some("element") => {
                let name = toks
                    .next()
                    .ok_or_else(|| parse_err(line, "element without name"))?;
                let count = number(toks.next(), line, "element count")?;
                elements.push(PlyElement {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                    has_list: false,
                });
            }
            Some("property") => {
                let el = elements
                    .last_mut()
                    .ok_or_else(|| parse_err(line, "property before any element"))?;
                let rest: Vec<&str> = toks.collect();
                if rest.first() == Some(&"list") {
                    el.has_list = true;
                }
                let name = rest
                    .last()
                    .ok_or_else(|| parse_err(line, "property without name"))?;
                el.properties.push(name.to_string());
            }
            Some("end_header") => {
                header_done = true;
                break;
            }
            _ => {}
        }
    }
    if !header_done {
        return Err(parse_err(text.lines().count(), "missing end_header"));
    }

    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut polygon = Vec::new();
    let mut last_line = 0;
    for el in &elements {
        let axes = if el.name == "vertex" {
            let find = |p: &str| el.properties.iter().position(|q| q == p);
            match (find("x"), find("y"), find("z")) {
                (Some(x), Some(y), Some(z)) => Some([x, y, z]),
                _ => return Err(parse_err(last_line, "vertex element lacks x/y/z")),
            }
        } else {
            None
        };
        for _ in 0..el.count {
            let (line, l) = lines.next().ok_or_else(|| {
                parse_err(last_line + 1, format!("unexpected end of {} data", el.name))
            })?;
            last_line = line;
            if let Some(axes) = axes {
                if el.has_list {
                    return Err(parse_err(
                        line,
                        "list properties on vertices are unsupported",
                    ));
                }
                let vals: Vec<&str> = l.split_whitespace().collect();
                let mut p = [0.0; 3];
                for (c, &a) in p.iter_mut().zip(&axes) {
                    *c = number(vals.get(a).copied(), line, "coordinate")?;
                }
                vertices.push(p);
            } else if el.name == "face" {
                let mut toks = l.split_whitespace();
                let n: usize = number(toks.next(), line, "face vertex count")?;
                if n < 3 {
                    return Err(parse_err(line, "face needs at least 3 vertices"));
                }
                polygon.clear();
                for _ in 0..n {
                    polygon.push(number(toks.next(), line, "face index")?);
                }
                fan(&polygon, &mut faces);
            }
        }
    }
    Mesh::new(vertices, faces)
}

/// Writes the `v`/`f` subset of OBJ (1-based indices).
pub fn write_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    for v in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for f in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

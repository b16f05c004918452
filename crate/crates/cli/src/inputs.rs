use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use fantok_core::tokenizer::stream::DmtkFile;
use fantok_core::{load_mesh, Mesh, MeshFormat};
use rayon::prelude::*;

pub const MESH_EXTENSIONS: &[&str] = &["obj", "ply"];
pub const DMTK_EXTENSIONS: &[&str] = &["dmtk"];
pub const TEXT_EXTENSIONS: &[&str] = &["txt"];

/// Expands directories into their files with a matching extension, sorted by
/// name. Explicit file paths are kept even if missing so that the failure is
/// reported for that item.
pub fn expand(paths: &[PathBuf], extensions: &[&str]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("reading directory {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && has_extension(p, extensions))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(path.clone());
        }
    }
    if out.is_empty() {
        eprintln!("warning: no input files found");
    }
    Ok(out)
}

fn has_extension(path: &Path, extensions: &[&str]) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| extensions.iter().any(|x| x.eq_ignore_ascii_case(e)))
}

pub fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn read_mesh(path: &Path) -> Result<Mesh> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let format = MeshFormat::from_extension(ext)
        .ok_or_else(|| anyhow!("unrecognized mesh extension `{ext}`"))?;
    let bytes = fs::read(path).context("reading file")?;
    Ok(load_mesh(&bytes, format)?)
}

pub fn read_dmtk(path: &Path) -> Result<DmtkFile> {
    let bytes = fs::read(path).context("reading file")?;
    Ok(DmtkFile::from_bytes(&bytes)?)
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Destination for a derived file: `<dir>/<stem>.<ext>`, where `dir` is the
/// override or the input's own directory.
pub fn output_path(input: &Path, out_dir: Option<&Path>, ext: &str) -> PathBuf {
    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
    dir.join(format!("{}.{ext}", stem(input)))
}

/// Runs `f` on every input in parallel, then prints each success to stdout
/// and each failure to stderr in input order. Returns the failure count.
pub fn for_each_file<F>(inputs: &[PathBuf], f: F) -> usize
where
    F: Fn(&Path) -> Result<String> + Sync,
{
    let results: Vec<Result<String>> = inputs.par_iter().map(|p| f(p)).collect();
    let mut failures = 0;
    for (path, result) in inputs.iter().zip(results) {
        match result {
            Ok(line) => println!("{line}"),
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e:#}", path.display());
            }
        }
    }
    failures
}

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use fantok_core::curation::{
    build_pair_manifest, dpo_loss, dpo_loss_grad, merge_annotations, run_filter_cascade_on_areas,
    CurationConfig, DpoBatch, DropReason, PairCandidate, PairManifest, PairOutcome, ScoreTable,
};
use fantok_core::fmt::sig6;
use fantok_core::metrics::evaluate_pair;
use fantok_core::packing::{
    bucket_sequences, padding_fraction, random_batches, split_windows, WindowSpec,
};
use fantok_core::tokenizer::stream::{self, DmtkFile};
use fantok_core::{
    decode, dequantize, encode_detailed, mesh_area, normalize, quantize_with_stats, sample_surface,
    write_obj, Mesh, QuantizedMesh, TokenClass, TokenSequence, VocabSpec,
};
use rayon::prelude::*;

use crate::args::*;
use crate::inputs::{self, expand, for_each_file, output_path, read_dmtk, read_mesh, stem};

/// Number of inputs that failed; the process exits nonzero when positive.
pub type Failures = usize;

fn stats_line(file: &Path, faces: u32, tokens: usize, patches: usize) -> String {
    let ratio = if faces == 0 {
        "n/a".to_string()
    } else {
        format!("{:.4}", tokens as f64 / (9.0 * faces as f64))
    };
    format!(
        "{} faces={faces} tokens={tokens} ratio={ratio} patches={patches}",
        file.display()
    )
}

fn to_grid(path: &Path, vocab: &VocabSpec, no_normalize: bool) -> Result<QuantizedMesh> {
    let mesh = read_mesh(path)?;
    let mesh = if no_normalize {
        mesh
    } else {
        normalize(&mesh)?.0
    };
    let (qmesh, stats) = quantize_with_stats(&mesh, vocab.resolution())?;
    if stats.dropped_faces > 0 {
        eprintln!(
            "warning: {}: {} faces collapsed on the grid and were dropped",
            path.display(),
            stats.dropped_faces
        );
    }
    Ok(qmesh)
}

pub fn tokenize(args: &TokenizeArgs, vocab: &VocabSpec) -> Result<Failures> {
    let files = expand(&args.inputs, inputs::MESH_EXTENSIONS)?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(for_each_file(&files, |path| {
        let qmesh = to_grid(path, vocab, args.no_normalize)?;
        let encoded = encode_detailed(&qmesh, vocab)?;
        let seq = &encoded.sequence;
        let (bytes, ext) = if args.text {
            (stream::write_text(&seq.ids()).into_bytes(), "txt")
        } else {
            (DmtkFile::from_sequence(seq).to_bytes()?, "dmtk")
        };
        let out = output_path(path, args.out_dir.as_deref(), ext);
        fs::write(&out, bytes).with_context(|| format!("writing {}", out.display()))?;
        Ok(stats_line(
            path,
            seq.face_count(),
            seq.len(),
            encoded.patches.len(),
        ))
    }))
}

fn load_sequence(path: &Path, text: bool, vocab: &VocabSpec) -> Result<TokenSequence> {
    if text {
        let ids = stream::read_text(&inputs::read_text(path)?)?;
        Ok(TokenSequence::from_ids(*vocab, &ids, 0)?)
    } else {
        Ok(read_dmtk(path)?.to_sequence()?)
    }
}

pub fn detokenize(args: &DetokenizeArgs, vocab: &VocabSpec) -> Result<Failures> {
    let extensions = if args.text {
        inputs::TEXT_EXTENSIONS
    } else {
        inputs::DMTK_EXTENSIONS
    };
    let files = expand(&args.inputs, extensions)?;
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(for_each_file(&files, |path| {
        let seq = load_sequence(path, args.text, vocab)?;
        let qmesh = decode(&seq)?;
        let faces = qmesh.faces().len();
        if !args.text && faces != seq.face_count() as usize {
            bail!(
                "header promises {} faces, tokens describe {faces}",
                seq.face_count()
            );
        }
        let out = output_path(path, args.out_dir.as_deref(), "obj");
        fs::write(&out, write_obj(&dequantize(&qmesh)))
            .with_context(|| format!("writing {}", out.display()))?;
        Ok(format!(
            "{} faces={faces} vertices={}",
            path.display(),
            qmesh.vertices().len()
        ))
    }))
}

fn roundtrip_one(path: &Path, vocab: &VocabSpec, no_normalize: bool) -> Result<String> {
    let qmesh = to_grid(path, vocab, no_normalize)?;
    let encoded = encode_detailed(&qmesh, vocab)?;
    let bytes = DmtkFile::from_sequence(&encoded.sequence).to_bytes()?;
    let back = decode(&DmtkFile::from_bytes(&bytes)?.to_sequence()?)?;
    ensure!(
        back.canonical_faces() == qmesh.canonical_faces(),
        "face sets differ after decoding"
    );
    ensure!(
        back.referenced_vertices() == qmesh.referenced_vertices(),
        "vertex sets differ after decoding"
    );
    Ok(format!(
        "faces={} tokens={}",
        qmesh.faces().len(),
        encoded.sequence.len()
    ))
}

pub fn roundtrip(args: &RoundtripArgs, vocab: &VocabSpec) -> Result<Failures> {
    let files = expand(&args.inputs, inputs::MESH_EXTENSIONS)?;
    let results: Vec<Result<String>> = files
        .par_iter()
        .map(|p| roundtrip_one(p, vocab, args.no_normalize))
        .collect();
    let mut failures = 0;
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(detail) => println!("{} PASS {detail}", path.display()),
            Err(e) => {
                failures += 1;
                println!("{} FAIL", path.display());
                eprintln!("error: {}: {e:#}", path.display());
            }
        }
    }
    println!("roundtrip: {}/{} PASS", files.len() - failures, files.len());
    Ok(failures)
}

pub fn stats(args: &StatsArgs) -> Result<Failures> {
    let files = expand(&args.inputs, inputs::DMTK_EXTENSIONS)?;
    Ok(for_each_file(&files, |path| {
        let file = read_dmtk(path)?;
        let center = file.spec.class_base(TokenClass::CenterI);
        let centers = center..center + file.spec.class_len(TokenClass::CenterI);
        let patches = file.ids.iter().filter(|id| centers.contains(id)).count();
        Ok(stats_line(path, file.face_count, file.ids.len(), patches))
    }))
}

pub fn sample(args: &SampleArgs, seed: u64) -> Result<Failures> {
    let mesh = read_mesh(&args.mesh).with_context(|| format!("loading {}", args.mesh.display()))?;
    let points = sample_surface(&mesh, args.dense.unwrap_or(args.n), args.n, seed)?;
    let mut out = String::with_capacity(points.len() * 48);
    for p in &points.points {
        let _ = writeln!(out, "{} {} {}", p[0], p[1], p[2]);
    }
    fs::write(&args.out, out).with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "{} points={} seed={seed} area={}",
        args.mesh.display(),
        points.len(),
        sig6(mesh_area(&mesh))
    );
    Ok(0)
}

fn metric_mesh(path: &Path, normalized: bool) -> Result<Mesh> {
    let mesh = read_mesh(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(if normalized {
        normalize(&mesh)?.0
    } else {
        mesh
    })
}

fn parse_pair_list(path: &Path) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    let base = path.parent().unwrap_or(Path::new(""));
    let mut out = Vec::new();
    for (n, line) in inputs::read_text(path)?.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [id, gt, gen] = cols[..] else {
            bail!(
                "{} line {}: expected `<id> <gt> <gen>`",
                path.display(),
                n + 1
            );
        };
        out.push((id.to_string(), base.join(gt), base.join(gen)));
    }
    Ok(out)
}

pub fn metrics(args: &MetricsArgs, seed: u64) -> Result<Failures> {
    let pairs = match &args.pairs {
        Some(list) => parse_pair_list(list)?,
        None => {
            let (gt, gen) = (&args.meshes[0], &args.meshes[1]);
            let id = args.id.clone().unwrap_or_else(|| gen.display().to_string());
            vec![(id, gt.clone(), gen.clone())]
        }
    };
    let results: Vec<Result<String>> = pairs
        .par_iter()
        .map(|(id, gt, gen)| {
            let report = evaluate_pair(
                &metric_mesh(gt, args.normalize)?,
                &metric_mesh(gen, args.normalize)?,
                args.n,
                seed,
            )?;
            Ok(report.line(id))
        })
        .collect();
    let mut failures = 0;
    for ((id, _, _), result) in pairs.iter().zip(results) {
        match result {
            Ok(line) => println!("{line}"),
            Err(e) => {
                failures += 1;
                eprintln!("error: {id}: {e:#}");
            }
        }
    }
    Ok(failures)
}

pub fn pack(args: &PackArgs, vocab: &VocabSpec, seed: u64) -> Result<Failures> {
    let window =
        WindowSpec::for_vocab(args.window, vocab).with_stride(args.stride.unwrap_or(args.window));
    window.validate(vocab)?;
    ensure!(args.batch_size >= 1, "batch size must be positive");
    let files = expand(&args.inputs, inputs::DMTK_EXTENSIONS)?;
    let mut names = HashSet::new();
    if let Some(dup) = files
        .iter()
        .map(|p| stem(p))
        .find(|s| !names.insert(s.clone()))
    {
        bail!("two inputs share the sequence id `{dup}`");
    }
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))?;

    let results: Vec<Result<(String, usize, Vec<String>)>> = files
        .par_iter()
        .map(|path| {
            let file = read_dmtk(path)?;
            ensure!(
                file.spec == *vocab,
                "vocabulary {:?} differs from the flags",
                file.spec
            );
            let source = stem(path);
            let mut rows = Vec::new();
            for (k, w) in split_windows(&file.ids, &source, &window)
                .iter()
                .enumerate()
            {
                let name = format!("{source}.w{k}.dmtk");
                let bytes = DmtkFile {
                    spec: file.spec,
                    face_count: 0,
                    ids: w.ids.clone(),
                }
                .to_bytes()?;
                let out = args.out_dir.join(&name);
                fs::write(&out, bytes).with_context(|| format!("writing {}", out.display()))?;
                rows.push(format!(
                    "{name}\t{source}\t{}\t{}",
                    w.offset, w.valid_length
                ));
            }
            Ok((source, file.ids.len(), rows))
        })
        .collect();

    let mut failures = 0;
    let mut lengths = Vec::new();
    let mut sidecar = String::from("window\tsource\toffset\tvalid_length\n");
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok((source, len, rows)) => {
                println!("{} tokens={len} windows={}", path.display(), rows.len());
                for row in rows {
                    sidecar.push_str(&row);
                    sidecar.push('\n');
                }
                lengths.push((source, len));
            }
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e:#}", path.display());
            }
        }
    }
    let plan = if args.random_batches {
        random_batches(&lengths, args.batch_size, seed)
    } else {
        bucket_sequences(&lengths, args.batch_size, seed)
    };
    let padding = padding_fraction(&plan, &lengths, &window)?;
    fs::write(args.out_dir.join("windows.tsv"), sidecar).context("writing windows.tsv")?;
    fs::write(args.out_dir.join("batches.txt"), plan.to_manifest())
        .context("writing batches.txt")?;
    println!("batches={} padding={}", plan.batches.len(), sig6(padding));
    Ok(failures)
}

fn load_config(path: Option<&Path>) -> Result<CurationConfig> {
    match path {
        Some(p) => CurationConfig::from_toml(&inputs::read_text(p)?)
            .with_context(|| format!("loading {}", p.display())),
        None => Ok(CurationConfig::default()),
    }
}

fn load_table(label: &str, path: Option<&Path>) -> Result<ScoreTable> {
    match path {
        Some(p) => ScoreTable::parse(label, &inputs::read_text(p)?)
            .with_context(|| format!("loading {}", p.display())),
        None => Ok(ScoreTable::new(label)),
    }
}

pub fn curate(args: &CurateArgs) -> Result<Failures> {
    let cfg = load_config(args.config.as_deref())?;
    let losses = load_table("loss", args.losses.as_deref())?;
    let aesthetics = load_table("aesthetic", args.aesthetics.as_deref())?;
    let mut failures = 0;
    let areas: Vec<(String, f64)> = match &args.areas {
        Some(p) => load_table("area", Some(p))?
            .iter()
            .map(|(id, a)| (id.to_string(), a))
            .collect(),
        None => {
            let files = expand(&args.meshes, inputs::MESH_EXTENSIONS)?;
            let loaded: Vec<Result<f64>> = files
                .par_iter()
                .map(|p| Ok(mesh_area(&read_mesh(p)?)))
                .collect();
            let mut areas = Vec::new();
            for (path, area) in files.iter().zip(loaded) {
                match area {
                    Ok(a) => areas.push((stem(path), a)),
                    Err(e) => {
                        failures += 1;
                        eprintln!("error: {}: {e:#}", path.display());
                    }
                }
            }
            areas
        }
    };
    let outcome = run_filter_cascade_on_areas(&areas, &losses, &aesthetics, &cfg)?;
    let count = |r: DropReason| outcome.dropped.iter().filter(|(_, d)| *d == r).count();
    println!(
        "kept={} rescued={} dropped_area={} dropped_aesthetic={}",
        outcome.kept.len(),
        outcome.rescued.len(),
        count(DropReason::Area),
        count(DropReason::Aesthetic)
    );
    if let Some(out) = &args.out {
        let rescued: HashSet<&str> = outcome.rescued.iter().map(String::as_str).collect();
        let mut text = String::from("id\tdecision\n");
        for id in &outcome.kept {
            let decision = if rescued.contains(id.as_str()) {
                "rescued"
            } else {
                "kept"
            };
            let _ = writeln!(text, "{id}\t{decision}");
        }
        for (id, reason) in &outcome.dropped {
            let _ = writeln!(text, "{id}\t{reason}");
        }
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    }
    Ok(failures)
}

pub fn pairs_build(args: &PairsBuildArgs) -> Result<Failures> {
    let cfg = load_config(Some(&args.config))?;
    let candidates = PairCandidate::parse_tsv(&inputs::read_text(&args.candidates)?)
        .with_context(|| format!("loading {}", args.candidates.display()))?;
    let manifest = build_pair_manifest(&candidates, &cfg)?;
    fs::write(&args.out, manifest.to_tsv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    if let Some(pending) = &args.pending {
        let rows = manifest.unresolved().cloned().collect();
        fs::write(pending, PairManifest { rows }.to_tsv())
            .with_context(|| format!("writing {}", pending.display()))?;
    }
    let count = |o: PairOutcome| manifest.rows.iter().filter(|r| r.outcome == o).count();
    println!(
        "candidates={} excluded={} {}={} {}={} {}={} {}={}",
        candidates.len(),
        candidates.len() - manifest.rows.len(),
        PairOutcome::DiscardBoth,
        count(PairOutcome::DiscardBoth),
        PairOutcome::PreferFirst,
        count(PairOutcome::PreferFirst),
        PairOutcome::PreferSecond,
        count(PairOutcome::PreferSecond),
        PairOutcome::NeedsHuman,
        count(PairOutcome::NeedsHuman),
    );
    Ok(0)
}

pub fn pairs_merge(args: &PairsMergeArgs) -> Result<Failures> {
    let load = |p: &Path| {
        PairManifest::from_tsv(&inputs::read_text(p)?)
            .with_context(|| format!("loading {}", p.display()))
    };
    let merged = merge_annotations(&load(&args.manifest)?, &load(&args.annotated)?)?;
    fs::write(&args.out, merged.to_tsv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    let unresolved = merged.unresolved().count();
    if unresolved > 0 {
        eprintln!("warning: {unresolved} pairs still await annotation");
    }
    println!(
        "resolved={} unresolved={unresolved}",
        merged.rows.len() - unresolved
    );
    Ok(0)
}

pub fn dpo(args: &DpoArgs) -> Result<Failures> {
    let batch = DpoBatch::parse_tsv(&inputs::read_text(&args.batch)?, args.beta)
        .with_context(|| format!("loading {}", args.batch.display()))?;
    println!("{}", sig6(dpo_loss(&batch)?));
    if args.grad {
        for (n, g) in dpo_loss_grad(&batch)?.iter().enumerate() {
            println!(
                "pair={n} policy_chosen={} reference_chosen={} policy_rejected={} reference_rejected={}",
                sig6(g.policy_chosen),
                sig6(g.reference_chosen),
                sig6(g.policy_rejected),
                sig6(g.reference_rejected)
            );
        }
    }
    Ok(0)
}

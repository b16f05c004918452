use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fantok_core::VocabSpec;

#[derive(Debug, Parser)]
#[command(
    name = "fantok",
    version,
    about = "Triangle-fan mesh tokenizer and training-data tools"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Quantization grid resolution r; must equal A*B*C.
    #[arg(long, global = true, default_value_t = 512)]
    pub resolution: u32,
    /// Block sizes A,B,C of the coordinate index.
    #[arg(long, global = true, value_name = "A,B,C", default_value = "4,8,16", value_parser = parse_blocks)]
    pub blocks: [u32; 3],
    /// Seed for every random choice a command makes.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for per-file work (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

impl GlobalOpts {
    pub fn vocab(&self) -> anyhow::Result<VocabSpec> {
        let [a, b, c] = self.blocks;
        Ok(VocabSpec::with_resolution(self.resolution, a, b, c)?)
    }
}

fn parse_blocks(s: &str) -> Result<[u32; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b, c] = parts[..] else {
        return Err(format!("expected A,B,C, got `{s}`"));
    };
    let num = |p: &str| {
        p.trim()
            .parse::<u32>()
            .map_err(|_| format!("`{p}` is not a block size"))
    };
    Ok([num(a)?, num(b)?, num(c)?])
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode OBJ/PLY meshes into token files.
    Tokenize(TokenizeArgs),
    /// Decode token files back into OBJ meshes on the grid.
    Detokenize(DetokenizeArgs),
    /// Encode, serialize, parse and decode each mesh, checking nothing is lost.
    Roundtrip(RoundtripArgs),
    /// Report face and token counts of DMTK files.
    Stats(StatsArgs),
    /// Draw area-weighted surface samples from a mesh.
    Sample(SampleArgs),
    /// Chamfer and Hausdorff distances between meshes.
    Metrics(MetricsArgs),
    /// Cut token files into fixed windows and plan batches.
    Pack(PackArgs),
    /// Run the area, loss and aesthetic filter cascade.
    Curate(CurateArgs),
    /// Build and merge preference-pair manifests.
    #[command(subcommand)]
    Pairs(PairsCommand),
    /// Evaluate the DPO loss on a batch of log-probabilities.
    Dpo(DpoArgs),
}

#[derive(Debug, Args)]
pub struct TokenizeArgs {
    /// Mesh files, or directories scanned for .obj and .ply files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Output directory (default: next to each input).
    #[arg(long, short)]
    pub out_dir: Option<PathBuf>,
    /// Write one decimal id per line instead of DMTK.
    #[arg(long)]
    pub text: bool,
    /// Quantize coordinates as given; they must already lie in [0, 1].
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Args)]
pub struct DetokenizeArgs {
    /// DMTK files (or text id files with --text), or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, short)]
    pub out_dir: Option<PathBuf>,
    /// Inputs are text id files; the vocabulary comes from the global flags.
    #[arg(long)]
    pub text: bool,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub no_normalize: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    pub mesh: PathBuf,
    /// Points to keep.
    #[arg(long, short, default_value_t = 1024)]
    pub n: usize,
    /// Dense pool to draw from before selection (default: n).
    #[arg(long)]
    pub dense: Option<usize>,
    /// Output file, one `x y z` point per line.
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Reference mesh then generated mesh.
    #[arg(num_args = 2, value_names = ["GT", "GEN"], required_unless_present = "pairs")]
    pub meshes: Vec<PathBuf>,
    /// File of `<id> <gt> <gen>` lines to evaluate instead.
    #[arg(long, conflicts_with = "meshes")]
    pub pairs: Option<PathBuf>,
    /// Samples per mesh.
    #[arg(long, short, default_value_t = 1024)]
    pub n: usize,
    /// Report id for a single pair (default: the generated mesh path).
    #[arg(long)]
    pub id: Option<String>,
    /// Normalize both meshes into the unit cube before sampling.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Args)]
pub struct PackArgs {
    /// DMTK files or directories of them.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Window length W.
    #[arg(long, default_value_t = 9000)]
    pub window: usize,
    /// Offset between window starts (default: W).
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, default_value_t = 8)]
    pub batch_size: usize,
    /// Plan batches by shuffling instead of length bucketing.
    #[arg(long)]
    pub random_batches: bool,
    #[arg(long, short)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurateArgs {
    /// Meshes (files or directories); ids are file stems.
    #[arg(required_unless_present = "areas")]
    pub meshes: Vec<PathBuf>,
    /// `<id> <area>` table to use instead of loading meshes.
    #[arg(long, conflicts_with = "meshes")]
    pub areas: Option<PathBuf>,
    /// TOML curation config.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// `<id> <loss>` table.
    #[arg(long)]
    pub losses: Option<PathBuf>,
    /// `<id> <score>` table.
    #[arg(long)]
    pub aesthetics: Option<PathBuf>,
    /// Write `<id>\t<decision>` rows here.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum PairsCommand {
    /// Gate candidate pairs by Chamfer distance and write a manifest.
    Build(PairsBuildArgs),
    /// Fill pending rows of a manifest from an annotated copy.
    Merge(PairsMergeArgs),
}

#[derive(Debug, Args)]
pub struct PairsBuildArgs {
    /// Tab-separated `condition_id A B cd_A cd_B faces_A faces_B`.
    pub candidates: PathBuf,
    #[arg(long, short)]
    pub config: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Also write the rows awaiting annotation here.
    #[arg(long)]
    pub pending: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairsMergeArgs {
    pub manifest: PathBuf,
    pub annotated: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DpoArgs {
    /// Rows of `policy_chosen reference_chosen policy_rejected reference_rejected`.
    pub batch: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Also print the gradient of each pair.
    #[arg(long)]
    pub grad: bool,
}

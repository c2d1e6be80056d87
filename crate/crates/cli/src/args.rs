use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use stratify_core::datasets::SamplingMode;
use stratify_core::{Reduction, Shape};

#[derive(Debug, Parser)]
#[command(
    name = "stratify",
    version,
    about = "Find boundary and intersection points in point clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// One invocation. Manifests store this with every default filled in, so
/// replaying it does not depend on the defaults of a later version.
#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Sample a synthetic shape with ground truth.
    Generate(GenerateArgs),
    /// Label every point as boundary, manifold or intersection.
    Detect(DetectArgs),
    /// Score a partition against a ground-truth sidecar.
    Evaluate(EvaluateArgs),
    /// Project a cloud onto its principal axes.
    Project(ProjectArgs),
    /// Draw a labelled cloud as an SVG scatter plot.
    Plot(PlotArgs),
    /// Re-run the command recorded in a manifest and compare its outputs.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    /// henneberg, planes, hemisphere_plane, circle or sphere.
    #[arg(long)]
    pub shape: Shape,
    /// Number of points; each shape has its own default.
    #[arg(long)]
    pub count: Option<usize>,
    /// Radius of the uniform ball each point is displaced within.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Points this close to the singular locus are marked near-singular.
    #[arg(long)]
    pub proximity: Option<f64>,
    /// Henneberg placement: grid, parameter or area.
    #[arg(long, default_value = "grid")]
    pub sampling: SamplingMode,
    #[arg(long)]
    pub out: PathBuf,
    /// Ground-truth sidecar; defaults to `<out>` with a `.truth.csv` suffix.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DetectArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Inner annulus radius.
    #[arg(long)]
    pub r: f64,
    /// Outer annulus radius.
    #[arg(long)]
    pub s: f64,
    /// Intrinsic dimension of the manifold pieces.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Filtration cap; defaults to 2s.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub max_dim: Option<usize>,
    /// Smallest annulus that gets a barcode; defaults to k + 1.
    #[arg(long)]
    pub min_annulus: Option<usize>,
    /// Worker threads, 0 for one per core. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, default_value = "cohomology")]
    pub reduction: Reduction,
    /// File of point indices; only those points are used.
    #[arg(long)]
    pub subset: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub points: PathBuf,
    /// Partition CSV written by `detect`.
    #[arg(long)]
    pub labels: PathBuf,
    /// Ground-truth sidecar; defaults to the one next to `--points`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Points this close to the singular locus count as intersection.
    #[arg(long)]
    pub proximity: f64,
    /// Report JSON.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionMethod {
    Pca,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ProjectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "pca")]
    pub method: ProjectionMethod,
    #[arg(long, default_value_t = 2)]
    pub target_dim: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PlotArgs {
    /// Two- or three-column cloud; project wider data first.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Write outputs here instead of their recorded locations.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// `dir/name.csv` becomes `dir/name.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

/// Default manifest location: the output path with `.manifest.json` appended.
pub fn default_manifest(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

impl Command {
    /// Fills every optional argument and makes paths absolute.
    pub fn resolved(mut self) -> std::io::Result<Self> {
        fn abs(p: &mut PathBuf) -> std::io::Result<()> {
            *p = std::path::absolute(&*p)?;
            Ok(())
        }
        match &mut self {
            Command::Generate(a) => {
                a.count.get_or_insert(a.shape.default_count());
                a.proximity.get_or_insert(a.shape.default_proximity());
                abs(&mut a.out)?;
                abs(a.truth.get_or_insert_with(|| sibling(&a.out, "truth.csv")))?;
                abs(a.manifest.get_or_insert_with(|| default_manifest(&a.out)))?;
            }
            Command::Detect(a) => {
                abs(&mut a.input)?;
                abs(&mut a.out)?;
                if let Some(p) = &mut a.subset {
                    abs(p)?;
                }
                abs(a.manifest.get_or_insert_with(|| default_manifest(&a.out)))?;
            }
            Command::Evaluate(a) => {
                abs(&mut a.points)?;
                abs(&mut a.labels)?;
                abs(a.truth.get_or_insert_with(|| sibling(&a.points, "truth.csv")))?;
                abs(&mut a.out)?;
                abs(a.manifest.get_or_insert_with(|| default_manifest(&a.out)))?;
            }
            Command::Project(a) => {
                abs(&mut a.input)?;
                abs(&mut a.out)?;
                abs(a.manifest.get_or_insert_with(|| default_manifest(&a.out)))?;
            }
            Command::Plot(a) => {
                abs(&mut a.points)?;
                abs(&mut a.labels)?;
                abs(&mut a.out)?;
                abs(a.manifest.get_or_insert_with(|| default_manifest(&a.out)))?;
            }
            Command::Replay(a) => {
                abs(&mut a.manifest)?;
            }
        }
        Ok(self)
    }

    /// Output paths, manifest last. Only meaningful after [`Command::resolved`].
    pub fn outputs_mut(&mut self) -> Vec<&mut PathBuf> {
        let mut out: Vec<&mut PathBuf> = Vec::new();
        let manifest = match self {
            Command::Generate(a) => {
                out.push(&mut a.out);
                out.extend(a.truth.as_mut());
                &mut a.manifest
            }
            Command::Detect(a) => {
                out.push(&mut a.out);
                &mut a.manifest
            }
            Command::Evaluate(a) => {
                out.push(&mut a.out);
                &mut a.manifest
            }
            Command::Project(a) => {
                out.push(&mut a.out);
                &mut a.manifest
            }
            Command::Plot(a) => {
                out.push(&mut a.out);
                &mut a.manifest
            }
            Command::Replay(_) => return out,
        };
        out.extend(manifest.as_mut());
        out
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Detect(_) => "detect",
            Command::Evaluate(_) => "evaluate",
            Command::Project(_) => "project",
            Command::Plot(_) => "plot",
            Command::Replay(_) => "replay",
        }
    }
}

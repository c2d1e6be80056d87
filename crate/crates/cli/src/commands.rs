use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use stratify_core::datasets::GeneratorSpec;
use stratify_core::io::{self, write_text};
use stratify_core::{detect_timed, evaluate, pca, DetectorConfig, LoadOptions, PointCloud};

use crate::args::{Command, DetectArgs, EvaluateArgs, GenerateArgs, PlotArgs, ProjectArgs, ReplayArgs};
use crate::error::{CliError, CliResult};
use crate::manifest::{FileDigest, RunManifest};
use crate::svg;

/// What a command did, before hashing.
#[derive(Default)]
struct Outcome {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    timings: BTreeMap<String, f64>,
    seed: Option<u64>,
    generator: Option<GeneratorSpec>,
    detector: Option<DetectorConfig>,
    class_counts: Option<[usize; 3]>,
}

struct Stopwatch(Instant);

impl Stopwatch {
    fn start() -> Self {
        Stopwatch(Instant::now())
    }

    fn lap(&mut self, timings: &mut BTreeMap<String, f64>, stage: &str) {
        timings.insert(stage.to_string(), self.0.elapsed().as_secs_f64());
        self.0 = Instant::now();
    }
}

/// Runs `command` and writes its manifest. Returns the manifest.
pub fn run(command: Command) -> CliResult<RunManifest> {
    if let Command::Replay(a) = command {
        return replay(&a);
    }
    let command = command
        .resolved()
        .map_err(|e| CliError::Io(format!("cannot resolve paths: {e}")))?;
    let outcome = match &command {
        Command::Generate(a) => generate(a)?,
        Command::Detect(a) => detect(a)?,
        Command::Evaluate(a) => evaluate_cmd(a)?,
        Command::Project(a) => project(a)?,
        Command::Plot(a) => plot(a)?,
        Command::Replay(_) => unreachable!(),
    };
    let manifest = RunManifest {
        tool: "stratify".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        invocation: command.clone(),
        generator: outcome.generator,
        detector: outcome.detector,
        seed: outcome.seed,
        inputs: outcome
            .inputs
            .iter()
            .map(|p| FileDigest::of(p))
            .collect::<CliResult<_>>()?,
        outputs: outcome
            .outputs
            .iter()
            .map(|p| FileDigest::of(p))
            .collect::<CliResult<_>>()?,
        timings: outcome.timings,
        class_counts: outcome.class_counts.map(Into::into),
    };
    let mut command = command;
    let path = command
        .outputs_mut()
        .pop()
        .expect("resolved command has a manifest path")
        .clone();
    manifest.write(&path)?;
    Ok(manifest)
}

fn load(path: &Path) -> CliResult<PointCloud> {
    Ok(io::load_cloud(path, &LoadOptions::default())?)
}

fn resolved<T: Clone>(v: &Option<T>) -> T {
    v.clone().expect("argument resolved before running")
}

fn generate(a: &GenerateArgs) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut clock = Stopwatch::start();
    let spec = GeneratorSpec {
        shape: a.shape,
        count: resolved(&a.count),
        noise: a.noise,
        seed: a.seed,
        proximity_radius: resolved(&a.proximity),
        sampling: a.sampling,
    };
    let cloud = stratify_core::generate(&spec)?;
    clock.lap(&mut out.timings, "generate");
    let truth = resolved(&a.truth);
    io::write_cloud(&a.out, &cloud)?;
    let gt = cloud.ground_truth().unwrap_or(&[]);
    io::write_ground_truth(&truth, gt)?;
    clock.lap(&mut out.timings, "write");
    let near = gt.iter().filter(|g| g.near_singularity).count();
    println!(
        "generated {} {} points in R^{} ({near} near the singular locus) -> {}",
        cloud.len(),
        a.shape,
        cloud.ambient_dim(),
        a.out.display()
    );
    out.outputs = vec![a.out.clone(), truth];
    out.seed = Some(a.seed);
    out.generator = Some(spec);
    Ok(out)
}

fn detect(a: &DetectArgs) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut clock = Stopwatch::start();
    let cfg = DetectorConfig {
        t_max: a.t_max,
        max_dim: a.max_dim,
        min_annulus_size: a.min_annulus,
        reduction: a.reduction,
        ..DetectorConfig::new(a.r, a.s, a.k).with_threads(a.threads)
    }
    .validated()?;
    let cloud = load(&a.input)?;
    out.inputs.push(a.input.clone());
    let subset = match &a.subset {
        Some(path) => {
            out.inputs.push(path.clone());
            Some(io::read_indices(path)?)
        }
        None => None,
    };
    let target = match &subset {
        Some(indices) => cloud.subset(indices)?,
        None => cloud,
    };
    clock.lap(&mut out.timings, "load");

    let (mut partition, stages) = detect_timed(&target, &cfg)?;
    if let Some(indices) = subset {
        partition.indices = indices;
    }
    out.timings.insert("index_build".into(), stages.index_build);
    out.timings.insert("classification".into(), stages.classification);
    clock = Stopwatch::start();
    io::write_partition(&a.out, &partition)?;
    clock.lap(&mut out.timings, "write");

    let [b, m, i] = partition.class_counts();
    println!(
        "labelled {} points: {b} boundary, {m} manifold, {i} intersection ({:.2}s) -> {}",
        partition.len(),
        stages.index_build + stages.classification,
        a.out.display()
    );
    out.outputs.push(a.out.clone());
    out.class_counts = Some([b, m, i]);
    out.detector = Some(cfg);
    Ok(out)
}

fn evaluate_cmd(a: &EvaluateArgs) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut clock = Stopwatch::start();
    let truth = resolved(&a.truth);
    let labels = io::read_ground_truth(&truth)?;
    let cloud = load(&a.points)?.with_ground_truth(labels)?;
    let partition = io::read_partition(&a.labels)?;
    clock.lap(&mut out.timings, "load");
    let report = evaluate(&partition, &cloud, a.proximity)?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises") + "\n";
    write_text(&a.out, &json)?;
    clock.lap(&mut out.timings, "evaluate");
    let i = report.intersection;
    println!(
        "accuracy {:.3}; intersection precision {:.3} recall {:.3} ({} true, {} predicted) -> {}",
        report.accuracy(),
        i.precision,
        i.recall,
        i.support,
        i.predicted,
        a.out.display()
    );
    out.inputs = vec![a.points.clone(), a.labels.clone(), truth];
    out.outputs.push(a.out.clone());
    out.class_counts = Some(partition.class_counts());
    Ok(out)
}

fn project(a: &ProjectArgs) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut clock = Stopwatch::start();
    let cloud = load(&a.input)?;
    let projection = pca(&cloud, a.target_dim)?;
    clock.lap(&mut out.timings, "project");
    io::write_cloud(&a.out, &projection.cloud)?;
    println!(
        "projected {} points from R^{} to R^{}, keeping {:.1}% of the variance -> {}",
        cloud.len(),
        cloud.ambient_dim(),
        a.target_dim,
        100.0 * projection.captured_fraction(),
        a.out.display()
    );
    out.inputs.push(a.input.clone());
    out.outputs.push(a.out.clone());
    Ok(out)
}

fn plot(a: &PlotArgs) -> CliResult<Outcome> {
    let mut out = Outcome::default();
    let mut clock = Stopwatch::start();
    let cloud = load(&a.points)?;
    let partition = io::read_partition(&a.labels)?;
    let text = svg::scatter(&cloud, &partition, a.title.as_deref())?;
    write_text(&a.out, &text)?;
    clock.lap(&mut out.timings, "plot");
    println!("plotted {} points -> {}", partition.len(), a.out.display());
    out.inputs = vec![a.points.clone(), a.labels.clone()];
    out.outputs.push(a.out.clone());
    out.class_counts = Some(partition.class_counts());
    Ok(out)
}

/// Re-runs a recorded invocation and checks its outputs hash as recorded.
fn replay(a: &ReplayArgs) -> CliResult<RunManifest> {
    let recorded = RunManifest::read(&a.manifest)?;
    for input in &recorded.inputs {
        let now = FileDigest::of(&input.path)?;
        if now.sha256 != input.sha256 {
            return Err(CliError::Integrity(format!(
                "input {} changed since the manifest was written",
                input.path.display()
            )));
        }
    }
    let mut command = recorded.invocation.clone();
    if matches!(command, Command::Replay(_)) {
        return Err(CliError::Integrity("a manifest cannot record a replay".into()));
    }
    if let Some(dir) = &a.out_dir {
        for path in command.outputs_mut() {
            let name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
            *path = dir.join(name);
        }
    }
    let fresh = run(command)?;
    if fresh.outputs.len() != recorded.outputs.len() {
        return Err(CliError::Integrity("replay produced a different set of outputs".into()));
    }
    for (old, new) in recorded.outputs.iter().zip(&fresh.outputs) {
        if old.sha256 != new.sha256 {
            return Err(CliError::Integrity(format!(
                "{} differs from the recorded {}",
                new.path.display(),
                old.path.display()
            )));
        }
    }
    println!(
        "replayed {}: {} outputs identical",
        recorded.invocation.name(),
        fresh.outputs.len()
    );
    Ok(fresh)
}

//! `lss`: local spectral similarity edge detection from the command line.

mod manifest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use lss_core::cube::parse_band_list;
use lss_core::envi::envi_paths;
use lss_core::lss::with_threads;
use lss_core::nmi::DEFAULT_BINS;
use lss_core::pgm::{write_pgm, Gray8};
use lss_core::{
    add_gaussian_noise, band_mi_sensitivity, baseline_edge_map, downsample, edge_map, evaluate, kmeans_cluster,
    otsu_threshold, pca_fit, pca_project, read_envi, repro, synth_scene, write_envi, Aggregator, BaselineKind,
    BinaryEdgeMap, Cube32, EdgeMap32, GroundTruthEdges, Interleave, LssConfig, Mask, MetricSpec, Padding,
    SceneSpec, DEFAULT_ALPHA,
};

use manifest::Manifest;

#[derive(Parser, Debug)]
#[command(name = "lss", version, about = "Local spectral similarity edge detection for hyperspectral cubes")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print dimensions, interleave and band count of an ENVI cube.
    Info {
        /// ENVI header (or binary) path.
        cube: PathBuf,
    },
    /// Generate a synthetic scene and its ground-truth edges.
    Synth(SynthArgs),
    /// Add per-band Gaussian noise with variances drawn from U[0, max].
    Noise(NoiseArgs),
    /// Block-average a cube (and optionally its truth) by an integer factor.
    Downsample(DownsampleArgs),
    /// Compute an LSS edge-strength map.
    Edges(EdgesArgs),
    /// Compute a gradient or Sobel baseline edge map.
    Baseline(BaselineArgs),
    /// Project a cube onto its leading principal components.
    Pca(PcaArgs),
    /// Otsu-threshold an edge map into a binary edge image.
    Binarize(BinarizeArgs),
    /// Score a binary edge image against ground truth (FAC, MC, FOM).
    Eval(EvalArgs),
    /// k-means clustering, optionally skipping edge pixels.
    Cluster(ClusterArgs),
    /// Per-band normalized mutual information with ground-truth edges.
    Bandsens(BandsensArgs),
    /// Run a named reproduction pipeline on synthetic scenes.
    Repro(ReproArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Preset {
    /// Slanted two-region boundary, 64x64x50.
    Boundary,
    /// Vertical two-region boundary, 64x64x50.
    Vertical,
    /// Bright vertical strip on a dark background, 64x64x50.
    Strip,
    /// Polygon, half-plane and background, 48x48x50.
    ThreeRegion,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// Built-in scene (ignored when --spec is given).
    #[arg(long, value_enum, default_value = "boundary")]
    preset: Preset,
    /// JSON scene description.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Boundary mixing width in pixels for presets.
    #[arg(long, default_value_t = 1)]
    mix: usize,
    /// Overrides the scene seed (used by jitter).
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the scene texture standard deviation.
    #[arg(long)]
    jitter: Option<f64>,
    /// Output cube (ENVI header path).
    #[arg(long)]
    out: PathBuf,
    /// Output ground-truth edges (PGM).
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value = "bsq")]
    interleave: Interleave,
}

#[derive(Args, Debug)]
struct NoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Upper bound of the per-band noise variance.
    #[arg(long, default_value_t = repro::NOISE_MAX_VARIANCE)]
    max_variance: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DownsampleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    factor: usize,
    /// Ground-truth PGM to reduce by block-OR.
    #[arg(long, requires = "truth_out")]
    truth: Option<PathBuf>,
    #[arg(long, requires = "truth")]
    truth_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EdgesArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Distance metric as `name[:param]`, e.g. `fract:0.5`.
    #[arg(long, default_value = "eu")]
    metric: MetricSpec,
    /// Aggregator: mean, median, min, max, midpoint, mad, conv.
    #[arg(long, default_value = "median")]
    agg: Aggregator,
    /// Odd window side length, at least 3.
    #[arg(long, default_value_t = 3, value_parser = parse_window)]
    window: usize,
    /// Border handling: replicate or zero-skip.
    #[arg(long, default_value = "replicate")]
    pad: Padding,
    /// Bands to drop, e.g. `0-5,107-112`.
    #[arg(long)]
    exclude_bands: Option<String>,
    /// Comma-separated weights for `conv`, one per window cell (row-major).
    #[arg(long, value_delimiter = ',')]
    kernel: Option<Vec<f64>>,
    /// 8-bit min-max scaled preview (PGM).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Raw little-endian float32 map with an ENVI sidecar header.
    #[arg(long)]
    out_float: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// One of grad-x, grad-y, grad-xy-mean, grad-up, grad-down, grad,
    /// grad-ud-mean, grad-all6, sobel-x, sobel-y, sobelxy.
    #[arg(long)]
    kind: BaselineKind,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    out_float: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PcaArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    components: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "bsq")]
    interleave: Interleave,
}

#[derive(Args, Debug)]
struct BinarizeArgs {
    /// Edge map: a PGM preview or a float32 map (raw file or its header).
    #[arg(long = "in")]
    input: PathBuf,
    /// Binary edge image (PGM, edges = 255).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Binary edge image (PGM, non-zero = edge).
    #[arg(long)]
    edges: PathBuf,
    /// Ground-truth edge image (PGM, non-zero = edge).
    #[arg(long)]
    truth: PathBuf,
    /// FOM scaling constant.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Also write the CSV (with header) to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    /// Binary edge image whose set pixels are left out.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = repro::CLUSTER_MAX_ITER)]
    max_iter: usize,
    /// Give masked pixels the label of their nearest unmasked neighbor.
    #[arg(long)]
    fill_masked: bool,
    /// Label image (PGM): masked = 0, label l = round((l + 1) * 255 / k).
    #[arg(long)]
    out: PathBuf,
    /// Centroid CSV (`label,b0,b1,...`).
    #[arg(long)]
    centroids: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BandsensArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    bins: usize,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Pipeline {
    /// FAC/MC/FOM for every metric under mean and median aggregation.
    Table1,
    /// Median-EU against the gradient and Sobel baselines.
    Baselines,
    /// 3x3 versus 7x7 Median-FRACT under random per-band noise.
    Noise,
    /// Otsu-positive pixel counts for growing windows.
    Windows,
    /// Edge strength and detection after block downsampling.
    Downsample,
    /// Edge sets before and after PCA projection.
    Pca,
    /// k-means errors with and without edge masking.
    Cluster,
}

#[derive(Args, Debug)]
struct ReproArgs {
    #[arg(value_enum)]
    pipeline: Pipeline,
    /// Number of seeds (0, 1, ...) for the seeded pipelines.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// CSV output (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_window(s: &str) -> Result<usize, String> {
    let w: usize = s.parse().map_err(|_| format!("'{s}' is not a window size"))?;
    if w < 3 || w.is_multiple_of(2) {
        return Err(format!("window must be odd and at least 3, got {w}"));
    }
    Ok(w)
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<lss_core::Error> for Failure {
    fn from(e: lss_core::Error) -> Self {
        match e {
            lss_core::Error::InvalidParameter(_) | lss_core::Error::Parse(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match cli.threads {
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(t) => with_threads(t, || run(cli.command, &argv)),
        None => run(cli.command, &argv),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, argv: &[String]) -> Outcome {
    let mut m = Manifest::new(argv);
    match command {
        Command::Info { cube } => info(&cube),
        Command::Synth(a) => synth(a, &mut m),
        Command::Noise(a) => noise(a, &mut m),
        Command::Downsample(a) => downsample_cmd(a, &mut m),
        Command::Edges(a) => edges(a, &mut m),
        Command::Baseline(a) => baseline(a, &mut m),
        Command::Pca(a) => pca(a, &mut m),
        Command::Binarize(a) => binarize(a, &mut m),
        Command::Eval(a) => eval(a, &mut m),
        Command::Cluster(a) => cluster(a, &mut m),
        Command::Bandsens(a) => bandsens(a, &mut m),
        Command::Repro(a) => repro_cmd(a, &mut m),
    }?;
    m.write()?;
    Ok(())
}

fn read_cube(path: &Path) -> Result<Cube32, Failure> {
    Ok(read_envi(envi_paths(path).0)?)
}

fn read_mask(path: &Path) -> Result<Mask, Failure> {
    Ok(Mask::read_pgm(path)?)
}

fn info(path: &Path) -> Outcome {
    let cube = read_cube(path)?;
    println!("rows: {}", cube.rows());
    println!("cols: {}", cube.cols());
    println!("bands: {}", cube.bands());
    println!("interleave: {}", cube.interleave());
    match cube.wavelengths() {
        Some(w) if !w.is_empty() => println!("wavelengths: {} .. {}", w[0], w[w.len() - 1]),
        _ => println!("wavelengths: none"),
    }
    Ok(())
}

fn synth(a: SynthArgs, m: &mut Manifest) -> Outcome {
    let mut spec: SceneSpec = match &a.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            m.input(path, false);
            serde_json::from_str(&text).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?
        }
        None => match a.preset {
            Preset::Boundary => repro::boundary_scene(a.mix),
            Preset::Vertical => repro::vertical_scene(a.mix),
            Preset::Strip => repro::strip_scene(a.mix),
            Preset::ThreeRegion => repro::three_region_scene(),
        },
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    if let Some(j) = a.jitter {
        spec.jitter = j;
    }
    let (cube, truth) = synth_scene::<f32>(&spec)?;
    write_envi(&cube, &a.out, a.interleave)?;
    truth.mask.write_pgm(&a.truth)?;
    m.seed(spec.seed)
        .config("rows", spec.rows)
        .config("cols", spec.cols)
        .config("bands", spec.bands)
        .config("regions", spec.regions.len())
        .config("boundary_mix_width", spec.boundary_mix_width)
        .config("jitter", spec.jitter)
        .config("interleave", a.interleave)
        .output(&a.out, true)
        .output(&a.truth, false);
    if a.spec.is_none() {
        m.config("preset", format!("{:?}", a.preset).to_lowercase());
    }
    Ok(())
}

fn noise(a: NoiseArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?;
    let noisy = add_gaussian_noise(&cube, a.max_variance, a.seed)?;
    write_envi(&noisy, &a.out, cube.interleave())?;
    m.seed(a.seed)
        .config("max_variance", a.max_variance)
        .input(&a.input, true)
        .output(&a.out, true);
    Ok(())
}

fn downsample_cmd(a: DownsampleArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?;
    let small = downsample(&cube, a.factor)?;
    write_envi(&small, &a.out, cube.interleave())?;
    m.config("factor", a.factor).input(&a.input, true).output(&a.out, true);
    if let (Some(truth), Some(out)) = (&a.truth, &a.truth_out) {
        let gt = GroundTruthEdges::new(read_mask(truth)?);
        gt.downsample(a.factor)?.mask.write_pgm(out)?;
        m.input(truth, false).output(out, false);
    }
    Ok(())
}

fn write_edge_map(map: &EdgeMap32, out: &Option<PathBuf>, out_float: &Option<PathBuf>, m: &mut Manifest) -> Outcome {
    if out.is_none() && out_float.is_none() {
        return Err(Failure::Usage("give --out and/or --out-float".into()));
    }
    if let Some(p) = out {
        map.write_pgm(p)?;
        m.output(p, false);
    }
    if let Some(p) = out_float {
        map.write_f32(p)?;
        m.output(p, true);
    }
    Ok(())
}

fn edges(a: EdgesArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?;
    let excluded = a.exclude_bands.as_deref().map(parse_band_list).transpose()?;
    let mut config = LssConfig::new(a.window, a.metric, a.agg).with_padding(a.pad);
    if let Some(k) = &a.kernel {
        config = config.with_kernel(k.clone());
    }
    let map = edge_map(&cube, &config, excluded.as_deref())?;
    m.config("metric", a.metric)
        .config("aggregator", a.agg)
        .config("window", a.window)
        .config("padding", a.pad)
        .config("exclude_bands", a.exclude_bands.as_deref().unwrap_or(""))
        .input(&a.input, true);
    if let Some(k) = &a.kernel {
        m.config("kernel", k.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","));
    }
    write_edge_map(&map, &a.out, &a.out_float, m)
}

fn baseline(a: BaselineArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?;
    let map = baseline_edge_map(&cube, a.kind)?;
    m.config("kind", a.kind).input(&a.input, true);
    write_edge_map(&map, &a.out, &a.out_float, m)
}

fn pca(a: PcaArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?.cast::<f64>();
    let model = pca_fit(&cube, a.components)?;
    let projected = pca_project(&cube, &model)?;
    write_envi(&projected.cast::<f32>(), &a.out, a.interleave)?;
    let total: f64 = model.explained_variance.iter().sum();
    println!("component,explained_variance");
    for (i, v) in model.explained_variance.iter().enumerate() {
        println!("{i},{v:.6e}");
    }
    m.config("components", a.components)
        .config("explained_variance_total", total)
        .input(&a.input, true)
        .output(&a.out, true);
    Ok(())
}

fn read_edge_map(path: &Path) -> Result<(EdgeMap32, bool), Failure> {
    let is_pgm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    if is_pgm {
        Ok((EdgeMap32::from_gray(&lss_core::pgm::read_pgm(path)?), false))
    } else {
        Ok((EdgeMap32::read_f32(path)?, true))
    }
}

fn binarize(a: BinarizeArgs, m: &mut Manifest) -> Outcome {
    let (map, float) = read_edge_map(&a.input)?;
    let BinaryEdgeMap { mask, threshold, degenerate } = otsu_threshold(&map);
    mask.write_pgm(&a.out)?;
    if degenerate {
        eprintln!("warning: constant edge map, no threshold; output is empty");
    } else {
        eprintln!("threshold: {threshold}");
    }
    println!("edge_pixels: {}", mask.count());
    m.config("method", "otsu")
        .config("threshold", threshold)
        .config("degenerate", degenerate)
        .input(&a.input, float)
        .output(&a.out, false);
    Ok(())
}

fn eval(a: EvalArgs, m: &mut Manifest) -> Outcome {
    if !(a.alpha.is_finite() && a.alpha > 0.0) {
        return Err(Failure::Usage(format!("--alpha must be positive, got {}", a.alpha)));
    }
    let actual = BinaryEdgeMap::from_mask(read_mask(&a.edges)?);
    let truth = GroundTruthEdges::new(read_mask(&a.truth)?);
    let report = evaluate(&actual, &truth, a.alpha)?;
    println!("{}", report.csv_row());
    eprintln!("{report}");
    m.config("alpha", a.alpha).input(&a.edges, false).input(&a.truth, false);
    if let Some(out) = &a.out {
        fs::write(out, format!("{}\n{}\n", lss_core::EvalReport::CSV_HEADER, report.csv_row()))?;
        m.output(out, false);
    }
    Ok(())
}

fn cluster(a: ClusterArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?;
    let mask = a.mask.as_deref().map(read_mask).transpose()?;
    let mut map = kmeans_cluster(&cube, a.k, mask.as_ref(), a.seed, a.max_iter)?;
    if a.fill_masked {
        map.fill_masked();
    }
    let img = Gray8 {
        rows: map.rows,
        cols: map.cols,
        pixels: map
            .labels
            .iter()
            .map(|&l| if l < 0 { 0 } else { ((l as f64 + 1.0) * 255.0 / a.k as f64).round() as u8 })
            .collect(),
    };
    write_pgm(&a.out, &img)?;
    eprintln!(
        "iterations: {}, converged: {}, objective: {:.6e}",
        map.iterations,
        map.converged,
        map.objective_history.last().copied().unwrap_or(f64::NAN)
    );
    m.seed(a.seed)
        .config("k", a.k)
        .config("max_iter", a.max_iter)
        .config("fill_masked", a.fill_masked)
        .config("iterations", map.iterations)
        .config("converged", map.converged)
        .input(&a.input, true)
        .output(&a.out, false);
    if let Some(p) = &a.mask {
        m.input(p, false);
    }
    if let Some(p) = &a.centroids {
        let mut csv = String::from("label");
        for b in 0..cube.bands() {
            csv.push_str(&format!(",b{b}"));
        }
        csv.push('\n');
        for (i, c) in map.centroids.iter().enumerate() {
            csv.push_str(&i.to_string());
            for v in c.iter() {
                csv.push_str(&format!(",{v}"));
            }
            csv.push('\n');
        }
        fs::write(p, csv)?;
        m.output(p, false);
    }
    Ok(())
}

fn emit(csv: &str, out: &Option<PathBuf>, m: &mut Manifest) -> Outcome {
    match out {
        Some(p) => {
            fs::write(p, csv)?;
            m.output(p, false);
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn bandsens(a: BandsensArgs, m: &mut Manifest) -> Outcome {
    let cube = read_cube(&a.input)?;
    let truth = GroundTruthEdges::new(read_mask(&a.truth)?);
    let nmi = band_mi_sensitivity(&cube, &truth, a.bins)?;
    let mut csv = String::from("band,nmi\n");
    for (b, v) in nmi.iter().enumerate() {
        csv.push_str(&format!("{b},{v:.6}\n"));
    }
    m.config("bins", a.bins).input(&a.input, true).input(&a.truth, false);
    emit(&csv, &a.out, m)
}

fn repro_cmd(a: ReproArgs, m: &mut Manifest) -> Outcome {
    let seeds: Vec<u64> = (0..a.seeds).collect();
    let csv = match a.pipeline {
        Pipeline::Table1 => repro::table1_csv(&repro::table1()?),
        Pipeline::Baselines => repro::baselines()?.to_csv(),
        Pipeline::Noise => repro::noise_csv(&repro::noise(&seeds, repro::NOISE_MAX_VARIANCE)?),
        Pipeline::Windows => {
            let mut s = String::from("window,edge_pixels\n");
            for (w, n) in repro::windows(&[3, 5, 7, 9])? {
                s.push_str(&format!("{w},{n}\n"));
            }
            s
        }
        Pipeline::Downsample => {
            let mut s = format!("factor,max_edge,{}\n", lss_core::EvalReport::CSV_HEADER);
            for r in repro::downsampling(&[1, 2, 4])? {
                s.push_str(&format!("{},{:.6},{}\n", r.factor, r.max_edge, r.report.csv_row()));
            }
            s
        }
        Pipeline::Pca => {
            let c = repro::pca(3)?;
            format!(
                "components,original_edges,projected_edges,identical\n3,{},{},{}\n",
                c.original.count(),
                c.projected.count(),
                c.identical()
            )
        }
        Pipeline::Cluster => repro::clustering_csv(&repro::clustering(&seeds)?),
    };
    m.config("pipeline", format!("{:?}", a.pipeline).to_lowercase());
    if matches!(a.pipeline, Pipeline::Noise | Pipeline::Cluster) {
        m.config("seeds", a.seeds);
    }
    emit(&csv, &a.out, m)
}

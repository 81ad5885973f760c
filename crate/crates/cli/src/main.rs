use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use stream_forest::bench::{
    effect_series, emit_results, holdout_split, load_results, parse_algorithms, run_cv_experiment,
    run_stream_experiment, Algorithm, ExperimentConfig, ResultsFile,
};
use stream_forest::data_io::{
    gen_synthetic, load_csv, save_csv, write_csv, CsvOptions, LabelColumn, LabelMap, SyntheticKind, SyntheticSpec,
};
use stream_forest::Dataset;

/// Benchmarks stream decision trees and forests against batch refits.
#[derive(Parser)]
#[command(name = "sfbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stream a training set in batches and score every model on a fixed test set.
    Stream(StreamArgs),
    /// Stream each k-fold training split and score on the held-out fold.
    Cv(CvArgs),
    /// Turn a results file into effect-size series.
    Effect(EffectArgs),
    /// Write a synthetic dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Training CSV.
    #[arg(long, required_unless_present = "synthetic")]
    data: Option<PathBuf>,
    /// Generate the data instead of loading it.
    #[arg(long, value_name = "KIND", conflicts_with = "data")]
    synthetic: Option<SyntheticKind>,
    /// CSV has a header row.
    #[arg(long, overrides_with = "no_header", default_value_t = true)]
    header: bool,
    /// CSV has no header row.
    #[arg(long = "no-header")]
    no_header: bool,
    /// Label column: index, name, or `last`.
    #[arg(long, default_value = "last")]
    label_col: LabelColumn,
    /// Declared number of classes; labels must then be integers below it.
    #[arg(long)]
    classes: Option<usize>,
    #[command(flatten)]
    synth: SynthShape,
}

#[derive(Args, Clone)]
struct SynthShape {
    /// Samples to generate.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// Feature count for blobs.
    #[arg(long, default_value_t = 2)]
    features: usize,
    /// Class count for blobs.
    #[arg(long = "synth-classes", default_value_t = 2)]
    synth_classes: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
}

#[derive(Args)]
struct RunArgs {
    /// Comma-separated subset of sdt,sdf,dt,df.
    #[arg(long, default_value = "sdt,sdf,dt,df")]
    algorithms: String,
    #[arg(long, default_value_t = 100)]
    batch_size: usize,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    /// Trees replaced per replacement event.
    #[arg(long, default_value_t = 1)]
    replace: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Stop each run after this many batches.
    #[arg(long)]
    max_batches: Option<usize>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Name recorded in the dataset column; defaults to the file stem.
    #[arg(long)]
    name: Option<String>,
    /// Results file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Test CSV, read with the same options as the training data.
    #[arg(long)]
    test: Option<PathBuf>,
    /// Fraction held out as the test set when no test file is given.
    #[arg(long, default_value_t = 0.25)]
    test_fraction: f64,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct EffectArgs {
    /// Results file written by `stream` or `cv`.
    results: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "blobs")]
    kind: SyntheticKind,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    features: usize,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Omit the header row.
    #[arg(long = "no-header")]
    no_header: bool,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Loaded {
    dataset: Dataset,
    label_map: LabelMap,
    name: String,
}

impl DataArgs {
    fn csv_options(&self, n_classes: Option<usize>) -> CsvOptions {
        CsvOptions {
            has_header: self.header && !self.no_header,
            label_column: self.label_col.clone(),
            n_classes,
        }
    }

    fn load(&self) -> Result<Loaded> {
        if let Some(kind) = self.synthetic {
            let s = &self.synth;
            let spec = SyntheticSpec {
                kind,
                n_samples: s.samples,
                n_features: s.features,
                n_classes: s.synth_classes,
                noise: s.noise,
                seed: s.data_seed,
            };
            let dataset = gen_synthetic(&spec)?;
            let label_map = LabelMap::identity(dataset.n_classes());
            return Ok(Loaded {
                dataset,
                label_map,
                name: kind.to_string(),
            });
        }
        let path = self.data.as_ref().expect("clap requires --data or --synthetic");
        let loaded =
            load_csv(path, &self.csv_options(self.classes)).with_context(|| format!("loading {}", path.display()))?;
        Ok(Loaded {
            dataset: loaded.dataset,
            label_map: loaded.label_map,
            name: stem(path),
        })
    }

    /// Loads a test file whose labels must line up with the training classes.
    fn load_test(&self, path: &Path, train: &Loaded) -> Result<Dataset> {
        if self.classes.is_some() || self.synthetic.is_some() {
            let k = train.dataset.n_classes();
            return Ok(load_csv(path, &self.csv_options(Some(k)))
                .with_context(|| format!("loading {}", path.display()))?
                .dataset);
        }
        let loaded = load_csv(path, &self.csv_options(None)).with_context(|| format!("loading {}", path.display()))?;
        // remap through the training label dictionary
        let mut labels = Vec::with_capacity(loaded.dataset.n_samples());
        for &y in loaded.dataset.labels() {
            let text = &loaded.label_map.labels[y];
            match train.label_map.labels.iter().position(|l| l == text) {
                Some(k) => labels.push(k),
                None => bail!("test label {text:?} does not occur in the training data"),
            }
        }
        Ok(Dataset::new(
            loaded.dataset.features().to_vec(),
            labels,
            loaded.dataset.n_features(),
            train.dataset.n_classes(),
        )?)
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

impl RunArgs {
    fn config(&self, dataset: String, repetitions: usize, folds: usize) -> Result<ExperimentConfig> {
        let config = ExperimentConfig {
            dataset: self.name.clone().unwrap_or(dataset),
            algorithms: parse_algorithms(&self.algorithms)?,
            batch_size: self.batch_size,
            n_trees: self.trees,
            replace_count: self.replace,
            repetitions,
            folds,
            seed: self.seed,
            threads: self.threads,
            max_batches: self.max_batches,
        };
        config.validate()?;
        Ok(config)
    }
}

fn results_file(
    records: Vec<stream_forest::bench::BenchRecord>,
    protocol: &str,
    config: &ExperimentConfig,
) -> ResultsFile {
    let algorithms: Vec<&str> = config.algorithms.iter().map(|a| a.as_str()).collect();
    let (runs_key, runs) = match protocol {
        "cv" => ("folds", config.folds),
        _ => ("repetitions", config.repetitions),
    };
    ResultsFile::new(records)
        .with_meta("protocol", protocol)
        .with_meta("dataset", &config.dataset)
        .with_meta("algorithms", algorithms.join(","))
        .with_meta("batch_size", config.batch_size)
        .with_meta("n_trees", config.n_trees)
        .with_meta("replace_count", config.replace_count)
        .with_meta(runs_key, runs)
        .with_meta("seed", config.seed)
        .with_meta(
            "max_batches",
            config.max_batches.map_or_else(|| "all".to_string(), |m| m.to_string()),
        )
}

fn write_results(file: &ResultsFile, out: Option<&Path>, label_map: &LabelMap) -> Result<()> {
    match out {
        Some(path) => {
            emit_results(file, path).with_context(|| format!("writing {}", path.display()))?;
            let mut sidecar = path.as_os_str().to_owned();
            sidecar.push(".labels.json");
            label_map.save(PathBuf::from(sidecar))?;
        }
        None => file.write(std::io::stdout().lock())?,
    }
    Ok(())
}

fn stream(args: &StreamArgs) -> Result<()> {
    let train = args.data.load()?;
    let (train_set, test_set) = match &args.test {
        Some(path) => {
            let test = args.data.load_test(path, &train)?;
            (train.dataset.clone(), test)
        }
        None => holdout_split(&train.dataset, args.test_fraction, args.run.seed)?,
    };
    let config = args.run.config(train.name.clone(), args.reps, 5)?;
    let records = run_stream_experiment(&config, &train_set, &test_set)?;
    let file = results_file(records, "stream", &config)
        .with_meta("n_train", train_set.n_samples())
        .with_meta("n_test", test_set.n_samples());
    write_results(&file, args.run.out.as_deref(), &train.label_map)
}

fn cv(args: &CvArgs) -> Result<()> {
    let data = args.data.load()?;
    let config = args.run.config(data.name.clone(), 1, args.folds)?;
    let records = run_cv_experiment(&config, &data.dataset)?;
    let file = results_file(records, "cv", &config).with_meta("n_samples", data.dataset.n_samples());
    write_results(&file, args.run.out.as_deref(), &data.label_map)
}

fn effect(args: &EffectArgs) -> Result<()> {
    let results = load_results(&args.results).with_context(|| format!("reading {}", args.results.display()))?;
    let series = effect_series(&results.records)?;
    if series.is_empty() {
        bail!("results need both {} and {} records", Algorithm::Sdf, Algorithm::Df);
    }
    let mut out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    writeln!(
        out,
        "dataset,batch,sample_size,sdf_mean,df_mean,effect_size,substantial_shift"
    )?;
    for s in &series {
        for p in &s.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                s.dataset, p.batch, p.sample_size, p.stream_mean, p.batch_mean, p.effect_size, s.substantial_shift
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    let spec = SyntheticSpec {
        kind: args.kind,
        n_samples: args.n,
        n_features: args.features,
        n_classes: args.classes,
        noise: args.noise,
        seed: args.seed,
    };
    let data = gen_synthetic(&spec)?;
    match &args.out {
        Some(path) => save_csv(&data, path, !args.no_header).with_context(|| format!("writing {}", path.display()))?,
        None => write_csv(&data, std::io::stdout().lock(), !args.no_header)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Stream(a) => stream(a),
        Command::Cv(a) => cv(a),
        Command::Effect(a) => effect(a),
        Command::Synth(a) => synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sfbench: {e:#}");
            ExitCode::FAILURE
        }
    }
}

//! Command-line front end: `sweep`, `calibrate`, `estimate`, `experiment`.
//!
//! Exit codes: 0 success, 2 config or schema error, 3 numerical or fit
//! failure, 4 I/O error. Every command is deterministic for a fixed seed and
//! records a [`RunManifest`] next to its outputs.

use std::fs;
use std::io::{BufWriter, Read};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bundle::{ModelBundle, DEFAULT_DT, DEFAULT_K};
use crate::characterize::{calibrate, ingest_log, synthesize_sweep, write_log};
use crate::error::{Error, Result};
use crate::estimate::{extract_features, TiltFilter, WheelFilter};
use crate::sensor_sim::{AdcReading, DofKind, SensorSpec, TiltSensorSpec, WheelGeometry, WheelSensorSpec, Wiper};
use crate::trajectory::{presets, run_experiment, write_readings, write_trace, ExperimentConfig};

/// Provenance echoed into every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub seed: Option<u64>,
    /// SHA-256 of the configuration and input bytes, hex encoded.
    pub config_hash: String,
}

fn hash_parts(parts: &[&[u8]]) -> String {
    let mut hasher = Sha256::new();
    for p in parts {
        hasher.update((p.len() as u64).to_le_bytes());
        hasher.update(p);
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Wheel,
    Tilt,
}

impl From<KindArg> for DofKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Wheel => DofKind::Wheel,
            KindArg::Tilt => DofKind::Tilt,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "paintpot", version, about = "PaintPot characterization and estimation toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a characterization sweep and write the calibration log.
    Sweep(SweepArgs),
    /// Fit characterization curves to a calibration log.
    Calibrate(CalibrateArgs),
    /// Run the filter over a readings log.
    Estimate(EstimateArgs),
    /// Run a closed-loop tracking experiment.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sensor spec JSON; the reference sensor of `--kind` is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 14.0)]
    pub rate_hz: f64,
    #[arg(long, default_value_t = 50.0)]
    pub duration_s: f64,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Calibration log, `t,theta,v0[,v1]`.
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Wheel sensor spec whose gap intervals should be used.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 1023)]
    pub adc_max: u32,
    /// Transmission ratio stored in the filter settings.
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: f64,
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Readings log, `t,v0[,v1],omega`.
    pub input: PathBuf,
    /// Model bundle written by `calibrate`.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment JSON, or the name of a bundled experiment.
    #[arg(long)]
    pub config: String,
    /// Output prefix; writes `<out>.csv`, `<out>.readings.csv`, `<out>.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    fs::File::open(path).map_err(with_path(path))?.read_to_end(&mut buf).map_err(with_path(path))?;
    Ok(buf)
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(path).map_err(with_path(path))?))
}

fn display(path: &Path) -> String {
    path.display().to_string()
}

fn sidecar(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(with_path(path))?;
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<RunManifest> {
    let (spec, config_bytes) = match &args.config {
        Some(path) => {
            let bytes = read_bytes(path)?;
            let spec: SensorSpec = serde_json::from_slice(&bytes)?;
            if let Some(kind) = args.kind {
                if spec.kind() != DofKind::from(kind) {
                    return Err(Error::Config(format!("--kind {kind:?} does not match the spec file")));
                }
            }
            (spec, bytes)
        }
        None => {
            let spec = match args.kind {
                Some(KindArg::Tilt) => SensorSpec::Tilt(TiltSensorSpec::reference()),
                Some(KindArg::Wheel) => SensorSpec::Wheel(WheelSensorSpec::reference()),
                None => return Err(Error::Config("sweep needs --config or --kind".into())),
            };
            let bytes = serde_json::to_vec(&spec)?;
            (spec, bytes)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let dataset = synthesize_sweep(&spec, args.rate_hz, args.duration_s, &mut rng)?;
    let out = create(&args.out)?;
    write_log(&dataset, out)?;

    let settings = format!("{}:{}", args.rate_hz, args.duration_s);
    let manifest = RunManifest {
        command: "sweep".into(),
        inputs: args.config.iter().map(|p| display(p)).collect(),
        outputs: vec![display(&args.out)],
        seed: Some(args.seed),
        config_hash: hash_parts(&[&config_bytes, settings.as_bytes()]),
    };
    write_json(&sidecar(&args.out), &manifest)?;
    Ok(manifest)
}

fn load_geometry(path: Option<&PathBuf>) -> Result<(WheelGeometry, Vec<u8>)> {
    match path {
        None => Ok((WheelGeometry::default(), Vec::new())),
        Some(p) => {
            let bytes = read_bytes(p)?;
            match serde_json::from_slice::<SensorSpec>(&bytes)? {
                SensorSpec::Wheel(w) => Ok((*w.geometry(), bytes)),
                SensorSpec::Tilt(_) => Ok((WheelGeometry::default(), bytes)),
            }
        }
    }
}

pub fn cmd_calibrate(args: &CalibrateArgs) -> Result<ModelBundle> {
    let input = read_bytes(&args.input)?;
    let (geometry, config_bytes) = load_geometry(args.config.as_ref())?;
    let dataset = ingest_log(input.as_slice(), args.kind.into(), args.adc_max)?;
    let cal = calibrate(&dataset, &geometry)?;
    let mut bundle = ModelBundle::from_calibration(&cal, &geometry, args.k, args.dt);
    let mut inputs = vec![display(&args.input)];
    inputs.extend(args.config.iter().map(|p| display(p)));
    let settings = format!("{}:{}:{}", args.adc_max, args.k, args.dt);
    bundle.manifest = Some(RunManifest {
        command: "calibrate".into(),
        inputs,
        outputs: vec![display(&args.out)],
        seed: None,
        config_hash: hash_parts(&[&input, &config_bytes, settings.as_bytes()]),
    });
    write_json(&args.out, &bundle)?;
    Ok(bundle)
}

/// One row of a readings log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadingsRow {
    pub t: f64,
    pub readings: [AdcReading; 2],
    pub omega: f64,
}

/// Parses `t,v0[,v1],omega`; blank counts mean the wiper was unavailable.
pub fn parse_readings<R: Read>(source: R, kind: DofKind) -> Result<Vec<ReadingsRow>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (t_col, v0_col, omega_col) = match (column("t"), column("v0"), column("omega")) {
        (Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(Error::Schema("readings log needs columns t, v0 and omega".into())),
    };
    let v1_col = column("v1");
    if kind == DofKind::Wheel && v1_col.is_none() {
        return Err(Error::Schema("wheel readings log needs a v1 column".into()));
    }
    let mut rows: Vec<ReadingsRow> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| match e.position() {
            Some(p) => Error::Row { row: p.line(), message: e.to_string() },
            None => Error::Csv(e),
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let real = |col: usize, name: &str| -> Result<f64> {
            record[col]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Row { row, message: format!("{name} = {:?} is not a number", &record[col]) })
        };
        let count = |col: Option<usize>, wiper: Wiper| -> Result<AdcReading> {
            let Some(col) = col else { return Ok(AdcReading::unavailable(wiper)) };
            let cell = &record[col];
            if cell.is_empty() {
                return Ok(AdcReading::unavailable(wiper));
            }
            cell.parse::<u32>()
                .map(|c| AdcReading::valid(wiper, c))
                .map_err(|_| Error::Row { row, message: format!("count {cell:?} is not a non-negative integer") })
        };
        let t = real(t_col, "t")?;
        if let Some(prev) = rows.last() {
            if t <= prev.t {
                return Err(Error::Row { row, message: format!("timestamp {t} does not increase") });
            }
        }
        let readings = [count(Some(v0_col), Wiper::Zero)?, count(v1_col.filter(|_| kind == DofKind::Wheel), Wiper::One)?];
        rows.push(ReadingsRow { t, readings, omega: real(omega_col, "omega")? });
    }
    if rows.is_empty() {
        return Err(Error::Schema("readings log has no rows".into()));
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub t: f64,
    pub mu: f64,
    pub sigma: f64,
    pub used: [bool; 2],
}

/// Runs the bundle's filter over a readings log. The first row initializes
/// the filter; each later row is predicted with the previous row's `omega`.
pub fn run_estimator(bundle: &ModelBundle, rows: &[ReadingsRow]) -> Result<Vec<TraceRow>> {
    let first = rows.first().ok_or_else(|| Error::Schema("readings log has no rows".into()))?;
    let tuning = bundle.filter.tuning();
    let mut trace = Vec::with_capacity(rows.len());
    match bundle.sensor_kind {
        DofKind::Wheel => {
            let obs = bundle.wheel_observation()?;
            let mut used = [false; 2];
            for f in extract_features(&first.readings, &obs) {
                used[f.wiper.index()] = true;
            }
            let mut filter = WheelFilter::new(obs, tuning, &first.readings)?;
            let b = filter.belief();
            trace.push(TraceRow { t: first.t, mu: b.mu, sigma: b.sigma, used });
            for pair in rows.windows(2) {
                let out = filter.step(pair[0].omega, pair[1].t - pair[0].t, &pair[1].readings)?;
                trace.push(TraceRow { t: pair[1].t, mu: out.belief.mu, sigma: out.belief.sigma, used: out.used });
            }
        }
        DofKind::Tilt => {
            let mut filter = TiltFilter::new(bundle.tilt_observation()?, tuning, &first.readings[0])?;
            let b = filter.belief();
            trace.push(TraceRow { t: first.t, mu: b.mu, sigma: b.sigma, used: [true, false] });
            for pair in rows.windows(2) {
                let out = filter.step(pair[0].omega, pair[1].t - pair[0].t, &pair[1].readings[0])?;
                trace.push(TraceRow { t: pair[1].t, mu: out.belief.mu, sigma: out.belief.sigma, used: out.used });
            }
        }
    }
    Ok(trace)
}

pub fn cmd_estimate(args: &EstimateArgs) -> Result<Vec<TraceRow>> {
    let bundle_bytes = read_bytes(&args.config)?;
    let bundle: ModelBundle = serde_json::from_slice(&bundle_bytes)?;
    let input = read_bytes(&args.input)?;
    let rows = parse_readings(input.as_slice(), bundle.sensor_kind)?;
    let trace = run_estimator(&bundle, &rows)?;

    let mut w = csv::Writer::from_writer(create(&args.out)?);
    w.write_record(["t", "mu", "sigma", "f0_avail", "f1_avail"])?;
    for r in &trace {
        w.write_record([
            r.t.to_string(),
            r.mu.to_string(),
            r.sigma.to_string(),
            u8::from(r.used[0]).to_string(),
            u8::from(r.used[1]).to_string(),
        ])?;
    }
    w.flush()?;

    let manifest = RunManifest {
        command: "estimate".into(),
        inputs: vec![display(&args.input), display(&args.config)],
        outputs: vec![display(&args.out)],
        seed: None,
        config_hash: hash_parts(&[&bundle_bytes, &input]),
    };
    write_json(&sidecar(&args.out), &manifest)?;
    Ok(trace)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub name: String,
    pub seed: u64,
    pub steps: usize,
    pub avg_abs_error: f64,
    pub max_abs_error: f64,
    /// Steps on which each feature was not used.
    pub feature_dropouts: [usize; 2],
    pub config: ExperimentConfig,
    pub models: ModelBundle,
    pub manifest: RunManifest,
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

pub fn load_experiment(config: &str) -> Result<(ExperimentConfig, Vec<u8>)> {
    if let Some(text) = presets::source(config) {
        return Ok((serde_json::from_str(text)?, text.as_bytes().to_vec()));
    }
    let bytes = read_bytes(Path::new(config))?;
    Ok((serde_json::from_slice(&bytes)?, bytes))
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<ExperimentSummary> {
    let (mut config, bytes) = load_experiment(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let result = run_experiment(&config)?;

    let trace_path = with_suffix(&args.out, ".csv");
    let readings_path = with_suffix(&args.out, ".readings.csv");
    let summary_path = with_suffix(&args.out, ".json");
    write_trace(&result, create(&trace_path)?)?;
    write_readings(&result, create(&readings_path)?)?;

    let dropouts = |i: usize| result.rows.iter().filter(|r| ![r.f0_avail, r.f1_avail][i]).count();
    let summary = ExperimentSummary {
        name: config.name.clone(),
        seed: config.seed,
        steps: result.rows.len(),
        avg_abs_error: result.avg_abs_error,
        max_abs_error: result.max_abs_error,
        feature_dropouts: [dropouts(0), dropouts(1)],
        models: result.bundle.clone(),
        manifest: RunManifest {
            command: "experiment".into(),
            inputs: vec![args.config.clone()],
            outputs: vec![display(&trace_path), display(&readings_path), display(&summary_path)],
            seed: Some(config.seed),
            config_hash: hash_parts(&[&bytes, &config.seed.to_le_bytes()]),
        },
        config,
    };
    write_json(&summary_path, &summary)?;
    Ok(summary)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(a) => cmd_sweep(a).map(|_| ()),
        Command::Calibrate(a) => cmd_calibrate(a).map(|_| ()),
        Command::Estimate(a) => cmd_estimate(a).map(|_| ()),
        Command::Experiment(a) => {
            let s = cmd_experiment(a)?;
            println!("{}: avg_abs_error = {:.4} rad, max_abs_error = {:.4} rad", s.name, s.avg_abs_error, s.max_abs_error);
            Ok(())
        }
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

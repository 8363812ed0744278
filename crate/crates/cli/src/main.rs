//! Command-line front end: every pipeline stage behind one binary, emitting
//! plot-ready CSV/JSON. Exit codes: 0 success, 2 configuration error,
//! 3 runtime error.

use clap::{Args, Parser, Subcommand};
use readmi::ldpc::alist::save_code;
use readmi::ldpc::DegreeDistribution;
use readmi::mi::{mi_derivative_three_reads, mi_derivative_two_reads};
use readmi::util::fnv1a64;
use readmi::{
    bch_fer_analytic, bch_fer_mc, crossover_probabilities, de_threshold_awgn, de_threshold_bsc,
    de_threshold_dmc, mutual_information, run_fer_with_code, sweep, BitLabeling, ChannelModel,
    ChannelSpec, DeConfig, QuantSpec, SimConfig, SweepPoint, ThresholdResult,
};
use serde::Deserialize;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "readmi", version, about = "Read-threshold optimization and LDPC validation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep mutual information (and its derivative where analytic) over a
    /// symmetric erasure half-width grid
    MiSweep(MiSweepArgs),
    /// Optimize read thresholds under a strategy and print the scheme
    Optimize(OptimizeArgs),
    /// Density-evolution decoding threshold for a degree distribution
    De(DeArgs),
    /// Construct a PEG/ACE LDPC code and save it as alist + metadata
    Construct(ConstructArgs),
    /// Monte Carlo frame-error-rate run(s) from a JSON config
    Fer(FerArgs),
    /// Analytic (and optional Monte Carlo) BCH bounded-distance FER sweep
    BchFer(BchFerArgs),
}

#[derive(Args)]
struct MiSweepArgs {
    /// channel model JSON file
    #[arg(long)]
    model: PathBuf,
    /// number of symmetric reads (2 or 3)
    #[arg(long)]
    reads: u8,
    /// grid as [q:]lo:hi:step
    #[arg(long)]
    param: String,
    /// output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long)]
    model: PathBuf,
    /// hard | symmetric-q | single-q | cr | unconstrained
    #[arg(long)]
    strategy: String,
    #[arg(long, default_value_t = 2)]
    reads: u8,
    /// constant-ratio search grid as lo:hi:step
    #[arg(long, default_value = "1.0:12.0:0.25")]
    r_grid: String,
    /// threshold count for the unconstrained search
    #[arg(long, default_value_t = 6)]
    num_thresholds: usize,
    /// candidate grid resolution for the unconstrained search
    #[arg(long, default_value_t = 2001)]
    grid_points: usize,
    /// write the QuantizationScheme JSON here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DeArgs {
    /// built-in degree profile id (1|2|3) or a JSON file
    #[arg(long)]
    dd: String,
    /// awgn | bsc | dmc:<family.json>
    #[arg(long)]
    channel: String,
    #[arg(long, default_value_t = 4096)]
    bins: usize,
    #[arg(long, default_value_t = 30.0)]
    llr_range: f64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    target_error: f64,
    /// write the (parameter, iterations) probe trace CSV here
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long)]
    dd: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    d_ace: usize,
    #[arg(long, default_value_t = 4)]
    eta_ace: usize,
    /// output stem; writes <stem>.alist and <stem>.json
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FerArgs {
    /// SimConfig JSON, or {"points": [{"axis": .., "config": SimConfig}, ..]}
    #[arg(long)]
    config: PathBuf,
    /// overrides the seed(s) in the config
    #[arg(long)]
    seed: Option<u64>,
    /// output stem for the resumable CSV + manifest
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BchFerArgs {
    #[arg(long, default_value_t = readmi::BCH_N)]
    n: usize,
    #[arg(long, default_value_t = readmi::BCH_T)]
    t: usize,
    /// crossover probability grid as lo:hi:step
    #[arg(long)]
    p: String,
    /// also run Monte Carlo with this many trials per point
    #[arg(long)]
    mc_trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn config(msg: impl Into<String>) -> CliError {
        CliError { code: 2, msg: msg.into() }
    }
    fn runtime(msg: impl Into<String>) -> CliError {
        CliError { code: 3, msg: msg.into() }
    }
}

impl From<readmi::Error> for CliError {
    fn from(e: readmi::Error) -> CliError {
        use readmi::Error::*;
        let code = match e {
            InvalidModel(_) | NonAscendingThresholds | NegativeQ(_) | GridTooCoarse(_)
            | InfeasibleDegrees(_) | MessageLength { .. } | LlrLength { .. }
            | InvalidConfig(_) | MalformedAlist(_) | Json(_) => 2,
            _ => 3,
        };
        CliError { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> CliError {
        CliError::runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::MiSweep(a) => mi_sweep(a),
        Cmd::Optimize(a) => optimize(a),
        Cmd::De(a) => de(a),
        Cmd::Construct(a) => construct(a),
        Cmd::Fer(a) => fer(a),
        Cmd::BchFer(a) => bch_fer(a),
    }
}

/// Parses "[name:]lo:hi:step" into an inclusive grid; lo > hi gives an
/// empty grid.
fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: &[&str] = match parts.len() {
        3 => &parts[..],
        4 => &parts[1..],
        _ => return Err(CliError::config(format!("grid {spec:?} is not [name:]lo:hi:step"))),
    };
    let mut vals = [0.0f64; 3];
    for (v, s) in vals.iter_mut().zip(nums) {
        *v = s.parse().map_err(|_| CliError::config(format!("bad grid number {s:?}")))?;
    }
    let (lo, hi, step) = (vals[0], vals[1], vals[2]);
    if !(step > 0.0) {
        return Err(CliError::config("grid step must be positive"));
    }
    let mut grid = Vec::new();
    let mut i = 0u64;
    loop {
        let x = lo + i as f64 * step;
        if x > hi + step * 1e-9 {
            break;
        }
        grid.push(x);
        i += 1;
    }
    Ok(grid)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let file = File::open(path)
        .map_err(|e| CliError::config(format!("cannot open {}: {e}", path.display())))?;
    serde_json::from_reader(file)
        .map_err(|e| CliError::config(format!("bad JSON in {}: {e}", path.display())))
}

/// Opens a CSV writer with the provenance comment header every emitted CSV
/// carries: tool version and an FNV-1a hash of the originating config.
fn csv_with_provenance(path: &Path, config: &str) -> Result<csv::Writer<File>, CliError> {
    let mut file = File::create(path)?;
    writeln!(file, "# tool: readmi v{}", env!("CARGO_PKG_VERSION"))?;
    writeln!(file, "# config: {:016x}", fnv1a64(config.as_bytes()))?;
    Ok(csv::Writer::from_writer(file))
}

fn load_dd(spec: &str) -> Result<DegreeDistribution, CliError> {
    match spec {
        "1" | "2" | "3" => Ok(DegreeDistribution::builtin(spec.parse().unwrap())?),
        path => load_json(Path::new(path)),
    }
}

fn mi_sweep(a: MiSweepArgs) -> Result<(), CliError> {
    let spec: ChannelSpec = load_json(&a.model)?;
    let model = spec.build()?;
    let grid = parse_grid(&a.param)?;
    let deriv: Option<fn(&ChannelModel, f64) -> readmi::Result<f64>> = match a.reads {
        2 => Some(mi_derivative_two_reads),
        3 => Some(mi_derivative_three_reads),
        _ => return Err(CliError::config("mi-sweep supports 2 or 3 reads")),
    };
    let config = format!("mi-sweep reads={} param={} model={:?}", a.reads, a.param, spec);
    let mut w = csv_with_provenance(&a.out, &config)?;
    w.write_record(["q", "mi_bits", "di_dq"])?;
    for &q in &grid {
        // q = 0 collapses every read onto the midpoint: a single hard read
        let thresholds: Vec<f64> = if q == 0.0 {
            vec![0.0]
        } else if a.reads == 2 {
            vec![-q, q]
        } else {
            vec![-q, 0.0, q]
        };
        let mi = mutual_information(&crossover_probabilities(&model, &thresholds)?);
        let d = deriv
            .and_then(|f| f(&model, q).ok())
            .map(|d| d.to_string())
            .unwrap_or_default();
        w.write_record([q.to_string(), mi.to_string(), d])?;
    }
    w.flush().map_err(std::io::Error::from)?;
    println!("wrote {} rows to {}", grid.len(), a.out.display());
    Ok(())
}

fn optimize(a: OptimizeArgs) -> Result<(), CliError> {
    let spec: ChannelSpec = load_json(&a.model)?;
    let model = spec.build()?;
    let quant = match a.strategy.as_str() {
        "hard" => QuantSpec::Hard,
        "symmetric-q" => QuantSpec::MmiSymmetricQ { reads: a.reads },
        "single-q" => QuantSpec::MmiSingleQ,
        "cr" => QuantSpec::BestConstantRatio { r_grid: parse_grid(&a.r_grid)? },
        "unconstrained" => QuantSpec::Unconstrained {
            num_thresholds: a.num_thresholds,
            grid_points: a.grid_points,
        },
        s => return Err(CliError::config(format!("unknown strategy {s:?}"))),
    };
    let scheme = quant.resolve(&model)?;
    println!("strategy: {:?}", scheme.strategy);
    println!("achieved MI: {:.9} bits", scheme.achieved_mi);
    for (i, t) in scheme.thresholds.iter().enumerate() {
        println!("threshold[{i}] = {t:+.8e} V");
    }
    if let Some(out) = &a.out {
        serde_json::to_writer_pretty(File::create(out)?, &scheme)
            .map_err(|e| CliError::runtime(e.to_string()))?;
        println!("scheme JSON written to {}", out.display());
    }
    Ok(())
}

/// Degradation family for `de --channel dmc:<file>`: a Gaussian channel spec
/// whose snr_db is swept, quantized per `quant` at each probe.
#[derive(Deserialize)]
struct DmcFamilyFile {
    channel: serde_json::Value,
    quant: QuantSpec,
    snr_lo: f64,
    snr_hi: f64,
}

fn de(a: DeArgs) -> Result<(), CliError> {
    let dd = load_dd(&a.dd)?;
    let cfg = DeConfig {
        llr_range: a.llr_range,
        num_bins: a.bins,
        max_de_iters: a.max_iters,
        target_error: a.target_error,
    };
    let (res, kind): (ThresholdResult, &str) = if a.channel == "awgn" {
        (de_threshold_awgn(&dd, &cfg)?, "awgn")
    } else if a.channel == "bsc" {
        (de_threshold_bsc(&dd, &cfg)?, "bsc")
    } else if let Some(path) = a.channel.strip_prefix("dmc:") {
        let fam: DmcFamilyFile = load_json(Path::new(path))?;
        let channel = fam.channel.clone();
        let quant = fam.quant.clone();
        let family = move |param: f64| -> readmi::Result<(readmi::Dmc, BitLabeling)> {
            // param is a degradation measure, so sweep -snr_db
            let mut v = channel.clone();
            let obj = v.as_object_mut().ok_or_else(|| {
                readmi::Error::InvalidConfig("dmc family channel must be a JSON object".into())
            })?;
            obj.insert("snr_db".into(), serde_json::json!(-param));
            obj.remove("sigma");
            let spec: ChannelSpec = serde_json::from_value(v)?;
            let model = spec.build()?;
            let scheme = quant.resolve(&model)?;
            let dmc = crossover_probabilities(&model, &scheme.thresholds)?;
            let labeling = BitLabeling::gray(model.num_levels());
            Ok((dmc, labeling))
        };
        let mut res = de_threshold_dmc(&dd, family, -fam.snr_hi, -fam.snr_lo, &cfg)?;
        // report back in SNR terms
        res.snr_db = -res.threshold;
        (res, "dmc")
    } else {
        return Err(CliError::config("channel must be awgn, bsc, or dmc:<file>"));
    };
    let summary = serde_json::json!({
        "channel": kind,
        "threshold": res.threshold,
        "snr_db": res.snr_db,
        "monotone": res.monotone,
        "probes": res.probes.len(),
    });
    println!("{}", serde_json::to_string_pretty(&summary).map_err(|e| CliError::runtime(e.to_string()))?);
    if let Some(trace) = &a.trace {
        let config = format!("de dd={} channel={} bins={}", a.dd, a.channel, a.bins);
        let mut w = csv_with_provenance(trace, &config)?;
        w.write_record(["parameter", "iterations", "converged", "final_error"])?;
        for p in &res.probes {
            w.write_record([
                p.param.to_string(),
                p.iterations.to_string(),
                p.converged.to_string(),
                p.final_error.to_string(),
            ])?;
        }
        w.flush().map_err(std::io::Error::from)?;
        println!("probe trace written to {}", trace.display());
    }
    Ok(())
}

fn construct(a: ConstructArgs) -> Result<(), CliError> {
    let dd = load_dd(&a.dd)?;
    let code = readmi::ldpc::construct_peg_ace(&dd, a.n, a.seed, a.d_ace, a.eta_ace)?;
    save_code(&code, &a.out)?;
    let girth = code.metadata.as_ref().map(|m| m.girth);
    println!(
        "constructed n={} m={} k={} rate={:.4} girth={:?}",
        code.n,
        code.m,
        code.k(),
        code.rate(),
        girth
    );
    println!("saved to {}.alist (+ .json metadata)", a.out.display());
    Ok(())
}

/// A fer config file is either one SimConfig or a list of sweep points.
#[derive(Deserialize)]
#[serde(untagged)]
enum FerFile {
    Sweep { points: Vec<SweepPoint> },
    Single(Box<SimConfig>),
}

fn fer(a: FerArgs) -> Result<(), CliError> {
    let mut points = match load_json::<FerFile>(&a.config)? {
        FerFile::Sweep { points } => points,
        FerFile::Single(cfg) => vec![SweepPoint { axis: 0.0, config: *cfg }],
    };
    if let Some(seed) = a.seed {
        for p in &mut points {
            p.config.seed = seed;
        }
    }
    let results = if a.out.is_some() || points.len() > 1 {
        sweep(&points, a.out.as_deref())?
    } else {
        let code = points[0].config.code.resolve()?;
        vec![run_fer_with_code(&points[0].config, &code)?]
    };
    for r in &results {
        println!("{}", serde_json::to_string(r).map_err(|e| CliError::runtime(e.to_string()))?);
    }
    if let Some(out) = &a.out {
        println!("results persisted under stem {}", out.display());
    }
    Ok(())
}

fn bch_fer(a: BchFerArgs) -> Result<(), CliError> {
    let grid = parse_grid(&a.p)?;
    let config = format!(
        "bch-fer n={} t={} p={} mc_trials={:?} seed={}",
        a.n, a.t, a.p, a.mc_trials, a.seed
    );
    let mut w = csv_with_provenance(&a.out, &config)?;
    w.write_record(["p", "fer", "ci_low", "ci_high"])?;
    for &p in &grid {
        match a.mc_trials {
            None => {
                let fer = bch_fer_analytic(a.n, a.t, p)?;
                // analytic points carry a degenerate interval
                w.write_record([p.to_string(), fer.to_string(), fer.to_string(), fer.to_string()])?;
            }
            Some(trials) => {
                let mc = bch_fer_mc(a.n, a.t, p, trials, a.seed)?;
                w.write_record([
                    p.to_string(),
                    mc.fer.to_string(),
                    mc.ci_low.to_string(),
                    mc.ci_high.to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(std::io::Error::from)?;
    println!("wrote {} rows to {} (n={} t={})", grid.len(), a.out.display(), a.n, a.t);
    Ok(())
}

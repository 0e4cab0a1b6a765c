use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use gaitdrift::detector::{detect, DetectorConfig, DriftSeries, Weighting};
use gaitdrift::eval::sweep::write_sweep_csv;
use gaitdrift::eval::{run_sweep, score, EvalResult, ScoringMode, SweepSpec};
use gaitdrift::event_model::{load_event_log, LoadOptions, DEFAULT_DAY_LENGTH};
use gaitdrift::rank_stats::enumeration::check_exact_against_enumeration;
use gaitdrift::rank_stats::Alternative;
use gaitdrift::simulator::{FloorPlan, GroundTruth, Scenario, Simulator};
use gaitdrift::transition::{daily_stats, write_daily_stats_csv, FilterConfig};
use gaitdrift::Error;

#[derive(Parser, Debug)]
#[command(name = "gaitdrift", version, about = "Gait speed drift detection from ambient sensor events")]
struct Cli {
    /// TOML file with [scenario], [filter], [detector], [sweep] and [input] tables;
    /// command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Simulate a resident and write events.csv and truth.csv.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory.
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Run drift detection on an event CSV.
    Detect {
        /// Event CSV: timestamp,sensor_id,status.
        #[arg(long, value_name = "FILE")]
        events: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        detector: DetectorArgs,
        /// Output directory for decisions.csv; stdout when omitted.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Also write per-pair test results to pairs.csv.
        #[arg(long, requires = "out")]
        pairs: bool,
        /// Also write per-day pair statistics to daily_stats.csv.
        #[arg(long, requires = "out")]
        daily_stats: bool,
    },
    /// Score decisions against ground truth.
    Evaluate {
        #[arg(long, value_name = "FILE")]
        decisions: PathBuf,
        #[arg(long, value_name = "FILE")]
        truth: PathBuf,
        /// decided | warmup-negative [default: decided]
        #[arg(long)]
        scoring: Option<String>,
        /// Also write the result as a one-row CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
    /// Run a parameter grid over simulated experiments.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        detector: DetectorArgs,
        /// decided | warmup-negative [default: decided]
        #[arg(long)]
        scoring: Option<String>,
        /// Worker threads [default: all cores].
        #[arg(long)]
        jobs: Option<usize>,
        /// Results CSV; stdout when omitted.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Check exact rank-test p-values against brute-force enumeration.
    Selftest {
        /// Largest sample size per group.
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        /// Random samples per size combination.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    /// The event CSV starts with a header line.
    #[arg(long)]
    header: bool,
    /// Seconds per day [default: 86400].
    #[arg(long)]
    day_length: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct FilterArgs {
    /// Daily percentile of transition durations, 0-100 [default: 0].
    #[arg(long)]
    percentile_k: Option<f64>,
    /// Shortest kept transition, seconds [default: 1].
    #[arg(long)]
    t_min: Option<f64>,
    /// Longest kept transition, seconds [default: 60].
    #[arg(long)]
    t_max: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct DetectorArgs {
    /// Window length in days [default: 7].
    #[arg(long)]
    window: Option<u32>,
    /// Per-pair significance level [default: 0.05].
    #[arg(long)]
    alpha: Option<f64>,
    /// Minimum daily support to use a day [default: 0].
    #[arg(long)]
    min_support: Option<usize>,
    /// unweighted | weighted [default: unweighted]
    #[arg(long)]
    weighting: Option<String>,
    /// Ensemble score needed to flag a day [default: 0.5].
    #[arg(long)]
    threshold: Option<f64>,
    /// two-sided | greater | less [default: two-sided]
    #[arg(long)]
    alternative: Option<String>,
}

#[derive(Args, Debug, Default)]
struct ScenarioArgs {
    /// Built-in layout A-D or a layout TOML file [default: A].
    #[arg(long)]
    layout: Option<String>,
    /// Speed before the onset, m/s [default: 1.2].
    #[arg(long)]
    baseline: Option<f64>,
    /// Speed from the onset day on, m/s [default: 0.4].
    #[arg(long)]
    drifted: Option<f64>,
    /// First drifted day [default: 100].
    #[arg(long)]
    onset: Option<u32>,
    /// Days to simulate [default: 200].
    #[arg(long)]
    days: Option<u32>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectory sampling rate, Hz [default: 10].
    #[arg(long)]
    sample_rate: Option<f64>,
    /// Body radius, m [default: 0.5].
    #[arg(long)]
    body_radius: Option<f64>,
    /// Seconds per simulated day [default: 86400].
    #[arg(long = "sim-day-length")]
    day_length: Option<f64>,
    /// Spread of standing points around each activity spot, m [default: 0.3].
    #[arg(long)]
    spot_jitter: Option<f64>,
    /// Stillness window of PIR sensors, s [default: 1].
    #[arg(long)]
    still_window: Option<f64>,
    /// Stillness displacement threshold, m [default: 0.01].
    #[arg(long)]
    still_threshold: Option<f64>,
    /// Door open time, s [default: 2].
    #[arg(long)]
    door_hold: Option<f64>,
    /// Accept speeds outside 0.4-1.2 m/s.
    #[arg(long)]
    any_speed: bool,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Comma-separated layouts [default: A].
    #[arg(long, value_delimiter = ',')]
    layouts: Option<Vec<String>>,
    /// Comma-separated baseline:drifted pairs [default: 1.2:0.4].
    #[arg(long, value_delimiter = ',')]
    speeds: Option<Vec<String>>,
    /// Comma-separated seeds or a half-open range like 0..10 [default: 0..10].
    #[arg(long)]
    seeds: Option<String>,
    /// Comma-separated percentiles [default: 0].
    #[arg(long, value_delimiter = ',')]
    percentiles: Option<Vec<f64>>,
    /// Comma-separated minimum durations, s [default: 1].
    #[arg(long, value_delimiter = ',')]
    t_mins: Option<Vec<f64>>,
    /// Comma-separated maximum durations, s [default: 60].
    #[arg(long, value_delimiter = ',')]
    t_maxs: Option<Vec<f64>>,
    /// Comma-separated minimum supports [default: 0].
    #[arg(long, value_delimiter = ',')]
    min_supports: Option<Vec<usize>>,
    /// Comma-separated weightings [default: unweighted].
    #[arg(long, value_delimiter = ',')]
    weightings: Option<Vec<String>>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    scenario: ScenarioConfig,
    #[serde(default)]
    filter: FilterSection,
    #[serde(default)]
    detector: DetectorSection,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    input: InputSection,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    layout: Option<String>,
    baseline_speed: Option<f64>,
    drifted_speed: Option<f64>,
    onset_day: Option<u32>,
    num_days: Option<u32>,
    seed: Option<u64>,
    sample_rate: Option<f64>,
    body_radius: Option<f64>,
    day_length: Option<f64>,
    spot_jitter: Option<f64>,
    still_window: Option<f64>,
    still_threshold: Option<f64>,
    door_hold: Option<f64>,
    any_speed: Option<bool>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FilterSection {
    percentile_k: Option<f64>,
    t_min: Option<f64>,
    t_max: Option<f64>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct DetectorSection {
    window: Option<u32>,
    alpha: Option<f64>,
    min_support: Option<usize>,
    weighting: Option<String>,
    threshold: Option<f64>,
    alternative: Option<String>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    layouts: Option<Vec<String>>,
    speed_pairs: Option<Vec<[f64; 2]>>,
    seeds: Option<Vec<u64>>,
    percentile_k: Option<Vec<f64>>,
    t_min: Option<Vec<f64>>,
    t_max: Option<Vec<f64>>,
    min_support: Option<Vec<usize>>,
    weighting: Option<Vec<String>>,
    scoring: Option<String>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct InputSection {
    header: Option<bool>,
    day_length: Option<f64>,
}

/// Failure with the exit code it maps to.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidConfig(_) | Error::UnknownLayout(_) => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl ConfigFile {
    fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let mut cfg: ConfigFile = toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        // layout files named in a config resolve relative to it
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |l: &mut String| {
            if FloorPlan::builtin(l).is_err() && Path::new(l.as_str()).is_relative() {
                *l = base.join(&*l).to_string_lossy().into_owned();
            }
        };
        if let Some(l) = cfg.scenario.layout.as_mut() {
            rebase(l);
        }
        for l in cfg.sweep.layouts.iter_mut().flatten() {
            rebase(l);
        }
        Ok(cfg)
    }
}

fn parse_weighting(s: &str) -> CliResult<Weighting> {
    Weighting::parse(s).ok_or_else(|| usage(format!("unknown weighting `{s}` (unweighted | weighted)")))
}

fn parse_scoring(s: Option<&str>) -> CliResult<ScoringMode> {
    s.map_or(Ok(ScoringMode::default()), |s| {
        ScoringMode::parse(s).ok_or_else(|| usage(format!("unknown scoring mode `{s}` (decided | warmup-negative)")))
    })
}

fn filter_config(args: &FilterArgs, file: &FilterSection) -> FilterConfig {
    let d = FilterConfig::default();
    FilterConfig {
        percentile_k: args.percentile_k.or(file.percentile_k).unwrap_or(d.percentile_k),
        t_min: args.t_min.or(file.t_min).unwrap_or(d.t_min),
        t_max: args.t_max.or(file.t_max).unwrap_or(d.t_max),
    }
}

fn detector_config(args: &DetectorArgs, file: &DetectorSection) -> CliResult<DetectorConfig> {
    let d = DetectorConfig::default();
    let weighting = match args.weighting.as_deref().or(file.weighting.as_deref()) {
        Some(w) => parse_weighting(w)?,
        None => d.weighting,
    };
    let alternative = match args.alternative.as_deref().or(file.alternative.as_deref()) {
        Some(a) => Alternative::parse(a).ok_or_else(|| usage(format!("unknown alternative `{a}`")))?,
        None => d.alternative,
    };
    Ok(DetectorConfig {
        window_len: args.window.or(file.window).unwrap_or(d.window_len),
        alpha: args.alpha.or(file.alpha).unwrap_or(d.alpha),
        min_support: args.min_support.or(file.min_support).unwrap_or(d.min_support),
        weighting,
        decision_threshold: args.threshold.or(file.threshold).unwrap_or(d.decision_threshold),
        alternative,
    })
}

fn scenario_config(args: &ScenarioArgs, file: &ScenarioConfig) -> (String, Scenario) {
    let d = Scenario::default();
    let layout = args.layout.clone().or_else(|| file.layout.clone()).unwrap_or_else(|| "A".into());
    let scenario = Scenario {
        baseline_speed: args.baseline.or(file.baseline_speed).unwrap_or(d.baseline_speed),
        drifted_speed: args.drifted.or(file.drifted_speed).unwrap_or(d.drifted_speed),
        onset_day: args.onset.or(file.onset_day).unwrap_or(d.onset_day),
        num_days: args.days.or(file.num_days).unwrap_or(d.num_days),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        sample_rate: args.sample_rate.or(file.sample_rate).unwrap_or(d.sample_rate),
        body_radius: args.body_radius.or(file.body_radius).unwrap_or(d.body_radius),
        day_length: args.day_length.or(file.day_length).unwrap_or(d.day_length),
        spot_jitter: args.spot_jitter.or(file.spot_jitter).unwrap_or(d.spot_jitter),
        still_window: args.still_window.or(file.still_window).unwrap_or(d.still_window),
        still_threshold: args.still_threshold.or(file.still_threshold).unwrap_or(d.still_threshold),
        door_hold: args.door_hold.or(file.door_hold).unwrap_or(d.door_hold),
        check_speed_range: !(args.any_speed || file.any_speed.unwrap_or(false)),
    };
    (layout, scenario)
}

fn parse_seeds(s: &str) -> CliResult<Vec<u64>> {
    let bad = || usage(format!("bad seed list `{s}`"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        return Ok((lo..hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

fn parse_speed_pair(s: &str) -> CliResult<(f64, f64)> {
    let bad = || usage(format!("bad speed pair `{s}`, expected baseline:drifted"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn sweep_spec(
    grid: &GridArgs,
    scenario_args: &ScenarioArgs,
    detector_args: &DetectorArgs,
    scoring: Option<&str>,
    file: &ConfigFile,
) -> CliResult<SweepSpec> {
    let d = SweepSpec::default();
    let f = &file.sweep;
    let (_, scenario) = scenario_config(scenario_args, &file.scenario);
    let detector = detector_config(detector_args, &file.detector)?;
    let speed_pairs = match &grid.speeds {
        Some(list) => list.iter().map(|s| parse_speed_pair(s)).collect::<CliResult<_>>()?,
        None => f
            .speed_pairs
            .as_ref()
            .map(|v| v.iter().map(|p| (p[0], p[1])).collect())
            .unwrap_or(d.speed_pairs),
    };
    let seeds = match &grid.seeds {
        Some(s) => parse_seeds(s)?,
        None => f.seeds.clone().unwrap_or(d.seeds),
    };
    let weighting = match grid.weightings.as_ref().or(f.weighting.as_ref()) {
        Some(list) => list.iter().map(|w| parse_weighting(w)).collect::<CliResult<_>>()?,
        None => vec![detector.weighting],
    };
    let layouts = grid
        .layouts
        .clone()
        .or_else(|| f.layouts.clone())
        .or_else(|| scenario_args.layout.clone().or_else(|| file.scenario.layout.clone()).map(|l| vec![l]))
        .unwrap_or(d.layouts);
    let filter = filter_config(&FilterArgs::default(), &file.filter);
    let spec = SweepSpec {
        layouts,
        speed_pairs,
        seeds,
        percentile_k: grid.percentiles.clone().or_else(|| f.percentile_k.clone()).unwrap_or(vec![filter.percentile_k]),
        t_min: grid.t_mins.clone().or_else(|| f.t_min.clone()).unwrap_or(vec![filter.t_min]),
        t_max: grid.t_maxs.clone().or_else(|| f.t_max.clone()).unwrap_or(vec![filter.t_max]),
        min_support: grid
            .min_supports
            .clone()
            .or_else(|| f.min_support.clone())
            .unwrap_or(vec![detector.min_support]),
        weighting,
        scenario,
        detector,
        mode: parse_scoring(scoring.or(f.scoring.as_deref()))?,
    };
    spec.validate()?;
    Ok(spec)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: gaitdrift::Result<T>) -> CliResult<T> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
        usage => usage,
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match cli.command {
        Command::Simulate { scenario, out } => {
            let (layout, scenario) = scenario_config(&scenario, &file.scenario);
            scenario.validate()?;
            let plan = FloorPlan::resolve(&layout)?;
            log::info!("simulating {} days in layout {}", scenario.num_days, plan.name);
            let (log, truth) = Simulator::new(plan, scenario.sensor_model(), scenario.spot_jitter)?.simulate(&scenario)?;
            fs::create_dir_all(&out)?;
            let mut w = create(&out.join("events.csv"))?;
            log.write_csv(&mut w)?;
            w.flush()?;
            let mut w = create(&out.join("truth.csv"))?;
            truth.write_csv(&mut w)?;
            w.flush()?;
            log::info!("wrote {} events", log.len());
        }
        Command::Detect { events, input, filter, detector, out, pairs, daily_stats: write_stats } => {
            let filter = filter_config(&filter, &file.filter);
            let detector = detector_config(&detector, &file.detector)?;
            filter.validate()?;
            detector.validate()?;
            let opts = LoadOptions {
                day_length: input.day_length.or(file.input.day_length).unwrap_or(DEFAULT_DAY_LENGTH),
                header: input.header || file.input.header.unwrap_or(false),
            };
            let log = with_path(&events, load_event_log(open(&events)?, opts))?;
            log::info!("loaded {} events", log.len());
            let series = detect(&log, &filter, &detector)?;
            match out {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    let mut w = create(&dir.join("decisions.csv"))?;
                    series.write_decisions_csv(&mut w)?;
                    w.flush()?;
                    if pairs {
                        let mut w = create(&dir.join("pairs.csv"))?;
                        series.write_diagnostics_csv(&mut w)?;
                        w.flush()?;
                    }
                    if write_stats {
                        let mut w = create(&dir.join("daily_stats.csv"))?;
                        write_daily_stats_csv(&daily_stats(&log, &filter)?, &mut w)?;
                        w.flush()?;
                    }
                }
                None => series.write_decisions_csv(io::stdout().lock())?,
            }
        }
        Command::Evaluate { decisions, truth, scoring, csv } => {
            let mode = parse_scoring(scoring.as_deref().or(file.sweep.scoring.as_deref()))?;
            let series = with_path(&decisions, DriftSeries::read_decisions_csv(open(&decisions)?))?;
            let truth = with_path(&truth, GroundTruth::read_csv(open(&truth)?))?;
            let result = score(&series, &truth, mode)?;
            print!("{}", result.to_key_values());
            if let Some(path) = csv {
                let mut w = create(&path)?;
                writeln!(w, "{}", EvalResult::CSV_HEADER)?;
                writeln!(w, "{}", result.to_csv_row())?;
                w.flush()?;
            }
        }
        Command::Sweep { grid, scenario, detector, scoring, jobs, out } => {
            let spec = sweep_spec(&grid, &scenario, &detector, scoring.as_deref(), &file)?;
            log::info!("sweeping {} runs over {} grid points", spec.num_runs(), spec.grid_points());
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(n) = jobs {
                if n == 0 {
                    return Err(usage("--jobs must be at least 1"));
                }
                pool = pool.num_threads(n);
            }
            let pool = pool.build().map_err(|e| Failure::Data(e.to_string()))?;
            let rows = pool.install(|| run_sweep(&spec))?;
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    write_sweep_csv(&rows, &mut w)?;
                    w.flush()?;
                }
                None => write_sweep_csv(&rows, io::stdout().lock())?,
            }
        }
        Command::Selftest { max_n, trials, seed } => {
            let report = check_exact_against_enumeration(max_n, trials, seed)?;
            println!("cases={}", report.cases);
            println!("max_abs_diff={:e}", report.max_abs_diff);
            if report.max_abs_diff > 1e-12 {
                return Err(Failure::Data("exact p-values disagree with enumeration".into()));
            }
            println!("ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("Usage: gaitdrift [--config FILE] <simulate|detect|evaluate|sweep|selftest> [OPTIONS]");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults_match_modules() {
        let cli = Cli::try_parse_from(["gaitdrift", "detect", "--events", "e.csv"]).unwrap();
        let Command::Detect { filter, detector, .. } = cli.command else { panic!() };
        assert_eq!(filter_config(&filter, &FilterSection::default()), FilterConfig::default());
        assert_eq!(detector_config(&detector, &DetectorSection::default()).unwrap(), DetectorConfig::default());
    }

    #[test]
    fn flags_override_config_file() {
        let file: ConfigFile = toml::from_str("[detector]\nwindow = 5\nalpha = 0.01\n[filter]\nt_min = 2.0\n").unwrap();
        let cli = Cli::try_parse_from(["gaitdrift", "detect", "--events", "e", "--alpha", "0.1"]).unwrap();
        let Command::Detect { filter, detector, .. } = cli.command else { panic!() };
        let d = detector_config(&detector, &file.detector).unwrap();
        assert_eq!((d.window_len, d.alpha), (5, 0.1));
        assert_eq!(filter_config(&filter, &file.filter).t_min, 2.0);
    }

    #[test]
    fn seed_lists_and_ranges() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("4, 9").unwrap(), vec![4, 9]);
        assert!(parse_seeds("x").is_err());
        assert_eq!(parse_speed_pair("1.2:0.4").unwrap(), (1.2, 0.4));
        assert!(parse_speed_pair("1.2").is_err());
    }

    #[test]
    fn sweep_spec_from_config() {
        let file: ConfigFile = toml::from_str(
            "[sweep]\nlayouts = [\"B\"]\nspeed_pairs = [[1.2, 1.1]]\nseeds = [1, 2]\nt_min = [0.0, 1.0]\n[scenario]\nnum_days = 30\n",
        )
        .unwrap();
        let spec = sweep_spec(&GridArgs::default(), &ScenarioArgs::default(), &DetectorArgs::default(), None, &file).unwrap();
        assert_eq!(spec.layouts, vec!["B"]);
        assert_eq!(spec.speed_pairs, vec![(1.2, 1.1)]);
        assert_eq!(spec.t_min, vec![0.0, 1.0]);
        assert_eq!(spec.scenario.num_days, 30);
        assert_eq!(spec.num_runs(), 4);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("[detector]\nwindo = 5\n").is_err());
    }
}

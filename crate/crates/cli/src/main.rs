use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use ca_ps::digraph::{min_spatial_witness, ps_with_spatial_period, DEFAULT_SIGMA_MAX};
use ca_ps::experiments::{exhaustive_existence, run, DEFAULT_CDF_MAX, DEFAULT_SAMPLES};
use ca_ps::render::{histogram_svg, SpaceTime};
use ca_ps::theory::{brute_force_tile_census, lambda, simple_sizes, simple_tile_count, to_f64};
use ca_ps::{ExperimentConfig, Mode, Rational, Rule, RuleClass, Tile, Word};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Periodic solutions of two-neighbor cellular automata.
#[derive(Parser)]
#[command(name = "ca-ps", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Limiting Poisson means of the number of periodic solutions.
    Lambda(LambdaArgs),
    /// Periodic solutions of a single rule.
    Analyze(AnalyzeArgs),
    /// Monte Carlo over random rules.
    Simulate(SimulateArgs),
    /// Exact existence probability by enumerating every rule (n <= 3).
    Exact(ExactArgs),
    /// Render a space-time diagram.
    Spacetime(SpacetimeArgs),
    /// Count all valid tiles by brute force, bucketed by state count and lag.
    Census(CensusArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct LambdaArgs {
    #[arg(
        long,
        conflicts_with = "tau_range",
        required_unless_present = "tau_range"
    )]
    tau: Option<u64>,
    /// Inclusive range `a..b`.
    #[arg(long)]
    tau_range: Option<String>,
    #[arg(
        long,
        conflicts_with = "sigma_range",
        required_unless_present = "sigma_range"
    )]
    sigma: Option<u64>,
    #[arg(long)]
    sigma_range: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    rule: String,
    #[arg(long)]
    n: u32,
    /// List solutions of this spatial period.
    #[arg(long, conflicts_with_all = ["tau", "sigma_max"], required_unless_present = "tau")]
    sigma: Option<usize>,
    /// Only list solutions with temporal period up to this.
    #[arg(long, requires = "sigma")]
    tau_max: Option<usize>,
    /// Search the least spatial period at this temporal period.
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SIGMA_MAX)]
    sigma_max: usize,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum SimMode {
    Existence,
    MinTemporal,
    MinSpatial,
    Poisson,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: SimMode,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long)]
    tau: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SIGMA_MAX)]
    sigma_max: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "CA_PS_WORKERS")]
    workers: Option<usize>,
    #[arg(long = "class", value_enum, default_value_t = ClassArg::Uniform)]
    class: ClassArg,
    /// JSON summary path.
    #[arg(long, default_value = "summary.json")]
    out: PathBuf,
    /// Per-sample CSV path.
    #[arg(long)]
    per_sample: Option<PathBuf>,
    /// Histogram chart path.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Largest value at which CDFs are compared.
    #[arg(long, default_value_t = DEFAULT_CDF_MAX)]
    y_max: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Uniform,
    LeftPermutative,
    Additive,
}

impl From<ClassArg> for RuleClass {
    fn from(c: ClassArg) -> Self {
        match c {
            ClassArg::Uniform => RuleClass::Uniform,
            ClassArg::LeftPermutative => RuleClass::LeftPermutative,
            ClassArg::Additive => RuleClass::Additive,
        }
    }
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    tau: usize,
    #[arg(long)]
    sigma: usize,
}

#[derive(Args)]
struct SpacetimeArgs {
    #[arg(long)]
    rule: String,
    #[arg(long)]
    n: u32,
    /// One spatial period of the initial configuration.
    #[arg(long)]
    init: String,
    #[arg(long, default_value_t = 16)]
    steps: usize,
    /// Copies of the initial period drawn side by side.
    #[arg(long, default_value_t = 1)]
    repeat_width: usize,
    /// Output file, `.ppm` or `.svg`.
    #[arg(long)]
    out: PathBuf,
    /// Pixels per cell.
    #[arg(long, default_value_t = 10)]
    scale: usize,
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    tau: usize,
    #[arg(long)]
    sigma: usize,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

/// Bad input detected before any work or output happened.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl fmt::Display) -> anyhow::Error {
    Usage(msg.to_string()).into()
}

trait OrUsage<T> {
    fn or_usage(self, what: &str) -> Result<T>;
}

impl<T> OrUsage<T> for ca_ps::Result<T> {
    fn or_usage(self, what: &str) -> Result<T> {
        self.map_err(|e| usage(format!("{what}: {e}")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Lambda(a) => cmd_lambda(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Spacetime(a) => cmd_spacetime(a),
        Command::Census(a) => cmd_census(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn parse_range(text: &str, name: &str) -> Result<Vec<u64>> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| usage(format!("{name}: expected a..b, got {text:?}")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| usage(format!("{name}: {s:?} is not a nonnegative integer")))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a == 0 {
        return Err(usage(format!("{name}: values must be positive")));
    }
    if a > b {
        return Err(usage(format!("{name}: empty range {a}..{b}")));
    }
    Ok((a..=b).collect())
}

fn values(single: Option<u64>, range: Option<&str>, name: &str) -> Result<Vec<u64>> {
    match (single, range) {
        (Some(0), _) => Err(usage(format!("{name} must be positive"))),
        (Some(v), _) => Ok(vec![v]),
        (None, Some(r)) => parse_range(r, &format!("{name}-range")),
        (None, None) => Err(usage(format!("missing --{name}"))),
    }
}

fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn print_json(v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn cmd_lambda(a: LambdaArgs) -> Result<()> {
    let taus = values(a.tau, a.tau_range.as_deref(), "tau")?;
    let sigmas = values(a.sigma, a.sigma_range.as_deref(), "sigma")?;
    let rows: Vec<(u64, u64, Rational)> = sigmas
        .iter()
        .flat_map(|&s| taus.iter().map(move |&t| (t, s, lambda(t, s))))
        .collect();
    match a.format {
        Format::Text => {
            let single = rows.len() == 1;
            for (t, s, l) in &rows {
                if single {
                    println!("{}", rational_string(l));
                } else {
                    println!(
                        "tau={t} sigma={s} lambda={} ({:.6})",
                        rational_string(l),
                        to_f64(l)
                    );
                }
            }
        }
        Format::Csv => {
            println!("tau,sigma,lambda,value");
            for (t, s, l) in &rows {
                println!("{t},{s},{},{}", rational_string(l), to_f64(l));
            }
        }
        Format::Json => {
            let v: Vec<Value> = rows
                .iter()
                .map(|(t, s, l)| {
                    json!({"tau": t, "sigma": s, "lambda": rational_string(l), "value": to_f64(l)})
                })
                .collect();
            print_json(&Value::Array(v))?;
        }
    }
    Ok(())
}

fn tile_json(tile: &Tile) -> Value {
    let m = tile.metrics();
    json!({
        "tile": tile.to_rows(),
        "tau": tile.tau(),
        "sigma": tile.sigma(),
        "states": m.states,
        "assignments": m.assignments,
        "lag": m.lag,
        "simple": tile.is_simple(),
    })
}

fn tile_text(tile: &Tile) -> String {
    let m = tile.metrics();
    let rows: Vec<String> = tile
        .rows()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(|s| s.to_string()).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!(
        "[{}] tau={} sigma={} s={} p={} lag={} simple={}",
        rows.join(","),
        tile.tau(),
        tile.sigma(),
        m.states,
        m.assignments,
        m.lag,
        tile.is_simple()
    )
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<()> {
    let rule = Rule::parse(&a.rule, a.n).or_usage("--rule")?;
    if let Some(sigma) = a.sigma {
        if sigma == 0 || a.tau_max == Some(0) {
            return Err(usage("periods must be positive"));
        }
        let tiles = ps_with_spatial_period(&rule, sigma).or_usage("--sigma")?;
        let y = tiles.iter().map(Tile::tau).min();
        let mut listed: Vec<&Tile> = tiles
            .iter()
            .filter(|t| a.tau_max.is_none_or(|m| t.tau() <= m))
            .collect();
        listed.sort_by_key(|t| (t.tau(), (*t).clone()));
        match a.format {
            Format::Json => print_json(&json!({
                "rule": rule.format(),
                "n": a.n,
                "sigma": sigma,
                "y": y,
                "tiles": listed.iter().map(|t| tile_json(t)).collect::<Vec<_>>(),
            }))?,
            _ => {
                match y {
                    Some(y) => println!("Y = {y}"),
                    None => println!("Y = none"),
                }
                for t in listed {
                    println!("{}", tile_text(t));
                }
            }
        }
    } else {
        let tau = a.tau.expect("clap requires tau without sigma");
        if tau == 0 || a.sigma_max == 0 {
            return Err(usage("--tau and --sigma-max must be positive"));
        }
        let witness = min_spatial_witness(&rule, tau, a.sigma_max).or_usage("--tau")?;
        match a.format {
            Format::Json => print_json(&json!({
                "rule": rule.format(),
                "n": a.n,
                "tau": tau,
                "sigma_max": a.sigma_max,
                "y_prime": witness.as_ref().map(|w| w.spatial_period),
                "cycle": witness.as_ref().map(|w| w.words.iter().map(|l| l.to_string()).collect::<Vec<_>>()),
                "tile": witness.as_ref().map(|w| tile_json(&w.tile)),
            }))?,
            _ => match witness {
                Some(w) => {
                    println!("Y' = {}", w.spatial_period);
                    let labels: Vec<String> = w.words.iter().map(|l| l.to_string()).collect();
                    let first = labels[0].clone();
                    println!("cycle {} -> {first}", labels.join(" -> "));
                    println!("{}", tile_text(&w.tile));
                }
                None => println!("Y' = none up to {}", a.sigma_max),
            },
        }
    }
    Ok(())
}

fn required(v: Option<usize>, flag: &str, mode: &str) -> Result<usize> {
    v.ok_or_else(|| usage(format!("--mode {mode} requires --{flag}")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(bytes)
        .with_context(|| format!("writing {}", path.display()))
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let mode = match a.mode {
        SimMode::Existence => Mode::Existence {
            tau: required(a.tau, "tau", "existence")?,
            sigma: required(a.sigma, "sigma", "existence")?,
        },
        SimMode::MinTemporal => Mode::MinTemporal {
            sigma: required(a.sigma, "sigma", "min-temporal")?,
        },
        SimMode::MinSpatial => Mode::MinSpatial {
            tau: required(a.tau, "tau", "min-spatial")?,
            sigma_max: a.sigma_max,
        },
        SimMode::Poisson => Mode::SimpleCount {
            tau: required(a.tau, "tau", "poisson")?,
            sigma: required(a.sigma, "sigma", "poisson")?,
        },
    };
    let mut config = ExperimentConfig::new(a.n, mode)
        .samples(a.samples)
        .seed(a.seed)
        .rule_class(a.class.into())
        .cdf_max(a.y_max);
    config.workers = a.workers;
    config.validate().or_usage("invalid experiment")?;

    let result = run(&config)?;
    write_file(&a.out, result.to_json().as_bytes())?;
    if let Some(path) = &a.per_sample {
        let mut buf = Vec::new();
        result.write_csv(&mut buf)?;
        write_file(path, &buf)?;
    }
    if let Some(path) = &a.svg {
        write_file(path, histogram_svg(&result).as_bytes())?;
    }
    println!("summary: {}", a.out.display());
    print!("max |CDF deviation|: {:.6}", result.deviations.max_abs_cdf);
    if let Some(tv) = result.deviations.tv {
        print!("  TV distance: {tv:.6}");
    }
    println!();
    eprintln!("{} samples in {:.2?}", config.samples, result.runtime);
    Ok(())
}

fn cmd_exact(a: ExactArgs) -> Result<()> {
    let p = exhaustive_existence(a.n, a.tau, a.sigma).or_usage("exact")?;
    println!("{}\t{}", rational_string(&p), to_f64(&p));
    Ok(())
}

fn cmd_spacetime(a: SpacetimeArgs) -> Result<()> {
    let rule = Rule::parse(&a.rule, a.n).or_usage("--rule")?;
    let init = Word::parse(&a.init, a.n).or_usage("--init")?;
    let ext = a
        .out
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    if !matches!(ext.as_deref(), Some("ppm" | "svg")) {
        return Err(usage("--out must end in .ppm or .svg"));
    }
    let diagram = SpaceTime::new(&rule, &init, a.steps, a.repeat_width).or_usage("spacetime")?;
    let bytes = if ext.as_deref() == Some("ppm") {
        diagram.to_ppm(a.scale).or_usage("--scale")?
    } else {
        diagram.to_svg(a.scale).or_usage("--scale")?.into_bytes()
    };
    write_file(&a.out, &bytes)?;
    println!("{}", a.out.display());
    Ok(())
}

fn cmd_census(a: CensusArgs) -> Result<()> {
    let census = brute_force_tile_census(a.n, a.tau, a.sigma).or_usage("census")?;
    let sizes = simple_sizes(a.tau as u64, a.sigma as u64, a.n as u64);
    let expected = |s: usize| {
        sizes
            .contains(&(s as u64))
            .then(|| simple_tile_count(a.n as u64, a.tau as u64, a.sigma as u64, s as u64).ok())
            .flatten()
            .map(|c| c.to_string())
    };
    match a.format {
        Format::Json => {
            let rows: Vec<Value> = census
                .iter()
                .map(|(&(s, lag), &count)| {
                    json!({
                        "states": s,
                        "lag": lag,
                        "count": count,
                        "predicted": (lag == 0).then(|| expected(s)).flatten(),
                    })
                })
                .collect();
            print_json(&Value::Array(rows))?;
        }
        Format::Csv => {
            println!("states,lag,count,predicted");
            for (&(s, lag), &count) in &census {
                let p = (lag == 0)
                    .then(|| expected(s))
                    .flatten()
                    .unwrap_or_default();
                println!("{s},{lag},{count},{p}");
            }
        }
        Format::Text => {
            for (&(s, lag), &count) in &census {
                match (lag == 0).then(|| expected(s)).flatten() {
                    Some(p) => println!("s={s} lag={lag} count={count} predicted={p}"),
                    None => println!("s={s} lag={lag} count={count}"),
                }
            }
        }
    }
    Ok(())
}

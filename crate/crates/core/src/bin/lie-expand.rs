//! Command-line runner for the experiment scenarios.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lie_expand::experiments::{
    compare, configure_threads, read_report, run, write_artifacts, Emit, Params, RunReport, Scenario,
    ScenarioConfig,
};
use lie_expand::constructions::{arithmetic_progression_set, lift_to_group, verify_nongrowth, APConfig};
use lie_expand::delta_sets::GenerationBudget;
use lie_expand::group_backends::Backend;
use lie_expand::Error;

const EXIT_INTERNAL: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "lie-expand", version, about = "Reproducible experiments on BCH words and discretized sets in Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Numeric order of synthesized words and truncated BCH series
    BchOrder(RunArgs),
    /// Exact synthesis and certification of approximating words
    SynthWord(RunArgs),
    /// Tripling of arithmetic progressions in R^d
    #[command(alias = "nongrowth")]
    NongrowthAp(RunArgs),
    /// Build a progression, lift it to a group and write the set with its hypothesis report
    ConstructAp(ConstructArgs),
    /// Tripling of a random set in SU(2)
    GrowthSu2(RunArgs),
    /// The generated set <A, X>_s and its coverage of a ball
    SumProductGenerate(RunArgs),
    /// Central coverage by commutators in the Heisenberg group
    CommutatorCoverage(RunArgs),
    /// Linear recovery from an almost-additive sampled map
    LinearizeDemo(RunArgs),
    /// Run the scenario named in a JSON config file
    Run(RunArgs),
    /// Align the metrics of several report.json files into one CSV
    Compare {
        reports: Vec<PathBuf>,
        /// Write the table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with "scenario", "params" and optionally "out"
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact formats to write (default: all)
    #[arg(long, value_delimiter = ',')]
    emit: Vec<String>,
    #[arg(long)]
    backend: Option<String>,
    /// Number of generators
    #[arg(long)]
    s: Option<usize>,
    /// Approximation order
    #[arg(long)]
    ell: Option<usize>,
    /// Dimension of the progression
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_parser = parse_real)]
    kappa: Option<f64>,
    /// Grid scale; accepts forms like 2^-10
    #[arg(long, value_parser = parse_real)]
    delta: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    r: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    rho: Option<f64>,
    /// Number of commutator factors
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, value_parser = parse_real)]
    noise: Option<f64>,
    #[arg(long)]
    max_points: Option<u64>,
    #[arg(long, value_parser = parse_real)]
    region_radius: Option<f64>,
}

#[derive(Args)]
struct ConstructArgs {
    /// Dimension of the progression
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long, value_parser = parse_real, default_value = "0.5")]
    kappa: f64,
    /// Grid scale; accepts forms like 2^-10
    #[arg(long, value_parser = parse_real, default_value = "2^-10")]
    delta: f64,
    #[arg(long, value_parser = parse_real, default_value = "1")]
    r: f64,
    /// Group to lift to (default abelian:<d>)
    #[arg(long)]
    backend: Option<String>,
    /// Distance threshold for the away-from-subgroups check
    #[arg(long, value_parser = parse_real, default_value = "0.25")]
    rho: f64,
    #[arg(long)]
    max_points: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
}

impl RunArgs {
    fn params(&self) -> Params {
        Params {
            backend: self.backend.clone(),
            s: self.s,
            ell: self.ell,
            d: self.d,
            kappa: self.kappa,
            delta: self.delta,
            r: self.r,
            rho: self.rho,
            k: self.k,
            seed: self.seed,
            points: self.points,
            samples: self.samples,
            noise: self.noise,
            max_points: self.max_points,
            region_radius: self.region_radius,
        }
    }
}

/// Decimal numbers, fractions `a/b` and powers `a^b`.
fn parse_real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    if let Some((base, exp)) = s.split_once('^') {
        return Ok(parse(base)?.powf(parse(exp)?));
    }
    if let Some((num, den)) = s.split_once('/') {
        return Ok(parse(num)? / parse(den)?);
    }
    parse(s)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Domain(_) | Error::Parse(_) | Error::Infeasible(_) | Error::Config(_) => {
            EXIT_VALIDATION
        }
        Error::ResourceLimit(_) => EXIT_BUDGET,
        Error::Io(_) | Error::Json(_) => EXIT_INTERNAL,
    }
}

fn print_summary(report: &RunReport) {
    println!("{} ({:.2} s)", report.scenario, report.wall_clock_seconds);
    let width = report.metrics.iter().map(|m| m.name.len()).max().unwrap_or(0);
    for m in &report.metrics {
        println!("  {:width$}  {:<14}  {}", m.name, m.value, m.tolerance);
    }
    if !report.truncated.is_empty() {
        println!("  truncated: {}", report.truncated.join(", "));
    }
    if let Some(e) = &report.error {
        println!("  stopped early: {e}");
    }
    for a in &report.artifacts {
        println!("  wrote {a}");
    }
}

fn run_scenario(scenario: Option<Scenario>, args: RunArgs) -> Result<u8, Error> {
    let mut config = match (&args.config, scenario) {
        (Some(path), named) => {
            let c = ScenarioConfig::from_json_file(path)?;
            if let Some(s) = named.filter(|s| *s != c.scenario) {
                return Err(Error::Config(format!("{} names scenario {}, not {s}", path.display(), c.scenario)));
            }
            c
        }
        (None, Some(s)) => ScenarioConfig::new(s, Params::default()),
        (None, None) => return Err(Error::Config("run needs --config".into())),
    };
    config.params.merge(&args.params());
    if args.out.is_some() {
        config.out = args.out.clone();
    }
    let out = config.out.clone().ok_or_else(|| Error::Config("an output directory is required (--out)".into()))?;
    let emit: Vec<Emit> = if args.emit.is_empty() {
        vec![Emit::Json, Emit::Csv, Emit::Svg]
    } else {
        args.emit.iter().map(|e| e.parse()).collect::<Result<_, _>>()?
    };
    let mut report = run(&config)?;
    write_artifacts(&mut report, &out, &emit)?;
    print_summary(&report);
    Ok(if report.complete { 0 } else { EXIT_BUDGET })
}

fn construct_ap(args: ConstructArgs) -> Result<u8, Error> {
    let c = APConfig { d: args.d, kappa: args.kappa, delta: args.delta, r: args.r };
    let backend: Backend = match &args.backend {
        Some(b) => b.parse()?,
        None => Backend::Abelian(args.d),
    };
    let a = lift_to_group(&arithmetic_progression_set(&c)?, backend, c.r)?;
    let mut budget = GenerationBudget::default();
    if let Some(m) = args.max_points {
        budget.max_points = m;
    }
    let report = verify_nongrowth(&a, args.rho, &budget)?;
    std::fs::create_dir_all(&args.out)?;
    let set_path = args.out.join("set.txt");
    a.write_to(std::io::BufWriter::new(std::fs::File::create(&set_path)?))?;
    let json = serde_json::json!({ "config": c, "backend": backend, "report": report });
    let report_path = args.out.join("hypotheses.json");
    std::fs::write(&report_path, serde_json::to_string_pretty(&json)? + "\n")?;
    println!("construct-ap on {backend}: {} points, N(AAA)/N(A) = {:.3}", report.points, report.ratio);
    for q in &report.quotients {
        println!("  quotient by {}: envelope exponent {:.3}", q.subgroup, q.envelope);
    }
    println!("  wrote {}", set_path.display());
    println!("  wrote {}", report_path.display());
    Ok(if report.truncated { EXIT_BUDGET } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_VALIDATION);
    }
    let result = match cli.command {
        Command::BchOrder(a) => run_scenario(Some(Scenario::BchOrder), a),
        Command::SynthWord(a) => run_scenario(Some(Scenario::SynthWord), a),
        Command::NongrowthAp(a) => run_scenario(Some(Scenario::NongrowthAp), a),
        Command::ConstructAp(a) => construct_ap(a),
        Command::GrowthSu2(a) => run_scenario(Some(Scenario::GrowthSu2), a),
        Command::SumProductGenerate(a) => run_scenario(Some(Scenario::SumProductGenerate), a),
        Command::CommutatorCoverage(a) => run_scenario(Some(Scenario::CommutatorCoverage), a),
        Command::LinearizeDemo(a) => run_scenario(Some(Scenario::LinearizeDemo), a),
        Command::Run(a) => run_scenario(None, a),
        Command::Compare { reports, out } => (|| {
            let loaded = reports.iter().map(|p| read_report(p)).collect::<Result<Vec<_>, _>>()?;
            let table = compare(&loaded)?;
            match out {
                Some(path) => std::fs::write(path, table)?,
                None => print!("{table}"),
            }
            Ok(0)
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ldq::bounds::{
    binary_entropy, critical_weight, degree_check, excess_rate_maximizer, induced_flip_prob, kl_bernoulli,
    min_distance_ratio, rd_distortion, weight_enum_exact, weight_enum_exponent, DegreeTriple,
};
use ldq::encoder::{encode_local_search, encode_optimal};
use ldq::ensembles::alist::{read_code, write_code};
use ldq::ensembles::{CompoundCode, EnsembleSpec};
use ldq::gf2::BitVector;
use ldq::harness::{emit_gap_figure, run_quantization_sweep, run_suite, write_sweep, ExperimentConfig, Suite};
use ldq::seed::seeded;

const EXIT_ERROR: u8 = 1;
const EXIT_VERIFY_FAILED: u8 = 2;

/// Compound LDGM/LDPC lossy compression toolkit.
#[derive(Parser)]
#[command(name = "ldq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a compound code and write it as alist files plus metadata.
    GenCode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Quantize one source word with a stored code.
    Encode {
        #[arg(long)]
        code: PathBuf,
        /// File holding the source word in hex.
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        source: Option<PathBuf>,
        /// Draw a uniform source word from --seed.
        #[arg(long, requires = "seed")]
        random: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "optimal")]
        method: Method,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 1000)]
        max_iters: usize,
        /// Seed for local-search restarts.
        #[arg(long, default_value_t = 0)]
        search_seed: u64,
    },
    /// Evaluate an analytical quantity.
    Bounds {
        #[arg(long, value_enum)]
        what: What,
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Write the gap-figure curves as CSV.
    GapFigure {
        #[arg(long = "D")]
        distortion: f64,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long, default_value_t = 501)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded quantization sweep from a TOML config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        /// Output directory; defaults to `output_path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Optimal,
    Local,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Entropy,
    Kl,
    Rd,
    Delta,
    OmegaStar,
    EnumExact,
    EnumExponent,
    MinDist,
    Excess,
    Check,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    #[value(name = "lemma1")]
    FlipFrequency,
    #[value(name = "lemma2")]
    ExpectedGood,
    #[value(name = "lemma3")]
    SecondMoment,
    #[value(name = "lemma4")]
    ConditionalBound,
    #[value(name = "lemma5")]
    SuccessFloor,
    Shepp,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::FlipFrequency => Suite::FlipFrequency,
            SuiteArg::ExpectedGood => Suite::ExpectedGood,
            SuiteArg::SecondMoment => Suite::SecondMoment,
            SuiteArg::ConditionalBound => Suite::ConditionalBound,
            SuiteArg::SuccessFloor => Suite::SuccessFloor,
            SuiteArg::Shepp => Suite::Shepp,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn print_json(value: &Value) {
    let text = serde_json::to_string_pretty(value).expect("JSON value prints");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// Returns `false` only when a verification suite fails.
fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::GenCode {
            n,
            m,
            k,
            d,
            lambda,
            gamma,
            seed,
            out,
        } => {
            let spec = EnsembleSpec::new(n, m, k, d, lambda, gamma)?;
            let code = CompoundCode::sample(spec, seed)?;
            write_code(&code, &out)?;
            print_json(&json!({
                "prefix": out,
                "n": code.n(),
                "m": code.m(),
                "k": code.k(),
                "rank_h": code.rank_h(),
                "nullity": code.nullity(),
                "true_rate": code.true_rate(),
            }));
        }
        Command::Encode {
            code,
            source,
            random,
            seed,
            method,
            restarts,
            max_iters,
            search_seed,
        } => {
            let code = read_code(&code)?;
            let s = match (source, random, seed) {
                (Some(path), _, _) => read_source(&path, code.n())?,
                (None, true, Some(seed)) => BitVector::random(code.n(), &mut seeded(seed)),
                _ => bail!("give --source <file> or --random --seed <S>"),
            };
            let res = match method {
                Method::Optimal => encode_optimal(&code, &s)?,
                Method::Local => encode_local_search(&code, &s, restarts, max_iters, &mut seeded(search_seed))?,
            };
            print_json(&json!({
                "source": s.to_hex(),
                "z": res.z.to_hex(),
                "reconstruction": res.reconstruction.to_hex(),
                "distance": res.distance,
                "distortion": res.distortion,
                "optimal": res.optimal,
            }));
        }
        Command::Bounds { what, args } => print_json(&bounds(what, &args)?),
        Command::GapFigure {
            distortion,
            d,
            lambda,
            gamma,
            grid,
            out,
        } => {
            emit_gap_figure(distortion, d, lambda, gamma, grid, &out)?;
        }
        Command::Sweep { config, jobs, out } => {
            let cfg = ExperimentConfig::load(&config)?;
            let dir = out
                .or_else(|| cfg.output_path.clone())
                .context("no output directory: pass --out or set output_path")?;
            let outcome = run_quantization_sweep(&cfg, jobs)?;
            let (csv, summary) = write_sweep(&outcome, &cfg, &dir)?;
            print_json(&json!({
                "csv": csv,
                "summary": summary,
                "mean_distortion": outcome.summary.distortion.mean,
                "success_fraction": outcome.summary.success_fraction,
            }));
        }
        Command::Verify { suite, seed } => {
            let report = run_suite(suite.into(), seed)?;
            print_json(&serde_json::to_value(&report)?);
            eprintln!("{}: {}", report.suite, if report.passed { "PASS" } else { "FAIL" });
            return Ok(report.passed);
        }
    }
    Ok(true)
}

fn read_source(path: &Path, n: usize) -> anyhow::Result<BitVector> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(BitVector::from_hex(text.trim(), n)?)
}

fn parse_args<const N: usize>(args: &[String], names: [&str; N]) -> anyhow::Result<[f64; N]> {
    if args.len() != N {
        bail!("expected {N} argument(s) ({}), got {}", names.join(", "), args.len());
    }
    let mut out = [0.0; N];
    for (i, a) in args.iter().enumerate() {
        out[i] = a
            .parse()
            .with_context(|| format!("argument {} = {a:?} is not a number", names[i]))?;
    }
    Ok(out)
}

fn as_count(x: f64, name: &str) -> anyhow::Result<usize> {
    if x < 0.0 || x.fract() != 0.0 {
        bail!("{name} must be a nonnegative integer, got {x}");
    }
    Ok(x as usize)
}

fn bounds(what: What, args: &[String]) -> anyhow::Result<Value> {
    Ok(match what {
        What::Entropy => {
            let [t] = parse_args(args, ["t"])?;
            json!({ "value": binary_entropy(t)? })
        }
        What::Kl => {
            let [a, b] = parse_args(args, ["a", "b"])?;
            if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                bail!("both arguments must lie in [0, 1]");
            }
            json!({ "value": kl_bernoulli(a, b) })
        }
        What::Rd => {
            let [r] = parse_args(args, ["rate"])?;
            json!({ "value": rd_distortion(r) })
        }
        What::Delta => {
            let [w, d] = parse_args(args, ["omega", "d"])?;
            json!({ "value": induced_flip_prob(w, as_count(d, "d")?) })
        }
        What::OmegaStar => {
            let [dist, d] = parse_args(args, ["D", "d"])?;
            json!({ "value": critical_weight(dist, as_count(d, "d")?) })
        }
        What::EnumExact => {
            let [m, w, l, g] = parse_args(args, ["m", "w", "lambda", "gamma"])?;
            let v = weight_enum_exact(
                as_count(m, "m")?,
                as_count(w, "w")?,
                as_count(l, "lambda")?,
                as_count(g, "gamma")?,
            )?;
            json!({ "value": v.to_string(), "approx": ldq::bounds::log2_ratio(&v).exp2() })
        }
        What::EnumExponent => {
            let [w, l, g] = parse_args(args, ["omega", "lambda", "gamma"])?;
            json!({ "value": weight_enum_exponent(w, as_count(l, "lambda")?, as_count(g, "gamma")?)? })
        }
        What::MinDist => {
            let [l, g] = parse_args(args, ["lambda", "gamma"])?;
            json!({ "value": min_distance_ratio(as_count(l, "lambda")?, as_count(g, "gamma")?)? })
        }
        What::Excess => {
            let [dist, d, l, g] = parse_args(args, ["D", "d", "lambda", "gamma"])?;
            let (value, omega) = excess_rate_maximizer(
                dist,
                as_count(d, "d")?,
                as_count(l, "lambda")?,
                as_count(g, "gamma")?,
                2000,
            )?;
            json!({ "value": value, "argmax": omega })
        }
        What::Check => {
            let [rate, dist, d, l, g] = parse_args(args, ["R", "D", "d", "lambda", "gamma"])?;
            let triple = DegreeTriple::new(as_count(d, "d")?, as_count(l, "lambda")?, as_count(g, "gamma")?)?;
            serde_json::to_value(degree_check(rate, dist, triple)?)?
        }
    })
}

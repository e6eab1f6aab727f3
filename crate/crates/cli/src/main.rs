use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use bifree::acceptance::{run_all, two_atom_jumps};
use bifree::convolution::{bifree_convolve, haar_test, moment_table, Extraction};
use bifree::io::{self, IoError, TransformRecord};
use bifree::limits::{haar_limit_check, limit_sweep, normal_row, poisson_row, InfinitesimalArray, DEFAULT_CUTOFF};
use bifree::sampling::MeasureSampler;
use bifree::transforms::{
    eta, eta_inv_pointwise, h2, psi1, psi2, s_transform, sigma_op_pointwise, sigma_pointwise, DomainComponent,
};
use bifree::measure::PX_THRESHOLD;
use bifree::{id_law, AtomicMeasure2D, Error, LevyData, MomentTable2D, TransformLaw};

#[derive(Parser, Debug)]
#[command(name = "bifree", version, about = "Multiplicative bi-free convolution on the torus")]
struct Cli {
    /// Largest |p|, |q| of extracted moment tables.
    #[arg(long, global = true, default_value_t = 6)]
    order: usize,
    /// Grid points per coordinate (power of two).
    #[arg(long, global = true, default_value_t = 256)]
    grid: usize,
    /// Radius of the bounded grid circles.
    #[arg(long, global = true, default_value_t = 0.4)]
    radius: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Seed for randomly drawn evaluation points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Which {
    Psi,
    H,
    Sigma,
    S,
    SigmaOp,
    Psi1,
    Eta,
    EtaInv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a transform of a measure at given points.
    Transform {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        /// Points `re,im`; two-variable transforms take them in (z, w) pairs.
        /// A point with a leading minus sign is passed as `--at=-0.1,0`.
        #[arg(long, num_args = 1..)]
        at: Vec<String>,
        /// Additional random points inside the working window.
        #[arg(long, default_value_t = 0)]
        random: usize,
        /// Marginal used by the one-variable transforms.
        #[arg(long, default_value_t = 1)]
        coordinate: usize,
    },
    /// Moment table of the bi-free convolution of two measures.
    Convolve { first: PathBuf, second: PathBuf },
    /// Moment table of an n-fold convolution power.
    Power {
        measure: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Moment table of the infinitely divisible law of Lévy data.
    Idlaw { levy: PathBuf },
    /// Limit sweep for the normal or compound-Poisson array.
    LimitDemo {
        /// `3.5` (or `normal`) and `3.6` (or `poisson`).
        #[arg(long)]
        example: String,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![8usize, 16, 32, 64])]
        levels: Vec<usize>,
    },
    /// Haar limit check along a sequence of measures and powers.
    HaarCheck { sequence: PathBuf },
    /// Run the acceptance suite.
    Selftest,
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Domain(d) => Failure::Domain(d),
            other => Failure::Io(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Domain(Error::InvalidArgument(msg.into()))
}

fn kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| c == '(' || c == ' ' || c == '{').next().unwrap_or("").to_string()
}

fn parse_point(text: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid(format!("bad point `{text}`")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(invalid(format!("bad point `{text}`"))),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => Ok(io::write_atomic(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_measure(path: &Path) -> Result<AtomicMeasure2D, Failure> {
    Ok(io::parse_measure_2d(&io::read_text(path)?)?)
}

fn check_config(cli: &Cli) -> Result<(), Failure> {
    if cli.order * 4 > cli.grid {
        return Err(invalid(format!("order {} exceeds grid {} / 4", cli.order, cli.grid)));
    }
    if !(cli.radius > 0.0 && cli.radius < 1.0) {
        return Err(invalid(format!("radius {} must lie in (0, 1)", cli.radius)));
    }
    Ok(())
}

fn centered(mu: &AtomicMeasure2D) -> bool {
    mu.moment(1, 0).norm() <= PX_THRESHOLD && mu.moment(0, 1).norm() <= PX_THRESHOLD
}

fn emit_table(cli: &Cli, law: &TransformLaw) -> Result<(), Failure> {
    check_config(cli)?;
    let Extraction { table, diagnostics } = moment_table(law, cli.order, cli.grid, cli.radius)?;
    emit_moments(cli, &table, serde_json::to_value(&diagnostics).expect("diagnostics serialize"))
}

fn emit_moments(cli: &Cli, table: &MomentTable2D, diagnostics: serde_json::Value) -> Result<(), Failure> {
    let diag = serde_json::to_string_pretty(&diagnostics).expect("diagnostics serialize");
    match cli.format {
        Format::Csv => {
            emit(cli, &io::table_to_csv(table))?;
            match &cli.out {
                Some(path) => {
                    let mut name = path.as_os_str().to_owned();
                    name.push(".diagnostics.json");
                    io::write_atomic(Path::new(&name), &(diag + "\n"))?;
                }
                None => eprintln!("{diag}"),
            }
        }
        Format::Json => {
            let cells: Vec<_> = table.iter().map(|(p, q, v)| json!({"p": p, "q": q, "value": [v.re, v.im]})).collect();
            let doc = json!({"moments": cells, "diagnostics": diagnostics});
            emit(cli, &(serde_json::to_string_pretty(&doc).expect("table serializes") + "\n"))?;
        }
    }
    Ok(())
}

fn transform(cli: &Cli, measure: &Path, which: Which, at: &[String], random: usize, j: usize) -> Result<(), Failure> {
    let mu = load_measure(measure)?;
    if j != 1 && j != 2 {
        return Err(invalid("coordinate must be 1 or 2"));
    }
    let nu = mu.marginal(j);
    let two_variable = !matches!(which, Which::Psi1 | Which::Eta | Which::EtaInv);
    let mut points = at.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>, _>>()?;
    let needs_window = matches!(which, Which::Sigma | Which::SigmaOp | Which::EtaInv | Which::S);
    let window = if needs_window { TransformLaw::from_atomic(&mu)?.window() } else { Default::default() };
    let mut sampler = MeasureSampler::new(cli.seed);
    let per_record = if two_variable { 2 } else { 1 };
    for _ in 0..random * per_record {
        points.push(sampler.disk_point(window.r * 0.9));
    }
    if points.len() % per_record != 0 {
        return Err(invalid("two-variable transforms need an even number of points"));
    }
    let name = format!("{which:?}").to_lowercase();
    let mut records = Vec::new();
    for chunk in points.chunks(per_record) {
        let (z, w) = (chunk[0], chunk.get(1).copied().unwrap_or_default());
        let value = match which {
            Which::Psi => psi2(&mu, z, w)?,
            Which::H => h2(&mu, z, w)?,
            Which::Sigma => sigma_pointwise(&mu, z, w, &window)?,
            Which::S => s_transform(&mu, z, w, &window)?,
            Which::SigmaOp => sigma_op_pointwise(&mu, z, w, &window)?,
            Which::Psi1 => psi1(&nu, z)?,
            Which::Eta => eta(&nu, z)?,
            Which::EtaInv => eta_inv_pointwise(&nu, z, &window)?,
        };
        let component = if two_variable {
            DomainComponent::classify(z, w)?.tag().to_string()
        } else if z.norm() < 1.0 {
            "D".into()
        } else {
            "U".into()
        };
        records.push(TransformRecord::new(z, w, &name, value, &component));
    }
    emit(cli, &(serde_json::to_string_pretty(&records).expect("records serialize") + "\n"))
}

fn limit_demo(cli: &Cli, example: &str, r: f64, levels: &[usize]) -> Result<(), Failure> {
    let (rows, target) = match example {
        "3.5" | "normal" => (
            levels.iter().map(|&n| normal_row(r, n)).collect::<Result<Vec<_>, _>>()?,
            LevyData::normal(r),
        ),
        "3.6" | "poisson" => {
            let mu = two_atom_jumps();
            (
                levels.iter().map(|&n| poisson_row(r, &mu, n)).collect::<Result<Vec<_>, _>>()?,
                LevyData::poisson(r, &mu)?,
            )
        }
        other => return Err(invalid(format!("unknown example `{other}`"))),
    };
    let array = InfinitesimalArray::new(rows, DEFAULT_CUTOFF)?;
    for level in &array.warnings {
        eprintln!("warning: infinitesimality norm increases at level {level}");
    }
    let sweep = limit_sweep(&array, &target, 4)?;
    let text = match cli.format {
        Format::Csv => {
            let mut out = String::from("level,max_moment_error\n");
            for l in &sweep.levels {
                out.push_str(&format!("{},{:.16e}\n", l.level, l.error));
            }
            out
        }
        Format::Json => {
            let levels: Vec<_> = sweep.levels.iter().map(|l| json!({"level": l.level, "error": l.error})).collect();
            let doc = json!({"levels": levels, "pairwise_gap": sweep.pairwise_gap, "monotone": sweep.is_monotone()});
            serde_json::to_string_pretty(&doc).expect("sweep serializes") + "\n"
        }
    };
    emit(cli, &text)
}

fn haar_check(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let doc: serde_json::Value =
        serde_json::from_str(&io::read_text(path)?).map_err(|e| Failure::Io(format!("malformed JSON: {e}")))?;
    let levels = doc["levels"].as_array().ok_or_else(|| invalid("`levels` array is required"))?;
    let mut sequence = Vec::with_capacity(levels.len());
    for (i, level) in levels.iter().enumerate() {
        let k = level["k"].as_u64().ok_or_else(|| invalid(format!("level {i}: `k` is required")))?;
        let mu = io::parse_measure_2d(&level["measure"].to_string())?;
        sequence.push((mu, k as u32));
    }
    let max_pipeline = doc["max_pipeline"].as_u64().unwrap_or(32) as u32;
    let order = cli.order.min(4);
    let report = haar_limit_check(&sequence, order, max_pipeline)?;
    let rows: Vec<_> = report
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let decreasing = i == 0 || {
                let prev = &report.levels[i - 1];
                l.m11_power < prev.m11_power
                    && l.mean_powers[0] < prev.mean_powers[0]
                    && l.mean_powers[1] < prev.mean_powers[1]
            };
            json!({
                "k": l.k,
                "m11_power": l.m11_power,
                "mean_powers": l.mean_powers,
                "envelope": l.envelope(),
                "max_moment": l.max_moment,
                "decreasing": decreasing,
                "within_envelope": l.max_moment.map(|m| m <= 10.0 * l.envelope()),
            })
        })
        .collect();
    let out = json!({"levels": rows, "tends_to_zero": report.tends_to_zero});
    emit(cli, &(serde_json::to_string_pretty(&out).expect("report serializes") + "\n"))
}

fn run(cli: &Cli) -> Result<bool, Failure> {
    match &cli.command {
        Command::Transform {
            measure,
            which,
            at,
            random,
            coordinate,
        } => transform(cli, measure, *which, at, *random, *coordinate)?,
        Command::Convolve { first, second } => {
            let (mu1, mu2) = (load_measure(first)?, load_measure(second)?);
            if centered(&mu1) && centered(&mu2) {
                // the Σ pipeline needs nonzero means; centered pairs have a closed form
                let report = haar_test(&mu1, &mu2, cli.order)?;
                let m11: Vec<_> = report.m11.iter().map(|m| [m.re, m.im]).collect();
                emit_moments(cli, &report.table, json!({"route": "centered", "is_haar": report.is_haar, "m11": m11}))?;
            } else {
                emit_table(cli, &bifree_convolve(&mu1, &mu2)?)?;
            }
        }
        Command::Power { measure, n } => {
            if *n == 0 {
                return Err(invalid("power must be positive"));
            }
            emit_table(cli, &TransformLaw::from_atomic(&load_measure(measure)?)?.power(*n))?;
        }
        Command::Idlaw { levy } => {
            let ld = io::parse_levy(&io::read_text(levy)?)?;
            emit_table(cli, &id_law(&ld)?)?;
        }
        Command::LimitDemo { example, r, levels } => limit_demo(cli, example, *r, levels)?,
        Command::HaarCheck { sequence } => haar_check(cli, sequence)?,
        Command::Selftest => {
            let reports = run_all();
            let mut text = String::new();
            for r in &reports {
                text.push_str(&format!("{r}\n"));
            }
            emit(cli, &text)?;
            return Ok(reports.iter().all(|r| r.passed));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({"error": kind(&e), "message": e.to_string()}));
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{}", json!({"error": "Io", "message": msg}));
            ExitCode::from(2)
        }
    }
}

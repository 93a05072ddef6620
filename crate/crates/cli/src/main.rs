//! Command-line front end: exact moments, power-series coefficient tables,
//! piecewise densities, grid evaluation and Monte Carlo validation.
//!
//! Exit codes: 0 on success, 2 for invalid parameters or arguments, 3 when
//! the requested computation is outside the supported regime for the given
//! parameters. Exact quantities print as `num/den`; floating-point values
//! print with 17 significant digits.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jacobi_trace::jack::JackError;
use jacobi_trace::laplace::{hhat_series, moments, DEFAULT_ORDER};
use jacobi_trace::montecarlo::{compare, sample_traces, ChainConfig};
use jacobi_trace::params::EnsembleParams;
use jacobi_trace::scalar::{format_rational, parse_rational, Rat};
use jacobi_trace::tracedist::{
    assemble_pdf, CompiledDensity, ContinuedDensity, PiecewisePDF, TraceDistError,
};

#[derive(Parser)]
#[command(
    name = "jacobi-trace",
    about = "Distribution of the trace of the beta-Jacobi ensemble",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Matrix dimension N (positive integer).
    #[arg(long)]
    n: i64,
    /// Jacobi exponent a (rational "num/den" or decimal), a > -1.
    #[arg(long, default_value = "0")]
    a: String,
    /// Jacobi exponent b (rational "num/den" or decimal), b > -1.
    #[arg(long, default_value = "0")]
    b: String,
    /// Dyson index beta (rational "num/den" or decimal), beta >= 0.
    #[arg(long, default_value = "1")]
    beta: String,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Exact trace moments m_0..m_k.
    Moments {
        #[command(flatten)]
        common: CommonArgs,
        /// Highest moment order.
        #[arg(long, default_value_t = 4)]
        k: usize,
    },
    /// Power-series coefficient table of the Fourier-Laplace system.
    Series {
        #[command(flatten)]
        common: CommonArgs,
        /// Series truncation order.
        #[arg(long, default_value_t = DEFAULT_ORDER)]
        order: usize,
    },
    /// Exact piecewise density document.
    Pieces {
        #[command(flatten)]
        common: CommonArgs,
        /// Series order for non-polynomial (partial) pieces.
        #[arg(long)]
        order: Option<usize>,
    },
    /// Density values on an equally spaced grid over [0, N].
    Pdf {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of grid points (>= 2), endpoints included.
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Evaluate non-polynomial parameters by ordinary-point series
        /// continuation (experimental; unstable for some parameters).
        #[arg(long)]
        experimental_continuation: bool,
        /// Series order for the continuation.
        #[arg(long, default_value_t = 64)]
        order: usize,
    },
    /// Monte Carlo validation report against the exact density.
    Validate {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of recorded trace samples.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        /// Chain seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Number of histogram bins.
        #[arg(long, default_value_t = 30)]
        bins: usize,
    },
}

struct Failure {
    code: u8,
    reason: String,
}

impl Failure {
    fn invalid(reason: impl Into<String>) -> Self {
        Failure {
            code: 2,
            reason: reason.into(),
        }
    }

    fn unsupported(reason: impl Into<String>) -> Self {
        Failure {
            code: 3,
            reason: reason.into(),
        }
    }
}

impl From<TraceDistError> for Failure {
    fn from(e: TraceDistError) -> Self {
        match e {
            TraceDistError::AssemblyUnsupported { .. } => Failure::unsupported(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<JackError> for Failure {
    fn from(e: JackError) -> Self {
        Failure::invalid(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.reason);
            ExitCode::from(f.code)
        }
    }
}

fn parse_params(common: &CommonArgs) -> Result<EnsembleParams, Failure> {
    let parse = |name: &str, text: &str| -> Result<Rat, Failure> {
        parse_rational(text).map_err(|e| Failure::invalid(format!("{name}: {e}")))
    };
    let a = parse("a", &common.a)?;
    let b = parse("b", &common.b)?;
    let beta = parse("beta", &common.beta)?;
    EnsembleParams::new(common.n, a, b, beta).map_err(|e| Failure::invalid(e.to_string()))
}

fn emit(common: &CommonArgs, text: String) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, text.as_bytes())
            .map_err(|e| Failure::invalid(format!("cannot write {path}: {e}"))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| {
                    if text.ends_with('\n') {
                        Ok(())
                    } else {
                        stdout.write_all(b"\n")
                    }
                })
                .map_err(|e| Failure::invalid(format!("write failed: {e}")))
        }
    }
}

fn params_json(params: &EnsembleParams) -> serde_json::Value {
    json!({
        "N": params.n(),
        "a": format_rational(params.a()),
        "b": format_rational(params.b()),
        "beta": format_rational(params.beta()),
    })
}

/// 17 significant digits: enough to round-trip an f64 exactly.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Moments { common, k } => {
            let params = parse_params(&common)?;
            let m = moments(&params, k);
            let text = match common.format {
                Format::Json => {
                    let doc = json!({
                        "params": params_json(&params),
                        "moments": m.iter().map(format_rational).collect::<Vec<_>>(),
                    });
                    serde_json::to_string_pretty(&doc).expect("serializable")
                }
                Format::Csv => {
                    let mut out = String::from("k,moment\n");
                    for (i, v) in m.iter().enumerate() {
                        out.push_str(&format!("{i},{}\n", format_rational(v)));
                    }
                    out
                }
            };
            emit(&common, text)
        }
        Command::Series { common, order } => {
            let params = parse_params(&common)?;
            let table = hhat_series(&params, order);
            let text = match common.format {
                Format::Json => {
                    let rows: Vec<serde_json::Value> = (0..=table.n())
                        .map(|p| match table.row(p) {
                            Some(row) => {
                                json!(row.iter().map(format_rational).collect::<Vec<_>>())
                            }
                            None => serde_json::Value::Null,
                        })
                        .collect();
                    let doc = json!({
                        "params": params_json(&params),
                        "order": order,
                        "c": rows,
                    });
                    serde_json::to_string_pretty(&doc).expect("serializable")
                }
                Format::Csv => {
                    let mut out = String::from("p,l,c\n");
                    for p in 0..=table.n() {
                        if let Some(row) = table.row(p) {
                            for (l, v) in row.iter().enumerate() {
                                out.push_str(&format!("{p},{l},{}\n", format_rational(v)));
                            }
                        }
                    }
                    out
                }
            };
            emit(&common, text)
        }
        Command::Pieces { common, order } => {
            let params = parse_params(&common)?;
            if !params.assembly_ok() {
                return Err(Failure::unsupported(format!(
                    "piecewise assembly requires b and beta to be nonnegative integers (b = {}, beta = {})",
                    format_rational(params.b()),
                    format_rational(params.beta()),
                )));
            }
            let pdf = assemble_pdf(&params, order)?;
            let text = match common.format {
                Format::Json => pdf.to_json()?,
                Format::Csv => {
                    let mut out = String::from("p,gamma,weight,k,coeff\n");
                    for piece in pdf.pieces() {
                        let w = piece.weight_rational().map_err(TraceDistError::from)?;
                        for (k, c) in piece.f.iter().enumerate() {
                            out.push_str(&format!(
                                "{},{},{},{k},{}\n",
                                piece.p,
                                format_rational(&piece.gamma),
                                format_rational(&w),
                                format_rational(c)
                            ));
                        }
                    }
                    out
                }
            };
            emit(&common, text)
        }
        Command::Pdf {
            common,
            grid,
            experimental_continuation,
            order,
        } => {
            let params = parse_params(&common)?;
            if grid < 2 {
                return Err(Failure::invalid("grid must have at least 2 points"));
            }
            if !params.assembly_ok() {
                return Err(Failure::unsupported(format!(
                    "density evaluation requires b and beta to be nonnegative integers (b = {}, beta = {})",
                    format_rational(params.b()),
                    format_rational(params.beta()),
                )));
            }
            let n = params.n() as f64;
            let points: Vec<f64> = (0..grid)
                .map(|i| n * i as f64 / (grid as f64 - 1.0))
                .collect();
            let values: Vec<f64> = if params.polynomial_ok() {
                let pdf = assemble_pdf(&params, None)?;
                let compiled = CompiledDensity::new(&pdf)?;
                points
                    .iter()
                    .map(|t| compiled.eval(*t))
                    .collect::<Result<_, _>>()?
            } else if experimental_continuation {
                let dens = ContinuedDensity::build(&params, order)?;
                points
                    .iter()
                    .map(|t| dens.eval(*t))
                    .collect::<Result<_, _>>()?
            } else {
                return Err(Failure::unsupported(
                    "a is not a nonnegative integer: the pieces are truncated series valid only \
                     near each breakpoint; pass --experimental-continuation to evaluate anyway",
                ));
            };
            let text = match common.format {
                Format::Json => {
                    let doc = json!({
                        "params": params_json(&params),
                        "grid": points
                            .iter()
                            .zip(&values)
                            .map(|(t, v)| json!({"t": t, "pdf": v}))
                            .collect::<Vec<_>>(),
                    });
                    serde_json::to_string_pretty(&doc).expect("serializable")
                }
                Format::Csv => {
                    let mut out = String::from("t,pdf\n");
                    for (t, v) in points.iter().zip(&values) {
                        out.push_str(&format!("{},{}\n", fmt_f64(*t), fmt_f64(*v)));
                    }
                    out
                }
            };
            emit(&common, text)
        }
        Command::Validate {
            common,
            samples,
            seed,
            bins,
        } => {
            let params = parse_params(&common)?;
            if !params.polynomial_ok() {
                return Err(Failure::unsupported(
                    "validation compares against the exact density and requires a, b, beta \
                     to be nonnegative integers",
                ));
            }
            let pdf: PiecewisePDF = assemble_pdf(&params, None)?;
            let config = ChainConfig {
                n_samples: samples,
                seed,
                ..ChainConfig::default()
            };
            let traces = sample_traces(&params, &config);
            let report = compare(&traces, &pdf, bins)
                .map_err(|e| Failure::invalid(e.to_string()))?;
            let text = match common.format {
                Format::Json => {
                    let doc = json!({
                        "params": params_json(&params),
                        "config": config,
                        "report": report,
                    });
                    serde_json::to_string_pretty(&doc).expect("serializable")
                }
                Format::Csv => {
                    // Histogram in plottable form.
                    let mut out = String::from("bin_center,density,exact_density\n");
                    for bin in &report.bins {
                        let width = bin.hi - bin.lo;
                        out.push_str(&format!(
                            "{},{},{}\n",
                            fmt_f64(0.5 * (bin.lo + bin.hi)),
                            fmt_f64(bin.observed / width),
                            fmt_f64(bin.expected / width)
                        ));
                    }
                    out
                }
            };
            emit(&common, text)
        }
    }
}

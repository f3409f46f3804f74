use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use free_stein::closedform::{ClosedFormInput, ClosedFormRegistry};
use free_stein::ncalg::serial::tuple_from_value;
use free_stein::ncalg::system::cap_from_env;
use free_stein::ncalg::{parse_tuple, NCPoly};
use free_stein::stein::{
    alpha_estimate, discrepancy, irregularity_estimate, radius_sweep, sigma_exact, AlphaOptions,
    DegreeScheme, DiscrepancyReport, SigmaReport, SCHEMA,
};
use free_stein::trace::{load_model_file, TraceModel};

mod output;

use output::{CsvRow, Sink};

/// Free Stein discrepancy, irregularity and dimension of noncommutative random variables.
#[derive(Parser, Debug)]
#[command(name = "free-stein", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Also write `parameter,value,diagnostics` rows here.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    /// Worker threads for Gram assembly (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Recorded in the report so runs can be reproduced.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Gram condition numbers above this produce exit code 3.
    #[arg(long, global = true, default_value_t = 1e12)]
    max_condition: f64,
}

#[derive(Args, Debug, Clone)]
struct Degrees {
    /// Degree bound for the entries of candidate Ξ.
    #[arg(long, default_value_t = 1)]
    dxi: usize,

    /// Degree bound for the projection range (default: dxi + 2).
    #[arg(long)]
    dproj: Option<usize>,
}

impl Degrees {
    fn scheme(&self) -> DegreeScheme {
        match self.dproj {
            Some(p) => DegreeScheme::new(self.dxi, p),
            None => DegreeScheme::with_default_proj(self.dxi),
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Estimate,
    Exact,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Σ*(X | Ξ) for a given Ξ.
    Discrepancy {
        #[arg(long)]
        model: PathBuf,
        /// Ξ as polynomial text such as "(t1, 2*t2)", or @file holding text or JSON.
        #[arg(long)]
        xi: String,
        #[command(flatten)]
        degrees: Degrees,
    },
    /// Σ*(X) and σ(X) from the truncated Gram system.
    Irregularity {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        degrees: Degrees,
    },
    /// Σ*_R(X) for each radius.
    Bounded {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[command(flatten)]
        degrees: Degrees,
    },
    /// σ(X) of a matrix model (or a free product of them) through its relation module.
    SigmaExact {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// A registered closed-form evaluator.
    ClosedForm {
        /// Evaluator name; `list` prints the registry.
        which: String,
        #[arg(long)]
        model: Option<PathBuf>,
        /// JSON parameter object, inline or @file.
        #[arg(long)]
        params: Option<String>,
    },
    /// σ over increasing degrees: dxi = 1..=max (estimate) or d = 1..=max (exact).
    SweepDegree {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 3)]
        max: usize,
        #[arg(long, value_enum, default_value_t = Mode::Estimate)]
        mode: Mode,
        /// Fixed projection degree; by default dxi + 2 at every step.
        #[arg(long)]
        dproj: Option<usize>,
    },
    /// Σ*_R(X) over a radius grid, as CSV, with convexity and decay diagnostics.
    SweepRadius {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        radii: Vec<f64>,
        #[command(flatten)]
        degrees: Degrees,
    },
    /// Decay exponent of R ↦ Σ*_R from a sweep CSV or a fresh sweep.
    Alpha {
        /// CSV with `parameter,value` columns, as written by sweep-radius.
        #[arg(long, conflicts_with_all = ["model", "radii"])]
        sweep: Option<PathBuf>,
        #[arg(long, requires = "radii")]
        model: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[command(flatten)]
        degrees: Degrees,
        /// Values at or below this count as zero.
        #[arg(long, default_value_t = 1e-8)]
        zero_tol: f64,
        /// Replacement for zero values before taking logarithms.
        #[arg(long, default_value_t = 1e-12)]
        floor: f64,
    },
}

/// What the run produced besides its reports.
struct Outcome {
    worst_condition: f64,
}

impl Outcome {
    fn clean() -> Self {
        Outcome { worst_condition: 1.0 }
    }

    fn with(conds: impl IntoIterator<Item = f64>) -> Self {
        Outcome {
            worst_condition: conds.into_iter().fold(1.0, f64::max),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) if out.worst_condition > cli.max_condition => {
            eprintln!(
                "warning: Gram condition {:.3e} exceeds {:.3e}; results may be unreliable",
                out.worst_condition, cli.max_condition
            );
            ExitCode::from(3)
        }
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<free_stein::Error>() {
        Some(free_stein::Error::Io(_)) => 2,
        Some(fe) if fe.is_validation() => 2,
        Some(_) => 1,
        None if e.downcast_ref::<Usage>().is_some() => 2,
        None if e.downcast_ref::<std::io::Error>().is_some() => 2,
        None if e.downcast_ref::<csv::Error>().is_some() => 2,
        None => 1,
    }
}

/// A bad flag combination or input file detected by the front end.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn load(path: &Path) -> anyhow::Result<Arc<dyn TraceModel>> {
    let cap = cap_from_env()?;
    load_model_file(path, cap).with_context(|| format!("loading model {}", path.display()))
}

/// Inline text, or the contents of the file after `@`.
fn inline_or_file(arg: &str) -> anyhow::Result<String> {
    match arg.strip_prefix('@') {
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("reading {p}")),
        None => Ok(arg.to_string()),
    }
}

fn parse_xi(arg: &str, m: &dyn TraceModel) -> anyhow::Result<Vec<NCPoly>> {
    let text = inline_or_file(arg)?;
    let sys = m.system();
    let xi = match serde_json::from_str::<Value>(&text) {
        Ok(v) if v.is_array() => tuple_from_value(&v, sys)?,
        _ => parse_tuple(text.trim(), sys)?,
    };
    Ok(xi)
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut sink = Sink::new(cli.out.clone(), cli.csv.clone(), cli.seed);
    match &cli.command {
        Command::Discrepancy { model, xi, degrees } => {
            let m = load(model)?;
            let xi = parse_xi(xi, m.as_ref())?;
            let r = discrepancy(m.as_ref(), &xi, &degrees.scheme())?;
            sink.rows.push(discrepancy_row("discrepancy", &r));
            sink.finish_json(r.to_json())?;
            Ok(Outcome::with([r.gram_condition]))
        }
        Command::Irregularity { model, degrees } => {
            let m = load(model)?;
            let r = irregularity_estimate(m.as_ref(), &degrees.scheme())?;
            sink.rows.extend(trail_rows(&r));
            sink.finish_json(r.to_json())?;
            Ok(Outcome::with([r.gram_condition]))
        }
        Command::Bounded { model, radii, degrees } => {
            let m = load(model)?;
            let reports = radius_sweep(m.as_ref(), &degrees.scheme(), radii)?;
            for r in &reports {
                sink.rows.push(discrepancy_row(&fmt_num(r.radius.unwrap_or(f64::NAN)), r));
            }
            let conds: Vec<f64> = reports.iter().map(|r| r.gram_condition).collect();
            let body: Vec<Value> = reports.iter().map(DiscrepancyReport::to_json).collect();
            sink.finish_json(json!({"schema": SCHEMA, "reports": body}))?;
            Ok(Outcome::with(conds))
        }
        Command::SigmaExact { model, d } => {
            let m = load(model)?;
            let r = sigma_exact(m.as_ref(), *d)?;
            sink.rows.extend(trail_rows(&r));
            sink.finish_json(r.to_json())?;
            Ok(Outcome::with([r.gram_condition]))
        }
        Command::ClosedForm {
            which,
            model,
            params,
        } => {
            let registry = ClosedFormRegistry::default();
            if which == "list" {
                let forms: Vec<Value> = registry
                    .names()
                    .into_iter()
                    .map(|n| json!({"name": n, "summary": registry.get(n).map(|f| f.summary())}))
                    .collect();
                sink.finish_json(json!({"schema": SCHEMA, "closed_forms": forms}))?;
                return Ok(Outcome::clean());
            }
            let m = model.as_deref().map(load).transpose()?;
            let params: Value = match params {
                Some(p) => serde_json::from_str(&inline_or_file(p)?)
                    .map_err(|e| usage(format!("--params is not valid JSON: {e}")))?,
                None => json!({}),
            };
            let input = ClosedFormInput {
                model: m.as_deref(),
                params: &params,
            };
            let v = registry.evaluate(which, &input)?;
            if let Some(s) = v.get("sigma").and_then(Value::as_f64) {
                sink.rows.push(CsvRow::new(which, s, ""));
            }
            sink.finish_json(v)?;
            Ok(Outcome::clean())
        }
        Command::SweepDegree {
            model,
            max,
            mode,
            dproj,
        } => {
            let m = load(model)?;
            if *max == 0 {
                return Err(usage("--max must be at least 1"));
            }
            let r = match mode {
                Mode::Exact => sigma_exact(m.as_ref(), *max)?,
                Mode::Estimate => {
                    let scheme = match dproj {
                        Some(p) => DegreeScheme::new(*max, *p),
                        None => DegreeScheme::with_default_proj(*max),
                    };
                    irregularity_estimate(m.as_ref(), &scheme)?
                }
            };
            let monotone = r.trail.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
            sink.rows.extend(trail_rows(&r));
            let mut body = r.to_json();
            body["trail_nonincreasing"] = json!(monotone);
            sink.finish_sweep(body)?;
            Ok(Outcome::with([r.gram_condition]))
        }
        Command::SweepRadius { model, radii, degrees } => {
            let m = load(model)?;
            let reports = radius_sweep(m.as_ref(), &degrees.scheme(), radii)?;
            let pts: Vec<(f64, f64)> = reports
                .iter()
                .map(|r| (r.radius.unwrap_or(f64::NAN), r.value))
                .collect();
            for r in &reports {
                sink.rows.push(discrepancy_row(&fmt_num(r.radius.unwrap_or(f64::NAN)), r));
            }
            let alpha = alpha_estimate(&pts, AlphaOptions::default()).ok();
            let body = json!({
                "schema": SCHEMA,
                "scheme": degrees.scheme(),
                "points": pts.iter().map(|(r, v)| json!({"radius": r, "value": v})).collect::<Vec<_>>(),
                "convex": convex(&pts, 1e-8),
                "nonincreasing": pts.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-10),
                "alpha": alpha.map(|a| alpha_json(&a)),
            });
            sink.finish_sweep(body)?;
            Ok(Outcome::with(reports.iter().map(|r| r.gram_condition)))
        }
        Command::Alpha {
            sweep,
            model,
            radii,
            degrees,
            zero_tol,
            floor,
        } => {
            let (pts, conds) = match (sweep, model, radii) {
                (Some(path), _, _) => (output::read_sweep(path)?, Vec::new()),
                (None, Some(model), Some(radii)) => {
                    let m = load(model)?;
                    let reports = radius_sweep(m.as_ref(), &degrees.scheme(), radii)?;
                    let pts = reports
                        .iter()
                        .map(|r| (r.radius.unwrap_or(f64::NAN), r.value))
                        .collect();
                    (pts, reports.iter().map(|r| r.gram_condition).collect())
                }
                _ => return Err(usage("alpha needs --sweep FILE or --model with --radii")),
            };
            let opts = AlphaOptions {
                zero_tol: *zero_tol,
                floor: *floor,
            };
            let a = alpha_estimate(&pts, opts)?;
            sink.rows.push(CsvRow::new(
                "alpha",
                a.alpha,
                &format!("window={}", a.window.len()),
            ));
            let mut body = alpha_json(&a);
            body["schema"] = json!(SCHEMA);
            sink.finish_json(body)?;
            Ok(Outcome::with(conds))
        }
    }
}

/// JSON has no infinities, so `−∞` is reported as null with a flag.
fn alpha_json(a: &free_stein::stein::AlphaReport) -> Value {
    let finite = a.alpha.is_finite();
    json!({
        "alpha": if finite { json!(a.alpha) } else { Value::Null },
        "alpha_is_neg_infinity": !finite,
        "window": a.window,
        "floored": a.floored,
    })
}

fn convex(pts: &[(f64, f64)], slack: f64) -> bool {
    pts.windows(3).all(|w| {
        let (r0, v0) = w[0];
        let (r1, v1) = w[1];
        let (r2, v2) = w[2];
        let t = (r1 - r0) / (r2 - r0);
        v1 <= (1.0 - t) * v0 + t * v2 + slack
    })
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn discrepancy_row(param: &str, r: &DiscrepancyReport) -> CsvRow {
    let mut diag = format!("gram_condition={:.6e};gram_rank={}", r.gram_condition, r.gram_rank);
    if let Some(i) = r.interior {
        diag.push_str(&format!(";interior={i}"));
    }
    if let Some(n) = r.xi_norm {
        diag.push_str(&format!(";xi_norm={n:.12}"));
    }
    CsvRow::new(param, r.value, &diag)
}

fn trail_rows(r: &SigmaReport) -> Vec<CsvRow> {
    r.trail
        .iter()
        .map(|(d, s)| CsvRow::new(&d.to_string(), *s, &format!("n={}", r.n)))
        .collect()
}

//! `gridnet` command-line driver: yearly metrics, time series, degree fits,
//! correlations, generators and community detection.

mod output;

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gridnet::communities::{detect_communities_with_restarts, exhaustive_best_partition};
use gridnet::degree_fit::{compare_fits, fit_model, Ccdf, ModelKind, Preference};
use gridnet::evolution::{analyze_snapshot, compute_timeseries, correlate, Metric};
use gridnet::generators::GeneratorSpec;
use gridnet::grid_log::{TemporalGridLog, Year};
use gridnet::{build_snapshot, GraphSnapshot, MetricsRecord};
use serde_json::json;

use output::{emit, full};

#[derive(Parser, Debug)]
#[command(
    name = "gridnet",
    version,
    about = "Temporal network metrics for grid event logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Metrics for one yearly snapshot or edge-list graph
    Snapshot {
        #[command(flatten)]
        input: GraphInput,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// One metrics row per year
    Timeseries {
        #[command(flatten)]
        log: LogInput,
        #[command(flatten)]
        range: YearRange,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Fit power-law and/or exponential curves to the degree CCDF
    Fit {
        #[command(flatten)]
        input: GraphInput,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, value_enum, default_value_t = ModelChoice::Compare)]
        model: ModelChoice,
        /// Also write the fitted `k,p` CCDF points here
        #[arg(long)]
        ccdf_out: Option<PathBuf>,
    },
    /// Pearson r between a metric and the high-voltage line count
    Correlate {
        #[command(flatten)]
        log: LogInput,
        #[command(flatten)]
        range: YearRange,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value = "sigma")]
        metric: Metric,
        /// Voltage levels to count, e.g. 220,400 (default: every level in the log)
        #[arg(long, value_delimiter = ',')]
        voltages: Vec<u32>,
        /// Count only lines flagged domestic
        #[arg(long)]
        domestic_only: bool,
        /// Write the paired `year,<metric>,lines` series here
        #[arg(long)]
        series_out: Option<PathBuf>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Generate a random reference graph as an edge list
    Generate {
        #[arg(long, value_enum)]
        kind: GeneratorKind,
        #[arg(long)]
        n: usize,
        /// Edge probability (er) or rewiring probability (ws)
        #[arg(long)]
        p: Option<f64>,
        /// Ring lattice degree (ws)
        #[arg(long)]
        k: Option<usize>,
        /// Edges per new node (ba)
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Modularity-maximising community assignment
    Communities {
        #[command(flatten)]
        input: GraphInput,
        #[command(flatten)]
        out: OutputArgs,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        /// Search every partition instead (at most 12 nodes)
        #[arg(long)]
        exhaustive: bool,
    },
}

#[derive(Args, Debug)]
struct LogInput {
    #[arg(long, default_value = "nodes.csv")]
    nodes: PathBuf,
    #[arg(long, default_value = "edges.csv")]
    edges: PathBuf,
}

#[derive(Args, Debug)]
struct GraphInput {
    #[command(flatten)]
    log: LogInput,
    /// Snapshot year taken from the log
    #[arg(long, conflicts_with = "edge_list")]
    year: Option<Year>,
    /// Read a single graph in `id_a id_b` edge-list form instead of a log
    #[arg(long)]
    edge_list: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct YearRange {
    /// First year (default: first year in the log)
    #[arg(long)]
    from: Option<Year>,
    /// Last year, inclusive (default: last year in the log)
    #[arg(long)]
    to: Option<Year>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output file, written atomically (default: standard output)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModelChoice {
    PowerLaw,
    Exponential,
    Compare,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GeneratorKind {
    Er,
    Ws,
    Ba,
}

impl LogInput {
    fn load(&self) -> Result<TemporalGridLog> {
        let nodes = read(&self.nodes)?;
        let edges = read(&self.edges)?;
        TemporalGridLog::parse_str(&nodes, &edges)
            .with_context(|| format!("{} / {}", self.nodes.display(), self.edges.display()))
    }
}

impl GraphInput {
    fn load(&self) -> Result<GraphSnapshot> {
        if let Some(path) = &self.edge_list {
            return GraphSnapshot::from_edge_list(&read(path)?)
                .with_context(|| path.display().to_string());
        }
        let Some(year) = self.year else {
            bail!("either --year or --edge-list is required");
        };
        Ok(build_snapshot(&self.log.load()?, year))
    }
}

impl YearRange {
    fn resolve(&self, log: &TemporalGridLog) -> Result<(Year, Year)> {
        let span = log.year_range();
        let from = self.from.or(span.as_ref().map(|r| *r.start()));
        let to = self.to.or(span.as_ref().map(|r| *r.end()));
        match (from, to) {
            (Some(from), Some(to)) if from <= to => Ok((from, to)),
            (Some(from), Some(to)) => bail!("--from {from} is after --to {to}"),
            _ => bail!("log is empty; pass --from and --to"),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn records_output(records: &[MetricsRecord], format: Format) -> Result<String> {
    Ok(match format {
        Format::Csv => {
            let mut s = MetricsRecord::csv_header();
            s.push('\n');
            for r in records {
                s.push_str(&r.csv_row());
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records)?;
            s.push('\n');
            s
        }
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Snapshot { input, out, seed } => {
            let g = input.load()?;
            let record = analyze_snapshot(&g, seed);
            let text = match out.format {
                Format::Csv => records_output(std::slice::from_ref(&record), Format::Csv)?,
                Format::Json => serde_json::to_string_pretty(&record)? + "\n",
            };
            emit(out.out.as_deref(), &text)
        }
        Command::Timeseries {
            log,
            range,
            out,
            seed,
        } => {
            let log = log.load()?;
            let (from, to) = range.resolve(&log)?;
            let series = compute_timeseries(&log, from..=to, seed)?;
            emit(
                out.out.as_deref(),
                &records_output(series.records(), out.format)?,
            )
        }
        Command::Fit {
            input,
            out,
            model,
            ccdf_out,
        } => {
            let g = input.load()?;
            let ccdf = Ccdf::from_degrees(&g.degrees()).context("degree distribution")?;
            let text = fit_output(&ccdf, model, out.format)?;
            if let Some(path) = ccdf_out {
                emit(Some(&path), &ccdf.to_csv())?;
            }
            emit(out.out.as_deref(), &text)
        }
        Command::Correlate {
            log,
            range,
            out,
            metric,
            voltages,
            domestic_only,
            series_out,
            seed,
        } => {
            let log = log.load()?;
            let (from, to) = range.resolve(&log)?;
            let voltages: BTreeSet<u32> = if voltages.is_empty() {
                log.edges().iter().map(|e| e.voltage_kv).collect()
            } else {
                voltages.into_iter().collect()
            };
            let series = compute_timeseries(&log, from..=to, seed)?;
            let lines = log.line_count_series(&voltages, domestic_only, from..=to)?;
            let years = series.years();
            let values = series.metric(metric);
            let counts: Vec<Option<f64>> = lines.iter().map(|&(_, c)| Some(c as f64)).collect();
            if let Some(path) = series_out {
                let mut s = format!("year,{metric},lines\n");
                for ((year, v), (_, c)) in years.iter().zip(&values).zip(&lines) {
                    let _ = writeln!(s, "{year},{},{c}", full(*v));
                }
                emit(Some(&path), &s)?;
            }
            let report = correlate(&years, &values, &counts)
                .with_context(|| format!("correlating {metric} with line count"))?;
            let voltage_list = voltages
                .iter()
                .map(u32::to_string)
                .collect::<Vec<_>>()
                .join(",");
            let text = match out.format {
                Format::Csv => {
                    let dropped = report
                        .dropped_years
                        .iter()
                        .map(i32::to_string)
                        .collect::<Vec<_>>()
                        .join(" ");
                    format!(
                        "metric={metric}\nvoltages={voltage_list}\ndomestic_only={domestic_only}\n\
                         from={from}\nto={to}\npairs={}\ndropped_years={dropped}\nr={}\n",
                        report.pairs, report.r
                    )
                }
                Format::Json => {
                    let v = json!({
                        "metric": metric.column(),
                        "voltages": voltages,
                        "domestic_only": domestic_only,
                        "from": from,
                        "to": to,
                        "pairs": report.pairs,
                        "dropped_years": report.dropped_years,
                        "r": report.r,
                    });
                    serde_json::to_string_pretty(&v)? + "\n"
                }
            };
            emit(out.out.as_deref(), &text)
        }
        Command::Generate {
            kind,
            n,
            p,
            k,
            m,
            seed,
            out,
        } => {
            let spec = match kind {
                GeneratorKind::Er => GeneratorSpec::ErdosRenyi {
                    n,
                    p: required(p, "p", kind)?,
                },
                GeneratorKind::Ws => GeneratorSpec::WattsStrogatz {
                    n,
                    k: required(k, "k", kind)?,
                    p: required(p, "p", kind)?,
                },
                GeneratorKind::Ba => GeneratorSpec::BarabasiAlbert {
                    n,
                    m: required(m, "m", kind)?,
                },
            };
            let g = spec.generate(seed)?;
            let text = format!("# {spec} seed={seed}\n{}", g.to_edge_list());
            emit(out.as_deref(), &text)
        }
        Command::Communities {
            input,
            out,
            seed,
            restarts,
            exhaustive,
        } => {
            let g = input.load()?;
            let found = if exhaustive {
                exhaustive_best_partition(&g)?
            } else {
                detect_communities_with_restarts(&g, seed, restarts)?
            };
            let text = match out.format {
                Format::Csv => found.to_csv(&g),
                Format::Json => {
                    let members: Vec<Vec<&str>> = found
                        .communities()
                        .iter()
                        .map(|c| c.iter().map(|&i| g.id(i)).collect())
                        .collect();
                    let v = json!({
                        "method": found.method,
                        "seed": found.seed,
                        "achieved_q": found.achieved_q,
                        "communities": members,
                    });
                    serde_json::to_string_pretty(&v)? + "\n"
                }
            };
            emit(out.out.as_deref(), &text)
        }
    }
}

fn required<T>(value: Option<T>, flag: &str, kind: GeneratorKind) -> Result<T> {
    let kind = format!("{kind:?}").to_lowercase();
    value.with_context(|| format!("--{flag} is required for --kind {kind}"))
}

fn fit_output(ccdf: &Ccdf, model: ModelChoice, format: Format) -> Result<String> {
    let single = match model {
        ModelChoice::PowerLaw => Some(ModelKind::PowerLaw),
        ModelChoice::Exponential => Some(ModelKind::Exponential),
        ModelChoice::Compare => None,
    };
    if let Some(kind) = single {
        let fit = fit_model(ccdf, kind).with_context(|| format!("{kind} fit"))?;
        return Ok(match format {
            Format::Json => serde_json::to_string_pretty(&fit)? + "\n",
            Format::Csv => format!(
                "model,a,gamma_or_kappa,sse,r_squared\n{},{},{},{},{}\n",
                fit.model, fit.prefactor, fit.scale, fit.sse, fit.r_squared
            ),
        });
    }
    let cmp = compare_fits(ccdf).context("fit comparison")?;
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(&cmp)? + "\n",
        Format::Csv => {
            let mut s =
                String::from("model,a,gamma_or_kappa,sse,r_squared,tail_misfit,preferred\n");
            for (fit, pref) in [
                (&cmp.power_law, Preference::PowerLaw),
                (&cmp.exponential, Preference::Exponential),
            ] {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    fit.model,
                    fit.prefactor,
                    fit.scale,
                    fit.sse,
                    fit.r_squared,
                    cmp.tail_misfit(fit.model),
                    cmp.preferred == pref
                );
            }
            s
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let line = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("{}", line.trim());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

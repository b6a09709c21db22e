use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use trajgroup::gen::{self, FlockConfig};
use trajgroup::io::{self, GroupRecord, IoError, ResampleOptions};
use trajgroup::query::{query, Answer, Query, QueryError, QueryKind};
use trajgroup::{fixtures, run_pipeline, Dataset, MaximalGroup, Params, PipelineError};

#[derive(Parser, Debug)]
#[command(name = "trajgroup", version, about = "Maximal groups and Reeb graphs of moving entities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the maximal groups and the reduced Reeb graph.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write the (robust) Reeb graph.
    Export {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Only keep the edges that support a reported group.
        #[arg(long)]
        reduced: bool,
    },
    /// Answer one question about the maximal groups.
    Query {
        #[command(flatten)]
        common: Common,
        /// largest-at, longest-at, ungrouped-count, first-start-after,
        /// first-end-after, total-grouped-time or max-partners
        #[arg(long)]
        kind: String,
        #[arg(long)]
        time: Option<f64>,
        /// Entity id for total-grouped-time and max-partners.
        #[arg(long)]
        entity: Option<String>,
    },
    /// Write a synthetic dataset as `entity_id,t,x,y` CSV.
    Generate {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        tau: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        world_size: Option<f64>,
        #[arg(long)]
        jitter: Option<f64>,
        #[arg(long, default_value = "-")]
        output: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// CSV file with rows `entity_id,t,x,y`; `-` reads stdin.
    #[arg(long, default_value = "-")]
    input: PathBuf,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1)]
    group_size: usize,
    #[arg(long, default_value_t = 0.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Resample every trajectory with this step.
    #[arg(long)]
    dt: Option<f64>,
    /// Resampling window as `start:end`; defaults to the common window.
    #[arg(long, value_parser = parse_window)]
    window: Option<(f64, f64)>,
    /// Drop entities that do not cover the resampling window.
    #[arg(long)]
    clip: bool,
    /// List entity ids on DOT edges.
    #[arg(long)]
    verbose: bool,
    /// Output file; `-` writes stdout.
    #[arg(long, default_value = "-")]
    output: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Dot,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Model {
    Flock,
    Quadratic,
    Cubic,
    Figure2,
    Figure5,
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected start:end")?;
    let a: f64 = a.trim().parse().map_err(|_| format!("bad start {a:?}"))?;
    let b: f64 = b.trim().parse().map_err(|_| format!("bad end {b:?}"))?;
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Data(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::UnknownQuery(_) | QueryError::MissingArgument(..) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Data(format!("cannot read stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("cannot read {}: {e}", path.display())))?;
    }
    Ok(text)
}

fn write_output(path: &PathBuf, text: &str) -> Result<(), Failure> {
    let result = if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush())
    } else {
        std::fs::write(path, text)
    };
    result.map_err(|e| Failure::Data(format!("cannot write {}: {e}", path.display())))
}

fn load(common: &Common) -> Result<Dataset, Failure> {
    let raw = io::read_csv::<f64, _>(read_input(&common.input)?.as_bytes())?;
    let ds = match common.dt {
        Some(dt) => io::resample(&raw, &ResampleOptions { dt, window: common.window, clip: common.clip })?,
        None => raw.to_dataset()?,
    };
    Ok(ds)
}

fn params(common: &Common) -> Result<Params, Failure> {
    Params::new(common.eps, common.group_size, common.duration, common.alpha).map_err(|e| Failure::Usage(e.to_string()))
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON value serializes");
    s.push('\n');
    s
}

fn group_json(ids: &[String], g: Option<&MaximalGroup>) -> serde_json::Value {
    match g {
        Some(g) => {
            let rec: GroupRecord = io::group_records(ids, std::slice::from_ref(g)).remove(0);
            serde_json::to_value(rec).expect("group record serializes")
        }
        None => serde_json::Value::Null,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze { common, format } => {
            let ds = load(&common)?;
            let out = run_pipeline(&ds, &params(&common)?)?;
            let ids = ds.ids();
            let text = match format {
                Format::Json => pretty(&json!({
                    "groups": io::group_records(ids, &out.groups),
                    "reduced_reeb": io::reeb_record(ids, &out.reduced),
                })),
                Format::Csv => io::groups_to_csv(ids, &out.groups),
                Format::Dot => io::reeb_to_dot(ids, &out.reduced, common.verbose),
            };
            write_output(&common.output, &text)
        }
        Command::Export { common, format, reduced } => {
            let ds = load(&common)?;
            let out = run_pipeline(&ds, &params(&common)?)?;
            let graph = if reduced { &out.reduced } else { &out.robust_reeb };
            let text = match format {
                Format::Json => io::reeb_to_json(ds.ids(), graph) + "\n",
                Format::Dot => io::reeb_to_dot(ds.ids(), graph, common.verbose),
                Format::Csv => return Err(Failure::Usage("export supports json and dot".into())),
            };
            write_output(&common.output, &text)
        }
        Command::Query { common, kind, time, entity } => {
            let kind: QueryKind = kind.parse()?;
            let ds = load(&common)?;
            let ids = ds.ids();
            let entity_index = match &entity {
                Some(name) => Some(
                    ids.iter().position(|i| i == name).ok_or_else(|| Failure::Data(format!("unknown entity id {name:?}")))?,
                ),
                None => None,
            };
            let q = Query::new(kind, time, entity_index)?;
            let out = run_pipeline(&ds, &params(&common)?)?;
            let answer = query(&out.groups, &out.robust_reeb, q)?;
            let mut value = json!({ "query": kind.name() });
            if kind.takes_entity() {
                value["entity"] = json!(entity);
            } else {
                value["time"] = json!(time);
            }
            match answer {
                Answer::Group(g) => value["group"] = group_json(ids, g.as_ref()),
                Answer::Count(c) => value["count"] = json!(c),
                Answer::Duration(d) => value["total_time"] = json!(d),
                Answer::Partners { partners, group } => {
                    value["partners"] = json!(partners);
                    value["group"] = group_json(ids, group.as_ref());
                }
            }
            write_output(&common.output, &pretty(&value))
        }
        Command::Generate { model, n, tau, seed, world_size, jitter, output } => {
            let bad = |e: gen::GenError| Failure::Usage(e.to_string());
            let ds: Dataset = match model {
                Model::Flock => {
                    let mut cfg = FlockConfig::new(n, tau, seed);
                    if let Some(w) = world_size {
                        cfg.world_size = w;
                    }
                    if let Some(j) = jitter {
                        cfg.jitter = j;
                    }
                    gen::gen_flock(&cfg).map_err(bad)?
                }
                Model::Quadratic => gen::gen_reeb_quadratic(n, tau).map_err(bad)?,
                Model::Cubic => gen::gen_groups_cubic(n, tau).map_err(bad)?,
                Model::Figure2 => fixtures::figure2(),
                Model::Figure5 => fixtures::figure5(),
            };
            write_output(&output, &io::write_dataset_csv(&ds))
        }
    }
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
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

//! Command-line front end.
//!
//! Data goes to the output stream in one of three formats: `plain` for
//! reading, `jsonl` (one JSON object per line, each with a `kind` field) and
//! `csv` (one header line per command). Progress and timing go to the
//! diagnostic stream only, so the data stream is identical for any worker
//! count.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::cartan::{classify, named, CartanMatrix};
use crate::catalog::{self, load_algebra_file, Status, VerificationReport};
use crate::factorization::{fit_denominator, search_denominator, DenominatorFit};
use crate::polyseries::{affine_poincare, finite_poincare, FiniteType, IntPoly, TruncSeries};
use crate::weylgrowth::{
    enumerate, reduced_words, GrowthError, GrowthOptions, GrowthSeries, LevelRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "hyperpoincare",
    version,
    about = "Growth series of Kac-Moody Weyl groups"
)]
pub struct Cli {
    /// Output format for the data stream.
    #[arg(long, value_enum, global = true, default_value_t = Format::Plain)]
    pub format: Format,
    /// Worker threads (0 = one per core, 1 = sequential).
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Memory cap for enumeration, in bytes.
    #[arg(long, global = true, env = "HYPERPOINCARE_MAX_BYTES")]
    pub max_bytes: Option<u64>,
    /// Cap on coordinate vectors held at once.
    #[arg(long, global = true, env = "HYPERPOINCARE_MAX_VECTORS")]
    pub max_vectors: Option<u64>,
    /// Stream per-level timing records to stderr.
    #[arg(long, global = true)]
    pub progress: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Jsonl,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Source {
    /// Built-in algebra: A4, B5, G2, affine:D4, H48, ...
    #[arg(long, conflicts_with = "file")]
    pub algebra: Option<String>,
    /// JSON algebra file with name, rank, cartan and optional labels.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SeriesSource {
    #[command(flatten)]
    pub source: Source,
    /// Series coefficients given directly, lowest order first.
    #[arg(long, conflicts_with_all = ["algebra", "file"])]
    pub series: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Finite / affine / indefinite type and the hyperbolic flag.
    Classify {
        #[command(flatten)]
        source: Source,
    },
    /// Growth series |W^k| for k = 0..=order.
    Growth {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        order: usize,
    },
    /// Minimal coset representatives of W_J \ W per level.
    Cosets {
        #[command(flatten)]
        source: Source,
        /// Parabolic nodes, 1-based and comma separated.
        #[arg(long = "J", alias = "j", value_delimiter = ',')]
        parabolic: Vec<usize>,
        #[arg(long)]
        order: usize,
        /// Also list canonical reduced words at this level.
        #[arg(long)]
        words: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        limit: usize,
    },
    /// Closed-form Poincaré polynomial (finite) or series (affine:X).
    Poincare {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 20)]
        order: usize,
    },
    /// Q = P(G) / P(H) for one finite type G.
    Fit {
        #[command(flatten)]
        input: SeriesSource,
        #[arg(long = "type")]
        finite_type: FiniteType,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 1)]
        guard: usize,
    },
    /// Every finite simple G of rank <= max-rank with P(G) / P(H) a polynomial.
    Search {
        #[command(flatten)]
        input: SeriesSource,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_rank: usize,
        #[arg(long, default_value_t = 1)]
        guard: usize,
    },
    /// Check the denominator table against every entry that has a matrix.
    VerifyCatalog {
        /// JSON-lines file supplying Cartan matrices by entry id.
        #[arg(long)]
        overrides: Option<PathBuf>,
        /// Depth; defaults to D + guard per entry.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 1)]
        guard: usize,
        /// Restrict to these ids.
        #[arg(long = "id", value_delimiter = ',')]
        ids: Vec<u32>,
    },
}

/// Record schemas of the `jsonl` format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Record {
    Classification {
        name: String,
        rank: usize,
        class: String,
        hyperbolic: bool,
        determinant: String,
    },
    Level {
        level: usize,
        coefficient: u64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        group_coefficient: Option<u64>,
    },
    Summary {
        name: String,
        coefficients: Vec<u64>,
        truncation: usize,
        complete: bool,
    },
    Word {
        level: usize,
        word: String,
    },
    Poincare {
        algebra: String,
        coefficients: TruncSeries,
        polynomial: bool,
    },
    Fit(FitRecord),
    NoFit {
        algebra: String,
        #[serde(rename = "G")]
        g: FiniteType,
        verified_to: usize,
        guard: usize,
    },
    Verification(VerificationReport),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitRecord {
    pub algebra: String,
    #[serde(rename = "G")]
    pub g: FiniteType,
    #[serde(rename = "Q")]
    pub q: IntPoly,
    pub observed_degree: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub verified_to: usize,
    pub guard: usize,
}

impl FitRecord {
    fn new(algebra: &str, fit: &DenominatorFit) -> Self {
        FitRecord {
            algebra: algebra.to_string(),
            g: fit.finite_type,
            q: fit.q.clone(),
            observed_degree: fit.observed_degree,
            d: fit.positive_roots,
            verified_to: fit.verified_to,
            guard: fit.guard,
        }
    }
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_INPUT
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(CliError::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn options(cli: &Cli) -> GrowthOptions {
    let mut o = GrowthOptions::with_workers(cli.workers);
    if let Some(v) = cli.max_vectors {
        o.max_vectors = v;
    }
    o.max_bytes = cli.max_bytes;
    o
}

fn resolve(source: &Source) -> Result<(String, CartanMatrix), CliError> {
    match (&source.algebra, &source.file) {
        (Some(name), None) => Ok((name.clone(), named(name).map_err(input)?)),
        (None, Some(path)) => load_algebra_file(path).map_err(input),
        _ => Err(CliError::Input(
            "give exactly one of --algebra or --file".into(),
        )),
    }
}

fn to_nodes(one_based: &[usize], rank: usize) -> Result<Vec<usize>, CliError> {
    one_based
        .iter()
        .map(|&k| {
            if (1..=rank).contains(&k) {
                Ok(k - 1)
            } else {
                Err(CliError::Input(format!("node {k} outside 1..={rank}")))
            }
        })
        .collect()
}

struct Emitter<'a> {
    format: Format,
    out: &'a mut dyn Write,
    header_written: bool,
}

impl<'a> Emitter<'a> {
    fn new(format: Format, out: &'a mut dyn Write) -> Self {
        Emitter {
            format,
            out,
            header_written: false,
        }
    }

    fn json(&mut self, rec: &Record) -> Result<(), CliError> {
        serde_json::to_writer(&mut *self.out, rec).map_err(input)?;
        writeln!(self.out)?;
        Ok(())
    }

    fn csv_row(&mut self, header: &[&str], row: &[String]) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        if !self.header_written {
            w.write_record(header)?;
            self.header_written = true;
        }
        w.write_record(row)?;
        let bytes = w.into_inner().map_err(|e| input(e.to_string()))?;
        self.out.write_all(&bytes)?;
        Ok(())
    }

    fn plain(&mut self, line: &str) -> Result<(), CliError> {
        writeln!(self.out, "{line}")?;
        Ok(())
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let opts = options(cli);
    let mut em = Emitter::new(cli.format, out);
    match &cli.command {
        Command::Classify { source } => {
            let (name, m) = resolve(source)?;
            let c = classify(&m).map_err(input)?;
            let det = m.determinant().to_string();
            match cli.format {
                Format::Plain => {
                    let tag = if c.hyperbolic { " (hyperbolic)" } else { "" };
                    em.plain(&format!("{}{tag}", c.class))?;
                }
                Format::Jsonl => em.json(&Record::Classification {
                    name,
                    rank: m.rank(),
                    class: c.class.to_string(),
                    hyperbolic: c.hyperbolic,
                    determinant: det,
                })?,
                Format::Csv => em.csv_row(
                    &["name", "rank", "class", "hyperbolic", "determinant"],
                    &[
                        name,
                        m.rank().to_string(),
                        c.class.to_string(),
                        c.hyperbolic.to_string(),
                        det,
                    ],
                )?,
            }
            Ok(EXIT_OK)
        }
        Command::Growth { source, order } => {
            let (name, m) = resolve(source)?;
            let series = stream_levels(&mut em, err, cli.progress, &m, *order, None, &opts)?;
            summary(&mut em, &name, &series)?;
            Ok(EXIT_OK)
        }
        Command::Cosets {
            source,
            parabolic,
            order,
            words,
            limit,
        } => {
            let (name, m) = resolve(source)?;
            let nodes = to_nodes(parabolic, m.rank())?;
            let series =
                stream_levels(&mut em, err, cli.progress, &m, *order, Some(&nodes), &opts)?;
            summary(&mut em, &name, &series)?;
            if let Some(level) = words {
                let ws = reduced_words(&m, *level, Some(&nodes), *limit, &opts).map_err(input)?;
                for w in ws {
                    match cli.format {
                        Format::Plain => em.plain(&format!("word {level} {w}"))?,
                        Format::Jsonl => em.json(&Record::Word {
                            level: *level,
                            word: w.to_string(),
                        })?,
                        Format::Csv => writeln!(em.out, "# word {level} {w}")?,
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Poincare { algebra, order } => {
            let (series, polynomial) = if let Some(rest) = algebra.strip_prefix("affine:") {
                let ft: FiniteType = rest.parse().map_err(input)?;
                (affine_poincare(&ft, *order), false)
            } else {
                let ft: FiniteType = algebra.parse().map_err(input)?;
                let p = finite_poincare(&ft);
                let deg = p.degree().unwrap_or(0);
                (p.to_series(deg), true)
            };
            match cli.format {
                Format::Plain => {
                    if polynomial {
                        em.plain(&series.to_poly().to_string())?
                    } else {
                        em.plain(&series.to_string())?
                    }
                }
                Format::Jsonl => em.json(&Record::Poincare {
                    algebra: algebra.clone(),
                    coefficients: series,
                    polynomial,
                })?,
                Format::Csv => {
                    for (k, c) in series.coeffs().iter().enumerate() {
                        em.csv_row(&["level", "coefficient"], &[k.to_string(), c.to_string()])?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Fit {
            input: src,
            finite_type,
            order,
            guard,
        } => {
            let default_order = finite_type.positive_root_count() + guard - 1;
            let (name, h) = series_input(src, order.or(Some(default_order)), &opts)?;
            match fit_denominator(&h, finite_type, *guard).map_err(input)? {
                Some(fit) => emit_fit(&mut em, &name, &fit)?,
                None => match cli.format {
                    Format::Plain => em.plain(&format!(
                        "no polynomial Q for G = {finite_type} within t^{} (guard {guard})",
                        h.truncation()
                    ))?,
                    Format::Jsonl => em.json(&Record::NoFit {
                        algebra: name,
                        g: *finite_type,
                        verified_to: h.truncation(),
                        guard: *guard,
                    })?,
                    Format::Csv => em.csv_row(
                        &FIT_HEADER,
                        &[
                            name,
                            finite_type.to_string(),
                            String::new(),
                            String::new(),
                            finite_type.positive_root_count().to_string(),
                            h.truncation().to_string(),
                            guard.to_string(),
                        ],
                    )?,
                },
            }
            Ok(EXIT_OK)
        }
        Command::Search {
            input: src,
            order,
            max_rank,
            guard,
        } => {
            let (name, h) = series_input(src, *order, &opts)?;
            let fits = search_denominator(&h, *max_rank, *guard).map_err(input)?;
            if fits.is_empty() && cli.format == Format::Plain {
                em.plain("no fits")?;
            }
            for fit in &fits {
                emit_fit(&mut em, &name, fit)?;
            }
            Ok(EXIT_OK)
        }
        Command::VerifyCatalog {
            overrides,
            order,
            guard,
            ids,
        } => {
            let entries = catalog::load_catalog(overrides.as_deref()).map_err(input)?;
            let selected: Vec<_> = entries
                .into_iter()
                .filter(|e| ids.is_empty() || ids.contains(&e.id))
                .collect();
            let mut reports = Vec::new();
            for e in &selected {
                let depth = order.unwrap_or_else(|| catalog::default_depth(e, *guard));
                let r = catalog::verify_entry(e, depth, *guard, &opts);
                if cli.progress {
                    writeln!(err, "{{\"id\":{},\"elapsed_ms\":{}}}", r.id, r.elapsed_ms)?;
                }
                match cli.format {
                    Format::Plain => {}
                    Format::Jsonl => em.json(&Record::Verification(r.clone()))?,
                    Format::Csv => em.csv_row(
                        &[
                            "id",
                            "name",
                            "status",
                            "G",
                            "D",
                            "depth",
                            "guard",
                            "observed_degree",
                            "q_table",
                            "computed_q",
                            "reason",
                        ],
                        &[
                            r.id.to_string(),
                            r.name.clone(),
                            format!("{:?}", r.status),
                            r.finite_type.to_string(),
                            r.positive_roots.to_string(),
                            r.depth.to_string(),
                            r.guard.to_string(),
                            r.observed_degree.map(|d| d.to_string()).unwrap_or_default(),
                            r.q_table.to_csv(),
                            r.computed_q
                                .as_ref()
                                .map(IntPoly::to_csv)
                                .unwrap_or_default(),
                            r.reason.clone().unwrap_or_default(),
                        ],
                    )?,
                }
                reports.push(r);
            }
            let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
            if cli.format == Format::Plain {
                write!(em.out, "{}", catalog::render_table(&reports))?;
                em.plain(&format!(
                    "{} verified, {} without matrix, {} mismatched",
                    count(Status::Verified),
                    count(Status::MatrixUnavailable),
                    count(Status::Mismatch)
                ))?;
            }
            Ok(if count(Status::Mismatch) > 0 {
                EXIT_MISMATCH
            } else {
                EXIT_OK
            })
        }
    }
}

const FIT_HEADER: [&str; 7] = [
    "algebra",
    "G",
    "Q",
    "observed_degree",
    "D",
    "verified_to",
    "guard",
];

fn emit_fit(em: &mut Emitter<'_>, algebra: &str, fit: &DenominatorFit) -> Result<(), CliError> {
    match em.format {
        Format::Plain => em.plain(&format!(
            "P({algebra}) = P({}) / ({})    [degree {}, D = {}, verified to t^{}, guard {}]",
            fit.finite_type,
            fit.q,
            fit.observed_degree,
            fit.positive_roots,
            fit.verified_to,
            fit.guard
        )),
        Format::Jsonl => em.json(&Record::Fit(FitRecord::new(algebra, fit))),
        Format::Csv => em.csv_row(
            &FIT_HEADER,
            &[
                algebra.to_string(),
                fit.finite_type.to_string(),
                fit.q.to_csv(),
                fit.observed_degree.to_string(),
                fit.positive_roots.to_string(),
                fit.verified_to.to_string(),
                fit.guard.to_string(),
            ],
        ),
    }
}

fn series_input(
    src: &SeriesSource,
    order: Option<usize>,
    opts: &GrowthOptions,
) -> Result<(String, TruncSeries), CliError> {
    if let Some(text) = &src.series {
        let s: TruncSeries = text.parse().map_err(input)?;
        let s = match order {
            Some(t) => s.truncate(t),
            None => s,
        };
        return Ok(("series".to_string(), s));
    }
    let (name, m) = resolve(&src.source)?;
    let order =
        order.ok_or_else(|| CliError::Input("--order is required with an algebra".into()))?;
    let e = enumerate(&m, order, &[], opts, &mut |_| {}).map_err(input)?;
    Ok((name, e.growth.to_series(order)))
}

fn stream_levels(
    em: &mut Emitter<'_>,
    err: &mut dyn Write,
    progress: bool,
    m: &CartanMatrix,
    order: usize,
    parabolic: Option<&[usize]>,
    opts: &GrowthOptions,
) -> Result<GrowthSeries, CliError> {
    let parabolics: Vec<Vec<usize>> = parabolic.map(|p| vec![p.to_vec()]).unwrap_or_default();
    let mut io_error: Option<CliError> = None;
    let mut observer = |rec: &LevelRecord| {
        if io_error.is_some() {
            return;
        }
        if progress {
            if let Ok(line) = serde_json::to_string(rec) {
                let _ = writeln!(err, "{line}");
            }
        }
        let (coefficient, group) = match rec.coset_counts.first() {
            Some(&c) => (c, Some(rec.coefficient)),
            None => (rec.coefficient, None),
        };
        let res = match em.format {
            Format::Plain => em.plain(&format!("{}\t{}", rec.level, coefficient)),
            Format::Jsonl => em.json(&Record::Level {
                level: rec.level,
                coefficient,
                group_coefficient: group,
            }),
            Format::Csv => match group {
                Some(g) => em.csv_row(
                    &["level", "coefficient", "group_coefficient"],
                    &[
                        rec.level.to_string(),
                        coefficient.to_string(),
                        g.to_string(),
                    ],
                ),
                None => em.csv_row(
                    &["level", "coefficient"],
                    &[rec.level.to_string(), coefficient.to_string()],
                ),
            },
        };
        if let Err(e) = res {
            io_error = Some(e);
        }
    };
    let result = enumerate(m, order, &parabolics, opts, &mut observer);
    if let Some(e) = io_error {
        return Err(e);
    }
    match result {
        Ok(mut e) => Ok(if parabolic.is_some() {
            e.cosets.remove(0)
        } else {
            e.growth
        }),
        Err(GrowthError::BudgetExceeded {
            level,
            reason,
            partial,
        }) => {
            let _ = writeln!(err, "budget exceeded before level {level}: {reason}");
            Err(CliError::Input(format!(
                "partial series (truncated at t^{}): {}",
                partial.truncation(),
                partial
                    .coeffs()
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )))
        }
        Err(e) => Err(input(e)),
    }
}

fn summary(em: &mut Emitter<'_>, name: &str, s: &GrowthSeries) -> Result<(), CliError> {
    match em.format {
        Format::Plain => em.plain(&format!(
            "# {name}: truncation {}, complete {}, coefficients {}",
            s.truncation(),
            s.is_complete(),
            s.coeffs()
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(",")
        )),
        Format::Jsonl => em.json(&Record::Summary {
            name: name.to_string(),
            coefficients: s.coeffs().to_vec(),
            truncation: s.truncation(),
            complete: s.is_complete(),
        }),
        Format::Csv => Ok(()),
    }
}

//! The `cyclic-qgr` command line.
//!
//! Every command takes an instance (`-i`, inline `n=3;blocks=3,2`, a JSON
//! object, or a file holding either) and writes one document in the chosen
//! format to stdout or `--out`. Rows always follow the canonical fixed-point
//! order, so output is byte-for-byte reproducible.
//!
//! Exit codes: 0 on success, 1 when a verification finds a mismatch (or a
//! computation fails its own exactness checks), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cells::CellPoset;
use crate::cohomology::DualBasis;
use crate::fixpoints::{count_fixed_points, FixedPointJson};
use crate::gkm::{GkmGraph, GraphJson};
use crate::model::Instance;
use crate::verify::{run_suite, Suite, DEFAULT_BUDGET};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "cyclic-qgr",
    version,
    about = "Fixed points, BB cells, GKM graphs and the dual basis of cyclic quiver Grassmannians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Instance: `n=<int>;blocks=<int>[,<int>…]`, a JSON object, or a file containing either.
    #[arg(short = 'i', long)]
    instance: String,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Refuse instances with more fixed points (and, for `verify`, more oracle candidates).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// The torus fixed points in canonical order.
    Fixpoints(Common),
    /// The dimension of each Białynicki-Birula cell.
    Dims(Common),
    /// The cell order as its covering relation.
    Poset(Common),
    /// Cell counts by dimension.
    Poincare(Common),
    /// The oriented, labeled GKM graph.
    Graph(Common),
    /// Restrictions of the dual basis classes.
    Basis {
        #[command(flatten)]
        common: Common,
        /// Only the class of this point (`I={…}` or a box list).
        #[arg(long)]
        point: Option<String>,
    },
    /// Structure constants of p^x · p^y.
    Multiply {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Cross-check against the brute-force oracles; exits 1 on any mismatch.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

/// A failed invocation: the message and the exit code.
#[derive(Debug)]
struct Failure(i32, String);

fn usage(msg: impl ToString) -> Failure {
    Failure(EXIT_USAGE, msg.to_string())
}

/// Runs one command; output goes to `stdout` unless `--out` is given,
/// diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = write!(target, "{}", e.render());
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn load_instance(source: &str) -> Result<Instance, Failure> {
    let text = match fs::metadata(source) {
        Ok(meta) if meta.is_file() => {
            fs::read_to_string(source).map_err(|e| usage(format!("cannot read {source}: {e}")))?
        }
        _ => source.to_string(),
    };
    text.parse().map_err(|e| usage(format!("invalid instance: {e}")))
}

fn graph_for(common: &Common) -> Result<GkmGraph, Failure> {
    let inst = load_instance(&common.instance)?;
    let count = count_fixed_points(&inst);
    if count > common.budget {
        return Err(usage(format!(
            "{inst} has {count} fixed points, over the budget of {}",
            common.budget
        )));
    }
    Ok(GkmGraph::new(&inst))
}

fn emit(common: &Common, stdout: &mut dyn Write, body: &[u8]) -> Result<(), Failure> {
    match &common.out {
        Some(path) => {
            fs::write(path, body).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout
            .write_all(body)
            .map_err(|e| Failure(EXIT_MISMATCH, format!("cannot write output: {e}"))),
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("serializable");
    out.push(b'\n');
    out
}

fn csv_rows<R: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

fn no_dot(command: &str) -> Failure {
    usage(format!("`{command}` has no dot output; use json or csv"))
}

#[derive(Serialize)]
struct PointRow {
    index: usize,
    label: String,
    #[serde(flatten)]
    point: FixedPointJson,
}

#[derive(Serialize)]
struct DimRow {
    index: usize,
    label: String,
    dim: u32,
}

#[derive(Serialize)]
struct Poincare {
    instance: Instance,
    /// Coefficient of `q^d` at position `d`.
    coefficients: Vec<u64>,
    polynomial: String,
}

/// How to read the labels of `graph` output.
#[derive(Serialize)]
struct Conventions {
    orientation: &'static str,
    label: &'static str,
    variables: &'static str,
}

const CONVENTIONS: Conventions = Conventions {
    orientation: "edges run from p to q with p preceding q in the cell order",
    label: "tangent weight of the connecting curve at q; its negative is the weight at p",
    variables: "t0 scales the Jordan direction; t[r][s] belongs to block s at cyclic offset r",
};

#[derive(Serialize)]
struct GraphDoc {
    #[serde(flatten)]
    graph: GraphJson,
    conventions: Conventions,
}

#[derive(Serialize)]
struct Restriction {
    at: String,
    value: String,
    factored: String,
}

#[derive(Serialize)]
struct ClassDoc {
    point: String,
    dim: u32,
    restrictions: Vec<Restriction>,
}

#[derive(Serialize)]
struct Constant {
    z: String,
    c: String,
}

#[derive(Serialize)]
struct ProductDoc {
    instance: Instance,
    x: String,
    y: String,
    constants: Vec<Constant>,
}

fn poincare_string(coeffs: &[u64]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(d, &c)| match (d, c) {
            (0, c) => c.to_string(),
            (1, 1) => "q".to_string(),
            (1, c) => format!("{c}q"),
            (d, 1) => format!("q^{d}"),
            (d, c) => format!("{c}q^{d}"),
        })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Fixpoints(common) => {
            let g = graph_for(&common)?;
            let inst = g.instance();
            let pts = g.points();
            let body = match common.format {
                Format::Json => json(
                    &(0..pts.len())
                        .map(|k| PointRow {
                            index: k,
                            label: pts.label(k),
                            point: pts.point(k).to_json(inst),
                        })
                        .collect::<Vec<_>>(),
                ),
                Format::Csv => csv_rows(
                    &["index", "label", "boxes"],
                    (0..pts.len()).map(|k| vec![k.to_string(), pts.label(k), pts.point(k).to_string()]),
                ),
                Format::Dot => return Err(no_dot("fixpoints")),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Dims(common) => {
            let g = graph_for(&common)?;
            let poset = g.poset();
            let rows = (0..poset.len()).map(|k| DimRow {
                index: k,
                label: g.points().label(k),
                dim: poset.dim(k),
            });
            let body = match common.format {
                Format::Json => json(&rows.collect::<Vec<_>>()),
                Format::Csv => csv_rows(
                    &["index", "label", "dim"],
                    rows.map(|r| vec![r.index.to_string(), r.label, r.dim.to_string()]),
                ),
                Format::Dot => return Err(no_dot("dims")),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Poset(common) => {
            let g = graph_for(&common)?;
            let poset: &CellPoset = g.poset();
            let body = match common.format {
                Format::Json => json(&poset.to_json()),
                Format::Csv => csv_rows(
                    &["lower", "upper"],
                    poset
                        .hasse()
                        .into_iter()
                        .map(|(a, b)| vec![g.points().label(a), g.points().label(b)]),
                ),
                Format::Dot => poset.to_dot().into_bytes(),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Poincare(common) => {
            let g = graph_for(&common)?;
            let coefficients = g.poset().poincare_polynomial();
            let body = match common.format {
                Format::Json => json(&Poincare {
                    instance: g.instance().clone(),
                    polynomial: poincare_string(&coefficients),
                    coefficients,
                }),
                Format::Csv => csv_rows(
                    &["degree", "cells"],
                    coefficients
                        .iter()
                        .enumerate()
                        .map(|(d, c)| vec![d.to_string(), c.to_string()]),
                ),
                Format::Dot => return Err(no_dot("poincare")),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Graph(common) => {
            let g = graph_for(&common)?;
            let body = match common.format {
                Format::Json => json(&GraphDoc {
                    graph: g.to_json(),
                    conventions: CONVENTIONS,
                }),
                Format::Csv => csv_rows(
                    &["src", "dst", "label", "type"],
                    g.edges().iter().map(|e| {
                        vec![
                            g.points().label(e.src),
                            g.points().label(e.dst),
                            e.label.to_string(),
                            e.mutation.kind().to_string(),
                        ]
                    }),
                ),
                Format::Dot => g.to_dot().into_bytes(),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Basis { common, point } => {
            let g = graph_for(&common)?;
            let pts = g.points();
            let which: Vec<usize> = match &point {
                Some(p) => vec![pts
                    .parse_point(p)
                    .map_err(|e| usage(format!("invalid point: {e}")))?],
                None => (0..pts.len()).collect(),
            };
            let basis = DualBasis::compute(&g).map_err(|e| Failure(EXIT_MISMATCH, e.to_string()))?;
            let docs: Vec<ClassDoc> = which
                .iter()
                .map(|&x| {
                    let class = basis.class(x);
                    ClassDoc {
                        point: pts.label(x),
                        dim: g.poset().dim(x),
                        restrictions: class
                            .support()
                            .map(|s| Restriction {
                                at: pts.label(s),
                                value: class.polynomial(s).to_string(),
                                factored: class.at(s).to_string(),
                            })
                            .collect(),
                    }
                })
                .collect();
            let body = match common.format {
                Format::Json => json(&docs),
                Format::Csv => csv_rows(
                    &["class", "point", "value"],
                    docs.into_iter().flat_map(|d| {
                        let class = d.point;
                        d.restrictions
                            .into_iter()
                            .map(move |r| vec![class.clone(), r.at, r.value])
                    }),
                ),
                Format::Dot => return Err(no_dot("basis")),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Multiply { common, x, y } => {
            let g = graph_for(&common)?;
            let pts = g.points();
            let parse = |s: &str| {
                pts.parse_point(s)
                    .map_err(|e| usage(format!("invalid point `{s}`: {e}")))
            };
            let (px, py) = (parse(&x)?, parse(&y)?);
            let basis = DualBasis::compute(&g).map_err(|e| Failure(EXIT_MISMATCH, e.to_string()))?;
            let constants: Vec<Constant> = basis
                .structure_constants(&g, px, py)
                .map_err(|e| Failure(EXIT_MISMATCH, e.to_string()))?
                .into_iter()
                .map(|(z, c)| Constant {
                    z: pts.label(z),
                    c: c.to_string(),
                })
                .collect();
            let body = match common.format {
                Format::Json => json(&ProductDoc {
                    instance: g.instance().clone(),
                    x: pts.label(px),
                    y: pts.label(py),
                    constants,
                }),
                Format::Csv => csv_rows(&["z", "c"], constants.into_iter().map(|c| vec![c.z, c.c])),
                Format::Dot => return Err(no_dot("multiply")),
            };
            emit(&common, stdout, &body)?;
        }
        Command::Verify { common, suite } => {
            let g = graph_for(&common)?;
            let report = run_suite(&g, suite, common.budget).map_err(|e| usage(e.to_string()))?;
            let body = match common.format {
                Format::Json => json(&report),
                Format::Csv => csv_rows(
                    &["item", "expected", "actual"],
                    report
                        .mismatches
                        .iter()
                        .map(|m| vec![m.item.clone(), m.expected.clone(), m.actual.clone()]),
                ),
                Format::Dot => return Err(no_dot("verify")),
            };
            emit(&common, stdout, &body)?;
            return Ok(if report.passed { EXIT_OK } else { EXIT_MISMATCH });
        }
    }
    Ok(EXIT_OK)
}

//! Command-line front end. Every command prints one JSON document (schema
//! `v1`), a CSV curve or a DOT graph. Exit status: 0 success, 1 no result or
//! inconclusive, 2 malformed input.

pub mod input;
pub mod output;

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde_json::{json, Value};

use crate::digit::{example_overlap, example_overlap_closed_form, osc_helau_check, osc_mod_check, DigitSystem, HeLauOutcome};
use crate::error::{Error, Result};
use crate::gaps::{gaps_above, parallel_volume};
use crate::ifs::dimension::moran_dimension;
use crate::ifs::{lattice_classify, Ifs, LatticeClass};
use crate::measurability::verdict::find_open_set;
use crate::measurability::{amplitude_of, p_extrema, p_function, verdict, Status, VerdictOptions};
use crate::neighbor::{classify, neighbor_graph, to_dot};
use crate::numerics::rational::{int, parse_rational, to_decimal, two_pow};
use crate::numerics::Rational;
use crate::openset::{
    check_feasible, construct_u_lambda, convex_iterate, find_feasible_convex_iterate, generator_data, verify_u_lambda,
    OpenSetRep,
};

pub use input::{parse_system, system_json};

/// Environment variable overriding the dimension precision (bits).
pub const PRECISION_ENV: &str = "SELFSIM_PRECISION_BITS";

#[derive(Parser, Debug, Clone)]
#[command(name = "selfsim", version, about = "Exact geometry of self-similar sets on the line")]
pub struct Cli {
    /// JSON system definition file, `-` for standard input
    #[arg(long, short, global = true)]
    pub system: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OscMode {
    Mod,
    Helau,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Moran dimension enclosure
    Dim,
    /// Lattice/nonlattice classification and base
    Lattice,
    /// Gaps longer than the given length, with endpoint certificates
    Gaps {
        #[arg(long, default_value = "1/100")]
        min_length: String,
    },
    /// Exact parallel volume at one radius or over a grid `lo:hi:n`
    Volume {
        #[arg(long, conflicts_with = "grid")]
        epsilon: Option<String>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Criterion function on (rg, g]: pieces, extrema, amplitude, samples
    Pfunction {
        /// auto, convex:M or ulambda
        #[arg(long, default_value = "auto")]
        open_set: String,
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Minkowski measurability verdict
    Verdict,
    /// Feasibility of the convex iterate Φ^m I, or search for the least feasible m
    Feasible {
        #[arg(long, conflicts_with = "search")]
        m: Option<usize>,
        #[arg(long)]
        search: Option<usize>,
    },
    /// Search for a certified U_Λ feasible open set
    ConstructOpenSet {
        #[arg(long, default_value_t = 3)]
        max_m: usize,
        #[arg(long, default_value_t = 6)]
        max_depth: usize,
    },
    /// Trimmed neighbor graph and dynamical boundary class
    NeighborGraph {
        #[arg(long, default_value_t = 500)]
        max_vertices: usize,
        #[arg(long, default_value_t = 200)]
        max_depth: usize,
        /// also write the graph in DOT form to this file
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Open set condition for a digit system
    OscCheck {
        #[arg(long, value_enum, default_value_t = OscMode::Mod)]
        mode: OscMode,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Overlap of φ_{13}φ_{23}^k(I) and φ_2φ_{23}^kφ_2(I) for A = 4, 𝒟 = {0, 1, 6}
    OverlapExample {
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Dim => "dim",
            Command::Lattice => "lattice",
            Command::Gaps { .. } => "gaps",
            Command::Volume { .. } => "volume",
            Command::Pfunction { .. } => "pfunction",
            Command::Verdict => "verdict",
            Command::Feasible { .. } => "feasible",
            Command::ConstructOpenSet { .. } => "construct-open-set",
            Command::NeighborGraph { .. } => "neighbor-graph",
            Command::OscCheck { .. } => "osc-check",
            Command::OverlapExample { .. } => "overlap-example",
        }
    }

    fn needs_system(&self) -> bool {
        !matches!(self, Command::OverlapExample { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn error(e: &Error) -> Report {
        let (kind, field) = match e {
            Error::Parse(_) => ("parse", None),
            Error::Invalid { field, .. } => ("invalid", Some(field.clone())),
            _ => ("invalid", None),
        };
        let body = json!({ "schema": output::SCHEMA, "error": { "kind": kind, "field": field, "message": e.to_string() } });
        Report { code: 2, stdout: String::new(), stderr: format!("{body}\n") }
    }
}

/// Computation settings shared by all commands.
#[derive(Clone, Debug)]
pub struct Settings {
    pub options: VerdictOptions,
}

impl Settings {
    pub fn from_env() -> Result<Settings> {
        let mut options = VerdictOptions::default();
        if let Ok(text) = std::env::var(PRECISION_ENV) {
            let bits: i64 = text
                .trim()
                .parse()
                .ok()
                .filter(|b| (8..=4096).contains(b))
                .ok_or_else(|| Error::invalid(PRECISION_ENV, "expected an integer in 8..=4096"))?;
            options.dimension_width = two_pow(-bits);
        }
        Ok(Settings { options })
    }
}

/// Body of a successful run before formatting.
enum Outcome {
    Json { status: &'static str, result: Value, reason: Option<String> },
    Text(String),
}

impl Outcome {
    fn ok(result: Value) -> Outcome {
        Outcome::Json { status: "ok", result, reason: None }
    }

    fn none(result: Value, reason: impl Into<String>) -> Outcome {
        Outcome::Json { status: "none", result, reason: Some(reason.into()) }
    }

    fn inconclusive(result: Value, reason: impl Into<String>) -> Outcome {
        Outcome::Json { status: "inconclusive", result, reason: Some(reason.into()) }
    }
}

/// Parses arguments and runs one command. A `system` passed in replaces
/// the `--system` file.
pub fn run_args<I, T>(args: I, system: Option<&Ifs>) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Report { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Report { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let settings = match Settings::from_env() {
        Ok(s) => s,
        Err(e) => return Report::error(&e),
    };
    let loaded;
    let ifs = match (system, &cli.system) {
        (Some(ifs), _) => Some(ifs),
        (None, Some(path)) => match read_system(path) {
            Ok(ifs) => {
                loaded = ifs;
                Some(&loaded)
            }
            Err(e) => return Report::error(&e),
        },
        (None, None) => None,
    };
    execute(ifs, &cli.command, cli.format, &settings)
}

fn read_system(path: &PathBuf) -> Result<Ifs> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::invalid("system", format!("{}: {e}", path.display())))?
    };
    parse_system(&text)
}

pub fn execute(ifs: Option<&Ifs>, command: &Command, format: Format, settings: &Settings) -> Report {
    let allowed = match command {
        Command::Volume { .. } | Command::Pfunction { .. } => format != Format::Dot,
        Command::NeighborGraph { .. } => format != Format::Csv,
        _ => format == Format::Json,
    };
    if !allowed {
        return Report::error(&Error::invalid("format", format!("{format:?} output is not available for {}", command.name())));
    }
    let ifs = match (command.needs_system(), ifs) {
        (true, None) => return Report::error(&Error::invalid("system", "this command needs --system")),
        (_, ifs) => ifs,
    };
    let outcome = match dispatch(ifs, command, format, settings) {
        Ok(o) => o,
        Err(e) if is_input_error(&e) => return Report::error(&e),
        Err(e) => Outcome::Json { status: "none", result: Value::Null, reason: Some(e.to_string()) },
    };
    match outcome {
        Outcome::Text(text) => Report { code: 0, stdout: text, stderr: String::new() },
        Outcome::Json { status, result, reason } => {
            let mut doc = json!({ "schema": output::SCHEMA, "command": command.name(), "status": status, "result": result });
            if let Some(ifs) = ifs {
                doc["system"] = system_json(ifs);
            }
            if let Some(r) = reason {
                doc["reason"] = json!(r);
            }
            let code = if status == "ok" { 0 } else { 1 };
            let text = serde_json::to_string_pretty(&doc).unwrap_or_default();
            Report { code, stdout: format!("{text}\n"), stderr: String::new() }
        }
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Parse(_) | Error::Invalid { .. } | Error::NonPositive(_) | Error::NegativeRadius)
}

fn dispatch(ifs: Option<&Ifs>, command: &Command, format: Format, settings: &Settings) -> Result<Outcome> {
    let opts = &settings.options;
    if let Command::OverlapExample { k } = command {
        return Ok(overlap(*k));
    }
    let ifs = ifs.ok_or_else(|| Error::invalid("system", "this command needs --system"))?;
    match command {
        Command::Dim => {
            let d = moran_dimension(ifs, &opts.dimension_width);
            Ok(Outcome::ok(json!({
                "dimension": output::enclosure(&d.value),
                "requested_width": output::rational(&d.requested_width),
                "exactly_one": d.is_exactly_one(),
                "below_one": d.below_one(),
            })))
        }
        Command::Lattice => {
            let l = lattice_classify(ifs)?;
            let v = output::lattice(&l);
            Ok(if l == LatticeClass::Unknown { Outcome::inconclusive(v, "lattice class unknown") } else { Outcome::ok(v) })
        }
        Command::Gaps { min_length } => {
            let theta = field("min_length", min_length)?;
            let list = gaps_above(ifs, &theta)?;
            let gaps: Vec<Value> = list
                .gaps
                .iter()
                .map(|g| {
                    json!({
                        "interval": output::interval(&g.interval),
                        "length": output::rational(&g.length),
                        "left_certificate": output::certificate(&g.left_cert),
                        "right_certificate": output::certificate(&g.right_cert),
                    })
                })
                .collect();
            Ok(Outcome::ok(json!({ "min_length": output::rational(&theta), "count": gaps.len(), "gaps": gaps })))
        }
        Command::Volume { epsilon, grid } => volume(ifs, epsilon.as_deref(), grid.as_deref(), format),
        Command::Pfunction { open_set, samples } => pfunction(ifs, open_set, *samples, format, opts),
        Command::Verdict => {
            let v = verdict(ifs, opts)?;
            let body = output::verdict(&v);
            Ok(match v.status {
                Status::Inconclusive => {
                    Outcome::inconclusive(body, v.reason.clone().unwrap_or_else(|| "inconclusive".into()))
                }
                _ => Outcome::ok(body),
            })
        }
        Command::Feasible { m, search } => match search {
            Some(max) => Ok(match find_feasible_convex_iterate(ifs, *max) {
                Some(m) => Outcome::ok(json!({ "search": max, "m": m })),
                None => Outcome::none(json!({ "search": max, "m": null }), format!("no Φ^m I is feasible for m <= {max}")),
            }),
            None => {
                let m = m.unwrap_or(0);
                let set = convex_iterate(ifs, m);
                let report = check_feasible(ifs, &set)?;
                let mut body = output::feasibility(&report);
                body["m"] = json!(m);
                body["set"] = output::interval_set(&set);
                Ok(if report.feasible { Outcome::ok(body) } else { Outcome::none(body, format!("Φ^{m} I is not feasible")) })
            }
        },
        Command::ConstructOpenSet { max_m, max_depth } => Ok(match construct_u_lambda(ifs, *max_m, *max_depth) {
            Some(cert) => {
                let mut body = output::u_lambda(&cert);
                body["reverified_at_depth_plus_two"] = json!(verify_u_lambda(ifs, &cert.lambda, cert.depth + 2));
                Outcome::ok(body)
            }
            None => Outcome::none(Value::Null, format!("no certified U_Λ with m <= {max_m} and depth <= {max_depth}")),
        }),
        Command::NeighborGraph { max_vertices, max_depth, dot } => {
            let g = neighbor_graph(ifs, *max_vertices, *max_depth)?;
            let text = to_dot(&g);
            if let Some(path) = dot {
                std::fs::write(path, &text).map_err(|e| Error::invalid("dot", format!("{}: {e}", path.display())))?;
            }
            if format == Format::Dot {
                return Ok(Outcome::Text(text));
            }
            Ok(match classify(&g) {
                Ok(c) => Outcome::ok(output::neighbor_graph(&g, Some(&c))),
                Err(e) => Outcome::inconclusive(output::neighbor_graph(&g, None), e.to_string()),
            })
        }
        Command::OscCheck { mode, depth } => {
            let ds = DigitSystem::from_ifs(ifs)
                .ok_or_else(|| Error::invalid("system", "osc-check needs maps of the form (x + d)/A"))?;
            match mode {
                OscMode::Mod => match osc_mod_check(&ds) {
                    Ok(true) => Ok(Outcome::ok(json!({ "mode": "mod", "residues_distinct": true, "holds": true }))),
                    Ok(false) => Ok(Outcome::inconclusive(
                        json!({ "mode": "mod", "residues_distinct": false, "holds": null }),
                        "digits collide mod A; this does not refute OSC, use --mode helau",
                    )),
                    Err(e) => Ok(Outcome::none(json!({ "mode": "mod" }), e.to_string())),
                },
                OscMode::Helau => Ok(match osc_helau_check(&ds, *depth)? {
                    HeLauOutcome::TrueToDepth { depth, min_spacing, conclusive } => {
                        let body = json!({
                            "mode": "helau",
                            "holds": true,
                            "depth": depth,
                            "min_spacing": output::rational(&min_spacing),
                            "conclusive": conclusive,
                        });
                        if conclusive {
                            Outcome::ok(body)
                        } else {
                            Outcome::inconclusive(body, "no collision up to the depth, but A is not an integer")
                        }
                    }
                    HeLauOutcome::Collision { level, value, first, second } => Outcome::ok(json!({
                        "mode": "helau",
                        "holds": false,
                        "level": level,
                        "value": output::rational(&value),
                        "first": output::word(&first),
                        "second": output::word(&second),
                    })),
                }),
            }
        }
        Command::OverlapExample { .. } => unreachable!("handled above"),
    }
}

fn field(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text).map_err(|_| Error::invalid(name, format!("not a rational: {text:?}")))
}

/// `lo:hi:n`, `n >= 2` equally spaced radii.
fn parse_grid(text: &str) -> Result<Vec<Rational>> {
    let bad = || Error::invalid("grid", format!("expected lo:hi:n with 0 < lo < hi and n >= 2, got {text:?}"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let (lo, hi) = (field("grid", lo)?, field("grid", hi)?);
    let n: i64 = n.trim().parse().map_err(|_| bad())?;
    if !lo.is_positive() || lo >= hi || !(2..=100_000).contains(&n) {
        return Err(bad());
    }
    let step = (&hi - &lo) / int(n - 1);
    Ok((0..n).map(|k| &lo + &step * int(k)).collect())
}

fn csv(rows: &[(Rational, Rational, Rational)]) -> String {
    let mut out = String::from("epsilon,value_lo,value_hi\n");
    for (eps, lo, hi) in rows {
        out.push_str(&format!("{},{},{}\n", to_decimal(eps, 20, false), to_decimal(lo, 20, false), to_decimal(hi, 20, true)));
    }
    out
}

fn volume(ifs: &Ifs, epsilon: Option<&str>, grid: Option<&str>, format: Format) -> Result<Outcome> {
    let radii = match (epsilon, grid) {
        (Some(e), None) => vec![field("epsilon", e)?],
        (None, Some(g)) => parse_grid(g)?,
        _ => return Err(Error::invalid("epsilon", "give --epsilon or --grid")),
    };
    let values = radii.iter().map(|e| parallel_volume(ifs, e)).collect::<Result<Vec<_>>>()?;
    if format == Format::Csv {
        let rows: Vec<_> = radii.iter().zip(&values).map(|(e, v)| (e.clone(), v.clone(), v.clone())).collect();
        return Ok(Outcome::Text(csv(&rows)));
    }
    let samples: Vec<Value> = radii
        .iter()
        .zip(&values)
        .map(|(e, v)| json!({ "epsilon": output::rational(e), "volume": output::rational(v) }))
        .collect();
    Ok(Outcome::ok(json!({ "samples": samples })))
}

fn pfunction(ifs: &Ifs, open_set: &str, samples: usize, format: Format, opts: &VerdictOptions) -> Result<Outcome> {
    let rep = match open_set {
        "auto" => find_open_set(ifs, opts)?.map(|(rep, _)| rep),
        "ulambda" => match construct_u_lambda(ifs, opts.max_lambda_m, opts.max_verify_depth) {
            Some(cert) => Some(OpenSetRep::u_lambda(ifs, &cert)?),
            None => None,
        },
        other => {
            let m = other
                .strip_prefix("convex:")
                .and_then(|m| m.parse::<usize>().ok())
                .ok_or_else(|| Error::invalid("open_set", format!("expected auto, convex:M or ulambda, got {other:?}")))?;
            let rep = OpenSetRep::finite_union(ifs, convex_iterate(ifs, m))?;
            if !rep.feasible {
                return Ok(Outcome::none(output::open_set(&rep), format!("Φ^{m} I is not feasible")));
            }
            Some(rep)
        }
    };
    let Some(rep) = rep else {
        return Ok(Outcome::none(Value::Null, "no certified feasible open set found"));
    };
    let gen = generator_data(ifs, &rep, &opts.resolution)?;
    let dim = moran_dimension(ifs, &opts.dimension_width);
    let pp = p_function(&gen, &dim, &lattice_classify(ifs)?)?;
    let ex = p_extrema(&pp)?;
    let amp = amplitude_of(&ex);
    let mut points = Vec::with_capacity(samples);
    let n = int(samples as i64);
    for k in 1..=samples as i64 {
        let eps = &pp.lo + (&pp.hi - &pp.lo) * int(k) / &n;
        let value = pp.eval(&eps)?;
        points.push((eps, value));
    }
    if format == Format::Csv {
        let rows: Vec<_> = points.iter().map(|(e, v)| (e.clone(), v.lo().clone(), v.hi().clone())).collect();
        return Ok(Outcome::Text(csv(&rows)));
    }
    let mut body = output::pfunction(&pp);
    body["open_set"] = output::open_set(&rep);
    body["generator"] = output::generator(&gen);
    body["extrema"] = output::extrema(&ex);
    body["amplitude"] = output::enclosure(&amp);
    body["amplitude_positive"] = json!(amp.lo().is_positive());
    body["samples"] = Value::Array(
        points
            .iter()
            .map(|(e, v)| json!({ "epsilon": output::rational(e), "value": output::enclosure(v) }))
            .collect(),
    );
    Ok(Outcome::ok(body))
}

fn overlap(k: usize) -> Outcome {
    let e = example_overlap(k);
    let closed = example_overlap_closed_form(k);
    Outcome::ok(json!({
        "k": k,
        "first": output::interval(&e.first),
        "second": output::interval(&e.second),
        "endpoint_difference": output::rational(&e.endpoint_difference),
        "overlap_length": output::rational(&e.overlap_length),
        "interval_length": output::rational(&e.interval_length),
        "closed_form": output::rational(&closed),
        "matches_closed_form": e.endpoint_difference == closed && e.overlap_length == closed,
    }))
}

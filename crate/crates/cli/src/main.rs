//! `coxiso`: command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coxiso::classify::{has_subdiagram_of_type, spherical_components, b3, d4};
use coxiso::explorer::{decide_isomorphism, twist_class, Answer};
use coxiso::oracle::{finite_continuation, graph_factors, GeometricRep, OracleError};
use coxiso::{
    admissible_pairs, parse_diagram, pseudo_transpositions, reduced_reduction, verify_twist, AdmissiblePair,
    CoxeterMatrix, CycNumber, DiagramError, MoveOptions, ProductOrder, VertexSet,
};

/// Exit status for unreadable or malformed input.
const EXIT_DATA: u8 = 64;
/// Exit status when a search stopped at its cap.
const EXIT_TRUNCATED: u8 = 65;
/// Exit status for internal failures (oracle refusals and the like).
const EXIT_FAILURE: u8 = 70;

#[derive(Parser)]
#[command(name = "coxiso", version, about = "Isomorphism of Coxeter groups via reductions and diagram twists")]
struct Cli {
    /// Largest number of diagrams visited by a twist search.
    #[arg(long, global = true, default_value_t = 10_000)]
    cap: usize,
    /// Largest matrix power tried when computing an order.
    #[arg(long, global = true, default_value_t = 10_000)]
    bound: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Let the oracle supply the K-L labels of a twist.
    #[arg(long, global = true)]
    hybrid_twist: bool,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a diagram file and echo its normalized form.
    Validate { file: PathBuf },
    /// Components, spherical types, graph factors and move counts.
    Info { file: PathBuf },
    /// Reduced reduction with its move trace.
    Reduce { file: PathBuf },
    /// Twist class of a diagram.
    Class { file: PathBuf },
    /// Decide whether two diagrams give isomorphic groups.
    Iso { first: PathBuf, second: PathBuf },
    /// Direct computations in the geometric representation.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Order of the product of two words: `order FILE s1 / s2 s3 s2`.
    Order {
        file: PathBuf,
        #[arg(required = true, num_args = 1.., allow_hyphen_values = true)]
        words: Vec<String>,
    },
    /// Longest element of a spherical vertex set.
    Longest {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        set: Vec<String>,
    },
    /// Finite continuation of a generator.
    Fc { file: PathBuf, vertex: String },
    /// Compare a twist with the orders computed in the original group.
    VerifyTwist {
        file: PathBuf,
        /// Comma-separated vertex names.
        j: String,
        /// Comma-separated vertex names.
        k: String,
    },
    /// Enumerate the group, up to `--cap` elements.
    Enumerate { file: PathBuf },
}

/// A finished report: text to emit and the exit status.
struct Report {
    body: String,
    code: u8,
}

impl Report {
    fn ok(body: String) -> Report {
        Report { body, code: 0 }
    }
}

/// Errors that map to the data-error exit status.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: std::result::Result<T, impl Into<anyhow::Error>>) -> Result<T> {
    r.map_err(|e| InputError(e.into()).into())
}

fn load(path: &Path) -> Result<CoxeterMatrix> {
    let text = input(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
    input(parse_diagram(&text).with_context(|| format!("parsing {}", path.display())))
}

fn set_text(m: &CoxeterMatrix, s: VertexSet) -> String {
    format!("{{{}}}", m.set_names(s).join(","))
}

fn names_arg(m: &CoxeterMatrix, raw: &[String]) -> Result<VertexSet> {
    let names: Vec<&str> = raw
        .iter()
        .flat_map(|r| r.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    input(m.set_of(&names))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = MoveOptions {
        bound: cli.bound,
        hybrid_twist: cli.hybrid_twist,
        ..MoveOptions::default()
    };
    let report = match run(&cli, &opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = if e.downcast_ref::<InputError>().is_some() || e.downcast_ref::<DiagramError>().is_some() {
                EXIT_DATA
            } else {
                EXIT_FAILURE
            };
            return ExitCode::from(code);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &report.body).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(report.body.as_bytes()).context("writing output"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_FAILURE);
    }
    ExitCode::from(report.code)
}

fn run(cli: &Cli, opts: &MoveOptions) -> Result<Report> {
    if cli.format == Format::Dot && !matches!(cli.command, Command::Class { .. }) {
        bail!(InputError(anyhow::anyhow!("--format dot is only available for `class`")));
    }
    match &cli.command {
        Command::Validate { file } => {
            let m = load(file)?;
            Ok(Report::ok(match cli.format {
                Format::Json => json_text(&json!({ "valid": true, "diagram": m })),
                _ => m.serialize(),
            }))
        }
        Command::Info { file } => info(&load(file)?, cli.format, opts),
        Command::Reduce { file } => {
            let m = load(file)?;
            let (r, trace) = reduced_reduction(&m, opts)?;
            Ok(Report::ok(match cli.format {
                Format::Json => json_text(&json!({ "diagram": r, "trace": trace })),
                _ => {
                    let mut out = r.serialize();
                    out.push_str(&format!("# trace: {} move(s)\n", trace.len()));
                    for rec in &trace {
                        out.push_str(&format!("# {rec}\n"));
                    }
                    out
                }
            }))
        }
        Command::Class { file } => class(&load(file)?, cli, opts),
        Command::Iso { first, second } => iso(&load(first)?, &load(second)?, cli, opts),
        Command::Oracle(cmd) => oracle(cmd, cli, opts),
    }
}

fn info(m: &CoxeterMatrix, format: Format, opts: &MoveOptions) -> Result<Report> {
    let comps = m.components();
    let types = |set: VertexSet| -> Result<Option<String>> {
        Ok(spherical_components(m, set)?.map(|cs| {
            cs.iter().map(|(_, t)| t.to_string()).collect::<Vec<_>>().join(" x ")
        }))
    };
    let comp_types: Vec<(String, Option<String>)> = comps
        .iter()
        .map(|&c| Ok((set_text(m, c), types(c)?)))
        .collect::<Result<_>>()?;
    let whole = types(m.vertex_set())?;
    let factors: Vec<String> = graph_factors(m).into_iter().map(|f| set_text(m, f)).collect();
    let pts = pseudo_transpositions(m);
    let pairs = admissible_pairs(m, opts.rank_cap)
        .ok()
        .map(|ps| (ps.len(), ps.iter().filter(|p| p.is_nontrivial(m)).count()));
    let fc_block = if has_subdiagram_of_type(m, &[b3()]) {
        Err("C3")
    } else if has_subdiagram_of_type(m, &[d4()]) {
        Err("D4")
    } else {
        Ok(())
    };
    let mut fcs = Vec::new();
    if fc_block.is_ok() {
        for name in m.names() {
            let fc = finite_continuation(m, name)?;
            fcs.push((name.clone(), fc));
        }
    }

    if format == Format::Json {
        let fc_json = match fc_block {
            Err(t) => json!({ "unavailable": format!("{t} present") }),
            Ok(()) => Value::Object(
                fcs.iter()
                    .map(|(n, fc)| {
                        (
                            n.clone(),
                            json!({
                                "generators": m.set_names(fc.generators),
                                "reflection_rigid": fc.reflection_rigid,
                            }),
                        )
                    })
                    .collect(),
            ),
        };
        let v = json!({
            "rank": m.rank(),
            "components": comp_types.iter().map(|(c, t)| json!({ "vertices": c, "spherical": t })).collect::<Vec<_>>(),
            "spherical": whole,
            "graph_factors": factors,
            "pseudo_transpositions": pts.iter().map(|p| json!({ "tau": p.tau, "t": p.t, "k": p.k })).collect::<Vec<_>>(),
            "admissible_pairs": pairs.map(|(a, n)| json!({ "all": a, "nontrivial": n })),
            "finite_continuation": fc_json,
        });
        return Ok(Report::ok(json_text(&v)));
    }

    let mut out = format!("rank: {}\n", m.rank());
    for (c, t) in &comp_types {
        out.push_str(&format!("component {c}: {}\n", t.as_deref().unwrap_or("non-spherical")));
    }
    out.push_str(&format!("spherical: {}\n", whole.as_deref().unwrap_or("no")));
    out.push_str(&format!("graph factors: {}\n", if factors.is_empty() { "none".into() } else { factors.join(" ") }));
    if pts.is_empty() {
        out.push_str("pseudo-transpositions: none\n");
    }
    for p in &pts {
        out.push_str(&format!("pseudo-transposition: {p}\n"));
    }
    match pairs {
        Some((a, n)) => out.push_str(&format!("admissible pairs: {a} ({n} nontrivial)\n")),
        None => out.push_str(&format!("admissible pairs: unavailable: rank above {}\n", opts.rank_cap)),
    }
    match fc_block {
        Err(t) => out.push_str(&format!("FC: unavailable: {t} present\n")),
        Ok(()) => {
            for (n, fc) in &fcs {
                let rigid = if fc.reflection_rigid { " (reflection-rigid)" } else { "" };
                out.push_str(&format!("FC({n})={}{rigid}\n", set_text(m, fc.generators)));
            }
        }
    }
    Ok(Report::ok(out))
}

fn class(m: &CoxeterMatrix, cli: &Cli, opts: &MoveOptions) -> Result<Report> {
    let c = twist_class(m, cli.cap, opts)?;
    let code = if c.truncated { EXIT_TRUNCATED } else { 0 };
    let body = match cli.format {
        Format::Dot => c.to_dot(),
        Format::Json => json_text(&json!({
            "members": c.members,
            "truncated": c.truncated,
            "isomorphism_types": c.len(),
        })),
        Format::Text => {
            let mut out = format!(
                "# members: {}{}\n# all members isomorphic to the seed: {}\n",
                c.len(),
                if c.truncated { " (truncated)" } else { "" },
                if c.len() == 1 { "yes" } else { "no" }
            );
            for (i, d) in c.members.iter().enumerate() {
                out.push_str(&format!("\n# member {i}\n{d}"));
            }
            out
        }
    };
    Ok(Report { body, code })
}

fn iso(a: &CoxeterMatrix, b: &CoxeterMatrix, cli: &Cli, opts: &MoveOptions) -> Result<Report> {
    let v = decide_isomorphism(a, b, cli.cap, opts);
    let code = match (&v.answer, v.unconditional) {
        (Answer::Isomorphic(_), true) => 0,
        (Answer::NotIsomorphic, true) => 1,
        _ => 2,
    };
    let body = match cli.format {
        Format::Json => json_text(&serde_json::to_value(&v)?),
        _ => {
            let word = match &v.answer {
                Answer::Isomorphic(_) => "isomorphic".to_string(),
                Answer::NotIsomorphic => "not isomorphic".to_string(),
                Answer::ConditionallyIsomorphic(_) => "isomorphic (conditional)".to_string(),
                Answer::ConditionallyNotIsomorphic => "not isomorphic (conditional)".to_string(),
                Answer::Inconclusive(r) => format!("inconclusive: {r}"),
            };
            let mut out = format!(
                "verdict: {word}\nunconditional: {}\nno A3/C3/H3 subdiagram: first={} second={}\n",
                v.unconditional, v.precondition.first, v.precondition.second
            );
            if let Some(cert) = v.answer.certificate() {
                out.push_str(&format!("moves: {}\n", cert.moves.len()));
                for rec in &cert.moves {
                    out.push_str(&format!("  {rec}\n"));
                }
                let map: Vec<String> = cert.final_iso.map.iter().map(|(x, y)| format!("{x}->{y}")).collect();
                out.push_str(&format!("final map: {}\n", map.join(" ")));
            }
            out
        }
    };
    Ok(Report { body, code })
}

fn oracle(cmd: &OracleCommand, cli: &Cli, opts: &MoveOptions) -> Result<Report> {
    let json = cli.format == Format::Json;
    let rep_for = |m: &CoxeterMatrix| -> Result<GeometricRep<CycNumber>> {
        Ok(GeometricRep::with_max_modulus(m, opts.max_modulus)?)
    };
    match cmd {
        OracleCommand::Order { file, words } => {
            let m = load(file)?;
            let joined = words.join(" ");
            let Some((w1, w2)) = joined.split_once('/') else {
                bail!(InputError(anyhow::anyhow!("expected two words separated by `/`")));
            };
            let rep = rep_for(&m)?;
            let g1 = input(rep.parse_word(w1))?;
            let g2 = input(rep.parse_word(w2))?;
            let order = match rep.order_of_product(&g1, &g2, cli.bound) {
                Ok(o) => o,
                Err(OracleError::NotAReflection) => rep.element_order(&rep.mul(&g1, &g2), cli.bound),
                Err(e) => return Err(e.into()),
            };
            let code = if order == ProductOrder::Unknown { EXIT_FAILURE } else { 0 };
            let body = if json {
                json_text(&json!({ "order": order }))
            } else {
                format!("{order}\n")
            };
            Ok(Report { body, code })
        }
        OracleCommand::Longest { file, set } => {
            let m = load(file)?;
            let j = names_arg(&m, set)?;
            let rep = rep_for(&m)?;
            let rho = rep.longest_element(j)?;
            let word = rep.word_names(&rho).unwrap_or_default();
            Ok(Report::ok(if json {
                json_text(&json!({ "word": word, "length": word.len() }))
            } else if word.is_empty() {
                "-\n".into()
            } else {
                format!("{}\n", word.join(" "))
            }))
        }
        OracleCommand::Fc { file, vertex } => {
            let m = load(file)?;
            if m.index_of(vertex).is_none() {
                bail!(InputError(anyhow::anyhow!("unknown vertex `{vertex}`")));
            }
            match finite_continuation(&m, vertex) {
                Ok(fc) => Ok(Report::ok(if json {
                    json_text(&json!({
                        "vertex": vertex,
                        "generators": m.set_names(fc.generators),
                        "j_s_spherical": fc.j_s_spherical,
                        "reflection_rigid": fc.reflection_rigid,
                    }))
                } else {
                    format!(
                        "FC({vertex})={}\nreflection-rigid: {}\n",
                        set_text(&m, fc.generators),
                        fc.reflection_rigid
                    )
                })),
                Err(OracleError::PreconditionViolated(t)) => Ok(Report {
                    body: if json {
                        json_text(&json!({ "vertex": vertex, "unavailable": format!("{t} present") }))
                    } else {
                        format!("FC({vertex}): unavailable: {t} present\n")
                    },
                    code: EXIT_FAILURE,
                }),
                Err(e) => Err(e.into()),
            }
        }
        OracleCommand::VerifyTwist { file, j, k } => {
            let m = load(file)?;
            let pair = AdmissiblePair {
                j: names_arg(&m, std::slice::from_ref(j))?,
                k: names_arg(&m, std::slice::from_ref(k))?,
            };
            input(pair.validate(&m))?;
            let check = verify_twist(&m, &pair, opts)?;
            let code = if check.is_ok() { 0 } else { 1 };
            let body = if json {
                json_text(&serde_json::to_value(&check)?)
            } else {
                let mut out = check.twisted.serialize();
                if check.is_ok() {
                    out.push_str("combinatorial type = oracle type: OK\n");
                } else {
                    for mm in &check.mismatches {
                        out.push_str(&format!(
                            "mismatch {} {}: diagram {} oracle {}\n",
                            mm.u, mm.v, mm.combinatorial, mm.oracle
                        ));
                    }
                }
                out
            };
            Ok(Report { body, code })
        }
        OracleCommand::Enumerate { file } => {
            let m = load(file)?;
            let rep = rep_for(&m)?;
            let e = rep.enumerate_group(cli.cap);
            let code = if e.complete { 0 } else { EXIT_TRUNCATED };
            let body = if json {
                json_text(&json!({ "elements": e.elements.len(), "complete": e.complete }))
            } else if e.complete {
                format!("order: {}\n", e.elements.len())
            } else {
                format!("order: more than {} (stopped at the cap)\n", e.elements.len())
            };
            Ok(Report { body, code })
        }
    }
}

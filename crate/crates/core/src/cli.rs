//! The `simscheme` command line. Each subcommand is a thin wrapper over one
//! library operation; [`run_cli`] returns the exit code and both output
//! streams so that it can be tested without a process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::address::{gamma_contains, hat_related, related, shadow, RelationEvidence, Verdict, Witness};
use crate::audit::lemma_audit;
use crate::fixedpoint::{apply_functor, injectivity_report, is_fixed_point, shift_injective, shift_map, InjectivityReport, Pair};
use crate::io::{export_graph, format_address, parse_address, parse_pair, parse_scheme, serialize_pair, show_word, ExportFormat};
use crate::random::random_scheme;
use crate::scheme::{FiniteScheme, PointId};
use crate::tower::Tower;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "simscheme", version, about = "Finite approximations of self-similar spaces from a similarity scheme")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SchemeArg {
    /// Scheme file.
    #[arg(long, value_name = "FILE")]
    scheme: PathBuf,
}

#[derive(Args, Debug)]
struct PointArgs {
    /// Level of the point.
    #[arg(long, default_value_t = 0)]
    level: usize,
    /// Point label, or `word:x0` naming pi_{n,0}(word, x0).
    #[arg(long)]
    point: String,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// First address, `u(v)`.
    #[arg(long)]
    addr: String,
    /// Second address, `u(v)`.
    #[arg(long)]
    addr2: String,
    #[arg(long, default_value_t = 4)]
    max_level: usize,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Format {
    Dot,
    Structured,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that phi is injective and pi surjective.
    Validate(SchemeArg),
    /// Build levels 0..=depth and print their sizes.
    Build {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Print the cell C(word).
    Cell {
        #[command(flatten)]
        scheme: SchemeArg,
        /// Word over Y; empty for C(ε).
        #[arg(long, default_value = "")]
        word: String,
    },
    /// Print the shadow tree of Gamma_n(x) down to depth.
    Shadow {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        depth: usize,
    },
    /// Decide whether an address lies in Gamma_n(x).
    Member {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        addr: String,
    },
    /// Search for a point whose Gamma set contains both addresses.
    Relate {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Decide the two-case relation on a pair of addresses.
    HatRelate {
        #[command(flatten)]
        scheme: SchemeArg,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Apply the functor to a pair (default: X0 with the identity).
    Functor {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_name = "FILE")]
        pair: Option<PathBuf>,
    },
    /// Test whether a pair is isomorphic to its image under the functor.
    FixedPoint {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, value_name = "FILE")]
        pair: PathBuf,
    },
    /// Print the shift x -> pi_{1,n}(y, x) on level n.
    Shift {
        #[command(flatten)]
        scheme: SchemeArg,
        /// The one-symbol word y.
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Discreteness and full-injectivity report.
    Report {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Exhaustive structural audit up to depth; --seed also audits a random scheme.
    Audit {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Export the approximation graph of a level.
    Export {
        #[command(flatten)]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(String, i32), Failure>;

pub fn run_cli<I, T>(argv: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok((stdout, code)) => CliOutcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(Failure(message)) => CliOutcome {
            code: EXIT_DOMAIN,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))
}

fn load(arg: &SchemeArg) -> Result<FiniteScheme, Failure> {
    parse_scheme(&read(&arg.scheme)?).map_err(|e| Failure(format!("{}: {e}", arg.scheme.display())))
}

fn load_tower(arg: &SchemeArg, depth: usize) -> Result<Tower, Failure> {
    Ok(Tower::build(load(arg)?, depth)?)
}

fn ok(text: String) -> Outcome {
    Ok((text, EXIT_OK))
}

fn dispatch(command: Command) -> Outcome {
    match command {
        Command::Validate(arg) => {
            let report = load(&arg)?.validate();
            if report.ok() {
                return ok("valid\n".into());
            }
            let mut out = String::new();
            for v in &report.violations {
                let _ = writeln!(out, "{v}");
            }
            Ok((out, EXIT_DOMAIN))
        }
        Command::Build { scheme, depth } => ok(format!("{}\n", load_tower(&scheme, depth)?)),
        Command::Cell { scheme, word } => {
            let s = load(&scheme)?;
            let w = s.parse_word(&word)?;
            let t = Tower::build(s, w.len())?;
            let cell = t.cell(&w)?;
            let labels: Vec<&str> = cell.members.iter().map(|&p| t.label(w.len(), p)).collect();
            ok(format!("C({}) = {{{}}}\n", show_word(t.scheme(), &w), labels.join(", ")))
        }
        Command::Shadow { scheme, point, depth } => {
            let t = load_tower(&scheme, point.level)?;
            let x = t.point(point.level, &point.point)?;
            let tree = shadow(&t, point.level, x, depth)?;
            let mut out = String::new();
            for k in point.level..=depth {
                let ws: Vec<String> = tree.nodes_at(k).map(|(w, _)| show_word(t.scheme(), w)).collect();
                let _ = writeln!(out, "depth {k}: {}", ws.join(" "));
            }
            let _ = writeln!(out, "leaves: {}", tree.leaves().len());
            ok(out)
        }
        Command::Member { scheme, point, addr } => {
            let t = load_tower(&scheme, point.level)?;
            let x = t.point(point.level, &point.point)?;
            let a = parse_address(&addr, t.scheme())?;
            let inside = gamma_contains(&t, point.level, x, &a)?;
            ok(format!("{}\n", if inside { "MEMBER" } else { "NOT MEMBER" }))
        }
        Command::Relate { scheme, pair } => relation(&scheme, &pair, false),
        Command::HatRelate { scheme, pair } => relation(&scheme, &pair, true),
        Command::Functor { scheme, pair } => {
            let s = load(&scheme)?;
            let p = match pair {
                Some(path) => parse_pair(&read(&path)?, &s)?,
                None => Pair::identity(&s),
            };
            let image = apply_functor(&s, &p);
            let mut out = format!("# |Z| = {}, |Z^| = {}\n", p.len(), image.pair.len());
            out.push_str(&serialize_pair(&s, &image.pair));
            ok(out)
        }
        Command::FixedPoint { scheme, pair } => {
            let s = load(&scheme)?;
            let p = parse_pair(&read(&pair)?, &s)?;
            match is_fixed_point(&s, &p) {
                Some(w) => ok(format!("FIXED POINT, iso: {}\n", w.describe(&p))),
                None => {
                    let image = apply_functor(&s, &p);
                    Ok((format!("NOT A FIXED POINT (|Z| = {}, |Z^| = {})\n", p.len(), image.pair.len()), EXIT_OK))
                }
            }
        }
        Command::Shift { scheme, word, level } => {
            let s = load(&scheme)?;
            let w = s.parse_word(&word)?;
            let [y] = w[..] else {
                return Err(Failure(format!("--word must be a single symbol, got `{word}`")));
            };
            let t = Tower::build(s, level + 1)?;
            let mut out = String::new();
            for (x, fx) in shift_map(&t, y, level)?.into_iter().enumerate() {
                let _ = writeln!(out, "{} ↦ {}", t.label(level, PointId::from(x)), t.label(level + 1, fx));
            }
            let _ = writeln!(out, "injective: {}", shift_injective(&t, y, level)?);
            ok(out)
        }
        Command::Report { scheme, depth } => {
            let t = load_tower(&scheme, depth.saturating_sub(1))?;
            let s = t.scheme();
            let mut out = String::new();
            let essential: Vec<&str> = s.essential_part().iter().map(|x| s.base().get(x.index())).collect();
            let _ = writeln!(out, "essential part: {{{}}}", essential.join(", "));
            match s.discreteness_witness() {
                None => out.push_str("discrete: yes\n"),
                Some(w) => {
                    let _ = writeln!(
                        out,
                        "discrete: no (cell {} meets phi(X0) in {} and {})",
                        s.symbols().get(w.symbol.index()),
                        s.first().get(w.first),
                        s.first().get(w.second)
                    );
                }
            }
            let report = injectivity_report(&t, depth)?;
            match &report {
                InjectivityReport::CertifiedFullyInjective(_) => {
                    let _ = writeln!(out, "{report}");
                }
                InjectivityReport::Violation(v) => {
                    let _ = writeln!(
                        out,
                        "{report} level={} points={},{} address={}",
                        v.level,
                        t.label(v.level, v.first),
                        t.label(v.level, v.second),
                        format_address(s, &v.address)
                    );
                }
                InjectivityReport::NoViolationUpToDepth { depth } => {
                    let _ = writeln!(out, "{report} depth={depth}");
                }
            }
            ok(out)
        }
        Command::Audit { scheme, depth, seed } => {
            let mut out = String::new();
            let mut passed = true;
            let mut targets = vec![("scheme".to_string(), load(&scheme)?)];
            if let Some(seed) = seed {
                targets.push((format!("random scheme (seed {seed})"), random_scheme(seed)));
            }
            for (name, s) in targets {
                let report = lemma_audit(&Tower::new(s)?, depth)?;
                passed &= report.passed();
                let _ = writeln!(out, "== {name}\n{report}");
            }
            Ok((out, if passed { EXIT_OK } else { EXIT_DOMAIN }))
        }
        Command::Export { scheme, level, format } => {
            let t = load_tower(&scheme, level)?;
            let format = match format {
                Format::Dot => ExportFormat::Dot,
                Format::Structured => ExportFormat::Structured,
            };
            ok(export_graph(&t, level, format)?)
        }
    }
}

fn relation(scheme: &SchemeArg, args: &PairArgs, hat: bool) -> Outcome {
    let t = load_tower(scheme, args.max_level.max(1))?;
    let a1 = parse_address(&args.addr, t.scheme())?;
    let a2 = parse_address(&args.addr2, t.scheme())?;
    let ev = if hat {
        hat_related(&t, &a1, &a2, args.max_level)?
    } else {
        related(&t, &a1, &a2, args.max_level)?
    };
    let line = match ev.verdict {
        Verdict::Unrelated if !hat => format!("UNRELATED disjoint-cells level={}", ev.bound),
        _ => describe_evidence(&t, &ev),
    };
    ok(format!("{line}\n"))
}

/// One-line rendering of a relation verdict.
pub fn describe_evidence(t: &Tower, ev: &RelationEvidence) -> String {
    let s = t.scheme();
    match (ev.verdict, ev.witness) {
        (Verdict::Related, Some(Witness::Identical)) => "RELATED witness identical".into(),
        (Verdict::Related, Some(Witness::Shared { level, point })) => {
            format!("RELATED witness level={level} point={}", t.label(level, point))
        }
        (Verdict::Related, Some(Witness::SameHead { level, point })) => {
            format!("RELATED witness same-head tail-level={level} tail-point={}", t.label(level, point))
        }
        (Verdict::Related, Some(Witness::Glued { x0, x0_prime })) => format!(
            "RELATED witness glued x0={} x0'={}",
            s.base().get(x0.index()),
            s.base().get(x0_prime.index())
        ),
        (Verdict::Unrelated, _) => "UNRELATED".into(),
        (verdict, _) => format!("{verdict} max-level={}", ev.bound),
    }
}

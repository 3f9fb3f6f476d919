//! The `zsf` command line.
//!
//! Every report starts by echoing its configuration, then prints `key=value`
//! lines; factor and embedding artifacts follow in their file formats so that
//! standard output can be fed straight back to `verify`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::conjlab::{check_conjecture1, check_conjecture2, ConjectureReport, Mode, Verdict};
use crate::embed::{parse_pattern, weight as copy_weight, Embedding};
use crate::error::{Error, Result};
use crate::factorsolve::{solve_path_factor, FactorOutcome, SolveConfig};
use crate::graphcore::{construct_star_extremal_0mod4, construct_star_extremal_1mod4, random_zero_sum, EdgeLabeling};
use crate::quadmin::{self, f_exact};
use crate::starsolve::{balanced_center, star_weights};
use crate::swapwalk::{bounded_copy_with, WalkConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNRESOLVED: i32 = 2;
pub const EXIT_COUNTEREXAMPLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "zsf", version, about = "Zero-sum spanning forests in ±1 edge-labeled complete graphs")]
pub struct Cli {
    /// Worker threads for instance sweeps.
    #[arg(long, env = "ZSF_JOBS", global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Extremal {
    #[value(name = "0mod4")]
    ZeroMod4,
    #[value(name = "1mod4")]
    OneMod4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Canonical,
    Sampled,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a zero-sum labeling in ZSG format.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum)]
        extremal: Option<Extremal>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Find a star of small weight.
    Star {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Find a copy of a spanning forest with |weight| ≤ Δ+1.
    Walk {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Find a zero-sum P_k-factor.
    Factor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        k: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Minimize the five-variable quadratic over the cut simplex.
    Lemma1,
    /// Desk-scale check of conjecture 1 (zero-sum T-factors) or 2 (the (Δ−1)/2 bound).
    Conjecture {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        id: u8,
        #[arg(long)]
        n: usize,
        /// Forest pattern (id 2) or tree (id 1: P<k>, K1,<r>, edges:…).
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the worst labeling in ZSG format.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Recompute the weight of a factor or embedding file from scratch.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, conflicts_with = "embedding", required_unless_present = "embedding")]
        factor: Option<PathBuf>,
        #[arg(long)]
        embedding: Option<PathBuf>,
    },
}

/// Short name of an error class, printed as `error=<kind>`.
pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidEdge(..) => "InvalidEdge",
        Error::Parity(..) => "ParityError",
        Error::Divisibility(_) => "DivisibilityError",
        Error::Spec(_) => "SpecError",
        Error::InvalidEmbedding(_) => "InvalidEmbedding",
        Error::TooLarge(_) => "TooLarge",
        Error::SearchExhausted(_) => "SearchExhausted",
        Error::Precondition(_) => "PreconditionError",
        Error::NotAFactor(_) => "NotAFactor",
        Error::Parse(_) => "ParseError",
        Error::Internal(_) => "InternalError",
        Error::Io(_) => "IoError",
    }
}

fn read_labeling(path: &Path) -> Result<EdgeLabeling> {
    EdgeLabeling::from_zsg(&std::fs::read_to_string(path)?)
}

fn kv(out: &mut String, key: &str, value: impl std::fmt::Display) {
    let _ = writeln!(out, "{key}={value}");
}

/// `embedding pattern=<spec> weight=<w>` followed by the host of each pattern vertex.
pub fn embedding_text(pattern: &str, weight: i64, e: &Embedding) -> String {
    let hosts: Vec<String> = e.as_slice().iter().map(usize::to_string).collect();
    format!("embedding pattern={pattern} weight={weight}\n{}\n", hosts.join(" "))
}

struct Outcome {
    report: String,
    code: i32,
}

fn gen(n: usize, seed: u64, extremal: Option<Extremal>, out: &Path) -> Result<Outcome> {
    let l = match extremal {
        None => random_zero_sum(n, seed)?,
        Some(Extremal::ZeroMod4) => construct_star_extremal_0mod4(n)?,
        Some(Extremal::OneMod4) => construct_star_extremal_1mod4(n)?,
    };
    std::fs::write(out, l.to_zsg())?;
    let mut r = String::new();
    kv(&mut r, "command", "gen");
    kv(&mut r, "n", n);
    kv(&mut r, "seed", seed);
    kv(&mut r, "extremal", extremal.map_or("none", |e| if e == Extremal::ZeroMod4 { "0mod4" } else { "1mod4" }));
    kv(&mut r, "out", out.display());
    kv(&mut r, "positive_edges", l.positive_count());
    kv(&mut r, "zero_sum", l.is_zero_sum());
    Ok(Outcome { report: r, code: EXIT_OK })
}

fn star(input: &Path) -> Result<Outcome> {
    let l = read_labeling(input)?;
    let s = balanced_center(&l)?;
    let weights = star_weights(&l);
    let mut r = String::new();
    kv(&mut r, "command", "star");
    kv(&mut r, "in", input.display());
    kv(&mut r, "n", l.n());
    kv(&mut r, "center", s.center);
    kv(&mut r, "weight", weights[s.center]);
    kv(&mut r, "abs_weight", s.abs_weight);
    kv(&mut r, "pos_degree", s.pos_degree);
    kv(&mut r, "bound", (l.n() / 2).saturating_sub(1));
    Ok(Outcome { report: r, code: EXIT_OK })
}

fn walk(input: &Path, pattern: &str, seed: u64) -> Result<Outcome> {
    let l = read_labeling(input)?;
    let f = parse_pattern(pattern, l.n())?;
    let w = bounded_copy_with(&l, &f, &WalkConfig { seed, ..Default::default() })?;
    let mut r = String::new();
    kv(&mut r, "command", "walk");
    kv(&mut r, "in", input.display());
    kv(&mut r, "pattern", pattern);
    kv(&mut r, "seed", seed);
    kv(&mut r, "n", l.n());
    kv(&mut r, "max_degree", f.max_degree());
    kv(&mut r, "bound", f.max_degree() + 1);
    kv(&mut r, "plus_weight", w.plus_weight);
    kv(&mut r, "minus_weight", w.minus_weight);
    kv(&mut r, "steps", w.steps.len());
    kv(&mut r, "weight", w.weight);
    r += &embedding_text(pattern, w.weight, &w.embedding);
    Ok(Outcome { report: r, code: EXIT_OK })
}

fn factor(input: &Path, k: usize, seed: u64) -> Result<Outcome> {
    let l = read_labeling(input)?;
    let outcome = solve_path_factor(&l, k, &SolveConfig { seed, ..Default::default() })?;
    let mut r = String::new();
    kv(&mut r, "command", "factor");
    kv(&mut r, "in", input.display());
    kv(&mut r, "k", k);
    kv(&mut r, "seed", seed);
    kv(&mut r, "n", l.n());
    match outcome {
        FactorOutcome::Solved(s) => {
            kv(&mut r, "status", "solved");
            kv(&mut r, "stage", &s.stage);
            kv(&mut r, "swings", s.swings);
            r += &s.factor.to_text(&l);
            Ok(Outcome { report: r, code: EXIT_OK })
        }
        FactorOutcome::Unresolved(u) => {
            kv(&mut r, "status", "unresolved");
            kv(&mut r, "best_weight", u.best_weight);
            kv(&mut r, "swings", u.swings);
            kv(&mut r, "zero_sum_exists", u.zero_sum_exists.map_or("unknown".to_string(), |b| b.to_string()));
            for (t, c) in &u.census {
                kv(&mut r, &format!("census.{t}"), c);
            }
            kv(&mut r, "idle_families", u.idle_families.join(","));
            for d in &u.diagnostics {
                kv(&mut r, "diagnostic", d);
            }
            r += &u.best.to_text(&l);
            Ok(Outcome { report: r, code: EXIT_UNRESOLVED })
        }
    }
}

fn lemma1() -> Outcome {
    let m = quadmin::minimize();
    let exact = f_exact(&[1, 0, 0, 3, 0].map(|v| num_rational::Ratio::new(v, 4)));
    let (sum, cut) = m.point.residuals();
    let mut r = String::new();
    kv(&mut r, "command", "lemma1");
    for (i, x) in m.point.x.iter().enumerate() {
        kv(&mut r, &format!("x{}", i + 1), format!("{x:.12}"));
    }
    kv(&mut r, "value", format!("{:.15}", m.value));
    kv(&mut r, "certified_value", exact);
    kv(&mut r, "gap", format!("{:.3e}", m.value - quadmin::MIN_VALUE));
    kv(&mut r, "residual_sum", format!("{sum:.3e}"));
    kv(&mut r, "residual_cut", format!("{cut:.3e}"));
    kv(&mut r, "grid_points", m.grid_points);
    kv(&mut r, "feasible_grid_points", m.feasible_grid_points);
    kv(&mut r, "grid_value", format!("{:.15}", m.grid_value));
    kv(&mut r, "descent_steps", m.descent_steps);
    kv(&mut r, "max_violation", format!("{:.3e}", m.max_violation));
    Outcome { report: r, code: EXIT_OK }
}

#[allow(clippy::too_many_arguments)]
fn conjecture(
    id: u8,
    n: usize,
    pattern: Option<String>,
    mode: Option<ModeArg>,
    samples: u64,
    seed: u64,
    witness: Option<&Path>,
) -> Result<Outcome> {
    let report: ConjectureReport = if id == 1 {
        if mode.is_some_and(|m| m != ModeArg::Sampled) {
            return Err(Error::Spec("conjecture 1 supports sampled mode only".into()));
        }
        check_conjecture1(n, pattern.as_deref().unwrap_or("P3"), samples, seed)?
    } else {
        let mode = match mode {
            Some(ModeArg::Exhaustive) => Mode::Exhaustive,
            Some(ModeArg::Canonical) => Mode::Canonical,
            Some(ModeArg::Sampled) => Mode::Sampled { samples, seed },
            None if n <= crate::conjlab::MAX_RAW_N => Mode::Exhaustive,
            None => Mode::Sampled { samples, seed },
        };
        check_conjecture2(n, pattern.as_deref().unwrap_or("star"), mode)?
    };
    let mut r = String::from("command=conjecture\n");
    r += &report.to_lines();
    if let Some(w) = &report.witness {
        match witness {
            Some(path) => {
                std::fs::write(path, w.to_zsg())?;
                kv(&mut r, "witness", path.display());
            }
            None if report.verdict == Verdict::Counterexample => {
                r += "witness=inline\n";
                r += &w.to_zsg();
            }
            None => {}
        }
    }
    let code = match report.verdict {
        Verdict::Consistent => EXIT_OK,
        Verdict::Counterexample => EXIT_COUNTEREXAMPLE,
        Verdict::BelowAsymptoticRegime | Verdict::Inconclusive => EXIT_UNRESOLVED,
    };
    Ok(Outcome { report: r, code })
}

fn header_fields<'a>(text: &'a str, tag: &str) -> Result<(Vec<(&'a str, &'a str)>, Vec<&'a str>)> {
    let mut lines = text.lines().map(str::trim).skip_while(|l| !l.starts_with(tag));
    let header = lines.next().ok_or_else(|| Error::Parse(format!("missing `{tag}` header")))?;
    let mut fields = Vec::new();
    for tok in header.split_whitespace().skip(1) {
        fields.push(tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad header token {tok:?}")))?);
    }
    Ok((fields, lines.take_while(|l| !l.is_empty() && !l.contains('=')).collect()))
}

fn field<'a>(fields: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    fields.iter().find(|f| f.0 == key).map(|f| f.1).ok_or_else(|| Error::Parse(format!("header lacks {key}=")))
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

/// Structural and weight check of a factor file, independent of the solver types.
fn check_factor(l: &EdgeLabeling, text: &str) -> Result<(i64, std::result::Result<i64, String>)> {
    let (fields, body) = header_fields(text, "factor ")?;
    let k: usize = parse_int(field(&fields, "k")?)?;
    let claimed: i64 = parse_int(field(&fields, "weight")?)?;
    let n = l.n();
    let mut paths = Vec::new();
    for line in body {
        paths.push(line.split_whitespace().map(parse_int::<usize>).collect::<Result<Vec<_>>>()?);
    }
    let check = || {
        if k < 2 || n % k != 0 || paths.len() != n / k {
            return Err(format!("expected {} paths on {k} vertices, found {}", n / k.max(1), paths.len()));
        }
        let mut seen = vec![false; n];
        let mut w = 0i64;
        for p in &paths {
            if p.len() != k {
                return Err(format!("path {p:?} does not have {k} vertices"));
            }
            for &v in p {
                if v >= n {
                    return Err(format!("vertex {v} out of range"));
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(format!("vertex {v} appears twice"));
                }
            }
            w += p.windows(2).map(|e| i64::from(l.label(e[0], e[1]))).sum::<i64>();
        }
        Ok(w)
    };
    Ok((claimed, check()))
}

fn check_embedding(l: &EdgeLabeling, text: &str) -> Result<(i64, std::result::Result<i64, String>)> {
    let (fields, body) = header_fields(text, "embedding ")?;
    let pattern = field(&fields, "pattern")?;
    let claimed: i64 = parse_int(field(&fields, "weight")?)?;
    let f = parse_pattern(pattern, l.n())?;
    let line = body.first().ok_or_else(|| Error::Parse("embedding has no host line".into()))?;
    let hosts = line.split_whitespace().map(parse_int::<usize>).collect::<Result<Vec<_>>>()?;
    let check = Embedding::new(hosts)
        .map_err(|e| e.to_string())
        .and_then(|e| copy_weight(l, &f, &e).map_err(|e| e.to_string()));
    Ok((claimed, check))
}

fn verify(input: &Path, factor: Option<&Path>, embedding: Option<&Path>) -> Result<Outcome> {
    let l = read_labeling(input)?;
    let mut r = String::new();
    kv(&mut r, "command", "verify");
    kv(&mut r, "in", input.display());
    let (claimed, check) = match (factor, embedding) {
        (Some(p), _) => {
            kv(&mut r, "factor", p.display());
            check_factor(&l, &std::fs::read_to_string(p)?)?
        }
        (None, Some(p)) => {
            kv(&mut r, "embedding", p.display());
            check_embedding(&l, &std::fs::read_to_string(p)?)?
        }
        (None, None) => return Err(Error::Spec("verify needs --factor or --embedding".into())),
    };
    kv(&mut r, "claimed_weight", claimed);
    let code = match check {
        Ok(w) => {
            kv(&mut r, "weight", w);
            if w == claimed {
                kv(&mut r, "verdict", "ok");
                EXIT_OK
            } else {
                kv(&mut r, "verdict", "mismatch");
                kv(&mut r, "reason", format!("recomputed weight {w} differs from the claimed {claimed}"));
                EXIT_ERROR
            }
        }
        Err(reason) => {
            kv(&mut r, "verdict", "mismatch");
            kv(&mut r, "reason", reason);
            EXIT_ERROR
        }
    };
    Ok(Outcome { report: r, code })
}

fn dispatch(command: Command) -> Result<Outcome> {
    match command {
        Command::Gen { n, seed, extremal, out } => gen(n, seed, extremal, &out),
        Command::Star { input } => star(&input),
        Command::Walk { input, pattern, seed } => walk(&input, &pattern, seed),
        Command::Factor { input, k, seed } => factor(&input, k as usize, seed),
        Command::Lemma1 => Ok(lemma1()),
        Command::Conjecture { id, n, pattern, mode, samples, seed, witness } => {
            conjecture(id, n, pattern, mode, samples, seed, witness.as_deref())
        }
        Command::Verify { input, factor, embedding } => verify(&input, factor.as_deref(), embedding.as_deref()),
    }
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.jobs {
        Some(0) => Err(Error::Spec("--jobs must be at least 1".into())),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command)),
            Err(e) => Err(Error::Internal(e.to_string())),
        },
        None => dispatch(cli.command),
    };
    match result {
        Ok(o) => {
            let _ = out.write_all(o.report.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error={}\nmessage={e}", error_kind(&e));
            EXIT_ERROR
        }
    }
}

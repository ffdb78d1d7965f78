//! Command-line front end: group definition files and the `branchgroups`
//! subcommands.

pub mod dsl;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use branchgroups::conjugacy::{self, ConjugacyError, CosetDisplay};
use branchgroups::decision::{self, DecisionError, OrderResult};
use branchgroups::group::{builtin, GroupDefinition, GroupError, Word};
use branchgroups::presentations::{builtin_presentation, EndomorphicPresentation, PresentationError};
use branchgroups::quotients::{self, format_order, Normalisation, QuotientError};
use branchgroups::schreier::{self, SchreierError};
use branchgroups::tree::TreeError;

pub use dsl::{load_group, parse_group_file, DslError, GroupFile};

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Resource(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Resource(_) => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

fn group_err(e: &GroupError) -> bool {
    matches!(e, GroupError::ResourceExceeded { .. } | GroupError::Tree(TreeError::ResourceExceeded { .. }))
}

fn decision_err(e: &DecisionError) -> bool {
    match e {
        DecisionError::ResourceExceeded { .. } => true,
        DecisionError::Group(g) => group_err(g),
        DecisionError::Invalid(_) => false,
    }
}

fn quotient_err(e: &QuotientError) -> bool {
    match e {
        QuotientError::ResourceExceeded { .. } => true,
        QuotientError::Group(g) => group_err(g),
        QuotientError::Invalid(_) => false,
    }
}

macro_rules! classify {
    ($t:ty, $f:expr) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                let f: fn(&$t) -> bool = $f;
                if f(&e) {
                    CliError::Resource(e.to_string())
                } else {
                    CliError::Usage(e.to_string())
                }
            }
        }
    };
}

classify!(GroupError, group_err);
classify!(DecisionError, decision_err);
classify!(QuotientError, quotient_err);
classify!(SchreierError, |e| match e {
    SchreierError::ResourceExceeded { .. } => true,
    SchreierError::Group(g) => group_err(g),
    SchreierError::Invalid(_) => false,
});
classify!(ConjugacyError, |e| match e {
    ConjugacyError::Decision(d) => decision_err(d),
    ConjugacyError::Quotient(q) => quotient_err(q),
    ConjugacyError::Invalid(_) => false,
});
classify!(PresentationError, |e| match e {
    PresentationError::Decision(d) => decision_err(d),
    PresentationError::Group(g) => group_err(g),
    _ => false,
});
classify!(DslError, |e| matches!(e, DslError::Group(g) if group_err(g)));

#[derive(Parser, Debug)]
#[command(name = "branchgroups", version, about = "Computations in groups acting on rooted trees")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct GroupArg {
    /// Builtin name (Gg, FGg, BGg, GSg, Grig2, GuptaSidki, Sg, BSV, Dinf) or a
    /// definition file.
    pub group: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normal form, root permutation and first-level sections of a word.
    Eval {
        #[command(flatten)]
        group: GroupArg,
        word: String,
    },
    /// Exit 0 if the word is trivial, 1 otherwise.
    Trivial {
        #[command(flatten)]
        group: GroupArg,
        word: String,
    },
    /// Exit 0 if the words are equal, 1 otherwise.
    Equal {
        #[command(flatten)]
        group: GroupArg,
        u: String,
        v: String,
    },
    /// Order of an element.
    Order {
        #[command(flatten)]
        group: GroupArg,
        word: String,
        #[arg(long, default_value_t = 1 << 20)]
        bound: u64,
    },
    /// Conjugacy in the first Grigorchuk group.
    Conj {
        g: String,
        h: String,
        /// Also search conjugators up to this length.
        #[arg(long)]
        witness: Option<usize>,
    },
    /// Invariants of the quotient acting on a level.
    Quotient {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        order: bool,
        /// Lower central ranks up to this many terms.
        #[arg(long, num_args = 0..=1, default_missing_value = "8")]
        ranks: Option<usize>,
        #[arg(long)]
        derived: bool,
        #[arg(long)]
        suborbits: bool,
        #[arg(long)]
        hausdorff: bool,
    },
    /// Schreier graph of the action on a level.
    Schreier {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        level: usize,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
        #[arg(long)]
        growth: bool,
        #[arg(long)]
        diameter: bool,
        /// Build the graph from the substitution rules.
        #[arg(long)]
        substitution: bool,
    },
    /// Spectrum of the Laplace operator on levels `1..=level` (or `a..b`).
    Spectrum {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        level: String,
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        #[arg(long)]
        closed_form: bool,
    },
    /// Expand and verify an endomorphic presentation.
    Present {
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        name: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long)]
        verify: bool,
    },
    /// Sphere sizes of the ball in the Cayley graph.
    Ball {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        radius: usize,
    },
    /// Largest element order in a ball.
    TorsionGrowth {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 1 << 16)]
        bound: u64,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// A builtin, or the first group of a definition file.
pub fn load(spec: &str) -> Result<Arc<GroupDefinition>, CliError> {
    let path = Path::new(spec);
    if path.is_file() {
        return Ok(Arc::new(load_group(&read(path)?)?));
    }
    Ok(builtin(spec)?)
}

fn parse(g: &GroupDefinition, text: &str) -> Result<Word, CliError> {
    Ok(g.parse(text)?)
}

fn levels(text: &str) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad level '{text}': expected n or a..b"));
    match text.split_once("..") {
        Some((a, b)) => Ok(a.parse().map_err(|_| bad())?..=b.parse().map_err(|_| bad())?),
        None => {
            let n: usize = text.parse().map_err(|_| bad())?;
            Ok(1.min(n)..=n)
        }
    }
}

/// Runs one command, writing to `out`; returns the exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let w = |out: &mut dyn Write, s: String| -> Result<(), CliError> {
        writeln!(out, "{s}").map_err(|source| CliError::Io { path: "<stdout>".into(), source })
    };
    match cli.command {
        Command::Eval { group, word } => {
            let g = load(&group.group)?;
            let x = parse(&g, &word)?;
            let (perm, sections) = g.decompose(&x);
            let secs: Vec<String> = sections.iter().map(|s| g.format(s)).collect();
            w(out, format!("normal form: {}", g.format(&x)))?;
            w(out, format!("root permutation: {}", fmt_perm(&perm)))?;
            w(out, format!("sections: ({})", secs.join(", ")))?;
            w(out, format!("trivial: {}", decision::is_trivial(&g, &x)?))?;
        }
        Command::Trivial { group, word } => {
            let g = load(&group.group)?;
            let t = decision::is_trivial(&g, &parse(&g, &word)?)?;
            w(out, t.to_string())?;
            return Ok(if t { EXIT_OK } else { EXIT_FALSE });
        }
        Command::Equal { group, u, v } => {
            let g = load(&group.group)?;
            let t = decision::equal(&g, &parse(&g, &u)?, &parse(&g, &v)?)?;
            w(out, t.to_string())?;
            return Ok(if t { EXIT_OK } else { EXIT_FALSE });
        }
        Command::Order { group, word, bound } => {
            let g = load(&group.group)?;
            match decision::order(&g, &parse(&g, &word)?, bound)? {
                OrderResult::Finite(k) => w(out, k.to_string())?,
                OrderResult::InfiniteCertified(c) => {
                    w(out, "infinite".into())?;
                    w(out, format!("certificate: {c:?}"))?;
                }
                OrderResult::Unknown(why) => {
                    w(out, format!("unknown: {why}"))?;
                    return Ok(EXIT_RESOURCE);
                }
            }
        }
        Command::Conj { g, h, witness } => {
            let mut solver = conjugacy::solver()?.lock();
            let grp = solver.group().clone();
            let (x, y) = (parse(&grp, &g)?, parse(&grp, &h)?);
            let set = solver.q_set(&x, &y)?;
            w(out, format!("conjugate: {}", !set.is_empty()))?;
            w(out, format!("cosets: {}", CosetDisplay { set, solver: &solver }))?;
            if let (Some(len), Some(c)) = (witness, set.iter().next()) {
                match solver.witness(&x, &y, c, len)? {
                    Some(f) => w(out, format!("witness: {}", grp.format(&f)))?,
                    None => w(out, format!("witness: none up to length {len}"))?,
                }
            }
            return Ok(if set.is_empty() { EXIT_FALSE } else { EXIT_OK });
        }
        Command::Quotient { group, level, order, ranks, derived, suborbits, hausdorff } => {
            let g = load(&group.group)?;
            let q = quotients::level_quotient(&g, level)?;
            let all = !(order || ranks.is_some() || derived || suborbits || hausdorff);
            if order || all {
                w(out, format!("order: {}", format_order(&q.order())))?;
            }
            if let Some(k) = ranks {
                let r: Vec<String> = q.lower_central_ranks(k)?.iter().map(|x| x.to_string()).collect();
                w(out, format!("lower central ranks: {}", r.join(" ")))?;
            }
            if derived {
                let d: Vec<String> = q.derived_series(16).iter().map(|s| format_order(&s.order())).collect();
                w(out, format!("derived series orders: {}", d.join(" ")))?;
            }
            if suborbits {
                let s: Vec<String> = q.suborbit_profile().iter().map(|x| x.to_string()).collect();
                w(out, format!("suborbits: {}", s.join(" ")))?;
            }
            if hausdorff {
                let r = quotients::hausdorff_ratio(&g, level, Normalisation::LocalWreath)?;
                w(out, format!("hausdorff ratio: {r:.12}"))?;
            }
        }
        Command::Schreier { group, level, dot, growth, diameter, substitution } => {
            let graph = if substitution {
                let rules = schreier::substitution_rules(&group.group)
                    .ok_or_else(|| CliError::Usage(format!("no substitution rules for '{}'", group.group)))?;
                schreier::substitutional_expand(&rules, level)?
            } else {
                schreier::schreier_graph(&*load(&group.group)?, level)?
            };
            w(out, format!("vertices: {}", graph.num_vertices()))?;
            if let Some(p) = dot {
                write_file(&p, &graph.to_dot())?;
            }
            if growth {
                let s: Vec<String> = graph.growth_series().iter().map(|x| x.to_string()).collect();
                w(out, format!("growth: {}", s.join(" ")))?;
            }
            if diameter {
                w(out, format!("diameter: {}", graph.diameter()))?;
            }
        }
        Command::Spectrum { group, level, csv, closed_form } => {
            let g = load(&group.group)?;
            let mut reports = Vec::new();
            for n in levels(&level)? {
                let r = schreier::spectrum(&g, n)?;
                let grouped: Vec<String> = r
                    .with_multiplicities(1e-9)
                    .iter()
                    .map(|(x, k)| if *k == 1 { format!("{x:.9}") } else { format!("{x:.9}^{k}") })
                    .collect();
                w(out, format!("level {n}: {}", grouped.join(" ")))?;
                if closed_form {
                    match r.max_deviation {
                        Some(d) => w(out, format!("level {n}: max deviation from closed form {d:.3e}"))?,
                        None => w(out, format!("level {n}: no closed form known"))?,
                    }
                }
                reports.push(r);
            }
            if let Some(p) = csv {
                write_file(&p, &schreier::spectra_csv(&reports, 1e-6))?;
            }
        }
        Command::Present { name, file, depth, verify } => {
            let mut items: Vec<(EndomorphicPresentation, Arc<GroupDefinition>)> = Vec::new();
            if let Some(n) = name {
                let p = builtin_presentation(&n)?;
                let g = builtin(&p.group)?;
                items.push((p, g));
            } else if let Some(path) = file {
                let f = parse_group_file(&read(&path)?)?;
                if f.presentations.is_empty() {
                    return Err(CliError::Usage(format!("{}: no presentation declared", path.display())));
                }
                for d in &f.presentations {
                    items.push((f.presentation(d), f.group(&d.over)?));
                }
            }
            let mut ok = true;
            for (p, g) in items {
                w(out, format!("presentation {} over {}", p.name, p.group))?;
                for (d, layer) in p.expand_layers(depth).iter().enumerate() {
                    for r in layer {
                        w(out, format!("  {d} {}", p.format(r)))?;
                    }
                }
                if verify {
                    let rep = p.verify_in(g, depth)?;
                    match &rep.first_failure {
                        None => w(out, format!("verified: {} relators trivial", rep.checked))?,
                        Some((d, r)) => {
                            ok = false;
                            w(out, format!("FAILED at depth {d}: {r}"))?;
                        }
                    }
                }
            }
            return Ok(if ok { EXIT_OK } else { EXIT_FALSE });
        }
        Command::Ball { group, radius } => {
            let g = load(&group.group)?;
            let b = decision::ball(&g, radius, 5_000_000)?;
            let s: Vec<String> = b.spheres.iter().map(|x| x.to_string()).collect();
            w(out, format!("spheres: {}", s.join(" ")))?;
            w(out, format!("size: {}", b.len()))?;
        }
        Command::TorsionGrowth { group, radius, bound } => {
            let g = load(&group.group)?;
            let t = decision::torsion_growth(&g, radius, bound)?;
            w(out, format!("max order: {} (witness {})", t.max_order, g.format(&t.witness)))?;
            w(out, format!("infinite: {}, unknown: {}", t.infinite, t.unknown))?;
        }
    }
    Ok(EXIT_OK)
}

fn fmt_perm(p: &branchgroups::perm::Perm) -> String {
    let cycles: Vec<String> = p
        .cycles()
        .iter()
        .filter(|c| c.len() > 1)
        .map(|c| format!("({})", c.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(" ")))
        .collect();
    if cycles.is_empty() {
        "()".into()
    } else {
        cycles.concat()
    }
}

/// Parses `args`, runs the command and reports errors on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

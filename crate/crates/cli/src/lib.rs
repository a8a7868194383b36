//! The `fraisse` command line. Every subcommand is a thin wrapper around one
//! library call; results go to stdout as JSON.
//!
//! Exit codes: 0 when the command succeeds or finds its witness, 2 for an
//! honest negative within the given bounds, 1 for errors.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use fraisse_core::amalgamation::{amalgamate_with, AmalgamOptions};
use fraisse_core::bounded::{
    amalgamate01_with, complete01, one_join_reducible_stage, JoinReducible, Lattice01,
};
use fraisse_core::builder::{
    check_u1, check_u2_u3, run_with, BuildConfig, StageChain, TaskOrder, DEFAULT_K,
    DEFAULT_STAGE_CAP,
};
use fraisse_core::funayama::fep_complete;
use fraisse_core::io::{
    deserialize_chain, export_hasse, serialize_chain, LatticeFile, PartialLatticeFile,
};
use fraisse_core::lab::{
    find_n5_m3, interval_back_and_forth, metric_d, monotone_interpolation_search,
    simplicity_collapse_witness, Collapse, Interpolation, MonotoneTable, TablePrefix,
    DEFAULT_MAX_DEPTH,
};
use fraisse_core::variety::VarietyTag;
use fraisse_core::{first_embedding, Embedding, EmbeddingMode, FinLattice};
use serde::Serialize;
use serde_json::json;

pub use config::{Config, CONFIG_ENV};

const DEFAULT_BUDGET: usize = 20;
const DEFAULT_HORIZON: usize = 30;
const DEFAULT_ROUNDS: usize = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] fraisse_core::Error),
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "fraisse",
    version,
    about = "Build and probe finite stages of Fraisse limits of lattices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a chain of stages and write its archive.
    Build(BuildArgs),
    /// Run the universality and extension checks on an archived chain.
    Check(CheckArgs),
    /// Embed a lattice into the last stage of a chain.
    Embed(EmbedArgs),
    /// Amalgamate two lattices over a common sublattice.
    Amalgamate(AmalgamateArgs),
    /// Ideal-lattice completion of a partial lattice.
    Complete(CompleteArgs),
    /// Finite checks on a chain or a lattice.
    Probe(ProbeArgs),
    /// Export a Hasse diagram.
    Export(ExportArgs),
    /// Distance between two table prefixes.
    Metric(MetricArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, value_parser = parse_variety)]
    pub variety: Option<VarietyTag>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Maximum number of stages.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub stage_cap: Option<usize>,
    /// Reverse each scheduled batch of tasks.
    #[arg(long)]
    pub reverse: bool,
    /// Archive path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub chain: PathBuf,
    #[arg(long)]
    pub u1: bool,
    #[arg(long)]
    pub u2u3: bool,
    /// Stages searched for U1 witnesses (all built stages by default).
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Size bound for the checked lattices (the chain's own by default).
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Chain archive.
    #[arg(long)]
    pub target: PathBuf,
    /// Lattice file.
    #[arg(long)]
    pub source: PathBuf,
}

#[derive(Debug, Args)]
pub struct AmalgamateArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b1: PathBuf,
    #[arg(long)]
    pub b2: PathBuf,
    /// Embedding of A into B1 as comma-separated images; the first one found otherwise.
    #[arg(long, value_delimiter = ',')]
    pub f1: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub f2: Option<Vec<usize>>,
    /// Full ideal lattice instead of the pruned insertion amalgam.
    #[arg(long)]
    pub ideal: bool,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[arg(long = "partial-lattice-file")]
    pub partial_lattice_file: PathBuf,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("probe").required(true).args(["simplicity", "interpolate", "intervals", "n5m3", "join_reducible"])))]
#[command(group(ArgGroup::new("input").args(["chain", "lattice"])))]
pub struct ProbeArgs {
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Lattice file (for --n5m3 only).
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    /// Collapse of Cg(a, b) over every pair a < b of --seed.
    #[arg(long)]
    pub simplicity: bool,
    /// Polynomial interpolation of --values on --domain.
    #[arg(long)]
    pub interpolate: bool,
    /// Back-and-forth between the intervals --left and --right.
    #[arg(long)]
    pub intervals: bool,
    /// Pentagon and diamond sublattices.
    #[arg(long)]
    pub n5m3: bool,
    /// Least stage whose top is join-reducible ({0,1} chains).
    #[arg(long)]
    pub join_reducible: bool,
    #[arg(long, value_delimiter = ',')]
    pub seed: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub domain: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub arity: usize,
    #[arg(long, value_delimiter = ',')]
    pub values: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub left: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub right: Vec<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub max_depth: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["chain", "lattice"])))]
pub struct ExportArgs {
    /// Graphviz output (the only format).
    #[arg(long, required = true)]
    pub dot: bool,
    #[arg(long)]
    pub chain: Option<PathBuf>,
    /// Stage of --chain to draw (the last by default).
    #[arg(long, requires = "chain")]
    pub stage: Option<usize>,
    #[arg(long)]
    pub lattice: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    /// Table prefix file.
    #[arg(long)]
    pub p: PathBuf,
    #[arg(long)]
    pub q: PathBuf,
}

fn parse_variety(s: &str) -> Result<VarietyTag, String> {
    match s {
        "plain" => Ok(VarietyTag::Plain),
        "zero_one" => Ok(VarietyTag::ZeroOne),
        _ => Err(format!(
            "unknown variety {s:?} (expected plain or zero_one)"
        )),
    }
}

/// Whether a command found what it looked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Success
        } else {
            Outcome::Negative
        }
    }

    pub fn code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Negative => 2,
        }
    }
}

/// Parses `args` (program name first) with defaults from the config file named
/// by [`CONFIG_ENV`], runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Config::from_env() {
        Ok(cfg) => run_with_config(args, &cfg, out, err),
        Err(e) => {
            let _ = writeln!(err, "error: config: {e}");
            1
        }
    }
}

pub fn run_with_config<I, T>(args: I, cfg: &Config, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version also arrive here
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    match dispatch(&cli.command, cfg, out) {
        Ok(o) => o.code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

pub fn dispatch(cmd: &Command, cfg: &Config, out: &mut dyn Write) -> CliResult<Outcome> {
    match cmd {
        Command::Build(a) => build(a, cfg, out),
        Command::Check(a) => check(a, out),
        Command::Embed(a) => embed(a, out),
        Command::Amalgamate(a) => amalgamate(a, out),
        Command::Complete(a) => complete(a, out),
        Command::Probe(a) => probe(a, cfg, out),
        Command::Export(a) => export(a, out),
        Command::Metric(a) => metric(a, out),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::File {
        path: path.into(),
        message: e.to_string(),
    })
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::File {
        path: path.into(),
        message: e.to_string(),
    })
}

fn in_file<T>(path: &Path, r: fraisse_core::Result<T>) -> CliResult<T> {
    r.map_err(|e| CliError::File {
        path: path.into(),
        message: e.to_string(),
    })
}

pub fn load_chain(path: &Path) -> CliResult<StageChain> {
    in_file(path, deserialize_chain(&read(path)?))
}

pub fn load_lattice(path: &Path) -> CliResult<FinLattice> {
    in_file(
        path,
        LatticeFile::parse(&read(path)?).and_then(|f| f.to_lattice()),
    )
}

fn load_prefix(path: &Path) -> CliResult<TablePrefix> {
    let p: TablePrefix = serde_json::from_str(&read(path)?).map_err(|e| CliError::File {
        path: path.into(),
        message: format!("table prefix: {e}"),
    })?;
    let s = (p.bound + 1) * (p.bound + 1);
    if p.join.len() != s || p.meet.len() != s {
        let got = if p.join.len() != s {
            p.join.len()
        } else {
            p.meet.len()
        };
        return Err(CliError::File {
            path: path.into(),
            message: fraisse_core::Error::TableShape { expected: s, got }.to_string(),
        });
    }
    Ok(p)
}

fn emit(out: &mut dyn Write, v: &impl Serialize) -> CliResult<()> {
    let text = serde_json::to_string_pretty(v).expect("results are plain data");
    writeln!(out, "{text}").map_err(|e| CliError::Usage(format!("writing output: {e}")))
}

/// The build configuration for the given flags and config defaults.
pub fn build_config(a: &BuildArgs, cfg: &Config) -> BuildConfig {
    let variety = a.variety.or(cfg.variety).unwrap_or(VarietyTag::Plain);
    let k = a.k.or(cfg.k).unwrap_or(DEFAULT_K);
    let budget = a.budget.or(cfg.budget).unwrap_or(DEFAULT_BUDGET);
    let mut bc = BuildConfig::new(variety, k, budget);
    bc.stage_cap = a.stage_cap.or(cfg.stage_cap).unwrap_or(DEFAULT_STAGE_CAP);
    bc.order = if a.reverse {
        TaskOrder::Reverse
    } else {
        cfg.order.unwrap_or_default()
    };
    bc
}

fn build(a: &BuildArgs, cfg: &Config, out: &mut dyn Write) -> CliResult<Outcome> {
    let report = run_with(&build_config(a, cfg))?;
    let text = serialize_chain(&report.chain);
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            emit(
                out,
                &json!({
                    "status": report.status,
                    "stages": report.chain.len(),
                    "last_size": report.chain.last().len(),
                    "pending": report.chain.pending().count(),
                    "out": path,
                }),
            )?;
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("writing output: {e}")))?,
    }
    Ok(Outcome::Success)
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let chain = load_chain(&a.chain)?;
    let k = a.k.unwrap_or(chain.k);
    let both = !a.u1 && !a.u2u3;
    let mut ok = true;
    let mut res = serde_json::Map::new();
    if a.u1 || both {
        let r = check_u1(&chain, k, a.horizon.unwrap_or(chain.len()))?;
        ok &= r.all_realized();
        res.insert("unrealized".into(), json!(r.unrealized().count()));
        res.insert("u1".into(), json!(r));
    }
    if a.u2u3 || both {
        let r = check_u2_u3(&chain, k)?;
        ok &= r.u2_ok() && r.u3_ok();
        res.insert("coverage".into(), json!(r.coverage()));
        res.insert("u2u3".into(), json!(r));
    }
    emit(out, &res)?;
    Ok(Outcome::from_bool(ok))
}

/// The lexicographically first embedding of `source` into the last stage,
/// respecting constants on {0,1} chains (a source without constants gets its
/// bounds named).
pub fn embed_into_chain(
    chain: &StageChain,
    source: FinLattice,
) -> fraisse_core::Result<Option<(Embedding, usize)>> {
    let source = match (chain.variety, source.consts()) {
        (VarietyTag::ZeroOne, None) => source.with_bounds_as_consts()?,
        _ => source,
    };
    let spec = chain.variety.spec();
    let pins = spec.pinned_pairs(&source, chain.last());
    Ok(first_embedding(&source, chain.last(), &pins).map(|e| {
        let stage = chain.stage_of_all(&e.map).unwrap_or(0);
        (e, stage)
    }))
}

fn embed(a: &EmbedArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let chain = load_chain(&a.target)?;
    let source = load_lattice(&a.source)?;
    let found = embed_into_chain(&chain, source)?;
    match &found {
        Some((e, stage)) => emit(out, &json!({"map": e.map, "stage": stage}))?,
        None => emit(out, &json!({"map": null}))?,
    }
    Ok(Outcome::from_bool(found.is_some()))
}

fn leg(
    f: &Option<Vec<usize>>,
    a: &FinLattice,
    b: &FinLattice,
    which: &str,
) -> CliResult<Embedding> {
    let mode = if a.consts().is_some() {
        EmbeddingMode::Total01
    } else {
        EmbeddingMode::Total
    };
    match f {
        Some(map) => Ok(Embedding::new(map.clone(), mode)),
        None => {
            let pins: Vec<(usize, usize)> = match (a.consts(), b.consts()) {
                (Some((z, o)), Some((z2, o2))) => vec![(z, z2), (o, o2)],
                _ => Vec::new(),
            };
            first_embedding(a, b, &pins)
                .map(|e| Embedding::new(e.map, mode))
                .ok_or_else(|| CliError::Usage(format!("A does not embed into {which}")))
        }
    }
}

fn amalgamate(a: &AmalgamateArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let (la, l1, l2) = (
        load_lattice(&a.a)?,
        load_lattice(&a.b1)?,
        load_lattice(&a.b2)?,
    );
    let f1 = leg(&a.f1, &la, &l1, "B1")?;
    let f2 = leg(&a.f2, &la, &l2, "B2")?;
    let opts = if a.ideal {
        AmalgamOptions::ideal()
    } else {
        AmalgamOptions::default()
    };
    let with_consts = [&la, &l1, &l2]
        .iter()
        .filter(|l| l.consts().is_some())
        .count();
    let r = match with_consts {
        0 => amalgamate_with(&la, &l1, &l2, &f1, &f2, opts)?,
        3 => amalgamate01_with(
            &Lattice01::new(la)?,
            &Lattice01::new(l1)?,
            &Lattice01::new(l2)?,
            &f1,
            &f2,
            opts,
        )?,
        _ => {
            return Err(CliError::Usage(
                "either all three lattices carry constants or none does".into(),
            ))
        }
    };
    emit(
        out,
        &json!({
            "d": LatticeFile::of(&r.d),
            "g1": r.g1.map,
            "g2": r.g2.map,
            "square_ok": r.square_ok,
            "unpruned_size": r.unpruned_size,
            "strategy": r.strategy,
        }),
    )?;
    Ok(Outcome::Success)
}

fn complete(a: &CompleteArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let path = &a.partial_lattice_file;
    let p = in_file(
        path,
        PartialLatticeFile::parse(&read(path)?).and_then(|f| f.to_partial()),
    )?;
    let c = if p.consts().is_some() {
        complete01(&p)?
    } else {
        fep_complete(&p)?
    };
    let ideals: Vec<Vec<usize>> = c.ideals.iter().map(|i| i.elements()).collect();
    emit(
        out,
        &json!({
            "lattice": LatticeFile::of(&c.lattice),
            "embed": c.embed,
            "ideals": ideals,
            "adjoined_consts": c.adjoined_consts,
        }),
    )?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairCollapse {
    pub a: usize,
    pub b: usize,
    pub collapse: Collapse,
}

/// Collapse stages of `Cg(a, b)` on the seed's bounds, for every pair `a < b`
/// of a seed that must be a sublattice of the last stage.
pub fn seed_collapses(
    chain: &StageChain,
    seed: &[usize],
    horizon: usize,
) -> fraisse_core::Result<Vec<PairCollapse>> {
    let l = chain.last();
    if let Some(&id) = seed.iter().find(|&&x| x >= l.len()) {
        return Err(fraisse_core::Error::IdOutOfRange { id, n: l.len() });
    }
    let mut ids = seed.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() < 2 || l.generated(ids.iter().copied()) != ids {
        return Err(fraisse_core::Error::InvalidSeed(
            "seed must be a sublattice with at least two elements".into(),
        ));
    }
    let target = (
        l.meet_all(ids.iter().copied()).expect("nonempty"),
        l.join_all(ids.iter().copied()).expect("nonempty"),
    );
    let mut res = Vec::new();
    for &a in &ids {
        for &b in &ids {
            if l.lt(a, b) {
                let collapse = simplicity_collapse_witness(chain, a, b, target, horizon)?;
                res.push(PairCollapse { a, b, collapse });
            }
        }
    }
    Ok(res)
}

fn probe(a: &ProbeArgs, cfg: &Config, out: &mut dyn Write) -> CliResult<Outcome> {
    let horizon = a.horizon.or(cfg.horizon).unwrap_or(DEFAULT_HORIZON);
    if a.n5m3 {
        let l = match (&a.chain, &a.lattice) {
            (_, Some(p)) => load_lattice(p)?,
            (Some(p), None) => load_chain(p)?.last().clone(),
            (None, None) => {
                return Err(CliError::Usage("--n5m3 needs --chain or --lattice".into()))
            }
        };
        let r = find_n5_m3(&l);
        emit(out, &r)?;
        return Ok(Outcome::from_bool(!r.is_distributive()));
    }
    let path = a
        .chain
        .as_deref()
        .ok_or_else(|| CliError::Usage("this probe needs --chain".into()))?;
    let chain = load_chain(path)?;
    if a.simplicity {
        let res = seed_collapses(&chain, &a.seed, horizon)?;
        emit(out, &res)?;
        return Ok(Outcome::from_bool(
            res.iter()
                .all(|p| matches!(p.collapse, Collapse::Found { .. })),
        ));
    }
    if a.interpolate {
        let f = MonotoneTable {
            domain: a.domain.clone(),
            arity: a.arity,
            values: a.values.clone(),
        };
        let depth = a.max_depth.or(cfg.max_depth).unwrap_or(DEFAULT_MAX_DEPTH);
        let r = monotone_interpolation_search(&chain, &f, horizon, depth)?;
        let found = matches!(r, Interpolation::Found { .. });
        match &r {
            Interpolation::Found { stage, term } => emit(
                out,
                &json!({"outcome": "found", "stage": stage, "term": term, "text": term.to_string()}),
            )?,
            Interpolation::NotFoundWithinBudget => emit(out, &r)?,
        }
        return Ok(Outcome::from_bool(found));
    }
    if a.intervals {
        if a.left.len() != 2 || a.right.len() != 2 {
            return Err(CliError::Usage(
                "--left and --right take two ids each".into(),
            ));
        }
        let rounds = a.rounds.or(cfg.rounds).unwrap_or(DEFAULT_ROUNDS);
        let r = interval_back_and_forth(
            &chain,
            (a.left[0], a.left[1]),
            (a.right[0], a.right[1]),
            rounds,
        )?;
        emit(out, &r)?;
        return Ok(Outcome::from_bool(r.stalled.is_none()));
    }
    let r = one_join_reducible_stage(&chain)?;
    emit(out, &r)?;
    Ok(Outcome::from_bool(matches!(r, JoinReducible::Found { .. })))
}

fn export(a: &ExportArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let l = match (&a.chain, &a.lattice) {
        (Some(p), _) => {
            let chain = load_chain(p)?;
            let i = a.stage.unwrap_or(chain.len() - 1);
            if i >= chain.len() {
                return Err(CliError::Usage(format!("chain has {} stages", chain.len())));
            }
            chain.stage(i).clone()
        }
        (None, Some(p)) => load_lattice(p)?,
        (None, None) => unreachable!("clap requires an input"),
    };
    let dot = export_hasse(&l);
    match &a.out {
        Some(p) => write_file(p, &dot)?,
        None => out
            .write_all(dot.as_bytes())
            .map_err(|e| CliError::Usage(format!("writing output: {e}")))?,
    }
    Ok(Outcome::Success)
}

fn metric(a: &MetricArgs, out: &mut dyn Write) -> CliResult<Outcome> {
    let d = metric_d(&load_prefix(&a.p)?, &load_prefix(&a.q)?)?;
    emit(
        out,
        &json!({"exp": d.exp, "exact": d.exact, "text": d.to_string()}),
    )?;
    Ok(Outcome::Success)
}

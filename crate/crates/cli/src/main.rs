mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use fortlib::cache::{cached_census, CacheStatus, CensusCache};
use fortlib::constructions::{bipartite_parity_fort, construction_sweep, lift_zfs, product_fort};
use fortlib::forts::{
    enumerate_forts_of_size, enumerate_minimal_forts, failed_zf_number, DEFAULT_BUDGET,
};
use fortlib::lp::{format_rational, fractional_zf_solution};
use fortlib::search::{
    domination_number, enumerate_zfs_of_size, fort_number, min_zero_forcing_number,
    open_packing_number, pt_spectrum, total_domination_number, ParameterReport,
};
use fortlib::symmetry::{canonical_form, classify_orbits};
use fortlib::verify::{verify_all, VerifyOptions, DEFAULT_SEED};
use fortlib::{Error, FortCensus, Graph, VertexSet};

use manifest::{sha256_hex, RunManifest};

const EXIT_FAILED_CLAIMS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(name = "fortlib", version, about = "Forts and zero forcing on graphs")]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Directory for cached fort censuses. FORTLIB_CACHE takes precedence.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Write a run manifest to this path.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a graph.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Minimal-fort census or all forts of one size.
    Forts(FortsArgs),
    /// Zero forcing sets.
    #[command(subcommand)]
    Zf(ZfCmd),
    /// Graph parameters.
    Params(ParamsArgs),
    /// Fort constructions on products and the ZFS lift.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Hypercube symmetry.
    #[command(subcommand)]
    Sym(SymCmd),
    /// Run the hypercube claim suite.
    VerifyPaper(VerifyArgs),
}

#[derive(Subcommand)]
enum GenCmd {
    Hypercube {
        d: usize,
    },
    Product {
        a: PathBuf,
        b: PathBuf,
    },
    /// Edge list: a header line "n m" followed by m lines "u v".
    Edgelist {
        file: PathBuf,
    },
}

#[derive(Args)]
struct Budget {
    /// Maximum number of candidate subsets an exhaustive scan may examine.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
}

#[derive(Args)]
struct FortsArgs {
    graph: PathBuf,
    /// Enumerate all minimal forts (the default).
    #[arg(long)]
    minimal: bool,
    /// Enumerate all forts with exactly this many vertices.
    #[arg(long, conflicts_with = "minimal")]
    size: Option<usize>,
    /// Print the size histogram as CSV.
    #[arg(long)]
    csv: bool,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Subcommand)]
enum ZfCmd {
    Number {
        graph: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
    /// All zero forcing sets of a size (default: minimum ones).
    Enumerate {
        graph: PathBuf,
        #[arg(long)]
        size: Option<usize>,
        #[command(flatten)]
        budget: Budget,
    },
    /// Propagation times over all minimum zero forcing sets.
    Pt {
        graph: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Args)]
struct ParamsArgs {
    graph: PathBuf,
    #[arg(long)]
    z: bool,
    #[arg(long)]
    ft: bool,
    #[arg(long)]
    zstar: bool,
    #[arg(long)]
    pt: bool,
    #[arg(long)]
    gamma: bool,
    #[arg(long)]
    gamma_t: bool,
    #[arg(long)]
    rho: bool,
    #[arg(long)]
    failedzf: bool,
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    budget: Budget,
}

#[derive(Subcommand)]
enum ConstructCmd {
    /// F x F' for minimal forts F of G and F' of H.
    Product {
        g: PathBuf,
        f: String,
        h: PathBuf,
        fp: String,
    },
    /// Parity construction on bipartite factors.
    Parity {
        g: PathBuf,
        f: String,
        h: PathBuf,
        fp: String,
        #[arg(long)]
        require_minimal: bool,
        /// Exchange the two parts of H.
        #[arg(long)]
        swap_parts: bool,
    },
    /// Lift a minimum zero forcing set of Q_d to Q_(d+1).
    Lift {
        graph: PathBuf,
        set: String,
        #[command(flatten)]
        budget: Budget,
    },
    /// Every construction from Q_(d-1) and Q_1, closed under symmetry.
    Sweep { d: usize },
}

#[derive(Subcommand)]
enum SymCmd {
    /// Canonical form and orbit size of a vertex set of Q_d.
    Canon { d: usize, set: String },
    /// Orbit classes of sets read from a JSON file (default: minimal forts of Q_d).
    Classify {
        d: usize,
        #[arg(long)]
        sets: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    max_dim: usize,
    #[command(flatten)]
    budget: Budget,
}

struct Ctx {
    cache: Option<CensusCache>,
    seed: u64,
    inputs: BTreeMap<String, String>,
}

/// Error plus the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::GraphTooLarge { .. } | Error::BudgetExceeded { .. } => EXIT_GUARD,
            Error::InternalConsistency(_) => EXIT_INTERNAL,
            _ => EXIT_USAGE,
        };
        let mut message = e.to_string();
        if let Error::GraphTooLarge { .. } = e {
            message.push_str("; for fort scans try `forts --size k`");
        }
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<(Value, u8), Failure>;

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes =
            fs::read(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs
            .insert(path.display().to_string(), sha256_hex(&bytes));
        String::from_utf8(bytes).map_err(|_| usage(format!("{} is not UTF-8", path.display())))
    }

    fn graph(&mut self, path: &Path) -> Result<Graph, Failure> {
        let text = self.read(path)?;
        let g = if text.trim_start().starts_with('{') {
            Graph::from_json_str(&text)?
        } else {
            Graph::from_edge_list_text(&text)?
        };
        Ok(g)
    }

    fn census(&self, g: &Graph) -> Result<FortCensus, Error> {
        let (c, status) = cached_census(self.cache.as_ref(), g, "minimal-forts", "", || {
            enumerate_minimal_forts(g)
        })?;
        if status == CacheStatus::Rejected {
            log::warn!("cache entry was unusable; recomputed");
        }
        Ok(c)
    }
}

fn parse_set(n: usize, text: &str) -> Result<VertexSet, Failure> {
    let body = text.trim().trim_start_matches('[').trim_end_matches(']');
    let mut idx = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        idx.push(
            part.parse::<usize>()
                .map_err(|_| usage(format!("bad vertex index {part:?}")))?,
        );
    }
    Ok(VertexSet::from_indices(n, idx)?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn run(cli: &Cli, ctx: &mut Ctx) -> Outcome {
    match &cli.command {
        Command::Gen(cmd) => {
            let g = match cmd {
                GenCmd::Hypercube { d } => {
                    if *d == 0 {
                        return Err(usage("hypercube dimension must be at least 1"));
                    }
                    Graph::hypercube(*d)?
                }
                GenCmd::Product { a, b } => {
                    let a = ctx.graph(a)?;
                    let b = ctx.graph(b)?;
                    a.cartesian_product(&b)?
                }
                GenCmd::Edgelist { file } => ctx.graph(file)?,
            };
            Ok((to_value(&g.to_json()), 0))
        }
        Command::Forts(args) => forts(args, ctx),
        Command::Zf(cmd) => zf(cmd, ctx),
        Command::Params(args) => params(args, ctx),
        Command::Construct(cmd) => construct(cmd, ctx),
        Command::Sym(cmd) => sym(cmd, ctx),
        Command::VerifyPaper(args) => {
            let opts = VerifyOptions {
                max_dim: args.max_dim,
                budget: args.budget.budget,
                seed: ctx.seed,
            };
            let ctx_ref = &*ctx;
            let report = verify_all(&opts, &mut |g: &Graph| ctx_ref.census(g))?;
            let code = if report.all_pass {
                0
            } else {
                EXIT_FAILED_CLAIMS
            };
            Ok((to_value(&report), code))
        }
    }
}

fn forts(args: &FortsArgs, ctx: &mut Ctx) -> Outcome {
    let g = ctx.graph(&args.graph)?;
    let (value, histogram) = match args.size {
        Some(k) => {
            let sets = enumerate_forts_of_size(&g, k, args.budget.budget)?;
            let hist = BTreeMap::from([(k, sets.len())]);
            let v = json!({
                "graph_id": g.canonical_hash(),
                "n": g.n(),
                "size": k,
                "count": sets.len(),
                "forts": sets,
            });
            (v, hist)
        }
        None => {
            let c = ctx.census(&g)?;
            (to_value(&c.to_json()), c.by_size.clone())
        }
    };
    if args.csv {
        let mut text = String::from("size,count\n");
        for (k, c) in histogram {
            text.push_str(&format!("{k},{c}\n"));
        }
        return Ok((Value::String(text), 0));
    }
    Ok((value, 0))
}

fn census_if_small(ctx: &Ctx, g: &Graph) -> Result<Option<FortCensus>, Failure> {
    if g.n() <= fortlib::forts::CENSUS_LIMIT {
        Ok(Some(ctx.census(g)?))
    } else {
        Ok(None)
    }
}

fn zf(cmd: &ZfCmd, ctx: &mut Ctx) -> Outcome {
    match cmd {
        ZfCmd::Number { graph, budget } => {
            let g = ctx.graph(graph)?;
            let c = census_if_small(ctx, &g)?;
            let (z, w) = min_zero_forcing_number(&g, c.as_ref(), budget.budget)?;
            Ok((
                json!({"graph_id": g.canonical_hash(), "Z": z, "witness": w}),
                0,
            ))
        }
        ZfCmd::Enumerate {
            graph,
            size,
            budget,
        } => {
            let g = ctx.graph(graph)?;
            let k = match size {
                Some(k) => *k,
                None => {
                    let c = census_if_small(ctx, &g)?;
                    min_zero_forcing_number(&g, c.as_ref(), budget.budget)?.0
                }
            };
            let sets = enumerate_zfs_of_size(&g, k, budget.budget)?;
            Ok((
                json!({"graph_id": g.canonical_hash(), "size": k, "count": sets.len(), "sets": sets}),
                0,
            ))
        }
        ZfCmd::Pt { graph, budget } => {
            let g = ctx.graph(graph)?;
            let c = census_if_small(ctx, &g)?;
            let s = pt_spectrum(&g, c.as_ref(), budget.budget)?;
            let mut v = to_value(&s);
            v["spectrum"] = to_value(&s.spectrum());
            v["full_interval"] = Value::Bool(s.is_full_interval());
            Ok((v, 0))
        }
    }
}

fn params(args: &ParamsArgs, ctx: &mut Ctx) -> Outcome {
    let g = ctx.graph(&args.graph)?;
    let all = args.all
        || !(args.z
            || args.ft
            || args.zstar
            || args.pt
            || args.gamma
            || args.gamma_t
            || args.rho
            || args.failedzf);
    let budget = args.budget.budget;
    let mut report = ParameterReport::new(&g);
    let needs_census = all || args.z || args.ft || args.zstar || args.pt;
    let census = if needs_census {
        census_if_small(ctx, &g)?
    } else {
        None
    };
    let complete = || {
        census.as_ref().ok_or(Error::GraphTooLarge {
            n: g.n(),
            limit: fortlib::forts::CENSUS_LIMIT,
            what: "minimal-fort census",
        })
    };
    if all || args.z {
        let (z, w) = min_zero_forcing_number(&g, census.as_ref(), budget)?;
        report.z = Some(z);
        report.z_witnesses = Some(vec![w]);
    }
    if all || args.zstar {
        report.zstar = Some(format_rational(
            &fractional_zf_solution(&g, complete()?)?.value,
        ));
    }
    if all || args.ft {
        let (ft, fam) = fort_number(&g, complete()?)?;
        report.ft = Some(ft);
        report.ft_witness = Some(fam);
    }
    if all || args.pt {
        let s = pt_spectrum(&g, census.as_ref(), budget)?;
        report.pt_min = Some(s.pt_min);
        report.pt_max = Some(s.pt_max);
        report.pt_spectrum = Some(s.spectrum());
    }
    if all || args.gamma {
        report.gamma = Some(domination_number(&g)?.0);
    }
    if all || args.gamma_t {
        report.gamma_t = Some(total_domination_number(&g)?.0);
    }
    if all || args.rho {
        report.rho_open = Some(open_packing_number(&g)?.0);
    }
    if all || args.failedzf {
        report.failed_zf = Some(failed_zf_number(&g, budget)?);
    }
    report.verify(&g)?;
    Ok((to_value(&report), 0))
}

fn construct(cmd: &ConstructCmd, ctx: &mut Ctx) -> Outcome {
    let v = match cmd {
        ConstructCmd::Product { g, f, h, fp } => {
            let (g, h) = (ctx.graph(g)?, ctx.graph(h)?);
            let (f, fp) = (parse_set(g.n(), f)?, parse_set(h.n(), fp)?);
            to_value(&product_fort(&g, &f, &h, &fp)?)
        }
        ConstructCmd::Parity {
            g,
            f,
            h,
            fp,
            require_minimal,
            swap_parts,
        } => {
            let (g, h) = (ctx.graph(g)?, ctx.graph(h)?);
            let (f, fp) = (parse_set(g.n(), f)?, parse_set(h.n(), fp)?);
            to_value(&bipartite_parity_fort(
                &g,
                &f,
                &h,
                &fp,
                *require_minimal,
                *swap_parts,
            )?)
        }
        ConstructCmd::Lift { graph, set, budget } => {
            let g = ctx.graph(graph)?;
            let s = parse_set(g.n(), set)?;
            json!({"result": lift_zfs(&g, &s, budget.budget)?})
        }
        ConstructCmd::Sweep { d } => {
            let s = construction_sweep(*d)?;
            json!({
                "d": s.d,
                "all_outputs": s.all_outputs.len(),
                "guaranteed_minimal": s.guaranteed_minimal.len(),
                "closed_under_symmetry": s.closed_under_symmetry.len(),
                "forts": s.closed_under_symmetry,
            })
        }
    };
    Ok((v, 0))
}

fn sym(cmd: &SymCmd, ctx: &mut Ctx) -> Outcome {
    match cmd {
        SymCmd::Canon { d, set } => {
            if *d >= usize::BITS as usize {
                return Err(usage("dimension too large"));
            }
            let s = parse_set(1 << d, set)?;
            Ok((to_value(&canonical_form(*d, &s)?), 0))
        }
        SymCmd::Classify { d, sets } => {
            let sets = match sets {
                Some(path) => {
                    let text = ctx.read(path)?;
                    let raw: Vec<Vec<usize>> = serde_json::from_str(&text)
                        .map_err(|e| usage(format!("bad set list: {e}")))?;
                    raw.into_iter()
                        .map(|s| VertexSet::from_indices(1 << d, s))
                        .collect::<Result<Vec<_>, _>>()?
                }
                None => ctx.census(&Graph::hypercube(*d)?)?.minimal_forts,
            };
            Ok((to_value(&classify_orbits(*d, &sets)?), 0))
        }
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("thread pool is configured once");
    }
    let mut ctx = Ctx {
        cache: CensusCache::resolve(cli.cache_dir.as_deref()),
        seed: cli.seed,
        inputs: BTreeMap::new(),
    };
    let (text, code) = match run(&cli, &mut ctx) {
        Ok((Value::String(s), code)) => (s, code),
        Ok((v, code)) => {
            let mut s = serde_json::to_string_pretty(&v).expect("result serializes");
            s.push('\n');
            (s, code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            (String::new(), f.code)
        }
    };
    if !text.is_empty() {
        match &cli.out {
            Some(p) => {
                if let Err(e) = fs::write(p, &text) {
                    eprintln!("error: cannot write {}: {e}", p.display());
                    return ExitCode::from(EXIT_USAGE);
                }
            }
            None => print!("{text}"),
        }
    }
    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command_line: std::env::args().collect(),
            input_hashes: ctx.inputs,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: started.elapsed().as_millis(),
            exit_code: code as i32,
            result_digest: sha256_hex(text.as_bytes()),
        };
        if let Err(e) = m.write(path) {
            eprintln!("error: cannot write manifest {}: {e}", path.display());
        }
    }
    ExitCode::from(code)
}

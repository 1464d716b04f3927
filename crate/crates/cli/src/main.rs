//! `posetfree` command-line driver.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use posetfree::census::{
    count_p_free, e_lower, experiment_csv, la, lower_bound_exponent, container_experiment, ExperimentConfig,
};
use posetfree::containers::{container_pair, default_t2, two_phase, verify_pair, ContainerPair};
use posetfree::embedding::{contains_poset, first_copy};
use posetfree::grading::{graded_chain_cover, graded_completion};
use posetfree::lattice::{
    chain_profile, count_marked_chains, marked_chain_lower_bound, sample_chain_profile, trim_alpha,
};
use posetfree::{blowup, fixtures, Poset, PosetSpec, SetFamily};

#[derive(Parser)]
#[command(name = "posetfree", version, about = "Exact combinatorics for P-free set systems")]
struct Cli {
    /// Worker threads for parallel enumeration (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Human-readable output instead of compact JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Poset queries and constructions.
    #[command(subcommand)]
    Poset(PosetCmd),
    /// Chain statistics of set families.
    #[command(subcommand)]
    Family(FamilyCmd),
    /// Containment searches.
    #[command(subcommand)]
    Embed(EmbedCmd),
    /// The container algorithm.
    #[command(subcommand)]
    Containers(ContainersCmd),
    /// Exhaustive counts and experiments.
    #[command(subcommand)]
    Census(CensusCmd),
}

#[derive(Subcommand)]
enum PosetCmd {
    /// Checks a poset file and reports height, tree and graded flags.
    Validate { file: PathBuf },
    Height { file: PathBuf },
    /// Lists the maximal chains.
    Chains { file: PathBuf },
    /// The order dual.
    Dual { file: PathBuf },
    /// The blowup `P(x, t)` with its copy labels.
    Blowup {
        file: PathBuf,
        #[arg(long)]
        root: usize,
        #[arg(long)]
        t: usize,
    },
    /// Graded chain cover: chains and hanging intervals.
    Cover { file: PathBuf },
    /// Graded completion and the embedding map.
    Complete { file: PathBuf },
    /// Prints a built-in poset: chain1..chain5, v, lambda, n, x, butterfly,
    /// path4, or `random` with --m and --seed.
    Fixture {
        name: String,
        #[arg(long, default_value_t = 6)]
        m: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Subcommand)]
enum FamilyCmd {
    /// Counts of maximal chains by how many members they meet.
    Profile {
        file: PathBuf,
        /// Estimate from this many sampled chains instead of counting exactly.
        #[arg(long, requires = "seed")]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Counts marked chains; with --eps also checks the supersaturation bound.
    Marked {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Splits off the members of size below αn or above (1-α)n.
    Trim {
        file: PathBuf,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Subcommand)]
enum EmbedCmd {
    /// Looks for a copy of the poset in the family.
    Check { poset: PathBuf, family: PathBuf },
    /// The least copy of the blowup `P(root, t)` in the family.
    FirstCopy {
        poset: PathBuf,
        family: PathBuf,
        #[arg(long)]
        root: usize,
        #[arg(long)]
        t: usize,
    },
}

#[derive(Subcommand)]
enum ContainersCmd {
    /// Runs the algorithm on a P-free family and prints the pair as JSON.
    Run {
        poset: PathBuf,
        family: PathBuf,
        #[arg(long)]
        root: usize,
        /// Blowup factor; the first-phase factor with --two-phase.
        #[arg(long)]
        t: usize,
        /// Ground family S (default: every subset).
        #[arg(long)]
        ground: Option<PathBuf>,
        /// Rerun on the first G with a second factor.
        #[arg(long)]
        two_phase: bool,
        /// Second-phase factor, a number or `auto` for ⌈log₂ n⌉.
        #[arg(long, default_value = "auto", requires = "two_phase")]
        t2: String,
    },
    /// Re-checks a pair against the family it was built from.
    Verify { pair: PathBuf, family: PathBuf },
}

#[derive(Args)]
struct CensusArgs {
    #[arg(long)]
    poset: PathBuf,
    #[arg(long)]
    n: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum CensusCmd {
    /// Number of P-free families on [n].
    Count(CensusArgs),
    /// Largest size of a P-free family on [n].
    La(CensusArgs),
    /// Lower estimate of the exponent limit from n = 1..=N.
    ELower(CensusArgs),
    /// Container bookkeeping table for n = 1..=N as CSV (JSON with --json).
    Experiment {
        #[command(flatten)]
        common: CensusArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        root: usize,
        #[arg(long)]
        t1: Option<usize>,
        #[arg(long)]
        t2: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

/// Text to print, and whether a check performed by the command passed.
struct Output {
    text: String,
    ok: bool,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_poset(path: &Path) -> anyhow::Result<Poset> {
    let spec: PosetSpec =
        serde_json::from_str(&read(path)?).with_context(|| format!("{} is not a poset file", path.display()))?;
    Poset::from_spec(&spec).with_context(|| format!("invalid poset in {}", path.display()))
}

fn load_family(path: &Path) -> anyhow::Result<SetFamily> {
    SetFamily::parse(&read(path)?).with_context(|| format!("invalid family in {}", path.display()))
}

fn render<T: Serialize>(value: &T, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        serde_json::to_string(value).expect("serializable")
    }
}

fn masks(f: &SetFamily) -> Value {
    json!({ "n": f.n(), "members": f.members() })
}

fn run_poset(cmd: PosetCmd, pretty: bool) -> anyhow::Result<Output> {
    let text = match cmd {
        PosetCmd::Validate { file } => {
            let p = load_poset(&file)?;
            if pretty {
                format!(
                    "m={}\nheight={}\ntree={}\ngraded={}",
                    p.len(),
                    p.height(),
                    p.is_tree(),
                    p.is_graded()
                )
            } else {
                render(
                    &json!({ "m": p.len(), "height": p.height(), "tree": p.is_tree(), "graded": p.is_graded() }),
                    false,
                )
            }
        }
        PosetCmd::Height { file } => load_poset(&file)?.height().to_string(),
        PosetCmd::Chains { file } => render(&load_poset(&file)?.maximal_chains(), pretty),
        PosetCmd::Dual { file } => render(&load_poset(&file)?.dual().to_spec(), pretty),
        PosetCmd::Blowup { file, root, t } => {
            let p = load_poset(&file)?;
            let b = blowup(&p, root, t)?;
            if pretty {
                let mut s = format!("{} elements\nelement  label    source\n", b.len());
                for (e, l) in b.labels().iter().enumerate() {
                    s.push_str(&format!("{e:<8} x({},{})  {}\n", l.i, l.r, l.source));
                }
                s.pop();
                s
            } else {
                render(&json!({ "poset": b.poset().to_spec(), "labels": b.labels() }), false)
            }
        }
        PosetCmd::Cover { file } => render(&graded_chain_cover(&load_poset(&file)?)?, pretty),
        PosetCmd::Complete { file } => {
            let c = graded_completion(&load_poset(&file)?)?;
            render(&json!({ "poset": c.hat.to_spec(), "embed_map": c.embed_map }), pretty)
        }
        PosetCmd::Fixture { name, m, seed } => {
            let p = if name == "random" {
                let Some(seed) = seed else { bail!("`random` needs --seed") };
                fixtures::random_tree(m, seed)
            } else {
                fixtures::by_name(&name).with_context(|| format!("no fixture named `{name}`"))?
            };
            render(&p.to_spec(), pretty)
        }
    };
    Ok(Output { text, ok: true })
}

fn run_family(cmd: FamilyCmd, pretty: bool) -> anyhow::Result<Output> {
    let text = match cmd {
        FamilyCmd::Profile { file, samples, seed } => {
            let f = load_family(&file)?;
            match samples {
                Some(samples) => render(&sample_chain_profile(&f, samples, seed.unwrap_or_default())?, pretty),
                None => render(&chain_profile(&f)?, pretty),
            }
        }
        FamilyCmd::Marked { file, k, a, eps } => {
            let f = load_family(&file)?;
            match eps {
                Some(eps) => {
                    let bound = marked_chain_lower_bound(&f, k, a, eps)?;
                    let ok = bound.holds;
                    return Ok(Output { text: render(&bound, pretty), ok });
                }
                None => count_marked_chains(&f, k, a)?.to_string(),
            }
        }
        FamilyCmd::Trim { file, alpha } => {
            let (kept, removed) = trim_alpha(&load_family(&file)?, alpha)?;
            render(&json!({ "kept": masks(&kept), "removed": masks(&removed) }), pretty)
        }
    };
    Ok(Output { text, ok: true })
}

fn run_embed(cmd: EmbedCmd, pretty: bool) -> anyhow::Result<Output> {
    let text = match cmd {
        EmbedCmd::Check { poset, family } => {
            let (p, f) = (load_poset(&poset)?, load_family(&family)?);
            let found = contains_poset(&f, &p);
            render(
                &json!({ "contains": found.is_some(), "embedding": found.map(|e| e.assignment) }),
                pretty,
            )
        }
        EmbedCmd::FirstCopy { poset, family, root, t } => {
            let (p, f) = (load_poset(&poset)?, load_family(&family)?);
            let b = blowup(&p, root, t)?;
            let copy = first_copy(&f, &b)?;
            render(&json!({ "copy": copy.map(|e| e.assignment) }), pretty)
        }
    };
    Ok(Output { text, ok: true })
}

fn run_containers(cmd: ContainersCmd, pretty: bool) -> anyhow::Result<Output> {
    match cmd {
        ContainersCmd::Run { poset, family, root, t, ground, two_phase: phased, t2 } => {
            let (p, f) = (load_poset(&poset)?, load_family(&family)?);
            let pair = if phased {
                if ground.is_some() {
                    bail!("--ground cannot be combined with --two-phase");
                }
                let t2 = match t2.as_str() {
                    "auto" => default_t2(f.n()),
                    v => v.parse().with_context(|| format!("--t2 expects a number or `auto`, got `{v}`"))?,
                };
                two_phase(&p, root, f.n(), &f, t, t2)?
            } else {
                let s = match ground {
                    Some(path) => load_family(&path)?,
                    None => SetFamily::full(f.n()),
                };
                container_pair(&p, root, t, &s, &f)?
            };
            let text = if pretty { render(&pair, true) } else { pair.to_json() };
            Ok(Output { text, ok: true })
        }
        ContainersCmd::Verify { pair, family } => {
            let pair = ContainerPair::from_json(&read(&pair)?)?;
            let report = verify_pair(&pair, &load_family(&family)?)?;
            Ok(Output { text: render(&report, pretty), ok: report.passed() })
        }
    }
}

fn run_census(cmd: CensusCmd, pretty: bool) -> anyhow::Result<(Output, Option<PathBuf>)> {
    let (text, out) = match cmd {
        CensusCmd::Count(args) => (count_p_free(args.n, &load_poset(&args.poset)?)?.to_string(), args.out),
        CensusCmd::La(args) => (la(args.n, &load_poset(&args.poset)?)?.to_string(), args.out),
        CensusCmd::ELower(args) => {
            let p = load_poset(&args.poset)?;
            let value = e_lower(&p, args.n)?;
            let text = if pretty {
                format!("e_lower={value}\nlower_exponent(n={})={}", args.n, lower_bound_exponent(args.n, p.height()))
            } else {
                value.to_string()
            };
            (text, args.out)
        }
        CensusCmd::Experiment { common, seed, samples, root, t1, t2, json } => {
            let p = load_poset(&common.poset)?;
            let config = ExperimentConfig { t1, t2, root, samples, seed, ..ExperimentConfig::default() };
            let rows = container_experiment(&p, 1..=common.n, &config)?;
            let text = if json { render(&rows, pretty) } else { experiment_csv(&rows).trim_end().to_string() };
            (text, common.out)
        }
    };
    Ok((Output { text, ok: true }, out))
}

fn run(cli: Cli) -> anyhow::Result<Output> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let pretty = cli.pretty;
    match cli.command {
        Command::Poset(cmd) => run_poset(cmd, pretty),
        Command::Family(cmd) => run_family(cmd, pretty),
        Command::Embed(cmd) => run_embed(cmd, pretty),
        Command::Containers(cmd) => run_containers(cmd, pretty),
        Command::Census(cmd) => {
            let (output, out) = run_census(cmd, pretty)?;
            match out {
                Some(path) => {
                    fs::write(&path, format!("{}\n", output.text))
                        .with_context(|| format!("cannot write {}", path.display()))?;
                    Ok(Output { text: String::new(), ok: output.ok })
                }
                None => Ok(output),
            }
        }
    }
}

fn main() -> ExitCode {
    // Clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            if !output.text.is_empty() {
                let mut stdout = std::io::stdout().lock();
                let _ = writeln!(stdout, "{}", output.text);
            }
            if output.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

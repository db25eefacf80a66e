use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eho_forage::harness::config::ExperimentConfig;
use eho_forage::harness::experiment::{run_experiment, Corpus};
use eho_forage::harness::ingest::ingest;
use eho_forage::harness::report::{read_report, write_report};
use eho_forage::harness::synth::{generate, SynthConfig};
use eho_forage::rng::seeded;
use eho_forage::territory::{scan_k, wss};
use eho_forage::Error;

/// Information foraging on social graphs.
#[derive(Parser)]
#[command(name = "eho-forage", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a JSON Lines corpus and print graph statistics.
    Ingest { corpus: PathBuf },
    /// Cluster a corpus into territories, or scan a range of k.
    Cluster(ClusterArgs),
    /// Search surfing paths for a batch of interest queries.
    Forage(Box<ForageArgs>),
    /// Write a planted-topic corpus.
    Synth(SynthArgs),
    /// Summarize a report written by `forage`.
    Report { report: PathBuf },
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Stopword file, one word per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// IDF logarithm base (`e` for natural log).
    #[arg(long)]
    idf_log_base: Option<String>,
}

#[derive(Args)]
struct ClusterArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    k: Option<usize>,
    /// Inclusive range such as `1..8`; prints one WSS per k.
    #[arg(long, conflicts_with = "k")]
    scan_k: Option<String>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sum squared rather than plain distances.
    #[arg(long)]
    wss_squared: bool,
    /// Snapshot output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ForageArgs {
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    engine: Option<String>,
    /// Interest keywords; repeat for several queries.
    #[arg(long)]
    interests: Vec<String>,
    /// File with one interest query per line.
    #[arg(long)]
    interests_file: Option<PathBuf>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Clustering snapshot to load, or to write when it does not exist yet.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Fail instead of clustering when the snapshot is missing.
    #[arg(long)]
    no_cluster: bool,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    n_clans: Option<usize>,
    #[arg(long)]
    n_per_clan: Option<usize>,
    #[arg(long)]
    max_gen: Option<usize>,
    #[arg(long)]
    dist_clan: Option<usize>,
    #[arg(long)]
    dist_elephant: Option<usize>,
    #[arg(long)]
    q0: Option<f64>,
    #[arg(long)]
    t0: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    n_ants: Option<usize>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    inertia: Option<f64>,
    #[arg(long)]
    n_particles: Option<usize>,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Any configuration key as `key=value`; applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Report path (`run.csv` plus sibling files). Prints a summary when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 3)]
    topics: usize,
    #[arg(long, default_value_t = 4000)]
    posts: usize,
    #[arg(long, default_value_t = 0.05)]
    noise_ratio: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also write this many interest queries, one per line.
    #[arg(long)]
    queries: Option<usize>,
    #[arg(long)]
    queries_out: Option<PathBuf>,
}

fn corpus_config(args: &CorpusArgs, cfg: &mut ExperimentConfig) -> eho_forage::Result<()> {
    if let Some(p) = &args.corpus {
        cfg.corpus = Some(p.clone());
    }
    if let Some(p) = &args.stopwords {
        cfg.stopwords = Some(p.clone());
    }
    if let Some(b) = &args.idf_log_base {
        cfg.set("idf_log_base", b)?;
    }
    Ok(())
}

fn cmd_ingest(path: PathBuf) -> eho_forage::Result<()> {
    let i = ingest(&path)?;
    println!("lines              {}", i.lines);
    println!("malformed          {}", i.malformed);
    println!("content edges      {}", i.graph.content_len());
    println!("structural edges   {}", i.graph.structural_edges().len());
    println!("users              {}", i.graph.users().len());
    println!("dangling parents   {}", i.graph.dangling_parents());
    println!("sha256             {}", i.digest);
    for w in &i.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn parse_range(s: &str) -> eho_forage::Result<Vec<usize>> {
    let bad = || Error::Config(format!("invalid k range `{s}` (expected a..b)"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.trim_start_matches('=');
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b).collect())
}

fn cmd_cluster(args: ClusterArgs) -> eho_forage::Result<()> {
    let mut cfg = ExperimentConfig::default();
    corpus_config(&args.corpus, &mut cfg)?;
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.max_iter {
        cfg.kmeans.max_iterations = v;
    }
    if let Some(v) = args.restarts {
        cfg.kmeans.restarts = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    cfg.kmeans.wss_squared = args.wss_squared;
    let corpus = Corpus::load(&cfg)?;
    let vectors = corpus.vectors();

    if let Some(range) = &args.scan_k {
        println!("k,wss");
        for (k, w) in scan_k(&vectors, &parse_range(range)?, &cfg.kmeans, &mut seeded(cfg.seed))? {
            println!("{k},{w}");
        }
        return Ok(());
    }
    let c = corpus.cluster(&cfg)?;
    println!("k={} iterations={} converged={} wss={}", c.k, c.iterations, c.converged, wss(&c, &vectors, cfg.kmeans.wss_squared));
    for t in &c.territories {
        println!("territory {:>3}  positions {}..={}  size {}", t.cluster_id, t.position_range.0, t.position_range.1, t.members.len());
    }
    if let Some(o) = &c.overflow {
        println!("overflow       positions {}..={}  size {}", o.position_range.0, o.position_range.1, o.members.len());
    }
    if let Some(out) = &args.out {
        c.save(out, &corpus.digest)?;
        println!("snapshot written to {}", out.display());
    }
    Ok(())
}

fn cmd_forage(args: ForageArgs) -> eho_forage::Result<()> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    corpus_config(&args.corpus, &mut cfg)?;
    if let Some(e) = &args.engine {
        cfg.set("engine", e)?;
    }
    if let Some(p) = &args.interests_file {
        cfg.set("interests_file", &p.to_string_lossy())?;
    }
    if !args.interests.is_empty() {
        cfg.interests = args.interests.clone();
    }
    if let Some(p) = &args.snapshot {
        cfg.snapshot = Some(p.clone());
    }
    let flags: [(&str, Option<String>); 21] = [
        ("top_n", args.top_n.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("k", args.k.map(|v| v.to_string())),
        ("restarts", args.restarts.map(|v| v.to_string())),
        ("alpha", args.alpha.map(|v| v.to_string())),
        ("beta", args.beta.map(|v| v.to_string())),
        ("n_clans", args.n_clans.map(|v| v.to_string())),
        ("n_per_clan", args.n_per_clan.map(|v| v.to_string())),
        ("max_gen", args.max_gen.map(|v| v.to_string())),
        ("dist_clan", args.dist_clan.map(|v| v.to_string())),
        ("dist_elephant", args.dist_elephant.map(|v| v.to_string())),
        ("q0", args.q0.map(|v| v.to_string())),
        ("t0", args.t0.map(|v| v.to_string())),
        ("rho", args.rho.map(|v| v.to_string())),
        ("n_ants", args.n_ants.map(|v| v.to_string())),
        ("c1", args.c1.map(|v| v.to_string())),
        ("c2", args.c2.map(|v| v.to_string())),
        ("inertia", args.inertia.map(|v| v.to_string())),
        ("n_particles", args.n_particles.map(|v| v.to_string())),
        ("max_depth", args.max_depth.map(|v| v.to_string())),
        ("no_cluster", args.no_cluster.then(|| "true".to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    for kv in &args.sets {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if cfg.interests.is_empty() {
        return Err(Error::Config("no interests given".into()));
    }

    let report = run_experiment(&cfg)?;
    match &args.out {
        Some(out) => {
            let paths = write_report(&report, out)?;
            println!("report written to {}", paths.rows.display());
        }
        None => print_summary(&report),
    }
    Ok(())
}

fn print_summary(report: &eho_forage::harness::RunReport) {
    println!("engine {}  seed {}  queries {}", report.engine, report.seed, report.rows.len());
    println!("{:>5}  {:>8}  {:>5}  {:>4}  {:>9}  interests", "query", "score", "depth", "conv", "time_ms");
    for r in &report.rows {
        println!(
            "{:>5}  {:>8.4}  {:>5}  {:>4}  {:>9.2}  {}",
            r.query,
            r.score,
            r.depth,
            r.convergence_generation.map_or("-".into(), |g| g.to_string()),
            r.wall_time * 1e3,
            r.interests
        );
    }
}

fn cmd_synth(args: SynthArgs) -> eho_forage::Result<()> {
    let cfg = SynthConfig {
        topics: args.topics,
        posts: args.posts,
        noise_ratio: args.noise_ratio,
        seed: args.seed,
        ..SynthConfig::default()
    };
    if cfg.topics == 0 || !(0.0..=1.0).contains(&cfg.noise_ratio) {
        return Err(Error::InvalidParameter("topics must be positive and noise_ratio in [0, 1]".into()));
    }
    let corpus = generate(&cfg);
    fs::write(&args.out, corpus.to_jsonl())?;
    println!("{} records written to {}", corpus.records.len(), args.out.display());
    if let Some(n) = args.queries {
        let path = args.queries_out.unwrap_or_else(|| args.out.with_extension("queries.txt"));
        let lines: Vec<String> = corpus.queries(n, 2, &mut seeded(args.seed)).into_iter().map(|q| q.1 + "\n").collect();
        fs::write(&path, lines.concat())?;
        println!("{n} queries written to {}", path.display());
    }
    Ok(())
}

fn run(cli: Cli) -> eho_forage::Result<()> {
    match cli.command {
        Command::Ingest { corpus } => cmd_ingest(corpus),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Forage(a) => cmd_forage(*a),
        Command::Synth(a) => cmd_synth(a),
        Command::Report { report } => {
            let r = read_report(&report)?;
            print_summary(&r);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}

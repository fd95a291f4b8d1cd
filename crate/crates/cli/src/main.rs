//! `ecsim`: generate graphs, run and verify edge-coloring algorithms, sweep parameters.
//!
//! Exit codes: 0 when every validator passed, 1 when a validator or an
//! algorithm-side check failed, 2 on bad flags or unreadable input.

mod config;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;

use ecsim_core::exact::q20;
use ecsim_core::generate::{generate, Model};
use ecsim_core::io;
use ecsim_core::lists::random_lists;
use ecsim_core::token::{run_token_game, validate_token_run, DiGraph, TokenGameConfig};
use ecsim_core::verify::check_proper_edge_coloring;
use ecsim_core::{
    compute_stats, run, Algorithm, AmplifyMode, Color, ExecutionMode, Graph, ListOptions, Real, RunReport, RunRequest,
    Session,
};

use config::Config;

const CSV_HEADER: &str = "alg,n,m,delta,eps,seed,rounds,oracle_rounds,colors,ok";

#[derive(Parser)]
#[command(name = "ecsim", version, about = "Distributed edge-coloring simulator")]
struct Cli {
    /// File of `key = value` lines supplying defaults for long flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded graph.
    Gen(GenArgs),
    /// Run one algorithm and validate its output.
    Run(RunArgs),
    /// Check a coloring file against a graph.
    Verify(VerifyArgs),
    /// Collect JSON run reports into CSV rows.
    Report(ReportArgs),
    /// Run a grid of algorithms, degrees, eps values and seeds.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// regular_bipartite, random_bipartite or random_general.
    #[arg(long)]
    model: Option<String>,
    /// Nodes, or nodes per side for bipartite models.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    delta: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the U/V sides of bipartite models.
    #[arg(long)]
    sides_out: Option<PathBuf>,
    /// Also write random lists of size deg(e)+1.
    #[arg(long)]
    lists_out: Option<PathBuf>,
    /// Color space for `--lists-out`; defaults to 4 delta^2.
    #[arg(long)]
    space: Option<Color>,
}

#[derive(Args)]
struct RunArgs {
    /// greedy, orient, def2ec, cong-bip, cong-gen, list-d1 or token.
    #[arg(long)]
    alg: Option<String>,
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Decimal or fraction, e.g. 0.5 or 1/4.
    #[arg(long)]
    eps: Option<String>,
    /// local, congest (default width) or congest:B.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    sides: Option<PathBuf>,
    #[arg(long)]
    lists: Option<PathBuf>,
    /// Per-edge eta (orient) or lambda (def2ec).
    #[arg(long)]
    values: Option<PathBuf>,
    #[arg(long)]
    beta_conf: Option<String>,
    /// reference or fast.
    #[arg(long)]
    amplify_mode: Option<String>,
    /// Recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON report; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    coloring_out: Option<PathBuf>,
    /// Token game: per-node `node_id tokens alpha` lines.
    #[arg(long)]
    tokens: Option<PathBuf>,
    /// Token game capacity.
    #[arg(long)]
    k: Option<i64>,
    /// Token game threshold.
    #[arg(long)]
    token_delta: Option<i64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    coloring: PathBuf,
    #[arg(long)]
    lists: Option<PathBuf>,
    /// Colors must lie in 1..=palette.
    #[arg(long)]
    palette: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON reports written by `run`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Comma-separated algorithm names.
    #[arg(long)]
    algs: Option<String>,
    /// Graph model; by default bipartite algorithms get random_bipartite.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated target degrees.
    #[arg(long)]
    deltas: Option<String>,
    /// Comma-separated eps values.
    #[arg(long)]
    eps: Option<String>,
    /// Seeds 0..seeds per cell.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long)]
    mode: Option<String>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for one JSON report per cell.
    #[arg(long)]
    reports_dir: Option<PathBuf>,
}

/// Failures that should exit with 1 rather than 2.
#[derive(Debug)]
struct CheckFailed(String);

impl std::fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<CheckFailed>().is_some() {
        return 1;
    }
    match e.downcast_ref::<ecsim_core::Error>() {
        Some(ecsim_core::Error::Usage(_) | ecsim_core::Error::Parse { .. } | ecsim_core::Error::Io(_)) | None => 2,
        Some(_) => 1,
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_eps(s: &str) -> Result<Real> {
    let eps = if s.contains('/') {
        s.parse::<Real>().map_err(|_| anyhow!("bad eps {s:?}"))?
    } else {
        let x: f64 = s.parse().map_err(|_| anyhow!("bad eps {s:?}"))?;
        q20(x)
    };
    if eps <= Real::from_integer(0) || eps > Real::from_integer(1) {
        return Err(ecsim_core::Error::usage(format!("eps must lie in (0, 1], got {s}")).into());
    }
    Ok(eps)
}

fn parse_real(s: &str) -> Result<Real> {
    if s.contains('/') {
        s.parse::<Real>().map_err(|_| anyhow!("bad number {s:?}"))
    } else {
        Ok(q20(s.parse().map_err(|_| anyhow!("bad number {s:?}"))?))
    }
}

fn parse_mode(s: &str, n: usize) -> Result<ExecutionMode> {
    if s.eq_ignore_ascii_case("congest") {
        return Ok(ExecutionMode::congest_default(n));
    }
    Ok(s.parse()?)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| anyhow!("bad {what} {x:?}")))
        .collect()
}

fn gen(cfg: &Config, a: GenArgs) -> Result<()> {
    let model: Model = cfg.get(a.model, "model", "random_general".into())?.parse::<Model>()?;
    let n = cfg.get(a.n, "n", 64)?;
    let delta = cfg.get(a.delta, "delta", 8)?;
    let seed = cfg.get(a.seed, "seed", 0)?;
    let out: PathBuf = cfg.pick(a.out, "out")?.ok_or_else(|| ecsim_core::Error::usage("gen needs --out"))?;
    let (g, bip) = generate(model, n, delta, seed)?;
    fs::write(&out, io::write_graph(&g))?;
    info!("wrote {} nodes, {} edges to {}", g.node_count(), g.edge_count(), out.display());
    if let Some(p) = cfg.pick(a.sides_out, "sides-out")? {
        let bip = bip.ok_or_else(|| ecsim_core::Error::usage(format!("{model} has no bipartition")))?;
        fs::write(p, io::write_bipartition(&bip))?;
    }
    if let Some(p) = cfg.pick(a.lists_out, "lists-out")? {
        let d = g.max_degree().max(1) as Color;
        let space = cfg.get(a.space, "space", 4 * d * d)?;
        fs::write(p, io::write_lists(&random_lists(&g, space, 0, seed)?))?;
    }
    Ok(())
}

fn failed_report(alg: &str, g: &Graph, eps: Real, seed: Option<u64>) -> RunReport {
    let stats = compute_stats(g);
    RunReport {
        algorithm: alg.into(),
        n: g.node_count(),
        m: g.edge_count(),
        delta: stats.delta,
        bar_delta: stats.bar_delta,
        eps: ecsim_core::exact::to_f64(&eps),
        rounds: 0,
        oracle_rounds: 0,
        colors_used: None,
        max_defect: None,
        max_message_bits: 0,
        seed,
        beta_used: None,
        fallback_triggered: false,
        ok: false,
    }
}

fn run_token(cfg: &Config, a: &RunArgs, g: Graph, mode: ExecutionMode, eps: Real) -> Result<(RunReport, bool)> {
    let tokens = cfg
        .pick(a.tokens.clone(), "tokens")?
        .ok_or_else(|| ecsim_core::Error::usage("token game needs --tokens"))?;
    let (init, alpha) = io::read_tokens(g.node_count(), &read(&tokens)?)?;
    let k = cfg
        .pick(a.k, "k")?
        .ok_or_else(|| ecsim_core::Error::usage("token game needs --k"))?;
    let delta = cfg.get(a.token_delta, "token-delta", 1)?;
    let tails = g.edges().iter().map(|e| e.0).collect();
    let dg = DiGraph::new(g.clone(), tails)?;
    let tcfg = TokenGameConfig { k, delta, alpha };
    let init: Vec<i64> = init.into_iter().map(|t| t as i64).collect();
    let mut session = Session::new(mode);
    let tr = run_token_game(&dg, &init, &tcfg, &mut session)?;
    let verdict = validate_token_run(&dg, &init, &tcfg, &tr);
    if let Some(v) = verdict.first() {
        warn!("token game check {} failed at {}: {} > {}", v.check, v.entity, v.lhs, v.rhs);
    }
    let seed = cfg.pick(a.seed, "seed")?;
    let mut report = failed_report("token", &g, eps, seed);
    report.rounds = session.metrics.rounds;
    report.oracle_rounds = session.metrics.oracle_rounds;
    report.max_message_bits = session.metrics.max_message_bits;
    report.ok = verdict.ok;
    Ok((report, verdict.ok))
}

fn run_cmd(cfg: &Config, a: RunArgs) -> Result<()> {
    let alg_name: String = cfg
        .pick(a.alg.clone(), "alg")?
        .ok_or_else(|| ecsim_core::Error::usage("run needs --alg"))?;
    let graph_path: PathBuf = cfg
        .pick(a.graph.clone(), "graph")?
        .ok_or_else(|| ecsim_core::Error::usage("run needs --graph"))?;
    let g = io::read_graph(&read(&graph_path)?)?;
    let eps = parse_eps(&cfg.get(a.eps.clone(), "eps", "0.5".into())?)?;
    let mode = parse_mode(&cfg.get(a.mode.clone(), "mode", "local".into())?, g.node_count())?;
    let seed = cfg.pick(a.seed, "seed")?;
    let out: Option<PathBuf> = cfg.pick(a.out.clone(), "out")?;

    if alg_name == "token" {
        let (report, ok) = run_token(cfg, &a, g, mode, eps)?;
        write_out(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
        return if ok { Ok(()) } else { Err(CheckFailed("token game validation failed".into()).into()) };
    }

    let alg: Algorithm = alg_name.parse()?;
    let bip = match cfg.pick(a.sides.clone(), "sides")? {
        Some(p) => Some(io::read_bipartition(&g, &read(&p)?)?),
        None => None,
    };
    let lists = match cfg.pick(a.lists.clone(), "lists")? {
        Some(p) => Some(io::read_lists(&g, &read(&p)?, None)?),
        None => None,
    };
    let values = match cfg.pick(a.values.clone(), "values")? {
        Some(p) => Some(io::read_edge_values(g.edge_count(), &read(&p)?)?),
        None => None,
    };
    let beta_conf = match cfg.pick(a.beta_conf.clone(), "beta-conf")? {
        Some(s) => Some(parse_real(&s)?),
        None => None,
    };
    let amplify: AmplifyMode = cfg.get(a.amplify_mode.clone(), "amplify-mode", "reference".into())?.parse()?;

    let mut req = RunRequest::new(alg, &g, eps, mode);
    req.bip = bip.as_ref();
    req.lists = lists.as_ref();
    req.edge_values = values.as_deref();
    req.seed = seed;
    req.list_opts = ListOptions {
        amplify,
        beta_conf,
        ..ListOptions::default()
    };
    let outcome = match run(&req) {
        Ok(o) => o,
        Err(e) if exit_code(&anyhow::Error::new(e.clone())) == 1 => {
            let report = failed_report(alg.name(), &g, eps, seed);
            write_out(out.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"))?;
            return Err(CheckFailed(e.to_string()).into());
        }
        Err(e) => return Err(e.into()),
    };
    for name in &outcome.oracle_log {
        log::debug!("oracle step: {name}");
    }
    if let Some(v) = outcome.verdict.first() {
        warn!("check {} failed at {}: {} vs {}", v.check, v.entity, v.lhs, v.rhs);
    }
    if let Some(p) = cfg.pick(a.coloring_out.clone(), "coloring-out")? {
        if let Some(c) = &outcome.colors {
            let partial: Vec<Option<Color>> = c.iter().map(|&x| Some(x)).collect();
            fs::write(p, io::write_coloring(&partial))?;
        } else if let Some(red) = &outcome.red {
            // Red (or U-to-V) edges get color 1, the rest color 2.
            let partial: Vec<Option<Color>> = red.iter().map(|&r| Some(if r { 1 } else { 2 })).collect();
            fs::write(p, io::write_coloring(&partial))?;
        }
    }
    write_out(out.as_deref(), &(serde_json::to_string_pretty(&outcome.report)? + "\n"))?;
    if outcome.report.ok {
        Ok(())
    } else {
        Err(CheckFailed(format!("{} failed validation", alg)).into())
    }
}

fn verify_cmd(a: VerifyArgs) -> Result<()> {
    let g = io::read_graph(&read(&a.graph)?)?;
    let coloring = io::read_coloring(g.edge_count(), &read(&a.coloring)?)?;
    let lists = match &a.lists {
        Some(p) => Some(io::read_lists(&g, &read(p)?, None)?),
        None => None,
    };
    let verdict = check_proper_edge_coloring(&g, &coloring, lists.as_ref(), a.palette);
    write_out(a.out.as_deref(), &(serde_json::to_string_pretty(&verdict)? + "\n"))?;
    if verdict.ok {
        Ok(())
    } else {
        Err(CheckFailed(format!("{} violations", verdict.violations.len())).into())
    }
}

fn csv_row(r: &RunReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.algorithm,
        r.n,
        r.m,
        r.delta,
        r.eps,
        r.seed.map(|s| s.to_string()).unwrap_or_default(),
        r.rounds,
        r.oracle_rounds,
        r.colors_used.map(|c| c.to_string()).unwrap_or_default(),
        r.ok
    )
}

fn report_cmd(a: ReportArgs) -> Result<()> {
    let mut text = String::from(CSV_HEADER) + "\n";
    for p in &a.inputs {
        let r: RunReport = serde_json::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
        text += &csv_row(&r);
        text.push('\n');
    }
    write_out(a.out.as_deref(), &text)
}

struct Cell {
    alg: Algorithm,
    delta: usize,
    eps: Real,
    seed: u64,
}

fn sweep_cell(c: &Cell, model: Option<Model>, n: usize, mode: &str) -> Result<RunReport> {
    let model = model.unwrap_or(if c.alg.needs_bipartite() {
        Model::RandomBipartite
    } else {
        Model::RandomGeneral
    });
    let (g, bip) = generate(model, n, c.delta, c.seed)?;
    let mode = parse_mode(mode, g.node_count())?;
    let d = g.max_degree().max(1) as Color;
    let lists = match c.alg {
        Algorithm::ListD1 => Some(random_lists(&g, 4 * d * d, 0, c.seed)?),
        _ => None,
    };
    let mut req = RunRequest::new(c.alg, &g, c.eps, mode);
    req.bip = bip.as_ref();
    req.lists = lists.as_ref();
    req.seed = Some(c.seed);
    match run(&req) {
        Ok(o) => Ok(o.report),
        Err(e) if exit_code(&anyhow::Error::new(e.clone())) == 1 => {
            warn!("{} delta {} seed {}: {e}", c.alg, c.delta, c.seed);
            Ok(failed_report(c.alg.name(), &g, c.eps, Some(c.seed)))
        }
        Err(e) => Err(e.into()),
    }
}

fn sweep_cmd(cfg: &Config, a: SweepArgs) -> Result<()> {
    let algs: Vec<Algorithm> = parse_list(&cfg.get(a.algs, "algs", "cong-bip,cong-gen,list-d1".into())?, "algorithm")?;
    let model = match cfg.pick(a.model, "model")? {
        Some(m) => Some(m.parse::<Model>()?),
        None => None,
    };
    let n = cfg.get(a.n, "n", 100)?;
    let deltas: Vec<usize> = parse_list(&cfg.get(a.deltas, "deltas", "8,16,32".into())?, "delta")?;
    let eps_text: String = cfg.get(a.eps, "eps", "0.25,0.5,1".into())?;
    let epss = eps_text.split(',').map(|s| parse_eps(s.trim())).collect::<Result<Vec<_>>>()?;
    let seeds = cfg.get(a.seeds, "seeds", 3)?;
    let mode: String = cfg.get(a.mode, "mode", "congest".into())?;
    let out: Option<PathBuf> = cfg.pick(a.out, "out")?;
    let reports_dir: Option<PathBuf> = cfg.pick(a.reports_dir, "reports-dir")?;
    if let Some(d) = &reports_dir {
        fs::create_dir_all(d)?;
    }

    let mut cells = Vec::new();
    for &alg in &algs {
        for &delta in &deltas {
            for &eps in &epss {
                for seed in 0..seeds {
                    cells.push(Cell { alg, delta, eps, seed });
                }
            }
        }
    }
    info!("sweeping {} cells", cells.len());
    let reports: Vec<RunReport> = cells
        .par_iter()
        .map(|c| sweep_cell(c, model, n, &mode))
        .collect::<Result<_>>()?;
    let mut text = String::from(CSV_HEADER) + "\n";
    for (c, r) in cells.iter().zip(&reports) {
        text += &csv_row(r);
        text.push('\n');
        if let Some(d) = &reports_dir {
            let name = format!("{}_d{}_e{}_s{}.json", c.alg, c.delta, r.eps, c.seed);
            fs::write(d.join(name), serde_json::to_string_pretty(r)? + "\n")?;
        }
    }
    write_out(out.as_deref(), &text)?;
    let bad = reports.iter().filter(|r| !r.ok).count();
    if bad > 0 {
        return Err(CheckFailed(format!("{bad} of {} cells failed", reports.len())).into());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ECSIM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = Config::load(cli.config.as_deref()).and_then(|cfg| match cli.cmd {
        Cmd::Gen(a) => gen(&cfg, a),
        Cmd::Run(a) => run_cmd(&cfg, a),
        Cmd::Verify(a) => verify_cmd(a),
        Cmd::Report(a) => report_cmd(a),
        Cmd::Sweep(a) => sweep_cmd(&cfg, a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_parsing() {
        assert_eq!(parse_eps("1/4").unwrap(), Real::new(1, 4));
        assert_eq!(parse_eps("0.5").unwrap(), Real::new(1, 2));
        assert!(parse_eps("0").is_err());
        assert!(parse_eps("2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&ecsim_core::Error::usage("x").into()), 2);
        assert_eq!(exit_code(&ecsim_core::Error::invariant("x").into()), 1);
        assert_eq!(exit_code(&CheckFailed("x".into()).into()), 1);
        assert_eq!(exit_code(&anyhow!("plain")), 2);
    }
}

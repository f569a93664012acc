use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use multirank::catalog::{Catalog, SystemSpec};
use multirank::odometer::OdometerResidue;
use multirank::oracles::{
    block_m_sensitivity_test, cover_m_equicontinuity_test, m_equicontinuity_point_test, m_sensitivity_test, replay_against,
    Certificate, CoverVerdict, PointVerdict, SearchBudget, SensitivityReport, Verdict,
};
use multirank::ranks::{predict_profile, rank_report, Estimate, RankConfig, RankReport};
use multirank::verify::{verify, CellStatus, VerifyReport};
use multirank::words::{CenteredWord, Symbol};
use multirank::{Error, Subshift};

/// Multivariate ranks, sensitivity and equicontinuity of substitution and
/// Toeplitz subshifts.
#[derive(Parser)]
#[command(name = "multirank", version)]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Search budget overrides, e.g. `L=3,N=128,K=2,B=8,ladder=2:4:8`.
    #[arg(long, global = true, default_value = "")]
    budget: String,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct RankOpts {
    /// Every odometer residue up to this depth is sampled.
    #[arg(long, default_value_t = 4)]
    depth: u32,
    /// Sampling deepens up to here while an estimate is not stable.
    #[arg(long, default_value_t = 6)]
    max_depth: u32,
    /// Census window radius.
    #[arg(long, default_value_t = 64)]
    radius: u64,
    /// Seed for the extra random deep residues.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
}

impl RankOpts {
    fn config(&self) -> RankConfig {
        RankConfig {
            depth: self.depth,
            max_depth: self.max_depth.max(self.depth),
            radius: self.radius,
            seed: self.seed,
            ..RankConfig::default()
        }
    }
}

#[derive(Args, Clone)]
struct PointOpts {
    /// Seed pair `b.a` of the substitution fixed point; first seed by default.
    #[arg(long)]
    seed_point: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the reference systems.
    Catalog,
    /// r_c, r_m and r_M with their evidence.
    Ranks {
        system: String,
        #[command(flatten)]
        opts: RankOpts,
    },
    /// Predicted m-equicontinuity / sensitivity profile.
    Profile {
        system: String,
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[command(flatten)]
        opts: RankOpts,
    },
    /// m-sensitivity search over every cylinder.
    Sensitivity {
        system: String,
        /// Tuple size; the budget's `m` when omitted.
        #[arg(short, long)]
        m: Option<usize>,
    },
    /// Block m-sensitivity search over every cylinder.
    Block {
        system: String,
        /// Tuple size; the budget's `m` when omitted.
        #[arg(short, long)]
        m: Option<usize>,
    },
    /// m-equicontinuity test at a seed point.
    Point {
        system: String,
        /// Tuple size; the budget's `m` when omitted.
        #[arg(short, long)]
        m: Option<usize>,
        #[command(flatten)]
        point: PointOpts,
    },
    /// Cover m-equicontinuity test at a seed point.
    Cover {
        system: String,
        /// Tuple size; the budget's `m` when omitted.
        #[arg(short, long)]
        m: Option<usize>,
        #[command(flatten)]
        point: PointOpts,
    },
    /// Points over one odometer residue.
    Fiber {
        system: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long)]
        residue: u64,
        #[arg(long, default_value_t = 64)]
        radius: u64,
    },
    /// Admissible words of one length.
    Language {
        system: String,
        #[arg(short, long)]
        n: usize,
    },
    /// Ranks, predicted profile and oracle verdicts side by side; `all`
    /// runs every catalog entry.
    Verify {
        system: String,
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[command(flatten)]
        opts: RankOpts,
    },
    /// Re-check a certificate without searching.
    Replay { certificate: PathBuf },
}

/// `println!` that reports a closed stdout instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write as _;
        writeln!(std::io::stdout(), $($arg)*)?;
    }};
}

/// Failures the caller caused: unknown names, bad budgets, bad input files.
fn usage_error(e: &anyhow::Error) -> bool {
    match e.downcast_ref::<Error>() {
        Some(Error::Certificate(_)) => false,
        Some(_) => true,
        None => true,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        // reader went away, e.g. `| head`
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe) => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if usage_error(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn lookup(catalog: &Catalog, selector: &str) -> anyhow::Result<SystemSpec> {
    Ok(catalog.get_selector(selector)?)
}

fn print_json(v: &impl serde::Serialize) -> anyhow::Result<()> {
    out!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    let budget = SearchBudget::default().with_overrides(&cli.budget)?;
    let catalog = Catalog::builtin();
    match &cli.cmd {
        Cmd::Catalog => cmd_catalog(cli, &catalog)?,
        Cmd::Ranks { system, opts } => {
            let spec = lookup(&catalog, system)?;
            let r = rank_report(&spec.name, &spec.system, &opts.config())?;
            if cli.json {
                print_json(&r)?;
            } else {
                print_ranks(&r)?;
            }
        }
        Cmd::Profile { system, m_max, opts } => {
            let spec = lookup(&catalog, system)?;
            let r = rank_report(&spec.name, &spec.system, &opts.config())?;
            let p = predict_profile(&r, *m_max);
            if cli.json {
                print_json(&json!({ "ranks": r, "profile": p }))?;
            } else {
                out!("{}  r_c={} r_M={}", p.system, r.r_c.value, r.r_max.value);
                out!("{:>3}  {:<15} {:<10} {:<20} cover-equicontinuous", "m", "equicontinuous", "sensitive", "compactly-sensitive");
                for row in &p.rows {
                    out!(
                        "{:>3}  {:<15} {:<10} {:<20} {}",
                        row.m, row.equicontinuous, row.sensitive, row.compactly_sensitive, row.cover_equicontinuous
                    );
                }
            }
        }
        Cmd::Sensitivity { system, m } => {
            let spec = lookup(&catalog, system)?;
            let rep = m_sensitivity_test(&spec.name, &spec.system, &budget.with_arity(m.unwrap_or(budget.arity)))?;
            report_search(cli, "sensitivity", &rep)?;
        }
        Cmd::Block { system, m } => {
            let spec = lookup(&catalog, system)?;
            let rep = block_m_sensitivity_test(&spec.name, &spec.system, &budget.with_arity(m.unwrap_or(budget.arity)))?;
            report_search(cli, "block", &rep)?;
        }
        Cmd::Point { system, m, point } => {
            let spec = lookup(&catalog, system)?;
            let b = budget.with_arity(m.unwrap_or(budget.arity));
            let x = seed_point(&spec, point, &b)?;
            let v = m_equicontinuity_point_test(&spec.name, &spec.system, &x, &b)?;
            if cli.json {
                print_json(&v)?;
            } else {
                match &v {
                    PointVerdict::CounterexampleFound(_) => {
                        out!("{}: CounterexampleFound at every radius {:?} ({b})", spec.name, b.ladder)
                    }
                    PointVerdict::ConsistentUpTo { radius, .. } => {
                        out!("{}: ConsistentUpTo radius {radius} ({b})", spec.name)
                    }
                }
            }
        }
        Cmd::Cover { system, m, point } => {
            let spec = lookup(&catalog, system)?;
            let b = budget.with_arity(m.unwrap_or(budget.arity));
            let x = seed_point(&spec, point, &b)?;
            let v = cover_m_equicontinuity_test(&spec.name, &spec.system, &x, &b)?;
            if cli.json {
                print_json(&v)?;
            } else {
                match &v {
                    CoverVerdict::Witnessed { radius, block } => {
                        out!("{}: Witnessed radius {radius}, return-set gaps <= {}", spec.name, 2 * block + 1)
                    }
                    CoverVerdict::FalsifiedUpTo(_) => out!(
                        "{}: FalsifiedUpTo gaps > {} in every cylinder of radius {:?}",
                        spec.name,
                        2 * b.block + 1,
                        b.ladder
                    ),
                    CoverVerdict::Exhausted { .. } => out!("{}: Exhausted ({b})", spec.name),
                }
            }
        }
        Cmd::Fiber {
            system,
            depth,
            residue,
            radius,
        } => {
            let spec = lookup(&catalog, system)?;
            let q = spec
                .system
                .odometer_base()
                .ok_or_else(|| Error::Hypotheses("no odometer factor known".into()))?;
            let census = spec.system.census(OdometerResidue::new(q, *depth, *residue)?, *radius)?;
            if cli.json {
                print_json(&census.to_json())?;
            } else {
                out!("{}: residue {} radius {}: {} points", spec.name, census.residue, radius, census.count());
                for c in &census.classes {
                    out!("  {}", c.word());
                }
            }
        }
        Cmd::Language { system, n } => {
            let spec = lookup(&catalog, system)?;
            let words = spec.system.language(*n)?;
            if cli.json {
                let ws: Vec<String> = words.iter().map(|w| w.to_string()).collect();
                print_json(&json!({ "system": spec.name, "n": n, "count": ws.len(), "words": ws }))?;
            } else {
                out!("{}: {} words of length {n}", spec.name, words.len());
                for w in &words {
                    out!("  {w}");
                }
            }
        }
        Cmd::Verify { system, m_max, opts } => {
            let selectors = if system == "all" {
                catalog.selectors()
            } else {
                vec![system.clone()]
            };
            let mut reports = Vec::new();
            for s in &selectors {
                let spec = lookup(&catalog, s)?;
                reports.push(verify(&spec, &budget, *m_max, &opts.config())?);
            }
            if cli.json {
                if reports.len() == 1 {
                    print_json(&reports[0])?;
                } else {
                    print_json(&reports)?;
                }
            } else {
                for r in &reports {
                    print_verify(r)?;
                }
            }
            if reports.iter().any(|r| r.inconsistent() > 0) {
                return Ok(ExitCode::from(1));
            }
        }
        Cmd::Replay { certificate } => {
            let text = std::fs::read_to_string(certificate)?;
            let cert = Certificate::from_json(&text)?;
            let spec = lookup(&catalog, &cert.system)?;
            match replay_against(&cert, &spec.system) {
                Ok(()) => {
                    if cli.json {
                        print_json(&json!({ "system": cert.system, "replay": "ok" }))?;
                    } else {
                        out!("{}: certificate replays", cert.system);
                    }
                }
                Err(e) => {
                    if cli.json {
                        print_json(&json!({ "system": cert.system, "replay": "rejected", "reason": e.to_string() }))?;
                    } else {
                        out!("{}: certificate rejected: {e}", cert.system);
                    }
                    return Ok(ExitCode::from(1));
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn seed_point(spec: &SystemSpec, opts: &PointOpts, b: &SearchBudget) -> anyhow::Result<CenteredWord> {
    let seed = match &opts.seed_point {
        None => None,
        Some(s) => {
            let bad = || Error::Parse(format!("seed point {s:?}: expected b.a"));
            let (l, r) = s.split_once('.').ok_or_else(bad)?;
            let one = |t: &str| {
                let mut cs = t.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Symbol::from_name(c),
                    _ => None,
                }
            };
            Some((one(l).ok_or_else(bad)?, one(r).ok_or_else(bad)?))
        }
    };
    Ok(spec.system.seed_point(seed, *b.ladder.last().unwrap())?)
}

fn cmd_catalog(cli: &Cli, catalog: &Catalog) -> anyhow::Result<()> {
    let mut rows = Vec::new();
    for name in catalog.list() {
        let sel = catalog
            .selectors()
            .into_iter()
            .find(|s| s == &name || s.starts_with(&format!("{name}:")));
        let entry = match sel.map(|s| catalog.get_selector(&s)) {
            Some(Ok(spec)) => json!({
                "name": spec.name,
                "describe": spec.system.describe(),
                "exact": spec.exact,
                "goldens": spec.goldens,
                "note": spec.note,
            }),
            Some(Err(e)) => return Err(e.into()),
            None => json!({
                "name": name,
                "nonconstructive": catalog.get(&name, None).err().map(|e| e.to_string()),
            }),
        };
        rows.push(entry);
    }
    if cli.json {
        return print_json(&rows);
    }
    for r in &rows {
        let name = r["name"].as_str().unwrap_or_default();
        if let Some(why) = r.get("nonconstructive").and_then(|v| v.as_str()) {
            out!("{name:<22} (documentation only) {why}");
            continue;
        }
        let goldens: Vec<String> = r["goldens"]
            .as_array()
            .into_iter()
            .flatten()
            .map(|g| format!("{}={} [{}]", g["rank"].as_str().unwrap_or(""), g["value"], g["provenance"].as_str().unwrap_or("")))
            .collect();
        out!("{name:<22} {}", r["describe"].as_str().unwrap_or_default());
        if !goldens.is_empty() {
            out!("{:<22} goldens: {}", "", goldens.join(" "));
        }
    }
    Ok(())
}

fn estimate_row(name: &str, e: &Estimate) -> String {
    format!(
        "{name:<4} {:>4}  {:<11} {:<12} depth={} radius={}  {}",
        e.value.to_string(),
        format!("{:?}", e.kind),
        e.evidence.method,
        e.evidence.depth,
        e.evidence.radius,
        e.evidence.detail
    )
}

fn print_ranks(r: &RankReport) -> anyhow::Result<()> {
    out!("{}", r.system);
    out!("{}", estimate_row("r_c", &r.r_c));
    out!("{}", estimate_row("r_m", &r.r_m));
    out!("{}", estimate_row("r_M", &r.r_max));
    if let Some(g) = &r.regime {
        out!(
            "regime: primitive={} aperiodic={} constant_length={:?} height={:?}",
            g.primitive, g.aperiodic, g.constant_length, g.height
        );
    }
    out!("almost automorphic: {}", r.almost_automorphic);
    Ok(())
}

fn report_search(cli: &Cli, what: &str, rep: &SensitivityReport) -> anyhow::Result<()> {
    if cli.json {
        return print_json(&rep);
    }
    for c in &rep.per_cylinder {
        match &c.witness {
            Some(w) => out!("  [{}] witness at g={} block={:?}", c.cylinder, w.shift, w.block),
            None => out!("  [{}] none", c.cylinder),
        }
    }
    match &rep.verdict {
        Verdict::Witnessed(c) => out!("{what}: Witnessed ({})", c.budget),
        Verdict::Refuted { reason } => out!("{what}: Refuted: {reason}"),
        Verdict::Exhausted { budget, .. } => out!("{what}: Exhausted ({budget})"),
    }
    Ok(())
}

fn print_verify(r: &VerifyReport) -> anyhow::Result<()> {
    out!(
        "{}  r_c={} r_m={} r_M={}  ({})",
        r.system, r.ranks.r_c.value, r.ranks.r_m.value, r.ranks.r_max.value, r.budget
    );
    for c in &r.cells {
        out!(
            "  m={} {:<12} predicted={:<5} {:<10} {}",
            c.m,
            c.test.to_string(),
            c.predicted,
            c.verdict,
            c.status
        );
    }
    let bad = r.cells.iter().filter(|c| c.status == CellStatus::Inconsistent).count();
    out!("  {} cells, {} inconsistent", r.cells.len(), bad);
    Ok(())
}

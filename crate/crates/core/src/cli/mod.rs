//! The `permint` command line: argument parsing, dispatch and reports.

mod io;
mod report;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

pub use io::{emit_family, emit_family_json, parse_family, read_family, write_family};
pub use report::{Check, Format, Report};
pub use verify::{run_suite, Level};

use crate::bounds;
use crate::error::{Error, Result};
use crate::extremal::{self, ReductionState};
use crate::perm_core::{is_cross_free, SubFamily};
use crate::spectral::{self, SnFunction};
use crate::spread;

#[derive(Debug, Parser)]
#[command(name = "permint", version, about = "Forbidden intersections of permutation families, at desk scale")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite, optionally checking a cross-freeness claim.
    Verify(VerifyArgs),
    /// Level weights of a family's indicator.
    Decompose(FamilyArgs),
    /// Globalness of a family and its best global restriction.
    Globalness(GlobalnessArgs),
    /// Spreadness of the embedded family.
    Spread(SpreadArgs),
    /// Monte Carlo coverage of the embedded family by random subsets.
    Coverage(CoverageArgs),
    /// Maximize |F||G| over cross-free pairs.
    Search(SearchArgs),
    /// Run reduction rounds on a cross-free pair.
    Reduce(ReduceArgs),
    /// Exact bound tables.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Level::Quick)]
    pub level: Level,
    /// Family claimed cross-free against `--b` (or itself).
    #[arg(long)]
    pub a: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub b: Option<PathBuf>,
    #[arg(long, requires = "a")]
    pub t: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub family: PathBuf,
}

#[derive(Debug, Args)]
pub struct GlobalnessArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = spectral::DEFAULT_DEPTH_CAP)]
    pub depth: usize,
    /// Also find the restriction maximizing `μ(A_p)/γ^{|p|}`.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Also report the level-d audit constant at this degree.
    #[arg(long)]
    pub audit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpreadArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Depth at which spreadness is certified for the bound.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    /// Exhaustive subset scan (n ≤ 4).
    #[arg(long, conflicts_with = "bb")]
    pub exact: bool,
    /// Branch and bound (n ≤ 6).
    #[arg(long)]
    pub bb: bool,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Main,
    Tightness,
    Stability,
    Agreement,
    FixedPoints,
    Constructions,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub table: Table,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

/// Parses `args`, runs the command and prints its report; returns the
/// process exit status (0 success, 1 failed assertion or error, 2 usage).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let format = cli.format;
    match execute(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            i32::from(report.failed() > 0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Runs a parsed command line, inside a dedicated pool when `--threads` is set.
pub fn execute(cli: &Cli) -> Result<Report> {
    match cli.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::domain(format!("thread pool: {e}")))?
            .install(|| run(cli)),
        None => run(cli),
    }
}

fn run(cli: &Cli) -> Result<Report> {
    let mut report = match &cli.command {
        Command::Verify(a) => verify_cmd(a, cli.seed)?,
        Command::Decompose(a) => decompose_cmd(a)?,
        Command::Globalness(a) => globalness_cmd(a)?,
        Command::Spread(a) => spread_cmd(a)?,
        Command::Coverage(a) => coverage_cmd(a, cli.seed)?,
        Command::Search(a) => search_cmd(a)?,
        Command::Reduce(a) => reduce_cmd(a)?,
        Command::Bounds(a) => bounds_cmd(a)?,
    };
    report.config.insert(0, ("seed".into(), cli.seed.to_string()));
    Ok(report)
}

fn verify_cmd(a: &VerifyArgs, seed: u64) -> Result<Report> {
    let mut r = Report::new("verify", &["check", "result", "detail"]);
    r.config("level", format!("{:?}", a.level).to_lowercase());
    let mut checks = run_suite(a.level, seed);
    if let Some(pa) = &a.a {
        let t = a.t.ok_or_else(|| Error::domain("a cross-freeness claim needs --t"))?;
        let fa = read_family(pa)?;
        let fb = match &a.b {
            Some(pb) => read_family(pb)?,
            None => fa.clone(),
        };
        r.config("claim", format!("{} vs {} at t={t}", pa.display(), a.b.as_ref().unwrap_or(pa).display()));
        let v = crate::perm_core::cross_violation(&fa, &fb, t)?;
        checks.push(Check {
            name: "claim_cross_free".into(),
            passed: v.is_none(),
            detail: v.map(|(s, t)| format!("{s} vs {t}")).unwrap_or_default(),
        });
    }
    for c in &checks {
        r.row(vec![c.name.clone(), if c.passed { "pass" } else { "FAIL" }.into(), c.detail.clone()]);
    }
    r.checks = checks;
    Ok(r)
}

fn decompose_cmd(a: &FamilyArgs) -> Result<Report> {
    let f = read_family(&a.family)?;
    let func = SnFunction::indicator(&f);
    let dec = spectral::decompose(&func)?;
    let mut r = Report::new("decompose", &["level", "weight", "dim"]);
    r.config("family", a.family.display()).config("n", f.n()).config("members", f.len());
    for (d, (w, dim)) in dec.weights.iter().zip(&dec.dims).enumerate() {
        r.row(vec![d.to_string(), fmt_f(*w), dim.to_string()]);
    }
    let norm = func.norm_sq();
    let rel = (dec.total_weight() - norm).abs() / norm.max(f64::MIN_POSITIVE);
    r.check("parseval", rel <= 1e-8 || norm == 0.0, format!("relative error {rel:.3e}"));
    r.check("orthogonality", dec.max_cross_inner() <= 1e-8, format!("max cross inner {:.3e}", dec.max_cross_inner()));
    if f.n() >= 2 {
        let l1 = spectral::level_one_check(&func)?;
        r.check("level_one_formula", l1.max_pointwise <= 1e-8, format!("max pointwise {:.3e}", l1.max_pointwise));
        let var = spectral::restriction_variance(&func)? * (f.n() - 1) as f64;
        let scale = var.abs().max(dec.weights[1].abs());
        let err = if scale == 0.0 { 0.0 } else { (var - dec.weights[1]).abs() / scale };
        r.check("variance_identity", err <= 1e-8, format!("relative error {err:.3e}"));
    }
    r.data = json!({ "weights": dec.weights, "dims": dec.dims });
    Ok(r)
}

fn globalness_cmd(a: &GlobalnessArgs) -> Result<Report> {
    let f = read_family(&a.family)?;
    let sub = SubFamily::from(f.clone());
    let mut r = Report::new("globalness", &["depth", "gamma_density", "gamma_l2", "witness"]);
    r.config("family", a.family.display()).config("n", f.n()).config("depth", a.depth);
    let mut reports = Vec::new();
    for d in 1..=a.depth {
        let g = spectral::globalness(&sub, d)?;
        r.row(vec![d.to_string(), fmt_f(g.gamma_density), fmt_f(g.gamma_l2), g.witness.to_string()]);
        r.check(format!("gamma_at_least_one_depth{d}"), g.gamma_density >= 1.0 - 1e-12, "");
        reports.push(g);
    }
    let mut data = json!({ "globalness": reports });
    if let Some(gamma) = a.gamma {
        r.config("gamma", gamma);
        let g = spectral::global_restriction(&sub, gamma, a.depth)?;
        r.blocks.push((
            "global_restriction".into(),
            format!(
                "pattern\t{}\ndensity_before\t{}\ndensity_after\t{}\nscore\t{}\n",
                g.pattern,
                fmt_f(g.density_before),
                fmt_f(g.density_after),
                fmt_f(g.score)
            ),
        ));
        let bound = gamma.powi(g.pattern.len() as i32) * g.density_before;
        r.check("global_restriction_density", g.density_after >= bound * (1.0 - 1e-9), "");
        data["global_restriction"] = json!({
            "pattern": g.pattern.to_string(),
            "density_before": g.density_before,
            "density_after": g.density_after,
            "score": g.score,
        });
    }
    if let Some(d) = a.audit {
        let gamma = a.gamma.unwrap_or(reports[0].gamma_l2);
        let c = spectral::level_d_audit(&sub, d, gamma)?;
        r.blocks.push(("level_d_audit".into(), format!("d\t{d}\ngamma\t{}\nconstant\t{}\n", fmt_f(gamma), fmt_f(c))));
        data["level_d_audit"] = json!({ "d": d, "gamma": gamma, "constant": c });
    }
    r.data = data;
    Ok(r)
}

fn spread_cmd(a: &SpreadArgs) -> Result<Report> {
    let f = read_family(&a.family)?;
    let c = spread::embed(&f)?;
    let s = spread::spreadness(&c, a.depth)?;
    let mut r = Report::new("spread", &["depth", "r", "witness", "witness_count", "members"]);
    r.config("family", a.family.display()).config("n", f.n()).config("ground_size", c.ground_size());
    let witness = s.witness.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    r.row(vec![s.depth_cap.to_string(), fmt_f(s.r), witness, s.witness_count.to_string(), s.members.to_string()]);
    r.check("r_at_least_one", s.r >= 1.0, "");
    r.data = serde_json::to_value(&s).expect("serializes");
    Ok(r)
}

fn coverage_cmd(a: &CoverageArgs, seed: u64) -> Result<Report> {
    let f = read_family(&a.family)?;
    let c = spread::embed(&f)?;
    let s = spread::spreadness(&c, a.depth)?;
    let e = spread::coverage_mc_with_spread(&c, a.m, a.delta, a.samples, seed, s.r)?;
    let mut r = Report::new(
        "coverage",
        &["m", "delta", "samples", "hits", "estimate", "std_error", "r", "mean_size", "theorem_bound", "vacuous", "seed"],
    );
    r.config("family", a.family.display()).config("n", f.n()).config("depth", a.depth);
    r.row(vec![
        e.m.to_string(),
        e.delta.to_string(),
        e.samples.to_string(),
        e.hits.to_string(),
        fmt_f(e.estimate),
        fmt_f(e.std_error),
        fmt_f(e.r),
        fmt_f(e.mean_size),
        e.theorem_bound.map_or("undefined".into(), fmt_f),
        e.vacuous.to_string(),
        e.seed.to_string(),
    ]);
    r.check("estimate_above_bound", e.consistent(), "estimate >= max(0, bound) - 3 SE");
    r.data = serde_json::to_value(&e).expect("serializes");
    Ok(r)
}

fn search_cmd(a: &SearchArgs) -> Result<Report> {
    let exact = a.exact || (!a.bb && a.n <= extremal::MAX_EXACT_N);
    let res = if exact { extremal::exact_max_product(a.n, a.t)? } else { extremal::bb_max_product(a.n, a.t, a.budget)? };
    let mut r = Report::new("search", &["n", "t", "F", "G", "product", "status", "explored", "witness_bound"]);
    r.config("method", if exact { "exact" } else { "bb" });
    if !exact {
        r.config("budget", a.budget);
    }
    r.row(vec![
        res.n.to_string(),
        res.t.to_string(),
        res.f.len().to_string(),
        res.g.len().to_string(),
        res.product.to_string(),
        res.status.to_string(),
        res.explored.to_string(),
        res.witness_bound.to_string(),
    ]);
    r.check("cross_free", is_cross_free(&res.f, &res.g, res.t)?, "returned pair re-validated");
    if res.status == extremal::SearchStatus::ExactOptimal {
        r.check("beats_umvirate_pair", res.product >= res.witness_bound, "");
    }
    r.blocks.push(("F".into(), emit_family(&res.f)));
    r.blocks.push(("G".into(), emit_family(&res.g)));
    r.data = serde_json::to_value(&res).expect("serializes");
    Ok(r)
}

fn reduce_cmd(a: &ReduceArgs) -> Result<Report> {
    let fa = read_family(&a.a)?;
    let fb = read_family(&a.b)?;
    let mut st = ReductionState::new(fa, fb, a.t)?;
    let mut r = Report::new(
        "reduce",
        &["round", "a_pattern", "b_pattern", "common", "size_a", "size_b", "density_a", "density_b", "t_remaining"],
    );
    r.config("a", a.a.display()).config("b", a.b.display()).config("t", a.t).config("gamma", a.gamma);
    r.config("rounds", a.rounds);
    for _ in 0..a.rounds {
        if st.terminated.is_some() || st.t_remaining < 2 {
            break;
        }
        st = extremal::reduction_round(st, a.gamma)?;
        let log = st.history.last().expect("round logged");
        let (sa, sb) = log.sizes.last().copied().unwrap_or((st.a.len(), st.b.len()));
        r.row(vec![
            log.round.to_string(),
            log.a_step.pattern.to_string(),
            log.b_step.as_ref().map_or("-".into(), |s| s.pattern.to_string()),
            log.common.map_or("-".into(), |(i, j)| format!("{i}->{j}")),
            sa.to_string(),
            sb.to_string(),
            fmt_f(st.a.density()),
            fmt_f(st.b.density()),
            st.t_remaining.to_string(),
        ]);
        r.check(format!("round{}_density_a", log.round), log.a_step.guarantee_holds(), "");
        if let Some(b) = &log.b_step {
            r.check(format!("round{}_density_b", log.round), b.guarantee_holds(), "");
        }
        if st.terminated.is_none() {
            r.check(format!("round{}_residual_cross_free", log.round), log.cross_free_checked, "");
        }
    }
    if let Some(term) = &st.terminated {
        r.blocks.push(("terminated".into(), format!("round\t{}\nstep\t{}\n", term.round, term.step)));
    }
    r.data = json!({
        "history": st.history,
        "densities": st.densities,
        "common": st.common.to_string(),
        "t_remaining": st.t_remaining,
        "terminated": st.terminated,
    });
    Ok(r)
}

fn bounds_cmd(a: &BoundsArgs) -> Result<Report> {
    let need = |x: Option<usize>, flag: &str| x.ok_or_else(|| Error::domain(format!("this table needs --{flag}")));
    let table = match a.table {
        Table::Main => bounds::main_table(a.n, need(a.t, "t")?)?,
        Table::Tightness => bounds::tightness_table(a.n)?,
        Table::Stability => bounds::stability_table(a.n, need(a.t, "t")?)?,
        Table::Agreement => bounds::agreement_table(a.n, need(a.r, "r")?)?,
        Table::FixedPoints => bounds::fixed_points_table(a.n)?,
        Table::Constructions => bounds::constructions_table(a.n)?,
    };
    let mut r = Report::new("bounds", &["label", "params", "value", "log2", "applicable", "holds"]);
    r.config("table", &table.name).config("n", a.n);
    let opt = |b: Option<bool>| b.map_or("-".to_string(), |b| b.to_string());
    for row in &table.rows {
        r.row(vec![row.label.clone(), row.params.clone(), row.value.to_string(), format!("{:.6}", row.log2), opt(row.applicable), opt(row.holds)]);
        // inequalities outside their stated preconditions are informational
        if let Some(h) = row.holds {
            if row.applicable != Some(false) {
                r.check(format!("{} {}", row.label, row.params), h, "");
            }
        }
    }
    r.data = serde_json::to_value(&table).expect("serializes");
    Ok(r)
}

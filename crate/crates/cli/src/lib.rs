//! Command-line front end for the resonance toolkit: argument parsing,
//! configuration and dispatch to the core routines.

// `!(x < y)` is used deliberately so that NaN fails the test.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod values;

use clap::{Args, Parser, Subcommand};
use config::{ConfigFile, Settings, UsageError};
use kdsqnm::coords::{TortoiseMap, DEFAULT_SERIES_TERMS};
use kdsqnm::greens::{resolvent_apply, ResolventRequest};
use kdsqnm::radial::{wronskian, Spectral};
use kdsqnm::resonances::{find_mode, scan, Rect, Resonance, ScanOptions};
use kdsqnm::tdwave::{evolve, ringdown_fit, Profile, WaveConfig};
use kdsqnm::{angular::angular_eigs, verify, BlackHoleParams};
use num_complex::Complex64;
use output::{num, Sink};
use serde_json::{json, Value};
use std::ffi::OsString;
use std::path::PathBuf;
use values::{BoxSpec, Cplx, Grid, Interval, List, ProfileSpec, Reals, SourceShape};

#[derive(Debug, Parser)]
#[command(name = "kdsqnm", version, about = "Resonances of Kerr-de Sitter black holes")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Config file with `[section]` headers and `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Directory for result files; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for scans.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long = "M0", global = true, allow_hyphen_values = true)]
    pub m0: Option<f64>,
    #[arg(id = "cosmological_constant", long = "Lambda", global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Rotation parameter.
    #[arg(long = "a", global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Klein-Gordon mass.
    #[arg(long = "m-field", global = true, allow_hyphen_values = true)]
    pub m_field: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Horizon data.
    Metric {
        #[command(subcommand)]
        action: MetricAction,
    },
    /// Angular eigenvalue branches.
    Angular {
        #[command(subcommand)]
        action: AngularAction,
    },
    /// Radial outgoing solutions.
    Radial {
        #[command(subcommand)]
        action: RadialAction,
    },
    /// Resonance location.
    Qnm {
        #[command(subcommand)]
        action: QnmAction,
    },
    /// Resolvent applied to a source.
    Greens {
        #[command(subcommand)]
        action: GreensAction,
    },
    /// Time-domain evolution.
    Tdwave {
        #[command(subcommand)]
        action: TdwaveAction,
    },
    /// Run the acceptance checks.
    Verify,
}

#[derive(Debug, Subcommand)]
pub enum MetricAction {
    /// Print `r_-`, `r_+`, `A_±` and `α`.
    Info,
}

#[derive(Debug, Subcommand)]
pub enum AngularAction {
    /// Table of `λ_{k,l}(ω)`.
    Table {
        /// Frequency `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<Cplx>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
        /// Number of branches listed.
        #[arg(long = "l-max")]
        l_max: Option<usize>,
        /// Basis size.
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum RadialAction {
    /// Wronskian of the outgoing pair.
    Wronskian {
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<Cplx>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<Cplx>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
    },
}

#[derive(Debug, Subcommand)]
pub enum QnmAction {
    /// Overtone `n` of mode `(k, l)`, continued from the non-rotating case.
    Find {
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Count and locate zeros in a box.
    Scan {
        /// `re_lo,re_hi,im_lo,im_hi`.
        #[arg(long = "box", allow_hyphen_values = true)]
        rect: Option<BoxSpec>,
        /// `a,b,c` or `lo..hi`.
        #[arg(long, allow_hyphen_values = true)]
        ks: Option<List<i32>>,
        #[arg(long)]
        ls: Option<List<usize>>,
        /// Initial cells, `NxM`.
        #[arg(long)]
        grid: Option<Grid>,
        #[arg(long = "n-contour")]
        n_contour: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GreensAction {
    /// Apply the resolvent to a smooth source supported in `support`.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<Cplx>,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i32>,
        #[arg(long = "l-max")]
        l_max: Option<usize>,
        #[arg(long = "n-r")]
        n_r: Option<usize>,
        #[arg(long = "n-mu")]
        n_mu: Option<usize>,
        /// Radial support `r1,r2`; defaults to the middle of the horizon interval.
        #[arg(long)]
        support: Option<Interval>,
        /// `bump` or `bump-mu`.
        #[arg(long)]
        source: Option<SourceShape>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TdwaveAction {
    /// Evolve initial data and fit the ringdown.
    Run {
        #[arg(long)]
        l: Option<usize>,
        #[arg(long)]
        dx: Option<f64>,
        #[arg(long = "t-final")]
        t_final: Option<f64>,
        #[arg(long = "dt-out")]
        dt_out: Option<f64>,
        #[arg(long)]
        cfl: Option<f64>,
        /// Probe abscissae, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        probes: Option<Reals>,
        /// Initial displacement: `zero`, `gaussian:c,w,A` or `bump:c,h,A`.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<ProfileSpec>,
        /// Initial velocity.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<ProfileSpec>,
        /// Fit window `t1,t2`.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Interval>,
    },
}

/// Failure of a command, mapped to the exit status.
#[derive(Debug)]
pub enum Failure {
    Usage(UsageError),
    Domain(kdsqnm::Error),
    Io(std::io::Error),
    /// Checks ran but at least one failed.
    Checks(usize),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl From<kdsqnm::Error> for Failure {
    fn from(e: kdsqnm::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) | Failure::Io(_) | Failure::Checks(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(e) => format!("usage error: {e}"),
            Failure::Domain(e) => format!("error: {}: {e}", e.name()),
            Failure::Io(e) => format!("error: Io: {e}"),
            Failure::Checks(n) => format!("error: {n} acceptance check(s) failed"),
        }
    }
}

/// Parse `args` and run the command; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(f) => {
            eprintln!("{}", f.message());
            f.exit_code()
        }
    }
}

struct Context {
    settings: Settings,
    out: Option<PathBuf>,
}

impl Context {
    fn params(&self, g: &GlobalArgs) -> Result<BlackHoleParams, Failure> {
        let s = &self.settings;
        let m0 = s.get("params", "M0", g.m0, 0.1)?;
        let lambda = s.get("params", "Lambda", g.lambda, 3.0)?;
        let a = s.get("params", "a", g.a, 0.0)?;
        let m_field = s.get("params", "m_field", g.m_field, 0.0)?;
        Ok(BlackHoleParams::new(m0, lambda, a, m_field)?)
    }

    fn map(&self, g: &GlobalArgs) -> Result<TortoiseMap, Failure> {
        Ok(TortoiseMap::build(&self.params(g)?, None, DEFAULT_SERIES_TERMS)?)
    }

    fn sink(&self, command: &str) -> Sink {
        Sink::new(self.out.as_deref(), command, self.settings.echo())
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    let g = &cli.global;
    let file = match &g.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let settings = Settings::new(file);
    let out_default = String::new();
    let out = settings.get("run", "out", g.out.as_ref().map(|p| p.display().to_string()), out_default)?;
    let workers = settings.get("run", "workers", g.workers, 0usize)?;
    let seed = settings.get("run", "seed", g.seed, verify::DEFAULT_SEED)?;
    if workers > 0 {
        // the pool can only be configured once per process; a second request
        // keeps the first configuration
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let ctx = Context { settings, out: (!out.is_empty()).then(|| PathBuf::from(out)) };
    match &cli.command {
        Command::Metric { action: MetricAction::Info } => metric_info(&ctx, g),
        Command::Angular { action: AngularAction::Table { omega, k, l_max, n } } => {
            angular_table(&ctx, g, *omega, *k, *l_max, *n)
        }
        Command::Radial { action: RadialAction::Wronskian { omega, lambda, k } } => {
            radial_wronskian(&ctx, g, *omega, *lambda, *k)
        }
        Command::Qnm { action: QnmAction::Find { k, l, n, tol } } => qnm_find(&ctx, g, *k, *l, *n, *tol),
        Command::Qnm { action: QnmAction::Scan { rect, ks, ls, grid, n_contour, tol } } => {
            qnm_scan(&ctx, g, *rect, ks.clone(), ls.clone(), *grid, *n_contour, *tol)
        }
        Command::Greens { action: GreensAction::Apply { omega, k, l_max, n_r, n_mu, support, source } } => {
            greens_apply(&ctx, g, *omega, *k, *l_max, *n_r, *n_mu, *support, *source)
        }
        Command::Tdwave { action } => tdwave_run(&ctx, g, action),
        Command::Verify => run_verify(&ctx, seed),
    }
}

fn cnum(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

fn metric_info(ctx: &Context, g: &GlobalArgs) -> Result<String, Failure> {
    let p = ctx.params(g)?;
    let rows = vec![vec![
        num(p.m0),
        num(p.lambda),
        num(p.a),
        num(p.alpha),
        num(p.r_minus),
        num(p.r_plus),
        num(p.a_minus),
        num(p.a_plus),
    ]];
    ctx.sink("metric info").csv(
        "metric.csv",
        &["M0", "Lambda", "a", "alpha", "r_minus", "r_plus", "A_minus", "A_plus"],
        &rows,
    )?;
    Ok(format!("r_- = {}, r_+ = {}, A_- = {}, A_+ = {}, alpha = {}", p.r_minus, p.r_plus, p.a_minus, p.a_plus, p.alpha))
}

fn angular_table(
    ctx: &Context,
    g: &GlobalArgs,
    omega: Option<Cplx>,
    k: Option<i32>,
    l_max: Option<usize>,
    n: Option<usize>,
) -> Result<String, Failure> {
    let s = &ctx.settings;
    let p = ctx.params(g)?;
    let omega = s.get("angular", "omega", omega, Cplx(Complex64::new(1.0, 0.0)))?.0;
    let k = s.get("angular", "k", k, 0)?;
    let l_max = s.get("angular", "l_max", l_max, 8)?;
    let n = s.get("angular", "n", n, kdsqnm::angular::default_basis_size(&p, omega, k))?;
    let branches = angular_eigs(&p, omega, k, n)?;
    let rows: Vec<Vec<String>> = branches
        .iter()
        .take(l_max)
        .map(|b| {
            let [re, im] = cnum(b.lambda);
            vec![b.k.to_string(), b.l.to_string(), re, im, num(b.residual), b.converged.to_string()]
        })
        .collect();
    ctx.sink("angular table").csv(
        "angular.csv",
        &["k", "l", "lambda_re", "lambda_im", "residual", "converged"],
        &rows,
    )?;
    Ok(format!("{} branches at omega = {omega}, k = {k}, basis {n}", rows.len()))
}

fn radial_wronskian(
    ctx: &Context,
    g: &GlobalArgs,
    omega: Option<Cplx>,
    lambda: Option<Cplx>,
    k: Option<i32>,
) -> Result<String, Failure> {
    let s = &ctx.settings;
    let m = ctx.map(g)?;
    let omega = s.get("radial", "omega", omega, Cplx(Complex64::new(1.0, 0.0)))?.0;
    let lambda = s.get("radial", "lambda", lambda, Cplx(Complex64::new(2.0, 0.0)))?.0;
    let k = s.get("radial", "k", k, 0)?;
    let w = wronskian(&m, Spectral::new(omega, lambda, k))?;
    let [wr, wi] = cnum(w.w);
    let row = vec![wr, wi, num(w.scale(&m)), num(w.constancy_defect), w.exceptional.to_string()];
    ctx.sink("radial wronskian").csv(
        "wronskian.csv",
        &["W_re", "W_im", "scale", "constancy_defect", "exceptional"],
        &[row],
    )?;
    Ok(format!("W = {}, |W|/scale = {:e}, constancy defect {:e}", w.w, w.w.norm() / w.scale(&m), w.constancy_defect))
}

fn resonance_record(r: &Resonance) -> Value {
    json!({
        "kind": "resonance",
        "k": r.k,
        "l": r.l,
        "omega": [r.omega.re, r.omega.im],
        "lambda": [r.lambda.re, r.lambda.im],
        "residual": r.residual,
        "newton_iters": r.newton_iters,
        "multiplicity_estimate": r.multiplicity_estimate,
        "provenance": r.provenance,
        "shared_with": r.shared_with,
    })
}

fn qnm_find(
    ctx: &Context,
    g: &GlobalArgs,
    k: Option<i32>,
    l: Option<usize>,
    n: Option<usize>,
    tol: Option<f64>,
) -> Result<String, Failure> {
    let s = &ctx.settings;
    let p = ctx.params(g)?;
    let k = s.get("qnm", "k", k, 0)?;
    let l = s.get("qnm", "l", l, 1usize.max(k.unsigned_abs() as usize))?;
    let n = s.get("qnm", "n", n, 0)?;
    let tol = s.get("qnm", "tol", tol, 1e-11)?;
    let r = find_mode(&p, k, l, n, tol)?;
    ctx.sink("qnm find").jsonl("qnm.jsonl", &[resonance_record(&r)])?;
    Ok(format!("(k, l, n) = ({k}, {l}, {n}): omega = {}, residual {:e}", r.omega, r.residual))
}

#[allow(clippy::too_many_arguments)]
fn qnm_scan(
    ctx: &Context,
    g: &GlobalArgs,
    rect: Option<BoxSpec>,
    ks: Option<List<i32>>,
    ls: Option<List<usize>>,
    grid: Option<Grid>,
    n_contour: Option<usize>,
    tol: Option<f64>,
) -> Result<String, Failure> {
    let s = &ctx.settings;
    let m = ctx.map(g)?;
    let b = s.get("qnm", "box", rect, BoxSpec([-5.0, 5.0, 0.05, 1.0]))?.0;
    let ks = s.get("qnm", "ks", ks, List(vec![0]))?.0;
    let ls = s.get("qnm", "ls", ls, List(vec![0, 1, 2]))?.0;
    let defaults = ScanOptions::default();
    let grid = s.get("qnm", "grid", grid, Grid(defaults.grid.0, defaults.grid.1))?;
    let n_contour = s.get("qnm", "n_contour", n_contour, defaults.n_contour)?;
    let tol = s.get("qnm", "tol", tol, defaults.tol)?;
    let rect = Rect::new(b[0], b[1], b[2], b[3])?;
    let opts = ScanOptions { grid: (grid.0, grid.1), n_contour, tol, ..defaults };
    let outcome = scan(&m, &rect, &ks, &ls, &opts);
    let mut records: Vec<Value> = outcome.resonances.iter().map(resonance_record).collect();
    for (k, l, count) in &outcome.counts {
        records.push(json!({ "kind": "count", "k": k, "l": l, "zeros": count }));
    }
    for (k, l, cell, err) in &outcome.failures {
        records.push(json!({
            "kind": "failure",
            "k": k,
            "l": l,
            "cell": [cell.re.0, cell.re.1, cell.im.0, cell.im.1],
            "error": err.name(),
            "message": err.to_string(),
        }));
    }
    ctx.sink("qnm scan").jsonl("scan.jsonl", &records)?;
    let total: i64 = outcome.counts.iter().map(|c| c.2).sum();
    Ok(format!(
        "{total} zeros counted, {} resonances located, {} unresolved cells over {} modes",
        outcome.resonances.len(),
        outcome.failures.len(),
        outcome.counts.len()
    ))
}

fn bump(r: f64, lo: f64, hi: f64) -> f64 {
    let s = (2.0 * r - lo - hi) / (hi - lo);
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

#[allow(clippy::too_many_arguments)]
fn greens_apply(
    ctx: &Context,
    g: &GlobalArgs,
    omega: Option<Cplx>,
    k: Option<i32>,
    l_max: Option<usize>,
    n_r: Option<usize>,
    n_mu: Option<usize>,
    support: Option<Interval>,
    source: Option<SourceShape>,
) -> Result<String, Failure> {
    let s = &ctx.settings;
    let m = ctx.map(g)?;
    let p = &m.params;
    let omega = s.get("greens", "omega", omega, Cplx(Complex64::new(1.0, -0.2)))?.0;
    let k = s.get("greens", "k", k, 0)?;
    let l_max = s.get("greens", "l_max", l_max, 12)?;
    let n_r = s.get("greens", "n_r", n_r, 201)?;
    let n_mu = s.get("greens", "n_mu", n_mu, 32)?;
    let w = p.r_plus - p.r_minus;
    let support = s.get("greens", "support", support, Interval(p.r_minus + 0.2 * w, p.r_plus - 0.2 * w))?;
    let shape = s.get("greens", "source", source, SourceShape::Bump)?;
    let (lo, hi) = (support.0, support.1);
    let power = 0.5 * k.unsigned_abs() as f64;
    let req = ResolventRequest::sample(omega, k, l_max, (lo, hi), n_r, n_mu, |r, mu| {
        let ang = (1.0 - mu * mu).powf(power) * if shape == SourceShape::BumpMu { mu } else { 1.0 };
        Complex64::new(bump(r, lo, hi) * ang, 0.0)
    });
    let res = resolvent_apply(&m, &req)?;
    let mut rows = Vec::with_capacity(res.r.len() * res.mu.len());
    for (i, r) in res.r.iter().enumerate() {
        for (j, mu) in res.mu.iter().enumerate() {
            let [re, im] = cnum(res.u[(i, j)]);
            rows.push(vec![num(*r), num(*mu), re, im]);
        }
    }
    ctx.sink("greens apply").csv("greens.csv", &["r", "mu", "u_re", "u_im"], &rows)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    Ok(format!(
        "{} branches, residual {:e}, truncation {:e}, {} warnings",
        res.branches.len(),
        res.residual,
        res.truncation,
        res.warnings.len()
    ))
}

fn tdwave_run(ctx: &Context, g: &GlobalArgs, action: &TdwaveAction) -> Result<String, Failure> {
    let TdwaveAction::Run { l, dx, t_final, dt_out, cfl, probes, u, v, window } = action;
    let s = &ctx.settings;
    let m = ctx.map(g)?;
    let d = WaveConfig::default();
    let cfg = WaveConfig {
        l: s.get("tdwave", "l", *l, d.l)?,
        dx: s.get("tdwave", "dx", *dx, d.dx)?,
        t_final: s.get("tdwave", "t_final", *t_final, d.t_final)?,
        dt_out: s.get("tdwave", "dt_out", *dt_out, d.dt_out)?,
        cfl: s.get("tdwave", "cfl", *cfl, d.cfl)?,
        probes: s.get("tdwave", "probes", probes.clone(), Reals(d.probes.clone()))?.0,
        ..d
    };
    let gauss = Profile::Gaussian { center: 0.0, width: 0.5, amplitude: 1.0 };
    let u0 = s.get("tdwave", "u", u.clone(), ProfileSpec(gauss))?.0;
    let v0 = s.get("tdwave", "v", v.clone(), ProfileSpec(Profile::Zero))?.0;
    let window = s.get("tdwave", "window", *window, Interval(4.0, 10.0))?;
    let series = evolve(&m, &cfg, &u0, &v0)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(series.probes.iter().map(|x| format!("u(x={x})")));
    columns.push("energy".into());
    let rows: Vec<Vec<String>> = (0..series.t.len())
        .map(|n| {
            let mut row = vec![num(series.t[n])];
            row.extend(series.values.iter().map(|v| num(v[n])));
            row.push(num(series.energy[n]));
            row
        })
        .collect();
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let sink = ctx.sink("tdwave run");
    sink.csv("tdwave.csv", &cols, &rows)?;
    let fit = ringdown_fit(&series.t, &series.values[0], (window.0, window.1));
    let record = match &fit {
        Ok(f) => json!({
            "kind": "ringdown",
            "probe": series.probes[0],
            "window": [window.0, window.1],
            "omega": [f.omega.re, f.omega.im],
            "plateau": f.plateau,
            "residual": f.residual,
        }),
        Err(e) => json!({ "kind": "ringdown", "probe": series.probes[0], "error": e.name(), "message": e.to_string() }),
    };
    if ctx.out.is_some() {
        sink.jsonl("ringdown.jsonl", &[record])?;
    }
    let steps =
        format!("{} samples, dt = {}, x in ({}, {})", series.t.len(), series.dt, series.x_range.0, series.x_range.1);
    Ok(match fit {
        Ok(f) => format!("{steps}; ringdown omega = {}, plateau {}", f.omega, f.plateau),
        Err(e) => format!("{steps}; ringdown fit: {}: {e}", e.name()),
    })
}

fn run_verify(ctx: &Context, seed: u64) -> Result<String, Failure> {
    let outcomes = verify::run_all(seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    if ctx.out.is_some() {
        let rows: Vec<Vec<String>> = outcomes
            .iter()
            .map(|o| {
                vec![
                    o.id.to_string(),
                    o.name.to_string(),
                    o.passed.to_string(),
                    num(o.elapsed.as_secs_f64()),
                    format!("\"{}\"", o.summary.replace('"', "'")),
                ]
            })
            .collect();
        ctx.sink("verify").csv("verify.csv", &["id", "name", "passed", "seconds", "summary"], &rows)?;
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(format!("{} of {} acceptance checks passed", outcomes.len(), outcomes.len()))
}

//! Command-line front end. [`run`] takes the arguments, the seed override and
//! the output streams, and returns the process exit code: 0 on success, 1 on
//! usage or configuration errors, 2 when a valid estimate or an identity
//! fails.

mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use cone_calculus::gallery::registry;
use cone_calculus::symcone::{
    burkholder_eval, cone_contains_sym, eigen_sym, elementary, rho_k, rho_k_star, ConeId, Matrix, Membership, SymMatrix,
    MAX_DIM,
};

use crate::io::{self, OutputFormat, RunConfig};
use crate::lab::{experiment_ids, experiments, q_max_table, run_experiment, ExperimentReport, Verdict};
use crate::{LabError, LabResult};

pub const SEED_ENV: &str = "CONE_LAB_SEED";

#[derive(Parser, Debug)]
#[command(name = "cone-lab", version, about = "Numerical laboratory for symmetric cones and constrained differential operators")]
struct Cli {
    /// Run configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for one CSV per experiment plus summary.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or table (pretty-table).
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the cone functionals of a matrix given row-major.
    Cone {
        /// Only this order.
        #[arg(long)]
        k: Option<usize>,
        /// Distortion K: print the Burkholder value of a 2×2 matrix.
        #[arg(long = "distortion", short = 'K')]
        distortion: Option<f64>,
        #[arg(required = true, num_args = 1.., allow_negative_numbers = true)]
        entries: Vec<f64>,
    },
    /// Families, experiments and the maximal-exponent table.
    List,
    /// Run experiments (all, or those of the config, when no id is given).
    Verify { ids: Vec<String> },
    /// Run one experiment with `--key v[,v...]` parameter overrides.
    Sweep {
        id: String,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
        params: Vec<String>,
    },
    /// Summarize the CSVs in a directory.
    Report { dir: PathBuf },
}

struct Context<'a> {
    run: RunConfig,
    seed: u64,
    format: OutputFormat,
    out: Option<PathBuf>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

fn exit_code(e: &LabError) -> i32 {
    match e {
        LabError::Precondition { .. } => 2,
        _ => 1,
    }
}

/// Whether a verdict makes the run fail. Blow-up experiments that do not
/// blow up are reported but do not change the exit code.
fn fails_run(v: Verdict) -> bool {
    matches!(v, Verdict::Violation | Verdict::IdentityFail)
}

pub fn run<I, T>(args: I, seed_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, seed_env, stdout, stderr) {
        Ok(code) => code,
        Err((e, ctx_err)) => {
            let _ = writeln!(ctx_err, "error: {e}");
            exit_code(&e)
        }
    }
}

type Dispatch<'a> = Result<i32, (LabError, &'a mut dyn Write)>;

fn dispatch<'a>(cli: Cli, seed_env: Option<&str>, stdout: &'a mut dyn Write, stderr: &'a mut dyn Write) -> Dispatch<'a> {
    let setup = || -> LabResult<(RunConfig, u64, OutputFormat, Option<PathBuf>)> {
        let run = match &cli.config {
            Some(p) => RunConfig::load(p).map_err(|e| match e {
                LabError::Io(io) => LabError::Config(format!("{}: {io}", p.display())),
                e => e,
            })?,
            None => RunConfig::default(),
        };
        let seed = run.effective_seed(seed_env)?;
        let format = match &cli.format {
            Some(f) => OutputFormat::parse(f)?,
            None => run.format,
        };
        let out = cli.out.clone().or_else(|| run.out.clone());
        Ok((run, seed, format, out))
    };
    let (run, seed, format, out) = match setup() {
        Ok(s) => s,
        Err(e) => return Err((e, stderr)),
    };
    let mut ctx = Context { run, seed, format, out, stdout, stderr };
    let result = match cli.command {
        Command::Cone { k, distortion, entries } => cone(&mut ctx, &entries, k, distortion).map(|_| 0),
        Command::List => list(&mut ctx).map(|_| 0),
        Command::Verify { ids } => {
            let ids = if !ids.is_empty() {
                ids
            } else if !ctx.run.experiments.is_empty() {
                ctx.run.experiments.clone()
            } else {
                experiment_ids().into_iter().map(String::from).collect()
            };
            execute(&mut ctx, &ids)
        }
        Command::Sweep { id, params } => sweep(&mut ctx, &id, &params),
        Command::Report { dir } => report(&mut ctx, &dir),
    };
    match result {
        Ok(code) => Ok(code),
        Err(e) => Err((e, ctx.stderr)),
    }
}

fn check_ids(ids: &[String]) -> LabResult<()> {
    let known = experiment_ids();
    for id in ids {
        if !known.contains(&id.as_str()) {
            return Err(LabError::Usage(format!("unknown experiment '{id}'; known: {}", known.join(", "))));
        }
    }
    Ok(())
}

/// Runs the experiments in order. Each CSV is written as soon as its
/// experiment finishes and the summary is written even when a later
/// experiment aborts.
fn execute(ctx: &mut Context, ids: &[String]) -> LabResult<i32> {
    check_ids(ids)?;
    let mut done: Vec<(ExperimentReport, f64, bool)> = Vec::new();
    let mut abort = None;
    for id in ids {
        let cfg = ctx.run.experiment_config(id, ctx.seed);
        let start = Instant::now();
        match run_experiment(id, &cfg) {
            Ok(rep) => {
                let runtime = start.elapsed().as_secs_f64();
                if let Some(dir) = &ctx.out {
                    io::write_report(&dir.join(format!("{id}.csv")), &rep, cfg.record_runtime, runtime)?;
                }
                done.push((rep, runtime, cfg.record_runtime));
            }
            Err(e) => {
                abort = Some(e);
                break;
            }
        }
    }
    let reports: Vec<ExperimentReport> = done.iter().map(|d| d.0.clone()).collect();
    if let Some(dir) = &ctx.out {
        io::write_summary(&dir.join("summary.csv"), &reports)?;
    }
    emit(ctx, &done)?;
    if let Some(e) = abort {
        return Err(e);
    }
    Ok(if reports.iter().any(|r| fails_run(r.verdict)) { 2 } else { 0 })
}

fn summary_rows(reports: &[ExperimentReport]) -> Vec<Vec<String>> {
    reports.iter().map(|r| vec![r.id.clone(), r.verdict.name().to_string(), r.rows.len().to_string(), r.summary.clone()]).collect()
}

fn emit(ctx: &mut Context, done: &[(ExperimentReport, f64, bool)]) -> LabResult<()> {
    let reports: Vec<ExperimentReport> = done.iter().map(|d| d.0.clone()).collect();
    let summary = table::render(&["experiment", "verdict", "rows", "summary"], &summary_rows(&reports));
    match (ctx.format, ctx.out.is_some()) {
        (OutputFormat::Csv, true) => ctx.stdout.write_all(&io::summary_bytes(&reports)?)?,
        (OutputFormat::Table, true) => ctx.stdout.write_all(summary.as_bytes())?,
        (OutputFormat::Csv, false) => {
            for (i, (rep, runtime, record)) in done.iter().enumerate() {
                let bytes = io::report_bytes(rep, *record, *runtime)?;
                let body = if i == 0 {
                    &bytes[..]
                } else {
                    let cut = bytes.iter().position(|&b| b == b'\n').map_or(bytes.len(), |p| p + 1);
                    &bytes[cut..]
                };
                ctx.stdout.write_all(body)?;
            }
            ctx.stderr.write_all(summary.as_bytes())?;
        }
        (OutputFormat::Table, false) => {
            let mut rows = Vec::new();
            for (rep, runtime, record) in done {
                for r in &rep.rows {
                    let rt = if *record { *runtime } else { r.runtime_s };
                    rows.push(vec![
                        r.experiment.clone(),
                        r.param_key.clone(),
                        r.param_value.clone(),
                        r.resolution.to_string(),
                        format!("{:.6e}", r.lhs),
                        format!("{:.6e}", r.rhs),
                        format!("{:.6e}", r.ratio),
                        r.verdict.name().to_string(),
                        format!("{rt:.3}"),
                    ]);
                }
            }
            ctx.stdout.write_all(table::render(&io::HEADER, &rows).as_bytes())?;
            writeln!(ctx.stdout)?;
            ctx.stdout.write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

/// `--key value`, `--key=value`; lists stay comma-separated strings.
fn parse_overrides(params: &[String]) -> LabResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    let mut it = params.iter();
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            return Err(LabError::Usage(format!("expected --key value, found '{arg}'")));
        };
        let (key, value) = match key.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| LabError::Usage(format!("--{key} needs a value")))?;
                (key.to_string(), v.clone())
            }
        };
        out.push((key, value));
    }
    Ok(out)
}

fn sweep(ctx: &mut Context, id: &str, params: &[String]) -> LabResult<i32> {
    check_ids(&[id.to_string()])?;
    for (key, value) in parse_overrides(params)? {
        match key.as_str() {
            "out" => ctx.out = Some(PathBuf::from(value)),
            "format" => ctx.format = OutputFormat::parse(&value)?,
            _ => {
                ctx.run.params.entry(id.to_string()).or_default().insert(key, value);
            }
        }
    }
    execute(ctx, &[id.to_string()])
}

fn report(ctx: &mut Context, dir: &Path) -> LabResult<i32> {
    let entries = std::fs::read_dir(dir).map_err(|e| LabError::Usage(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && p.file_name().is_some_and(|n| n != "summary.csv"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(LabError::Usage(format!("{}: no experiment CSVs", dir.display())));
    }
    let mut rows = Vec::new();
    let mut failed = false;
    for f in &files {
        let data = io::read_report(f)?;
        let id = data.first().map_or_else(|| f.file_stem().unwrap_or_default().to_string_lossy().into_owned(), |r| r.experiment.clone());
        let mut counts: Vec<(Verdict, usize)> = Vec::new();
        for r in &data {
            match counts.iter_mut().find(|c| c.0 == r.verdict) {
                Some(c) => c.1 += 1,
                None => counts.push((r.verdict, 1)),
            }
        }
        failed |= counts.iter().any(|c| fails_run(c.0));
        let worst = data.iter().map(|r| r.verdict).find(|v| !v.passed()).or(data.first().map(|r| r.verdict));
        let verdicts = counts.iter().map(|(v, c)| format!("{v}×{c}")).collect::<Vec<_>>().join(" ");
        let max_ratio = data.iter().map(|r| r.ratio).filter(|x| x.is_finite()).fold(f64::NAN, f64::max);
        rows.push(vec![
            id,
            worst.map_or("-".to_string(), |v| v.name().to_string()),
            data.len().to_string(),
            verdicts,
            format!("{max_ratio:.6e}"),
        ]);
    }
    let headers = ["experiment", "verdict", "rows", "verdict counts", "max finite ratio"];
    match ctx.format {
        OutputFormat::Table => ctx.stdout.write_all(table::render(&headers, &rows).as_bytes())?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(headers)?;
            for r in &rows {
                w.write_record(r)?;
            }
            let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
            ctx.stdout.write_all(&bytes)?;
        }
    }
    Ok(if failed { 2 } else { 0 })
}

fn subscript(k: usize) -> String {
    k.to_string().chars().map(|c| char::from_u32('₀' as u32 + c.to_digit(10).unwrap_or(0)).unwrap_or(c)).collect()
}

fn membership_phrase(m: Membership, cone: &str) -> String {
    match m {
        Membership::Inside => format!("inside {cone}"),
        Membership::Boundary => format!("on the boundary of {cone}"),
        Membership::Outside => format!("outside {cone}"),
    }
}

fn number(x: f64) -> String {
    format!("{x:.10}")
}

fn cone(ctx: &mut Context, entries: &[f64], k: Option<usize>, distortion: Option<f64>) -> LabResult<()> {
    let n = (entries.len() as f64).sqrt().round() as usize;
    if n * n != entries.len() || n == 0 || n > MAX_DIM {
        return Err(LabError::Usage(format!("{} entries do not form an n×n matrix with 1 ≤ n ≤ {MAX_DIM}", entries.len())));
    }
    if let Some(k) = k {
        if k == 0 || k > n {
            return Err(LabError::Usage(format!("order k = {k} not in 1..={n}")));
        }
    }
    let a = Matrix::from_row_major(n, entries)?;
    let w = &mut *ctx.stdout;
    if let Some(big_k) = distortion {
        if n != 2 {
            return Err(LabError::Usage("the Burkholder value needs a 2×2 matrix".into()));
        }
        if !(big_k >= 1.0) {
            return Err(LabError::Usage("distortion K must be >= 1".into()));
        }
        let b = burkholder_eval(&a, big_k);
        if b == f64::NEG_INFINITY {
            writeln!(w, "B_K(A) with K = {big_k}: outside Q₂⁺(K)")?;
        } else {
            writeln!(w, "B_K(A) with K = {big_k} = {}", number(b))?;
        }
    }
    let Ok(s) = SymMatrix::from_matrix(a, 1e-12) else {
        if distortion.is_none() {
            return Err(LabError::Usage("the cone functionals need a symmetric matrix".into()));
        }
        writeln!(w, "A is not symmetric; cone functionals skipped")?;
        return Ok(());
    };
    let spectrum = eigen_sym(&s)?;
    let lambda = spectrum.values();
    let sigma = elementary(lambda);
    let list = |v: &[f64]| v.iter().map(|x| number(*x)).collect::<Vec<_>>().join(", ");
    writeln!(w, "λ(A) = [{}]", list(lambda))?;
    for j in 1..=n {
        writeln!(w, "σ{} = {}", subscript(j), number(sigma[j]))?;
    }
    let orders: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (1..=n).collect(),
    };
    for k in orders {
        let sub = subscript(k);
        let gamma = format!("Γ{sub}");
        let gamma_star = format!("Γ{sub}*");
        let r = rho_k(&s, k)?;
        if r == f64::NEG_INFINITY {
            writeln!(w, "ρ{sub}: outside {gamma}")?;
        } else {
            writeln!(w, "ρ{sub} = {}", number(r))?;
        }
        if n >= 2 {
            let d = rho_k_star(&s, k)?;
            if d.is_outside() {
                writeln!(w, "ρ{sub}*: outside {gamma_star}")?;
            } else {
                writeln!(w, "ρ{sub}* = {}", number(d.value))?;
            }
        }
        let tol = 1e-12 * s.frobenius().max(1.0);
        let m = cone_contains_sym(&s, &ConeId::Gamma(k), tol)?;
        writeln!(w, "A is {}", membership_phrase(m, &gamma))?;
        if n >= 2 {
            let m = cone_contains_sym(&s, &ConeId::GammaStar(k), tol)?;
            writeln!(w, "A is {}", membership_phrase(m, &gamma_star))?;
        }
    }
    Ok(())
}

fn list(ctx: &mut Context) -> LabResult<()> {
    let w = &mut *ctx.stdout;
    writeln!(w, "Families")?;
    let rows: Vec<Vec<String>> = registry()
        .iter()
        .map(|f| {
            let params = f
                .params
                .iter()
                .map(|p| format!("{}: {} {} = {}", p.name, p.kind.name(), p.range, p.default))
                .collect::<Vec<_>>()
                .join("; ");
            vec![f.id.to_string(), f.domain.to_string(), params, f.claim.to_string()]
        })
        .collect();
    w.write_all(table::render(&["family", "domain", "parameters (name: type range = default)", "claim"], &rows).as_bytes())?;
    writeln!(w)?;
    writeln!(w, "Experiments")?;
    let rows: Vec<Vec<String>> = experiments().iter().map(|e| vec![e.id.to_string(), e.summary.to_string()]).collect();
    w.write_all(table::render(&["experiment", "checks"], &rows).as_bytes())?;
    writeln!(w)?;
    writeln!(w, "Maximal exponents")?;
    let rows: Vec<Vec<String>> = q_max_table()
        .iter()
        .map(|q| {
            vec![format!("({}, {}, q_max = {})", q.operator, q.cone, q.q_max), q.wave_cone.to_string(), q.gauge.to_string()]
        })
        .collect();
    w.write_all(table::render(&["(operator, cone, q_max)", "wave cone", "gauge"], &rows).as_bytes())?;
    Ok(())
}

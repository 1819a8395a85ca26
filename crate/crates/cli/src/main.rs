//! Command-line front end: compute any quantity, run any suite, emit
//! tables and reports.
//!
//! Outputs are deterministic for a fixed configuration and seed: no
//! timestamps, derived per-job seeds, and results written in input
//! order. Every artifact embeds (or sits next to) an echo of the
//! configuration that produced it.

use clap::{Args, Parser, Subcommand};
use hypharm::ballgeo::{inverse_volume, isoperimetric_check};
use hypharm::fieldlab::{parse_field, preset, pullback_unit, TestField};
use hypharm::normlab::{
    bergman_norm, g_function, hardy_norm, level_measure, SamplingConfig, TGridSpec,
};
use hypharm::planar2d::{
    coefficient_inequality_check, corollary_co32_check, isoperimetric_constant,
    isoperimetric_inequality_check, random_mappings, HarmonicMapping, PositiveIntegrand,
};
use hypharm::report::{csv_cell, to_json, write_csv};
use hypharm::verify::{
    bergman_theorem_suite, contraction_suite, hardy_theorem_suite, limit_suite, monotone_suite,
    random_lemma_trial, weaktype_suite, TransformSpec, VerdictReport,
};
use hypharm::weightfn::{c_alpha, e_constant, log_phi, phi};
use hypharm::{Error, Result};
use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "hypharm",
    about = "Hyperbolic-harmonic function spaces: weights, isoperimetry, norms, level sets, and inequality suites",
    version
)]
struct Cli {
    /// Output directory (HYPHARM_OUT overrides; default hypharm-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tables.
    #[arg(long, global = true, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Master seed; per-job seeds derive deterministically from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Plain-text key=value defaults merged beneath the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parallel jobs for multi-field check invocations.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the radial weight Φₙ and the boundary constant Eₙ.
    Phi {
        #[arg(long)]
        n: Option<usize>,
        /// Number of radii 0, 1/grid, ..., (grid-1)/grid.
        #[arg(long, default_value_t = 11)]
        grid: usize,
    },
    /// Tabulate the isoperimetric profile Υ and ball margins.
    Upsilon {
        #[arg(long)]
        n: Option<usize>,
        /// Single volume to evaluate.
        #[arg(long)]
        v: Option<f64>,
        /// Table size when no single volume is given.
        #[arg(long, default_value_t = 24)]
        grid: usize,
        #[arg(long, default_value_t = 1e3)]
        v_max: f64,
    },
    /// Bergman normalization constants c(α).
    Calpha {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1.2, 1.5, 2.0, 3.0])]
        alphas: Vec<f64>,
    },
    /// Hardy or weighted Bergman norm of a field.
    Norm {
        #[arg(value_parser = ["hardy", "bergman"])]
        kind: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        field: Option<String>,
    },
    /// Superlevel-measure table μ(t) and g(t) for u = |f|^a Φₙ^α.
    Levelset {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        field: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 200)]
        t_points: usize,
        #[arg(long, default_value_t = 1e4)]
        t_span: f64,
    },
    /// Run an inequality suite; exit 1 if it fails.
    Check(CheckArgs),
    /// Aggregate verdict files in a directory into a manifest.
    Report {
        #[arg(long)]
        dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_parser = [
        "contraction", "monotone", "weaktype", "hardy-thm", "bergman-thm",
        "lemma", "limits", "coeff", "isoperim", "co32",
    ])]
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    /// Field spec(s): preset name, pullback:<r>, @file, or an inline
    /// s-expression; comma-separated lists fan out into parallel jobs.
    #[arg(long)]
    field: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    /// Transform for the theorem suites: power:<s>, step:<t0>:<jump>,
    /// or pwl:t,g;t,g;...
    #[arg(long)]
    transform: Option<String>,
    #[arg(long, default_value_t = 120)]
    t_points: usize,
    #[arg(long, default_value_t = 1e3)]
    t_span: f64,
    /// Trials for the lemma oracle.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Random-mapping ensemble size for the planar checks.
    #[arg(long, default_value_t = 100)]
    mappings: usize,
    #[arg(long, default_value_t = 16)]
    degree: usize,
    /// Coefficient CSV (k, Re a, Im a, Re b, Im b) instead of the
    /// random ensemble.
    #[arg(long)]
    coeffs: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => std::process::exit(0),
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(2);
        }
    }
}

/// key = value defaults read from --config.
fn read_config(path: &Option<PathBuf>) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    if let Some(path) = path {
        let text = fs::read_to_string(path)?;
        for line in text.lines() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line needs key = value: '{line}'")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    Ok(map)
}

fn merged<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::Parse(format!("config key '{key}': invalid value '{raw}'"))),
        None => Ok(None),
    }
}

struct Ctx {
    out_dir: PathBuf,
    format: String,
    seed: u64,
    jobs: usize,
    argv: Vec<String>,
}

impl Ctx {
    fn write_table(&self, stem: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        if self.format == "json" {
            let payload = serde_json::json!({
                "columns": header,
                "rows": rows,
                "config": { "argv": self.argv, "seed": self.seed },
            });
            let path = self.out_dir.join(format!("{stem}.json"));
            fs::write(&path, to_json(&payload)?)?;
            Ok(path)
        } else {
            let path = self.out_dir.join(format!("{stem}.csv"));
            let mut buf = Vec::new();
            write_csv(&mut buf, header, rows)?;
            fs::write(&path, buf)?;
            let echo = serde_json::json!({ "argv": self.argv, "seed": self.seed });
            fs::write(
                self.out_dir.join(format!("{stem}.config.json")),
                to_json(&echo)?,
            )?;
            Ok(path)
        }
    }

    fn write_json(&self, stem: &str, payload: &serde_json::Value) -> Result<PathBuf> {
        fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(format!("{stem}.json"));
        fs::write(&path, to_json(payload)?)?;
        Ok(path)
    }

    fn sampling(&self) -> SamplingConfig {
        SamplingConfig {
            seed: self.seed,
            ..SamplingConfig::default()
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = read_config(&cli.config)?;
    let out_dir = std::env::var_os("HYPHARM_OUT")
        .map(PathBuf::from)
        .or(cli.out)
        .or_else(|| cfg.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("hypharm-out"));
    let format = cli
        .format
        .or_else(|| cfg.get("format").cloned())
        .unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        return Err(Error::Parse(format!("unknown format '{format}'")));
    }
    let seed = merged(cli.seed, &cfg, "seed")?.unwrap_or(0);
    let jobs = merged(cli.jobs, &cfg, "jobs")?.unwrap_or(1).max(1);
    let ctx = Ctx {
        out_dir,
        format,
        seed,
        jobs,
        argv: std::env::args().collect(),
    };

    match cli.command {
        Command::Phi { n, grid } => {
            let n = merged(n, &cfg, "n")?.unwrap_or(2);
            cmd_phi(&ctx, n, grid)?;
            Ok(true)
        }
        Command::Upsilon { n, v, grid, v_max } => {
            let n = merged(n, &cfg, "n")?.unwrap_or(2);
            cmd_upsilon(&ctx, n, v, grid, v_max)?;
            Ok(true)
        }
        Command::Calpha { n, alphas } => {
            let n = merged(n, &cfg, "n")?.unwrap_or(2);
            cmd_calpha(&ctx, n, &alphas)?;
            Ok(true)
        }
        Command::Norm {
            kind,
            n,
            p,
            alpha,
            field,
        } => {
            let n = merged(n, &cfg, "n")?.unwrap_or(2);
            let p = merged(p, &cfg, "p")?.unwrap_or(2.0);
            let field = field
                .or_else(|| cfg.get("field").cloned())
                .unwrap_or_else(|| "unit".into());
            cmd_norm(&ctx, &kind, n, p, alpha, &field)?;
            Ok(true)
        }
        Command::Levelset {
            n,
            field,
            a,
            alpha,
            t_points,
            t_span,
        } => {
            let n = merged(n, &cfg, "n")?.unwrap_or(2);
            let field = field
                .or_else(|| cfg.get("field").cloned())
                .unwrap_or_else(|| "unit".into());
            cmd_levelset(&ctx, n, &field, a, alpha, t_points, t_span)?;
            Ok(true)
        }
        Command::Check(args) => cmd_check(&ctx, &cfg, args),
        Command::Report { dir } => {
            let dir = dir.unwrap_or_else(|| ctx.out_dir.clone());
            cmd_report(&ctx, &dir)
        }
    }
}

/// Resolve a field spec; pullback presets receive the suite's Φ-exponent.
fn resolve_field(spec: &str, n: usize, weight_exponent: f64) -> Result<TestField> {
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix('@') {
        let text = fs::read_to_string(rest)?;
        return parse_field(&text, n);
    }
    if spec.starts_with('(') {
        return parse_field(spec, n);
    }
    if let Some(r) = spec.strip_prefix("pullback:") {
        let radius: f64 = r
            .parse()
            .map_err(|_| Error::Parse(format!("invalid pullback radius '{r}'")))?;
        return pullback_unit(n, radius, weight_exponent, 1.0);
    }
    preset(spec, n)
}

fn cmd_phi(ctx: &Ctx, n: usize, grid: usize) -> Result<()> {
    if grid == 0 {
        return Err(Error::Parse("grid must be positive".into()));
    }
    let e_n: f64 = e_constant(n)?;
    let mut rows = Vec::with_capacity(grid);
    for i in 0..grid {
        let r = i as f64 / grid as f64;
        rows.push(vec![r, phi(n, r)?, log_phi(n, r)?]);
    }
    let path = ctx.write_table(&format!("phi_n{n}"), &["r", "phi", "log_phi"], &rows)?;
    println!("# n = {n}, E_n = {}", csv_cell(e_n));
    for row in &rows {
        println!(
            "r = {:<22} phi = {:<24} log_phi = {}",
            row[0],
            csv_cell(row[1]),
            csv_cell(row[2])
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_upsilon(ctx: &Ctx, n: usize, v: Option<f64>, grid: usize, v_max: f64) -> Result<()> {
    let header = ["v", "upsilon", "s", "newper1_margin", "newes_margin"];
    let rows: Vec<Vec<f64>> = match v {
        Some(v) => vec![upsilon_row(n, v)?],
        None => {
            let lo = (v_max * 1e-4).max(1e-4);
            let ratio = (v_max / lo).powf(1.0 / (grid.max(2) as f64 - 1.0));
            (0..grid)
                .map(|i| upsilon_row(n, lo * ratio.powi(i as i32)))
                .collect::<Result<_>>()?
        }
    };
    let path = ctx.write_table(&format!("upsilon_n{n}"), &header, &rows)?;
    for row in &rows {
        println!(
            "v = {:<24} upsilon = {:<24} margins: equality {:+.3e}, power {:+.3e}",
            csv_cell(row[0]),
            csv_cell(row[1]),
            row[3],
            row[4]
        );
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn upsilon_row(n: usize, v: f64) -> Result<Vec<f64>> {
    let s = inverse_volume(n, v)?;
    let ups = hypharm::ballgeo::upsilon(n, v)?;
    let rep = isoperimetric_check(n, s)?;
    Ok(vec![v, ups, s, rep.equality_margin, rep.power_margin])
}

fn cmd_calpha(ctx: &Ctx, n: usize, alphas: &[f64]) -> Result<()> {
    let mut rows = Vec::with_capacity(alphas.len());
    for &a in alphas {
        rows.push(vec![a, c_alpha(n, a)?]);
    }
    let path = ctx.write_table(&format!("calpha_n{n}"), &["alpha", "c_alpha"], &rows)?;
    for row in &rows {
        println!("alpha = {:<8} c(alpha) = {}", row[0], csv_cell(row[1]));
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_norm(
    ctx: &Ctx,
    kind: &str,
    n: usize,
    p: f64,
    alpha: Option<f64>,
    field: &str,
) -> Result<()> {
    let sampling = ctx.sampling();
    let report = match kind {
        "hardy" => {
            let f = resolve_field(field, n, 1.0 / p)?;
            hardy_norm(&f, p, &sampling)?
        }
        "bergman" => {
            let alpha = alpha.ok_or_else(|| Error::Parse("bergman norm needs --alpha".into()))?;
            let f = resolve_field(field, n, alpha / p)?;
            bergman_norm(&f, p, alpha, &sampling)?
        }
        other => return Err(Error::Parse(format!("unknown norm kind '{other}'"))),
    };
    let stem = format!(
        "norm_{kind}_n{n}_p{p}{}",
        alpha.map(|a| format!("_a{a}")).unwrap_or_default()
    );
    let path = if ctx.format == "csv" {
        ctx.write_table(
            &stem,
            &hypharm::normlab::NormReport::CSV_HEADER,
            &[report.csv_row()],
        )?
    } else {
        let payload = serde_json::json!({
            "norm": report,
            "field": field,
            "config": { "argv": ctx.argv, "seed": ctx.seed },
        });
        ctx.write_json(&stem, &payload)?
    };
    println!(
        "{kind} norm = {} (error est {:.3e})",
        csv_cell(report.value),
        report.error
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_levelset(
    ctx: &Ctx,
    n: usize,
    field: &str,
    a: f64,
    alpha: f64,
    t_points: usize,
    t_span: f64,
) -> Result<()> {
    let sampling = ctx.sampling();
    let f = resolve_field(field, n, if a > 0.0 { alpha / a } else { 1.0 })?;
    let profile = level_measure(
        &f,
        a,
        alpha,
        &TGridSpec {
            points: t_points,
            span: t_span,
        },
        &sampling,
    )?;
    let table = g_function(&profile)?;
    let rows: Vec<Vec<f64>> = (0..profile.t.len())
        .map(|i| {
            vec![
                profile.t[i],
                profile.mu[i],
                profile.mu_err[i],
                table.g[i],
                table.g_err[i],
            ]
        })
        .collect();
    let stem = format!("levelset_n{n}_a{a}_al{alpha}");
    let path = ctx.write_table(&stem, &["t", "mu", "mu_err", "g", "g_err"], &rows)?;
    println!(
        "t_max = {} (upper bound {}), {} levels",
        csv_cell(profile.t_max),
        csv_cell(profile.t_max_upper),
        profile.t.len()
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn parse_transform(spec: &str) -> Result<TransformSpec> {
    if let Some(s) = spec.strip_prefix("power:") {
        let s: f64 = s
            .parse()
            .map_err(|_| Error::Parse(format!("bad power '{s}'")))?;
        return TransformSpec::power(s);
    }
    if let Some(rest) = spec.strip_prefix("step:") {
        let (t0, jump) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse("step transform: step:<t0>:<jump>".into()))?;
        return TransformSpec::step(
            t0.parse()
                .map_err(|_| Error::Parse(format!("bad t0 '{t0}'")))?,
            jump.parse()
                .map_err(|_| Error::Parse(format!("bad jump '{jump}'")))?,
        );
    }
    if let Some(rest) = spec.strip_prefix("pwl:") {
        let breaks: Vec<(f64, f64)> = rest
            .split(';')
            .map(|pair| {
                let (t, g) = pair
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("pwl break '{pair}' needs t,g")))?;
                Ok((
                    t.parse()
                        .map_err(|_| Error::Parse(format!("bad t '{t}'")))?,
                    g.parse()
                        .map_err(|_| Error::Parse(format!("bad g '{g}'")))?,
                ))
            })
            .collect::<Result<_>>()?;
        return TransformSpec::piecewise_linear(breaks);
    }
    Err(Error::Parse(format!(
        "unknown transform '{spec}' (power:<s> | step:<t0>:<jump> | pwl:t,g;t,g;...)"
    )))
}

fn cmd_check(ctx: &Ctx, cfg: &BTreeMap<String, String>, args: CheckArgs) -> Result<bool> {
    let n = merged(args.n, cfg, "n")?.unwrap_or(2);
    let p = merged(args.p, cfg, "p")?.unwrap_or(2.0);
    let suite = args.suite.as_str();
    match suite {
        "lemma" => {
            let mut failures = 0usize;
            let mut worst = f64::INFINITY;
            for i in 0..args.trials {
                let rep = random_lemma_trial(ctx.seed.wrapping_add(i as u64))?;
                if !rep.passed {
                    failures += 1;
                }
                worst = worst.min(rep.margin + rep.tolerance);
            }
            let passed = failures == 0;
            let payload = serde_json::json!({
                "suite": "lemma",
                "trials": args.trials,
                "failures": failures,
                "worst_slack": worst,
                "passed": passed,
                "seed": ctx.seed,
                "config": { "argv": ctx.argv },
            });
            let path = ctx.write_json("verdict_lemma", &payload)?;
            println!(
                "lemma oracle: {}/{} trials hold -> {}",
                args.trials - failures,
                args.trials,
                if passed { "PASS" } else { "FAIL" }
            );
            println!("wrote {}", path.display());
            return Ok(passed);
        }
        "coeff" | "isoperim" | "co32" => {
            return cmd_check_planar(ctx, suite, p, args.alpha, &args);
        }
        _ => {}
    }

    // Field-driven suites: fan comma lists out into jobs.
    let field_spec = args
        .field
        .clone()
        .or_else(|| cfg.get("field").cloned())
        .unwrap_or_else(|| "unit".into());
    let specs: Vec<String> = field_spec.split(',').map(str::to_string).collect();
    let tgrid = TGridSpec {
        points: args.t_points,
        span: args.t_span,
    };
    let alphas = args.alphas.clone();
    let transform = args.transform.clone();

    let job = |idx: usize, spec: &str| -> Result<VerdictReport> {
        let mut sampling = ctx.sampling();
        sampling.seed = ctx.seed.wrapping_add(1_000_003u64.wrapping_mul(idx as u64));
        match suite {
            "contraction" => {
                let r = args.r.unwrap_or(1.0);
                let alphas = alphas.clone().unwrap_or_else(|| vec![1.2, 1.5, 2.0, 3.0]);
                let f = resolve_field(spec, n, 1.0 / r)?;
                contraction_suite(&f, r, &alphas, &sampling)
            }
            "monotone" => {
                let a = p;
                let alpha = args.alpha.unwrap_or(1.0);
                let f = resolve_field(spec, n, if a > 0.0 { alpha / a } else { 1.0 })?;
                monotone_suite(&f, a, alpha, &tgrid, &sampling)
            }
            "weaktype" => {
                let f = resolve_field(spec, n, 1.0 / p)?;
                weaktype_suite(&f, p, &tgrid, &sampling)
            }
            "hardy-thm" => {
                let g = parse_transform(transform.as_deref().unwrap_or("power:2"))?;
                let f = resolve_field(spec, n, 1.0 / p)?;
                hardy_theorem_suite(&f, p, &g, &tgrid, &sampling)
            }
            "bergman-thm" => {
                let alpha = args.alpha.unwrap_or(2.0);
                let g = parse_transform(transform.as_deref().unwrap_or("power:2"))?;
                let f = resolve_field(spec, n, alpha / p)?;
                bergman_theorem_suite(&f, p, alpha, &g, &tgrid, &sampling)
            }
            "limits" => {
                let alphas = alphas
                    .clone()
                    .unwrap_or_else(|| vec![1.5, 1.2, 1.1, 1.05, 1.02]);
                let f = resolve_field(spec, n, 1.0 / p)?;
                limit_suite(&f, p, &alphas, &sampling)
            }
            other => Err(Error::Parse(format!("unknown suite '{other}'"))),
        }
    };

    // Run jobs (scoped threads when --jobs > 1), then write in input
    // order so outputs are byte-stable regardless of scheduling.
    let mut results: Vec<Option<Result<VerdictReport>>> = Vec::new();
    results.resize_with(specs.len(), || None);
    if ctx.jobs <= 1 || specs.len() <= 1 {
        for (i, spec) in specs.iter().enumerate() {
            results[i] = Some(job(i, spec));
        }
    } else {
        let chunk = ctx.jobs;
        let results_slots: Vec<std::sync::Mutex<Option<Result<VerdictReport>>>> = (0..specs.len())
            .map(|_| std::sync::Mutex::new(None))
            .collect();
        std::thread::scope(|scope| {
            for batch in (0..specs.len()).collect::<Vec<_>>().chunks(chunk) {
                let mut handles = Vec::new();
                for &i in batch {
                    let spec = specs[i].clone();
                    let slot = &results_slots[i];
                    let job = &job;
                    handles.push(scope.spawn(move || {
                        *slot.lock().unwrap() = Some(job(i, &spec));
                    }));
                }
                for h in handles {
                    let _ = h.join();
                }
            }
        });
        for (i, slot) in results_slots.into_iter().enumerate() {
            results[i] = slot.into_inner().unwrap();
        }
    }

    let mut all_passed = true;
    for (i, (spec, result)) in specs.iter().zip(results).enumerate() {
        let verdict = result.expect("job ran")?;
        for line in verdict.summary_lines() {
            println!("[{spec}] {line}");
        }
        all_passed &= verdict.passed;
        let stem = if specs.len() == 1 {
            format!("verdict_{suite}")
        } else {
            format!("verdict_{suite}_{i:02}")
        };
        let payload = serde_json::json!({
            "verdict": verdict,
            "field_spec": spec,
            "config": { "argv": ctx.argv, "seed": ctx.seed, "jobs": ctx.jobs },
        });
        let path = ctx.write_json(&stem, &payload)?;
        println!("wrote {}", path.display());
    }
    Ok(all_passed)
}

fn cmd_check_planar(
    ctx: &Ctx,
    suite: &str,
    p: f64,
    alpha: Option<f64>,
    args: &CheckArgs,
) -> Result<bool> {
    let maps: Vec<HarmonicMapping> = if let Some(path) = &args.coeffs {
        let file = fs::File::open(path)?;
        vec![HarmonicMapping::from_csv(BufReader::new(file))?]
    } else {
        random_mappings(ctx.seed, args.mappings, args.degree)
    };
    let mut worst = f64::INFINITY;
    let mut failures = 0usize;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, map) in maps.iter().enumerate() {
        let (margin, extra) = match suite {
            "coeff" => {
                let r = coefficient_inequality_check(map, p)?;
                let m = r.margin_modulus.min(r.margin_scaled);
                rows.push(vec![
                    i as f64,
                    r.coefficient_sum,
                    r.margin_modulus,
                    r.margin_scaled,
                ]);
                (m, r.coefficient_sum)
            }
            "isoperim" => {
                let r = isoperimetric_inequality_check(map, p)?;
                rows.push(vec![i as f64, r.bergman_2p, r.hardy_p, r.margin]);
                (r.margin, r.bergman_2p)
            }
            "co32" => {
                let alpha = alpha.unwrap_or(2.0);
                let r = corollary_co32_check(&PositiveIntegrand::Mapping(map), p, alpha)?;
                rows.push(vec![i as f64, r.weighted_bergman, r.hardy, r.margin]);
                (r.margin, r.weighted_bergman)
            }
            _ => unreachable!(),
        };
        let _ = extra;
        if margin < -1e-8 {
            failures += 1;
        }
        worst = worst.min(margin);
    }
    let passed = failures == 0;
    let payload = serde_json::json!({
        "suite": suite,
        "p": p,
        "alpha": alpha,
        "mappings": maps.len(),
        "failures": failures,
        "worst_margin": worst,
        "constant": if suite == "isoperim" { Some(isoperimetric_constant(p)) } else { None },
        "passed": passed,
        "seed": ctx.seed,
        "config": { "argv": ctx.argv },
    });
    let path = ctx.write_json(&format!("verdict_{suite}"), &payload)?;
    let header: &[&str] = match suite {
        "coeff" => &[
            "index",
            "coefficient_sum",
            "margin_modulus",
            "margin_scaled",
        ],
        "isoperim" => &["index", "bergman_2p", "hardy_p", "margin"],
        _ => &["index", "weighted_bergman", "hardy", "margin"],
    };
    ctx.write_table(&format!("check_{suite}_table"), header, &rows)?;
    println!(
        "{suite}: {} mappings, worst margin {worst:+.3e} -> {}",
        maps.len(),
        if passed { "PASS" } else { "FAIL" }
    );
    println!("wrote {}", path.display());
    Ok(passed)
}

fn cmd_report(ctx: &Ctx, dir: &Path) -> Result<bool> {
    let mut runs = Vec::new();
    let mut all_passed = true;
    let mut entries: Vec<_> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.starts_with("verdict_") && s.ends_with(".json"))
        })
        .collect();
    entries.sort();
    for path in entries {
        let text = fs::read_to_string(&path)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let passed = value["passed"]
            .as_bool()
            .or_else(|| value["verdict"]["passed"].as_bool())
            .unwrap_or(false);
        let suite = value["suite"]
            .as_str()
            .or_else(|| value["verdict"]["suite"].as_str())
            .unwrap_or("unknown")
            .to_string();
        let seed = value["seed"]
            .as_u64()
            .or_else(|| value["verdict"]["seed"].as_u64())
            .unwrap_or(0);
        all_passed &= passed;
        runs.push(serde_json::json!({
            "file": path.file_name().unwrap().to_string_lossy(),
            "suite": suite,
            "seed": seed,
            "passed": passed,
        }));
    }
    if runs.is_empty() {
        return Err(Error::Parse(format!(
            "no verdict files in {}",
            dir.display()
        )));
    }
    let manifest = serde_json::json!({
        "runs": runs,
        "all_passed": all_passed,
        "config": { "argv": ctx.argv },
    });
    let path = ctx.write_json("manifest", &manifest)?;
    println!(
        "{} suite file(s), all_passed = {all_passed}; wrote {}",
        manifest["runs"].as_array().unwrap().len(),
        path.display()
    );
    Ok(all_passed)
}

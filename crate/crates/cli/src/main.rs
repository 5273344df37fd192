//! Command-line driver: configuration-driven census, growth verification,
//! series evaluation, repelling census, and a built-in self-test for
//! rational-semigroup skew products.
//!
//! Exit codes: 0 = success, 1 = a verification ran and failed, 2 = the
//! experiment description is unusable (config, input, or cap errors),
//! 3 = the computation was attempted and failed numerically.  Every
//! non-zero exit writes a single-line JSON error record to standard error.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use orbitcensus::analysis::{
    verify_repelling_bounds, verify_rho, verify_theorem_1, verify_theorem_2, verify_theorem_3,
    verify_theorem_4, ComparabilityReport, RhoReport,
};
use orbitcensus::config::{ExperimentConfig, OutputFormat, ResolvedMode, ValidatedExperiment};
use orbitcensus::counting::{
    dirichlet_partial, lambda_estimate, meissel_sum, mertens_sum, radius_estimate, rho_series,
    CountTable, LambdaEstimate, MeisselSource,
};
use orbitcensus::dynamics::Potential;
use orbitcensus::numtheory::ZetaParams;
use orbitcensus::report::{
    count_table_json, report_envelope, table_digest, write_count_csv, write_json, write_plot_data,
};
use orbitcensus::selftest::run_selftest;
use orbitcensus::{Error, Result};

/// Census and growth verification for rational-semigroup skew products.
#[derive(Parser)]
#[command(name = "orbitcensus", version, about)]
struct Cli {
    /// Experiment config file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one config key by dotted path, e.g. `--set n_max=14` or
    /// `--set output.directory=run2`.  Values parse as TOML fragments
    /// (numbers, booleans, arrays, inline tables); bare words fall back to
    /// strings.  Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Worker threads (overrides the config key).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the count table to the configured depth and write it out.
    Count,
    /// List the closed orbits of one length with representatives,
    /// multiplicities, and weights.
    Orbits {
        /// Orbit length.
        #[arg(long)]
        n: usize,
    },
    /// Run every applicable growth verification; exit 0 only if all pass.
    Verify,
    /// Evaluate the configured Mertens / Meissel / Dirichlet / power-series
    /// grids and write the values with their certificates.
    Series,
    /// Census of repelling periodic points of a single generator, with the
    /// sandwich bounds.
    Repelling,
    /// Run the built-in cross-checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            let exit = exit_code_for(&e);
            emit_error_record(error_kind(&e), &e.to_string(), exit);
            ExitCode::from(exit)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    if let Command::Selftest = cli.command {
        return cmd_selftest();
    }
    let loaded = load_experiment(&cli)?;
    if let Some(t) = loaded.validated.config.threads {
        // A failure here means a pool already exists, which serves equally.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
    for w in &loaded.validated.warnings {
        eprintln!("warning: {w}");
    }
    match cli.command {
        Command::Count => cmd_count(&loaded),
        Command::Orbits { n } => cmd_orbits(&loaded, n),
        Command::Verify => cmd_verify(&loaded),
        Command::Series => cmd_series(&loaded),
        Command::Repelling => cmd_repelling(&loaded),
        Command::Selftest => unreachable!("handled above"),
    }
}

// ---------------------------------------------------------------------------
// Error records and exit codes.
// ---------------------------------------------------------------------------

fn emit_error_record(kind: &str, message: &str, exit: u8) {
    let record = json!({ "error": { "kind": kind, "message": message, "exit": exit } });
    eprintln!("{record}");
}

/// Exit 2 when the experiment description itself is unusable — parse or
/// validation failures, degenerate map definitions, windows outside the
/// data, resource caps refusing the requested size, I/O.  Exit 3 when the
/// computation was attempted and failed numerically — non-convergence,
/// degeneration, uncertifiable tails, overflow, internal invariants.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::NonPositive { .. }
        | Error::InvalidPoly(_)
        | Error::InvalidMap(_)
        | Error::CommonRoot { .. }
        | Error::MissingDivisorData(_)
        | Error::LambdaNotAboveOne { .. }
        | Error::WindowTooShort { .. }
        | Error::OutsideConvergenceRegion { .. }
        | Error::NonpositiveComparator { .. }
        | Error::EnumerationCapExceeded { .. }
        | Error::DegreeCapExceeded { .. }
        | Error::OutsideRadius { .. }
        | Error::Io(_)
        | Error::Json(_) => 2,
        _ => 3,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::NonPositive { .. } => "non_positive",
        Error::OutsideConvergenceRegion { .. } => "outside_convergence_region",
        Error::ToleranceUnreachable { .. } => "tolerance_unreachable",
        Error::InvalidPoly(_) => "invalid_polynomial",
        Error::InvalidMap(_) => "invalid_map",
        Error::CommonRoot { .. } => "common_root",
        Error::IndeterminateEvaluation { .. } => "indeterminate_evaluation",
        Error::DegenerateComposition { .. } => "degenerate_composition",
        Error::TotalDegeneration => "total_degeneration",
        Error::NoConvergence { .. } => "no_convergence",
        Error::EnumerationCapExceeded { .. } => "enumeration_cap_exceeded",
        Error::DegreeCapExceeded { .. } => "degree_cap_exceeded",
        Error::PeriodDetectionAmbiguous { .. } => "period_detection_ambiguous",
        Error::PotentialUndefined { .. } => "potential_undefined",
        Error::OrbitClosureMismatch(_) => "orbit_closure_mismatch",
        Error::MultiplierUndefined(_) => "multiplier_undefined",
        Error::MissingDivisorData(_) => "missing_divisor_data",
        Error::LambdaNotAboveOne { .. } => "lambda_not_above_one",
        Error::TailNotCertifiable { .. } => "tail_not_certifiable",
        Error::OutsideRadius { .. } => "outside_radius",
        Error::HypothesisImplausible(_) => "hypothesis_implausible",
        Error::Overflow(_) => "overflow",
        Error::WindowTooShort { .. } => "window_too_short",
        Error::NonpositiveComparator { .. } => "nonpositive_comparator",
        Error::Internal(_) => "internal",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

// ---------------------------------------------------------------------------
// Config loading and flag overrides.
// ---------------------------------------------------------------------------

struct Loaded {
    validated: ValidatedExperiment,
    digest: String,
}

fn load_experiment(cli: &Cli) -> Result<Loaded> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("this subcommand needs --config <path>".into()))?;
    let text = fs::read_to_string(path)?;
    let mut cfg = config_with_overrides(&text, &cli.set)?;
    if let Some(t) = cli.threads {
        cfg.threads = Some(t);
    }
    let digest = cfg.semantic_digest();
    let validated = cfg.validate()?;
    Ok(Loaded { validated, digest })
}

fn config_with_overrides(text: &str, sets: &[String]) -> Result<ExperimentConfig> {
    if sets.is_empty() {
        return ExperimentConfig::from_toml_str(text);
    }
    let mut doc: toml::Value = toml::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("config parse error: {e}")))?;
    for s in sets {
        let (path, raw) = s
            .split_once('=')
            .ok_or_else(|| Error::InvalidInput(format!("--set takes KEY=VALUE, got '{s}'")))?;
        set_by_path(&mut doc, path.trim(), parse_override_value(raw))?;
    }
    doc.try_into()
        .map_err(|e| Error::InvalidInput(format!("config error after overrides: {e}")))
}

fn parse_override_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match toml::from_str::<toml::Table>(&wrapped) {
        Ok(mut t) => t.remove("v").expect("key v was just parsed"),
        Err(_) => toml::Value::String(raw.trim().to_string()),
    }
}

fn set_by_path(doc: &mut toml::Value, path: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = path.split('.').collect();
    if path.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(Error::InvalidInput(format!(
            "--set key '{path}' is not a dotted path"
        )));
    }
    let mut cur = doc;
    for p in &parts[..parts.len() - 1] {
        let table = cur.as_table_mut().ok_or_else(|| {
            Error::InvalidInput(format!("--set path '{path}': '{p}' is not a table"))
        })?;
        cur = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let leaf = *parts.last().expect("split always yields one part");
    let table = cur.as_table_mut().ok_or_else(|| {
        Error::InvalidInput(format!(
            "--set path '{path}': parent of '{leaf}' is not a table"
        ))
    })?;
    table.insert(leaf.to_string(), value);
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces.
// ---------------------------------------------------------------------------

fn build_table(v: &ValidatedExperiment) -> Result<CountTable> {
    match v.mode {
        ResolvedMode::Exact => CountTable::exact_zero(&v.system.degrees(), v.table_len()),
        ResolvedMode::Numeric => CountTable::enumerate(&v.system, &v.potential, v.table_len()),
    }
}

/// The growth rate every comparison runs against: the configured or derived
/// hypothesis when one exists, otherwise a log-linear fit of the table.
fn resolve_lambda(
    v: &ValidatedExperiment,
    table: &CountTable,
) -> Result<(f64, &'static str, Option<LambdaEstimate>)> {
    match v.lambda {
        Some(l) if v.config.lambda.is_some() => Ok((l, "configured", None)),
        Some(l) => Ok((l, "derived", None)),
        None => {
            let (lo, hi) = v.fit_window();
            let est = lambda_estimate(table, lo, hi, v.config.fit_residual_ceiling)?;
            Ok((est.lambda, "fitted", Some(est)))
        }
    }
}

/// The structural Meissel route applies when the coefficients follow the
/// zero-potential law up to a constant-weight factor that cancels against
/// the matching growth rate; any other potential, or an overridden rate,
/// integrates the table under its envelope certificate.
fn meissel_source<'a>(
    v: &'a ValidatedExperiment,
    table: &'a CountTable,
    lambda: f64,
    degrees: &'a [usize],
) -> MeisselSource<'a> {
    let structural = matches!(v.potential, Potential::Zero | Potential::Constant(_))
        && v.config.lambda.is_none();
    if structural {
        MeisselSource::Structural { degrees }
    } else {
        MeisselSource::Table { table, lambda }
    }
}

fn zeta_params(v: &ValidatedExperiment) -> ZetaParams {
    ZetaParams {
        term_cap: v.config.caps.zeta_terms,
        ..ZetaParams::default()
    }
}

/// Truncating `ρ` at `n_terms` leaves a relative tail on the order of
/// `fraction^n_terms`; beyond this threshold the partial sum says nothing
/// about the infinite series and the point is skipped, not faked.
const RHO_TAIL_MEANINGFUL: f64 = 1e-6;

fn rho_grid(fractions: &[f64], lambda: f64, n_terms: usize) -> (Vec<f64>, Vec<(f64, String)>) {
    let mut kept = Vec::new();
    let mut skipped = Vec::new();
    for &f in fractions {
        let tail = f.powi(n_terms as i32);
        if tail > RHO_TAIL_MEANINGFUL {
            skipped.push((
                f,
                format!(
                    "truncation tail ~{tail:.2e} at {n_terms} terms is not meaningful; \
                     deepen the table or drop the fraction"
                ),
            ));
        } else {
            kept.push(f / lambda);
        }
    }
    (kept, skipped)
}

fn out_dir(v: &ValidatedExperiment) -> Result<PathBuf> {
    let dir = PathBuf::from(&v.config.output.directory);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn wants(v: &ValidatedExperiment, f: OutputFormat) -> bool {
    v.config.output.formats.contains(&f)
}

fn write_file<F>(dir: &Path, name: &str, fill: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    fill(&mut w)?;
    w.flush()?;
    Ok(path)
}

fn announce_written(paths: &[PathBuf]) {
    if !paths.is_empty() {
        let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
        println!("wrote: {}", names.join(", "));
    }
}

// ---------------------------------------------------------------------------
// Subcommands.
// ---------------------------------------------------------------------------

fn cmd_count(loaded: &Loaded) -> Result<ExitCode> {
    let v = &loaded.validated;
    let table = build_table(v)?;
    let dir = out_dir(v)?;
    let mut written = Vec::new();
    if wants(v, OutputFormat::Csv) {
        written.push(write_file(&dir, "counts.csv", |w| {
            write_count_csv(w, &table, &loaded.digest)
        })?);
    }
    if wants(v, OutputFormat::Json) {
        let doc = count_table_json(&table, &loaded.digest)?;
        written.push(write_file(&dir, "counts.json", |w| write_json(w, &doc))?);
    }
    println!("mode: {}", table.mode_name());
    println!("rows: {}", table.n_max());
    if let Some(l) = table.lambda_hint() {
        println!("lambda hint: {l}");
    }
    println!("table digest: {}", table_digest(&table)?);
    announce_written(&written);
    Ok(ExitCode::SUCCESS)
}

fn cmd_orbits(loaded: &Loaded, n: usize) -> Result<ExitCode> {
    let v = &loaded.validated;
    if n == 0 {
        return Err(Error::InvalidInput("--n must be at least 1".into()));
    }
    let points = v.system.periodic_points(&v.potential, n)?;
    let total_points: usize = points.iter().map(|p| p.multiplicity).sum();
    let prime: Vec<_> = points.into_iter().filter(|p| p.prime_period == n).collect();
    let orbits = v.system.group_into_orbits(n, &prime)?;

    println!("period: {n}");
    println!("points with multiplicity: {total_points}");
    println!("closed orbits of length {n}: {}", orbits.len());
    for (i, orbit) in orbits.iter().enumerate() {
        let rep = orbit.representative();
        println!(
            "orbit {:>4}: word={} z={} multiplicity={} weight_exponent={}",
            i + 1,
            rep.word,
            rep.z,
            orbit.multiplicity,
            orbit.weight_exponent
        );
    }

    if wants(v, OutputFormat::Json) {
        let dir = out_dir(v)?;
        let body = json!({
            "n": n,
            "points_with_multiplicity": total_points,
            "orbit_count": orbits.len(),
            "orbits": serde_json::to_value(&orbits)?,
        });
        let doc = report_envelope("orbits", &loaded.digest, body);
        let path = write_file(&dir, "orbits.json", |w| write_json(w, &doc))?;
        announce_written(&[path]);
    }
    Ok(ExitCode::SUCCESS)
}

fn band_line(name: &str, r: &ComparabilityReport) -> String {
    let (lo, hi) = r.window();
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{name}: {verdict} — band {:.9} (ceiling {}) over [{lo}, {hi}]",
        r.band_ratio, r.ceiling
    );
    if let Some(cause) = &r.failure_cause {
        line.push_str(&format!("; {cause}"));
    }
    line
}

fn rho_line(r: &RhoReport) -> String {
    let verdict = if r.pass { "PASS" } else { "FAIL" };
    format!(
        "rho: {verdict} — band {:.9} (ceiling {}), radius {:.9} vs expected {:.9} (rel err {:.3e})",
        r.band.band_ratio, r.band.ceiling, r.radius, r.radius_expected, r.radius_rel_err
    )
}

fn cmd_verify(loaded: &Loaded) -> Result<ExitCode> {
    let v = &loaded.validated;
    let cfg = &v.config;
    let table = build_table(v)?;
    let (lambda, lambda_source, lambda_fit) = resolve_lambda(v, &table)?;
    let degrees = v.system.degrees();
    let window = v.window_max();

    let t1 = verify_theorem_1(
        "thm1",
        &table,
        lambda,
        window,
        cfg.burn_in,
        cfg.band_ceiling,
    )?;
    let t2 = verify_theorem_2(
        "thm2",
        &table,
        lambda,
        window,
        cfg.burn_in,
        cfg.band_ceiling,
    )?;
    let t3 = verify_theorem_3(
        "thm3",
        meissel_source(v, &table, lambda, &degrees),
        &cfg.k_grid,
        cfg.meissel_tail_tol,
        cfg.band_ceiling,
    )?;
    let t4 = verify_theorem_4(
        "thm4",
        &table,
        lambda,
        &v.s_points(),
        cfg.dirichlet_n_max.min(table.n_max()),
        cfg.burn_in,
        cfg.band_ceiling,
        zeta_params(v),
    )?;
    let n_terms = table.n_max();
    let (z_grid, rho_skipped) = rho_grid(&cfg.rho_radius_fractions, lambda, n_terms);
    for (f, reason) in &rho_skipped {
        eprintln!("warning: rho fraction {f} skipped: {reason}");
    }
    let rho = if z_grid.is_empty() {
        None
    } else {
        Some(verify_rho(
            "rho",
            &table,
            lambda,
            v.fit_window(),
            &z_grid,
            n_terms,
            cfg.band_ceiling,
        )?)
    };

    println!("lambda: {lambda} ({lambda_source})");
    println!("{}", band_line("thm1", &t1));
    println!("{}", band_line("thm2", &t2));
    println!("{}", band_line("thm3", &t3));
    let t4_verdict = if t4.pass { "PASS" } else { "FAIL" };
    let conv = if t4.convolution.exact && t4.convolution.max_rel_dev == 0.0 {
        format!("convolution exact over n <= {}", t4.convolution.up_to)
    } else {
        format!(
            "convolution max relative deviation {:.3e} over n <= {}",
            t4.convolution.max_rel_dev, t4.convolution.up_to
        )
    };
    println!("thm4: {t4_verdict} — {conv}");
    for p in &t4.per_point {
        println!("  {}", band_line(&p.claim, p));
    }
    match &rho {
        Some(r) => println!("{}", rho_line(r)),
        None => println!("rho: SKIPPED — no evaluable grid points at this depth"),
    }

    let all_pass = t1.pass && t2.pass && t3.pass && t4.pass && rho.as_ref().is_none_or(|r| r.pass);

    let dir = out_dir(v)?;
    let mut written = Vec::new();
    if wants(v, OutputFormat::Csv) {
        written.push(write_file(&dir, "counts.csv", |w| {
            write_count_csv(w, &table, &loaded.digest)
        })?);
    }
    if wants(v, OutputFormat::Json) {
        let body = json!({
            "lambda": lambda,
            "lambda_source": lambda_source,
            "lambda_fit": serde_json::to_value(lambda_fit)?,
            "table_digest": table_digest(&table)?,
            "warnings": v.warnings,
            "rho_skipped": rho_skipped
                .iter()
                .map(|(f, reason)| json!({ "fraction": f, "reason": reason }))
                .collect::<Vec<_>>(),
            "checks": {
                "thm1": serde_json::to_value(&t1)?,
                "thm2": serde_json::to_value(&t2)?,
                "thm3": serde_json::to_value(&t3)?,
                "thm4": serde_json::to_value(&t4)?,
                "rho": serde_json::to_value(&rho)?,
            },
            "pass": all_pass,
        });
        let doc = report_envelope("verification", &loaded.digest, body);
        written.push(write_file(&dir, "verification.json", |w| {
            write_json(w, &doc)
        })?);
    }
    if wants(v, OutputFormat::Plotdata) {
        let band_rows = |r: &ComparabilityReport| -> Vec<(f64, f64)> {
            r.labels
                .iter()
                .copied()
                .zip(r.ratios.iter().copied())
                .collect()
        };
        for (name, report, columns) in [
            ("thm1.dat", &t1, ("N", "ratio")),
            ("thm2.dat", &t2, ("N", "ratio")),
            ("thm3.dat", &t3, ("k", "k_times_sum")),
        ] {
            let rows = band_rows(report);
            written.push(write_file(&dir, name, |w| {
                write_plot_data(w, &loaded.digest, &report.claim, columns, &rows)
            })?);
        }
        for (i, p) in t4.per_point.iter().enumerate() {
            let rows = band_rows(p);
            written.push(write_file(&dir, &format!("thm4_{}.dat", i + 1), |w| {
                write_plot_data(w, &loaded.digest, &p.claim, ("N", "ratio"), &rows)
            })?);
        }
        if let Some(r) = &rho {
            let rows = band_rows(&r.band);
            written.push(write_file(&dir, "rho.dat", |w| {
                write_plot_data(w, &loaded.digest, &r.band.claim, ("z", "ratio"), &rows)
            })?);
        }
    }
    announce_written(&written);

    if all_pass {
        println!("verification: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("verification: FAIL");
        let mut failed = Vec::new();
        if !t1.pass {
            failed.push("thm1");
        }
        if !t2.pass {
            failed.push("thm2");
        }
        if !t3.pass {
            failed.push("thm3");
        }
        if !t4.pass {
            failed.push("thm4");
        }
        if rho.as_ref().is_some_and(|r| !r.pass) {
            failed.push("rho");
        }
        emit_error_record(
            "verification_failed",
            &format!("checks failed: {}", failed.join(", ")),
            1,
        );
        Ok(ExitCode::from(1))
    }
}

fn cmd_series(loaded: &Loaded) -> Result<ExitCode> {
    let v = &loaded.validated;
    let cfg = &v.config;
    let table = build_table(v)?;
    let (lambda, lambda_source, lambda_fit) = resolve_lambda(v, &table)?;
    let degrees = v.system.degrees();

    let window = v.window_max();
    let mertens = mertens_sum(&table, lambda, window)?;

    let mut meissel = Vec::with_capacity(cfg.k_grid.len());
    for &k in &cfg.k_grid {
        let m = meissel_sum(
            meissel_source(v, &table, lambda, &degrees),
            k,
            cfg.meissel_tail_tol,
        )?;
        meissel.push(json!({
            "k": k,
            "value": m.value,
            "k_times_value": k * m.value,
            "truncation_n": m.truncation_n,
            "certified_tail": m.certified_tail,
        }));
    }

    let dirichlet_n = cfg.dirichlet_n_max.min(table.n_max());
    let mut dirichlet = Vec::with_capacity(cfg.s_grid.len());
    for s in v.s_points() {
        let p = dirichlet_partial(&table, lambda, s, dirichlet_n, zeta_params(v))?;
        dirichlet.push(serde_json::to_value(&p)?);
    }

    let n_terms = table.n_max();
    let (fit_lo, fit_hi) = v.fit_window();
    let radius = radius_estimate(&table, fit_lo, fit_hi)?;
    let lambda_hat = 1.0 / radius;
    let mut rho_points = Vec::with_capacity(cfg.rho_radius_fractions.len());
    for &f in &cfg.rho_radius_fractions {
        let z = f / lambda;
        let tail = f.powi(n_terms as i32);
        if tail > RHO_TAIL_MEANINGFUL {
            rho_points.push(json!({
                "fraction": f, "z": z, "skipped": true,
                "reason": format!("truncation tail ~{tail:.2e} at {n_terms} terms"),
            }));
            continue;
        }
        if z * lambda_hat >= 0.99 {
            rho_points.push(json!({
                "fraction": f, "z": z, "skipped": true,
                "reason": format!(
                    "outside the fitted convergence radius: z * lambda_hat = {:.6}",
                    z * lambda_hat
                ),
            }));
            continue;
        }
        let value = rho_series(
            &table,
            lambda_hat,
            num_complex::Complex64::new(z, 0.0),
            n_terms,
        )?;
        let model = (1.0 / (1.0 - lambda * z)).ln();
        rho_points.push(json!({
            "fraction": f, "z": z, "skipped": false,
            "value": { "re": value.re, "im": value.im },
            "log_model": model,
            "ratio": value.re / model,
        }));
    }

    println!("lambda: {lambda} ({lambda_source})");
    println!("mertens({window}): {mertens}");
    for m in &meissel {
        println!(
            "meissel k={}: {} (k*value {}, certified tail {})",
            m["k"], m["value"], m["k_times_value"], m["certified_tail"]
        );
    }
    for d in &dirichlet {
        println!(
            "dirichlet s={}: lhs {} rhs {} (n <= {})",
            d["s"], d["lhs"], d["rhs"], d["n_used"]
        );
    }
    for p in &rho_points {
        if p["skipped"].as_bool() == Some(true) {
            println!("rho z={}: skipped — {}", p["z"], p["reason"]);
        } else {
            println!(
                "rho z={}: {} (ratio to log model {})",
                p["z"], p["value"]["re"], p["ratio"]
            );
        }
    }

    let mut written = Vec::new();
    if wants(v, OutputFormat::Json) {
        let dir = out_dir(v)?;
        let body = json!({
            "lambda": lambda,
            "lambda_source": lambda_source,
            "lambda_fit": serde_json::to_value(lambda_fit)?,
            "table_digest": table_digest(&table)?,
            "mertens": { "n": window, "value": mertens },
            "meissel": meissel,
            "dirichlet": dirichlet,
            "rho": { "lambda_hat": lambda_hat, "radius": radius, "points": rho_points },
        });
        let doc = report_envelope("series", &loaded.digest, body);
        written.push(write_file(&dir, "series.json", |w| write_json(w, &doc))?);
    }
    announce_written(&written);
    Ok(ExitCode::SUCCESS)
}

fn cmd_repelling(loaded: &Loaded) -> Result<ExitCode> {
    let v = &loaded.validated;
    let report = verify_repelling_bounds(&v.system, v.config.n_max)?;
    println!("degree: {}", report.degree);
    for row in &report.rows {
        println!(
            "n={:>3}: repelling {} of {} (undefined {}), bounds [{}, {}]{}{}",
            row.n,
            row.repelling,
            row.total,
            row.undefined,
            row.lower_bound,
            row.upper_bound,
            if row.lower_ok && row.upper_ok {
                " ok"
            } else {
                " VIOLATED"
            },
            if row.lower_vacuous {
                " (lower bound vacuous)"
            } else {
                ""
            },
        );
    }
    for note in &report.notes {
        println!("note: {note}");
    }

    if wants(v, OutputFormat::Json) {
        let dir = out_dir(v)?;
        let body = serde_json::to_value(&report)?;
        let doc = report_envelope("repelling", &loaded.digest, body);
        let path = write_file(&dir, "repelling.json", |w| write_json(w, &doc))?;
        announce_written(&[path]);
    }

    if report.pass {
        println!("repelling census: PASS");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("repelling census: FAIL");
        emit_error_record("verification_failed", "repelling sandwich violated", 1);
        Ok(ExitCode::from(1))
    }
}

fn cmd_selftest() -> Result<ExitCode> {
    let outcomes = run_selftest()?;
    let mut all = true;
    for o in &outcomes {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("{}: {verdict} — {}", o.name, o.detail);
        all &= o.pass;
    }
    if all {
        println!("selftest: PASS ({} checks)", outcomes.len());
        Ok(ExitCode::SUCCESS)
    } else {
        println!("selftest: FAIL");
        emit_error_record("selftest_failed", "one or more self-test checks failed", 1);
        Ok(ExitCode::from(1))
    }
}

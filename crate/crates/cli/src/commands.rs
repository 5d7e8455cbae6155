//! Subcommands of `qcl` and their reports.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qcl_core::bounds::{bound_suite, SuiteMode, SuiteOptions};
use qcl_core::engine::check_guard;
use qcl_core::funcodes::compare_params;
use qcl_core::intersections::{spectrum, SpectrumMode};
use qcl_core::wordgeom::theorem_check;
use qcl_core::{
    build_code, canonical_form, shared_geometry, Error, Field, Form4, Geometry, Quadric, QuadricClass, ScanOptions,
    Tier,
};

use crate::expr::{format_form, parse_form};

pub const SCHEMA: u32 = 1;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Pass = 0,
    Violation = 1,
    Usage = 2,
    Guard = 3,
}

#[derive(Parser, Debug)]
#[command(name = "qcl", version, about = "Quadrics of PG(3,q), their functional codes and intersection bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the quadric of a form.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        form: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Build C2(X), enumerate its weight distribution and compare parameters.
    Code {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        surface: SurfaceArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the intersection bound suite and the spectra of the three surfaces.
    VerifyBounds {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum, default_value_t = ModeArg::Sample)]
        mode: ModeArg,
        /// Random forms in sample mode (also the spectrum sample size).
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Geometric census of the codewords of one weight tier.
    Words {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, value_parser = clap::value_parser!(Tier))]
        tier: Tier,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Field order.
    #[arg(long)]
    pub q: u32,
    /// Characteristic; with --m, must satisfy p^m = q.
    #[arg(long, requires = "m")]
    pub p: Option<u32>,
    #[arg(long, requires = "p")]
    pub m: Option<u32>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct SurfaceArgs {
    /// Canonical surface.
    #[arg(long, value_enum)]
    pub surface: Option<SurfaceArg>,
    /// Explicit defining form.
    #[arg(long)]
    pub form: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long, env = "QCL_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Lift the size guards.
    #[arg(long)]
    pub force: bool,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Print the JSON report instead of the text summary.
    #[arg(long)]
    pub json: bool,
    /// Write PREFIX.json (and PREFIX.csv for `code`).
    #[arg(long, value_name = "PREFIX")]
    pub emit: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SurfaceArg {
    Cone,
    Hyperbolic,
    Elliptic,
}

impl SurfaceArg {
    fn class(self) -> QuadricClass {
        match self {
            SurfaceArg::Cone => QuadricClass::Cone,
            SurfaceArg::Hyperbolic => QuadricClass::Hyperbolic,
            SurfaceArg::Elliptic => QuadricClass::Elliptic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exhaustive,
    Sample,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit(&self) -> Exit {
        match self {
            Failure::Core(Error::SizeGuard { .. }) => Exit::Guard,
            Failure::Io(_) => Exit::Violation,
            _ => Exit::Usage,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Outcome of a command: its report, the text summary and the exit code.
struct Outcome {
    report: Value,
    text: String,
    exit: Exit,
    csv: Option<String>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage as i32 } else { Exit::Pass as i32 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let invocation: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let output = match &cli.command {
        Command::Classify { output, .. }
        | Command::Code { output, .. }
        | Command::VerifyBounds { output, .. }
        | Command::Words { output, .. } => output.clone(),
    };
    let started = Instant::now();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            return f.exit() as i32;
        }
    };
    let mut report = outcome.report;
    if let Value::Object(map) = &mut report {
        map.insert("invocation".into(), json!(invocation));
        map.insert("timing_ms".into(), json!(started.elapsed().as_millis() as u64));
        map.insert("exit_code".into(), json!(outcome.exit as i32));
    }
    if let Some(prefix) = &output.emit {
        if let Err(e) = emit(prefix, &report, outcome.csv.as_deref()) {
            let _ = writeln!(err, "error: cannot write report: {e}");
            return Exit::Usage as i32;
        }
    }
    let _ = if output.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"))
    } else {
        write!(out, "{}", outcome.text)
    };
    outcome.exit as i32
}

fn emit(prefix: &Path, report: &Value, csv: Option<&str>) -> std::io::Result<()> {
    let with_ext = |ext: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    std::fs::write(with_ext(".json"), serde_json::to_string_pretty(report).expect("report serializes") + "\n")?;
    if let Some(csv) = csv {
        std::fs::write(with_ext(".csv"), csv)?;
    }
    Ok(())
}

/// Builds GF(q), checking `--p/--m` against `--q`.
pub fn field_from_args(args: &FieldArgs) -> Result<Field, String> {
    let field = match (args.p, args.m) {
        (Some(p), Some(m)) => {
            let f = Field::new(p, m).map_err(|e| e.to_string())?;
            if f.q() != args.q {
                return Err(format!("--p {p} --m {m} gives GF({}), not GF({})", f.q(), args.q));
            }
            f
        }
        _ => Field::with_order(args.q).map_err(|e| e.to_string())?,
    };
    Ok(field)
}

fn geometry(args: &FieldArgs) -> Result<(std::sync::Arc<Geometry>, Value), Failure> {
    let field = field_from_args(args).map_err(Failure::Usage)?;
    let geom = shared_geometry(field.q())?;
    let header = json!({
        "q": field.q(),
        "p": field.p(),
        "m": field.m(),
        "modulus": field.modulus_string(),
    });
    Ok((geom, header))
}

fn header(command: &str, field: Value) -> Value {
    json!({ "schema": SCHEMA, "command": command, "field": field })
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

fn surface_form(geom: &Geometry, s: &SurfaceArgs) -> Result<Form4, Failure> {
    match (&s.surface, &s.form) {
        (Some(kind), _) => Ok(canonical_form(geom.field(), kind.class())),
        (None, Some(text)) => parse_form(text, geom.field()).map_err(|e| Failure::Usage(e.to_string())),
        (None, None) => Err(Failure::Usage("one of --surface or --form is required".into())),
    }
}

fn form_json(geom: &Geometry, f: &Form4) -> Value {
    json!({ "text": format_form(geom.field(), f), "coefficients": f.reps() })
}

fn execute(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Classify { field, form, .. } => classify(field, form),
        Command::Code { field, surface, run, .. } => code(field, surface, run),
        Command::VerifyBounds { field, mode, samples, seed, run, .. } => verify_bounds(field, *mode, *samples, *seed, run),
        Command::Words { field, surface, tier, run, .. } => words(field, surface, *tier, run),
    }
}

fn point_label(geom: &Geometry, p: u32) -> String {
    geom.point(p).to_string()
}

fn classify(field: &FieldArgs, text: &str) -> Result<Outcome, Failure> {
    let (geom, fh) = geometry(field)?;
    let f = parse_form(text, geom.field()).map_err(|e| Failure::Usage(e.to_string()))?;
    let quadric = Quadric::analyze(&geom, f)?;
    let singular = qcl_core::singular_points(&geom, &f)?;
    let singular: Vec<String> = singular.iter().map(|p| p.to_string()).collect();
    let reguli = quadric.reguli().map(|r| [r[0].count_ones(..), r[1].count_ones(..)]);
    let vertex = quadric.vertex().map(|v| point_label(&geom, v));
    let class = quadric.class();
    let report = merge(
        header("classify", fh),
        json!({
            "form": form_json(&geom, &f),
            "class": class.name(),
            "points": quadric.size(),
            "singular_points": singular,
            "lines_contained": quadric.lines().count_ones(..),
            "planes_contained": quadric.planes().count_ones(..),
            "vertex": vertex,
            "reguli": reguli,
        }),
    );
    let mut text = format!(
        "form     {}\nclass    {}\npoints   {}\nsingular {}\nlines    {}\n",
        format_form(geom.field(), &f),
        class.name(),
        quadric.size(),
        if singular.is_empty() { "none".to_string() } else { singular.join(" ") },
        quadric.lines().count_ones(..),
    );
    if let Some(v) = &vertex {
        text += &format!("vertex   {v}\n");
    }
    if let Some([a, b]) = reguli {
        text += &format!("reguli   {a} + {b} lines\n");
    }
    Ok(Outcome { report, text, exit: Exit::Pass, csv: None })
}

fn code(field: &FieldArgs, surface: &SurfaceArgs, run: &RunArgs) -> Result<Outcome, Failure> {
    let (geom, fh) = geometry(field)?;
    let f = surface_form(&geom, surface)?;
    let code = build_code(&geom, &f)?;
    check_guard(code.q(), code.k(), run.force)?;
    let dist = code.weight_distribution(ScanOptions { workers: run.workers, force: run.force })?;
    let cmp = compare_params(&code, &dist)?;
    let h = cmp.hierarchy;
    let deviation = code.class() == QuadricClass::Cone && code.q() == 3;
    let (status, exit) = match (cmp.matches, deviation) {
        (true, _) => ("match", Exit::Pass),
        (false, true) => ("documented-deviation", Exit::Pass),
        (false, false) => ("mismatch", Exit::Violation),
    };
    let e = cmp.expected;
    let flags = json!({
        "n": code.n() as i64 == e.n,
        "k": code.k() as i64 == e.k,
        "d": h.is_some_and(|h| h.w1 as i64 == e.d),
        "w2": h.is_some_and(|h| h.w2 as i64 == e.w2),
        "w3": h.is_some_and(|h| h.w3 as i64 == e.w3),
    });
    let points: Vec<String> = code.points().iter().map(|&p| point_label(&geom, p)).collect();
    let report = merge(
        header("code", fh),
        json!({
            "surface": { "class": code.class().name(), "form": form_json(&geom, &f) },
            "parameters": { "n": code.n(), "k": code.k(), "d": h.map(|h| h.w1), "w2": h.map(|h| h.w2), "w3": h.map(|h| h.w3) },
            "expected": e,
            "match": flags,
            "status": status,
            "workers": run.workers,
            "column_order": points,
            "distribution": dist,
        }),
    );
    let fmt_opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    let text = format!(
        "surface  {} {}\ncode     [{},{},{}]_{}\nweights  w2={} w3={}\nexpected [{},{},{}] w2={} w3={}\nstatus   {status}\n",
        code.class().name(),
        format_form(geom.field(), &f),
        code.n(),
        code.k(),
        fmt_opt(h.map(|h| h.w1)),
        code.q(),
        fmt_opt(h.map(|h| h.w2)),
        fmt_opt(h.map(|h| h.w3)),
        e.n,
        e.k,
        e.d,
        e.w2,
        e.w3,
    );
    Ok(Outcome { report, text, exit, csv: Some(dist.to_csv()) })
}

fn verify_bounds(field: &FieldArgs, mode: ModeArg, samples: usize, seed: u64, run: &RunArgs) -> Result<Outcome, Failure> {
    let (geom, fh) = geometry(field)?;
    let suite_mode = match mode {
        ModeArg::Exhaustive => SuiteMode::Exhaustive,
        ModeArg::Sample => SuiteMode::Sample,
    };
    let opts = SuiteOptions { mode: suite_mode, samples, seed, workers: run.workers, force: run.force };
    let suite = bound_suite(&geom, opts)?;
    let spectrum_mode = match mode {
        ModeArg::Exhaustive => SpectrumMode::Exhaustive,
        ModeArg::Sample => SpectrumMode::Sampled { count: samples as u64, seed },
    };
    let mut spectra = Vec::new();
    for class in [QuadricClass::Cone, QuadricClass::Hyperbolic, QuadricClass::Elliptic] {
        let code = build_code(&geom, &canonical_form(geom.field(), class))?;
        spectra.push(spectrum(&geom, &code, spectrum_mode, run.force)?);
    }
    let failed_spectra = spectra.iter().filter(|s| !s.passed).count();
    let passed = suite.passed && failed_spectra == 0;

    let mut text = format!(
        "bound suite q={} mode={} forms={} pairs={}\n",
        suite.q,
        match suite_mode {
            SuiteMode::Exhaustive => "exhaustive",
            SuiteMode::Sample => "sample",
        },
        suite.forms,
        suite.pairs
    );
    for c in &suite.certificates {
        let bound = match c.bound {
            qcl_core::bounds::Bound::AtMost(v) => format!("<= {v}"),
            qcl_core::bounds::Bound::Exactly(v) => format!("== {v}"),
            qcl_core::bounds::Bound::Structural => "structural".to_string(),
        };
        let max = c.max().map_or("-".to_string(), |m| m.to_string());
        text += &format!(
            "  {:<40} {:>11} checked  max {:>4}  {:<11} {}\n",
            c.case,
            c.checked,
            max,
            bound,
            if c.passed { "ok" } else { "VIOLATED" }
        );
        for w in c.witnesses.iter().filter(|w| w.kind == "violation") {
            text += &format!(
                "      witness {} | {} -> {}\n",
                format_form(geom.field(), &w.f),
                format_form(geom.field(), &w.g),
                w.value
            );
        }
    }
    for n in &suite.numeric {
        text += &format!("  {:<40} {}  {}\n", n.case, if n.passed { "ok" } else { "VIOLATED" }, n.detail);
    }
    for s in &spectra {
        let top: Vec<usize> = [s.max1, s.max2, s.max3].iter().flatten().copied().collect();
        text += &format!(
            "spectrum {:<10} top sizes {:?}  pattern {}/{}/<= {}  {}{}\n",
            s.class.name(),
            top,
            s.pattern.top,
            s.pattern.second,
            s.pattern.rest_ceiling,
            if s.passed { "ok" } else { "VIOLATED" },
            if s.caveat.is_some() { " (top value reachable only by kernel forms)" } else { "" }
        );
        for w in &s.violations {
            text += &format!("      witness {} -> {}\n", format_form(geom.field(), &w.form), w.size);
        }
    }
    text += &format!("result   {}\n", if passed { "pass" } else { "fail" });
    let report = merge(
        header("verify-bounds", fh),
        json!({
            "mode": suite_mode,
            "seed": suite.seed,
            "samples": (suite_mode == SuiteMode::Sample).then_some(samples),
            "bounds": suite,
            "spectra": spectra,
            "passed": passed,
        }),
    );
    Ok(Outcome { report, text, exit: if passed { Exit::Pass } else { Exit::Violation }, csv: None })
}

fn words(field: &FieldArgs, surface: &SurfaceArgs, tier: Tier, run: &RunArgs) -> Result<Outcome, Failure> {
    let (geom, fh) = geometry(field)?;
    let f = surface_form(&geom, surface)?;
    let code = build_code(&geom, &f)?;
    check_guard(code.q(), code.k(), run.force)?;
    let check = theorem_check(&geom, &code, tier, ScanOptions { workers: run.workers, force: run.force })?;
    let c = &check.census;
    let mut text = format!(
        "surface  {} {}\ntier     {} weight {} ({} codewords up to scalars)\n",
        c.surface.name(),
        format_form(geom.field(), &f),
        tier,
        c.tier_weight,
        c.total
    );
    for (label, count) in &c.types {
        text += &format!("  {label:<45} {count}\n");
    }
    if c.census_only {
        text += "mode     census only\n";
    } else {
        let missing: Vec<String> = check.missing.iter().map(|t| t.label()).collect();
        text += &format!("unmatched {}  missing types {:?}\n", c.unmatched_count, missing);
        for u in &c.unmatched {
            text += &format!("      witness {}\n", format_form(geom.field(), u));
        }
    }
    text += &format!("result   {}\n", if check.passed { "pass" } else { "fail" });
    let unmatched: Vec<Value> = c.unmatched.iter().map(|u| form_json(&geom, u)).collect();
    let report = merge(
        header("words", fh),
        json!({
            "surface": c.surface.name(),
            "surface_form": form_json(&geom, &f),
            "q": c.q,
            "tier": c.tier,
            "tier_weight": c.tier_weight,
            "total": c.total,
            "types": c.types,
            "presence": c.presence,
            "unmatched_count": c.unmatched_count,
            "unmatched": unmatched,
            "census_only": c.census_only,
            "listed": check.listed,
            "missing": check.missing,
            "passed": check.passed,
        }),
    );
    Ok(Outcome { report, text, exit: if check.passed { Exit::Pass } else { Exit::Violation }, csv: None })
}

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use permachk::checker::{check_builtin, CheckOptions, ConditionId, PermanenceVerdict, RouteChoice, VariantChoice};
use permachk::fixed_points::boundary_fixed_points;
use permachk::lyapunov::{
    classify_invasion, external_exponent_decomposed, external_exponent_direct, ExponentEstimate, Horizon,
    InvasionScenario, Remainder,
};
use permachk::orbit::Stepper;
use permachk::tail::{DEFAULT_BURN_IN, DEFAULT_HORIZON, DEFAULT_WINDOW};
use permachk::verifier::{cross_validate, empirical_verify, Consistency, ConsistencyReport, Spacing, SweepGrid, SweepResult};
use permachk::{Axis, GrowthModel, ModelConfig};

mod output;

use output::{float, float_or_blank, json_document, write_atomic, AtomicWriter, Provenance};

const MAX_STEPS: usize = 100_000_000;
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Parser)]
#[command(name = "permachk", version, about = "Permanence analysis for two-species discrete-time maps")]
struct Cli {
    /// Worker threads (defaults to available parallelism)
    #[arg(long, global = true, env = "PERMACHK_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate one orbit and write t,x,y,F,G as CSV
    Simulate(SimulateArgs),
    /// Check the sufficient conditions for permanence (exit 0 permanent, 2 not established)
    Check(CheckArgs),
    /// Estimate the external Lyapunov exponent of the missing species along an axis
    Invade(InvadeArgs),
    /// Sweep interior initial conditions and record tail extrema
    Verify(VerifyArgs),
    /// Verdict and persistence over a grid of one or two parameters
    Scan(ScanArgs),
}

#[derive(Args)]
struct ModelArg {
    /// Model configuration (JSON)
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArg,
    /// Initial condition `x,y`
    #[arg(long, value_parser = parse_pair)]
    ic: (f64, f64),
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    /// Output CSV (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Auto,
    General,
    Predprey,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Auto,
    Point,
    Integral,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,
    #[arg(long, value_enum, default_value = "auto")]
    variant: VariantArg,
    /// Output JSON verdict
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CheckArgs {
    fn options(&self) -> CheckOptions {
        check_options(self.route, self.variant)
    }
}

fn check_options(route: RouteArg, variant: VariantArg) -> CheckOptions {
    CheckOptions {
        route: match route {
            RouteArg::Auto => RouteChoice::Auto,
            RouteArg::General => RouteChoice::General,
            RouteArg::Predprey => RouteChoice::PredPrey,
        },
        variant: match variant {
            VariantArg::Auto => VariantChoice::Auto,
            VariantArg::Point => VariantChoice::Point,
            VariantArg::Integral => VariantChoice::Integral,
        },
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Direct,
    Decomp,
    Both,
}

#[derive(Args)]
struct InvadeArgs {
    #[command(flatten)]
    model: ModelArg,
    /// Axis the resident lives on
    #[arg(long)]
    axis: Axis,
    /// Resident initial density
    #[arg(long)]
    ic: f64,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    burn_in: usize,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    #[arg(long, value_enum, default_value = "both")]
    method: MethodArg,
    /// Expansion point for the decomposition (default: first usable boundary
    /// fixed point, else the origin)
    #[arg(long)]
    expansion_point: Option<f64>,
    /// Also classify the invasion outcome over these resident densities
    #[arg(long, value_delimiter = ',')]
    classify: Vec<f64>,
    /// Output JSON report
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpacingArg {
    Log,
    Linear,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Log => Spacing::Log,
            SpacingArg::Linear => Spacing::Linear,
        }
    }
}

#[derive(Args, Clone)]
struct SweepArgs {
    /// Grid size `nx,ny`
    #[arg(long, value_parser = parse_counts, default_value = "20,20")]
    grid: (usize, usize),
    /// Ranges `xmin:xmax,ymin:ymax`
    #[arg(long, value_parser = parse_ranges, default_value = "1e-3:3,1e-3:3")]
    range: ((f64, f64), (f64, f64)),
    #[arg(long, value_enum, default_value = "log")]
    spacing: SpacingArg,
    #[arg(long, default_value_t = permachk::verifier::DEFAULT_HORIZON)]
    steps: usize,
    #[arg(long, default_value_t = permachk::verifier::DEFAULT_BURN_IN)]
    burn_in: usize,
}

impl SweepArgs {
    fn grid(&self) -> Result<SweepGrid> {
        let (nx, ny) = self.grid;
        ensure!(
            nx.checked_mul(ny).is_some_and(|n| n <= MAX_GRID_POINTS),
            "grid {nx}x{ny} exceeds {MAX_GRID_POINTS} points"
        );
        check_steps(self.steps)?;
        Ok(SweepGrid {
            nx,
            ny,
            x_range: self.range.0,
            y_range: self.range.1,
            spacing: self.spacing.into(),
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArg,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Also run the checker and compare (exit 3 on a contradiction)
    #[arg(long)]
    cross_validate: bool,
    /// Output CSV of per-point tail extrema
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output JSON summary
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArg,
    /// Parameter range `name=lo:hi:n`; give once or twice
    #[arg(long = "param", value_parser = parse_param_range, required = true)]
    params: Vec<ParamRange>,
    /// Spacing of the parameter values
    #[arg(long, value_enum, default_value = "linear")]
    param_spacing: SpacingArg,
    #[arg(long, value_enum, default_value = "auto")]
    route: RouteArg,
    #[arg(long, value_enum, default_value = "auto")]
    variant: VariantArg,
    /// Skip the empirical sweep at each point
    #[arg(long)]
    no_sweep: bool,
    #[command(flatten)]
    sweep: SweepArgs,
    /// Output CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
struct ParamRange {
    name: String,
    lo: f64,
    hi: f64,
    n: usize,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}"))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    Ok((parse_f64(a)?, parse_f64(b)?))
}

fn parse_counts(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `nx,ny`, got `{s}`"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((n(a)?, n(b)?))
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected `lo:hi`, got `{s}`"))?;
    Ok((parse_f64(a)?, parse_f64(b)?))
}

fn parse_ranges(s: &str) -> Result<((f64, f64), (f64, f64)), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `xmin:xmax,ymin:ymax`, got `{s}`"))?;
    Ok((parse_interval(a)?, parse_interval(b)?))
}

fn parse_param_range(s: &str) -> Result<ParamRange, String> {
    let (name, rest) = s.split_once('=').ok_or_else(|| format!("expected `name=lo:hi:n`, got `{s}`"))?;
    let parts: Vec<&str> = rest.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected `name=lo:hi:n`, got `{s}`"));
    };
    Ok(ParamRange {
        name: name.trim().to_string(),
        lo: parse_f64(lo)?,
        hi: parse_f64(hi)?,
        n: n.trim().parse().map_err(|e| format!("`{n}`: {e}"))?,
    })
}

fn check_steps(steps: usize) -> Result<()> {
    ensure!(steps >= 1 && steps <= MAX_STEPS, "steps must lie in [1, {MAX_STEPS}], got {steps}");
    Ok(())
}

fn load_config(path: &Path) -> Result<ModelConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = ModelConfig::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
    config.build().with_context(|| format!("building model from {}", path.display()))?;
    Ok(config)
}

/// Writes to the file atomically, or to stdout without a path.
fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, bytes),
        None => {
            io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn write_orbit(w: &mut dyn Write, prov: &Provenance<'_>, stepper: &mut Stepper<'_>, steps: usize) -> Result<()> {
    let row = |w: &mut dyn Write, t: usize, s: &Stepper<'_>| -> io::Result<()> {
        let st = s.state();
        let (f, g) = s.rates();
        writeln!(w, "{t},{},{},{},{}", float(st.x), float(st.y), float_or_blank(f), float_or_blank(g))
    };
    w.write_all(prov.csv_header().as_bytes())?;
    writeln!(w, "t,x,y,F,G")?;
    row(w, 0, stepper)?;
    for t in 1..=steps {
        stepper.step()?;
        row(w, t, stepper)?;
    }
    w.flush()?;
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    check_steps(args.steps)?;
    let config = load_config(&args.model.model)?;
    let model = config.build()?;
    let prov = Provenance::new("simulate", &config)?;
    let (x0, y0) = args.ic;
    let mut stepper = Stepper::new(&model, x0, y0)?;
    match &args.out {
        Some(p) => {
            let mut w = AtomicWriter::create(p)?;
            write_orbit(&mut w, &prov, &mut stepper, args.steps)?;
            w.commit()?;
        }
        None => write_orbit(&mut io::BufWriter::new(io::stdout().lock()), &prov, &mut stepper, args.steps)?,
    }
    let last = stepper.state();
    eprintln!("simulated {} steps from ({x0}, {y0}); final ({}, {})", args.steps, last.x, last.y);
    Ok(ExitCode::SUCCESS)
}

fn check(args: &CheckArgs) -> Result<ExitCode> {
    let config = load_config(&args.model.model)?;
    let model = config.build()?;
    let verdict = check_builtin(&model, args.options());
    let prov = Provenance::new("check", &config)?;
    emit(args.out.as_deref(), &json_document(&prov, &verdict)?)?;
    let blocking: Vec<String> = verdict.blocking.iter().map(ToString::to_string).collect();
    eprintln!(
        "{}: {:?} via {:?}{}",
        verdict.model_id,
        verdict.conclusion,
        verdict.basis,
        if blocking.is_empty() {
            String::new()
        } else {
            format!(" (blocking: {})", blocking.join(", "))
        }
    );
    Ok(if verdict.is_permanent() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

#[derive(Serialize)]
struct InvasionReport {
    estimates: Vec<ExponentEstimate>,
    errors: Vec<String>,
    classification: Option<InvasionScenario>,
}

fn default_expansion_point(model: &dyn GrowthModel, axis: Axis) -> f64 {
    boundary_fixed_points(model, axis)
        .into_iter()
        .map(|p| p.coordinate)
        .find(|&s| Remainder::new(model, axis, s).is_ok())
        .unwrap_or(0.0)
}

fn invade(args: &InvadeArgs) -> Result<ExitCode> {
    check_steps(args.steps)?;
    let config = load_config(&args.model.model)?;
    let model = config.build()?;
    let h = Horizon {
        n: args.steps,
        burn_in: args.burn_in,
        window: args.window,
    };
    let mut report = InvasionReport {
        estimates: Vec::new(),
        errors: Vec::new(),
        classification: None,
    };
    if args.method != MethodArg::Decomp {
        report.estimates.push(external_exponent_direct(&model, args.axis, args.ic, h)?);
    }
    if args.method != MethodArg::Direct {
        let s_star = args
            .expansion_point
            .unwrap_or_else(|| default_expansion_point(&model, args.axis));
        match external_exponent_decomposed(&model, args.axis, s_star, args.ic, h) {
            Ok(e) => report.estimates.push(e),
            // an inapplicable decomposition is reported, not fatal, next to a direct estimate
            Err(e) if args.method == MethodArg::Both => report.errors.push(format!("decomposition at {s_star}: {e}")),
            Err(e) => return Err(e.into()),
        }
    }
    if !args.classify.is_empty() {
        report.classification = Some(classify_invasion(&model, args.axis, &args.classify, h)?);
    }
    let prov = Provenance::new("invade", &config)?;
    emit(args.out.as_deref(), &json_document(&prov, &report)?)?;
    for e in &report.estimates {
        eprintln!(
            "{:?} exponent along {} from {}: {}{}",
            e.method,
            e.axis,
            e.initial,
            e.value,
            if e.is_lower_bound { " (lower bound)" } else { "" }
        );
    }
    for e in &report.errors {
        eprintln!("{e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_csv(prov: &Provenance<'_>, sweep: &SweepResult) -> Vec<u8> {
    let mut out = prov.csv_header();
    out.push_str("x0,y0,tail_min,tail_max,divergent\n");
    for p in &sweep.points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            float(p.x0),
            float(p.y0),
            float(p.tail_min),
            float(p.tail_max),
            p.divergent
        ));
    }
    out.into_bytes()
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    grid: String,
    horizon: usize,
    burn_in: usize,
    extinction_threshold: f64,
    b_hat: f64,
    #[serde(rename = "B_hat")]
    big_b_hat: f64,
    persistent: bool,
    divergent: usize,
    cross_validation: Option<&'a ConsistencyReport>,
}

fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    let grid = args.sweep.grid()?;
    let config = load_config(&args.model.model)?;
    let model = config.build()?;
    let sweep = empirical_verify(&model, grid, args.sweep.steps, args.sweep.burn_in)?;
    let consistency = args
        .cross_validate
        .then(|| cross_validate(&check_builtin(&model, CheckOptions::default()), &sweep));
    let prov = Provenance::new("verify", &config)?;
    emit(args.out.as_deref(), &sweep_csv(&prov, &sweep))?;
    if let Some(path) = &args.summary {
        let summary = VerifySummary {
            grid: sweep.grid.to_string(),
            horizon: sweep.horizon,
            burn_in: sweep.burn_in,
            extinction_threshold: sweep.extinction_threshold,
            b_hat: sweep.b_hat,
            big_b_hat: sweep.big_b_hat,
            persistent: sweep.persistent,
            divergent: sweep.divergent,
            cross_validation: consistency.as_ref(),
        };
        write_atomic(path, &json_document(&prov, &summary)?)?;
    }
    eprintln!(
        "persistent: {} (b_hat {:e}, B_hat {:e}, {} divergent)",
        sweep.persistent, sweep.b_hat, sweep.big_b_hat, sweep.divergent
    );
    if let Some(c) = &consistency {
        eprintln!("{}{}", c.status, c.note.as_deref().map(|n| format!(": {n}")).unwrap_or_default());
        if c.status == Consistency::Contradiction {
            return Ok(ExitCode::from(3));
        }
    }
    Ok(ExitCode::SUCCESS)
}

const SCAN_CONDITIONS: [ConditionId; 12] = [
    ConditionId::H,
    ConditionId::G1,
    ConditionId::G2,
    ConditionId::G3,
    ConditionId::G3Integral,
    ConditionId::G4,
    ConditionId::G4Integral,
    ConditionId::P1,
    ConditionId::P2,
    ConditionId::P3,
    ConditionId::P4,
    ConditionId::P4Integral,
];

fn scan_row(verdict: &PermanenceVerdict, sweep: Option<&SweepResult>) -> String {
    let blocking: Vec<String> = verdict.blocking.iter().map(ToString::to_string).collect();
    let mut cells = vec![
        format!("{:?}", verdict.conclusion),
        format!("{:?}", verdict.basis),
        blocking.join(";"),
    ];
    cells.extend(
        SCAN_CONDITIONS
            .iter()
            .map(|&id| verdict.entry(id).map(|e| e.verdict.to_string()).unwrap_or_default()),
    );
    match sweep {
        Some(s) => {
            cells.push(s.persistent.to_string());
            cells.push(float(s.b_hat));
            cells.push(float(s.big_b_hat));
            cells.push(cross_validate(verdict, s).status.to_string());
        }
        None => cells.extend(std::iter::repeat_n(String::new(), 4)),
    }
    cells.join(",")
}

fn scan(args: &ScanArgs) -> Result<ExitCode> {
    ensure!(args.params.len() <= 2, "scan takes one or two --param ranges");
    let config = load_config(&args.model.model)?;
    let grid = args.sweep.grid()?;
    let spacing: Spacing = args.param_spacing.into();
    let mut axes = Vec::new();
    for p in &args.params {
        ensure!(p.n >= 1, "parameter `{}` needs at least one value", p.name);
        config.with_param(&p.name, p.lo)?;
        let values = match spacing {
            Spacing::Linear => permachk::grid::linear(p.lo, p.hi, p.n),
            Spacing::Log => {
                ensure!(p.lo > 0.0 && p.hi >= p.lo, "log spacing of `{}` needs 0 < lo <= hi", p.name);
                permachk::grid::geometric(p.lo, p.hi, p.n)
            }
        };
        axes.push(values);
    }
    let total = axes.iter().try_fold(1usize, |acc, a| acc.checked_mul(a.len()));
    ensure!(
        total.is_some_and(|n| n <= MAX_GRID_POINTS),
        "scan exceeds {MAX_GRID_POINTS} points"
    );
    let points: Vec<Vec<f64>> = match axes.as_slice() {
        [a] => a.iter().map(|&v| vec![v]).collect(),
        [a, b] => a.iter().flat_map(|&u| b.iter().map(move |&v| vec![u, v])).collect(),
        _ => bail!("scan takes one or two --param ranges"),
    };
    let options = check_options(args.route, args.variant);
    let rows = points
        .par_iter()
        .map(|values| -> Result<String> {
            let mut cfg = config.clone();
            for (p, &v) in args.params.iter().zip(values) {
                cfg = cfg.with_param(&p.name, v)?;
            }
            let model = cfg.build()?;
            let verdict = check_builtin(&model, options);
            let sweep = if args.no_sweep {
                None
            } else {
                Some(empirical_verify(&model, grid, args.sweep.steps, args.sweep.burn_in)?)
            };
            let lead: Vec<String> = values.iter().map(|&v| float(v)).collect();
            Ok(format!("{},{}", lead.join(","), scan_row(&verdict, sweep.as_ref())))
        })
        .collect::<Result<Vec<_>>>()?;

    let prov = Provenance::new("scan", &config)?;
    let mut out = prov.csv_header();
    let mut header: Vec<String> = args.params.iter().map(|p| p.name.clone()).collect();
    header.extend(["conclusion", "basis", "blocking"].map(String::from));
    header.extend(SCAN_CONDITIONS.iter().map(ToString::to_string));
    header.extend(["persistent", "b_hat", "B_hat", "consistency"].map(String::from));
    out.push_str(&header.join(","));
    out.push('\n');
    for r in &rows {
        out.push_str(r);
        out.push('\n');
    }
    emit(args.out.as_deref(), out.as_bytes())?;
    let contradictions = rows.iter().filter(|r| r.ends_with("CONTRADICTION")).count();
    eprintln!("scanned {} points; {contradictions} contradictions", rows.len());
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    if let Some(jobs) = cli.jobs {
        ensure!(jobs >= 1, "--jobs must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Check(a) => check(a),
        Command::Invade(a) => invade(a),
        Command::Verify(a) => verify(a),
        Command::Scan(a) => scan(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

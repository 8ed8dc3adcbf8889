use std::cmp::Ordering;

use clap::Args;
use lattice_flow::closed_form::closed_form_velocity;
use lattice_flow::flow::{brute_force_auto, run_flow, FlowConfig, FlowRun, StepMode, TieBreak};
use lattice_flow::limit_motion::{integrate, RectState};
use lattice_flow::orbit::{component_midpoints, effective_velocity, homogeneous_velocity, is_singular, run_orbit};
use lattice_flow::validation::{run_suite, Suite, ValidateOptions};
use lattice_flow::{AlphaRectangle, CellRect, Error, MediumSpec, Rational};
use serde_json::json;

use crate::grid::parse_grid;
use crate::output::Sink;
use crate::{parse_rational, CliError, CliResult, Format, MediumArgs, ModeArg, OutputArgs};

fn manifest(command: &str, spec: &MediumSpec, extra: serde_json::Value) -> serde_json::Value {
    let mut m = json!({ "command": command, "medium": spec });
    if let (Some(m), serde_json::Value::Object(extra)) = (m.as_object_mut(), extra) {
        m.extend(extra);
    }
    m
}

fn opt_string<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("ys").required(true).args(["y", "y_grid", "midpoints"])))]
pub struct VelocityTableArgs {
    #[command(flatten)]
    medium: MediumArgs,
    /// A single Y.
    #[arg(long, value_parser = parse_rational)]
    y: Option<Rational>,
    /// Grid `start:end:step`, endpoints included.
    #[arg(long)]
    y_grid: Option<String>,
    /// Midpoints of the regular components of width 1/(4α) in (0, YMAX].
    #[arg(long, value_name = "YMAX", value_parser = parse_rational)]
    midpoints: Option<Rational>,
    #[command(flatten)]
    out: OutputArgs,
}

const VELOCITY_HEADER: [&str; 8] = ["y", "f", "f_minus", "f_plus", "singular", "case", "homogeneous", "trend"];

pub fn velocity_table(args: &VelocityTableArgs) -> CliResult<()> {
    let spec = args.medium.spec()?;
    let ys = match (&args.y, &args.y_grid, &args.midpoints) {
        (Some(y), _, _) => vec![y.clone()],
        (_, Some(grid), _) => parse_grid(grid)?,
        (_, _, Some(y_max)) => component_midpoints(spec.alpha(), y_max),
        _ => unreachable!("clap requires one of the inputs"),
    };
    let mut rows = Vec::with_capacity(ys.len());
    let mut entries = Vec::with_capacity(ys.len());
    for y in &ys {
        let v = effective_velocity(&spec, y)?;
        let case = if matches!(spec.n_beta(), 1 | 2) && !v.singular {
            Some(closed_form_velocity(&spec, y)?.tag.label)
        } else {
            None
        };
        let hom = homogeneous_velocity(spec.alpha(), y);
        let trend = v.value.as_ref().map(|f| match f.cmp(&hom) {
            Ordering::Greater => "accel",
            Ordering::Less => "decel",
            Ordering::Equal => "equal",
        });
        rows.push(vec![
            y.to_string(),
            opt_string(&v.value),
            v.lower.to_string(),
            v.upper.to_string(),
            v.singular.to_string(),
            opt_string(&case),
            hom.to_string(),
            trend.unwrap_or_default().to_string(),
        ]);
        entries.push(json!({
            "y": y, "f": v.value, "f_minus": v.lower, "f_plus": v.upper, "singular": v.singular,
            "case": case, "homogeneous": hom, "trend": trend,
            "period_steps": v.period_steps, "period_turns": v.period_turns,
        }));
    }
    let sink = Sink::open(&args.out)?;
    match args.out.format {
        Format::Csv => sink.csv(&VELOCITY_HEADER, &rows),
        Format::Json => {
            let m = manifest("velocity-table", &spec, json!({ "ys": ys }));
            sink.json(&json!({ "manifest": m, "rows": entries }))
        }
    }
}

#[derive(Args, Debug)]
pub struct OrbitArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[arg(long, value_parser = parse_rational)]
    y: Rational,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    x0: i64,
    /// Rows to emit, continuing the orbit periodically; defaults to the
    /// trace up to the first repeated residue.
    #[arg(long)]
    steps: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn orbit(args: &OrbitArgs) -> CliResult<()> {
    let spec = args.medium.spec()?;
    let m = manifest("orbit", &spec, json!({ "y": args.y, "x0": args.x0, "steps": args.steps }));
    let sink = Sink::open(&args.out)?;
    if is_singular(&spec, &args.y) {
        let v = effective_velocity(&spec, &args.y)?;
        eprintln!("singular y = {}: f in [{}, {}]", args.y, v.lower, v.upper);
        return match args.out.format {
            Format::Csv => sink.csv(
                &["y", "singular", "f_minus", "f_plus"],
                &[vec![args.y.to_string(), "true".into(), v.lower.to_string(), v.upper.to_string()]],
            ),
            Format::Json => sink.json(&json!({
                "manifest": m,
                "result": { "singular": true, "f_minus": v.lower, "f_plus": v.upper },
            })),
        };
    }
    let trace = run_orbit(&spec, &args.y, args.x0)?;
    let n = trace.period_turns(&spec);
    let rows_len = args.steps.map_or(trace.positions.len(), |s| s + 1);
    let period = spec.period();
    let rows: Vec<Vec<String>> = (0..rows_len)
        .map(|k| {
            let x = trace.position(k);
            let step = if k + 1 < rows_len { trace.step(k).to_string() } else { String::new() };
            vec![k.to_string(), x.to_string(), step, x.rem_euclid(period).to_string()]
        })
        .collect();
    eprintln!(
        "pre_period={} M={} n={} velocity={}",
        trace.pre_period,
        trace.period_steps,
        n,
        trace.velocity()
    );
    match args.out.format {
        Format::Csv => sink.csv(&["k", "position", "step", "residue"], &rows),
        Format::Json => sink.json(&json!({
            "manifest": m,
            "result": {
                "singular": false,
                "trace": trace,
                "period_turns": n,
                "velocity": trace.velocity(),
            },
        })),
    }
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[arg(long, value_parser = parse_rational)]
    l1: Rational,
    #[arg(long, value_parser = parse_rational)]
    l2: Rational,
    #[arg(long, value_parser = parse_rational)]
    gamma: Rational,
    #[arg(long, value_parser = parse_rational)]
    t_max: Rational,
    #[command(flatten)]
    out: OutputArgs,
}

pub fn evolve(args: &EvolveArgs) -> CliResult<()> {
    let spec = args.medium.spec()?;
    let traj = integrate(&spec, &args.gamma, &RectState::new(args.l1.clone(), args.l2.clone()), &args.t_max)?;
    let ext = traj.extinction_time.as_ref();
    eprintln!(
        "regime={} stop={} extinction={}",
        traj.regime,
        serde_json::to_value(traj.stop).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        // the exact bracket can have huge denominators; the JSON output keeps it
        ext.map_or("none".to_string(), |(lo, hi)| format!("[{:.9}, {:.9}]", lo.approx_f64(), hi.approx_f64())),
    );
    let sink = Sink::open(&args.out)?;
    match args.out.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = traj
                .segments
                .iter()
                .map(|s| {
                    [&s.t_start, &s.t_end, &s.l1_start, &s.l2_start, &s.slope1, &s.slope2, &s.l1_end(), &s.l2_end()]
                        .iter()
                        .map(|q| q.to_string())
                        .collect()
                })
                .collect();
            sink.csv(&["t_start", "t_end", "l1_start", "l2_start", "slope1", "slope2", "l1_end", "l2_end"], &rows)
        }
        Format::Json => {
            let m = manifest(
                "evolve",
                &spec,
                json!({ "l1": args.l1, "l2": args.l2, "gamma": args.gamma, "t_max": args.t_max }),
            );
            sink.json(&json!({ "manifest": m, "result": traj }))
        }
    }
}

fn parse_rect(s: &str) -> Result<CellRect, String> {
    let parts: Vec<i64> = s
        .split(':')
        .map(|p| p.trim().parse::<i64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [x_min, x_max, y_min, y_max] = parts[..] else {
        return Err(format!("expected x_min:x_max:y_min:y_max, got {s:?}"));
    };
    CellRect::new(x_min, x_max, y_min, y_max).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("initial").required(true).args(["side", "rect"])))]
pub struct SimulateArgs {
    #[command(flatten)]
    medium: MediumArgs,
    #[arg(long, value_parser = parse_rational)]
    gamma: Rational,
    #[arg(long, value_parser = parse_rational)]
    epsilon: Rational,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value = "per-side")]
    mode: ModeArg,
    /// Start from the smallest α-type square at the origin with at least K cells per side.
    #[arg(long, value_name = "K")]
    side: Option<i64>,
    /// Start from the cell rectangle `x_min:x_max:y_min:y_max`.
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    rect: Option<CellRect>,
    /// Stop once a side has fewer cells than this.
    #[arg(long, default_value_t = FlowConfig::DEFAULT_FLOOR)]
    floor: i64,
    /// Recompute every step by brute force over rectangles and report agreement.
    #[arg(long)]
    cross_check: bool,
    #[command(flatten)]
    out: OutputArgs,
}

fn cross_check(config: &FlowConfig, run: &FlowRun) -> CliResult<Vec<String>> {
    let mut out = vec![String::new()];
    for pair in run.rects.windows(2) {
        let verdict = match brute_force_auto(config, &pair[0], TieBreak::SmallestMeasure) {
            Ok(b) if b.next == pair[1] => "agree".to_string(),
            Ok(b) => format!("differ:{}", pair[0].displacements_to(&b.next).map(|d| d.to_string()).join(" ")),
            Err(Error::BelowFloor(_)) => "below-floor".to_string(),
            Err(e) => return Err(e.into()),
        };
        out.push(verdict);
    }
    // an extinct per-side step leaves no rectangle to compare against
    out.resize(run.records.len(), String::new());
    Ok(out)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let spec = args.medium.spec()?;
    let initial = match (args.side, args.rect) {
        (Some(k), _) => AlphaRectangle::square_at_least(&spec, 0, k)?,
        (_, Some(r)) => AlphaRectangle::new(&spec, r)?,
        _ => unreachable!("clap requires one of the inputs"),
    };
    let mode = match args.mode {
        ModeArg::PerSide => StepMode::PerSide,
        ModeArg::Brute => StepMode::BruteForce,
    };
    let config = FlowConfig::new(spec.clone(), args.gamma.clone(), args.epsilon.clone(), initial, args.steps, mode)?
        .with_floor(args.floor);
    let run = run_flow(&config)?;
    let checks = if args.cross_check { cross_check(&config, &run)? } else { vec![String::new(); run.records.len()] };
    let stop = serde_json::to_value(run.stop).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    match &run.diagnostic {
        Some(d) => eprintln!("stop={stop} steps={} ({d})", run.records.len() - 1),
        None => eprintln!("stop={stop} steps={}", run.records.len() - 1),
    }
    let sink = Sink::open(&args.out)?;
    match args.out.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = run
                .records
                .iter()
                .zip(&checks)
                .map(|(r, c)| {
                    let mut row = vec![r.step.to_string()];
                    row.extend([r.rect.x_min, r.rect.x_max, r.rect.y_min, r.rect.y_max].map(|v| v.to_string()));
                    row.extend(r.displacements.map(|d| d.to_string()));
                    row.extend([r.perimeter_energy.to_string(), r.dissipation.to_string(), c.clone()]);
                    row
                })
                .collect();
            sink.csv(
                &[
                    "step", "x_min", "x_max", "y_min", "y_max", "d_left", "d_right", "d_bottom", "d_top", "perimeter",
                    "dissipation", "cross_check",
                ],
                &rows,
            )
        }
        Format::Json => {
            let m = manifest(
                "simulate",
                &spec,
                json!({
                    "gamma": args.gamma, "epsilon": args.epsilon, "steps": args.steps, "mode": mode,
                    "initial": initial, "floor": args.floor, "cross_check": args.cross_check,
                }),
            );
            let checks: Vec<Option<&String>> = checks.iter().map(|c| (!c.is_empty()).then_some(c)).collect();
            sink.json(&json!({
                "manifest": m,
                "result": { "records": run.records, "stop": run.stop, "diagnostic": run.diagnostic, "cross_check": checks },
            }))
        }
    }
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    /// Comma-separated suites; an empty list runs nothing. Defaults to every
    /// suite except `consistency`.
    #[arg(long)]
    suites: Option<String>,
    #[arg(long, default_value_t = ValidateOptions::default().max_n_alpha)]
    max_n_alpha: i64,
    #[arg(long, default_value_t = ValidateOptions::default().seed)]
    seed: u64,
    #[arg(long, hide = true)]
    inject_mismatch: bool,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_suites(list: &Option<String>) -> CliResult<Vec<Suite>> {
    match list {
        None => Ok(Suite::DEFAULT.to_vec()),
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Suite>().map_err(CliError::from))
            .collect(),
    }
}

pub fn validate(args: &ValidateArgs) -> CliResult<()> {
    let suites = parse_suites(&args.suites)?;
    if args.max_n_alpha < 1 {
        return Err(CliError::Usage(format!("--max-n-alpha must be at least 1, got {}", args.max_n_alpha)));
    }
    let opts = ValidateOptions { max_n_alpha: args.max_n_alpha, seed: args.seed, inject_mismatch: args.inject_mismatch };
    let mut reports = Vec::with_capacity(suites.len());
    for suite in suites {
        let report = run_suite(suite, &opts)?;
        let status = if report.passed() { "PASS" } else { "FAIL" };
        eprintln!("{status} {suite} ({} checks, {} failures)", report.checks, report.failures.len());
        for f in report.failures.iter().take(10) {
            eprintln!("    {f}");
        }
        reports.push(report);
    }
    let ok = reports.iter().all(|r| r.passed());
    let sink = Sink::open(&args.out)?;
    match args.out.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.suite.to_string(),
                        r.checks.to_string(),
                        r.failures.len().to_string(),
                        if r.passed() { "PASS" } else { "FAIL" }.to_string(),
                    ]
                })
                .collect();
            sink.csv(&["suite", "checks", "failures", "status"], &rows)?;
        }
        Format::Json => {
            let m = json!({
                "command": "validate", "suites": reports.iter().map(|r| r.suite).collect::<Vec<_>>(),
                "max_n_alpha": args.max_n_alpha, "seed": args.seed, "inject_mismatch": args.inject_mismatch,
            });
            sink.json(&json!({ "manifest": m, "passed": ok, "reports": reports }))?;
        }
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::ValidationFailed)
    }
}

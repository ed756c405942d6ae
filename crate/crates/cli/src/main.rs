//! Command-line front end: angle inspection, kneading sequences, lamination
//! classes, ray traces, verification pipelines, and figure rendering.
//!
//! Exit codes: 0 success (all verdicts pass), 1 any fail verdict, 2 any
//! inconclusive verdict, 64 usage error, 70 computation failure.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use raylam_core::circle::{parse_angle, Angle};
use raylam_core::dynamics::Parameter;
use raylam_core::lamination::{
    characteristic_class, class_from_word, critical_class, ClassRole, LaminationClass,
    PullbackOptions,
};
use raylam_core::ray::{
    trace_dynamical_ray, trace_param_ray, PotentialSchedule, RayTraceResult, TraceOptions,
};
use raylam_core::render::{
    render_chords, render_plane, ChordDiagram, Overlay, Palette, Plane, Raster, RenderSpec,
    Viewport,
};
use raylam_core::symbolic::{
    kneading, rational_orbit_kind, rational_orbit_profile, refute_periods,
};
use raylam_core::verify::{
    batch, verify_converse, verify_forward_spec, BatchConfig, Verdict, VerifyConfig,
};

const EXIT_USAGE: i32 = 64;
const EXIT_SOFTWARE: i32 = 70;

#[derive(Parser)]
#[command(
    name = "raylam",
    version,
    about = "Angle-doubling combinatorics and ray tracing for z^2 + c"
)]
struct Cli {
    /// Emit machine-readable JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for all randomized inputs (converse control angles).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config file with [defaults] (verification knobs) and [render].
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect an angle: value, binary expansion, orbit shape.
    Angle {
        #[command(subcommand)]
        sub: AngleCmd,
    },
    /// Kneading sequence of an angle with period refutation.
    Kneading {
        spec: String,
        #[arg(long, default_value_t = 32)]
        depth: usize,
        #[arg(long)]
        refute_max: Option<usize>,
    },
    /// Lamination classes of an angle by arc pullback.
    Lamination {
        spec: String,
        #[arg(long, default_value_t = 48)]
        depth: usize,
        /// Also compute this many forward-image classes.
        #[arg(long, default_value_t = 2)]
        forward: usize,
        /// Write a chord-diagram SVG here.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Trace external or parameter rays.
    Trace {
        #[command(subcommand)]
        sub: TraceCmd,
    },
    /// Theorem verification pipelines.
    Verify {
        #[command(subcommand)]
        sub: VerifyCmd,
    },
    /// Figure rendering.
    Render {
        #[command(subcommand)]
        sub: RenderCmd,
    },
}

#[derive(Subcommand)]
enum AngleCmd {
    /// Print value, expansion, and doubling-orbit shape.
    Info {
        spec: String,
        #[arg(long, default_value_t = 32)]
        bits: usize,
    },
}

#[derive(Args)]
struct TraceArgs {
    /// Starting potential (linear scale).
    #[arg(long)]
    g_start: Option<f64>,
    /// Continuation steps per halving of the potential.
    #[arg(long)]
    subdiv: Option<u32>,
    /// Stop potential, linear scale (must be positive).
    #[arg(long)]
    floor: Option<f64>,
    /// Stop potential as log2 G (reaches far below f64 range).
    #[arg(long)]
    floor_log2: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
    #[arg(long)]
    newton_tol: Option<f64>,
    /// Dump accepted samples as CSV (log2_potential,re,im,residual,newton_iters).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TraceCmd {
    /// Parameter ray at an angle.
    ParamRay {
        spec: String,
        #[command(flatten)]
        args: TraceArgs,
    },
    /// External ray at an angle in the dynamical plane of f_c.
    DynRay {
        spec: String,
        /// Parameter as "re,im".
        #[arg(long, short = 'c')]
        c: String,
        #[command(flatten)]
        args: TraceArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Forward direction: ray of a non-recurrent angle lands non-recurrently.
    Forward {
        #[arg(long)]
        angle: String,
    },
    /// Converse direction: characteristic angles of a parameter.
    Converse {
        /// Parameter as "re,im".
        #[arg(long, short = 'c')]
        c: String,
        /// Comma-separated candidate angle specs.
        #[arg(long, value_delimiter = ',')]
        candidates: Vec<String>,
    },
    /// Forward runs (optionally chained converses) from a batch file.
    Batch {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RasterArgs {
    /// View center as "re,im".
    #[arg(long)]
    center: Option<String>,
    /// Real-axis width of the view.
    #[arg(long)]
    width: Option<f64>,
    /// Pixels along each axis.
    #[arg(long, default_value_t = 512)]
    px: usize,
    #[arg(long, default_value_t = 512)]
    max_iter: usize,
    #[arg(long)]
    palette: Option<String>,
    /// Overlay the ray at this angle (repeatable).
    #[arg(long = "ray")]
    rays: Vec<String>,
    #[arg(long)]
    floor_log2: Option<f64>,
    /// Output path; .png uses the PNG encoder, anything else gets binary PPM.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum RenderCmd {
    /// Escape-time view of the parameter plane.
    Mandelbrot {
        #[command(flatten)]
        args: RasterArgs,
    },
    /// Escape-time view of the dynamical plane of f_c.
    Julia {
        /// Parameter as "re,im".
        #[arg(long, short = 'c')]
        c: String,
        #[command(flatten)]
        args: RasterArgs,
    },
    /// Chord diagram of lamination classes.
    Chords {
        spec: String,
        #[arg(long, default_value_t = 48)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        forward: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Optional file configuration: verification defaults plus render styling.
#[derive(Default, serde::Deserialize)]
struct FileConfig {
    #[serde(default)]
    defaults: Option<VerifyConfig>,
    #[serde(default)]
    render: Option<RenderFileConfig>,
}

#[derive(Default, serde::Deserialize)]
struct RenderFileConfig {
    palette: Option<String>,
}

fn parse_complex(s: &str) -> Result<Complex64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| anyhow!("expected re,im in {s:?}"))?;
    Ok(Complex64::new(
        re.trim().parse::<f64>().context("bad real part")?,
        im.trim().parse::<f64>().context("bad imaginary part")?,
    ))
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("bad config {}", p.display()))
        }
    }
}

fn effective_verify_config(cli_seed: Option<u64>, file: &FileConfig) -> VerifyConfig {
    let mut cfg = file.defaults.clone().unwrap_or_default();
    if let Some(seed) = cli_seed {
        cfg.control_seed = seed;
    }
    cfg
}

fn cmd_angle_info(spec: &str, bits: usize, json: bool) -> Result<i32> {
    let angle = parse_angle(spec)?;
    let exact = angle.exact().map(|v| format!("{}/{}", v.numer(), v.denom()));
    let orbit = rational_orbit_kind(&angle);
    let profile = rational_orbit_profile(&angle);
    let expansion = angle.bits_string(bits);
    if json {
        let payload = json!({
            "spec": spec,
            "exact": exact,
            "value": angle.to_f64(),
            "binary_prefix": expansion,
            "orbit_kind": orbit.map(|k| format!("{k:?}")),
            "preperiod": profile.map(|p| p.0),
            "period": profile.map(|p| p.1),
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        println!("angle      {spec}");
        match &exact {
            Some(e) => println!("value      {e} (~{:.12})", angle.to_f64()),
            None => println!(
                "value      ~{:.12} (no exact rational form)",
                angle.to_f64()
            ),
        }
        println!("binary     0.{expansion}…");
        match (orbit, profile) {
            (Some(kind), Some((pre, per))) => {
                println!("orbit      {kind:?}, preperiod {pre}, period {per}")
            }
            _ => println!("orbit      aperiodic under doubling (no rational collision)"),
        }
    }
    Ok(0)
}

fn cmd_kneading(spec: &str, depth: usize, refute_max: Option<usize>, json: bool) -> Result<i32> {
    let angle = parse_angle(spec)?;
    let prefix = kneading(&angle, depth, 64)?;
    let p_max = refute_max.unwrap_or(depth / 2).min(depth / 2);
    let refutation = refute_periods(&prefix.word.symbols, p_max)?;
    if json {
        let payload = json!({
            "spec": spec,
            "depth": depth,
            "word": prefix.word.as_string(),
            "plus_minus_disagreement": prefix.disagreement,
            "refute_max": refutation.p_max,
            "refuted_count": refutation.refuted.len(),
            "smallest_unrefuted": refutation.smallest_unrefuted,
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        println!("kneading({spec}) depth {depth}");
        println!("{}", prefix.word.as_string());
        match prefix.disagreement {
            Some(k) => println!("one-sided itineraries disagree at step {k}: angle is periodic"),
            None => println!("one-sided itineraries agree to this depth"),
        }
        println!(
            "periods refuted: {} of {} (smallest unrefuted: {})",
            refutation.refuted.len(),
            refutation.p_max,
            refutation
                .smallest_unrefuted
                .map(|p| p.to_string())
                .unwrap_or_else(|| "none".into())
        );
    }
    Ok(0)
}

fn compute_class_family(
    angle: &Angle,
    depth: usize,
    forward: usize,
) -> Result<Vec<LaminationClass>> {
    let opts = PullbackOptions::default();
    let a = characteristic_class(angle, depth, &opts)?;
    let mut family = Vec::new();
    let crit = critical_class(&a)?;
    family.push(a);
    family.push(crit);
    if forward > 0 {
        let word = kneading(angle, depth, 64)?.word.symbols;
        for k in 1..=forward {
            if word.len() > k + 2 {
                family.push(class_from_word(
                    &word[k..],
                    angle,
                    ClassRole::ForwardImage(k),
                    &opts,
                )?);
            }
        }
    }
    Ok(family)
}

fn class_json(c: &LaminationClass) -> serde_json::Value {
    json!({
        "role": format!("{:?}", c.role),
        "depth": c.depth,
        "converged": c.converged,
        "clusters": c.clusters.iter().map(|cl| json!({
            "binary_prefix": cl.dyadic.as_ref().map(|d| d.prefix_string()),
            "lo": format!("{}/{}", cl.lo.numer(), cl.lo.denom()),
            "width": format!("{}/{}", cl.width.numer(), cl.width.denom()),
            "exact_rational": cl.witness.as_ref().and_then(|w| w.exact())
                .map(|v| format!("{}/{}", v.numer(), v.denom())),
        })).collect::<Vec<_>>(),
    })
}

fn cmd_lamination(
    spec: &str,
    depth: usize,
    forward: usize,
    svg: Option<&Path>,
    json: bool,
) -> Result<i32> {
    let angle = parse_angle(spec)?;
    let family = compute_class_family(&angle, depth, forward)?;
    if let Some(path) = svg {
        let mut diagram = ChordDiagram::from_classes(&family);
        let (h0, h1) = angle.halves();
        diagram.cut_points = vec![h0.to_f64(), h1.to_f64()];
        fs::write(path, render_chords(&diagram))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if json {
        let payload = json!({
            "spec": spec,
            "depth": depth,
            "classes": family.iter().map(class_json).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        for c in &family {
            println!(
                "{:?}: {} cluster(s), depth {}, converged: {}",
                c.role,
                c.clusters.len(),
                c.depth,
                c.converged
            );
            for cl in &c.clusters {
                let tag = if cl.witness.is_some() {
                    " (contains base angle)"
                } else {
                    ""
                };
                match &cl.dyadic {
                    Some(d) => println!("  cluster in dyadic 0.{}{tag}", d.prefix_string()),
                    None => println!("  cluster{tag}"),
                }
            }
        }
        if let Some(path) = svg {
            println!("chord diagram written to {}", path.display());
        }
    }
    Ok(0)
}

fn build_schedule_opts(args: &TraceArgs) -> Result<(PotentialSchedule, TraceOptions)> {
    let mut sched = PotentialSchedule::default();
    if let Some(g) = args.g_start {
        sched.g_start = g;
    }
    if let Some(k) = args.subdiv {
        sched.subdivisions_per_halving = k;
    }
    if let Some(f) = args.floor {
        if !(f > 0.0) {
            bail!("--floor must be positive (use --floor-log2 for deep potentials)");
        }
        sched.floor_log2 = f.log2();
    }
    if let Some(fl) = args.floor_log2 {
        sched.floor_log2 = fl;
    }
    if let Some(m) = args.max_steps {
        sched.max_steps = m;
    }
    let mut opts = TraceOptions::default();
    if let Some(t) = args.newton_tol {
        opts.newton_tol = t;
    }
    Ok((sched, opts))
}

fn write_csv(path: &Path, trace: &RayTraceResult) -> Result<()> {
    let mut out = String::from("log2_potential,re,im,residual,newton_iters\n");
    for s in &trace.samples {
        out.push_str(&format!(
            "{:.9},{:.17e},{:.17e},{:.3e},{}\n",
            s.log2_potential, s.position.re, s.position.im, s.residual, s.newton_iters
        ));
    }
    fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn trace_report(kind: &str, spec: &str, trace: &RayTraceResult, json: bool) -> Result<i32> {
    if json {
        let payload = json!({
            "kind": kind,
            "angle": spec,
            "landing": {"re": trace.landing_estimate.re, "im": trace.landing_estimate.im},
            "tail_diameter": trace.tail_diameter,
            "converged": trace.converged,
            "reached_floor": trace.reached_floor,
            "samples": trace.samples.len(),
            "angle_bits_consumed": trace.angle_bits_consumed,
            "critical_proximity": trace.critical_proximity,
            "failure": trace.failure,
        });
        println!("{}", serde_json::to_string_pretty(&payload)?);
    } else {
        println!("{kind} at {spec}");
        println!(
            "landing    {:.12} {:+.12}i",
            trace.landing_estimate.re, trace.landing_estimate.im
        );
        println!(
            "tail       {:.3e} over the last samples",
            trace.tail_diameter
        );
        println!(
            "converged  {} ({} samples, floor {})",
            trace.converged,
            trace.samples.len(),
            if trace.reached_floor {
                "reached"
            } else {
                "not reached"
            }
        );
        println!("angle bits {}", trace.angle_bits_consumed);
        if trace.critical_proximity {
            println!("note: trace passed near the critical point (branch ambiguity risk)");
        }
        if let Some(f) = &trace.failure {
            println!("failure    {f}");
        }
    }
    Ok(if trace.converged { 0 } else { 2 })
}

fn verdict_exit(v: Verdict) -> i32 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 1,
        Verdict::Inconclusive => 2,
    }
}

fn print_report_human(report: &raylam_core::TheoremReport) {
    println!("kind:     {}", report.kind);
    if let Some(spec) = &report.angle_spec {
        println!("angle:    {spec}");
    }
    if let Some(h) = &report.angle_certificate {
        println!(
            "hypothesis: {} (delta >= {}, collision {:?})",
            if h.passed { "pass" } else { "FAIL" },
            h.delta_angle_lower.clone().unwrap_or_else(|| "?".into()),
            h.periodic_collision
        );
    }
    if let Some(c) = &report.class_summary {
        println!(
            "classes:  {} (A has {:?} clusters, converged {})",
            if c.passed { "pass" } else { "not passed" },
            c.characteristic_count,
            c.converged
        );
    }
    if let Some(p) = &report.param_landing {
        println!(
            "param ray: {} c^ = {:.9}{:+.9}i tail {:.2e}",
            if p.passed { "pass" } else { "not passed" },
            p.c_hat_re,
            p.c_hat_im,
            p.tail_diameter
        );
    }
    if let Some(d) = &report.dynamical_landing {
        println!(
            "dyn ray:  {} |z^-c^| = {:.3e} (tol {:.1e})",
            if d.passed { "pass" } else { "not passed" },
            d.distance_to_critical_value,
            d.char_tol
        );
    }
    if let Some(o) = &report.param_certificate {
        println!(
            "orbit:    {} delta = {:.6} drift {:.3} escape {:?}",
            if o.passed { "pass" } else { "not passed" },
            o.delta_param,
            o.drift_ratio,
            o.escape_index
        );
    }
    if let Some(cy) = &report.cycles {
        println!(
            "cycles:   {} ({} found, all repelling: {})",
            if cy.passed { "pass" } else { "not passed" },
            cy.cycles.len(),
            cy.all_repelling
        );
    }
    if let Some(cv) = &report.converse {
        println!(
            "converse: {} ({} characteristic, controls rejected: {})",
            if cv.passed { "pass" } else { "not passed" },
            cv.characteristic_count,
            cv.controls_rejected
        );
    }
    println!("verdict:  {:?}", report.verdict.status);
    for r in &report.verdict.reasons {
        println!("  - {r}");
    }
}

fn cmd_verify_forward(angle: &str, cfg: &VerifyConfig, json: bool) -> Result<i32> {
    let run = verify_forward_spec(angle, cfg);
    if json {
        println!("{}", run.report.to_json_pretty());
    } else {
        print_report_human(&run.report);
    }
    Ok(verdict_exit(run.report.verdict.status))
}

fn cmd_verify_converse(
    c: &str,
    candidates: &[String],
    cfg: &VerifyConfig,
    json: bool,
) -> Result<i32> {
    let c = Parameter::from_complex(parse_complex(c)?).map_err(|e| anyhow!("bad parameter: {e}"))?;
    let mut parsed = Vec::new();
    for spec in candidates {
        parsed.push((spec.clone(), parse_angle(spec)?));
    }
    let report = verify_converse(c, &parsed, cfg, None);
    if json {
        println!("{}", report.to_json_pretty());
    } else {
        print_report_human(&report);
    }
    Ok(verdict_exit(report.verdict.status))
}

fn cmd_verify_batch(path: &Path, seed: Option<u64>) -> Result<i32> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut config = BatchConfig::parse_toml(&text).map_err(|e| anyhow!(e.to_string()))?;
    if let Some(seed) = seed {
        config.seed = Some(seed);
    }
    let out = batch(&config);
    // Batch output is always machine-readable and byte-identical for
    // identical config and seed.
    println!("{}", out.to_json_pretty());
    Ok(verdict_exit(out.overall()))
}

fn parse_raster_common(
    args: &RasterArgs,
    plane: Plane,
    default_center: Complex64,
    default_width: f64,
    palette_override: Option<&str>,
) -> Result<RenderSpec> {
    let center = match &args.center {
        Some(s) => parse_complex(s)?,
        None => default_center,
    };
    let palette_name = args
        .palette
        .clone()
        .or_else(|| palette_override.map(str::to_string));
    let palette = match palette_name.as_deref() {
        None => Palette::Classic,
        Some(name) => Palette::parse(name).ok_or_else(|| anyhow!("unknown palette {name:?}"))?,
    };
    Ok(RenderSpec {
        plane,
        viewport: Viewport {
            center,
            width: args.width.unwrap_or(default_width),
        },
        px_width: args.px,
        px_height: args.px,
        max_iter: args.max_iter,
        escape_radius: 4.0,
        palette,
        overlays: Vec::new(),
    })
}

fn write_raster(path: &Path, raster: &Raster) -> Result<()> {
    if path.extension().and_then(|e| e.to_str()) == Some("png") {
        image::save_buffer(
            path,
            &raster.pixels,
            raster.width as u32,
            raster.height as u32,
            image::ExtendedColorType::Rgb8,
        )
        .with_context(|| format!("cannot write {}", path.display()))?;
    } else {
        fs::write(path, raster.to_ppm())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}

fn ray_overlay(trace: &RayTraceResult) -> Vec<Overlay> {
    vec![
        Overlay {
            points: trace.samples.iter().map(|s| s.position).collect(),
            color: [255, 255, 255],
            radius: 0,
        },
        Overlay {
            points: vec![trace.landing_estimate],
            color: [255, 64, 64],
            radius: 1,
        },
    ]
}

fn overlay_schedule(floor_log2: Option<f64>) -> PotentialSchedule {
    let mut sched = PotentialSchedule::default();
    if let Some(f) = floor_log2 {
        sched.floor_log2 = f;
    }
    sched
}

fn run(cli: Cli) -> Result<i32> {
    let file_cfg = load_file_config(&cli.config)?;
    let palette_override = file_cfg.render.as_ref().and_then(|r| r.palette.clone());
    match &cli.command {
        Command::Angle { sub } => match sub {
            AngleCmd::Info { spec, bits } => cmd_angle_info(spec, *bits, cli.json),
        },
        Command::Kneading {
            spec,
            depth,
            refute_max,
        } => cmd_kneading(spec, *depth, *refute_max, cli.json),
        Command::Lamination {
            spec,
            depth,
            forward,
            svg,
        } => cmd_lamination(spec, *depth, *forward, svg.as_deref(), cli.json),
        Command::Trace { sub } => match sub {
            TraceCmd::ParamRay { spec, args } => {
                let (sched, opts) = build_schedule_opts(args)?;
                let angle = parse_angle(spec)?;
                let trace = trace_param_ray(&angle, &sched, &opts)?;
                if let Some(csv) = &args.csv {
                    write_csv(csv, &trace)?;
                }
                trace_report("parameter ray", spec, &trace, cli.json)
            }
            TraceCmd::DynRay { spec, c, args } => {
                let (sched, opts) = build_schedule_opts(args)?;
                let angle = parse_angle(spec)?;
                let c = Parameter::from_complex(parse_complex(c)?)
                    .map_err(|e| anyhow!("bad parameter: {e}"))?;
                let trace = trace_dynamical_ray(c, &angle, &sched, &opts)?;
                if let Some(csv) = &args.csv {
                    write_csv(csv, &trace)?;
                }
                trace_report("dynamical ray", spec, &trace, cli.json)
            }
        },
        Command::Verify { sub } => {
            let cfg = effective_verify_config(cli.seed, &file_cfg);
            match sub {
                VerifyCmd::Forward { angle } => cmd_verify_forward(angle, &cfg, cli.json),
                VerifyCmd::Converse { c, candidates } => {
                    cmd_verify_converse(c, candidates, &cfg, cli.json)
                }
                VerifyCmd::Batch { config } => cmd_verify_batch(config, cli.seed),
            }
        }
        Command::Render { sub } => match sub {
            RenderCmd::Mandelbrot { args } => {
                let mut spec = parse_raster_common(
                    args,
                    Plane::Parameter,
                    Complex64::new(-0.5, 0.0),
                    3.2,
                    palette_override.as_deref(),
                )?;
                let sched = overlay_schedule(args.floor_log2);
                let opts = TraceOptions::default();
                for ray in &args.rays {
                    let angle = parse_angle(ray)?;
                    let trace = trace_param_ray(&angle, &sched, &opts)?;
                    spec.overlays.extend(ray_overlay(&trace));
                }
                let raster = render_plane(&spec).map_err(|e| anyhow!(e))?;
                write_raster(&args.out, &raster)?;
                println!("wrote {}", args.out.display());
                Ok(0)
            }
            RenderCmd::Julia { c, args } => {
                let c = Parameter::from_complex(parse_complex(c)?)
                    .map_err(|e| anyhow!("bad parameter: {e}"))?;
                let mut spec = parse_raster_common(
                    args,
                    Plane::Dynamical(c.as_complex()),
                    Complex64::new(0.0, 0.0),
                    4.0,
                    palette_override.as_deref(),
                )?;
                let sched = overlay_schedule(args.floor_log2);
                let opts = TraceOptions::default();
                for ray in &args.rays {
                    let angle = parse_angle(ray)?;
                    let trace = trace_dynamical_ray(c, &angle, &sched, &opts)?;
                    spec.overlays.extend(ray_overlay(&trace));
                }
                let raster = render_plane(&spec).map_err(|e| anyhow!(e))?;
                write_raster(&args.out, &raster)?;
                println!("wrote {}", args.out.display());
                Ok(0)
            }
            RenderCmd::Chords {
                spec,
                depth,
                forward,
                out,
            } => {
                let angle = parse_angle(spec)?;
                let family = compute_class_family(&angle, *depth, *forward)?;
                let mut diagram = ChordDiagram::from_classes(&family);
                let (h0, h1) = angle.halves();
                diagram.cut_points = vec![h0.to_f64(), h1.to_f64()];
                fs::write(out, render_chords(&diagram))
                    .with_context(|| format!("cannot write {}", out.display()))?;
                println!("wrote {}", out.display());
                Ok(0)
            }
        },
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let _ = e.print();
            std::process::exit(EXIT_USAGE);
        }
    };
    let json_errors = cli.json;
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            if json_errors {
                let payload = json!({"error": format!("{err:#}")});
                let _ = writeln!(std::io::stderr(), "{payload}");
            } else {
                let _ = writeln!(std::io::stderr(), "error: {err:#}");
            }
            std::process::exit(EXIT_SOFTWARE);
        }
    }
}

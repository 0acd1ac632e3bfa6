//! Command-line driver: every library capability behind one binary.
//!
//! Subcommands mirror the library surface — orbit iteration, escape
//! classification, basin grids, the escape-rate coordinate, the winding
//! invariant, the fiber-map roots, the series conjugacy analysis, the
//! quadratic-template classifier, and the blow-up factorization report.
//!
//! Conventions, uniform across commands:
//!
//! - configuration comes from flags plus a `--spec spec.json` file holding
//!   `{"k": .., "d": .., "alpha": [[re, im], ..]}`;
//! - structured results print as JSON, grids and orbits as CSV (every
//!   document embeds the fully resolved configuration it ran under, JSON in
//!   a `config` field, CSV in `#` header lines);
//! - commands that draw random samples take `--seed` and record it, so
//!   every run is reproducible from its own output;
//! - JSON numbers are emitted in shortest round-trip form (exact to the
//!   f64 bit); CSV floating-point fields carry 17 significant digits.
//!
//! Exit code is 0 on success and nonzero with a diagnostic on stderr for
//! malformed input or any library-reported failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use basin_core::blowup::factorization_report;
use basin_core::boettcher::{functional_equation_residual, phi};
use basin_core::conjugacy::omega::{lambda_roots, OmegaModel};
use basin_core::conjugacy::solve::{check_conjugacy_numeric, run_conjugacy_analysis};
use basin_core::fw3::{attracting_fixed_point_check, check_eligibility, FWClassSpec};
use basin_core::genseries::{Exp, GenSeries, Valuation};
use basin_core::winding::{winding_alpha, ClosedCurve, WindingOptions};
use basin_core::{AutomorphismSpec, PointClass};
use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "basin",
    version,
    about = "Escape dynamics of shift-like polynomial automorphisms: orbits, basins, \
             escape-rate coordinate, winding invariant, series conjugacy, and the \
             quadratic-template classifier."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a point and print the orbit as CSV.
    Orbit {
        /// Path to the map description JSON.
        #[arg(long)]
        spec: PathBuf,
        /// Start point, "re,im;re,im;..." with k components.
        #[arg(long)]
        point: String,
        /// Number of applications of the map.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Iterate the inverse instead of the forward map.
        #[arg(long)]
        backward: bool,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Decide whether a point escapes (enters the forward-invariant region).
    ClassifyPoint {
        #[arg(long)]
        spec: PathBuf,
        /// Point, "re,im;re,im;..." with k components.
        #[arg(long)]
        point: String,
        /// Iteration budget before reporting "undecided".
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
    },
    /// Escape-step grid over a complex-plane slice of one coordinate (CSV).
    BasinGrid {
        #[arg(long)]
        spec: PathBuf,
        /// Which coordinate varies: "z1" .. "zk".
        #[arg(long, default_value = "z1")]
        slice: String,
        /// Center of the grid in the slice plane, "re,im".
        #[arg(long, default_value = "0,0")]
        center: String,
        /// Full side length of the square window.
        #[arg(long, default_value_t = 4.0)]
        extent: f64,
        /// Grid resolution per side.
        #[arg(long, default_value_t = 200)]
        res: usize,
        /// Iteration budget per cell; cells that never escape print -1.
        #[arg(long, default_value_t = 64)]
        max_iter: usize,
        /// Values for the fixed coordinates, "re,im;..." with k components
        /// (the slice coordinate's entry is overwritten per cell). Default:
        /// the origin.
        #[arg(long)]
        base_point: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the escape-rate coordinate at an escaping point.
    Phi {
        #[arg(long)]
        spec: PathBuf,
        /// Point in the escape region, "re,im;re,im;...".
        #[arg(long)]
        point: String,
        /// Tail-bound tolerance for the increment sum.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Winding invariant of a closed curve of escaping points.
    Winding {
        #[arg(long)]
        spec: PathBuf,
        /// Curve JSON: {"samples": [[[re,im], ..k components..], ...]}.
        #[arg(long)]
        curve: PathBuf,
        /// Forward-iteration budget when classifying a sample as escaping.
        #[arg(long, default_value_t = 64)]
        escape_budget: usize,
        /// Maximum bisections per segment before giving up.
        #[arg(long, default_value_t = 20)]
        refine_cap: u32,
        /// Tolerance for the coordinate evaluation at each sample.
        #[arg(long, default_value_t = 1e-12)]
        phi_tol: f64,
    },
    /// Roots of the fiber multiplier equation, sorted by argument.
    Lambda {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Truncated-series conjugacy analysis: residuals and contraction.
    ConjugacyCheck {
        #[arg(long)]
        spec: PathBuf,
        /// Working truncation order, "P/Q" or "P" (u-exponent units).
        #[arg(long, default_value = "32")]
        order: String,
        /// Number of series iterations.
        #[arg(long, default_value_t = 3)]
        steps: usize,
        /// Also sample the functional equation numerically.
        #[arg(long)]
        numeric: bool,
        /// Number of numeric sample points.
        #[arg(long, default_value_t = 25)]
        samples: usize,
        /// Inner radius for the numeric samples' base coordinate.
        #[arg(long, default_value_t = 4.0)]
        vmin: f64,
        /// RNG seed for the numeric samples.
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
    /// Print the change-of-variable data and a few series iterates.
    SeriesDemo {
        #[arg(long)]
        spec: PathBuf,
        /// Working truncation order, "P/Q" or "P" (u-exponent units).
        #[arg(long, default_value = "16")]
        order: String,
        /// Number of series iterations.
        #[arg(long, default_value_t = 2)]
        steps: usize,
    },
    /// Quadratic normal-form templates of C^3: eligibility and basin witness.
    Fw3 {
        #[command(subcommand)]
        command: Fw3Command,
    },
    /// Compare the induced chart map against its elementary factorization.
    BlowupCheck {
        #[arg(long)]
        spec: PathBuf,
        /// Number of random chart points to evaluate.
        #[arg(long, default_value_t = 40)]
        samples: usize,
        /// RNG seed for the sample points.
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum Fw3Command {
    /// Check the printed constraint list and report the recurrence kind.
    Classify {
        /// Template class, 1-5.
        #[arg(long)]
        class: u8,
        /// Template variant (classes 1 and 4 list two shapes).
        #[arg(long, default_value_t = 1)]
        variant: u8,
        /// JSON file with the named constants: {"scalars": {"a": [re,im],
        /// ...}, "p1": [[re,im],...], "p2": [...], "P": [[i,j,[re,im]],...]}.
        #[arg(long)]
        params: PathBuf,
    },
    /// Fraction of a large shell escaping to infinity (basin witness).
    Basin {
        #[arg(long)]
        class: u8,
        #[arg(long, default_value_t = 1)]
        variant: u8,
        #[arg(long)]
        params: PathBuf,
        /// Number of shell points to iterate.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        /// Iteration budget per point.
        #[arg(long, default_value_t = 50)]
        max_iter: usize,
        /// RNG seed for the shell points.
        #[arg(long, default_value_t = 17)]
        seed: u64,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Orbit { spec, point, steps, backward, output } => {
            cmd_orbit(&spec, &point, steps, backward, output.as_deref())
        }
        Command::ClassifyPoint { spec, point, max_iter } => {
            cmd_classify_point(&spec, &point, max_iter)
        }
        Command::BasinGrid { spec, slice, center, extent, res, max_iter, base_point, output } => {
            cmd_basin_grid(
                &spec,
                &slice,
                &center,
                extent,
                res,
                max_iter,
                base_point.as_deref(),
                output.as_deref(),
            )
        }
        Command::Phi { spec, point, tol } => cmd_phi(&spec, &point, tol),
        Command::Winding { spec, curve, escape_budget, refine_cap, phi_tol } => {
            cmd_winding(&spec, &curve, escape_budget, refine_cap, phi_tol)
        }
        Command::Lambda { spec } => cmd_lambda(&spec),
        Command::ConjugacyCheck { spec, order, steps, numeric, samples, vmin, seed } => {
            cmd_conjugacy_check(&spec, &order, steps, numeric, samples, vmin, seed)
        }
        Command::SeriesDemo { spec, order, steps } => cmd_series_demo(&spec, &order, steps),
        Command::Fw3 { command } => match command {
            Fw3Command::Classify { class, variant, params } => {
                cmd_fw3_classify(class, variant, &params)
            }
            Fw3Command::Basin { class, variant, params, samples, max_iter, seed } => {
                cmd_fw3_basin(class, variant, &params, samples, max_iter, seed)
            }
        },
        Command::BlowupCheck { spec, samples, seed } => cmd_blowup_check(&spec, samples, seed),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing

fn load_spec(path: &std::path::Path) -> Result<AutomorphismSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read spec file {}", path.display()))?;
    AutomorphismSpec::from_json_str(&text)
        .with_context(|| format!("invalid spec in {}", path.display()))
}

fn parse_complex(text: &str) -> Result<Complex64> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("expected \"re,im\", got {text:?}"))?;
    Ok(Complex64::new(
        re.trim().parse().with_context(|| format!("bad real part in {text:?}"))?,
        im.trim().parse().with_context(|| format!("bad imaginary part in {text:?}"))?,
    ))
}

fn parse_point(text: &str, k: usize) -> Result<Vec<Complex64>> {
    let point: Vec<Complex64> =
        text.split(';').map(parse_complex).collect::<Result<_>>()?;
    if point.len() != k {
        bail!("point has {} components, the map needs {k}", point.len());
    }
    Ok(point)
}

fn parse_order(text: &str) -> Result<Exp> {
    text.parse::<Exp>()
        .map_err(|e| anyhow!("cannot parse truncation order {text:?} as P/Q: {e}"))
}

/// Complex number as the wire-format [re, im] pair.
fn cj(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn val_string(v: &Valuation) -> String {
    match v {
        Valuation::Finite(e) => e.to_string(),
        Valuation::Infinity => "infinity".to_string(),
    }
}

fn spec_value(spec: &AutomorphismSpec) -> Value {
    serde_json::to_value(spec).expect("spec serializes")
}

/// Writes to stdout, treating a closed pipe (e.g. `| head`) as a normal
/// early exit rather than an error.
fn write_stdout(content: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(content.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        return Err(e.into());
    }
    Ok(())
}

fn emit(output: Option<&std::path::Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => write_stdout(content),
    }
}

fn print_json(doc: &Value) -> Result<()> {
    write_stdout(&format!("{}\n", serde_json::to_string_pretty(doc)?))
}

// ---------------------------------------------------------------------------
// commands

fn cmd_orbit(
    spec_path: &std::path::Path,
    point: &str,
    steps: usize,
    backward: bool,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let seed = parse_point(point, spec.k())?;
    let orbit = if backward {
        spec.orbit_backward(&seed, steps)
    } else {
        spec.orbit_forward(&seed, steps)
    };
    let config = json!({
        "command": "orbit",
        "spec": spec_value(&spec),
        "steps": steps,
        "direction": if backward { "backward" } else { "forward" },
    });
    let mut out = String::new();
    writeln!(out, "# basin orbit")?;
    writeln!(out, "# config: {config}")?;
    writeln!(out, "# truncated: {}", orbit.truncated)?;
    let cols: Vec<String> = (1..=spec.k())
        .flat_map(|i| [format!("z{i}_re"), format!("z{i}_im")])
        .collect();
    writeln!(out, "# columns: n,{}", cols.join(","))?;
    for (n, p) in orbit.points.iter().enumerate() {
        write!(out, "{n}")?;
        for z in p {
            write!(out, ",{:.16e},{:.16e}", z.re, z.im)?;
        }
        writeln!(out)?;
    }
    emit(output, &out)
}

fn cmd_classify_point(spec_path: &std::path::Path, point: &str, max_iter: usize) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let p = parse_point(point, spec.k())?;
    let config = json!({
        "command": "classify-point",
        "spec": spec_value(&spec),
        "point": p.iter().map(|z| cj(*z)).collect::<Vec<_>>(),
        "max_iter": max_iter,
    });
    let doc = match spec.classify_point(&p, max_iter) {
        PointClass::Escaped { steps } => json!({
            "config": config,
            "class": "escaped",
            "steps": steps,
        }),
        PointClass::Undecided { iterations } => json!({
            "config": config,
            "class": "undecided",
            "iterations": iterations,
        }),
    };
    print_json(&doc)
}

#[allow(clippy::too_many_arguments)]
fn cmd_basin_grid(
    spec_path: &std::path::Path,
    slice: &str,
    center: &str,
    extent: f64,
    res: usize,
    max_iter: usize,
    base_point: Option<&str>,
    output: Option<&std::path::Path>,
) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let k = spec.k();
    let idx = slice
        .strip_prefix('z')
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|n| (1..=k).contains(n))
        .ok_or_else(|| anyhow!("--slice must be one of z1..z{k}, got {slice:?}"))?
        - 1;
    let center = parse_complex(center)?;
    if res == 0 {
        bail!("--res must be positive");
    }
    let base = match base_point {
        Some(text) => parse_point(text, k)?,
        None => vec![Complex64::new(0.0, 0.0); k],
    };
    let config = json!({
        "command": "basin-grid",
        "spec": spec_value(&spec),
        "slice": slice,
        "center": cj(center),
        "extent": extent,
        "res": res,
        "max_iter": max_iter,
        "base_point": base.iter().map(|z| cj(*z)).collect::<Vec<_>>(),
    });
    let mut out = String::new();
    writeln!(out, "# basin grid")?;
    writeln!(out, "# config: {config}")?;
    writeln!(
        out,
        "# rows: im ascending; cols: re ascending; cell: escape steps (-1 = undecided \
         within max_iter)"
    )?;
    let step = extent / res as f64;
    let lo_re = center.re - extent / 2.0;
    let lo_im = center.im - extent / 2.0;
    let mut point = base.clone();
    for iy in 0..res {
        let mut row = Vec::with_capacity(res);
        for ix in 0..res {
            point[idx] = Complex64::new(
                lo_re + step * (ix as f64 + 0.5),
                lo_im + step * (iy as f64 + 0.5),
            );
            let cell = match spec.classify_point(&point, max_iter) {
                PointClass::Escaped { steps } => steps as i64,
                PointClass::Undecided { .. } => -1,
            };
            row.push(cell.to_string());
        }
        writeln!(out, "{}", row.join(","))?;
    }
    emit(output, &out)
}

fn cmd_phi(spec_path: &std::path::Path, point: &str, tol: f64) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let p = parse_point(point, spec.k())?;
    let result = phi(&spec, &p, tol)?;
    let residual = functional_equation_residual(&spec, &p, tol)?;
    print_json(&json!({
        "config": {
            "command": "phi",
            "spec": spec_value(&spec),
            "point": p.iter().map(|z| cj(*z)).collect::<Vec<_>>(),
            "tol": tol,
        },
        "value": cj(result.value),
        "iterations": result.iterations,
        "tail_bound": result.tail_bound,
        "functional_equation_residual": residual,
    }))
}

fn cmd_winding(
    spec_path: &std::path::Path,
    curve_path: &std::path::Path,
    escape_budget: usize,
    refine_cap: u32,
    phi_tol: f64,
) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let text = fs::read_to_string(curve_path)
        .with_context(|| format!("cannot read curve file {}", curve_path.display()))?;
    let curve: ClosedCurve = serde_json::from_str(&text)
        .with_context(|| format!("invalid curve in {}", curve_path.display()))?;
    let options = WindingOptions {
        escape_budget,
        refine_cap,
        phi_tol,
        ..WindingOptions::default()
    };
    let result = winding_alpha(&spec, &curve, &options)?;
    // Human-readable summary goes to stderr so stdout stays valid JSON,
    // matching every other JSON-emitting subcommand.
    eprintln!(
        "alpha = {} / {}^{}",
        result.alpha.numerator(),
        result.alpha.base(),
        result.alpha.depth()
    );
    print_json(&json!({
        "config": {
            "command": "winding",
            "spec": spec_value(&spec),
            "curve_samples": curve.samples().len(),
            "escape_budget": escape_budget,
            "refine_cap": refine_cap,
            "phi_tol": phi_tol,
        },
        "alpha": {
            "numerator": result.alpha.numerator(),
            "base": result.alpha.base(),
            "depth": result.alpha.depth(),
        },
        "depth": result.depth,
        "integer_winding": result.integer_winding,
        "samples_used": result.samples_used,
        "max_jump": result.max_jump,
        "integrality_defect": result.integrality_defect,
    }))
}

fn cmd_lambda(spec_path: &std::path::Path) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let roots = lambda_roots(&spec);
    print_json(&json!({
        "config": { "command": "lambda", "spec": spec_value(&spec) },
        "count": roots.len(),
        "lambdas": roots.iter().map(|z| cj(*z)).collect::<Vec<_>>(),
    }))
}

fn cmd_conjugacy_check(
    spec_path: &std::path::Path,
    order: &str,
    steps: usize,
    numeric: bool,
    samples: usize,
    vmin: f64,
    seed: u64,
) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let w = parse_order(order)?;
    let model = OmegaModel::new(&spec);
    let run = run_conjugacy_analysis(&model, steps, Some(w), None)?;
    let config = json!({
        "command": "conjugacy-check",
        "spec": spec_value(&spec),
        "order": w.to_string(),
        "steps": steps,
        "numeric": numeric,
        "samples": samples,
        "vmin": vmin,
        "seed": seed,
    });
    let contraction = run.contraction.as_ref().map(|report| {
        json!({
            "c": report.c.to_string(),
            "epsilon": report.epsilon.to_string(),
            "certified": report.certified,
            "rows": report.rows.iter().map(|r| json!({
                "n": r.n,
                "valuation": val_string(&r.valuation),
                "bound": r.bound.to_string(),
                "meets_bound": r.meets_bound,
                "increased": r.increased,
            })).collect::<Vec<_>>(),
        })
    });
    let mut doc = json!({
        "config": config,
        "residual_valuations": run
            .series_check
            .residual_valuations
            .iter()
            .map(val_string)
            .collect::<Vec<_>>(),
        "worst_relative_coefficient": run.series_check.worst_relative,
        "active_support": run.series_check.active_support,
        "contraction": contraction,
    });
    if numeric {
        if !(vmin > 1.0) {
            bail!("--vmin must exceed 1 (the series converge for |v| > 1)");
        }
        let big_n = i32::try_from(model.big_n()).context("series ramification exceeds i32")?;
        let scale = vmin.powi(big_n) * 1e-3;
        if !scale.is_finite() {
            bail!("vmin^N overflows f64 for this map; choose a smaller --vmin");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<(Complex64, Vec<Complex64>)> = (0..samples)
            .map(|_| {
                let v = Complex64::from_polar(
                    vmin + rng.gen_range(0.0..1.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                );
                let s = (0..spec.k() - 1)
                    .map(|_| {
                        Complex64::from_polar(
                            scale * rng.gen_range(0.1..1.0),
                            rng.gen_range(0.0..std::f64::consts::TAU),
                        )
                    })
                    .collect();
                (v, s)
            })
            .collect();
        let check = check_conjugacy_numeric(&model, &run.big_g, &points)?;
        doc["numeric"] = json!({
            "samples": check.samples,
            "worst_relative": check.worst_relative,
            "worst_index": check.worst_index,
        });
    }
    print_json(&doc)
}

fn cmd_series_demo(spec_path: &std::path::Path, order: &str, steps: usize) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let w = parse_order(order)?;
    let model = OmegaModel::new(&spec);
    let run = run_conjugacy_analysis(&model, steps, Some(w), None)?;
    let g_last: &GenSeries = run.iterates.last().expect("at least the seed iterate");
    print_json(&json!({
        "config": {
            "command": "series-demo",
            "spec": spec_value(&spec),
            "order": w.to_string(),
            "steps": steps,
        },
        "change_of_variable": {
            "N": model.big_n(),
            "S": model.big_s(),
            "P": model.prefactor_exponent(),
            "e_exponents": model.e_exponents(),
            "fiber_weight": model.fiber_weight().to_string(),
            "contraction_exponent": model.contraction_exponent().to_string(),
            "lambdas": model.lambdas().iter().map(|z| cj(*z)).collect::<Vec<_>>(),
            "shift_sigma": model.shift().to_string(),
        },
        "g0": model.g0().to_string(),
        "g_final": g_last.to_string(),
        "g_final_term_count": g_last.term_count(),
        "residual_valuations": run
            .series_check
            .residual_valuations
            .iter()
            .map(val_string)
            .collect::<Vec<_>>(),
    }))
}

/// Reads the params file and stamps the class/variant chosen on the command
/// line (flags are authoritative; any class/variant keys in the file are
/// overwritten).
fn load_fw(class: u8, variant: u8, params: &std::path::Path) -> Result<(FWClassSpec, Value)> {
    let text = fs::read_to_string(params)
        .with_context(|| format!("cannot read params file {}", params.display()))?;
    let mut value: Value = serde_json::from_str(&text)
        .with_context(|| format!("invalid JSON in {}", params.display()))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| anyhow!("params file must hold a JSON object"))?;
    obj.insert("class".into(), json!(class));
    obj.insert("variant".into(), json!(variant));
    let fw: FWClassSpec = serde_json::from_value(value.clone())
        .with_context(|| format!("params in {} do not form a template instance", params.display()))?;
    Ok((fw, value))
}

fn cmd_fw3_classify(class: u8, variant: u8, params: &std::path::Path) -> Result<()> {
    let (fw, resolved) = load_fw(class, variant, params)?;
    let report = check_eligibility(&fw)?;
    print_json(&json!({
        "config": { "command": "fw3 classify", "params": resolved },
        "eligible": report.eligible,
        "failed_constraints": report.failed_constraints,
        "recurrence": report.recurrence,
    }))
}

fn cmd_fw3_basin(
    class: u8,
    variant: u8,
    params: &std::path::Path,
    samples: usize,
    max_iter: usize,
    seed: u64,
) -> Result<()> {
    let (fw, resolved) = load_fw(class, variant, params)?;
    let fraction = attracting_fixed_point_check(&fw, samples, max_iter, seed)?;
    print_json(&json!({
        "config": {
            "command": "fw3 basin",
            "params": resolved,
            "samples": samples,
            "max_iter": max_iter,
            "seed": seed,
        },
        "fraction_escaped": fraction,
    }))
}

fn cmd_blowup_check(spec_path: &std::path::Path, samples: usize, seed: u64) -> Result<()> {
    let spec = load_spec(spec_path)?;
    let k = spec.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Chart points with every coordinate in a moderate annulus, the last one
    // allowed close to (but off) the exceptional hyperplane so the report
    // exercises both regimes.
    let points: Vec<Vec<Complex64>> = (0..samples)
        .map(|_| {
            (0..k)
                .map(|i| {
                    let r = if i == k - 1 {
                        rng.gen_range(0.02..1.0)
                    } else {
                        rng.gen_range(0.1..1.6)
                    };
                    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
                })
                .collect()
        })
        .collect();
    let report = factorization_report(&spec, &points);
    print_json(&json!({
        "config": {
            "command": "blowup-check",
            "spec": spec_value(&spec),
            "samples": samples,
            "seed": seed,
        },
        "samples_evaluated": report.samples_evaluated,
        "samples_skipped": report.samples_skipped,
        "max_abs_residual": report.max_abs_residual,
        "max_rel_residual": report.max_rel_residual,
        "interpretation": report.interpretation,
    }))
}

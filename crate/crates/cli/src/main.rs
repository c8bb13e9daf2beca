//! `indicatorlab` command-line interface.

mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use indicatorlab::critical::Analysis;
use indicatorlab::extremal::{density_range, RangeKind};
use indicatorlab::fixtures::FIXTURES;
use indicatorlab::fock::{
    classify_fock, dyadic_checkpoints, empirical_angular_density, lindelof_partial_sums, make_radii, randomize,
    RandomSet,
};
use indicatorlab::geometry::{is_balanced, is_locally_balanced};
use indicatorlab::{AngularMeasure, IndicatorFn, Order};
use serde_json::{json, Value};

use crate::io::{csv, invalid, load_measure, load_multiplier, print_json, write_file, Invalid, Loaded};

#[derive(Parser)]
#[command(name = "indicatorlab", version, about = "Indicators, critical types and density ranges of regular point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MeasureArgs {
    /// Measure JSON file or `fixture:<name>`.
    #[arg(long)]
    measure: String,
    /// Order ρ; defaults to the fixture's own order.
    #[arg(long)]
    rho: Option<f64>,
    /// Fixture parameter `key=value`, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Grid resolution.
    #[arg(long, env = "INDICATORLAB_GRID", default_value_t = indicatorlab::indicator::DEFAULT_RESOLUTION)]
    grid: usize,
}

impl MeasureArgs {
    fn load(&self) -> Result<Loaded> {
        load_measure(&self.measure, &self.params, self.rho)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the indicator of a measure.
    Indicator {
        #[command(flatten)]
        m: MeasureArgs,
        /// Tabulate the balanced modification instead.
        #[arg(long)]
        modified: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Circumcenter, maximum set and balancedness of the indicator.
    Balance {
        #[command(flatten)]
        m: MeasureArgs,
    },
    /// Critical zero-set type and the uniqueness-type bracket.
    Sigma {
        #[command(flatten)]
        m: MeasureArgs,
        /// Extra multiplier JSON file, repeatable.
        #[arg(long = "multiplier")]
        multipliers: Vec<String>,
    },
    /// Closed-form density range and its extremal configurations.
    Bounds {
        /// `7` or `als1`.
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        rho: f64,
        /// Write the extremal measures (JSON) and h_* (CSV) here.
        #[arg(long)]
        emit_extremals: Option<PathBuf>,
        #[arg(long, env = "INDICATORLAB_GRID", default_value_t = indicatorlab::indicator::DEFAULT_RESOLUTION)]
        grid: usize,
    },
    /// Randomize the arguments of a radial sequence of given density.
    Randomize {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long)]
        density: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero-set and uniqueness verdicts for the randomized set.
    Classify {
        #[command(flatten)]
        m: MeasureArgs,
        #[arg(long)]
        density: f64,
        /// Rescale the measure to total mass 1 first.
        #[arg(long)]
        normalize: bool,
    },
    /// Compare empirical angular counts of a point file with the prediction.
    VerifyDensity {
        /// CSV written by `randomize`.
        #[arg(long)]
        points: PathBuf,
        /// JSON list of `[alpha, beta]` arcs.
        #[arg(long)]
        arcs: PathBuf,
        /// Comma-separated radii.
        #[arg(long, value_delimiter = ',')]
        checkpoints: Vec<f64>,
        /// Override the measure recorded in the point file.
        #[arg(long)]
        measure: Option<String>,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        density: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write partial sums of λ^{-ρ} at dyadic radii to this CSV.
        #[arg(long)]
        lindelof_out: Option<PathBuf>,
    },
    /// Named fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
}

fn moment_json(m: &AngularMeasure, o: Order) -> Value {
    let c = m.rho_moment(o);
    json!([c.re, c.im])
}

fn cmd_indicator(m: &MeasureArgs, modified: bool, out: Option<PathBuf>) -> Result<()> {
    let l = m.load()?;
    let h = if modified {
        Analysis::new(&l.measure, l.order, m.grid)?.hat().clone()
    } else {
        IndicatorFn::from_measure(&l.measure, l.order, m.grid)?
    };
    let mass = l.measure.total_mass();
    let moment = l.measure.rho_moment(l.order);
    let rows: Vec<Vec<f64>> = h.grid().iter().enumerate().map(|(i, &v)| vec![h.grid_point(i), v]).collect();
    match out {
        Some(path) => {
            let comments = vec![format!(
                "rho={} total_mass={} rho_moment_re={} rho_moment_im={} measure={}",
                l.order.rho(),
                io::csv_num(mass),
                io::csv_num(moment.re),
                io::csv_num(moment.im),
                l.label
            )];
            write_file(&path, &csv(&comments, &["theta", "h"], rows))?;
            print_json(json!({
                "out": path.display().to_string(),
                "rows": h.resolution(),
                "rho": l.order.rho(),
                "total_mass": mass,
                "rho_moment": moment_json(&l.measure, l.order),
                "max": h.max_value(),
            }))
        }
        None => print_json(json!({
            "rho": l.order.rho(),
            "total_mass": mass,
            "rho_moment": moment_json(&l.measure, l.order),
            "theta": rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
            "h": rows.iter().map(|r| r[1]).collect::<Vec<_>>(),
        })),
    }
}

fn cmd_balance(m: &MeasureArgs) -> Result<()> {
    let l = m.load()?;
    let an = Analysis::new(&l.measure, l.order, m.grid)?;
    let md = an.modification();
    let local = is_locally_balanced(an.max_set(), l.order)?;
    print_json(json!({
        "measure": l.label,
        "rho": l.order.rho(),
        "max_value": an.sigma_z(),
        "correction": [md.correction.a, md.correction.b],
        "circumcenter": md.circum.as_ref().map(|c| [c.center.re, c.center.im]),
        "circumradius": md.circum.as_ref().map(|c| c.radius),
        "max_set": an.max_set(),
        "balanced": is_balanced(an.max_set(), l.order)?,
        "locally_balanced": local.balanced,
        "witness": local.witness,
    }))
}

fn cmd_sigma(m: &MeasureArgs, files: &[String]) -> Result<()> {
    let l = m.load()?;
    let mut ks = l.multipliers.clone();
    for f in files {
        ks.push(load_multiplier(f, l.order)?);
    }
    let an = Analysis::new(&l.measure, l.order, m.grid)?;
    let rep = an.report(&ks)?;
    let mut v = serde_json::to_value(&rep)?;
    v["sigma_u"] = json!([rep.sigma_u_lower, rep.sigma_u_upper]);
    v["measure"] = json!(l.label);
    v["max_set"] = serde_json::to_value(an.max_set())?;
    print_json(v)
}

fn cmd_bounds(theorem: &str, rho: f64, dir: Option<PathBuf>, grid: usize) -> Result<()> {
    let kind: RangeKind = theorem.parse()?;
    let o = Order::new(rho)?;
    let r = density_range(o, kind)?;
    let mut v = json!({
        "theorem": kind,
        "rho": rho,
        "lower": r.lower,
        "upper": r.upper,
        "nodes": r.nodes.as_ref().map(|n| n.nodes().to_vec()),
    });
    if let Some(dir) = dir {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let lower = dir.join("lower_measure.json");
        let upper = dir.join("upper_measure.json");
        let hcsv = dir.join("h_star.csv");
        // measures keep full precision so they re-parse exactly
        write_file(&lower, &serde_json::to_string_pretty(&r.lower_measure)?)?;
        write_file(&upper, &serde_json::to_string_pretty(&r.upper_measure)?)?;
        let h = r.lower_indicator_fn(grid)?;
        let rows = h.grid().iter().enumerate().map(|(i, &x)| vec![h.grid_point(i), x]);
        write_file(&hcsv, &csv(&[format!("rho={rho} lower={}", r.lower)], &["theta", "h"], rows))?;
        v["files"] = json!([lower.display().to_string(), upper.display().to_string(), hcsv.display().to_string()]);
    }
    print_json(v)
}

fn cmd_randomize(m: &MeasureArgs, density: f64, count: usize, seed: u64, out: Option<PathBuf>) -> Result<()> {
    let l = m.load()?;
    let radii = make_radii(l.order, density, count)?;
    let s = randomize(&radii, &l.measure, l.order, seed)?;
    let meta = json!({
        "rho": l.order.rho(),
        "density": density,
        "seed": seed,
        "measure": s.base_measure,
    });
    match out {
        Some(path) => {
            // full precision in the data file so the radii stay exact
            let mut text = format!("# {}\nmodulus,argument\n", serde_json::to_string(&meta)?);
            for (r, t) in &s.points {
                text.push_str(&format!("{r},{t}\n"));
            }
            write_file(&path, &text)?;
            print_json(json!({"out": path.display().to_string(), "count": count, "seed": seed, "max_modulus": s.max_modulus()}))
        }
        None => print_json(json!({
            "meta": meta,
            "points": s.points.iter().map(|p| [p.0, p.1]).collect::<Vec<_>>(),
        })),
    }
}

fn cmd_classify(m: &MeasureArgs, density: f64, normalize: bool) -> Result<()> {
    let l = m.load()?;
    let (measure, ks) = if normalize {
        let mass = l.measure.total_mass();
        let ks = l.multipliers.iter().map(|k| k.scaled(1.0 / mass)).collect();
        (l.measure.normalized()?, ks)
    } else {
        (l.measure, l.multipliers)
    };
    let c = classify_fock(&measure, l.order, density, &ks, m.grid)?;
    let mut v = serde_json::to_value(&c)?;
    v["sigma_u"] = json!([c.sigma_u_lower, c.sigma_u_upper]);
    print_json(v)
}

type PointsFile = (Option<Value>, Vec<(f64, f64)>);

fn read_points(path: &PathBuf) -> Result<PointsFile> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    let mut meta = None;
    let mut points = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(c) = line.strip_prefix('#') {
            if meta.is_none() {
                meta = serde_json::from_str(c.trim()).ok();
            }
            continue;
        }
        if line.is_empty() || line.starts_with("modulus") {
            continue;
        }
        let (a, b) = line.split_once(',').ok_or_else(|| invalid(format!("line {}: expected modulus,argument", n + 1)))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| invalid(format!("line {}: bad number '{s}'", n + 1)));
        points.push((parse(a)?, parse(b)?));
    }
    Ok((meta, points))
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    points: &PathBuf,
    arcs: &PathBuf,
    checkpoints: &[f64],
    measure: Option<&str>,
    rho: Option<f64>,
    density: Option<f64>,
    out: Option<PathBuf>,
    lindelof_out: Option<PathBuf>,
) -> Result<()> {
    let (meta, pts) = read_points(points)?;
    let meta = meta.unwrap_or(Value::Null);
    let rho = rho.or_else(|| meta["rho"].as_f64()).ok_or_else(|| invalid("no order: pass --rho"))?;
    let density = density.or_else(|| meta["density"].as_f64()).ok_or_else(|| invalid("no density: pass --density"))?;
    let base: AngularMeasure = match measure {
        Some(src) => load_measure(src, &[], Some(rho))?.measure,
        None => serde_json::from_value(meta["measure"].clone())
            .map_err(|_| invalid("no measure recorded in the point file: pass --measure"))?,
    };
    let arcs_text = std::fs::read_to_string(arcs).map_err(|e| invalid(format!("cannot read {}: {e}", arcs.display())))?;
    let arc_list: Vec<(f64, f64)> =
        serde_json::from_str(&arcs_text).map_err(|e| invalid(format!("bad arcs file: {e}")))?;
    if checkpoints.is_empty() {
        return Err(invalid("--checkpoints is required"));
    }
    let o = Order::new(rho)?;
    let set = RandomSet::from_points(pts, density, base);
    let rows = empirical_angular_density(&set, o, &arc_list, checkpoints)?;
    let inside = rows.iter().filter(|r| r.within_band()).count();
    let table = csv(
        &[format!("rho={rho} density={density} points={}", set.points.len())],
        &["R", "alpha", "beta", "empirical", "predicted", "deviation", "band"],
        rows.iter().map(|r| vec![r.r, r.alpha, r.beta, r.empirical, r.predicted, r.deviation, r.band]),
    );
    let mut summary = json!({"cells": rows.len(), "within_band": inside});
    if let Some(path) = lindelof_out {
        let rep = lindelof_partial_sums(&set, o, &dyadic_checkpoints(set.max_modulus(), 8))?;
        let mut lrows = Vec::new();
        for (i, (&r, s)) in rep.checkpoints.iter().zip(&rep.sums).enumerate() {
            let inc = if i == 0 { f64::NAN } else { rep.increments[i - 1] };
            lrows.push(vec![r, s.re, s.im, inc]);
        }
        let comments = vec![format!("tail_diameter={} divergent={}", rep.tail_diameter, rep.divergent)];
        write_file(&path, &csv(&comments, &["R", "re", "im", "increment"], lrows))?;
        summary["lindelof"] = json!({"out": path.display().to_string(), "tail_decreasing": rep.tail_decreasing(3), "divergent": rep.divergent});
    }
    match out {
        Some(path) => {
            write_file(&path, &table)?;
            summary["out"] = json!(path.display().to_string());
            print_json(summary)
        }
        None => io::emit(&table),
    }
}

fn cmd_fixtures() -> Result<()> {
    let width = FIXTURES.iter().map(|f| f.name.len()).max().unwrap_or(0);
    for f in FIXTURES {
        println!("{:width$}  {:28}  {}", f.name, f.params, f.summary);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Indicator { m, modified, out } => cmd_indicator(&m, modified, out),
        Command::Balance { m } => cmd_balance(&m),
        Command::Sigma { m, multipliers } => cmd_sigma(&m, &multipliers),
        Command::Bounds { theorem, rho, emit_extremals, grid } => cmd_bounds(&theorem, rho, emit_extremals, grid),
        Command::Randomize { m, density, count, seed, out } => cmd_randomize(&m, density, count, seed, out),
        Command::Classify { m, density, normalize } => cmd_classify(&m, density, normalize),
        Command::VerifyDensity { points, arcs, checkpoints, measure, rho, density, out, lindelof_out } => {
            cmd_verify(&points, &arcs, &checkpoints, measure.as_deref(), rho, density, out, lindelof_out)
        }
        Command::Fixtures { action: FixtureAction::List } => cmd_fixtures(),
    }
}

fn is_validation(err: &anyhow::Error) -> bool {
    if err.downcast_ref::<Invalid>().is_some() {
        return true;
    }
    err.chain().any(|e| e.downcast_ref::<indicatorlab::Error>().is_some_and(|e| e.is_validation()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_validation(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

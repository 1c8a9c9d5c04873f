//! The `flatlab` command line.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use flatlab_core::canonical::canonical_form_marked;
use flatlab_core::cylinders::{decompose, Direction};
use flatlab_core::dynamics::{flow, tremor};
use flatlab_core::io::SurfaceJson;
use flatlab_core::kz::OrigamiOrbit;
use flatlab_core::{Mat2, Word};
use flatlab_rig::{EmpiricalFiberDistribution, FiberSample, LatticeContext, Representation};
use serde::Serialize;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::experiments::{self, BanachRequest};
use crate::report::{cells_csv, to_json, write_text};
use crate::surfaces::SurfaceRef;

#[derive(Parser, Debug)]
#[command(name = "flatlab", version, about = "Translation surfaces, twist tori and cocycle experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Surface construction.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Cylinder decompositions.
    #[command(subcommand)]
    Cyl(CylCmd),
    /// `g_t u(s)` applied to a surface, reported in canonical form.
    Flow {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tremor along a horizontal Twist⁰ basis class.
    Tremor {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 0)]
        class: usize,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Kontsevich–Zorich matrices on origamis.
    #[command(subcommand)]
    Kz(KzCmd),
    /// Suspension bundle simulations.
    #[command(subcommand)]
    Rig(RigCmd),
    /// Exact arithmetic checks.
    #[command(subcommand)]
    Arith(ArithCmd),
    /// Twist-torus experiments.
    #[command(subcommand)]
    Exp(ExpCmd),
}

#[derive(Subcommand, Debug)]
pub enum SurfaceCmd {
    /// Builds a surface and reports its stratum.
    Build {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum DirArg {
    Horizontal,
    Vertical,
}

#[derive(Subcommand, Debug)]
pub enum CylCmd {
    Decompose {
        #[arg(long)]
        surface: String,
        #[arg(long, value_enum, default_value_t = DirArg::Horizontal)]
        direction: DirArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum KzCmd {
    /// Homology action of a Veech group element given as a word in `T, t, S, s`.
    Generator {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 10_000)]
        max_orbit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum RigCmd {
    /// Pushes the unit horocycle arc through the identity by `g_t`.
    Push {
        #[arg(long, default_value = "std2")]
        rep: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// Comma-separated starting fiber vector.
        #[arg(long)]
        fiber: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dictionary discrepancy between two pushed distributions.
    TestAInvariance {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// TV distance of the finite-group marginal to uniform.
    BoundedImage {
        #[arg(long, default_value = "mod2")]
        rep: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ArithCmd {
    TraceField {
        #[arg(long)]
        n: usize,
    },
    Matyoc {
        #[arg(long)]
        m: usize,
    },
    /// Field generated by the circumference ratios of the horizontal cylinders.
    Circumference {
        #[arg(long)]
        surface: String,
    },
}

#[derive(Args, Debug)]
pub struct ExpOut {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `outputs.report` of the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `outputs.csv` of the config.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum ExpCmd {
    Density(ExpOut),
    Support(ExpOut),
    /// Unit-torus horocycle baseline for the density run.
    Baseline(ExpOut),
    Banach {
        #[command(flatten)]
        io: ExpOut,
        #[arg(long)]
        observable: String,
        #[arg(long)]
        window: usize,
        #[arg(long)]
        start: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 8)]
        base_points: usize,
        #[arg(long)]
        reference: Option<f64>,
        #[arg(long)]
        bootstrap_reference: bool,
    },
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<String> {
    let text = to_json(value)?;
    match out {
        Some(p) => {
            write_text(p, &text)?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(text),
    }
}

fn parse_vec(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| HarnessError::InvalidConfig(format!("bad number {x:?}"))))
        .collect()
}

fn context(rep: &str) -> Result<LatticeContext> {
    Ok(LatticeContext::new(Representation::parse(rep)?)?)
}

fn default_fiber(dim: usize) -> Vec<f64> {
    (0..dim).map(|i| (1.0 + i as f64).sqrt()).collect()
}

fn read_dist(p: &Path) -> Result<EmpiricalFiberDistribution> {
    let text = std::fs::read_to_string(p).map_err(|source| HarnessError::Io { path: p.display().to_string(), source })?;
    Ok(serde_json::from_str(&text)?)
}

fn paths(io: &ExpOut, cfg: &ExperimentConfig) -> (Option<PathBuf>, Option<PathBuf>) {
    (
        io.out.clone().or_else(|| cfg.outputs.report.as_ref().map(PathBuf::from)),
        io.csv.clone().or_else(|| cfg.outputs.csv.as_ref().map(PathBuf::from)),
    )
}

fn finish<T: Serialize>(report: &T, csv: Option<String>, out: Option<PathBuf>, csv_path: Option<PathBuf>) -> Result<String> {
    let mut msg = emit(report, out.as_deref())?;
    if let (Some(text), Some(p)) = (csv, csv_path) {
        write_text(&p, &text)?;
        msg += &format!("wrote {}\n", p.display());
    }
    Ok(msg)
}

/// Runs a parsed command and returns what it prints.
pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Surface(SurfaceCmd::Build { surface, out }) => {
            let s = SurfaceRef::parse(&surface)?.surface()?;
            let st = s.stratum()?;
            let v = json!({
                "stratum": st,
                "genus": st.genus(),
                "area": s.area(),
                "vertices": s.num_vertices(),
                "surface": SurfaceJson::from(&s),
            });
            emit(&v, out.as_deref())
        }
        Command::Cyl(CylCmd::Decompose { surface, direction, out }) => {
            let m = SurfaceRef::parse(&surface)?.marked()?;
            let dir = match direction {
                DirArg::Horizontal => Direction::Horizontal,
                DirArg::Vertical => Direction::Vertical,
            };
            let d = decompose(&m, dir)?;
            let v = json!({
                "moduli": d.moduli(),
                "twist_periods": d.twist_torus_lattice().periods,
                "decomposition": d,
            });
            emit(&v, out.as_deref())
        }
        Command::Flow { surface, t, s, out } => {
            let m = SurfaceRef::parse(&surface)?.marked()?;
            let cf = canonical_form_marked(&flow(&m, t, s)?)?;
            emit(&json!({ "t": t, "s": s, "canonical_form": cf }), out.as_deref())
        }
        Command::Tremor { surface, class, tau, out } => {
            let m = SurfaceRef::parse(&surface)?.marked()?;
            let d = decompose(&m, Direction::Horizontal)?;
            let beta = d.twist0.get(class).ok_or_else(|| {
                HarnessError::InvalidConfig(format!("Twist⁰ has dimension {}, asked for class {class}", d.twist0.len()))
            })?;
            let cf = canonical_form_marked(&tremor(&d, beta, tau)?)?;
            emit(&json!({ "beta": beta, "tau": tau, "canonical_form": cf }), out.as_deref())
        }
        Command::Kz(KzCmd::Generator { surface, word, max_orbit, out }) => {
            let o = SurfaceRef::parse(&surface)?
                .origami()?
                .ok_or_else(|| HarnessError::InvalidConfig("KZ matrices are computed on origamis".into()))?;
            let orbit = OrigamiOrbit::build(&o, max_orbit)?;
            let g = Word::parse(&word)?.product();
            let a = orbit.generator_action(0, g)?;
            let v = json!({
                "word": word,
                "orbit_size": orbit.len(),
                "action": a,
                "row_convention": a.row_convention(),
                "cohomology": a.cohomology(),
            });
            emit(&v, out.as_deref())
        }
        Command::Rig(RigCmd::Push { rep, t, n, seed, fiber, out }) => {
            let ctx = context(&rep)?;
            let v = match fiber {
                Some(f) => parse_vec(&f)?,
                None => default_fiber(ctx.rep.dim()),
            };
            let z = FiberSample::new(&ctx, &Mat2::IDENTITY, &v)?;
            emit(&flatlab_rig::push_arc(&ctx, &z, t, n, seed)?, out.as_deref())
        }
        Command::Rig(RigCmd::TestAInvariance { first, second, delta, out }) => {
            let r = flatlab_rig::a_invariance_test(&read_dist(&first)?, &read_dist(&second)?, delta)?;
            emit(&r, out.as_deref())
        }
        Command::Rig(RigCmd::BoundedImage { rep, t, n, seed, out }) => {
            let ctx = context(&rep)?;
            let z = FiberSample::new(&ctx, &Mat2::IDENTITY, &default_fiber(ctx.rep.dim()))?;
            emit(&flatlab_rig::bounded_image_test(&ctx, &z, t, n, seed)?, out.as_deref())
        }
        Command::Arith(ArithCmd::TraceField { n }) => emit(&flatlab_arith::trace_field_degree(n)?, None),
        Command::Arith(ArithCmd::Matyoc { m }) => emit(&flatlab_arith::matheus_yoccoz_check(m)?, None),
        Command::Arith(ArithCmd::Circumference { surface }) => {
            let d = decompose(&SurfaceRef::parse(&surface)?.marked()?, Direction::Horizontal)?;
            emit(&flatlab_arith::circumference_field(&d)?, None)
        }
        Command::Exp(ExpCmd::Density(io)) => {
            let cfg = ExperimentConfig::load(&io.config)?;
            let r = experiments::run_density_experiment(&cfg)?;
            let csv = cells_csv(r.rows.iter().map(|row| (row.t, &row.cells[..])))?;
            let (out, csv_path) = paths(&io, &cfg);
            finish(&r, Some(csv), out, csv_path)
        }
        Command::Exp(ExpCmd::Baseline(io)) => {
            let cfg = ExperimentConfig::load(&io.config)?;
            let r = experiments::run_horocycle_baseline(&cfg)?;
            let csv = cells_csv(r.rows.iter().map(|row| (row.t, &row.cells[..])))?;
            let (out, csv_path) = paths(&io, &cfg);
            finish(&r, Some(csv), out, csv_path)
        }
        Command::Exp(ExpCmd::Support(io)) => {
            let cfg = ExperimentConfig::load(&io.config)?;
            let r = experiments::run_full_support_probe(&cfg, &cfg.support_cells())?;
            let csv = cells_csv(r.rows.iter().map(|row| (row.t, &row.cells[..])))?;
            let (out, csv_path) = paths(&io, &cfg);
            finish(&r, Some(csv), out, csv_path)
        }
        Command::Exp(ExpCmd::Banach { io, observable, window, start, epsilon, base_points, reference, bootstrap_reference }) => {
            let cfg = ExperimentConfig::load(&io.config)?;
            let req = BanachRequest { observable, window, start, epsilon, base_points, reference, bootstrap_reference };
            let r = experiments::run_banach_average(&cfg, &req)?;
            let (out, _) = paths(&io, &cfg);
            finish(&r, None, out, None)
        }
    }
}

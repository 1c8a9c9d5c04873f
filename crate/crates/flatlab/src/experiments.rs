//! Twist-torus pushes and the statistics reported on them.

use std::collections::BTreeSet;

use flatlab_core::cylinders::{decompose, CylinderDecomposition, Direction};
use flatlab_core::dynamics::{flow, twist_torus_sample, TwistTorusPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::proxy::{spectrum, torus_spectrum, Exclusion, ProxyGrid, PROXY_ID};
use crate::surfaces::SurfaceRef;

pub const MAX_EXCLUDED_FRACTION: f64 = 0.05;

pub const NOTE: &str = "proxy statistics with artifact-declared thresholds; not a quantitative test of the asymptotic statements";

/// A surface ready to be pushed: its horizontal cylinders and twist-torus samples.
pub struct Prepared {
    pub cfg: ExperimentConfig,
    pub decomposition: CylinderDecomposition,
    pub unit_torus: bool,
    pub points: Vec<TwistTorusPoint>,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let sref = SurfaceRef::parse(&cfg.surface)?;
        let decomposition = decompose(&sref.marked()?, Direction::Horizontal)?;
        let points = twist_torus_sample(&decomposition, cfg.seed, cfg.samples);
        Ok(Prepared { cfg: cfg.clone(), decomposition, unit_torus: sref.is_unit_torus()?, points })
    }

    fn check_cap(&self, t: f64) -> Result<()> {
        if t.abs() > self.cfg.t_cap {
            return Err(HarnessError::InvalidConfig(format!(
                "t = {t} exceeds the polygonal-flow cap {}",
                self.cfg.t_cap
            )));
        }
        Ok(())
    }

    /// Spectrum of `g_t u(s)·x` for the twist-torus point `x`, through the polygon flow.
    pub fn push(&self, x: &TwistTorusPoint, t: f64, s: f64) -> std::result::Result<Vec<f64>, Exclusion> {
        let fail = |e: flatlab_core::FlatError| Exclusion::Failed(e.to_string());
        let m = x.realize(&self.decomposition).map_err(fail)?;
        let m = flow(&m, t, s).map_err(fail)?;
        spectrum(&m, self.cfg.spectrum_len, self.cfg.systole_floor)
    }

    /// Same as [`Prepared::push`] on the unit torus, through exact lattice reduction; valid at any `t`.
    pub fn push_lattice(&self, x: &TwistTorusPoint, t: f64, s: f64) -> std::result::Result<Vec<f64>, Exclusion> {
        let l = torus_spectrum(t, s + x.coords[0], self.cfg.spectrum_len);
        if l[0] < self.cfg.systole_floor {
            return Err(Exclusion::Thin(l[0]));
        }
        Ok(l)
    }

    fn push_any(&self, x: &TwistTorusPoint, t: f64, s: f64) -> Result<std::result::Result<Vec<f64>, Exclusion>> {
        if self.unit_torus {
            Ok(self.push_lattice(x, t, s))
        } else {
            self.check_cap(t)?;
            Ok(self.push(x, t, s))
        }
    }

    /// Pushes every sample by `g_t`, failing when more than 5% are excluded.
    pub fn pushed(&self, t: f64) -> Result<Pushed> {
        self.check_cap(t)?;
        let res: Vec<_> = self.points.par_iter().map(|x| self.push(x, t, 0.0)).collect();
        Pushed::collect(t, res)
    }
}

/// Spectra at one time, with the exclusions.
pub struct Pushed {
    pub t: f64,
    pub spectra: Vec<Vec<f64>>,
    pub thin: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl Pushed {
    fn collect(t: f64, res: Vec<std::result::Result<Vec<f64>, Exclusion>>) -> Result<Self> {
        let total = res.len();
        let mut p = Pushed { t, spectra: Vec::with_capacity(total), thin: 0, failed: 0, first_failure: None };
        for r in res {
            match r {
                Ok(s) => p.spectra.push(s),
                Err(Exclusion::Thin(_)) => p.thin += 1,
                Err(Exclusion::Failed(m)) => {
                    p.failed += 1;
                    p.first_failure.get_or_insert(m);
                }
            }
        }
        let excluded = p.thin + p.failed;
        if excluded as f64 > MAX_EXCLUDED_FRACTION * total as f64 {
            return Err(HarnessError::TooManyExclusions { t, excluded, total });
        }
        Ok(p)
    }

    pub fn excluded(&self) -> usize {
        self.thin + self.failed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellMass {
    pub cell: usize,
    pub mass: f64,
    pub stderr: f64,
}

fn cell_masses(grid: &ProxyGrid, spectra: &[Vec<f64>]) -> Vec<CellMass> {
    let mut counts = vec![0usize; grid.cells()];
    for s in spectra {
        if let Some(c) = grid.cell(s) {
            counts[c] += 1;
        }
    }
    let n = spectra.len().max(1) as f64;
    counts
        .iter()
        .enumerate()
        .map(|(cell, &k)| {
            let p = k as f64 / n;
            CellMass { cell, mass: p, stderr: (p * (1.0 - p) / n).sqrt() }
        })
        .collect()
}

/// Cells within `resolution` half-widths of each spectrum.
fn covered_by(grid: &ProxyGrid, spec: &[f64], resolution: f64) -> Vec<usize> {
    (0..grid.cells()).filter(|&c| grid.distance_to_centre(spec, c) <= resolution).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub t: f64,
    pub samples: usize,
    pub excluded_thin: usize,
    pub excluded_failed: usize,
    pub covered_cells: usize,
    pub covering_fraction: f64,
    /// Bootstrap standard error of the covering fraction.
    pub stderr: f64,
    /// Fraction of samples whose spectrum lies within 0.05 (sup of log-ratios) of the pushed
    /// untwisted horocycle `g_t u(s)·q`, which stays on the `SL(2,R)`-orbit of `q`.
    pub near_base_orbit: f64,
    pub cells: Vec<CellMass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    /// `f(t_{i+1}) >= f(t_i) - 2σ` for all consecutive pairs.
    pub non_decreasing_within_2sigma: bool,
    /// Last minus first covering fraction.
    pub gain: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub schema_version: u32,
    pub kind: String,
    pub proxy: String,
    pub note: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub grid: ProxyGrid,
    pub rows: Vec<DensityRow>,
    pub trend: Trend,
}

fn bootstrap_stderr(covers: &[Vec<usize>], cells: usize, reps: usize, seed: u64) -> f64 {
    if reps < 2 || covers.is_empty() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = covers.len();
    let fr: Vec<f64> = (0..reps)
        .map(|_| {
            let mut hit = vec![false; cells];
            for _ in 0..n {
                for &c in &covers[rng.gen_range(0..n)] {
                    hit[c] = true;
                }
            }
            hit.iter().filter(|h| **h).count() as f64 / cells as f64
        })
        .collect();
    let m = fr.iter().sum::<f64>() / reps as f64;
    (fr.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt()
}

const NEAR_ORBIT: f64 = 0.05;
const ORBIT_POINTS: usize = 256;

fn near(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x / y).ln().abs() <= NEAR_ORBIT)
}

fn trend(rows: &[DensityRow]) -> Trend {
    let ok = rows.windows(2).all(|w| {
        let s = (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        w[1].covering_fraction >= w[0].covering_fraction - 2.0 * s
    });
    let gain = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => b.covering_fraction - a.covering_fraction,
        _ => 0.0,
    };
    Trend { non_decreasing_within_2sigma: ok, gain }
}

fn density_row(cfg: &ExperimentConfig, grid: &ProxyGrid, pushed: &Pushed, orbit: &[Vec<f64>], index: usize) -> DensityRow {
    let covers: Vec<Vec<usize>> = pushed.spectra.par_iter().map(|s| covered_by(grid, s, cfg.resolution)).collect();
    let covered: BTreeSet<usize> = covers.iter().flatten().copied().collect();
    let near_count = pushed.spectra.par_iter().filter(|s| orbit.iter().any(|o| near(s, o))).count();
    let n = pushed.spectra.len();
    DensityRow {
        t: pushed.t,
        samples: n + pushed.excluded(),
        excluded_thin: pushed.thin,
        excluded_failed: pushed.failed,
        covered_cells: covered.len(),
        covering_fraction: covered.len() as f64 / grid.cells() as f64,
        stderr: bootstrap_stderr(&covers, grid.cells(), cfg.bootstrap, cfg.seed.wrapping_add(index as u64 + 1)),
        near_base_orbit: near_count as f64 / n.max(1) as f64,
        cells: cell_masses(grid, &pushed.spectra),
    }
}

/// Covering of the proxy grid by `g_t·𝕋(ω)` for each `t` of the config.
pub fn run_density_experiment(cfg: &ExperimentConfig) -> Result<DensityReport> {
    let prep = Prepared::new(cfg)?;
    let grid = cfg.density_grid();
    let zero = TwistTorusPoint { coords: vec![0.0; prep.decomposition.len()] };
    let mut rows = Vec::new();
    for (i, &t) in cfg.times.iter().enumerate() {
        let pushed = prep.pushed(t)?;
        let orbit: Vec<Vec<f64>> = (0..ORBIT_POINTS)
            .into_par_iter()
            .filter_map(|j| prep.push(&zero, t, (j as f64 + 0.5) / ORBIT_POINTS as f64).ok())
            .collect();
        rows.push(density_row(cfg, &grid, &pushed, &orbit, i));
    }
    Ok(DensityReport {
        schema_version: crate::config::SCHEMA_VERSION,
        kind: "density".into(),
        proxy: PROXY_ID.into(),
        note: NOTE.into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        trend: trend(&rows),
        grid,
        rows,
    })
}

/// The unit-torus density run redone with direct lattice pushes of the closed horocycle.
pub fn run_horocycle_baseline(cfg: &ExperimentConfig) -> Result<DensityReport> {
    let prep = Prepared::new(cfg)?;
    if !prep.unit_torus {
        return Err(HarnessError::InvalidConfig("the horocycle baseline needs the unit torus".into()));
    }
    let grid = cfg.density_grid();
    let zero = TwistTorusPoint { coords: vec![0.0] };
    let mut rows = Vec::new();
    for (i, &t) in cfg.times.iter().enumerate() {
        let res = prep.points.par_iter().map(|x| prep.push_lattice(&zero, t, x.coords[0])).collect();
        let pushed = Pushed::collect(t, res)?;
        let orbit: Vec<Vec<f64>> = (0..ORBIT_POINTS)
            .filter_map(|j| prep.push_lattice(&zero, t, (j as f64 + 0.5) / ORBIT_POINTS as f64).ok())
            .collect();
        rows.push(density_row(cfg, &grid, &pushed, &orbit, i));
    }
    Ok(DensityReport {
        schema_version: crate::config::SCHEMA_VERSION,
        kind: "horocycle-baseline".into(),
        proxy: PROXY_ID.into(),
        note: NOTE.into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        trend: trend(&rows),
        grid,
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportRow {
    pub t: f64,
    pub samples: usize,
    pub excluded: usize,
    pub cells: Vec<CellMass>,
    pub min_mass: f64,
    /// Cells whose mass is within two standard errors of zero.
    pub flagged: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub schema_version: u32,
    pub kind: String,
    pub proxy: String,
    pub note: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub grid: ProxyGrid,
    pub rows: Vec<SupportRow>,
}

/// Mass of `(g_t)_*μ_𝕋` in each cell of `cells`.
pub fn run_full_support_probe(cfg: &ExperimentConfig, cells: &ProxyGrid) -> Result<SupportReport> {
    let prep = Prepared::new(cfg)?;
    let mut rows = Vec::new();
    for &t in &cfg.times {
        let pushed = if prep.unit_torus {
            Pushed::collect(t, prep.points.par_iter().map(|x| prep.push_lattice(x, t, 0.0)).collect())?
        } else {
            prep.pushed(t)?
        };
        let masses = cell_masses(cells, &pushed.spectra);
        let flagged = masses.iter().filter(|m| m.mass - 2.0 * m.stderr <= 0.0).map(|m| m.cell).collect();
        rows.push(SupportRow {
            t,
            samples: pushed.spectra.len() + pushed.excluded(),
            excluded: pushed.excluded(),
            min_mass: masses.iter().map(|m| m.mass).fold(f64::INFINITY, f64::min),
            cells: masses,
            flagged,
        });
    }
    Ok(SupportReport {
        schema_version: crate::config::SCHEMA_VERSION,
        kind: "support".into(),
        proxy: PROXY_ID.into(),
        note: NOTE.into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        grid: cells.clone(),
        rows,
    })
}

/// Observables on proxy space.
#[derive(Clone, Debug, PartialEq)]
pub enum Observable {
    Constant(f64),
    /// Tent of radius one cell width around the centre of a density-grid cell.
    Bump(usize),
}

impl Observable {
    /// `const`, `const:<c>` or `bump:<cell>`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || HarnessError::UnknownObservable(s.into());
        if s == "const" {
            return Ok(Observable::Constant(1.0));
        }
        if let Some(c) = s.strip_prefix("const:") {
            return c.parse().map(Observable::Constant).map_err(|_| bad());
        }
        if let Some(c) = s.strip_prefix("bump:") {
            return c.parse().map(Observable::Bump).map_err(|_| bad());
        }
        Err(bad())
    }

    pub fn eval(&self, grid: &ProxyGrid, spec: &[f64]) -> f64 {
        match self {
            Observable::Constant(c) => *c,
            Observable::Bump(c) => (1.0 - grid.distance_to_centre(spec, *c) / 2.0).max(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanachRequest {
    pub observable: String,
    pub window: usize,
    pub start: usize,
    pub epsilon: f64,
    /// Twist-torus points `x`; `cfg.samples` is the number of arc points per horocycle average.
    pub base_points: usize,
    /// Long-run value of `∫ f`; estimated when `None` and `bootstrap_reference` is set.
    pub reference: Option<f64>,
    pub bootstrap_reference: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BanachReport {
    pub schema_version: u32,
    pub kind: String,
    pub proxy: String,
    pub note: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub request: BanachRequest,
    pub reference: f64,
    pub reference_time: Option<f64>,
    pub times: Vec<usize>,
    /// `averages[x][ℓ - start]`.
    pub averages: Vec<Vec<f64>>,
    /// Per point, the fraction of times in the window within `epsilon` of the reference.
    pub fractions: Vec<f64>,
    pub mean_fraction: f64,
    pub min_fraction: f64,
    pub excluded: usize,
}

/// Fraction of integer times in `[S, S+L]` at which horocycle averages are near `∫ f`.
pub fn run_banach_average(cfg: &ExperimentConfig, req: &BanachRequest) -> Result<BanachReport> {
    let obs = Observable::parse(&req.observable)?;
    let mut cfg_pts = cfg.clone();
    cfg_pts.samples = cfg.samples.max(req.base_points);
    let prep = Prepared::new(&cfg_pts)?;
    let grid = cfg.density_grid();
    let xs: Vec<TwistTorusPoint> = prep.points.iter().take(req.base_points.max(1)).cloned().collect();
    let k = cfg.samples;
    let times: Vec<usize> = (req.start..=req.start + req.window).collect();
    let mut excluded = 0usize;
    let mut average = |xi: usize, t: f64, k: usize| -> Result<f64> {
        let x = &xs[xi];
        // stratified arc points; rational s would land on closed horocycles
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(((xi as u64) << 32) ^ t.to_bits());
        let s: Vec<f64> = (0..k).map(|j| (j as f64 + rng.gen::<f64>()) / k as f64).collect();
        let vals: Vec<_> = s.par_iter().map(|&s| prep.push_any(x, t, s)).collect::<Result<Vec<_>>>()?;
        let ok: Vec<f64> = vals.iter().filter_map(|r| r.as_ref().ok()).map(|s| obs.eval(&grid, s)).collect();
        let bad = k - ok.len();
        if bad as f64 > MAX_EXCLUDED_FRACTION * k as f64 {
            return Err(HarnessError::TooManyExclusions { t, excluded: bad, total: k });
        }
        excluded += bad;
        Ok(ok.iter().sum::<f64>() / ok.len().max(1) as f64)
    };
    let (reference, reference_time) = match (req.reference, &obs) {
        (Some(r), _) => (r, None),
        (None, Observable::Constant(c)) => (*c, None),
        (None, _) if req.bootstrap_reference => {
            let t_ref = (req.start + req.window) as f64 + 5.0;
            let mut acc = 0.0;
            for xi in 0..xs.len() {
                acc += average(xi, t_ref, 4 * k)?;
            }
            (acc / xs.len() as f64, Some(t_ref))
        }
        (None, _) => return Err(HarnessError::MustBootstrapReference(req.observable.clone())),
    };
    let mut averages = Vec::with_capacity(xs.len());
    for xi in 0..xs.len() {
        let row = times.iter().map(|&l| average(xi, l as f64, k)).collect::<Result<Vec<_>>>()?;
        averages.push(row);
    }
    let fractions: Vec<f64> = averages
        .iter()
        .map(|row| row.iter().filter(|a| (*a - reference).abs() < req.epsilon).count() as f64 / row.len() as f64)
        .collect();
    Ok(BanachReport {
        schema_version: crate::config::SCHEMA_VERSION,
        kind: "banach".into(),
        proxy: PROXY_ID.into(),
        note: NOTE.into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        request: req.clone(),
        reference,
        reference_time,
        times,
        mean_fraction: fractions.iter().sum::<f64>() / fractions.len() as f64,
        min_fraction: fractions.iter().copied().fold(f64::INFINITY, f64::min),
        fractions,
        averages,
        excluded,
    })
}

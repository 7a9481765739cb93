//! JSON-configured experiment runner writing CSV.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::competitor::{scan_gap_1d, scan_gap_2d, GapScanRow};
use crate::energy::{
    alphas_from_sigmas, f_one, f_s, f_s_alpha, f_star, EnergyBreakdown, PerimeterModel, SigmaWeights,
};
use crate::error::{LabError, Result};
use crate::geometry::{CellRect, Domain1D, Frame2D, GridPartition2D, LipschitzGraph, Partition1D, PhaseLabel};
use crate::kernel1d::{FractionalOrder, LineModel};
use crate::kernel2d::GridModel;
use crate::limits::{
    cross_interaction_decay_1d, cross_interaction_decay_2d, s_sweep_1d, s_sweep_2d, separate_phases_1d,
    separate_phases_2d, DecayTable, SweepRow, SweepTarget,
};
use crate::minimize::{exhaustive_1d, greedy_descent, MinimizeReport};

pub const VERSION_TAG: &str = "nonlocal-cluster-lab v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Alphas,
    Energy,
    StripScan,
    SSweep,
    Minimize,
    Separate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Alphas => "alphas",
            Command::Energy => "energy",
            Command::StripScan => "strip-scan",
            Command::SSweep => "s-sweep",
            Command::Minimize => "minimize",
            Command::Separate => "separate",
        }
    }
}

/// Uniform grid with omega and a label string (row `j = 0` first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub origin: [f64; 2],
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    /// `[i0, j0, i1, j1]`, half-open.
    pub omega: [usize; 4],
    pub labels: String,
}

impl GridSpec {
    pub fn build(&self) -> Result<GridPartition2D> {
        let frame = Frame2D::new((self.origin[0], self.origin[1]), self.h, self.nx, self.ny)?;
        let [i0, j0, i1, j1] = self.omega;
        GridPartition2D::from_label_string(frame, CellRect::new(i0, j0, i1, j1)?, &self.labels)
    }
}

/// Lipschitz graph bounding the strip region in 2D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    pub r: f64,
    pub samples: Vec<f64>,
    pub big_r: f64,
    pub c0: f64,
    pub center: [f64; 2],
}

impl PsiSpec {
    pub fn build(&self) -> Result<LipschitzGraph> {
        LipschitzGraph::new(self.r, self.samples.clone(), self.big_r, self.c0, (self.center[0], self.center[1]))
    }
}

fn default_far_cutoff() -> usize {
    8
}

fn default_near_depth() -> u32 {
    6
}

fn default_max_sweeps() -> usize {
    100
}

fn default_grid_m() -> usize {
    16
}

fn default_target() -> String {
    "energy".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    pub sigma: SigmaWeights,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Partition1D>,
    /// `[a, b]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_list: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<PsiSpec>,
    /// `energy`, or `perimeter:-1`, `perimeter:0`, `perimeter:+1`.
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_grid_m")]
    pub grid_m: usize,
    #[serde(default = "default_max_sweeps")]
    pub max_sweeps: usize,
    #[serde(default = "default_far_cutoff")]
    pub far_cutoff: usize,
    #[serde(default = "default_near_depth")]
    pub near_depth: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

enum Cluster {
    Line(Partition1D, Domain1D),
    Grid(GridPartition2D),
}

fn required<T: Clone>(v: &Option<T>, field: &str) -> Result<T> {
    v.clone().ok_or_else(|| LabError::invalid(field, "required for this command"))
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::invalid("config", e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Pretty JSON with every default written out.
    pub fn normalized(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    fn order(&self) -> Result<FractionalOrder> {
        FractionalOrder::new(required(&self.s, "s")?)
    }

    fn s_values(&self) -> Result<Vec<f64>> {
        match (&self.s_list, self.s) {
            (Some(l), _) => Ok(l.clone()),
            (None, Some(s)) => Ok(vec![s]),
            (None, None) => Err(LabError::invalid("s_list", "required for this command")),
        }
    }

    fn cluster(&self) -> Result<Cluster> {
        match (&self.partition, &self.grid) {
            (Some(_), Some(_)) => Err(LabError::invalid("grid", "give either partition or grid, not both")),
            (Some(p), None) => {
                let [a, b] = required(&self.domain, "domain")?;
                Ok(Cluster::Line(p.clone(), Domain1D::new(a, b)?))
            }
            (None, Some(g)) => Ok(Cluster::Grid(g.build()?)),
            (None, None) => Err(LabError::invalid("partition", "a partition or a grid is required")),
        }
    }

    fn sweep_target(&self) -> Result<SweepTarget> {
        match self.target.as_str() {
            "energy" => Ok(SweepTarget::Energy),
            other => {
                let label = other
                    .strip_prefix("perimeter:")
                    .and_then(|v| v.parse::<i8>().ok())
                    .and_then(|v| PhaseLabel::from_value(v).ok());
                label
                    .map(SweepTarget::Perimeter)
                    .ok_or_else(|| LabError::invalid("target", format!("unknown target {other:?}")))
            }
        }
    }

    fn header(&self) -> String {
        let s = match (&self.s_list, self.s) {
            (Some(l), _) => l.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
            (None, Some(s)) => s.to_string(),
            (None, None) => "none".to_string(),
        };
        format!("# {VERSION_TAG}, command={}, s={s}", self.command.name())
    }

    fn grid_model(&self, s: FractionalOrder, g: &GridPartition2D) -> Result<GridModel> {
        GridModel::build(s, g.frame(), self.far_cutoff, self.near_depth)
    }
}

fn csv<T>(header: &str, rows: impl IntoIterator<Item = T>) -> Vec<String>
where
    T: Display,
{
    std::iter::once(header.to_string())
        .chain(rows.into_iter().map(|r| r.to_string()))
        .collect()
}

fn breakdowns<M: PerimeterModel>(model: &M, sw: &SigmaWeights, c: &M::Cluster) -> Result<Vec<EnergyBreakdown>> {
    Ok(vec![
        f_s(model, sw, c)?,
        f_s_alpha(model, &alphas_from_sigmas(sw), c)?,
        f_one(model, sw, c, false),
        f_one(model, sw, c, true),
        f_star(model, sw, c, false),
        f_star(model, sw, c, true),
    ])
}

/// Default ladder `ε₀·2^{−k}`, `k = 1..8`, with `ε₀` the strip scale; in 2D
/// entries below `4h` are dropped.
fn default_ladder(eps0: f64, floor: f64) -> Vec<f64> {
    (1..=8).map(|k| eps0 * 0.5f64.powi(k)).filter(|&e| e >= floor).collect()
}

fn scan_rows(rows: &[GapScanRow]) -> Vec<String> {
    csv(GapScanRow::CSV_HEADER, rows.iter().map(|r| r.csv_row()))
}

/// Runs one experiment and returns the CSV lines, comment first.
pub fn run_config(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let sw = &cfg.sigma;
    let body = match cfg.command {
        Command::Alphas => {
            let a = alphas_from_sigmas(sw);
            csv(
                "alpha_m1,alpha_0,alpha_1,triangle",
                [format!("{},{},{},{}", a.a_m1, a.a_0, a.a_1, a.triangle_holds())],
            )
        }
        Command::Energy => {
            let s = cfg.order()?;
            let rows = match cfg.cluster()? {
                Cluster::Line(p, dom) => breakdowns(&LineModel::new(s, dom), sw, &p)?,
                Cluster::Grid(g) => breakdowns(&cfg.grid_model(s, &g)?, sw, &g)?,
            };
            csv(EnergyBreakdown::CSV_HEADER, rows.iter().map(|r| r.csv_row()))
        }
        Command::StripScan => {
            let s = cfg.order()?;
            match cfg.cluster()? {
                Cluster::Line(p, dom) => {
                    let x0 = required(&cfg.x0, "x0")?;
                    let eps_list = match &cfg.eps_list {
                        Some(l) => l.clone(),
                        None => {
                            let clearance = p
                                .breakpoints()
                                .iter()
                                .filter(|&&x| x != x0)
                                .map(|&x| (x - x0).abs())
                                .fold(f64::INFINITY, f64::min);
                            let e0 = crate::competitor::epsilon_zero_1d(s, sw, clearance, dom.dist_to_boundary(x0))?;
                            default_ladder(e0.value, 0.0)
                        }
                    };
                    scan_rows(&scan_gap_1d(s, sw, &p, &dom, x0, &eps_list)?)
                }
                Cluster::Grid(g) => {
                    let psi = required(&cfg.psi, "psi")?.build()?;
                    let eps_list = match &cfg.eps_list {
                        Some(l) => l.clone(),
                        None => default_ladder(0.5f64.min(0.5 * psi.big_r()), 4.0 * g.frame().h()),
                    };
                    scan_rows(&scan_gap_2d(&cfg.grid_model(s, &g)?, sw, &g, &psi, &eps_list)?)
                }
            }
        }
        Command::SSweep => {
            let s_list = cfg.s_values()?;
            let target = cfg.sweep_target()?;
            let rows = match cfg.cluster()? {
                Cluster::Line(p, dom) => s_sweep_1d(sw, &p, &dom, &s_list, target)?,
                Cluster::Grid(g) => s_sweep_2d(sw, &g, &s_list, target, cfg.far_cutoff, cfg.near_depth)?,
            };
            csv(SweepRow::CSV_HEADER, rows.iter().map(|r| r.csv_row()))
        }
        Command::Minimize => {
            let s = cfg.order()?;
            let row = match cfg.cluster()? {
                Cluster::Line(p, dom) => exhaustive_1d(s, sw, &dom, &p, cfg.grid_m)?.csv_row(),
                Cluster::Grid(g) => greedy_descent(&cfg.grid_model(s, &g)?, sw, &g, cfg.max_sweeps)?.csv_row(),
            };
            csv(MinimizeReport::<()>::CSV_HEADER, [row])
        }
        Command::Separate => {
            let eps = required(&cfg.eps, "eps")?;
            let s_list = cfg.s_values()?;
            let table: DecayTable = match cfg.cluster()? {
                Cluster::Line(p, dom) => cross_interaction_decay_1d(&separate_phases_1d(&p, &dom, eps)?, &dom, eps, &s_list)?,
                Cluster::Grid(g) => cross_interaction_decay_2d(
                    &separate_phases_2d(&g, eps)?,
                    eps,
                    &s_list,
                    cfg.far_cutoff,
                    cfg.near_depth,
                )?,
            };
            csv(DecayTable::CSV_HEADER, table.csv_rows())
        }
    };
    Ok(std::iter::once(cfg.header()).chain(body).collect())
}

/// Runs the config at `path`, writing to its `output` or returning the text.
pub fn run_path(path: &Path) -> Result<String> {
    let cfg = ExperimentConfig::load(path)?;
    let mut text = run_config(&cfg)?.join("\n");
    text.push('\n');
    if let Some(out) = &cfg.output {
        std::fs::write(out, &text).map_err(|e| LabError::Io(format!("{}: {e}", out.display())))?;
        return Ok(String::new());
    }
    Ok(text)
}

pub fn echo_path(path: &Path) -> Result<String> {
    Ok(ExperimentConfig::load(path)?.normalized() + "\n")
}

#[derive(Debug, Parser)]
#[command(name = "ncl", version, about = "Three-phase fractional perimeter experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Debug, Subcommand)]
pub enum Action {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Print the config with all defaults filled in.
    Echo { config: PathBuf },
}

pub fn exit_code(err: &LabError) -> i32 {
    if err.is_validation() {
        1
    } else {
        2
    }
}

/// Process entry point; returns the exit status.
pub fn main_entry() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    if let Ok(v) = std::env::var("NCL_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("could not size the worker pool: {e}");
                }
            }
            _ => {
                eprintln!("error: invalid NCL_THREADS: {v:?}");
                return 1;
            }
        }
    }
    let result = match &cli.action {
        Action::Run { config } => run_path(config),
        Action::Echo { config } => echo_path(config),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

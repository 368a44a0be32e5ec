//! Parameter sweeps over `(Omega0 T, Delta0 T)` comparing numerical and
//! closed-form populations.
//!
//! Every node is an independent pure computation. Nodes are dispatched to a
//! worker pool and collected back in grid order, so the result does not depend
//! on the number of workers.

pub mod config;
pub mod output;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{Grid, OutputKind, RunConfig, System};

use crate::error::{Error, Result};
use crate::integrator::{self, TrajectoryPoint};
use crate::linalg::StateVector;
use crate::stepwise::analytic_p2;
use crate::su2_chain::{self, analytic_transition_table};
use crate::two_level::{self, TwoLevel};

/// One node of a sweep for one initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub omega0_t: f64,
    pub delta0_t: f64,
    pub initial_state: usize,
    /// Final populations from integration, NaN when the node failed.
    pub p_numeric: Vec<f64>,
    pub p_analytic: Vec<f64>,
    /// `p_numeric - p_analytic` in the mirror state `dim + 1 - initial_state`
    /// (the transfer target).
    pub residual: f64,
    /// Three-level runs only: distance between the integrated `U3` and the
    /// lift of the integrated two-level propagator.
    pub majorana_residual: Option<f64>,
    /// Seconds spent on the node.
    pub wall_time: f64,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn target_state(&self) -> usize {
        self.p_numeric.len() + 1 - self.initial_state
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub system: System,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn dimension(&self) -> usize {
        self.system.dimension()
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.failed()).count()
    }

    /// Largest `|residual|` over rows selected by `keep`; NaN rows count as
    /// infinitely bad.
    pub fn max_abs_residual(&self, keep: impl Fn(&SweepRow) -> bool) -> f64 {
        self.rows
            .iter()
            .filter(|r| keep(r))
            .map(|r| if r.residual.is_nan() { f64::INFINITY } else { r.residual.abs() })
            .fold(0.0, f64::max)
    }
}

fn analytic_row(cfg: &RunConfig, omega0_t: f64, delta0_t: f64, initial: usize) -> Result<Vec<f64>> {
    Ok(match cfg.system {
        System::TwoLevel => {
            let p2 = analytic_p2(omega0_t, delta0_t)?;
            if initial == 1 {
                vec![1.0 - p2, p2]
            } else {
                vec![p2, 1.0 - p2]
            }
        }
        System::ThreeLevel => analytic_transition_table(omega0_t, delta0_t)?.row(initial).to_vec(),
    })
}

fn numeric_row(
    cfg: &RunConfig,
    omega0_t: f64,
    delta0_t: f64,
    initial: usize,
    with_majorana: bool,
) -> Result<(Vec<f64>, Option<f64>)> {
    let drive = cfg.drive(omega0_t, delta0_t)?;
    let spec = cfg.integration_spec();
    Ok(match cfg.system {
        System::TwoLevel => {
            let psi0 = StateVector::<2>::basis(initial)?;
            let out = two_level::simulate_final_populations(&drive, &spec, &psi0)?;
            (vec![out.p1, out.p2], None)
        }
        System::ThreeLevel => {
            let out = su2_chain::simulate_three_level(&drive, &spec, initial)?;
            let majorana = if with_majorana {
                let lifted = su2_chain::majorana_u3(&su2_chain::numeric_cayley_klein(&drive, &spec)?)?;
                Some(crate::linalg::max_abs_diff(&lifted.matrix, &out.propagator.matrix))
            } else {
                None
            };
            (out.populations.to_vec(), majorana)
        }
    })
}

/// Computes one node. Never fails: errors are recorded in the row and the
/// numerical populations set to NaN.
pub fn run_node(cfg: &RunConfig, omega0_t: f64, delta0_t: f64, initial: usize, with_majorana: bool) -> SweepRow {
    let started = Instant::now();
    let dim = cfg.system.dimension();
    let mut error = None;
    let p_analytic = analytic_row(cfg, omega0_t, delta0_t, initial).unwrap_or_else(|e| {
        error = Some(e.to_string());
        vec![f64::NAN; dim]
    });
    let (p_numeric, majorana_residual) = match numeric_row(cfg, omega0_t, delta0_t, initial, with_majorana) {
        Ok(v) => v,
        Err(e) => {
            error.get_or_insert(e.to_string());
            (vec![f64::NAN; dim], with_majorana.then_some(f64::NAN))
        }
    };
    let target = dim - initial;
    SweepRow {
        omega0_t,
        delta0_t,
        initial_state: initial,
        residual: p_numeric[target] - p_analytic[target],
        p_numeric,
        p_analytic,
        majorana_residual,
        wall_time: started.elapsed().as_secs_f64(),
        error,
    }
}

/// Evaluates `nodes` on `workers` threads and returns rows in input order.
fn run_nodes(cfg: &RunConfig, nodes: &[(f64, f64, usize)], workers: usize, with_majorana: bool) -> Result<Vec<SweepRow>> {
    if workers == 0 {
        return Err(Error::Config("workers: must be at least 1".into()));
    }
    let work = || -> Vec<SweepRow> {
        nodes
            .par_iter()
            .map(|&(om, de, init)| run_node(cfg, om, de, init, with_majorana))
            .collect()
    };
    if workers == 1 {
        return Ok(nodes.iter().map(|&(om, de, init)| run_node(cfg, om, de, init, with_majorana)).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("workers: cannot start pool: {e}")))?;
    Ok(pool.install(work))
}

/// Result of a single run, with the trajectory when requested.
#[derive(Debug, Clone)]
pub struct SingleRun {
    pub result: SweepResult,
    pub trajectory: Option<Vec<(f64, Vec<f64>)>>,
}

/// One node at the first values of both grids.
pub fn run_single(cfg: &RunConfig) -> Result<SingleRun> {
    cfg.validate()?;
    let (om, de) = (cfg.omega0.values()[0], cfg.delta0.values()[0]);
    let with_majorana = cfg.system == System::ThreeLevel;
    let row = run_node(cfg, om, de, cfg.initial_state, with_majorana);
    let trajectory = if cfg.outputs.contains(&OutputKind::Trajectory) {
        let drive = cfg.drive(om, de)?;
        let spec = cfg.integration_spec();
        Some(match cfg.system {
            System::TwoLevel => {
                let psi0 = StateVector::<2>::basis(cfg.initial_state)?;
                flatten(integrator::propagate(&TwoLevel(&drive), &psi0, &spec, true)?.trajectory)
            }
            System::ThreeLevel => {
                let psi0 = StateVector::<3>::basis(cfg.initial_state)?;
                flatten(integrator::propagate(&su2_chain::ThreeLevel(&drive), &psi0, &spec, true)?.trajectory)
            }
        })
    } else {
        None
    };
    Ok(SingleRun { result: SweepResult { system: cfg.system, rows: vec![row] }, trajectory })
}

fn flatten<const N: usize>(traj: Option<Vec<TrajectoryPoint<N>>>) -> Vec<(f64, Vec<f64>)> {
    traj.unwrap_or_default().into_iter().map(|p| (p.t, p.populations.to_vec())).collect()
}

/// 1-D cut in `Omega0 T` at a single `Delta0 T`.
pub fn run_fig1_cut(cfg: &RunConfig, workers: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let [delta0] = cfg.delta0.values() else {
        return Err(Error::Config(format!(
            "delta0: a cut needs exactly one value, got {}",
            cfg.delta0.len()
        )));
    };
    let nodes: Vec<_> = cfg.omega0.values().iter().map(|&om| (om, *delta0, cfg.initial_state)).collect();
    Ok(SweepResult { system: cfg.system, rows: run_nodes(cfg, &nodes, workers, false)? })
}

/// Full `omega0 x delta0` grid, `Omega0`-major.
pub fn run_grid(cfg: &RunConfig, workers: usize) -> Result<SweepResult> {
    cfg.validate()?;
    let nodes: Vec<_> = cfg
        .omega0
        .values()
        .iter()
        .flat_map(|&om| cfg.delta0.values().iter().map(move |&de| (om, de, cfg.initial_state)))
        .collect();
    Ok(SweepResult { system: cfg.system, rows: run_nodes(cfg, &nodes, workers, false)? })
}

/// Numerical and analytic three-level populations for every initial state at
/// every grid node, with the Majorana residual of each node.
pub fn run_three_level_table(cfg: &RunConfig, workers: usize) -> Result<SweepResult> {
    cfg.validate()?;
    if cfg.system != System::ThreeLevel {
        return Err(Error::Config("system: the three-level table needs system = three_level".into()));
    }
    let nodes: Vec<_> = cfg
        .omega0
        .values()
        .iter()
        .flat_map(|&om| {
            cfg.delta0.values().iter().flat_map(move |&de| (1..=3).map(move |k| (om, de, k)))
        })
        .collect();
    Ok(SweepResult { system: cfg.system, rows: run_nodes(cfg, &nodes, workers, true)? })
}

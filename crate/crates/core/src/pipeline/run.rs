use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{EigenSelection, Mode, RunConfig, Solver};
use super::PipelineError;
use crate::cluster::{kmeans, lift_membership, ClusterResult, KMeansParams};
use crate::coarsen::{build_hierarchy, CoarsenParams, CoarseningHierarchy};
use crate::dataio::Dataset;
use crate::evalmetrics::accuracy;
use crate::graph::{
    build_knn_graph, component_count, components_of_pattern, laplacian, LaplacianMatrix,
};
use crate::spectral::{bottom_eigs, embed_rows, EigenOptions};

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimes {
    pub graph: f64,
    pub coarsen: f64,
    pub eigen: f64,
    pub kmeans: f64,
    pub lift: f64,
}

impl StageTimes {
    fn add(&mut self, o: &StageTimes) {
        self.coarsen += o.coarsen;
        self.eigen += o.eigen;
        self.kmeans += o.kmeans;
        self.lift += o.lift;
    }

    fn scale(&mut self, f: f64) {
        self.coarsen *= f;
        self.eigen *= f;
        self.kmeans *= f;
        self.lift *= f;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelStat {
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub n_samples: usize,
    pub n_features: usize,
    pub mode: Mode,
    pub k_clusters: usize,
    /// Accuracy of the first repeat (run with `seed`).
    pub acc: Option<f64>,
    pub acc_runs: Vec<f64>,
    pub acc_mean: Option<f64>,
    /// Sample standard deviation over repeats; 0 for a single run.
    pub acc_std: Option<f64>,
    /// Graph time is paid once; the other stages are means over repeats.
    pub times: StageTimes,
    /// Node and edge counts from the original graph down to the coarsest.
    pub levels: Vec<LevelStat>,
    pub coarse_nodes: usize,
    pub components: usize,
    pub skip_zero: bool,
    pub eigenvalues: Vec<f64>,
    pub objective: f64,
    pub warnings: Vec<String>,
    pub config: RunConfig,
}

impl EvalReport {
    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("report is serializable");
        serde_json::to_string_pretty(&v).expect("value is serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// The fine Laplacian and the time spent building it.
#[derive(Debug, Clone)]
pub struct PreparedGraph {
    pub laplacian: LaplacianMatrix,
    pub components: usize,
    pub t_graph: f64,
}

pub fn prepare_graph(cfg: &RunConfig, data: &Dataset) -> Result<PreparedGraph, PipelineError> {
    let t = Instant::now();
    let g = build_knn_graph(data, cfg.knn.k_neighbors, cfg.knn.weighting)
        .map_err(|e| PipelineError::stage("graph", e))?;
    let l = laplacian(&g);
    let components = component_count(&components_of_pattern(l.matrix()));
    Ok(PreparedGraph {
        laplacian: l,
        components,
        t_graph: t.elapsed().as_secs_f64(),
    })
}

/// Loads the configured dataset and runs it.
pub fn run_pipeline(cfg: &RunConfig) -> Result<(ClusterResult, EvalReport), PipelineError> {
    cfg.validate()?;
    let data = cfg.source.load()?;
    run_on_dataset(cfg, &data)
}

pub fn run_on_dataset(
    cfg: &RunConfig,
    data: &Dataset,
) -> Result<(ClusterResult, EvalReport), PipelineError> {
    cfg.validate()?;
    let scaled;
    let data = if cfg.minmax {
        scaled = data.min_max_scaled();
        &scaled
    } else {
        data
    };
    let graph = match cfg.mode {
        Mode::KmeansRaw => None,
        _ => Some(prepare_graph(cfg, data)?),
    };
    run_with_graph(cfg, data, graph.as_ref())
}

struct Outcome {
    result: ClusterResult,
    times: StageTimes,
    levels: Vec<LevelStat>,
    skip_zero: bool,
    eigenvalues: Vec<f64>,
    objective: f64,
    warnings: Vec<String>,
}

/// Runs `cfg.repeats` times on an already built graph (ignored for
/// `kmeans_raw`). `data` must already carry any min-max scaling.
pub fn run_with_graph(
    cfg: &RunConfig,
    data: &Dataset,
    graph: Option<&PreparedGraph>,
) -> Result<(ClusterResult, EvalReport), PipelineError> {
    let mut first = None;
    let mut acc_runs = Vec::new();
    let mut times = StageTimes::default();
    for r in 0..cfg.repeats {
        let seed = cfg.seed.wrapping_add(r as u64);
        let out = match (cfg.mode, graph) {
            (Mode::KmeansRaw, _) => raw_once(cfg, data, seed)?,
            (_, Some(g)) => spectral_once(cfg, g, seed)?,
            (_, None) => {
                return Err(PipelineError::Config(
                    "spectral modes need a prepared graph".into(),
                ))
            }
        };
        if let Some(truth) = data.labels() {
            let rep =
                accuracy(truth, &out.result.labels).map_err(|e| PipelineError::stage("eval", e))?;
            acc_runs.push(rep.acc);
        }
        times.add(&out.times);
        if first.is_none() {
            first = Some(out);
        }
    }
    times.scale(1.0 / cfg.repeats as f64);
    times.graph = graph.map_or(0.0, |g| g.t_graph);
    let out = first.expect("repeats >= 1");

    let (acc_mean, acc_std) = if acc_runs.is_empty() {
        (None, None)
    } else {
        let m = acc_runs.iter().sum::<f64>() / acc_runs.len() as f64;
        let s = if acc_runs.len() > 1 {
            let ss: f64 = acc_runs.iter().map(|a| (a - m).powi(2)).sum();
            (ss / (acc_runs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        (Some(m), Some(s))
    };
    let report = EvalReport {
        dataset: data.name().to_string(),
        n_samples: data.n_samples(),
        n_features: data.n_features(),
        mode: cfg.mode,
        k_clusters: cfg.k_clusters,
        acc: acc_runs.first().copied(),
        acc_mean,
        acc_std,
        acc_runs,
        times,
        coarse_nodes: out.levels.last().map_or(data.n_samples(), |l| l.nodes),
        levels: out.levels,
        components: graph.map_or(0, |g| g.components),
        skip_zero: out.skip_zero,
        eigenvalues: out.eigenvalues,
        objective: out.objective,
        warnings: out.warnings,
        config: cfg.clone(),
    };
    Ok((out.result, report))
}

fn kmeans_params(cfg: &RunConfig, seed: u64) -> KMeansParams {
    KMeansParams { seed, ..cfg.kmeans }
}

fn raw_once(cfg: &RunConfig, data: &Dataset, seed: u64) -> Result<Outcome, PipelineError> {
    let t = Instant::now();
    let km = kmeans(data.features(), cfg.k_clusters, &kmeans_params(cfg, seed))
        .map_err(|e| PipelineError::stage("kmeans", e))?;
    let t_kmeans = t.elapsed().as_secs_f64();
    Ok(Outcome {
        result: ClusterResult {
            labels: km.assignment.clone(),
            coarse_labels: km.assignment,
            k: cfg.k_clusters,
        },
        times: StageTimes {
            kmeans: t_kmeans,
            ..StageTimes::default()
        },
        levels: Vec::new(),
        skip_zero: false,
        eigenvalues: Vec::new(),
        objective: km.objective,
        warnings: Vec::new(),
    })
}

fn spectral_once(cfg: &RunConfig, g: &PreparedGraph, seed: u64) -> Result<Outcome, PipelineError> {
    let l = &g.laplacian;
    let mut warnings = Vec::new();

    let t = Instant::now();
    let hierarchy = match cfg.mode {
        Mode::Coarsened => {
            let params = CoarsenParams {
                seed,
                ..cfg.coarsen
            };
            build_hierarchy(l, cfg.target_ratio, &params)
                .map_err(|e| PipelineError::stage("coarsen", e))?
        }
        _ => CoarseningHierarchy::identity(l),
    };
    let t_coarsen = t.elapsed().as_secs_f64();
    if let Some(w) = &hierarchy.warning {
        warnings.push(w.clone());
    }

    let t = Instant::now();
    let lr = hierarchy.coarsest(l);
    let skip_zero = match cfg.eigen {
        EigenSelection::SkipZero => true,
        EigenSelection::IncludeTrivial => false,
        EigenSelection::Auto => component_count(&components_of_pattern(lr.matrix())) <= 1,
    };
    let opts = EigenOptions {
        dense_limit: match cfg.solver {
            Solver::Lanczos => 0,
            _ => cfg.dense_limit,
        },
        iterative: cfg.solver != Solver::Dense,
        lanczos_seed: seed,
        ..EigenOptions::default()
    };
    let emb = bottom_eigs(lr, cfg.k_clusters, skip_zero, &opts)
        .map_err(|e| PipelineError::stage("eigen", e))?;
    let (u, zero_rows) = embed_rows(&emb, cfg.row_normalize);
    if zero_rows > 0 {
        warnings.push(format!("{zero_rows} embedding rows are zero"));
    }
    let t_eigen = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let km = kmeans(&u, cfg.k_clusters, &kmeans_params(cfg, seed))
        .map_err(|e| PipelineError::stage("kmeans", e))?;
    let t_kmeans = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let result =
        lift_membership(&km.assignment, &hierarchy).map_err(|e| PipelineError::stage("lift", e))?;
    let t_lift = t.elapsed().as_secs_f64();

    let levels = hierarchy
        .sizes
        .iter()
        .zip(&hierarchy.edges)
        .map(|(&nodes, &edges)| LevelStat { nodes, edges })
        .collect();
    Ok(Outcome {
        result: ClusterResult {
            k: cfg.k_clusters,
            ..result
        },
        times: StageTimes {
            graph: 0.0,
            coarsen: t_coarsen,
            eigen: t_eigen,
            kmeans: t_kmeans,
            lift: t_lift,
        },
        levels,
        skip_zero,
        eigenvalues: emb.eigenvalues,
        objective: km.objective,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::DataSource;

    fn moons(n: usize) -> RunConfig {
        RunConfig {
            source: DataSource::TwoMoons {
                n,
                noise: 0.05,
                seed: 1,
            },
            kmeans: KMeansParams {
                restarts: 3,
                ..KMeansParams::default()
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn coarsened_run_reports() {
        let cfg = RunConfig {
            target_ratio: 4.0,
            ..moons(300)
        };
        let (res, rep) = run_pipeline(&cfg).unwrap();
        assert_eq!(res.labels.len(), 300);
        assert_eq!(rep.levels[0].nodes, 300);
        assert!(rep.coarse_nodes < 300);
        assert_eq!(res.coarse_labels.len(), rep.coarse_nodes);
        assert!(rep.acc.unwrap() > 0.5);
        assert!(rep.times.coarsen >= 0.0 && rep.times.graph >= 0.0);
        assert_eq!(rep.config, cfg);
    }

    #[test]
    fn ratio_one_matches_standard() {
        let a = RunConfig {
            target_ratio: 1.0,
            ..moons(200)
        };
        let b = RunConfig {
            mode: Mode::StandardSc,
            ..a.clone()
        };
        assert_eq!(run_pipeline(&a).unwrap().0, run_pipeline(&b).unwrap().0);
    }

    #[test]
    fn repeats_aggregate() {
        let cfg = RunConfig {
            repeats: 3,
            mode: Mode::KmeansRaw,
            ..moons(200)
        };
        let (_, rep) = run_pipeline(&cfg).unwrap();
        assert_eq!(rep.acc_runs.len(), 3);
        assert!(rep.acc_std.unwrap() >= 0.0);
        assert!(rep.levels.is_empty());
        assert_eq!(rep.coarse_nodes, 200);
    }

    #[test]
    fn report_round_trip() {
        let (_, rep) = run_pipeline(&moons(120)).unwrap();
        let json = rep.to_json();
        let back = EvalReport::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn stage_errors_name_the_stage() {
        let cfg = RunConfig {
            k_clusters: 50,
            mode: Mode::Coarsened,
            target_ratio: 10.0,
            ..moons(100)
        };
        let err = run_pipeline(&cfg).unwrap_err();
        assert!(matches!(err, PipelineError::Stage { .. }), "{err}");
        assert_eq!(err.exit_code(), 3);
    }
}

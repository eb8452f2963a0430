use std::io::Write;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{Mode, RunConfig};
use super::run::{prepare_graph, run_with_graph};
use super::PipelineError;
use crate::coarsen::{build_hierarchy, CoarsenParams};
use crate::dataio::{make_two_circles, make_two_moons, Dataset};

pub const BENCH_HEADER: [&str; 9] = [
    "ratio",
    "acc",
    "coarse_nodes",
    "t_graph",
    "t_coarsen",
    "t_eigen",
    "t_kmeans",
    "t_lift",
    "error",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub ratio: f64,
    /// Mean over repeats.
    pub acc: Option<f64>,
    pub coarse_nodes: Option<usize>,
    pub t_graph: f64,
    pub t_coarsen: f64,
    pub t_eigen: f64,
    pub t_kmeans: f64,
    pub t_lift: f64,
    pub error: Option<String>,
}

/// One coarsened run per ratio, all sharing a single kNN graph. A failing
/// ratio yields a row with `error` set and the sweep continues.
pub fn bench_sweep(cfg: &RunConfig, ratios: &[f64]) -> Result<Vec<BenchRow>, PipelineError> {
    cfg.validate()?;
    if ratios.is_empty() {
        return Err(PipelineError::Config("no ratios given".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
        return Err(PipelineError::Config(format!(
            "ratio must be >= 1, got {r}"
        )));
    }
    let data = cfg.source.load()?;
    let data = if cfg.minmax {
        data.min_max_scaled()
    } else {
        data
    };
    let graph = prepare_graph(cfg, &data)?;
    let mut rows = Vec::with_capacity(ratios.len());
    for &ratio in ratios {
        let run_cfg = RunConfig {
            mode: Mode::Coarsened,
            target_ratio: ratio,
            ..cfg.clone()
        };
        let row = match run_with_graph(&run_cfg, &data, Some(&graph)) {
            Ok((_, rep)) => BenchRow {
                ratio,
                acc: rep.acc_mean,
                coarse_nodes: Some(rep.coarse_nodes),
                t_graph: rep.times.graph,
                t_coarsen: rep.times.coarsen,
                t_eigen: rep.times.eigen,
                t_kmeans: rep.times.kmeans,
                t_lift: rep.times.lift,
                error: None,
            },
            Err(e) => {
                log::warn!("ratio {ratio}: {e}");
                BenchRow {
                    ratio,
                    acc: None,
                    coarse_nodes: None,
                    t_graph: graph.t_graph,
                    t_coarsen: 0.0,
                    t_eigen: 0.0,
                    t_kmeans: 0.0,
                    t_lift: 0.0,
                    error: Some(e.to_string()),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record([
            r.ratio.to_string(),
            opt(&r.acc),
            opt(&r.coarse_nodes),
            r.t_graph.to_string(),
            r.t_coarsen.to_string(),
            r.t_eigen.to_string(),
            r.t_kmeans.to_string(),
            r.t_lift.to_string(),
            opt(&r.error),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Synthetic family for the scaling probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScaleFamily {
    TwoMoons { noise: f64 },
    TwoCircles { radius_ratio: f64, noise: f64 },
}

impl ScaleFamily {
    fn generate(&self, n: usize, seed: u64) -> Result<Dataset, PipelineError> {
        Ok(match *self {
            Self::TwoMoons { noise } => make_two_moons(n, noise, seed)?,
            Self::TwoCircles {
                radius_ratio,
                noise,
            } => make_two_circles(n, radius_ratio, noise, seed)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub n: usize,
    pub edges: usize,
    pub coarse_nodes: usize,
    /// Fastest of `cfg.repeats` timed coarsenings.
    pub t_coarsen: f64,
    /// `t_coarsen` over the previous row's; absent on the first row.
    pub ratio: Option<f64>,
}

/// Coarsening wall time per dataset size; graph construction is untimed.
/// All graphs are built up front.
pub fn scaling_probe(
    sizes: &[usize],
    family: ScaleFamily,
    cfg: &RunConfig,
) -> Result<Vec<ScaleRow>, PipelineError> {
    cfg.validate()?;
    if sizes.is_empty() {
        return Err(PipelineError::Config("no sizes given".into()));
    }
    if sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PipelineError::Config(format!(
            "sizes must be strictly increasing, got {sizes:?}"
        )));
    }
    let params = CoarsenParams {
        seed: cfg.seed,
        ..cfg.coarsen
    };
    let graphs = sizes
        .iter()
        .map(|&n| prepare_graph(cfg, &family.generate(n, cfg.seed)?))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = vec![f64::INFINITY; sizes.len()];
    let mut coarse_nodes = sizes.to_vec();
    // Sizes are timed round-robin so slow phases of the machine hit all of them.
    for _ in 0..cfg.repeats {
        for (i, graph) in graphs.iter().enumerate() {
            let t = Instant::now();
            let h = build_hierarchy(&graph.laplacian, cfg.target_ratio, &params)
                .map_err(|e| PipelineError::stage("coarsen", e))?;
            best[i] = best[i].min(t.elapsed().as_secs_f64());
            coarse_nodes[i] = h.coarse_count();
        }
    }
    let mut rows: Vec<ScaleRow> = Vec::with_capacity(sizes.len());
    for (i, graph) in graphs.iter().enumerate() {
        let ratio = rows.last().map(|p| best[i] / p.t_coarsen);
        log::info!("n={} t_coarsen={:.4}s", sizes[i], best[i]);
        rows.push(ScaleRow {
            n: sizes[i],
            edges: graph.laplacian.n_edges(),
            coarse_nodes: coarse_nodes[i],
            t_coarsen: best[i],
            ratio,
        });
    }
    Ok(rows)
}

pub fn write_scaling_csv<W: Write>(rows: &[ScaleRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "edges", "coarse_nodes", "t_coarsen", "ratio"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.edges.to_string(),
            r.coarse_nodes.to_string(),
            r.t_coarsen.to_string(),
            opt(&r.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::DataSource;

    fn cfg() -> RunConfig {
        RunConfig {
            source: DataSource::TwoMoons {
                n: 300,
                noise: 0.05,
                seed: 3,
            },
            ..RunConfig::default()
        }
    }

    #[test]
    fn sweep_rows_and_csv() {
        let rows = bench_sweep(&cfg(), &[1.0, 4.0, 16.0]).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].coarse_nodes, Some(300));
        let sizes: Vec<usize> = rows.iter().map(|r| r.coarse_nodes.unwrap()).collect();
        assert!(sizes.windows(2).all(|w| w[1] <= w[0]), "{sizes:?}");
        let mut buf = Vec::new();
        write_bench_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(
            text.starts_with("ratio,acc,coarse_nodes,t_graph,t_coarsen,t_eigen,t_kmeans,t_lift")
        );
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn failing_ratio_keeps_going() {
        let c = RunConfig {
            k_clusters: 40,
            ..cfg()
        };
        let rows = bench_sweep(&c, &[1.0, 100.0]).unwrap();
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.is_some());
    }

    #[test]
    fn sweep_rejects_bad_ratios() {
        assert!(bench_sweep(&cfg(), &[]).is_err());
        assert!(bench_sweep(&cfg(), &[0.5]).is_err());
    }

    #[test]
    fn probe_single_and_unsorted() {
        let fam = ScaleFamily::TwoMoons { noise: 0.05 };
        let rows = scaling_probe(&[400], fam, &cfg()).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].ratio.is_none());
        assert!(matches!(
            scaling_probe(&[400, 200], fam, &cfg()),
            Err(PipelineError::Config(_))
        ));
    }
}

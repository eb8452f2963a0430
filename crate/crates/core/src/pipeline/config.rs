use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::cluster::KMeansParams;
use crate::coarsen::CoarsenParams;
use crate::dataio::{
    load_csv, load_idx, load_libsvm, make_two_circles, make_two_moons, Dataset, LabelColumn,
};
use crate::graph::Weighting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Coarsen, cluster the reduced graph, lift labels back.
    #[default]
    Coarsened,
    /// Spectral clustering on the full graph.
    StandardSc,
    /// k-means on the raw features.
    KmeansRaw,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "coarsened" => Ok(Self::Coarsened),
            "standard_sc" => Ok(Self::StandardSc),
            "kmeans_raw" => Ok(Self::KmeansRaw),
            other => Err(format!(
                "unknown mode `{other}` (coarsened | standard_sc | kmeans_raw)"
            )),
        }
    }
}

/// Which eigenvectors feed the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenSelection {
    /// Skip zero eigenvalues on a connected graph, keep them when the graph
    /// has several components (their indicator vectors separate the parts).
    #[default]
    Auto,
    SkipZero,
    IncludeTrivial,
}

/// Eigensolver choice for the (reduced) Laplacian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Dense up to `dense_limit`, Lanczos above.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataSource {
    Csv {
        path: PathBuf,
        /// `first`, `last`, a 0-based index or a header name; no labels when absent.
        #[serde(default)]
        label_column: Option<String>,
    },
    Libsvm {
        path: PathBuf,
    },
    Idx {
        images: PathBuf,
        #[serde(default)]
        labels: Option<PathBuf>,
    },
    TwoMoons {
        n: usize,
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
    TwoCircles {
        n: usize,
        radius_ratio: f64,
        noise: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl DataSource {
    pub fn load(&self) -> Result<Dataset, PipelineError> {
        let ds = match self {
            Self::Csv { path, label_column } => {
                let col = label_column
                    .as_deref()
                    .map(str::parse::<LabelColumn>)
                    .transpose()
                    .map_err(PipelineError::Config)?;
                load_csv(path, col)?
            }
            Self::Libsvm { path } => load_libsvm(path)?,
            Self::Idx { images, labels } => load_idx(images, labels.as_deref())?,
            Self::TwoMoons { n, noise, seed } => make_two_moons(*n, *noise, *seed)?,
            Self::TwoCircles {
                n,
                radius_ratio,
                noise,
                seed,
            } => make_two_circles(*n, *radius_ratio, *noise, *seed)?,
        };
        Ok(ds)
    }
}

impl Default for DataSource {
    fn default() -> Self {
        Self::TwoMoons {
            n: 1000,
            noise: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnnParams {
    pub k_neighbors: usize,
    pub weighting: Weighting,
}

impl Default for KnnParams {
    fn default() -> Self {
        Self {
            k_neighbors: 10,
            weighting: Weighting::default(),
        }
    }
}

/// Everything one run needs. `seed` overrides the seeds stored in `coarsen`
/// and `kmeans`; repeat `r` uses `seed + r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub source: DataSource,
    pub k_clusters: usize,
    pub knn: KnnParams,
    pub target_ratio: f64,
    pub coarsen: CoarsenParams,
    pub kmeans: KMeansParams,
    pub mode: Mode,
    pub seed: u64,
    pub eigen: EigenSelection,
    pub solver: Solver,
    pub dense_limit: usize,
    pub row_normalize: bool,
    /// Per-feature min-max scaling to [0, 1] before graph construction.
    pub minmax: bool,
    pub repeats: usize,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: DataSource::default(),
            k_clusters: 2,
            knn: KnnParams::default(),
            target_ratio: 10.0,
            coarsen: CoarsenParams::default(),
            kmeans: KMeansParams::default(),
            mode: Mode::default(),
            seed: 42,
            eigen: EigenSelection::default(),
            solver: Solver::default(),
            dense_limit: 4000,
            row_normalize: false,
            minmax: false,
            repeats: 1,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks every numeric parameter, including ones the mode ignores.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.k_clusters == 0 {
            return bad("k_clusters must be >= 1".into());
        }
        if self.knn.k_neighbors == 0 {
            return bad("k_neighbors must be >= 1".into());
        }
        if let Weighting::Gaussian { sigma: Some(s) } = self.knn.weighting {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("gaussian sigma must be positive, got {s}"));
            }
        }
        if !(self.target_ratio >= 1.0 && self.target_ratio.is_finite()) {
            return bad(format!(
                "target_ratio must be >= 1, got {}",
                self.target_ratio
            ));
        }
        self.coarsen
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.kmeans.restarts == 0 || self.kmeans.max_iters == 0 {
            return bad("kmeans restarts and max_iters must be >= 1".into());
        }
        if self.repeats == 0 {
            return bad("repeats must be >= 1".into());
        }
        if self.dense_limit == 0 {
            return bad("dense_limit must be >= 1".into());
        }
        Ok(())
    }
}

//! Run configuration: TOML file values, overridden by command-line flags.

use std::path::Path;

use psomotif::featurize::{Normalization, WindowMode, DEFAULT_WINDOW};
use psomotif::kmeans::KMeansParams;
use psomotif::motif::{MotifOptions, SAA_THRESHOLD};
use psomotif::pso::PsoConfig;
use psomotif::psobiclust::BiclusterConfig;
use psomotif::psokmeans::PsoKMeansConfig;
use psomotif::report::{PipelineConfig, DEFAULT_THRESHOLDS};
use psomotif::seqio::{AlphabetPolicy, ParseOptions};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Engine {
    #[default]
    PsoKmeans,
    Kmeans,
}

/// Every tunable the subcommands read. Each output file echoes the resolved
/// value of this struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub window_size: usize,
    pub window_mode: WindowMode,
    pub normalization: Normalization,
    pub relax_alphabet: bool,
    pub engine: Engine,
    pub k: usize,
    pub k_rows: usize,
    pub k_cols: usize,
    /// Swarm size for centroid search (clustering and bicluster seeding).
    pub particles: usize,
    /// Binary swarm size; one particle per seed when unset.
    pub bicluster_particles: Option<usize>,
    pub iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub lambda: Option<f64>,
    pub thresholds: Vec<f64>,
    pub saa_threshold: f64,
    pub logo_correction: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let pso = PsoConfig::default();
        RunConfig {
            seed: 0,
            window_size: DEFAULT_WINDOW,
            window_mode: WindowMode::Reshape,
            normalization: Normalization::Mean,
            relax_alphabet: false,
            engine: Engine::PsoKmeans,
            k: 5,
            k_rows: 5,
            k_cols: 3,
            particles: pso.n_particles,
            bicluster_particles: None,
            iterations: pso.max_iter,
            inertia: pso.inertia,
            cognitive: pso.cognitive,
            social: pso.social,
            lambda: None,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            saa_threshold: SAA_THRESHOLD,
            logo_correction: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn parse_options(&self) -> ParseOptions {
        ParseOptions {
            alphabet: if self.relax_alphabet {
                AlphabetPolicy::Relaxed
            } else {
                AlphabetPolicy::Strict
            },
            min_len: self.window_size,
        }
    }

    fn pso(&self, seed: u64) -> PsoConfig {
        PsoConfig {
            n_particles: self.particles,
            max_iter: self.iterations,
            inertia: self.inertia,
            cognitive: self.cognitive,
            social: self.social,
            seed,
            ..Default::default()
        }
    }

    pub fn clustering(&self) -> PsoKMeansConfig {
        PsoKMeansConfig {
            pso: self.pso(self.seed),
            ..Default::default()
        }
    }

    pub fn kmeans(&self) -> KMeansParams {
        KMeansParams {
            max_iter: self.iterations,
            ..Default::default()
        }
    }

    pub fn biclustering(&self) -> BiclusterConfig {
        BiclusterConfig {
            pso: self.pso(self.seed),
            n_particles: self.bicluster_particles,
            lambda: self.lambda,
            ..Default::default()
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            window_size: self.window_size,
            window_mode: self.window_mode,
            normalization: self.normalization,
            k: self.k,
            clustering: self.clustering(),
            k_rows: self.k_rows,
            k_cols: self.k_cols,
            seeding: self.clustering(),
            biclustering: self.biclustering(),
            thresholds: self.thresholds.clone(),
        }
    }

    pub fn motif_options(&self) -> MotifOptions {
        MotifOptions {
            threshold: self.saa_threshold,
            logo_correction: self.logo_correction,
        }
    }

    /// Range checks that the library would otherwise report mid-run.
    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Invalid(m.to_string()));
        if self.window_size == 0 {
            return fail("window_size must be positive");
        }
        if self.k == 0 || self.k_rows == 0 || self.k_cols == 0 {
            return fail("k, k_rows and k_cols must be positive");
        }
        if !(0.0..1.0).contains(&self.saa_threshold) {
            return fail("saa_threshold must lie in [0, 1)");
        }
        if self.thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return fail("thresholds must lie in [0, 1]");
        }
        if self.lambda.is_some_and(|l| !l.is_finite() || l < 0.0) {
            return fail("lambda must be finite and non-negative");
        }
        self.pso(self.seed).validate()?;
        if let Some(n) = self.bicluster_particles {
            PsoConfig {
                n_particles: n,
                ..self.pso(self.seed)
            }
            .validate()?;
        }
        Ok(())
    }
}

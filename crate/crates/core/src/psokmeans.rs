//! Particle swarm search over centroid sets.
//!
//! A particle's position is `k` centroids laid end to end. Its fitness is the
//! intra-cluster fitness of the nearest-centroid assignment those centroids
//! induce, plus a penalty for each centroid that attracts no item.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kmeans::{assign, check_items, update_centroids, CentroidUpdate, ClusterSet};
use crate::metrics::{intra_cluster_fitness, Metric};
use crate::pso::{pso_optimize_with_span, span_of, PsoConfig};

/// Packs `k` centroids of a fixed shape into one flat position vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CentroidCodec {
    pub k: usize,
    /// `(rows, cols)` of one centroid; a plain vector is `(1, len)`.
    pub item_shape: (usize, usize),
}

impl CentroidCodec {
    pub fn new(k: usize, item_shape: (usize, usize)) -> Self {
        CentroidCodec { k, item_shape }
    }

    pub fn item_len(&self) -> usize {
        self.item_shape.0 * self.item_shape.1
    }

    pub fn position_len(&self) -> usize {
        self.k * self.item_len()
    }

    pub fn encode<C: AsRef<[f64]>>(&self, centroids: &[C]) -> Vec<f64> {
        assert_eq!(
            centroids.len(),
            self.k,
            "contract violation: wrong centroid count"
        );
        let mut out = Vec::with_capacity(self.position_len());
        for c in centroids {
            let c = c.as_ref();
            assert_eq!(
                c.len(),
                self.item_len(),
                "contract violation: wrong centroid shape"
            );
            out.extend_from_slice(c);
        }
        out
    }

    pub fn decode(&self, position: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(
            position.len(),
            self.position_len(),
            "contract violation: wrong position length"
        );
        position
            .chunks_exact(self.item_len())
            .map(<[f64]>::to_vec)
            .collect()
    }

    fn decode_slices<'a>(&self, position: &'a [f64]) -> Vec<&'a [f64]> {
        position.chunks_exact(self.item_len()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoKMeansConfig {
    pub pso: PsoConfig,
    pub metric: Metric,
    /// Penalise particles whose centroids leave clusters empty.
    pub empty_penalty: bool,
    /// Run one Lloyd (mean update) pass on the winning centroids and keep it
    /// if it lowers the fitness.
    pub refine: bool,
}

impl Default for PsoKMeansConfig {
    fn default() -> Self {
        PsoKMeansConfig {
            pso: PsoConfig::default(),
            metric: Metric::CityBlock,
            empty_penalty: true,
            refine: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PsoKMeansResult {
    pub clusters: ClusterSet,
    /// gbest objective (fitness plus empty-cluster penalty) per iteration.
    pub trace: Vec<f64>,
    /// Best objective among the initial particles.
    pub initial_best: f64,
}

/// Total distance of all items to their componentwise mean.
fn global_spread<I: AsRef<[f64]>>(items: &[I], metric: Metric) -> f64 {
    let dim = items[0].as_ref().len();
    let mut mean = vec![0.0; dim];
    for x in items {
        mean.iter_mut().zip(x.as_ref()).for_each(|(m, v)| *m += v);
    }
    mean.iter_mut().for_each(|m| *m /= items.len() as f64);
    items
        .iter()
        .map(|x| metric.distance(x.as_ref(), &mean))
        .sum()
}

/// The objective a particle is scored by.
pub fn particle_objective<I: AsRef<[f64]>>(
    items: &[I],
    codec: &CentroidCodec,
    position: &[f64],
    metric: Metric,
    penalty: f64,
) -> f64 {
    let centroids = codec.decode_slices(position);
    let assignment = assign(items, &centroids, metric);
    let fitness = intra_cluster_fitness(items, &assignment, &centroids, metric);
    if penalty == 0.0 {
        return fitness;
    }
    let mut used = vec![false; codec.k];
    assignment.iter().for_each(|&c| used[c] = true);
    fitness + penalty * used.iter().filter(|u| !**u).count() as f64
}

/// Clusters `items` into `k` groups by running the swarm over centroid sets.
pub fn pso_kmeans<I: AsRef<[f64]>>(
    items: &[I],
    k: usize,
    cfg: &PsoKMeansConfig,
) -> Result<PsoKMeansResult> {
    let dim = check_items(items, k)?;
    cfg.pso.validate()?;
    let codec = CentroidCodec::new(k, (1, dim));
    let metric = cfg.metric;
    let penalty = if cfg.empty_penalty {
        global_spread(items, metric)
    } else {
        0.0
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.pso.seed ^ 0x5eed_c3a7_0000_0001);
    let init: Vec<Vec<f64>> = (0..cfg.pso.n_particles)
        .map(|_| {
            let picks: Vec<&[f64]> = sample(&mut rng, items.len(), k)
                .into_iter()
                .map(|i| items[i].as_ref())
                .collect();
            codec.encode(&picks)
        })
        .collect();
    let initial_best = init
        .iter()
        .map(|p| particle_objective(items, &codec, p, metric, penalty))
        .fold(f64::INFINITY, f64::min);

    let item_vecs: Vec<Vec<f64>> = items.iter().map(|x| x.as_ref().to_vec()).collect();
    let span: Vec<f64> = span_of(&item_vecs).repeat(k);
    let outcome = pso_optimize_with_span(
        |pos: &[f64]| particle_objective(items, &codec, pos, metric, penalty),
        init,
        &cfg.pso,
        Some(&span),
    )?;

    let mut centroids = codec.decode(&outcome.best_position);
    let mut assignment = assign(items, &centroids, metric);
    let mut fitness = intra_cluster_fitness(items, &assignment, &centroids, metric);
    if cfg.refine {
        let (updated, _) = update_centroids(items, &assignment, &centroids, CentroidUpdate::Mean);
        let reassigned = assign(items, &updated, metric);
        let refined = intra_cluster_fitness(items, &reassigned, &updated, metric);
        if refined < fitness {
            centroids = updated;
            assignment = reassigned;
            fitness = refined;
        }
    }
    if !fitness.is_finite() {
        return Err(Error::contract("clustering produced a non-finite fitness"));
    }
    let iterations = outcome.swarm.iteration;
    Ok(PsoKMeansResult {
        clusters: ClusterSet {
            k,
            centroids,
            assignment,
            iterations_run: iterations,
            converged: iterations < cfg.pso.max_iter,
            final_fitness: fitness,
        },
        trace: outcome.swarm.trace,
        initial_best,
    })
}

//! Lloyd-style k-means under a pluggable distance.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{intra_cluster_fitness, nearest_centroid, Metric};

/// Result of a clustering run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index per item.
    pub assignment: Vec<usize>,
    pub iterations_run: usize,
    pub converged: bool,
    /// Intra-cluster fitness of `assignment` against `centroids`.
    pub final_fitness: f64,
}

impl ClusterSet {
    /// Item indices per cluster, in cluster order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (item, &c) in self.assignment.iter().enumerate() {
            out[c].push(item);
        }
        out
    }

    pub fn recompute_fitness<I: AsRef<[f64]>>(&self, items: &[I], metric: Metric) -> f64 {
        intra_cluster_fitness(items, &self.assignment, &self.centroids, metric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CentroidUpdate {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMeansInit {
    /// k distinct items, each drawn with probability proportional to its
    /// squared distance from the items already drawn.
    #[default]
    SpreadItems,
    /// k distinct items drawn uniformly.
    SampleItems,
    /// Items are dealt round-robin (after shuffling) into k equal-sized
    /// groups whose centroids start the run.
    BalancedAssignment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub max_iter: usize,
    pub update: CentroidUpdate,
    pub init: KMeansInit,
    pub metric: Metric,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            max_iter: 100,
            update: CentroidUpdate::Mean,
            init: KMeansInit::SpreadItems,
            metric: Metric::CityBlock,
        }
    }
}

pub(crate) fn assign<I: AsRef<[f64]>, C: AsRef<[f64]>>(
    items: &[I],
    centroids: &[C],
    metric: Metric,
) -> Vec<usize> {
    items
        .iter()
        .map(|x| nearest_centroid(x.as_ref(), centroids, metric).0)
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Recomputes centroids from an assignment. Clusters without members keep
/// their previous centroid and are reported in the second return value.
pub(crate) fn update_centroids<I: AsRef<[f64]>>(
    items: &[I],
    assignment: &[usize],
    previous: &[Vec<f64>],
    update: CentroidUpdate,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let k = previous.len();
    let dim = previous[0].len();
    let mut groups: Vec<Vec<&[f64]>> = vec![Vec::new(); k];
    for (x, &c) in items.iter().zip(assignment) {
        groups[c].push(x.as_ref());
    }
    let mut empty = Vec::new();
    let centroids = groups
        .iter()
        .enumerate()
        .map(|(c, members)| {
            if members.is_empty() {
                empty.push(c);
                return previous[c].clone();
            }
            match update {
                CentroidUpdate::Mean => {
                    let mut acc = vec![0.0; dim];
                    for m in members {
                        acc.iter_mut().zip(*m).for_each(|(a, v)| *a += v);
                    }
                    acc.iter_mut().for_each(|a| *a /= members.len() as f64);
                    acc
                }
                CentroidUpdate::Median => (0..dim)
                    .map(|d| {
                        let mut col: Vec<f64> = members.iter().map(|m| m[d]).collect();
                        median(&mut col)
                    })
                    .collect(),
            }
        })
        .collect();
    (centroids, empty)
}

/// Moves each empty cluster's centroid onto the item farthest from its
/// currently assigned centroid. Items already used for a repair are skipped.
fn repair_empty<I: AsRef<[f64]>>(
    items: &[I],
    assignment: &mut [usize],
    centroids: &mut [Vec<f64>],
    empty: &[usize],
    metric: Metric,
) {
    let mut used = Vec::new();
    for &c in empty {
        let far = items
            .iter()
            .enumerate()
            .filter(|(i, _)| !used.contains(i))
            .map(|(i, x)| (i, metric.distance(x.as_ref(), &centroids[assignment[i]])))
            .fold(None::<(usize, f64)>, |best, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            });
        if let Some((i, _)) = far {
            centroids[c] = items[i].as_ref().to_vec();
            assignment[i] = c;
            used.push(i);
        }
    }
}

pub(crate) fn check_items<I: AsRef<[f64]>>(items: &[I], k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::contract("k must be at least 1"));
    }
    if items.is_empty() {
        return Err(Error::contract("empty dataset"));
    }
    if k > items.len() {
        return Err(Error::contract(format!(
            "k = {k} exceeds the {} items",
            items.len()
        )));
    }
    let dim = items[0].as_ref().len();
    if dim == 0 || items.iter().any(|x| x.as_ref().len() != dim) {
        return Err(Error::contract("items must share one non-zero dimension"));
    }
    if items
        .iter()
        .flat_map(|x| x.as_ref())
        .any(|v| !v.is_finite())
    {
        return Err(Error::contract("items contain non-finite values"));
    }
    Ok(dim)
}

fn spread_items<I: AsRef<[f64]>>(
    items: &[I],
    k: usize,
    metric: Metric,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut chosen = vec![rng.random_range(0..items.len())];
    let mut nearest: Vec<f64> = items
        .iter()
        .map(|x| metric.distance(x.as_ref(), items[chosen[0]].as_ref()))
        .collect();
    while chosen.len() < k {
        let weights: Vec<f64> = nearest
            .iter()
            .enumerate()
            .map(|(i, d)| if chosen.contains(&i) { 0.0 } else { d * d })
            .collect();
        let next = match WeightedIndex::new(&weights) {
            Ok(w) => w.sample(rng),
            // every remaining item coincides with a chosen one
            Err(_) => {
                let rest: Vec<usize> = (0..items.len()).filter(|i| !chosen.contains(i)).collect();
                rest[rng.random_range(0..rest.len())]
            }
        };
        chosen.push(next);
        for (i, x) in items.iter().enumerate() {
            nearest[i] = nearest[i].min(metric.distance(x.as_ref(), items[next].as_ref()));
        }
    }
    chosen.iter().map(|&i| items[i].as_ref().to_vec()).collect()
}

/// Runs k-means from a seeded initialisation.
///
/// The run alternates nearest-centroid assignment and centroid updates until
/// an assignment pass changes nothing or `max_iter` passes have run. Mean
/// updates do not minimise an L1 objective, so the best (assignment,
/// centroids) pair seen is what gets returned.
pub fn kmeans_run<I: AsRef<[f64]>>(
    items: &[I],
    k: usize,
    params: &KMeansParams,
    seed: u64,
) -> Result<ClusterSet> {
    check_items(items, k)?;
    if params.max_iter == 0 {
        return Err(Error::contract("max_iter must be at least 1"));
    }
    let metric = params.metric;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Vec<f64>> = match params.init {
        KMeansInit::SpreadItems => spread_items(items, k, metric, &mut rng),
        KMeansInit::SampleItems => sample(&mut rng, items.len(), k)
            .into_iter()
            .map(|i| items[i].as_ref().to_vec())
            .collect(),
        KMeansInit::BalancedAssignment => {
            let order = sample(&mut rng, items.len(), items.len()).into_vec();
            let mut initial = vec![0; items.len()];
            for (pos, &i) in order.iter().enumerate() {
                initial[i] = pos % k;
            }
            let seed_centroids: Vec<Vec<f64>> = order[..k]
                .iter()
                .map(|&i| items[i].as_ref().to_vec())
                .collect();
            update_centroids(items, &initial, &seed_centroids, params.update).0
        }
    };

    let mut assignment: Vec<usize> = Vec::new();
    let mut best: Option<(f64, Vec<usize>, Vec<Vec<f64>>)> = None;
    let mut converged = false;
    let mut iterations = 0;
    for iter in 1..=params.max_iter {
        iterations = iter;
        let next = assign(items, &centroids, metric);
        let changed = next != assignment;
        assignment = next;

        let fitness = intra_cluster_fitness(items, &assignment, &centroids, metric);
        if best.as_ref().is_none_or(|b| fitness < b.0) {
            best = Some((fitness, assignment.clone(), centroids.clone()));
        }
        if !changed {
            converged = true;
            break;
        }

        let (updated, empty) = update_centroids(items, &assignment, &centroids, params.update);
        centroids = updated;
        if !empty.is_empty() {
            repair_empty(items, &mut assignment, &mut centroids, &empty, metric);
        }
    }

    let (final_fitness, assignment, centroids) = best.expect("at least one iteration ran");
    Ok(ClusterSet {
        k,
        centroids,
        assignment,
        iterations_run: iterations,
        converged,
        final_fitness,
    })
}

/// Best-relabelling agreement between two labelings with `k` labels each:
/// the number of items on which they agree under the best label permutation.
pub fn matched_agreement(a: &[usize], b: &[usize], k: usize) -> usize {
    let mut confusion = vec![vec![0usize; k]; k];
    for (&x, &y) in a.iter().zip(b) {
        confusion[x][y] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = 0;
    permute(&mut perm, 0, &mut |p| {
        let s = (0..k).map(|i| confusion[i][p[i]]).sum();
        best = best.max(s);
    });
    best
}

fn permute(p: &mut Vec<usize>, start: usize, f: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        f(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, f);
        p.swap(start, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separated_duplicates() {
        let data = vec![
            vec![0.0, 0.0],
            vec![0.0, 0.0],
            vec![10.0, 10.0],
            vec![10.0, 10.0],
        ];
        for seed in 0..10 {
            let cs = kmeans_run(&data, 2, &KMeansParams::default(), seed).unwrap();
            assert_eq!(cs.final_fitness, 0.0);
            assert_eq!(cs.assignment[0], cs.assignment[1]);
            assert_eq!(cs.assignment[2], cs.assignment[3]);
            assert_ne!(cs.assignment[0], cs.assignment[2]);
        }
    }

    #[test]
    fn k_equals_n() {
        let data: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 * 3.0, 1.0]).collect();
        let cs = kmeans_run(&data, 6, &KMeansParams::default(), 4).unwrap();
        assert_eq!(cs.final_fitness, 0.0);
        let mut labels = cs.assignment.clone();
        labels.sort();
        assert_eq!(labels, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn rejects_bad_k() {
        let data = vec![vec![1.0], vec![2.0]];
        assert!(kmeans_run(&data, 3, &KMeansParams::default(), 0).is_err());
        assert!(kmeans_run(&data, 0, &KMeansParams::default(), 0).is_err());
        let empty: Vec<Vec<f64>> = vec![];
        assert!(kmeans_run(&empty, 1, &KMeansParams::default(), 0).is_err());
    }

    #[test]
    fn deterministic_and_self_consistent() {
        let data: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i * 7 % 13) as f64, (i * 5 % 11) as f64])
            .collect();
        for update in [CentroidUpdate::Mean, CentroidUpdate::Median] {
            for init in [
                KMeansInit::SpreadItems,
                KMeansInit::SampleItems,
                KMeansInit::BalancedAssignment,
            ] {
                let p = KMeansParams {
                    update,
                    init,
                    ..Default::default()
                };
                let a = kmeans_run(&data, 4, &p, 11).unwrap();
                let b = kmeans_run(&data, 4, &p, 11).unwrap();
                assert_eq!(a, b);
                assert!(
                    (a.recompute_fitness(&data, Metric::CityBlock) - a.final_fitness).abs() < 1e-9
                );
                assert!(a.iterations_run <= p.max_iter);
                assert!(a.assignment.iter().all(|&c| c < 4));
            }
        }
    }

    #[test]
    fn max_iter_one_stops() {
        let data: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let p = KMeansParams {
            max_iter: 1,
            ..Default::default()
        };
        let cs = kmeans_run(&data, 3, &p, 1).unwrap();
        assert_eq!(cs.iterations_run, 1);
        assert!(!cs.converged);
    }

    #[test]
    fn returned_fitness_not_worse_than_first_iteration() {
        let data: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                vec![
                    ((i * 37) % 23) as f64,
                    ((i * 11) % 17) as f64,
                    (i % 5) as f64,
                ]
            })
            .collect();
        for seed in 0..10 {
            let first = kmeans_run(
                &data,
                4,
                &KMeansParams {
                    max_iter: 1,
                    ..Default::default()
                },
                seed,
            )
            .unwrap();
            let full = kmeans_run(&data, 4, &KMeansParams::default(), seed).unwrap();
            assert!(full.final_fitness <= first.final_fitness);
        }
    }

    #[test]
    fn empty_cluster_repair() {
        let items = vec![vec![0.0], vec![1.0], vec![9.0]];
        let mut assignment = vec![0, 0, 0];
        let mut centroids = vec![vec![0.5], vec![100.0]];
        repair_empty(
            &items,
            &mut assignment,
            &mut centroids,
            &[1],
            Metric::CityBlock,
        );
        assert_eq!(centroids[1], vec![9.0]);
        assert_eq!(assignment, vec![0, 0, 1]);
    }

    #[test]
    fn agreement_under_relabeling() {
        assert_eq!(matched_agreement(&[0, 0, 1, 1, 2], &[2, 2, 0, 0, 1], 3), 5);
        assert_eq!(matched_agreement(&[0, 0, 1, 1], &[0, 1, 0, 1], 2), 2);
    }
}

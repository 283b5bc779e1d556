//! Distances, cluster and bicluster validity measures, and structure homology.
//!
//! The kernels here take plain slices and treat shape disagreements as
//! programming errors (they panic). Engine entry points validate user input
//! before calling in.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::StructureWindowSet;
use crate::matrix::Matrix;
use crate::seqio::Ss3;

/// City-block (L1) distance: the sum of absolute cell differences.
#[inline]
pub fn cityblock(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(
        a.len(),
        b.len(),
        "contract violation: cityblock shape mismatch"
    );
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(
        a.len(),
        b.len(),
        "contract violation: euclidean shape mismatch"
    );
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Item-to-centroid dissimilarity used by the clustering engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    #[default]
    CityBlock,
    Euclidean,
}

impl Metric {
    #[inline]
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::CityBlock => cityblock(a, b),
            Metric::Euclidean => euclidean(a, b),
        }
    }
}

/// Index of the nearest centroid; the lowest index wins ties.
pub fn nearest_centroid<C: AsRef<[f64]>>(
    item: &[f64],
    centroids: &[C],
    metric: Metric,
) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centroids.iter().enumerate() {
        let d = metric.distance(item, c.as_ref());
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// Intra-cluster fitness: total item-to-own-centroid distance divided by the
/// number of clusters. Empty clusters add nothing to the numerator but still
/// count in the denominator.
pub fn intra_cluster_fitness<I, C>(
    items: &[I],
    assignment: &[usize],
    centroids: &[C],
    metric: Metric,
) -> f64
where
    I: AsRef<[f64]>,
    C: AsRef<[f64]>,
{
    assert!(!items.is_empty(), "contract violation: empty dataset");
    assert!(!centroids.is_empty(), "contract violation: no clusters");
    assert_eq!(
        items.len(),
        assignment.len(),
        "contract violation: assignment length"
    );
    let total: f64 = items
        .iter()
        .zip(assignment)
        .map(|(x, &k)| metric.distance(x.as_ref(), centroids[k].as_ref()))
        .sum();
    total / centroids.len() as f64
}

/// Mean square residue of the submatrix `rows × cols`.
///
/// Residues are taken against the submatrix's own row means, column means and
/// overall mean.
pub fn msr(matrix: &Matrix, rows: &[usize], cols: &[usize]) -> f64 {
    assert!(
        !rows.is_empty() && !cols.is_empty(),
        "contract violation: msr needs non-empty row and column sets"
    );
    let (ni, nj) = (rows.len() as f64, cols.len() as f64);
    let mut row_mean = vec![0.0; rows.len()];
    let mut col_mean = vec![0.0; cols.len()];
    let mut all = 0.0;
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            let v = matrix.get(i, j);
            row_mean[a] += v;
            col_mean[b] += v;
            all += v;
        }
    }
    row_mean.iter_mut().for_each(|m| *m /= nj);
    col_mean.iter_mut().for_each(|m| *m /= ni);
    all /= ni * nj;
    let mut acc = 0.0;
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            let r = matrix.get(i, j) - row_mean[a] - col_mean[b] + all;
            acc += r * r;
        }
    }
    acc / (ni * nj)
}

/// Per-position H/E/C frequencies over a group's structure segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureProfile {
    /// One `[H, E, C]` row per window position.
    pub freqs: Vec<[f64; 3]>,
    pub n_segments: usize,
}

impl StructureProfile {
    pub fn window_size(&self) -> usize {
        self.freqs.len()
    }
}

/// Tallies label frequencies position by position across every segment of
/// every member.
pub fn build_profile<'a>(
    sets: impl IntoIterator<Item = &'a StructureWindowSet>,
) -> Result<StructureProfile> {
    let mut counts: Vec<[usize; 3]> = Vec::new();
    let mut n = 0usize;
    for set in sets {
        for seg in &set.segments {
            if counts.is_empty() {
                counts = vec![[0; 3]; seg.len()];
            } else if counts.len() != seg.len() {
                return Err(Error::contract("structure segments of differing length"));
            }
            for (pos, label) in seg.iter().enumerate() {
                counts[pos][label.index()] += 1;
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(Error::contract(
            "structure profile needs at least one segment",
        ));
    }
    let freqs = counts
        .iter()
        .map(|c| {
            [
                c[0] as f64 / n as f64,
                c[1] as f64 / n as f64,
                c[2] as f64 / n as f64,
            ]
        })
        .collect();
    Ok(StructureProfile {
        freqs,
        n_segments: n,
    })
}

/// Average over positions of the dominant structure class frequency.
pub fn structure_similarity(profile: &StructureProfile) -> f64 {
    let ws = profile.freqs.len() as f64;
    profile
        .freqs
        .iter()
        .map(|r| r[0].max(r[1]).max(r[2]))
        .sum::<f64>()
        / ws
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HomologyClass {
    None,
    Weak,
    Identical,
}

pub const IDENTICAL_THRESHOLD: f64 = 0.70;
pub const WEAK_THRESHOLD: f64 = 0.60;

/// Above 0.70 is identical, above 0.60 up to 0.70 is weak, anything else none.
pub fn homology_class(sim: f64) -> HomologyClass {
    if sim > IDENTICAL_THRESHOLD {
        HomologyClass::Identical
    } else if sim > WEAK_THRESHOLD {
        HomologyClass::Weak
    } else {
        HomologyClass::None
    }
}

/// Dominant label per position of a profile. Ties prefer H, then E.
pub fn consensus(profile: &StructureProfile) -> Vec<Ss3> {
    profile
        .freqs
        .iter()
        .map(|r| {
            let mut best = Ss3::H;
            for s in Ss3::ALL {
                if r[s.index()] > r[best.index()] {
                    best = s;
                }
            }
            best
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cityblock_examples() {
        let z = [0.0; 4];
        assert_eq!(cityblock(&z, &z), 0.0);
        assert_eq!(cityblock(&[1.0, 2.0, 3.0, 4.0], &z), 10.0);
        assert_eq!(cityblock(&[1.0, -2.0], &[-1.0, 2.0]), 6.0);
    }

    #[test]
    #[should_panic(expected = "contract violation")]
    fn cityblock_shape_mismatch() {
        cityblock(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn intra_fitness_examples() {
        let items = [vec![1.0], vec![3.0]];
        assert_eq!(
            intra_cluster_fitness(&items, &[0, 0], &[vec![2.0]], Metric::CityBlock),
            2.0
        );
        assert_eq!(
            intra_cluster_fitness(&items, &[0, 1], &[vec![1.0], vec![3.0]], Metric::CityBlock),
            0.0
        );
        // distances 6 and 4 summed per cluster, two clusters
        let items = [vec![0.0], vec![6.0], vec![14.0]];
        let f = intra_cluster_fitness(
            &items,
            &[0, 0, 1],
            &[vec![0.0], vec![10.0]],
            Metric::CityBlock,
        );
        assert_eq!(f, 5.0);
    }

    #[test]
    fn empty_cluster_still_counts_in_denominator() {
        let items = [vec![0.0], vec![4.0]];
        let f = intra_cluster_fitness(
            &items,
            &[0, 0],
            &[vec![2.0], vec![100.0]],
            Metric::CityBlock,
        );
        assert_eq!(f, 2.0);
    }

    #[test]
    fn msr_zero_cases() {
        let c = Matrix::from_fn(4, 3, |_, _| 7.5);
        assert_eq!(msr(&c, &[0, 1, 2, 3], &[0, 1, 2]), 0.0);
        let add = Matrix::from_fn(5, 4, |i, j| i as f64 * 1.5 + (j * j) as f64);
        assert!(msr(&add, &[0, 1, 2, 3, 4], &[0, 1, 2, 3]) < 1e-20);
        assert!(msr(&add, &[4, 1], &[3, 0]) < 1e-20);
    }

    #[test]
    fn msr_hand_value() {
        // [[1,0],[0,1]]: means all 0.5, residues ±0.5
        let m = Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]);
        assert!((msr(&m, &[0, 1], &[0, 1]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn similarity_examples() {
        let helix = StructureProfile {
            freqs: vec![[1.0, 0.0, 0.0]; 9],
            n_segments: 3,
        };
        assert_eq!(structure_similarity(&helix), 1.0);
        let third = 1.0 / 3.0;
        let flat = StructureProfile {
            freqs: vec![[third; 3]; 9],
            n_segments: 3,
        };
        assert!((structure_similarity(&flat) - third).abs() < 1e-12);
        let maxima = [0.8, 0.7, 0.9, 0.6, 0.8, 0.7, 0.9, 0.6, 0.8];
        let p = StructureProfile {
            freqs: maxima.iter().map(|&m| [m, 1.0 - m, 0.0]).collect(),
            n_segments: 10,
        };
        assert!((structure_similarity(&p) - 6.8 / 9.0).abs() < 1e-12);
        assert!((structure_similarity(&p) - 0.7556).abs() < 1e-4);
    }

    #[test]
    fn homology_boundaries() {
        assert_eq!(homology_class(0.75), HomologyClass::Identical);
        assert_eq!(homology_class(0.65), HomologyClass::Weak);
        assert_eq!(homology_class(0.70), HomologyClass::Weak);
        assert_eq!(homology_class(0.60), HomologyClass::None);
        assert_eq!(homology_class(0.7000001), HomologyClass::Identical);
    }

    fn set(segs: &[&str]) -> StructureWindowSet {
        StructureWindowSet {
            sequence_id: "x".into(),
            segments: segs
                .iter()
                .map(|s| s.chars().map(crate::seqio::map_ss8_to_ss3).collect())
                .collect(),
        }
    }

    #[test]
    fn profiles() {
        let p = build_profile([&set(&["HHHHHHHHH", "HHHHHHHHH"])]).unwrap();
        assert_eq!(p.freqs, vec![[1.0, 0.0, 0.0]; 9]);
        assert_eq!(p.n_segments, 2);

        let p = build_profile([&set(&["HHHHHHHHH"]), &set(&["EEEEEEEEE"])]).unwrap();
        assert_eq!(p.freqs, vec![[0.5, 0.5, 0.0]; 9]);

        // hand tally over four segments
        let a = set(&["HHHECCCCC", "HHEEECCCH"]);
        let b = set(&["HEEEECCHH", "CCCCCCCCC"]);
        let p = build_profile([&a, &b]).unwrap();
        assert_eq!(p.n_segments, 4);
        assert_eq!(p.freqs[0], [0.75, 0.0, 0.25]);
        assert_eq!(p.freqs[1], [0.5, 0.25, 0.25]);
        assert_eq!(p.freqs[2], [0.25, 0.5, 0.25]);
        assert_eq!(p.freqs[3], [0.0, 0.75, 0.25]);
        assert_eq!(p.freqs[4], [0.0, 0.5, 0.5]);
        assert_eq!(p.freqs[8], [0.5, 0.0, 0.5]);
    }

    #[test]
    fn profile_without_segments() {
        assert!(build_profile([&set(&[])]).is_err());
    }

    fn vec9x20() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-50.0f64..50.0, 180)
    }

    proptest! {
        #[test]
        fn cityblock_metric_laws(a in vec9x20(), b in vec9x20(), c in vec9x20()) {
            prop_assert!(cityblock(&a, &b) >= 0.0);
            prop_assert_eq!(cityblock(&a, &b), cityblock(&b, &a));
            prop_assert!(cityblock(&a, &c) <= cityblock(&a, &b) + cityblock(&b, &c) + 1e-12);
        }

        #[test]
        fn similarity_bounds(raw in proptest::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 9)) {
            let freqs: Vec<[f64; 3]> = raw.iter().map(|&(h, e, c)| {
                let s = h + e + c + 1e-12;
                [h / s, e / s, c / s]
            }).collect();
            let sim = structure_similarity(&StructureProfile { freqs, n_segments: 1 });
            prop_assert!((1.0 / 3.0 - 1e-9..=1.0 + 1e-9).contains(&sim));
        }

        #[test]
        fn homology_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(homology_class(lo) <= homology_class(hi));
        }
    }
}

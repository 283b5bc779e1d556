//! Seeded synthetic fixtures: blob clouds, planted biclusters, and a protein
//! corpus with planted structural classes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::matrix::Matrix;
use crate::seqio::{AminoAcid, Corpus, SecondaryStructure, Sequence, Ss3, ALPHABET};

/// Gaussian blobs around `centers`, `per_blob` points each. Returns points
/// and their blob labels.
pub fn blobs(
    centers: &[Vec<f64>],
    per_blob: usize,
    sigma: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma must be finite and non-negative");
    let mut points = Vec::with_capacity(centers.len() * per_blob);
    let mut labels = Vec::with_capacity(points.capacity());
    for (label, c) in centers.iter().enumerate() {
        for _ in 0..per_blob {
            points.push(c.iter().map(|&m| m + normal.sample(&mut rng)).collect());
            labels.push(label);
        }
    }
    (points, labels)
}

/// Uniformly scattered points in `[lo, hi)^dim`.
pub fn uniform_points(n: usize, dim: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct PlantedBicluster {
    pub matrix: Matrix,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// `n_rows × n_cols` uniform noise in `[0, noise)` with an additive block
/// `b_ij = offset + r_i + c_j` (`r_i`, `c_j` uniform in `[0, spread)`) on a
/// random row and column subset.
#[allow(clippy::too_many_arguments)]
pub fn planted_additive_bicluster(
    n_rows: usize,
    n_cols: usize,
    block_rows: usize,
    block_cols: usize,
    noise: f64,
    offset: f64,
    spread: f64,
    seed: u64,
) -> PlantedBicluster {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix = Matrix::from_fn(n_rows, n_cols, |_, _| rng.random_range(0.0..noise));
    let mut rows = rand::seq::index::sample(&mut rng, n_rows, block_rows).into_vec();
    let mut cols = rand::seq::index::sample(&mut rng, n_cols, block_cols).into_vec();
    rows.sort_unstable();
    cols.sort_unstable();
    let r: Vec<f64> = rows.iter().map(|_| rng.random_range(0.0..spread)).collect();
    let c: Vec<f64> = cols.iter().map(|_| rng.random_range(0.0..spread)).collect();
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            matrix.set(i, j, offset + r[a] + c[b]);
        }
    }
    PlantedBicluster { matrix, rows, cols }
}

/// Structural class of a synthetic sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantedClass {
    Helix,
    Strand,
    Coil,
}

impl PlantedClass {
    pub const ALL: [PlantedClass; 3] = [
        PlantedClass::Helix,
        PlantedClass::Strand,
        PlantedClass::Coil,
    ];

    fn preferred_residues(self) -> &'static str {
        match self {
            PlantedClass::Helix => "AELMQKR",
            PlantedClass::Strand => "VIYFWT",
            PlantedClass::Coil => "GPNDS",
        }
    }

    fn label(self) -> Ss3 {
        match self {
            PlantedClass::Helix => Ss3::H,
            PlantedClass::Strand => Ss3::E,
            PlantedClass::Coil => Ss3::C,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CorpusSpec {
    pub per_class: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability a residue is drawn from the class's preferred set.
    pub residue_bias: f64,
    /// Probability a structure label is replaced by a random one.
    pub structure_noise: f64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            per_class: 10,
            min_len: 27,
            max_len: 63,
            residue_bias: 0.7,
            structure_noise: 0.15,
        }
    }
}

/// A corpus whose sequences fall into three planted classes. Each class
/// prefers its own residues and its own dominant structure label. Returns
/// the corpus and the class of each sequence.
pub fn planted_structural_corpus(spec: CorpusSpec, seed: u64) -> (Corpus, Vec<PlantedClass>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequences = Vec::new();
    let mut structures = Vec::new();
    let mut classes = Vec::new();
    for i in 0..spec.per_class * 3 {
        let class = PlantedClass::ALL[i % 3];
        let len = rng.random_range(spec.min_len..=spec.max_len);
        let pool: Vec<char> = class.preferred_residues().chars().collect();
        let residues: Vec<AminoAcid> = (0..len)
            .map(|_| {
                let c = if rng.random::<f64>() < spec.residue_bias {
                    pool[rng.random_range(0..pool.len())]
                } else {
                    ALPHABET[rng.random_range(0..ALPHABET.len())]
                };
                AminoAcid::from_char(c).unwrap()
            })
            .collect();
        let classes3: Vec<Ss3> = (0..len)
            .map(|_| {
                if rng.random::<f64>() < spec.structure_noise {
                    Ss3::ALL[rng.random_range(0..3)]
                } else {
                    class.label()
                }
            })
            .collect();
        let id = format!("syn{:03}", i + 1);
        sequences.push(Sequence {
            id: id.clone(),
            residues,
        });
        structures.push(SecondaryStructure { id, classes3 });
        classes.push(class);
    }
    let corpus = Corpus::new(sequences)
        .with_structures(structures)
        .expect("generated structures match their sequences");
    (corpus, classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::msr;

    #[test]
    fn planted_block_has_zero_msr() {
        let p = planted_additive_bicluster(40, 20, 8, 6, 10.0, 20.0, 5.0, 3);
        assert_eq!((p.rows.len(), p.cols.len()), (8, 6));
        assert!(msr(&p.matrix, &p.rows, &p.cols) < 1e-20);
    }

    #[test]
    fn corpus_is_reproducible() {
        let (a, ca) = planted_structural_corpus(CorpusSpec::default(), 5);
        let (b, cb) = planted_structural_corpus(CorpusSpec::default(), 5);
        assert_eq!(a.sequences, b.sequences);
        assert_eq!(ca, cb);
        assert_eq!(a.sequences.len(), 30);
        assert!(a.sequences.iter().all(|s| s.len() >= 27));
    }

    #[test]
    fn blobs_have_labels() {
        let (pts, labels) = blobs(&[vec![0.0, 0.0], vec![10.0, 10.0]], 5, 0.1, 1);
        assert_eq!(pts.len(), 10);
        assert_eq!(labels.iter().filter(|&&l| l == 1).count(), 5);
    }
}

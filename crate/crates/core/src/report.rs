//! Cluster and bicluster pipelines over a corpus, structure-homology tallies,
//! and the side-by-side comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::featurize::{
    build_bicluster_matrix, build_cluster_dataset, structure_segments, FrequencyWindow,
    Normalization, StructureWindowSet, WindowMode, DEFAULT_WINDOW,
};
use crate::kmeans::ClusterSet;
use crate::matrix::Matrix;
use crate::metrics::{
    build_profile, homology_class, structure_similarity, HomologyClass, StructureProfile,
};
use crate::psobiclust::{
    pso_bicluster, seed_biclusters, Bicluster, BiclusterConfig, BiclusterOutcome,
};
use crate::psokmeans::{pso_kmeans, PsoKMeansConfig, PsoKMeansResult};
use crate::seqio::Corpus;

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.70, 0.65, 0.60];

/// Counts of groups at or above each similarity threshold.
pub fn tally_homology(similarities: &[f64], thresholds: &[f64]) -> Result<Vec<usize>> {
    if thresholds.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::contract(
            "thresholds must be sorted in descending order",
        ));
    }
    Ok(thresholds
        .iter()
        .map(|&t| similarities.iter().filter(|&&s| s >= t).count())
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomologyTally {
    pub thresholds: Vec<f64>,
    pub counts_clusters: Vec<usize>,
    pub counts_biclusters: Vec<usize>,
}

impl HomologyTally {
    /// `threshold,clusters,biclusters`, thresholds as whole percentages.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,clusters,biclusters\n");
        for ((t, c), b) in self
            .thresholds
            .iter()
            .zip(&self.counts_clusters)
            .zip(&self.counts_biclusters)
        {
            out.push_str(&format!("{}%,{c},{b}\n", (t * 100.0).round()));
        }
        out
    }
}

/// One cluster or bicluster scored by structure homology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group_id: String,
    /// Sequence ids of the member rows.
    pub members: Vec<String>,
    /// Amino-acid columns kept by a bicluster; absent for clusters.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub columns: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub msr: Option<f64>,
    pub n_segments: usize,
    pub similarity: f64,
    pub homology: HomologyClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub window_size: usize,
    pub window_mode: WindowMode,
    pub normalization: Normalization,
    pub k: usize,
    pub clustering: PsoKMeansConfig,
    pub k_rows: usize,
    pub k_cols: usize,
    /// PSO k-means settings for the row and column seeding runs.
    pub seeding: PsoKMeansConfig,
    pub biclustering: BiclusterConfig,
    pub thresholds: Vec<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            window_size: DEFAULT_WINDOW,
            window_mode: WindowMode::Reshape,
            normalization: Normalization::Mean,
            k: 5,
            clustering: PsoKMeansConfig::default(),
            k_rows: 5,
            k_cols: 3,
            seeding: PsoKMeansConfig::default(),
            biclustering: BiclusterConfig::default(),
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
        }
    }
}

pub struct ClusterRun {
    pub windows: Vec<FrequencyWindow>,
    pub result: PsoKMeansResult,
}

impl ClusterRun {
    pub fn clusters(&self) -> &ClusterSet {
        &self.result.clusters
    }
}

pub fn run_clustering(corpus: &Corpus, cfg: &PipelineConfig) -> Result<ClusterRun> {
    let windows = build_cluster_dataset(&corpus.sequences, cfg.window_size, cfg.window_mode)?;
    let items: Vec<Vec<f64>> = windows.iter().map(FrequencyWindow::to_vector).collect();
    let result = pso_kmeans(&items, cfg.k, &cfg.clustering)?;
    Ok(ClusterRun { windows, result })
}

pub struct BiclusterRun {
    pub matrix: Matrix,
    pub seeds: Vec<Bicluster>,
    pub outcome: BiclusterOutcome,
}

pub fn run_biclustering(corpus: &Corpus, cfg: &PipelineConfig) -> Result<BiclusterRun> {
    let matrix = build_bicluster_matrix(
        &corpus.sequences,
        cfg.window_size,
        cfg.window_mode,
        cfg.normalization,
    )?;
    let seeds = seed_biclusters(&matrix, cfg.k_rows, cfg.k_cols, &cfg.seeding)?;
    let outcome = pso_bicluster(&matrix, &cfg.biclustering, &seeds)?;
    Ok(BiclusterRun {
        matrix,
        seeds,
        outcome,
    })
}

fn segment_sets(corpus: &Corpus, window_size: usize) -> Result<Vec<StructureWindowSet>> {
    Ok(corpus
        .structures()?
        .iter()
        .map(|s| structure_segments(s, window_size))
        .collect())
}

fn profile_of(sets: &[StructureWindowSet], members: &[usize]) -> Result<StructureProfile> {
    build_profile(members.iter().map(|&i| &sets[i]))
}

fn summarize(
    group_id: String,
    corpus: &Corpus,
    sets: &[StructureWindowSet],
    members: &[usize],
) -> Result<GroupSummary> {
    let profile = profile_of(sets, members)?;
    let similarity = structure_similarity(&profile);
    Ok(GroupSummary {
        group_id,
        members: members
            .iter()
            .map(|&i| corpus.sequences[i].id.clone())
            .collect(),
        columns: None,
        msr: None,
        n_segments: profile.n_segments,
        similarity,
        homology: homology_class(similarity),
    })
}

/// Scores each non-empty cluster by structure homology.
pub fn cluster_summaries(
    corpus: &Corpus,
    clusters: &ClusterSet,
    window_size: usize,
) -> Result<Vec<GroupSummary>> {
    let sets = segment_sets(corpus, window_size)?;
    clusters
        .members()
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(c, m)| summarize(format!("cluster{}", c + 1), corpus, &sets, m))
        .collect()
}

/// Scores each bicluster by the structure of its row set.
pub fn bicluster_summaries(
    corpus: &Corpus,
    biclusters: &[Bicluster],
    window_size: usize,
) -> Result<Vec<GroupSummary>> {
    let sets = segment_sets(corpus, window_size)?;
    biclusters
        .iter()
        .enumerate()
        .map(|(b, bic)| {
            let mut s = summarize(format!("bicluster{}", b + 1), corpus, &sets, &bic.rows)?;
            s.columns = Some(
                bic.cols
                    .iter()
                    .map(|&j| crate::seqio::ALPHABET[j])
                    .collect(),
            );
            s.msr = Some(bic.msr);
            Ok(s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub tally: HomologyTally,
    pub clusters: Vec<GroupSummary>,
    pub biclusters: Vec<GroupSummary>,
    pub cluster_fitness: f64,
    pub bicluster_gbest_fitness: f64,
}

/// Runs both pipelines on an annotated corpus and tallies homology.
pub fn compare_pipelines(corpus: &Corpus, cfg: &PipelineConfig) -> Result<ComparisonReport> {
    corpus.structures()?;
    let cluster_run = run_clustering(corpus, cfg)?;
    let bicluster_run = run_biclustering(corpus, cfg)?;
    let clusters = cluster_summaries(corpus, cluster_run.clusters(), cfg.window_size)?;
    let biclusters =
        bicluster_summaries(corpus, &bicluster_run.outcome.biclusters, cfg.window_size)?;
    let sims = |g: &[GroupSummary]| g.iter().map(|s| s.similarity).collect::<Vec<_>>();
    let tally = HomologyTally {
        thresholds: cfg.thresholds.clone(),
        counts_clusters: tally_homology(&sims(&clusters), &cfg.thresholds)?,
        counts_biclusters: tally_homology(&sims(&biclusters), &cfg.thresholds)?,
    };
    Ok(ComparisonReport {
        tally,
        clusters,
        biclusters,
        cluster_fitness: cluster_run.clusters().final_fitness,
        bicluster_gbest_fitness: bicluster_run.outcome.fitness[0],
    })
}

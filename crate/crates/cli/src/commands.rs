//! The five subcommands. Each reads raw inputs, runs the library, and writes
//! its artifacts through a [`Sink`].

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use psomotif::featurize::{build_bicluster_matrix, build_cluster_dataset, FrequencyWindow};
use psomotif::kmeans::{kmeans_run, ClusterSet};
use psomotif::motif::{
    build_motif_report, position_frequencies, render_logo_svg, MotifReport, MotifSpec, ResidueSet,
};
use psomotif::pso::trace_csv;
use psomotif::psobiclust::{pso_bicluster, seed_biclusters};
use psomotif::psokmeans::pso_kmeans;
use psomotif::report::{bicluster_summaries, cluster_summaries, compare_pipelines, GroupSummary};
use psomotif::seqio::{parse_sequences_with, parse_structures, Corpus};
use psomotif::ALPHABET;
use serde::{Deserialize, Serialize};

use crate::config::{Engine, RunConfig};
use crate::error::CliError;
use crate::output::Sink;

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn load_corpus(
    sequences: &Path,
    structures: Option<&Path>,
    cfg: &RunConfig,
) -> Result<Corpus, CliError> {
    let seqs = parse_sequences_with(&read(sequences)?, cfg.parse_options()).map_err(|source| {
        CliError::Input {
            path: sequences.to_path_buf(),
            source,
        }
    })?;
    if seqs.is_empty() {
        return Err(CliError::Invalid(format!(
            "{} holds no sequences",
            sequences.display()
        )));
    }
    let corpus = Corpus::new(seqs);
    match structures {
        None => Ok(corpus),
        Some(path) => {
            let input_err = |source| CliError::Input {
                path: path.to_path_buf(),
                source,
            };
            let ss = parse_structures(&read(path)?, &corpus.sequences).map_err(input_err)?;
            corpus.with_structures(ss).map_err(input_err)
        }
    }
}

fn inputs<'a>(sequences: &'a Path, structures: Option<&'a Path>) -> Vec<&'a Path> {
    std::iter::once(sequences).chain(structures).collect()
}

fn header_letters() -> String {
    ALPHABET.iter().map(|c| format!(",{c}")).collect()
}

#[derive(Debug, Serialize)]
struct SequenceEntry {
    id: String,
    length: usize,
    segments: u64,
}

#[derive(Debug, Serialize)]
struct Manifest {
    n_sequences: usize,
    n_windows: usize,
    window_shape: [usize; 2],
    matrix_shape: [usize; 2],
    has_structures: bool,
    files: Vec<String>,
    sequences: Vec<SequenceEntry>,
}

fn segments(w: &FrequencyWindow) -> u64 {
    w.counts
        .first()
        .map_or(0, |row| row.iter().map(|&c| c as u64).sum())
}

pub fn cmd_prepare(
    cfg: &RunConfig,
    sequences: &Path,
    structures: Option<&Path>,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let corpus = load_corpus(sequences, structures, cfg)?;
    let windows = build_cluster_dataset(&corpus.sequences, cfg.window_size, cfg.window_mode)?;
    let matrix = build_bicluster_matrix(
        &corpus.sequences,
        cfg.window_size,
        cfg.window_mode,
        cfg.normalization,
    )?;

    let mut win_csv = format!("sequence_id,position{}\n", header_letters());
    for w in &windows {
        for (p, row) in w.counts.iter().enumerate() {
            win_csv.push_str(&format!("{},{}", w.sequence_id, p + 1));
            row.iter().for_each(|c| win_csv.push_str(&format!(",{c}")));
            win_csv.push('\n');
        }
    }
    let mut mat_csv = format!("sequence_id{}\n", header_letters());
    for (i, s) in corpus.sequences.iter().enumerate() {
        mat_csv.push_str(&s.id);
        matrix
            .row(i)
            .iter()
            .for_each(|v| mat_csv.push_str(&format!(",{v}")));
        mat_csv.push('\n');
    }

    let mut sink = Sink::new(out, "prepare", cfg, &inputs(sequences, structures))?;
    sink.csv("windows.csv", &win_csv)?;
    sink.csv("matrix.csv", &mat_csv)?;
    let manifest = Manifest {
        n_sequences: corpus.sequences.len(),
        n_windows: windows.len(),
        window_shape: [cfg.window_size, ALPHABET.len()],
        matrix_shape: [matrix.nrows(), matrix.ncols()],
        has_structures: corpus.structures.is_some(),
        files: vec!["windows.csv".into(), "matrix.csv".into()],
        sequences: corpus
            .sequences
            .iter()
            .zip(&windows)
            .map(|(s, w)| SequenceEntry {
                id: s.id.clone(),
                length: s.len(),
                segments: segments(w),
            })
            .collect(),
    };
    sink.json("manifest.json", &manifest)?;
    Ok(sink.written)
}

/// One cluster or bicluster as written to disk and read back by `motifs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub group_id: String,
    pub members: Vec<String>,
    /// Amino-acid letters of a bicluster's columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fitness: Option<f64>,
}

#[derive(Debug, Serialize)]
struct ClusterReport<'a> {
    engine: Engine,
    k: usize,
    fitness: f64,
    iterations_run: usize,
    converged: bool,
    groups: Vec<GroupRecord>,
    centroids: &'a [Vec<f64>],
    #[serde(skip_serializing_if = "Option::is_none")]
    homology: Option<Vec<GroupSummary>>,
}

pub fn cmd_cluster(
    cfg: &RunConfig,
    sequences: &Path,
    structures: Option<&Path>,
    out: &Path,
    trace: bool,
) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    if trace && cfg.engine == Engine::Kmeans {
        return Err(CliError::Usage(
            "--trace needs the pso-kmeans engine".into(),
        ));
    }
    let corpus = load_corpus(sequences, structures, cfg)?;
    let windows = build_cluster_dataset(&corpus.sequences, cfg.window_size, cfg.window_mode)?;
    let items: Vec<Vec<f64>> = windows.iter().map(FrequencyWindow::to_vector).collect();
    let (clusters, gbest_trace): (ClusterSet, Option<Vec<f64>>) = match cfg.engine {
        Engine::PsoKmeans => {
            let r = pso_kmeans(&items, cfg.k, &cfg.clustering())?;
            (r.clusters, Some(r.trace))
        }
        Engine::Kmeans => (kmeans_run(&items, cfg.k, &cfg.kmeans(), cfg.seed)?, None),
    };
    let groups = clusters
        .members()
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(c, m)| GroupRecord {
            group_id: format!("cluster{}", c + 1),
            members: m.iter().map(|&i| corpus.sequences[i].id.clone()).collect(),
            columns: None,
            msr: None,
            volume: None,
            fitness: None,
        })
        .collect();
    let homology = match corpus.structures {
        Some(_) => Some(cluster_summaries(&corpus, &clusters, cfg.window_size)?),
        None => None,
    };
    let report = ClusterReport {
        engine: cfg.engine,
        k: clusters.k,
        fitness: clusters.final_fitness,
        iterations_run: clusters.iterations_run,
        converged: clusters.converged,
        groups,
        centroids: &clusters.centroids,
        homology,
    };
    let mut sink = Sink::new(out, "cluster", cfg, &inputs(sequences, structures))?;
    sink.json("clusters.json", &report)?;
    if let (true, Some(t)) = (trace, gbest_trace) {
        sink.csv("trace.csv", &trace_csv(&t))?;
    }
    Ok(sink.written)
}

#[derive(Debug, Serialize)]
struct BiclusterReport {
    lambda: f64,
    matrix_shape: [usize; 2],
    n_seeds: usize,
    gbest_fitness: f64,
    groups: Vec<GroupRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    homology: Option<Vec<GroupSummary>>,
}

pub fn cmd_bicluster(
    cfg: &RunConfig,
    sequences: &Path,
    structures: Option<&Path>,
    out: &Path,
    trace: bool,
) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let corpus = load_corpus(sequences, structures, cfg)?;
    let matrix = build_bicluster_matrix(
        &corpus.sequences,
        cfg.window_size,
        cfg.window_mode,
        cfg.normalization,
    )?;
    let seeds = seed_biclusters(&matrix, cfg.k_rows, cfg.k_cols, &cfg.clustering())?;
    let outcome = pso_bicluster(&matrix, &cfg.biclustering(), &seeds)?;
    let groups = outcome
        .biclusters
        .iter()
        .zip(&outcome.fitness)
        .enumerate()
        .map(|(b, (bic, &fitness))| GroupRecord {
            group_id: format!("bicluster{}", b + 1),
            members: bic
                .rows
                .iter()
                .map(|&i| corpus.sequences[i].id.clone())
                .collect(),
            columns: Some(bic.cols.iter().map(|&j| ALPHABET[j]).collect()),
            msr: Some(bic.msr),
            volume: Some(bic.volume),
            fitness: Some(fitness),
        })
        .collect();
    let homology = match corpus.structures {
        Some(_) => Some(bicluster_summaries(
            &corpus,
            &outcome.biclusters,
            cfg.window_size,
        )?),
        None => None,
    };
    let report = BiclusterReport {
        lambda: outcome.lambda,
        matrix_shape: [matrix.nrows(), matrix.ncols()],
        n_seeds: seeds.len(),
        gbest_fitness: outcome.fitness[0],
        groups,
        homology,
    };
    let mut sink = Sink::new(out, "bicluster", cfg, &inputs(sequences, structures))?;
    sink.json("biclusters.json", &report)?;
    if trace {
        sink.csv("trace.csv", &trace_csv(&outcome.trace))?;
    }
    Ok(sink.written)
}

#[derive(Debug, Deserialize)]
struct GroupsPayload {
    groups: Vec<GroupRecord>,
}

#[derive(Debug, Deserialize)]
struct GroupsFile {
    config: RunConfig,
    result: GroupsPayload,
}

fn relation_name(r: Option<psomotif::motif::Relation>) -> &'static str {
    use psomotif::motif::Relation;
    match r {
        None => "",
        Some(Relation::Full) => "Full",
        Some(Relation::Partial) => "Partial",
        Some(Relation::Disjoint) => "Disjoint",
    }
}

/// Motif reports for every group of a `cluster` or `bicluster` output.
/// Window settings are taken from the groups file so windows line up with
/// the run that produced the groups.
pub fn cmd_motifs(
    cfg: &RunConfig,
    sequences: &Path,
    groups: &Path,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    let file: GroupsFile = serde_json::from_str(&read(groups)?)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", groups.display())))?;
    let cfg = RunConfig {
        window_size: file.config.window_size,
        window_mode: file.config.window_mode,
        relax_alphabet: file.config.relax_alphabet,
        ..cfg.clone()
    };
    cfg.validate()?;
    let corpus = load_corpus(sequences, None, &cfg)?;
    let windows = build_cluster_dataset(&corpus.sequences, cfg.window_size, cfg.window_mode)?;
    let by_id: HashMap<&str, &FrequencyWindow> = windows
        .iter()
        .map(|w| (w.sequence_id.as_str(), w))
        .collect();

    let mut reports: Vec<MotifReport> = Vec::new();
    for g in &file.result.groups {
        let members = g
            .members
            .iter()
            .map(|id| {
                by_id.get(id.as_str()).copied().ok_or_else(|| {
                    CliError::Invalid(format!(
                        "group {} names unknown sequence '{id}'",
                        g.group_id
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let freqs = position_frequencies(&members)?;
        let spec = match &g.columns {
            Some(cols) => MotifSpec::Uniform(
                cols.parse::<ResidueSet>()
                    .map_err(|e| CliError::Invalid(format!("group {}: {e}", g.group_id)))?,
            ),
            None => MotifSpec::Absent,
        };
        let n: u64 = members.iter().map(|w| segments(w)).sum();
        reports.push(build_motif_report(
            &g.group_id,
            &freqs,
            &spec,
            n as usize,
            cfg.motif_options(),
        ));
    }

    let mut csv = String::from("group_id,position,saa,motif,relation,total_bits\n");
    for r in &reports {
        for p in &r.positions {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.group_id,
                p.position,
                p.saa,
                p.motif.map(|m| m.to_string()).unwrap_or_default(),
                relation_name(p.relation),
                p.logo.total_bits
            ));
        }
    }

    let mut sink = Sink::new(out, "motifs", &cfg, &[sequences, groups])?;
    sink.json("motifs.json", &reports)?;
    sink.csv("motifs.csv", &csv)?;
    for r in &reports {
        let columns: Vec<_> = r.positions.iter().map(|p| p.logo.clone()).collect();
        sink.svg(
            &format!("logos/{}.svg", r.group_id),
            &render_logo_svg(&r.group_id, &columns),
        )?;
    }
    Ok(sink.written)
}

/// Both pipelines on an annotated corpus, plus the homology tally.
pub fn cmd_compare(
    cfg: &RunConfig,
    sequences: &Path,
    structures: &Path,
    out: &Path,
) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let corpus = load_corpus(sequences, Some(structures), cfg)?;
    let report = compare_pipelines(&corpus, &cfg.pipeline())?;
    let mut sink = Sink::new(out, "compare", cfg, &[sequences, structures])?;
    sink.json("compare.json", &report)?;
    sink.csv("tally.csv", &report.tally.to_csv())?;
    Ok(sink.written)
}

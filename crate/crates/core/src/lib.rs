//! Protein sequence motif extraction with PSO-optimised k-means.
//!
//! The crate turns protein sequences into 9×20 positional amino-acid
//! frequency windows, clusters them with a particle swarm that searches
//! centroid sets, biclusters a normalised sequence × amino-acid matrix with a
//! binary particle swarm, and scores the resulting groups by how uniform
//! their secondary structure is. Groups can then be summarised as
//! significant-amino-acid / motif reports with sequence-logo data.
//!
//! Module map:
//!
//! - [`seqio`]: sequence and secondary-structure ingestion
//! - [`featurize`]: frequency windows, normalised rows, structure segments
//! - [`metrics`]: city-block distance, intra-cluster fitness, mean square
//!   residue, structure similarity
//! - [`kmeans`]: Lloyd-style baseline
//! - [`pso`]: continuous global-best particle swarm
//! - [`psokmeans`]: particle swarm over centroid sets
//! - [`psobiclust`]: binary particle swarm biclustering
//! - [`motif`]: SAA sets, motif classification, logo columns
//! - [`report`]: homology tallies and the cluster/bicluster comparison

pub mod error;
pub mod featurize;
pub mod kmeans;
pub mod matrix;
pub mod metrics;
pub mod motif;
pub mod pso;
pub mod psobiclust;
pub mod psokmeans;
pub mod report;
pub mod seqio;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use matrix::Matrix;
pub use seqio::{AminoAcid, SecondaryStructure, Sequence, Ss3, ALPHABET};

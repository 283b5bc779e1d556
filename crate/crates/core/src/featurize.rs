//! Frequency windows and the data matrices built from them.
//!
//! A sequence is laid out column-by-column in blocks of `window_size`
//! residues; row `i` of the resulting window counts, for every amino acid,
//! how many blocks carry that residue at offset `i`. The short final block is
//! padded with a sentinel that is never counted.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seqio::{SecondaryStructure, Sequence, Ss3, ALPHABET_SIZE};

pub const DEFAULT_WINDOW: usize = 9;

/// How a sequence is cut into windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMode {
    /// Non-overlapping consecutive blocks, last block padded.
    #[default]
    Reshape,
    /// Every stride-1 window of `window_size` residues.
    Sliding,
}

/// Position × amino-acid count matrix for one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyWindow {
    pub sequence_id: String,
    pub counts: Vec<[u32; ALPHABET_SIZE]>,
}

impl FrequencyWindow {
    pub fn window_size(&self) -> usize {
        self.counts.len()
    }

    pub fn get(&self, position: usize, aa: usize) -> u32 {
        self.counts[position][aa]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().map(|&c| c as u64).sum()
    }

    /// Row-major flattening, the representation the clustering engines see.
    pub fn to_vector(&self) -> Vec<f64> {
        self.counts.iter().flatten().map(|&c| c as f64).collect()
    }

    pub fn column(&self, aa: usize) -> impl Iterator<Item = u32> + '_ {
        self.counts.iter().map(move |row| row[aa])
    }
}

pub fn reshape_and_count(seq: &Sequence, window_size: usize) -> Result<FrequencyWindow> {
    count_windows(seq, window_size, WindowMode::Reshape)
}

pub fn count_windows(
    seq: &Sequence,
    window_size: usize,
    mode: WindowMode,
) -> Result<FrequencyWindow> {
    if window_size == 0 {
        return Err(Error::contract("window size must be positive"));
    }
    if seq.len() < window_size {
        return Err(Error::TooShort {
            id: seq.id.clone(),
            len: seq.len(),
            window: window_size,
        });
    }
    let mut counts = vec![[0u32; ALPHABET_SIZE]; window_size];
    match mode {
        WindowMode::Reshape => {
            for (idx, aa) in seq.residues.iter().enumerate() {
                counts[idx % window_size][aa.index()] += 1;
            }
        }
        WindowMode::Sliding => {
            for start in 0..=seq.len() - window_size {
                for (offset, aa) in seq.residues[start..start + window_size].iter().enumerate() {
                    counts[offset][aa.index()] += 1;
                }
            }
        }
    }
    Ok(FrequencyWindow {
        sequence_id: seq.id.clone(),
        counts,
    })
}

/// Column summary used to collapse a window into one row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Arithmetic mean of the column.
    #[default]
    Mean,
    /// Max minus min of the column.
    Range,
    /// Most frequent count in the column; ties go to the smaller count.
    Mode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRow {
    pub sequence_id: String,
    pub values: [f64; ALPHABET_SIZE],
    pub method: Normalization,
}

fn column_mode(column: &[u32]) -> u32 {
    let mut sorted = column.to_vec();
    sorted.sort_unstable();
    let (mut best, mut best_run) = (sorted[0], 0usize);
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let run = sorted[i..].iter().take_while(|&&x| x == v).count();
        // ascending scan + strict comparison keeps the smallest value on ties
        if run > best_run {
            best = v;
            best_run = run;
        }
        i += run;
    }
    best
}

pub fn normalize_window(fw: &FrequencyWindow, method: Normalization) -> NormalizedRow {
    let mut values = [0.0; ALPHABET_SIZE];
    for (aa, value) in values.iter_mut().enumerate() {
        let column: Vec<u32> = fw.column(aa).collect();
        *value = match method {
            Normalization::Mean => {
                column.iter().map(|&c| c as f64).sum::<f64>() / column.len() as f64
            }
            Normalization::Range => {
                let max = column.iter().copied().max().unwrap_or(0);
                let min = column.iter().copied().min().unwrap_or(0);
                (max - min) as f64
            }
            Normalization::Mode => column_mode(&column) as f64,
        };
    }
    NormalizedRow {
        sequence_id: fw.sequence_id.clone(),
        values,
        method,
    }
}

pub fn build_cluster_dataset(
    seqs: &[Sequence],
    window_size: usize,
    mode: WindowMode,
) -> Result<Vec<FrequencyWindow>> {
    seqs.iter()
        .map(|s| count_windows(s, window_size, mode))
        .collect()
}

/// Stacks one normalised row per sequence into an `n × 20` matrix.
pub fn build_bicluster_matrix(
    seqs: &[Sequence],
    window_size: usize,
    mode: WindowMode,
    method: Normalization,
) -> Result<Matrix> {
    let rows = build_cluster_dataset(seqs, window_size, mode)?
        .iter()
        .map(|fw| normalize_window(fw, method).values)
        .collect::<Vec<_>>();
    if rows.is_empty() {
        return Ok(Matrix::zeros(0, ALPHABET_SIZE));
    }
    Ok(Matrix::from_rows(&rows))
}

/// Complete, non-overlapping structure segments of one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureWindowSet {
    pub sequence_id: String,
    pub segments: Vec<Vec<Ss3>>,
}

pub fn structure_segments(ss: &SecondaryStructure, window_size: usize) -> StructureWindowSet {
    StructureWindowSet {
        sequence_id: ss.id.clone(),
        segments: ss
            .classes3
            .chunks_exact(window_size)
            .map(|c| c.to_vec())
            .collect(),
    }
}

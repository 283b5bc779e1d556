//! Significant amino acids, motif sets and sequence-logo columns.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::featurize::FrequencyWindow;
use crate::psobiclust::Bicluster;
use crate::seqio::{AminoAcid, ALPHABET, ALPHABET_SIZE};

pub const SAA_THRESHOLD: f64 = 0.07;

/// A set of amino acids. Displays and serialises as a string of one-letter
/// codes in alphabet order (`ARNDCQEGHILKMFPSTWYV`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ResidueSet(u32);

impl ResidueSet {
    pub const EMPTY: ResidueSet = ResidueSet(0);
    pub const FULL: ResidueSet = ResidueSet((1 << ALPHABET_SIZE) - 1);

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> ResidueSet {
        ResidueSet(indices.into_iter().fold(0, |acc, i| {
            assert!(i < ALPHABET_SIZE, "amino-acid index out of range");
            acc | (1 << i)
        }))
    }

    pub fn insert(&mut self, aa: AminoAcid) {
        self.0 |= 1 << aa.index();
    }

    pub fn contains(self, aa: AminoAcid) -> bool {
        self.0 & (1 << aa.index()) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: ResidueSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn intersection(self, other: ResidueSet) -> ResidueSet {
        ResidueSet(self.0 & other.0)
    }

    pub fn union(self, other: ResidueSet) -> ResidueSet {
        ResidueSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = AminoAcid> {
        (0..ALPHABET_SIZE)
            .filter(move |i| self.0 & (1 << i) != 0)
            .filter_map(AminoAcid::from_index)
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for aa in self.iter() {
            write!(f, "{}", aa.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for ResidueSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<ResidueSet> {
        let mut set = ResidueSet::EMPTY;
        for c in s.chars() {
            let aa = AminoAcid::from_char(c)
                .ok_or_else(|| Error::Validation(format!("'{c}' is not an amino-acid code")))?;
            set.insert(aa);
        }
        Ok(set)
    }
}

impl Serialize for ResidueSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ResidueSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Row-normalised position × amino-acid frequencies of a group.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionFrequencies {
    pub rows: Vec<[f64; ALPHABET_SIZE]>,
    /// Positions whose summed counts were zero; their rows stay all-zero.
    pub zero_rows: Vec<usize>,
}

pub fn position_frequencies(members: &[&FrequencyWindow]) -> Result<PositionFrequencies> {
    let first = members
        .first()
        .ok_or_else(|| Error::contract("position frequencies need at least one member"))?;
    let ws = first.window_size();
    let mut sums = vec![[0u64; ALPHABET_SIZE]; ws];
    for m in members {
        if m.window_size() != ws {
            return Err(Error::contract("members have different window sizes"));
        }
        for (acc, row) in sums.iter_mut().zip(&m.counts) {
            acc.iter_mut().zip(row).for_each(|(a, &c)| *a += c as u64);
        }
    }
    let mut zero_rows = Vec::new();
    let rows = sums
        .iter()
        .enumerate()
        .map(|(pos, s)| {
            let total: u64 = s.iter().sum();
            let mut out = [0.0; ALPHABET_SIZE];
            if total == 0 {
                zero_rows.push(pos);
            } else {
                out.iter_mut()
                    .zip(s)
                    .for_each(|(o, &c)| *o = c as f64 / total as f64);
            }
            out
        })
        .collect();
    Ok(PositionFrequencies { rows, zero_rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionSaa {
    /// 1-based window position.
    pub position: usize,
    pub saa: ResidueSet,
}

/// Letters whose frequency is strictly greater than `threshold`, per position.
pub fn significant_amino_acids(freqs: &PositionFrequencies, threshold: f64) -> Vec<PositionSaa> {
    freqs
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| PositionSaa {
            position: i + 1,
            saa: ResidueSet::from_indices((0..ALPHABET_SIZE).filter(|&j| row[j] > threshold)),
        })
        .collect()
}

/// Letters of the columns a bicluster keeps. `col_labels[j]` names matrix column `j`.
pub fn motif_set(bic: &Bicluster, col_labels: &[AminoAcid]) -> ResidueSet {
    ResidueSet::from_indices(bic.cols.iter().map(|&j| col_labels[j].index()))
}

/// Column labels of the standard 20-column matrix.
pub fn alphabet_labels() -> Vec<AminoAcid> {
    (0..ALPHABET_SIZE)
        .filter_map(AminoAcid::from_index)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Full,
    Partial,
    Disjoint,
}

/// How a motif covers a position's SAA set: fully, partially, or not at all.
pub fn classify_superset(saa: ResidueSet, motif: ResidueSet) -> Relation {
    if !saa.is_empty() && saa.is_subset(motif) {
        Relation::Full
    } else if !saa.intersection(motif).is_empty() {
        Relation::Partial
    } else {
        Relation::Disjoint
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogoLetter {
    pub residue: char,
    pub bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogoColumn {
    pub position: usize,
    pub total_bits: f64,
    /// Tallest first; equal heights keep alphabet order.
    pub letters: Vec<LogoLetter>,
}

/// Maximum information content of one position, `log2(20)`.
pub fn max_bits() -> f64 {
    (ALPHABET_SIZE as f64).log2()
}

/// Information content per position with optional small-sample correction.
///
/// `R = log2(20) - H - e(n)` where `H` is the Shannon entropy of the row in
/// bits and `e(n) = 19 / (2 ln2 n)`; `R` is floored at zero. Letter heights
/// are `p * R`.
pub fn logo_columns(
    freqs: &PositionFrequencies,
    n_segments: usize,
    correction: bool,
) -> Vec<LogoColumn> {
    let e_n = if correction && n_segments > 0 {
        (ALPHABET_SIZE as f64 - 1.0) / (2.0 * std::f64::consts::LN_2 * n_segments as f64)
    } else {
        0.0
    };
    freqs
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mass: f64 = row.iter().sum();
            if mass == 0.0 {
                return LogoColumn {
                    position: i + 1,
                    total_bits: 0.0,
                    letters: Vec::new(),
                };
            }
            let entropy: f64 = -row
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * p.log2())
                .sum::<f64>();
            let r = (max_bits() - entropy - e_n).max(0.0);
            let mut letters: Vec<LogoLetter> = (0..ALPHABET_SIZE)
                .filter(|&j| row[j] > 0.0)
                .map(|j| LogoLetter {
                    residue: ALPHABET[j],
                    bits: row[j] * r,
                })
                .collect();
            letters.sort_by(|a, b| b.bits.total_cmp(&a.bits));
            LogoColumn {
                position: i + 1,
                total_bits: letters.iter().map(|l| l.bits).sum(),
                letters,
            }
        })
        .collect()
}

/// Motif annotation for a report: none for plain clusters, one set for a
/// bicluster, or one set per position.
#[derive(Debug, Clone, PartialEq)]
pub enum MotifSpec {
    Absent,
    Uniform(ResidueSet),
    PerPosition(Vec<ResidueSet>),
}

impl MotifSpec {
    fn at(&self, pos: usize) -> Option<ResidueSet> {
        match self {
            MotifSpec::Absent => None,
            MotifSpec::Uniform(s) => Some(*s),
            MotifSpec::PerPosition(v) => v.get(pos).copied(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionReport {
    pub position: usize,
    pub saa: ResidueSet,
    pub motif: Option<ResidueSet>,
    pub relation: Option<Relation>,
    pub logo: LogoColumn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifReport {
    pub group_id: String,
    pub positions: Vec<PositionReport>,
    /// Set when no position has any significant amino acid.
    pub degenerate: bool,
    /// Positions whose frequency row was all zero.
    pub zero_rows: Vec<usize>,
}

impl MotifReport {
    pub fn relations(&self) -> Vec<Option<Relation>> {
        self.positions.iter().map(|p| p.relation).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotifOptions {
    pub threshold: f64,
    pub logo_correction: bool,
}

impl Default for MotifOptions {
    fn default() -> Self {
        MotifOptions {
            threshold: SAA_THRESHOLD,
            logo_correction: true,
        }
    }
}

pub fn build_motif_report(
    group_id: impl Into<String>,
    freqs: &PositionFrequencies,
    motif: &MotifSpec,
    n_segments: usize,
    opts: MotifOptions,
) -> MotifReport {
    let saa = significant_amino_acids(freqs, opts.threshold);
    let logo = logo_columns(freqs, n_segments, opts.logo_correction);
    let positions: Vec<PositionReport> = saa
        .into_iter()
        .zip(logo)
        .enumerate()
        .map(|(i, (s, logo))| {
            let motif = motif.at(i);
            PositionReport {
                position: s.position,
                saa: s.saa,
                motif,
                relation: motif.map(|m| classify_superset(s.saa, m)),
                logo,
            }
        })
        .collect();
    MotifReport {
        group_id: group_id.into(),
        degenerate: positions.iter().all(|p| p.saa.is_empty()),
        zero_rows: freqs.zero_rows.clone(),
        positions,
    }
}

/// Renders logo columns as a standalone SVG: positions left to right, bits on
/// the vertical axis, letters stacked tallest on top.
pub fn render_logo_svg(title: &str, columns: &[LogoColumn]) -> String {
    const COL_W: f64 = 40.0;
    const PLOT_H: f64 = 200.0;
    const LEFT: f64 = 50.0;
    const TOP: f64 = 30.0;
    let width = LEFT + COL_W * columns.len() as f64 + 20.0;
    let height = TOP + PLOT_H + 40.0;
    let scale = PLOT_H / max_bits();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{LEFT}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        xml_escape(title)
    ));
    let base = TOP + PLOT_H;
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{base}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{base}\" x2=\"{}\" y2=\"{base}\" stroke=\"black\"/>\n",
        LEFT + COL_W * columns.len() as f64
    ));
    for tick in 0..=4 {
        let y = base - tick as f64 * scale;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">{tick}</text>\n",
            LEFT - 5.0,
            y + 3.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {:.2})\">bits</text>\n",
        TOP + PLOT_H / 2.0,
        TOP + PLOT_H / 2.0
    ));
    for (c, col) in columns.iter().enumerate() {
        let x = LEFT + COL_W * c as f64;
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            x + COL_W / 2.0,
            base + 16.0,
            col.position
        ));
        // stack from the baseline up, smallest letter at the bottom
        let mut y = base;
        for letter in col.letters.iter().rev() {
            let h = letter.bits * scale;
            if h < 0.05 {
                continue;
            }
            // glyph cap height is ~0.72 of the font size at scale 1
            let sy = h / 0.72 / 20.0;
            svg.push_str(&format!(
                "<text x=\"0\" y=\"0\" font-family=\"monospace\" font-weight=\"bold\" font-size=\"20\" text-anchor=\"middle\" transform=\"translate({:.2} {:.2}) scale(1.6 {:.4})\">{}</text>\n",
                x + COL_W / 2.0,
                y,
                sy,
                letter.residue
            ));
            y -= h;
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

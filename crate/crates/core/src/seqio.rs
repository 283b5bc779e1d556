//! Sequence and secondary-structure ingestion.
//!
//! Sequences use a FASTA-style layout: a `>` header whose first
//! whitespace-delimited token is the id, followed by residue lines. Structure
//! files use the same layout with an 8-class DSSP string as the body; each
//! character is collapsed to helix / sheet / coil on load.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 20 canonical amino acids in the column order used by every matrix in
/// this crate.
pub const ALPHABET: [char; 20] = [
    'A', 'R', 'N', 'D', 'C', 'Q', 'E', 'G', 'H', 'I', 'L', 'K', 'M', 'F', 'P', 'S', 'T', 'W', 'Y',
    'V',
];

pub const ALPHABET_SIZE: usize = ALPHABET.len();

/// A canonical amino acid, stored as its column index into [`ALPHABET`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AminoAcid(u8);

impl AminoAcid {
    pub fn from_char(c: char) -> Option<AminoAcid> {
        let c = c.to_ascii_uppercase();
        ALPHABET
            .iter()
            .position(|&a| a == c)
            .map(|i| AminoAcid(i as u8))
    }

    pub fn from_index(i: usize) -> Option<AminoAcid> {
        (i < ALPHABET_SIZE).then_some(AminoAcid(i as u8))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn to_char(self) -> char {
        ALPHABET[self.0 as usize]
    }
}

impl fmt::Display for AminoAcid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// What to do with the ambiguity codes B, Z, X and U.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphabetPolicy {
    /// Reject them as illegal residues.
    #[default]
    Strict,
    /// Map B→D, Z→E, X→A, U→C.
    Relaxed,
}

impl AlphabetPolicy {
    fn resolve(self, c: char) -> Option<AminoAcid> {
        let c = c.to_ascii_uppercase();
        if let Some(aa) = AminoAcid::from_char(c) {
            return Some(aa);
        }
        match (self, c) {
            (AlphabetPolicy::Relaxed, 'B') => AminoAcid::from_char('D'),
            (AlphabetPolicy::Relaxed, 'Z') => AminoAcid::from_char('E'),
            (AlphabetPolicy::Relaxed, 'X') => AminoAcid::from_char('A'),
            (AlphabetPolicy::Relaxed, 'U') => AminoAcid::from_char('C'),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub id: String,
    pub residues: Vec<AminoAcid>,
}

impl Sequence {
    /// Builds a sequence from a residue string, validating the alphabet.
    pub fn new(id: impl Into<String>, residues: &str) -> Result<Sequence> {
        let id = id.into();
        let residues = residues
            .chars()
            .filter(|c| !c.is_whitespace())
            .enumerate()
            .map(|(pos, c)| {
                AminoAcid::from_char(c).ok_or_else(|| Error::IllegalResidue {
                    id: id.clone(),
                    position: pos + 1,
                    residue: c,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if residues.is_empty() {
            return Err(Error::Validation(format!("sequence '{id}' is empty")));
        }
        Ok(Sequence { id, residues })
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn to_string_residues(&self) -> String {
        self.residues.iter().map(|a| a.to_char()).collect()
    }
}

/// Three-state secondary structure label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ss3 {
    H,
    E,
    C,
}

impl Ss3 {
    pub const ALL: [Ss3; 3] = [Ss3::H, Ss3::E, Ss3::C];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Ss3::H => 0,
            Ss3::E => 1,
            Ss3::C => 2,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Ss3::H => 'H',
            Ss3::E => 'E',
            Ss3::C => 'C',
        }
    }
}

/// Collapses an 8-class DSSP code to helix / sheet / coil.
///
/// H, G, I are helices; B, E are strands; everything else (T, S, blank, and
/// any unknown character) is coil.
pub fn map_ss8_to_ss3(code: char) -> Ss3 {
    match code {
        'H' | 'G' | 'I' => Ss3::H,
        'B' | 'E' => Ss3::E,
        _ => Ss3::C,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecondaryStructure {
    pub id: String,
    pub classes3: Vec<Ss3>,
}

impl SecondaryStructure {
    pub fn len(&self) -> usize {
        self.classes3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes3.is_empty()
    }
}

/// Options controlling sequence ingestion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    pub alphabet: AlphabetPolicy,
    /// Sequences shorter than this are rejected. Zero disables the check.
    pub min_len: usize,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            alphabet: AlphabetPolicy::Strict,
            min_len: 9,
        }
    }
}

struct RawRecord<'a> {
    id: &'a str,
    line: usize,
    body: Vec<(usize, &'a str)>,
}

fn split_records(text: &str) -> Result<Vec<RawRecord<'_>>> {
    let mut records: Vec<RawRecord<'_>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if let Some(header) = line.strip_prefix('>') {
            let id = header.split_whitespace().next().ok_or(Error::Parse {
                line: lineno,
                message: "record header has no id".into(),
            })?;
            records.push(RawRecord {
                id,
                line: lineno,
                body: Vec::new(),
            });
        } else if line.trim().is_empty() {
            continue;
        } else {
            match records.last_mut() {
                Some(r) => r.body.push((lineno, line)),
                None => {
                    return Err(Error::Parse {
                        line: lineno,
                        message: "data before the first '>' header".into(),
                    })
                }
            }
        }
    }
    Ok(records)
}

/// Parses a FASTA-style sequence file with default options.
pub fn parse_sequences(text: &str) -> Result<Vec<Sequence>> {
    parse_sequences_with(text, ParseOptions::default())
}

pub fn parse_sequences_with(text: &str, opts: ParseOptions) -> Result<Vec<Sequence>> {
    split_records(text)?
        .into_iter()
        .map(|rec| {
            let mut residues = Vec::new();
            for (_, line) in &rec.body {
                for c in line.chars().filter(|c| !c.is_whitespace()) {
                    let aa = opts
                        .alphabet
                        .resolve(c)
                        .ok_or_else(|| Error::IllegalResidue {
                            id: rec.id.to_string(),
                            position: residues.len() + 1,
                            residue: c,
                        })?;
                    residues.push(aa);
                }
            }
            if residues.is_empty() {
                return Err(Error::Parse {
                    line: rec.line,
                    message: format!("record '{}' has no residues", rec.id),
                });
            }
            if residues.len() < opts.min_len {
                return Err(Error::TooShort {
                    id: rec.id.to_string(),
                    len: residues.len(),
                    window: opts.min_len,
                });
            }
            Ok(Sequence {
                id: rec.id.to_string(),
                residues,
            })
        })
        .collect()
}

/// Parses a structure file and validates it against `sequences`.
///
/// Every structure id must name a sequence and match its length. Trailing
/// spaces in a structure line are significant (blank is a DSSP coil code),
/// so only the line terminator is stripped.
pub fn parse_structures(text: &str, sequences: &[Sequence]) -> Result<Vec<SecondaryStructure>> {
    let lengths: HashMap<&str, usize> =
        sequences.iter().map(|s| (s.id.as_str(), s.len())).collect();
    split_records(text)?
        .into_iter()
        .map(|rec| {
            let classes3: Vec<Ss3> = rec
                .body
                .iter()
                .flat_map(|(_, line)| line.trim_end_matches('\r').chars())
                .map(map_ss8_to_ss3)
                .collect();
            let expected = *lengths
                .get(rec.id)
                .ok_or_else(|| Error::UnknownStructure { id: rec.id.into() })?;
            if expected != classes3.len() {
                return Err(Error::LengthMismatch {
                    id: rec.id.into(),
                    sequence_len: expected,
                    structure_len: classes3.len(),
                });
            }
            Ok(SecondaryStructure {
                id: rec.id.into(),
                classes3,
            })
        })
        .collect()
}

/// Sequences paired with their (optional) structure annotations, in sequence order.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub sequences: Vec<Sequence>,
    pub structures: Option<Vec<SecondaryStructure>>,
}

impl Corpus {
    pub fn new(sequences: Vec<Sequence>) -> Self {
        Corpus {
            sequences,
            structures: None,
        }
    }

    /// Attaches structures, reordering them to follow the sequences. Every
    /// sequence must have exactly one annotation.
    pub fn with_structures(mut self, structures: Vec<SecondaryStructure>) -> Result<Self> {
        let mut by_id: HashMap<String, SecondaryStructure> = HashMap::new();
        for s in structures {
            let seq_len = self
                .sequences
                .iter()
                .find(|q| q.id == s.id)
                .map(|q| q.len())
                .ok_or_else(|| Error::UnknownStructure { id: s.id.clone() })?;
            if seq_len != s.len() {
                return Err(Error::LengthMismatch {
                    id: s.id.clone(),
                    sequence_len: seq_len,
                    structure_len: s.len(),
                });
            }
            if by_id.contains_key(&s.id) {
                return Err(Error::Validation(format!(
                    "duplicate structure id '{}'",
                    s.id
                )));
            }
            by_id.insert(s.id.clone(), s);
        }
        let ordered = self
            .sequences
            .iter()
            .map(|q| {
                by_id
                    .remove(&q.id)
                    .ok_or_else(|| Error::MissingStructure { id: q.id.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        self.structures = Some(ordered);
        Ok(self)
    }

    pub fn structures(&self) -> Result<&[SecondaryStructure]> {
        match &self.structures {
            Some(s) => Ok(s),
            None => Err(Error::Validation(
                "corpus has no secondary-structure annotations".into(),
            )),
        }
    }
}

/// Renders sequences back to the record format, 60 residues per line.
pub fn write_sequences(seqs: &[Sequence]) -> String {
    let mut out = String::new();
    for s in seqs {
        out.push('>');
        out.push_str(&s.id);
        out.push('\n');
        let text = s.to_string_residues();
        for chunk in text.as_bytes().chunks(60) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    }
    out
}

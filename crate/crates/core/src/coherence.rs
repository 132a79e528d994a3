//! Suffix coherence: how tightly the pseudo-words of one suffix cluster.
//!
//! Coordinates are first rescaled per axis so the whole map spans the unit
//! square. The scatter of a suffix is then the mean Euclidean distance of its
//! `<signature>_<suffix>` points to their centroid. Small scatter in both the
//! left and the right map marks a syntactically uniform suffix.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::morphology::{split_pseudo_word, NULL_SUFFIX};
use crate::spectral::SpectralEmbedding;

pub const DEFAULT_CUTOFF: f64 = 0.10;

/// Points rescaled so each axis spans `[0, 1]`; a constant axis maps to 0.5.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedCoords {
    labels: Vec<String>,
    points: Vec<(f64, f64)>,
    index: HashMap<String, usize>,
}

fn rescale(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == min {
        return vec![0.5; values.len()];
    }
    let span = max - min;
    values.iter().map(|v| (v - min) / span).collect()
}

impl NormalizedCoords {
    pub fn from_points(labels: Vec<String>, xs: &[f64], ys: &[f64]) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::Argument("cannot normalize an empty point set".into()));
        }
        if xs.len() != labels.len() || ys.len() != labels.len() {
            return Err(Error::Argument("coordinate and label counts differ".into()));
        }
        let points: Vec<(f64, f64)> = rescale(xs).into_iter().zip(rescale(ys)).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Ok(NormalizedCoords {
            labels,
            points,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn get(&self, label: &str) -> Option<(f64, f64)> {
        self.index.get(label).map(|&i| self.points[i])
    }
}

/// Rescales columns `x_col` and `y_col` of an embedding over all its units.
pub fn normalize_coords(emb: &SpectralEmbedding, x_col: usize, y_col: usize) -> Result<NormalizedCoords> {
    if emb.is_empty() {
        return Err(Error::Argument("embedding has no points".into()));
    }
    let cols = emb.columns();
    if x_col >= cols || y_col >= cols {
        return Err(Error::Argument(format!(
            "column index out of range: ({x_col}, {y_col}) with {cols} columns"
        )));
    }
    NormalizedCoords::from_points(emb.labels.clone(), &emb.column(x_col), &emb.column(y_col))
}

/// Mean Euclidean distance of the points to their centroid.
pub fn scatter(points: &[(f64, f64)]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n;
    points
        .iter()
        .map(|p| (p.0 - cx).hypot(p.1 - cy))
        .sum::<f64>()
        / n
}

/// Scatter of one suffix over a set of points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scatter {
    /// Number of `<signature>_<suffix>` points found.
    pub points: usize,
    pub value: f64,
}

/// The points of `pseudo_words` carrying `suffix` (`"NULL"` for the empty
/// suffix) that appear in `coords`.
pub fn suffix_points(coords: &NormalizedCoords, suffix: &str, pseudo_words: &[String]) -> Vec<(f64, f64)> {
    pseudo_words
        .iter()
        .filter(|p| split_pseudo_word(p).is_some_and(|(_, s)| s == suffix))
        .filter_map(|p| coords.get(p))
        .collect()
}

/// `None` when no point of the suffix is present.
pub fn suffix_scatter(coords: &NormalizedCoords, suffix: &str, pseudo_words: &[String]) -> Option<Scatter> {
    let pts = suffix_points(coords, suffix, pseudo_words);
    if pts.is_empty() {
        None
    } else {
        Some(Scatter {
            points: pts.len(),
            value: scatter(&pts),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Coherent,
    Incoherent,
    Absent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Coherent => "coherent",
            Verdict::Incoherent => "incoherent",
            Verdict::Absent => "absent",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuffixCoherence {
    pub suffix: String,
    pub left: Option<Scatter>,
    pub right: Option<Scatter>,
    pub verdict: Verdict,
}

impl SuffixCoherence {
    pub fn signature_count(&self) -> usize {
        let l = self.left.map_or(0, |s| s.points);
        let r = self.right.map_or(0, |s| s.points);
        l.max(r)
    }

    pub fn mean(&self) -> Option<f64> {
        Some((self.left?.value + self.right?.value) / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceReport {
    pub cutoff: f64,
    pub rows: Vec<SuffixCoherence>,
}

impl CoherenceReport {
    pub fn get(&self, suffix: &str) -> Option<&SuffixCoherence> {
        self.rows.iter().find(|r| r.suffix == suffix)
    }

    /// `suffix<TAB>n_signatures<TAB>left_scatter<TAB>right_scatter<TAB>mean<TAB>verdict`
    /// under a header line; missing values print as `NA`.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "suffix\tn_signatures\tleft_scatter\tright_scatter\tmean\tverdict")?;
        let fmt = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format!("{v:.4}"));
        for row in &self.rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}",
                row.suffix,
                row.signature_count(),
                fmt(row.left.map(|s| s.value)),
                fmt(row.right.map(|s| s.value)),
                fmt(row.mean()),
                row.verdict
            )?;
        }
        Ok(())
    }
}

/// Coherent when the mean of the left and right scatter is below `cutoff`.
pub fn classify(left: f64, right: f64, cutoff: f64) -> Verdict {
    if (left + right) / 2.0 < cutoff {
        Verdict::Coherent
    } else {
        Verdict::Incoherent
    }
}

/// Scores each suffix in both maps. A suffix missing from either map is
/// reported as absent; otherwise it is coherent when the mean of its two
/// scatters is below `cutoff`.
pub fn coherence_report(
    left: &NormalizedCoords,
    right: &NormalizedCoords,
    suffixes: &[String],
    pseudo_words: &[String],
    cutoff: f64,
) -> CoherenceReport {
    let rows = suffixes
        .iter()
        .map(|suffix| {
            let suffix = if suffix.is_empty() { NULL_SUFFIX } else { suffix.as_str() };
            let l = suffix_scatter(left, suffix, pseudo_words);
            let r = suffix_scatter(right, suffix, pseudo_words);
            let verdict = match (l, r) {
                (Some(l), Some(r)) => classify(l.value, r.value, cutoff),
                _ => Verdict::Absent,
            };
            SuffixCoherence {
                suffix: suffix.to_string(),
                left: l,
                right: r,
                verdict,
            }
        })
        .collect();
    CoherenceReport { cutoff, rows }
}

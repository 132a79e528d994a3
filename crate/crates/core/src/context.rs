//! Left and right context count vectors and their cosine similarities.
//!
//! The left vector of a word `w` counts, for every vocabulary word `v`, how
//! often `v` occurs immediately before `w`; the right vector counts the words
//! immediately after. Vectors span the whole vocabulary, not just the rows
//! being compared.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::corpus::{BigramTable, Vocabulary};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Left,
    Right,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(Direction::Left),
            "right" => Ok(Direction::Right),
            _ => Err(Error::Argument(format!("unknown direction {s:?}"))),
        }
    }
}

/// Sparse nonnegative count vector with sorted, distinct indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseVector {
    dim: usize,
    entries: Vec<(usize, u64)>,
}

impl SparseVector {
    pub fn new(dim: usize, mut entries: Vec<(usize, u64)>) -> Result<Self> {
        entries.retain(|&(_, c)| c > 0);
        entries.sort_unstable_by_key(|&(i, _)| i);
        if entries.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Argument("duplicate index in sparse vector".into()));
        }
        if let Some(&(i, _)) = entries.last() {
            if i >= dim {
                return Err(Error::Argument(format!("index {i} out of range for dimension {dim}")));
            }
        }
        Ok(SparseVector { dim, entries })
    }

    pub fn from_dense(values: &[u64]) -> Self {
        SparseVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(i, &c)| (i, c))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, u64)] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> u64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    pub fn norm_squared(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c * c).sum()
    }

    pub fn dot(&self, other: &SparseVector) -> u64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut acc = 0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    acc += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        acc
    }
}

/// Cosine from an exact integer dot product and squared norms. Shared by
/// [`cosine`] and [`ContextMatrix::similarities`] so both agree bit for bit.
fn cosine_from_parts(dot: u64, norm_sq_u: u64, norm_sq_v: u64) -> f64 {
    if norm_sq_u == 0 || norm_sq_v == 0 {
        return 0.0;
    }
    let c = dot as f64 / (norm_sq_u as f64 * norm_sq_v as f64).sqrt();
    c.min(1.0)
}

/// Cosine of the angle between two count vectors; 0 if either is all-zero.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> Result<f64> {
    if u.dim != v.dim {
        return Err(Error::Argument(format!(
            "dimension mismatch: {} vs {}",
            u.dim, v.dim
        )));
    }
    Ok(cosine_from_parts(u.dot(v), u.norm_squared(), v.norm_squared()))
}

/// One context vector per selected word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextMatrix {
    pub direction: Direction,
    /// Vocabulary ranks of the rows.
    pub word_ids: Vec<usize>,
    /// Surface forms of the rows.
    pub words: Vec<String>,
    pub rows: Vec<SparseVector>,
}

/// Context vectors for the `k` most frequent words.
pub fn build_context_matrix(
    bigrams: &BigramTable,
    vocab: &Vocabulary,
    k: usize,
    direction: Direction,
) -> Result<ContextMatrix> {
    if k == 0 {
        return Err(Error::Argument("K must be positive".into()));
    }
    if k > vocab.len() {
        return Err(Error::Argument(format!(
            "K = {k} exceeds vocabulary size {}",
            vocab.len()
        )));
    }
    let ids: Vec<usize> = (0..k).collect();
    build_context_rows(bigrams, vocab, &ids, direction)
}

/// Context vectors for an arbitrary list of vocabulary ranks, in that order.
pub fn build_context_rows(
    bigrams: &BigramTable,
    vocab: &Vocabulary,
    word_ids: &[usize],
    direction: Direction,
) -> Result<ContextMatrix> {
    if word_ids.is_empty() {
        return Err(Error::Argument("no rows requested".into()));
    }
    let v = vocab.len();
    let mut row_of = vec![usize::MAX; v];
    for (row, &id) in word_ids.iter().enumerate() {
        if id >= v {
            return Err(Error::Argument(format!("word id {id} outside vocabulary")));
        }
        if row_of[id] != usize::MAX {
            return Err(Error::Argument(format!("word id {id} requested twice")));
        }
        row_of[id] = row;
    }
    let mut entries: Vec<Vec<(usize, u64)>> = vec![Vec::new(); word_ids.len()];
    for ((left, right), count) in bigrams.iter() {
        // Left rows are indexed by the word on the right of the pair.
        let (target, context) = match direction {
            Direction::Left => (right, left),
            Direction::Right => (left, right),
        };
        let row = row_of[target];
        if row != usize::MAX {
            entries[row].push((context, count));
        }
    }
    let rows = entries
        .into_iter()
        .map(|e| SparseVector::new(v, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContextMatrix {
        direction,
        word_ids: word_ids.to_vec(),
        words: word_ids.iter().map(|&i| vocab.word(i).to_string()).collect(),
        rows,
    })
}

impl ContextMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Dense row-major matrix of pairwise cosines. Diagonal entries are the
    /// self-similarity (1 for nonzero rows, 0 otherwise).
    pub fn similarities(&self) -> Vec<f64> {
        let k = self.rows.len();
        let dim = self.rows.first().map_or(0, |r| r.dim());
        // Inverted index: context column -> (row, count).
        let mut postings: Vec<Vec<(usize, u64)>> = vec![Vec::new(); dim];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, x) in row.entries() {
                postings[c].push((r, x));
            }
        }
        let norms: Vec<u64> = self.rows.iter().map(SparseVector::norm_squared).collect();
        let mut out = vec![0.0; k * k];
        out.par_chunks_mut(k.max(1)).enumerate().for_each(|(i, sims)| {
            let mut dots = vec![0u64; k];
            for &(c, x) in self.rows[i].entries() {
                for &(j, y) in &postings[c] {
                    dots[j] += x * y;
                }
            }
            for j in 0..k {
                sims[j] = cosine_from_parts(dots[j], norms[i], norms[j]);
            }
        });
        out
    }

    /// Sparse triplet dump: `word<TAB>direction<TAB>context_word<TAB>count`.
    pub fn write_tsv<W: Write>(&self, vocab: &Vocabulary, mut w: W) -> std::io::Result<()> {
        for (word, row) in self.words.iter().zip(&self.rows) {
            for &(c, x) in row.entries() {
                writeln!(w, "{word}\t{}\t{}\t{x}", self.direction, vocab.word(c))?;
            }
        }
        Ok(())
    }
}

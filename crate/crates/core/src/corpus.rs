//! Raw text to tokens, a frequency-ranked vocabulary and adjacent-pair counts.
//!
//! Tokenization is deliberately simple: whitespace splitting, lowercasing,
//! stripping of leading/trailing punctuation, and a sentence boundary marker
//! wherever a token ends in `.`, `!` or `?`. Bigrams are never counted across
//! a boundary marker.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Field used for the boundary marker when a token stream is written as text.
/// Every word begins with an alphanumeric character, so this never collides.
pub const BOUNDARY_FIELD: &str = "</s>";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Word(String),
    Boundary,
}

impl Token {
    pub fn word(s: impl Into<String>) -> Self {
        Token::Word(s.into())
    }

    pub fn as_word(&self) -> Option<&str> {
        match self {
            Token::Word(w) => Some(w),
            Token::Boundary => None,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Token::Boundary)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenizeConfig {
    pub lowercase: bool,
    /// Emit a boundary marker after sentence-final punctuation.
    pub sentence_boundaries: bool,
    /// Keep stripped punctuation runs as tokens of their own.
    pub keep_punctuation: bool,
    /// Treat em/en dashes and runs of two or more hyphens as whitespace.
    pub split_dashes: bool,
}

impl Default for TokenizeConfig {
    fn default() -> Self {
        TokenizeConfig {
            lowercase: true,
            sentence_boundaries: true,
            keep_punctuation: false,
            split_dashes: true,
        }
    }
}

fn is_sentence_final(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

fn is_dash(c: char) -> bool {
    matches!(c, '\u{2012}' | '\u{2013}' | '\u{2014}' | '\u{2015}')
}

/// Splits a whitespace-delimited chunk at dash characters and at runs of two
/// or more ASCII hyphens. Single hyphens stay inside the piece.
fn split_dashes(chunk: &str) -> Vec<&str> {
    let mut pieces = Vec::new();
    let mut start = 0;
    let mut iter = chunk.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if is_dash(c) {
            pieces.push(&chunk[start..i]);
            start = i + c.len_utf8();
        } else if c == '-' && matches!(iter.peek(), Some((_, '-'))) {
            let mut end = i + 1;
            while let Some(&(j, '-')) = iter.peek() {
                end = j + 1;
                iter.next();
            }
            pieces.push(&chunk[start..i]);
            start = end;
        }
    }
    pieces.push(&chunk[start..]);
    pieces.retain(|p| !p.is_empty());
    pieces
}

struct Emitter<'a> {
    cfg: &'a TokenizeConfig,
    out: Vec<Token>,
}

impl Emitter<'_> {
    fn boundary(&mut self) {
        match self.out.last() {
            None | Some(Token::Boundary) => {}
            Some(Token::Word(_)) => self.out.push(Token::Boundary),
        }
    }

    fn word(&mut self, s: &str) {
        let w = if self.cfg.lowercase {
            s.to_lowercase()
        } else {
            s.to_string()
        };
        self.out.push(Token::Word(w));
    }

    fn piece(&mut self, piece: &str) {
        let first = piece.char_indices().find(|(_, c)| c.is_alphanumeric());
        let Some((start, _)) = first else {
            if self.cfg.keep_punctuation {
                self.out.push(Token::Word(piece.to_string()));
            }
            if self.cfg.sentence_boundaries && piece.chars().any(is_sentence_final) {
                self.boundary();
            }
            return;
        };
        let (last, c) = piece
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_alphanumeric())
            .expect("an alphanumeric char exists");
        let end = last + c.len_utf8();
        let (lead, core, trail) = (&piece[..start], &piece[start..end], &piece[end..]);

        if self.cfg.keep_punctuation && !lead.is_empty() {
            self.out.push(Token::Word(lead.to_string()));
        }
        self.word(core);
        if self.cfg.keep_punctuation && !trail.is_empty() {
            self.out.push(Token::Word(trail.to_string()));
        }
        if self.cfg.sentence_boundaries && trail.chars().any(is_sentence_final) {
            self.boundary();
        }
    }
}

/// Tokenizes already-decoded text.
pub fn tokenize(text: &str, cfg: &TokenizeConfig) -> Vec<Token> {
    let mut em = Emitter {
        cfg,
        out: Vec::new(),
    };
    for chunk in text.split_whitespace() {
        if cfg.split_dashes {
            for piece in split_dashes(chunk) {
                em.piece(piece);
            }
        } else {
            em.piece(chunk);
        }
    }
    em.out
}

/// Tokenizes raw bytes, rejecting invalid UTF-8 with the offending offset.
pub fn tokenize_bytes(bytes: &[u8], cfg: &TokenizeConfig) -> Result<Vec<Token>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Encoding {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize(text, cfg))
}

/// Writes tokens as whitespace-separated fields, one sentence per line.
pub fn write_tokens<W: Write>(tokens: &[Token], mut w: W) -> std::io::Result<()> {
    let mut line_start = true;
    for t in tokens {
        match t {
            Token::Word(s) => {
                if !line_start {
                    w.write_all(b" ")?;
                }
                w.write_all(s.as_bytes())?;
                line_start = false;
            }
            Token::Boundary => {
                if !line_start {
                    w.write_all(b" ")?;
                }
                w.write_all(BOUNDARY_FIELD.as_bytes())?;
                w.write_all(b"\n")?;
                line_start = true;
            }
        }
    }
    if !line_start {
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Reads a stream written by [`write_tokens`]. Fields are taken verbatim.
pub fn read_tokens(text: &str) -> Vec<Token> {
    text.split_whitespace()
        .map(|f| {
            if f == BOUNDARY_FIELD {
                Token::Boundary
            } else {
                Token::Word(f.to_string())
            }
        })
        .collect()
}

/// Frequency-ranked word list. Rank 0 is the most frequent word; equal counts
/// keep first-occurrence order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    rank: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn build(tokens: &[Token]) -> Self {
        let mut seen: HashMap<&str, (u64, usize)> = HashMap::new();
        for (pos, w) in tokens.iter().filter_map(Token::as_word).enumerate() {
            seen.entry(w).or_insert((0, pos)).0 += 1;
        }
        let mut entries: Vec<(&str, u64, usize)> =
            seen.into_iter().map(|(w, (c, first))| (w, c, first)).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        Self::from_sorted(entries.into_iter().map(|(w, c, _)| (w.to_string(), c)).collect())
    }

    fn from_sorted(entries: Vec<(String, u64)>) -> Self {
        let rank = entries
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (w.clone(), i))
            .collect();
        Vocabulary { entries, rank }
    }

    /// Rebuilds a vocabulary from `(word, count)` pairs already in rank order.
    pub fn from_entries(entries: Vec<(String, u64)>) -> Result<Self> {
        for pair in entries.windows(2) {
            if pair[1].1 > pair[0].1 {
                return Err(Error::Validation(format!(
                    "vocabulary not sorted by count: {:?} precedes {:?}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        let vocab = Self::from_sorted(entries);
        if vocab.rank.len() != vocab.entries.len() {
            return Err(Error::Validation("duplicate word in vocabulary".into()));
        }
        Ok(vocab)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn word(&self, rank: usize) -> &str {
        &self.entries[rank].0
    }

    pub fn count(&self, rank: usize) -> u64 {
        self.entries[rank].1
    }

    pub fn rank_of(&self, word: &str) -> Option<usize> {
        self.rank.get(word).copied()
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, u64)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, (w, c))| (i, w.as_str(), *c))
    }

    /// `rank<TAB>word<TAB>count`, rank ascending.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (i, word, c) in self.iter() {
            writeln!(w, "{i}\t{word}\t{c}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [rank, word, count] = fields[..] else {
                return Err(Error::parse(n + 1, "expected rank<TAB>word<TAB>count"));
            };
            let rank: usize = rank
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("bad rank {rank:?}")))?;
            if rank != entries.len() {
                return Err(Error::parse(n + 1, format!("rank {rank} out of sequence")));
            }
            let count: u64 = count
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("bad count {count:?}")))?;
            entries.push((word.to_string(), count));
        }
        Self::from_entries(entries)
    }
}

/// Counts of ordered adjacent word pairs, keyed by vocabulary rank.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigramTable {
    counts: BTreeMap<(usize, usize), u64>,
}

/// How each adjacency of a token stream was accounted for.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BigramStats {
    pub counted: u64,
    /// Adjacencies touching a boundary marker.
    pub blocked: u64,
    /// Adjacencies with a word missing from the vocabulary.
    pub skipped: u64,
}

impl BigramTable {
    pub fn get(&self, left: usize, right: usize) -> u64 {
        self.counts.get(&(left, right)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Pairs in (left rank, right rank) order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.counts.iter().map(|(&k, &v)| (k, v))
    }

    pub fn insert(&mut self, left: usize, right: usize, count: u64) {
        if count > 0 {
            *self.counts.entry((left, right)).or_insert(0) += count;
        }
    }

    /// `left_word<TAB>right_word<TAB>count`.
    pub fn write_tsv<W: Write>(&self, vocab: &Vocabulary, mut w: W) -> std::io::Result<()> {
        for ((l, r), c) in self.iter() {
            writeln!(w, "{}\t{}\t{c}", vocab.word(l), vocab.word(r))?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(r: R, vocab: &Vocabulary) -> Result<Self> {
        let mut table = BigramTable::default();
        for (n, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let [left, right, count] = fields[..] else {
                return Err(Error::parse(n + 1, "expected left<TAB>right<TAB>count"));
            };
            let id = |w: &str| {
                vocab
                    .rank_of(w)
                    .ok_or_else(|| Error::parse(n + 1, format!("word {w:?} not in vocabulary")))
            };
            let count: u64 = count
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("bad count {count:?}")))?;
            table.insert(id(left)?, id(right)?, count);
        }
        Ok(table)
    }
}

pub fn count_bigrams(tokens: &[Token], vocab: &Vocabulary) -> BigramTable {
    count_bigrams_with_stats(tokens, vocab).0
}

pub fn count_bigrams_with_stats(tokens: &[Token], vocab: &Vocabulary) -> (BigramTable, BigramStats) {
    let mut table = BigramTable::default();
    let mut stats = BigramStats::default();
    for pair in tokens.windows(2) {
        match (&pair[0], &pair[1]) {
            (Token::Word(l), Token::Word(r)) => match (vocab.rank_of(l), vocab.rank_of(r)) {
                (Some(l), Some(r)) => {
                    table.insert(l, r, 1);
                    stats.counted += 1;
                }
                _ => stats.skipped += 1,
            },
            _ => stats.blocked += 1,
        }
    }
    (table, stats)
}

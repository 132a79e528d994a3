//! Stem/suffix signatures and pseudo-word substitution.
//!
//! A signature is the set of suffixes a stem is seen with, e.g. `NULL.ed.ing`
//! for `jump`/`jumped`/`jumping`. Signatures come either from the simple
//! inducer here or from an external analyzer via [`load_signatures`]. Rare
//! words are then rewritten as `<signature>_<suffix>` so that every word
//! sharing a stem pattern and a suffix becomes a single unit.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use crate::corpus::{Token, Vocabulary};
use crate::error::{Error, Result};

/// Printed name of the empty suffix.
pub const NULL_SUFFIX: &str = "NULL";

/// Separator between the signature name and the suffix in a pseudo-word.
pub const PSEUDO_SEPARATOR: char = '_';

/// Sorted set of at least two distinct suffixes; the empty suffix sorts first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    suffixes: Vec<String>,
}

fn valid_suffix(s: &str) -> bool {
    !s.chars()
        .any(|c| c.is_whitespace() || c == '.' || c == PSEUDO_SEPARATOR)
}

impl Signature {
    /// Builds a signature from suffixes given as plain strings, where `""`
    /// or `"NULL"` is the empty suffix.
    pub fn new<I, S>(suffixes: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for s in suffixes {
            let s = s.as_ref();
            let s = if s == NULL_SUFFIX { "" } else { s };
            if !valid_suffix(s) {
                return Err(Error::Validation(format!("invalid suffix {s:?}")));
            }
            if !set.insert(s.to_string()) {
                return Err(Error::Validation(format!(
                    "suffix {} repeated",
                    suffix_label(s)
                )));
            }
        }
        if set.len() < 2 {
            return Err(Error::Validation("a signature needs at least two suffixes".into()));
        }
        Ok(Signature {
            suffixes: set.into_iter().collect(),
        })
    }

    /// Parses a dot-joined name such as `NULL.ed.ing`.
    pub fn parse(name: &str) -> Result<Self> {
        if name.split('.').any(str::is_empty) {
            return Err(Error::Validation(format!("malformed signature name {name:?}")));
        }
        Self::new(name.split('.'))
    }

    /// Suffixes in order, with `""` for the empty suffix.
    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    pub fn contains(&self, suffix: &str) -> bool {
        let s = if suffix == NULL_SUFFIX { "" } else { suffix };
        self.suffixes.binary_search_by(|x| x.as_str().cmp(s)).is_ok()
    }

    pub fn name(&self) -> String {
        self.to_string()
    }

    /// `<name>_<suffix>`, with `NULL` for the empty suffix.
    pub fn pseudo_word(&self, suffix: &str) -> String {
        format!("{self}{PSEUDO_SEPARATOR}{}", suffix_label(suffix))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.suffixes.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(suffix_label(s))?;
        }
        Ok(())
    }
}

/// Printed form of a suffix: `NULL` for the empty one.
pub fn suffix_label(suffix: &str) -> &str {
    if suffix.is_empty() {
        NULL_SUFFIX
    } else {
        suffix
    }
}

/// Splits `NULL.ed.ing_ed` into `("NULL.ed.ing", "ed")`.
pub fn split_pseudo_word(token: &str) -> Option<(&str, &str)> {
    token.rsplit_once(PSEUDO_SEPARATOR)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSplit {
    pub stem: String,
    /// Empty for the NULL suffix.
    pub suffix: String,
    /// Index into [`MorphAnalysis::signatures`].
    pub signature: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphAnalysis {
    signatures: Vec<Signature>,
    stem_to_signature: BTreeMap<String, usize>,
    word_to_split: BTreeMap<String, WordSplit>,
}

impl MorphAnalysis {
    /// Assembles an analysis from chosen `(word, stem, suffix, signature)`
    /// splits; signatures are interned so stems sharing one share the index.
    fn from_splits(splits: Vec<(String, String, String, Signature)>) -> Result<Self> {
        let distinct: BTreeSet<Signature> = splits.iter().map(|s| s.3.clone()).collect();
        let signatures: Vec<Signature> = distinct.into_iter().collect();
        let mut analysis = MorphAnalysis {
            signatures,
            ..Default::default()
        };
        for (word, stem, suffix, sig) in splits {
            let idx = analysis
                .signatures
                .binary_search(&sig)
                .expect("signature interned above");
            if format!("{stem}{suffix}") != word {
                return Err(Error::Validation(format!(
                    "{stem:?} + {suffix:?} does not spell {word:?}"
                )));
            }
            match analysis.stem_to_signature.insert(stem.clone(), idx) {
                Some(prev) if prev != idx => {
                    return Err(Error::Validation(format!(
                        "stem {stem:?} has two signatures: {} and {}",
                        analysis.signatures[prev], analysis.signatures[idx]
                    )))
                }
                _ => {}
            }
            let split = WordSplit {
                stem,
                suffix,
                signature: idx,
            };
            if let Some(prev) = analysis.word_to_split.get(&word) {
                if *prev != split {
                    return Err(Error::Validation(format!(
                        "word {word:?} split both as {}+{} and {}+{}",
                        prev.stem,
                        suffix_label(&prev.suffix),
                        split.stem,
                        suffix_label(&split.suffix)
                    )));
                }
            }
            analysis.word_to_split.insert(word, split);
        }
        Ok(analysis)
    }

    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    pub fn signature_of_stem(&self, stem: &str) -> Option<&Signature> {
        self.stem_to_signature.get(stem).map(|&i| &self.signatures[i])
    }

    pub fn stems(&self) -> impl Iterator<Item = (&str, &Signature)> {
        self.stem_to_signature
            .iter()
            .map(|(s, &i)| (s.as_str(), &self.signatures[i]))
    }

    pub fn stems_of(&self, signature: &Signature) -> Vec<&str> {
        match self.signatures.binary_search(signature) {
            Ok(idx) => self
                .stem_to_signature
                .iter()
                .filter(|(_, &i)| i == idx)
                .map(|(s, _)| s.as_str())
                .collect(),
            Err(_) => Vec::new(),
        }
    }

    /// `(stem, suffix, signature)` of an analyzed word.
    pub fn split(&self, word: &str) -> Option<(&str, &str, &Signature)> {
        self.word_to_split
            .get(word)
            .map(|s| (s.stem.as_str(), s.suffix.as_str(), &self.signatures[s.signature]))
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.word_to_split.keys().map(String::as_str)
    }

    pub fn word_count(&self) -> usize {
        self.word_to_split.len()
    }

    pub fn pseudo_word(&self, word: &str) -> Option<String> {
        self.split(word).map(|(_, suffix, sig)| sig.pseudo_word(suffix))
    }

    /// Every `<signature>_<suffix>` this analysis can produce, sorted.
    pub fn pseudo_words(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .signatures
            .iter()
            .flat_map(|sig| sig.suffixes().iter().map(move |s| sig.pseudo_word(s)))
            .collect();
        out.sort();
        out
    }

    /// Every suffix label occurring in some signature, sorted.
    pub fn suffix_labels(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .signatures
            .iter()
            .flat_map(|s| s.suffixes().iter().map(|x| suffix_label(x)))
            .collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// `stem<TAB>signature-name`, sorted by stem.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (stem, sig) in self.stems() {
            writeln!(w, "{stem}\t{sig}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphParams {
    pub min_word_len: usize,
    pub min_stem_len: usize,
    pub max_suffix_len: usize,
    pub min_stems: usize,
}

impl Default for MorphParams {
    fn default() -> Self {
        MorphParams {
            min_word_len: 4,
            min_stem_len: 3,
            max_suffix_len: 5,
            min_stems: 2,
        }
    }
}

/// Words made only of letters and apostrophes take part in induction.
fn analyzable(word: &str) -> bool {
    !word.is_empty() && word.chars().all(|c| c.is_alphabetic() || c == '\'')
}

/// Heuristic signature induction.
///
/// 1. Every analyzable word of at least `min_word_len` characters is split
///    into stem + suffix in all ways with `|suffix| ≤ max_suffix_len` and
///    `|stem| ≥ min_stem_len`.
/// 2. A stem's candidate signature is the set of suffixes `f` with
///    stem + `f` in the vocabulary (NULL when the stem itself is a word).
/// 3. A signature is robust if it has two or more suffixes and at least
///    `min_stems` stems share exactly that set.
/// 4. Each word takes the split whose robust signature has the most stems;
///    ties prefer the longer suffix, then the lexicographically smaller one.
/// 5. A stem chosen by some word keeps its whole signature, so short words
///    like `boy` are analyzed through it (`boy` + NULL). A chosen stem whose
///    signature would also spell a word claimed by a different stem is
///    dropped along with the words that chose it, and so is any signature
///    left with fewer than `min_stems` stems.
pub fn induce_signatures(vocab: &Vocabulary, params: &MorphParams) -> MorphAnalysis {
    let words: Vec<(&str, Vec<char>)> = vocab
        .iter()
        .map(|(_, w, _)| w)
        .filter(|w| analyzable(w))
        .map(|w| (w, w.chars().collect()))
        .collect();
    let known: HashSet<&str> = words.iter().map(|(w, _)| *w).collect();

    let splits_of = |chars: &[char]| -> Vec<(String, String)> {
        let len = chars.len();
        if len < params.min_word_len {
            return Vec::new();
        }
        (0..=params.max_suffix_len)
            .take_while(|&s| len >= s && len - s >= params.min_stem_len)
            .map(|s| {
                let cut = len - s;
                (chars[..cut].iter().collect(), chars[cut..].iter().collect())
            })
            .collect()
    };

    let mut stem_suffixes: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (_, chars) in &words {
        for (stem, suffix) in splits_of(chars) {
            stem_suffixes.entry(stem).or_default().insert(suffix);
        }
    }
    for (stem, set) in stem_suffixes.iter_mut() {
        if known.contains(stem.as_str()) {
            set.insert(String::new());
        }
    }

    let mut by_set: BTreeMap<&BTreeSet<String>, Vec<&str>> = BTreeMap::new();
    for (stem, set) in &stem_suffixes {
        by_set.entry(set).or_default().push(stem);
    }
    let robust: BTreeMap<&BTreeSet<String>, usize> = by_set
        .iter()
        .filter(|(set, stems)| set.len() >= 2 && stems.len() >= params.min_stems.max(1))
        .map(|(set, stems)| (*set, stems.len()))
        .collect();

    let mut claimed: HashMap<&str, String> = HashMap::new();
    for (word, chars) in &words {
        let best = splits_of(chars)
            .into_iter()
            .filter_map(|(stem, suffix)| {
                let set = &stem_suffixes[&stem];
                robust.get(set).map(|&n| (n, stem, suffix))
            })
            .max_by(|a, b| {
                a.0.cmp(&b.0)
                    .then(a.2.chars().count().cmp(&b.2.chars().count()))
                    .then(b.2.cmp(&a.2))
            });
        if let Some((_, stem, _)) = best {
            claimed.insert(word, stem);
        }
    }

    // A winning stem covers every word its signature spells. Stems that would
    // spell a word claimed by another stem are dropped, so the analysis is
    // fully described by its stem -> signature table.
    let winners: BTreeSet<&str> = claimed.values().map(String::as_str).collect();
    let mut kept: BTreeMap<&BTreeSet<String>, Vec<&str>> = BTreeMap::new();
    for stem in winners {
        let set = &stem_suffixes[stem];
        let consistent = set.iter().all(|f| {
            let word = format!("{stem}{f}");
            claimed.get(word.as_str()).is_none_or(|s| s == stem)
        });
        if consistent {
            kept.entry(set).or_default().push(stem);
        }
    }
    // Dropping stems can leave a signature below the robustness threshold.
    let mut splits = Vec::new();
    for (set, stems) in kept {
        if stems.len() < params.min_stems.max(1) {
            continue;
        }
        let sig = Signature {
            suffixes: set.iter().cloned().collect(),
        };
        for stem in stems {
            for f in set {
                splits.push((format!("{stem}{f}"), stem.to_string(), f.clone(), sig.clone()));
            }
        }
    }
    MorphAnalysis::from_splits(splits).expect("induced splits are consistent by construction")
}

/// Reads `stem<TAB>signature-name` lines (external analyzer output).
pub fn load_signatures<R: BufRead>(r: R) -> Result<MorphAnalysis> {
    let mut splits = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::parse(n + 1, e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [stem, name] = fields[..] else {
            return Err(Error::parse(n + 1, "expected stem<TAB>signature"));
        };
        if stem.is_empty() || stem.chars().any(char::is_whitespace) || stem.contains(PSEUDO_SEPARATOR) {
            return Err(Error::parse(n + 1, format!("invalid stem {stem:?}")));
        }
        let sig = Signature::parse(name).map_err(|e| Error::parse(n + 1, e.to_string()))?;
        for suffix in sig.suffixes() {
            splits.push((format!("{stem}{suffix}"), stem.to_string(), suffix.clone(), sig.clone()));
        }
    }
    MorphAnalysis::from_splits(splits)
}

/// Rewrites analyzed words outside the `k_atomic` most frequent as
/// `<signature>_<suffix>`. Everything else passes through, including tokens
/// that already contain `_`.
pub fn transform_corpus(
    tokens: &[Token],
    analysis: &MorphAnalysis,
    vocab: &Vocabulary,
    k_atomic: usize,
) -> Vec<Token> {
    tokens
        .iter()
        .map(|t| match t {
            Token::Word(w) if !w.contains(PSEUDO_SEPARATOR) => {
                let atomic = vocab.rank_of(w).is_some_and(|r| r < k_atomic);
                match analysis.pseudo_word(w) {
                    Some(p) if !atomic => Token::Word(p),
                    _ => t.clone(),
                }
            }
            _ => t.clone(),
        })
        .collect()
}

/// Vocabulary ranks (in `transformed`) of the units that enter the second
/// graph: the atomic words plus pseudo-words seen at least `min_count` times.
pub fn graph_units(
    transformed: &Vocabulary,
    original: &Vocabulary,
    analysis: &MorphAnalysis,
    k_atomic: usize,
    min_count: u64,
) -> Vec<usize> {
    let pseudo: HashSet<String> = analysis.pseudo_words().into_iter().collect();
    transformed
        .iter()
        .filter(|&(_, w, c)| {
            if pseudo.contains(w) {
                c >= min_count
            } else {
                original.rank_of(w).is_some_and(|r| r < k_atomic)
            }
        })
        .map(|(i, _, _)| i)
        .collect()
}

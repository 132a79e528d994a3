//! File-backed pipeline stages.
//!
//! Every stage reads its inputs from the output directory, fails with
//! [`Error::MissingArtifact`] when an upstream stage has not run, and writes
//! its own artifacts next to them:
//!
//! | stage     | writes |
//! |-----------|--------|
//! | ingest    | `tokens.txt`, `vocab.tsv`, `bigrams.tsv` |
//! | morph     | `signatures.tsv`, `transformed.txt`, `transformed-vocab.tsv`, `transformed-bigrams.tsv` |
//! | embed     | `<source>-<dir>.edges.tsv`, `<source>-<dir>.removed.txt`, `<source>-<dir>.embedding.tsv` |
//! | coherence | `report.tsv` |
//! | plot      | `plot-<source>-<mode>.svg` |

use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};

use crate::coherence::{coherence_report, normalize_coords, CoherenceReport, NormalizedCoords, DEFAULT_CUTOFF};
use crate::context::{build_context_matrix, build_context_rows, Direction};
use crate::corpus::{
    count_bigrams, count_bigrams_with_stats, read_tokens, tokenize_bytes, write_tokens, BigramTable, TokenizeConfig,
    Vocabulary,
};
use crate::error::{Error, Result};
use crate::graph::knn_graph;
use crate::morphology::{
    graph_units, induce_signatures, load_signatures, split_pseudo_word, suffix_label, transform_corpus,
    MorphAnalysis, MorphParams,
};
use crate::render::{render_svg, HighlightGroup, LabelPolicy, PlotPoint, PlotSpec, PALETTE};
use crate::spectral::{embed, SpectralEmbedding};

pub const TOKENS_FILE: &str = "tokens.txt";
pub const VOCAB_FILE: &str = "vocab.tsv";
pub const BIGRAMS_FILE: &str = "bigrams.tsv";
pub const SIGNATURES_FILE: &str = "signatures.tsv";
pub const TRANSFORMED_FILE: &str = "transformed.txt";
pub const TRANSFORMED_VOCAB_FILE: &str = "transformed-vocab.tsv";
pub const TRANSFORMED_BIGRAMS_FILE: &str = "transformed-bigrams.tsv";
pub const REPORT_FILE: &str = "report.tsv";

/// Which token stream an embedding is built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    /// The raw corpus, top-K words.
    Plain,
    /// The morphologically transformed corpus: atomic words plus pseudo-words.
    Morph,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Plain => "plain",
            Source::Morph => "morph",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Source::Plain),
            "morph" | "transformed" => Ok(Source::Morph),
            _ => Err(Error::Argument(format!("unknown source {s:?} (expected plain or morph)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlotMode {
    /// Left columns 1 and 2.
    Left,
    /// Right columns 1 and 2.
    Right,
    /// Left column 1 against right column 1.
    Cross,
}

impl PlotMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotMode::Left => "left",
            PlotMode::Right => "right",
            PlotMode::Cross => "cross",
        }
    }
}

impl fmt::Display for PlotMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlotMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" => Ok(PlotMode::Left),
            "right" => Ok(PlotMode::Right),
            "cross" => Ok(PlotMode::Cross),
            _ => Err(Error::Argument(format!("unknown plot mode {s:?} (expected left, right or cross)"))),
        }
    }
}

fn parse_label_policy(s: &str) -> Result<LabelPolicy> {
    match s {
        "all" => Ok(LabelPolicy::All),
        "none" => Ok(LabelPolicy::None),
        n => n
            .parse()
            .map(LabelPolicy::TopN)
            .map_err(|_| Error::Argument(format!("label policy must be all, none or a count, not {s:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub out_dir: PathBuf,
    /// K: words in the plain graph.
    pub top_k: usize,
    /// N: nearest neighbors per word.
    pub neighbors: usize,
    /// m: eigenpairs kept per embedding.
    pub eigenpairs: usize,
    /// Words ranked below this stay atomic in the transformed corpus.
    pub atomic_k: usize,
    pub morph: MorphParams,
    /// Pseudo-words rarer than this stay out of the second graph.
    pub pseudo_floor: u64,
    pub cutoff: f64,
    pub signatures_file: Option<PathBuf>,
    /// Suffixes to score; empty means every suffix in the analysis.
    pub suffixes: Vec<String>,
    pub tokenize: TokenizeConfig,
    pub labels: LabelPolicy,
    pub width: u32,
    pub height: u32,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            out_dir: PathBuf::from("out"),
            top_k: 1000,
            neighbors: 20,
            eigenpairs: 3,
            atomic_k: 1000,
            morph: MorphParams::default(),
            pseudo_floor: 5,
            cutoff: DEFAULT_CUTOFF,
            signatures_file: None,
            suffixes: Vec::new(),
            tokenize: TokenizeConfig::default(),
            labels: LabelPolicy::TopN(100),
            width: 1000,
            height: 1000,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Argument(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Argument(format!("{key}: expected true or false, not {value:?}"))),
    }
}

/// Splits a comma-separated suffix list, dropping empty items.
pub fn parse_list(value: &str) -> Vec<String> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

impl PipelineConfig {
    /// Sets one option by its config-file key. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "corpus" => self.corpus = Some(PathBuf::from(value)),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "top_k" => self.top_k = parse_num(key, value)?,
            "neighbors" => self.neighbors = parse_num(key, value)?,
            "eigenpairs" => self.eigenpairs = parse_num(key, value)?,
            "atomic_k" => self.atomic_k = parse_num(key, value)?,
            "min_word_len" => self.morph.min_word_len = parse_num(key, value)?,
            "min_stem_len" => self.morph.min_stem_len = parse_num(key, value)?,
            "max_suffix_len" => self.morph.max_suffix_len = parse_num(key, value)?,
            "min_stems" => self.morph.min_stems = parse_num(key, value)?,
            "pseudo_floor" => self.pseudo_floor = parse_num(key, value)?,
            "cutoff" => self.cutoff = parse_num(key, value)?,
            "signatures_file" => {
                self.signatures_file = (!value.is_empty()).then(|| PathBuf::from(value));
            }
            "suffixes" => self.suffixes = parse_list(value),
            "lowercase" => self.tokenize.lowercase = parse_bool(key, value)?,
            "sentence_boundaries" => self.tokenize.sentence_boundaries = parse_bool(key, value)?,
            "keep_punctuation" => self.tokenize.keep_punctuation = parse_bool(key, value)?,
            "split_dashes" => self.tokenize.split_dashes = parse_bool(key, value)?,
            "labels" => self.labels = parse_label_policy(value)?,
            "width" => self.width = parse_num(key, value)?,
            "height" => self.height = parse_num(key, value)?,
            other => return Err(Error::Argument(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split_once('#').map_or(raw, |(l, _)| l).trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(n + 1, format!("expected key = value, got {line:?}")))?;
            self.set(key, value).map_err(|e| Error::parse(n + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("top_k", self.top_k),
            ("neighbors", self.neighbors),
            ("eigenpairs", self.eigenpairs),
            ("atomic_k", self.atomic_k),
            ("min_stems", self.morph.min_stems),
            ("width", self.width as usize),
            ("height", self.height as usize),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Argument(format!("{name} must be positive")));
            }
        }
        if self.pseudo_floor == 0 {
            return Err(Error::Argument("pseudo_floor must be positive".into()));
        }
        if self.neighbors >= self.top_k {
            return Err(Error::Argument(format!(
                "neighbors ({}) must be smaller than top_k ({})",
                self.neighbors, self.top_k
            )));
        }
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::Argument("cutoff must be a positive number".into()));
        }
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::Argument("out_dir must not be empty".into()));
        }
        if self.corpus.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
            return Err(Error::Argument("corpus path must not be empty".into()));
        }
        Ok(())
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.out_dir.join(file)
    }

    pub fn embedding_stem(&self, source: Source, direction: Direction) -> PathBuf {
        self.path(&format!("{source}-{direction}"))
    }

    pub fn embedding_path(&self, source: Source, direction: Direction) -> PathBuf {
        with_suffix(&self.embedding_stem(source, direction), ".embedding.tsv")
    }

    pub fn plot_path(&self, source: Source, mode: PlotMode) -> PathBuf {
        self.path(&format!("plot-{source}-{mode}.svg"))
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn open_artifact(path: &Path, stage: &'static str) -> Result<BufReader<File>> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingArtifact {
            path: path.to_path_buf(),
            stage,
        }),
        Err(e) => Err(Error::io(path, e)),
    }
}

fn write_artifact(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

fn read_vocab(path: &Path, stage: &'static str) -> Result<Vocabulary> {
    Vocabulary::read_tsv(open_artifact(path, stage)?)
}

fn read_bigrams(path: &Path, vocab: &Vocabulary, stage: &'static str) -> Result<BigramTable> {
    BigramTable::read_tsv(open_artifact(path, stage)?, vocab)
}

fn read_text(path: &Path, stage: &'static str) -> Result<String> {
    let mut s = String::new();
    std::io::Read::read_to_string(&mut open_artifact(path, stage)?, &mut s).map_err(|e| Error::io(path, e))?;
    Ok(s)
}

fn read_embedding(cfg: &PipelineConfig, source: Source, direction: Direction) -> Result<SpectralEmbedding> {
    let path = cfg.embedding_path(source, direction);
    SpectralEmbedding::read_tsv(open_artifact(&path, "embed")?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IngestSummary {
    pub tokens: u64,
    pub types: usize,
    pub bigrams: usize,
}

pub fn cmd_ingest(cfg: &PipelineConfig) -> Result<IngestSummary> {
    let corpus = cfg
        .corpus
        .as_ref()
        .ok_or_else(|| Error::Argument("no corpus given".into()))?;
    let bytes = fs::read(corpus).map_err(|e| Error::io(corpus, e))?;
    let tokens = tokenize_bytes(&bytes, &cfg.tokenize)?;
    let vocab = Vocabulary::build(&tokens);
    let (bigrams, stats) = count_bigrams_with_stats(&tokens, &vocab);
    if vocab.is_empty() {
        warn!("{} contains no words", corpus.display());
    }
    info!(
        "{} bigrams counted, {} blocked by sentence boundaries",
        stats.counted, stats.blocked
    );
    write_artifact(&cfg.path(TOKENS_FILE), |w| write_tokens(&tokens, w))?;
    write_artifact(&cfg.path(VOCAB_FILE), |w| vocab.write_tsv(w))?;
    write_artifact(&cfg.path(BIGRAMS_FILE), |w| bigrams.write_tsv(&vocab, w))?;
    Ok(IngestSummary {
        tokens: vocab.total(),
        types: vocab.len(),
        bigrams: bigrams.len(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedSummary {
    pub source: Source,
    pub direction: Direction,
    pub words: usize,
    pub vertices: usize,
    pub edges: usize,
    pub removed: usize,
    pub components: usize,
    pub eigenvalues: Vec<f64>,
    pub path: PathBuf,
}

/// Context vectors → neighbor graph → spectral embedding for one direction.
pub fn cmd_embed(cfg: &PipelineConfig, source: Source, direction: Direction) -> Result<EmbedSummary> {
    let ctx = match source {
        Source::Plain => {
            let vocab = read_vocab(&cfg.path(VOCAB_FILE), "ingest")?;
            if vocab.is_empty() {
                return Err(Error::Validation("vocabulary is empty; nothing to embed".into()));
            }
            let k = if cfg.top_k > vocab.len() {
                warn!("top_k {} exceeds vocabulary size {}; using {}", cfg.top_k, vocab.len(), vocab.len());
                vocab.len()
            } else {
                cfg.top_k
            };
            check_neighbors(cfg.neighbors, k)?;
            let bigrams = read_bigrams(&cfg.path(BIGRAMS_FILE), &vocab, "ingest")?;
            build_context_matrix(&bigrams, &vocab, k, direction)?
        }
        Source::Morph => {
            let original = read_vocab(&cfg.path(VOCAB_FILE), "ingest")?;
            let analysis = load_signatures(open_artifact(&cfg.path(SIGNATURES_FILE), "morph")?)?;
            let vocab = read_vocab(&cfg.path(TRANSFORMED_VOCAB_FILE), "morph")?;
            let units = graph_units(&vocab, &original, &analysis, cfg.atomic_k, cfg.pseudo_floor);
            if units.is_empty() {
                return Err(Error::Validation("transformed corpus has no graph units".into()));
            }
            check_neighbors(cfg.neighbors, units.len())?;
            let bigrams = read_bigrams(&cfg.path(TRANSFORMED_BIGRAMS_FILE), &vocab, "morph")?;
            build_context_rows(&bigrams, &vocab, &units, direction)?
        }
    };
    let words = ctx.len();
    let graph = knn_graph(&ctx, cfg.neighbors)?;
    drop(ctx);
    if !graph.removed.is_empty() {
        info!(
            "{source}-{direction}: removed {} isolated words: {}",
            graph.removed.len(),
            graph.removed.join(" ")
        );
    }
    if graph.len() < cfg.eigenpairs {
        return Err(Error::Validation(format!(
            "graph has {} vertices, fewer than the {} eigenpairs requested",
            graph.len(),
            cfg.eigenpairs
        )));
    }
    let components = graph.connected_components().len();
    info!(
        "{source}-{direction}: {} vertices, {} edges, {components} components",
        graph.len(),
        graph.edge_count()
    );
    let emb = embed(&graph, cfg.eigenpairs)?;

    let stem = cfg.embedding_stem(source, direction);
    write_artifact(&with_suffix(&stem, ".edges.tsv"), |w| graph.write_edges_tsv(w))?;
    write_artifact(&with_suffix(&stem, ".removed.txt"), |w| graph.write_removed(w))?;
    let path = cfg.embedding_path(source, direction);
    write_artifact(&path, |w| emb.write_tsv(w))?;
    Ok(EmbedSummary {
        source,
        direction,
        words,
        vertices: graph.len(),
        edges: graph.edge_count(),
        removed: graph.removed.len(),
        components,
        eigenvalues: emb.eigenvalues,
        path,
    })
}

fn check_neighbors(n: usize, k: usize) -> Result<()> {
    if n >= k {
        return Err(Error::Argument(format!(
            "neighbors ({n}) must be smaller than the number of graph words ({k})"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphSummary {
    pub signatures: usize,
    pub stems: usize,
    pub analyzed_words: usize,
    pub rewritten_tokens: usize,
    pub pseudo_types: usize,
}

/// Finds (or loads) signatures and rewrites the corpus with pseudo-words.
pub fn cmd_morph(cfg: &PipelineConfig) -> Result<MorphSummary> {
    let vocab = read_vocab(&cfg.path(VOCAB_FILE), "ingest")?;
    let analysis = match &cfg.signatures_file {
        Some(p) => {
            let f = File::open(p).map_err(|e| Error::io(p, e))?;
            load_signatures(BufReader::new(f))?
        }
        None => induce_signatures(&vocab, &cfg.morph),
    };
    let tokens = read_tokens(&read_text(&cfg.path(TOKENS_FILE), "ingest")?);
    let transformed = transform_corpus(&tokens, &analysis, &vocab, cfg.atomic_k);
    let rewritten_tokens = tokens.iter().zip(&transformed).filter(|(a, b)| a != b).count();
    let tvocab = Vocabulary::build(&transformed);
    let tbigrams = count_bigrams(&transformed, &tvocab);
    let pseudo: std::collections::HashSet<String> = analysis.pseudo_words().into_iter().collect();
    let pseudo_types = tvocab.iter().filter(|(_, w, _)| pseudo.contains(*w)).count();
    info!(
        "{} signatures over {} stems; {rewritten_tokens} tokens rewritten into {pseudo_types} pseudo-words",
        analysis.signatures().len(),
        analysis.stems().count()
    );

    write_artifact(&cfg.path(SIGNATURES_FILE), |w| analysis.write_tsv(w))?;
    write_artifact(&cfg.path(TRANSFORMED_FILE), |w| write_tokens(&transformed, w))?;
    write_artifact(&cfg.path(TRANSFORMED_VOCAB_FILE), |w| tvocab.write_tsv(w))?;
    write_artifact(&cfg.path(TRANSFORMED_BIGRAMS_FILE), |w| tbigrams.write_tsv(&tvocab, w))?;
    Ok(MorphSummary {
        signatures: analysis.signatures().len(),
        stems: analysis.stems().count(),
        analyzed_words: analysis.word_count(),
        rewritten_tokens,
        pseudo_types,
    })
}

fn read_analysis(cfg: &PipelineConfig) -> Result<MorphAnalysis> {
    load_signatures(open_artifact(&cfg.path(SIGNATURES_FILE), "morph")?)
}

/// Scores suffix coherence on the transformed-corpus embeddings.
pub fn cmd_coherence(cfg: &PipelineConfig) -> Result<CoherenceReport> {
    let analysis = read_analysis(cfg)?;
    let left = read_embedding(cfg, Source::Morph, Direction::Left)?;
    let right = read_embedding(cfg, Source::Morph, Direction::Right)?;
    let left = normalize_coords(&left, 1, 2)?;
    let right = normalize_coords(&right, 1, 2)?;
    let suffixes = if cfg.suffixes.is_empty() {
        analysis.suffix_labels()
    } else {
        cfg.suffixes.clone()
    };
    let report = coherence_report(&left, &right, &suffixes, &analysis.pseudo_words(), cfg.cutoff);
    write_artifact(&cfg.path(REPORT_FILE), |w| report.write_tsv(w))?;
    Ok(report)
}

fn mode_coords(cfg: &PipelineConfig, source: Source, mode: PlotMode) -> Result<(NormalizedCoords, String, String)> {
    match mode {
        PlotMode::Left | PlotMode::Right => {
            let direction = if mode == PlotMode::Left { Direction::Left } else { Direction::Right };
            let emb = read_embedding(cfg, source, direction)?;
            let coords = normalize_coords(&emb, 1, 2)?;
            Ok((coords, format!("{direction} 1"), format!("{direction} 2")))
        }
        PlotMode::Cross => {
            let left = read_embedding(cfg, source, Direction::Left)?;
            let right = read_embedding(cfg, source, Direction::Right)?;
            if left.columns() < 2 || right.columns() < 2 {
                return Err(Error::Validation("cross plot needs at least 2 eigenpairs".into()));
            }
            // Words present in both maps, in left-map order.
            let mut labels = Vec::new();
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            let right_index: std::collections::HashMap<&str, usize> =
                right.labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
            for (i, label) in left.labels.iter().enumerate() {
                if let Some(&j) = right_index.get(label.as_str()) {
                    labels.push(label.clone());
                    xs.push(left.coords[i][1]);
                    ys.push(right.coords[j][1]);
                }
            }
            let coords = NormalizedCoords::from_points(labels, &xs, &ys)?;
            Ok((coords, "left 1".into(), "right 1".into()))
        }
    }
}

/// Draws one map as SVG, coloring the pseudo-words of each suffix in
/// `highlights`.
pub fn cmd_plot(cfg: &PipelineConfig, source: Source, mode: PlotMode, highlights: &[String]) -> Result<PathBuf> {
    let (coords, x_label, y_label) = mode_coords(cfg, source, mode)?;
    let points: Vec<PlotPoint> = coords
        .labels()
        .iter()
        .zip(coords.points())
        .map(|(label, &(x, y))| PlotPoint {
            label: label.clone(),
            x,
            y,
        })
        .collect();
    let mut groups = Vec::new();
    for suffix in highlights {
        let suffix = suffix_label(suffix);
        let labels: Vec<String> = coords
            .labels()
            .iter()
            .filter(|l| split_pseudo_word(l).is_some_and(|(_, s)| s == suffix))
            .cloned()
            .collect();
        if labels.is_empty() {
            warn!("no {suffix} pseudo-words in the {source} {mode} map");
            continue;
        }
        groups.push(HighlightGroup {
            name: format!("-{suffix}"),
            color: PALETTE[groups.len() % PALETTE.len()].to_string(),
            labels,
        });
    }
    let spec = PlotSpec {
        title: format!("{source} {mode}"),
        x_label,
        y_label,
        width: cfg.width,
        height: cfg.height,
        points,
        groups,
        label_policy: cfg.labels,
    };
    let svg = render_svg(&spec)?;
    let path = cfg.plot_path(source, mode);
    write_artifact(&path, |w| w.write_all(svg.as_bytes()))?;
    Ok(path)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineSummary {
    pub ingest: IngestSummary,
    pub embeddings: Vec<EmbedSummary>,
    pub morph: Option<MorphSummary>,
    pub report: Option<CoherenceReport>,
    pub plots: Vec<PathBuf>,
}

fn both_directions(cfg: &PipelineConfig, source: Source) -> Result<[EmbedSummary; 2]> {
    let (left, right) = std::thread::scope(|s| {
        let left = s.spawn(|| cmd_embed(cfg, source, Direction::Left));
        let right = s.spawn(|| cmd_embed(cfg, source, Direction::Right));
        (left.join(), right.join())
    });
    let unwrap = |r: std::thread::Result<Result<EmbedSummary>>| match r {
        Ok(v) => v,
        Err(panic) => std::panic::resume_unwind(panic),
    };
    Ok([unwrap(left)?, unwrap(right)?])
}

/// Runs every stage in order. Left and right embeddings are built
/// concurrently; stages only talk through the files they write.
pub fn run_all(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    let ingest = cmd_ingest(cfg)?;
    let mut summary = PipelineSummary {
        ingest,
        embeddings: Vec::new(),
        morph: None,
        report: None,
        plots: Vec::new(),
    };
    if summary.ingest.types == 0 {
        warn!("empty corpus; skipping the remaining stages");
        return Ok(summary);
    }
    summary.embeddings.extend(both_directions(cfg, Source::Plain)?);
    summary.morph = Some(cmd_morph(cfg)?);
    summary.embeddings.extend(both_directions(cfg, Source::Morph)?);
    summary.report = Some(cmd_coherence(cfg)?);
    for mode in [PlotMode::Left, PlotMode::Right, PlotMode::Cross] {
        summary.plots.push(cmd_plot(cfg, Source::Plain, mode, &[])?);
    }
    // Highlight only an explicit suffix list; every suffix would swamp the legend.
    for mode in [PlotMode::Left, PlotMode::Right, PlotMode::Cross] {
        summary.plots.push(cmd_plot(cfg, Source::Morph, mode, &cfg.suffixes)?);
    }
    Ok(summary)
}

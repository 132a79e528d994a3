use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wordmap::context::Direction;
use wordmap::pipeline::{self, PipelineConfig, PlotMode, Source};
use wordmap::Result;

/// Spectral word maps from bigram neighbor graphs.
#[derive(Parser, Debug)]
#[command(name = "wordmap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// K: most frequent words in the graph.
    #[arg(long, global = true)]
    top_k: Option<usize>,
    /// N: nearest neighbors per word.
    #[arg(long, global = true)]
    neighbors: Option<usize>,
    /// m: eigenpairs per embedding.
    #[arg(long, global = true)]
    eigenpairs: Option<usize>,
    /// Words this frequent are never rewritten as pseudo-words.
    #[arg(long, global = true)]
    atomic_k: Option<usize>,
    /// Use `stem<TAB>signature` lines instead of inducing signatures.
    #[arg(long, global = true)]
    signatures_file: Option<PathBuf>,
    /// Comma-separated suffixes to score (NULL for the empty suffix).
    #[arg(long, global = true)]
    suffixes: Option<String>,
    #[arg(long, global = true)]
    cutoff: Option<f64>,
    /// Point labels: all, none, or the number of most frequent words.
    #[arg(long, global = true)]
    labels: Option<String>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tokenize the corpus; write vocabulary and bigram counts.
    Ingest,
    /// Build neighbor graphs and spectral embeddings.
    Embed {
        #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
        direction: DirectionArg,
        #[arg(long, value_enum, default_value_t = SourceArg::Plain)]
        source: SourceArg,
    },
    /// Find signatures and rewrite the corpus with pseudo-words.
    Morph,
    /// Score suffix coherence on the pseudo-word maps.
    Coherence,
    /// Draw a map as SVG.
    Plot {
        #[arg(long, value_enum, default_value_t = ModeArg::Left)]
        mode: ModeArg,
        #[arg(long, value_enum, default_value_t = SourceArg::Plain)]
        source: SourceArg,
        /// Comma-separated suffixes whose pseudo-words are colored.
        #[arg(long)]
        highlight: Option<String>,
    },
    /// Run every stage.
    Pipeline,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DirectionArg {
    Left,
    Right,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SourceArg {
    Plain,
    #[value(alias = "transformed")]
    Morph,
}

impl From<SourceArg> for Source {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Plain => Source::Plain,
            SourceArg::Morph => Source::Morph,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Left,
    Right,
    Cross,
}

impl From<ModeArg> for PlotMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Left => PlotMode::Left,
            ModeArg::Right => PlotMode::Right,
            ModeArg::Cross => PlotMode::Cross,
        }
    }
}

fn config(common: &Common) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = &common.corpus {
        cfg.corpus = Some(v.clone());
    }
    if let Some(v) = &common.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = common.top_k {
        cfg.top_k = v;
    }
    if let Some(v) = common.neighbors {
        cfg.neighbors = v;
    }
    if let Some(v) = common.eigenpairs {
        cfg.eigenpairs = v;
    }
    if let Some(v) = common.atomic_k {
        cfg.atomic_k = v;
    }
    if let Some(v) = &common.signatures_file {
        cfg.signatures_file = Some(v.clone());
    }
    if let Some(v) = &common.suffixes {
        cfg.suffixes = pipeline::parse_list(v);
    }
    if let Some(v) = common.cutoff {
        cfg.cutoff = v;
    }
    if let Some(v) = &common.labels {
        cfg.set("labels", v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn print_embed(s: &pipeline::EmbedSummary) {
    println!(
        "{}-{}: {} words, {} vertices, {} edges, {} removed, {} components -> {}",
        s.source,
        s.direction,
        s.words,
        s.vertices,
        s.edges,
        s.removed,
        s.components,
        s.path.display()
    );
    let values: Vec<String> = s.eigenvalues.iter().map(|v| format!("{v:.6}")).collect();
    println!("  eigenvalues: {}", values.join(" "));
}

fn print_report(report: &wordmap::coherence::CoherenceReport) {
    let mut out = Vec::new();
    report.write_tsv(&mut out).expect("write to memory");
    print!("{}", String::from_utf8_lossy(&out));
}

fn run(cli: Cli) -> Result<()> {
    let cfg = config(&cli.common)?;
    match cli.command {
        Command::Ingest => {
            let s = pipeline::cmd_ingest(&cfg)?;
            println!("tokens: {}\ntypes: {}\nbigram types: {}", s.tokens, s.types, s.bigrams);
        }
        Command::Embed { direction, source } => {
            let source = source.into();
            let dirs: &[Direction] = match direction {
                DirectionArg::Left => &[Direction::Left],
                DirectionArg::Right => &[Direction::Right],
                DirectionArg::Both => &[Direction::Left, Direction::Right],
            };
            for &d in dirs {
                print_embed(&pipeline::cmd_embed(&cfg, source, d)?);
            }
        }
        Command::Morph => {
            let s = pipeline::cmd_morph(&cfg)?;
            println!(
                "signatures: {}\nstems: {}\nanalyzed words: {}\nrewritten tokens: {}\npseudo-word types: {}",
                s.signatures, s.stems, s.analyzed_words, s.rewritten_tokens, s.pseudo_types
            );
        }
        Command::Coherence => print_report(&pipeline::cmd_coherence(&cfg)?),
        Command::Plot {
            mode,
            source,
            highlight,
        } => {
            let highlights = highlight.as_deref().map(pipeline::parse_list).unwrap_or_default();
            let path = pipeline::cmd_plot(&cfg, source.into(), mode.into(), &highlights)?;
            println!("{}", path.display());
        }
        Command::Pipeline => {
            let s = pipeline::run_all(&cfg)?;
            println!("tokens: {}\ntypes: {}", s.ingest.tokens, s.ingest.types);
            for e in &s.embeddings {
                print_embed(e);
            }
            if let Some(report) = &s.report {
                print_report(report);
            }
            for p in &s.plots {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.common.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

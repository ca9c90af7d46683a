use std::fs;
use std::io::{self, BufReader, IsTerminal, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use authorsep::dialog::{self, Dialog, Outcome, TableRow};
use authorsep::field::Field;
use authorsep::ingest::{Format, Source};
use authorsep::service::{self, AppState};
use authorsep::session::{Clock, CorpusRef, SelectionSession, SessionFile};
use authorsep::synth::{self, GeneratorParams};
use authorsep::{Analysis, Config, Settings};

/// Separate the publications of an author from those of namesakes.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Review the groups one by one and keep the ones that are yours
    Filter {
        #[command(flatten)]
        input: InputArgs,
        /// Session file; resumed when it exists [default: next to the first input]
        #[arg(long)]
        session: Option<PathBuf>,
        /// Read answers from this file instead of standard input
        #[arg(long)]
        answers: Option<PathBuf>,
    },
    /// Print the groups without asking anything
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        /// Write raw, clamped and closed distance matrices as CSV into this directory
        #[arg(long, value_name = "DIR")]
        dump_matrix: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with known authors and score the clustering
    Bench {
        /// Output directory for corpus.tsv, truth.csv and metrics.csv
        #[arg(long, default_value = "bench")]
        out: PathBuf,
        /// Generator parameters (TOML); flags below override it
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        authors: Option<usize>,
        /// Configuration file for the clustering
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Summarize an accepted selection and write it out as an export file
    Merit {
        session: PathBuf,
        /// Where to write the selected records [default: beside the session]
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Serve the review over HTTP
    Serve {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        session: Option<PathBuf>,
        #[arg(long, default_value = "127.0.0.1:8737")]
        addr: SocketAddr,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Export files (tagged or tab-separated)
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Name being disambiguated, e.g. "Soler, JM" [default: most frequent author]
    #[arg(long)]
    name: Option<String>,
    /// Configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input format [default: detected]
    #[arg(long)]
    format: Option<Format>,
    /// log10 of the number of documents in the database
    #[arg(long)]
    n_docs: Option<f64>,
    /// log10 universe size of a field, as FIELD=VALUE (repeatable)
    #[arg(long = "size", value_name = "FIELD=VALUE", value_parser = parse_size)]
    sizes: Vec<(Field, f64)>,
    /// Count the disambiguated name itself as a shared author
    #[arg(long)]
    include_query_name: bool,
    /// Distance beyond which `r` rejects the remaining groups
    #[arg(long)]
    cutoff: Option<f64>,
}

fn parse_size(text: &str) -> Result<(Field, f64), String> {
    let (field, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected FIELD=VALUE, got `{text}`"))?;
    let field: Field = field.trim().parse().map_err(|e| format!("{e}"))?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a number"))?;
    Ok((field, value))
}

impl InputArgs {
    fn config(&self) -> Result<Config> {
        let mut config = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        let model = &mut config.settings.model;
        if let Some(n) = self.n_docs {
            model.log10_n_docs = n;
        }
        for &(field, size) in &self.sizes {
            model.field_sizes.set(field, size);
        }
        if self.include_query_name {
            config.settings.distance.exclude_query_name = false;
        }
        if let Some(cutoff) = self.cutoff {
            config.session.cutoff = cutoff;
        }
        config.validate()?;
        Ok(config)
    }

    fn analyse(&self, settings: Settings) -> Result<Analysis> {
        let sources = read_sources(&self.files)?;
        let analysis =
            Analysis::from_sources(&sources, self.format, self.name.as_deref(), settings)?;
        for warning in &analysis.corpus.warnings {
            log::warn!("{warning}");
        }
        if analysis.corpus.is_empty() {
            bail!("no records found in the input files");
        }
        Ok(analysis)
    }
}

fn read_sources(paths: &[PathBuf]) -> Result<Vec<Source>> {
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).with_context(|| format!("cannot read {}", p.display()))?;
            Ok(Source::new(p.display().to_string(), bytes))
        })
        .collect()
}

fn default_session_path(first_input: &Path) -> PathBuf {
    first_input.with_extension("session.json")
}

/// Resume the session at `path` if there is one, otherwise start afresh.
/// A stored session brings its own settings so the groups come out the same.
fn open_session(input: &InputArgs, path: &Path) -> Result<(Analysis, SelectionSession)> {
    // a fixed timestamp makes scripted session files reproducible
    let clock = match std::env::var("AUTHORSEP_FIXED_CLOCK") {
        Ok(t) => Clock::Fixed(
            t.parse()
                .context("AUTHORSEP_FIXED_CLOCK must be an integer")?,
        ),
        Err(_) => Clock::System,
    };
    let config = input.config()?;
    if path.exists() {
        let file = SessionFile::load(path)?;
        if input.config.is_some() && file.settings != config.settings {
            log::warn!(
                "{} was made with other settings; using those",
                path.display()
            );
        }
        let analysis = input.analyse(file.settings.clone())?;
        let mut session = file
            .verify(&analysis.corpus, &analysis.clusters)
            .with_context(|| format!("cannot resume {}", path.display()))?;
        session.set_clock(clock);
        eprintln!("Resuming {}", path.display());
        return Ok((analysis, session));
    }
    let analysis = input.analyse(config.settings)?;
    let session = SelectionSession::with_clock(
        CorpusRef::of(&analysis.corpus),
        &analysis.clusters,
        config.session.cutoff,
        clock,
    )?;
    Ok((analysis, session))
}

fn run_filter(input: InputArgs, session: Option<PathBuf>, answers: Option<PathBuf>) -> Result<()> {
    let path = session.unwrap_or_else(|| default_session_path(&input.files[0]));
    let scripted = answers.is_some() || !io::stdin().is_terminal();
    let (analysis, mut session) = open_session(&input, &path)?;
    let settings = analysis.settings.clone();
    let save = |s: &SelectionSession| SessionFile::new(settings.clone(), s.clone()).save(&path);
    save(&session).with_context(|| format!("cannot write {}", path.display()))?;

    let stdout = io::stdout().lock();
    let outcome = match answers {
        Some(file) => {
            let reader = BufReader::new(
                fs::File::open(&file).with_context(|| format!("cannot read {}", file.display()))?,
            );
            let mut dialog = Dialog::new(&analysis, &mut session, reader, stdout);
            dialog.echo = true;
            dialog.run(save)?
        }
        None => {
            let mut dialog = Dialog::new(&analysis, &mut session, io::stdin().lock(), stdout);
            dialog.echo = scripted;
            dialog.run(save)?
        }
    };
    match outcome {
        Outcome::Completed => eprintln!("Session saved in {}", path.display()),
        Outcome::EndOfInput => eprintln!(
            "Stopped with {} groups undecided; run again to resume from {}",
            session.undecided_count(),
            path.display()
        ),
    }
    Ok(())
}

fn run_cluster(input: InputArgs, dump_matrix: Option<PathBuf>) -> Result<()> {
    let config = input.config()?;
    let analysis = input.analyse(config.settings)?;
    let rows: Vec<TableRow> = analysis
        .clusters
        .clusters()
        .iter()
        .map(TableRow::from)
        .collect();
    let mut out = io::stdout().lock();
    write!(
        out,
        "{}",
        dialog::header_block(analysis.corpus.len(), &rows)
    )?;
    for cluster in analysis.clusters.clusters() {
        let sample = &analysis.corpus.records[cluster.representative_id].display;
        write!(out, "\n{}", dialog::group_block(cluster, None, sample))?;
    }
    if let Some(dir) = dump_matrix {
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let matrix = &analysis.matrix;
        for (name, m) in [
            ("raw", &matrix.raw),
            ("clamped", &matrix.clamped),
            ("closed", matrix.closed()),
        ] {
            let path = dir.join(format!("{name}.csv"));
            let file = fs::File::create(&path)
                .with_context(|| format!("cannot write {}", path.display()))?;
            m.write_csv(io::BufWriter::new(file))?;
        }
        eprintln!("Distance matrices written to {}", dir.display());
    }
    Ok(())
}

fn run_bench(
    out: PathBuf,
    params: Option<PathBuf>,
    seed: Option<u64>,
    authors: Option<usize>,
    config: Option<PathBuf>,
) -> Result<()> {
    let mut params: GeneratorParams = match params {
        Some(path) => {
            let text = fs::read_to_string(&path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            toml::from_str(&text).with_context(|| format!("invalid {}", path.display()))?
        }
        None => GeneratorParams::default(),
    };
    if let Some(seed) = seed {
        params.seed = seed;
    }
    if let Some(n) = authors {
        params.n_authors = n;
    }
    let settings = match config {
        Some(path) => Config::load(&path)?.settings,
        None => Settings::default(),
    };
    let (tsv, truth) = synth::generate_tsv(&params)?;
    let sources = [Source::new("corpus.tsv", tsv.as_bytes())];
    let analysis = Analysis::from_sources(
        &sources,
        Some(Format::Tsv),
        Some(synth::QUERY_AUTHOR),
        settings,
    )?;
    let metrics = synth::evaluate(analysis.clusters.clusters(), &truth);
    let gap = synth::gap_statistics(
        &analysis.matrix,
        &truth,
        2.0,
        analysis.settings.clustering.tolerance,
    );

    fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    let write = |name: &str, text: &str| -> Result<()> {
        let path = out.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    };
    write("corpus.tsv", &tsv)?;
    write("truth.csv", &synth::truth_csv(&truth))?;
    write("metrics.csv", &metrics.to_csv())?;

    println!(
        "{} papers by {} authors in {} groups",
        metrics.records, metrics.authors, metrics.clusters
    );
    println!("purity               {:.4}", metrics.purity);
    println!("split rate           {:.4}", metrics.split_rate);
    println!("false positive pairs {}", metrics.false_positive_pairs);
    println!("false negative pairs {}", metrics.false_negative_pairs);
    println!(
        "different-author pairs with distance > 2: {:.2}%",
        100.0 * gap.far_fraction()
    );
    Ok(())
}

/// Source paths are stored as given; relative ones are tried against the
/// working directory first and then against the session's directory.
fn locate(source: &str, session_dir: &Path) -> PathBuf {
    let path = PathBuf::from(source);
    if path.is_absolute() || path.exists() {
        path
    } else {
        session_dir.join(path)
    }
}

fn run_merit(session_path: PathBuf, output: Option<PathBuf>) -> Result<()> {
    let file = SessionFile::load(&session_path)?;
    let corpus_ref = &file.session.corpus_ref;
    let dir = session_path.parent().unwrap_or(Path::new("."));
    let paths: Vec<PathBuf> = corpus_ref.sources.iter().map(|s| locate(s, dir)).collect();
    let sources: Vec<Source> = read_sources(&paths)?
        .into_iter()
        .zip(&corpus_ref.sources)
        .map(|(source, name)| Source::new(name.clone(), source.bytes))
        .collect();
    let analysis = Analysis::from_sources(
        &sources,
        None,
        Some(&corpus_ref.query_name),
        file.settings.clone(),
    )?;
    let session = file
        .verify(&analysis.corpus, &analysis.clusters)
        .with_context(|| format!("cannot use {}", session_path.display()))?;
    let selection = session.export_selection(&analysis.clusters, &analysis.corpus)?;

    let output = output.unwrap_or_else(|| {
        let extension = match analysis.corpus.format {
            Format::Tagged => "selected.txt",
            Format::Tsv => "selected.tsv",
        };
        session_path.with_extension(extension)
    });
    fs::write(&output, selection.export_bytes(&analysis.corpus))
        .with_context(|| format!("cannot write {}", output.display()))?;
    println!("Merit of {}", corpus_ref.query_name);
    print!("{}", selection.summary.render());
    eprintln!("Selected records written to {}", output.display());
    Ok(())
}

fn run_serve(input: InputArgs, session: Option<PathBuf>, addr: SocketAddr) -> Result<()> {
    let path = session.unwrap_or_else(|| default_session_path(&input.files[0]));
    let (analysis, session) = open_session(&input, &path)?;
    let state = AppState::new(Arc::new(analysis), session, Some(path));
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(service::serve(state, addr))?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Filter {
            input,
            session,
            answers,
        } => run_filter(input, session, answers),
        Command::Cluster { input, dump_matrix } => run_cluster(input, dump_matrix),
        Command::Bench {
            out,
            params,
            seed,
            authors,
            config,
        } => run_bench(out, params, seed, authors, config),
        Command::Merit { session, output } => run_merit(session, output),
        Command::Serve {
            input,
            session,
            addr,
        } => run_serve(input, session, addr),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err)
            if err
                .downcast_ref::<io::Error>()
                .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("authorsep: {err:#}");
            ExitCode::FAILURE
        }
    }
}

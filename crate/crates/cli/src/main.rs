//! Command-line frontend: ingest a corpus, build model artifacts, run
//! queries, evaluate against relevance judgments, and sweep retained ranks.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mrfir_core::eval::{ModelKind, SweepFailure, SweepResult};
use mrfir_core::ingest::{
    parse_qrels, parse_smart_docs, parse_smart_queries, Collection, QrelSet, Weighting,
};
use mrfir_core::lsa::LatentSpace;
use mrfir_core::mrf::sigmoid;
use mrfir_core::pipeline::{
    build_model, evaluate_artifact, sweep, CollectionEvaluation, CollectionSource, Corpus,
    ModelArtifact, ModelConfig,
};
use mrfir_core::linalg::SvdOptions;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(
    name = "mrfir",
    about = "Latent-topic document retrieval: tf-idf, LSA, and MRF ranking over SMART-format collections",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a corpus directory into a combined snapshot.
    Ingest(IngestArgs),
    /// Build a model artifact from a corpus snapshot.
    Index(IndexArgs),
    /// Rank documents for one query.
    Query(QueryArgs),
    /// Evaluate model artifacts against the corpus judgments.
    Evaluate(EvaluateArgs),
    /// Mean average precision across a list of retained ranks.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Directory with one subdirectory per collection, each holding
    /// docs.txt and optionally queries.txt / qrels.txt.
    #[arg(long)]
    corpus: PathBuf,
    /// Output snapshot path.
    #[arg(long)]
    out: PathBuf,
    /// Minimum surface-token length admitted to the vocabulary.
    #[arg(long, default_value_t = 3)]
    min_term_len: usize,
    /// Stems present in at least this fraction of documents are excluded
    /// (1.0 disables the filter).
    #[arg(long, default_value_t = 0.95)]
    max_df: f64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Vsm,
    Lsa,
    Mrf,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Vsm => ModelKind::Vsm,
            ModelArg::Lsa => ModelKind::Lsa,
            ModelArg::Mrf => ModelKind::Mrf,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum WeightingArg {
    Tfidf,
    Count,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Tfidf => Weighting::TfIdf,
            WeightingArg::Count => Weighting::RawCount,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LatentSpaceArg {
    /// Rank against plain right singular vectors.
    V,
    /// Rank against right singular vectors scaled by the singular values.
    Vs,
}

impl From<LatentSpaceArg> for LatentSpace {
    fn from(s: LatentSpaceArg) -> Self {
        match s {
            LatentSpaceArg::V => LatentSpace::RightVectors,
            LatentSpaceArg::Vs => LatentSpace::ScaledRightVectors,
        }
    }
}

#[derive(Args)]
struct IndexArgs {
    /// Corpus snapshot produced by `ingest`.
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Retained rank for the latent models; ignored for vsm.
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, value_enum, default_value = "tfidf")]
    weighting: WeightingArg,
    /// Latent document representation used by lsa ranking.
    #[arg(long, value_enum, default_value = "v")]
    lsa_space: LatentSpaceArg,
    /// Seed for the randomized decomposition path.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output artifact path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long)]
    snapshot: PathBuf,
    /// Model artifact produced by `index`.
    #[arg(long)]
    model_file: PathBuf,
    /// Free-form query text.
    #[arg(long, conflicts_with = "query_id")]
    text: Option<String>,
    /// A stored query, written collection:id (e.g. med:7).
    #[arg(long)]
    query_id: Option<String>,
    #[arg(long, default_value_t = 20)]
    top_n: usize,
    /// Report the logistic of each score (mrf artifacts only).
    #[arg(long, default_value_t = false)]
    sigmoid: bool,
    /// Write the ranking here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    snapshot: PathBuf,
    /// One or more model artifacts; each becomes a run in the summary.
    #[arg(long = "model-file", required = true)]
    model_files: Vec<PathBuf>,
    /// Output directory for TSV/CSV/JSON evaluation artifacts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    snapshot: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Ranks to test: comma list (100,200,300) and/or ranges
    /// (100:1200:100).
    #[arg(long)]
    k_list: String,
    #[arg(long, value_enum, default_value = "tfidf")]
    weighting: WeightingArg,
    #[arg(long, value_enum, default_value = "v")]
    lsa_space: LatentSpaceArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for per-collection sweep CSVs.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Index(args) => cmd_index(args),
        Command::Query(args) => cmd_query(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::ExitCode::FAILURE
        }
    }
}

/// Read one collection subdirectory: docs.txt plus optional queries.txt
/// and qrels.txt.
fn read_collection(dir: &Path, name: &str) -> Result<CollectionSource> {
    let collection = Collection::from_name(name);
    let docs_path = dir.join("docs.txt");
    let docs_text = fs::read_to_string(&docs_path)
        .with_context(|| format!("reading {}", docs_path.display()))?;
    let docs = parse_smart_docs(&docs_text, &collection)
        .with_context(|| format!("parsing {}", docs_path.display()))?;

    let queries_path = dir.join("queries.txt");
    let queries = if queries_path.is_file() {
        let text = fs::read_to_string(&queries_path)
            .with_context(|| format!("reading {}", queries_path.display()))?;
        parse_smart_queries(&text, &collection)
            .with_context(|| format!("parsing {}", queries_path.display()))?
    } else {
        Vec::new()
    };

    let qrels_path = dir.join("qrels.txt");
    let qrels = if qrels_path.is_file() {
        let text = fs::read_to_string(&qrels_path)
            .with_context(|| format!("reading {}", qrels_path.display()))?;
        parse_qrels(&text).with_context(|| format!("parsing {}", qrels_path.display()))?
    } else {
        QrelSet::new()
    };

    Ok(CollectionSource {
        collection,
        docs,
        queries,
        qrels,
    })
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut names: Vec<String> = Vec::new();
    for entry in fs::read_dir(&args.corpus)
        .with_context(|| format!("reading corpus directory {}", args.corpus.display()))?
    {
        let entry = entry?;
        if entry.path().is_dir() && entry.path().join("docs.txt").is_file() {
            names.push(entry.file_name().to_string_lossy().to_string());
        }
    }
    names.sort();
    if names.is_empty() {
        bail!(
            "no collections found under {} (expected subdirectories containing docs.txt)",
            args.corpus.display()
        );
    }
    let sources = names
        .iter()
        .map(|name| read_collection(&args.corpus.join(name), name))
        .collect::<Result<Vec<_>>>()?;

    let corpus = Corpus::build(sources, args.min_term_len, args.max_df)?;
    corpus.save(&args.out)?;
    let report = corpus.report();
    println!("{}", serde_json::to_string_pretty(&report)?);
    eprintln!("wrote corpus snapshot to {}", args.out.display());
    Ok(())
}

fn cmd_index(args: IndexArgs) -> Result<()> {
    let corpus = Corpus::load(&args.snapshot)
        .with_context(|| format!("loading snapshot {}", args.snapshot.display()))?;
    let model: ModelKind = args.model.into();
    if model != ModelKind::Vsm && args.k < 1 {
        bail!("--k must be at least 1 for the {} model", model.name());
    }
    let config = ModelConfig {
        model,
        k: args.k,
        weighting: args.weighting.into(),
        lsa_space: args.lsa_space.into(),
        seed: args.seed,
    };
    let artifact = build_model(&corpus, &config)?;
    artifact.save(&args.out)?;
    eprintln!(
        "wrote {} artifact (k={}, weighting={}) to {}",
        model.name(),
        artifact.provenance.k,
        config.weighting.name(),
        args.out.display()
    );
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<()> {
    let corpus = Corpus::load(&args.snapshot)
        .with_context(|| format!("loading snapshot {}", args.snapshot.display()))?;
    let artifact = ModelArtifact::load(&args.model_file)
        .with_context(|| format!("loading artifact {}", args.model_file.display()))?;
    artifact.check_compatible(&corpus)?;
    if args.sigmoid && artifact.provenance.model != ModelKind::Mrf {
        bail!("--sigmoid reports local probabilities and applies to mrf artifacts only");
    }

    let (label, text) = match (&args.text, &args.query_id) {
        (Some(text), None) => ("0".to_string(), text.clone()),
        (None, Some(spec)) => {
            let (coll_name, id_text) = spec
                .split_once(':')
                .ok_or_else(|| anyhow!("--query-id must look like collection:id, got {spec:?}"))?;
            let id: u32 = id_text
                .parse()
                .with_context(|| format!("query id {id_text:?} is not an integer"))?;
            let collection = Collection::from_name(coll_name);
            let query = corpus
                .find_query(&collection, id)
                .ok_or_else(|| anyhow!("no stored query {id} in collection {coll_name}"))?;
            (format!("{coll_name}:{id}"), query.text.clone())
        }
        _ => bail!("provide exactly one of --text or --query-id"),
    };

    let outcome = artifact.data.rank(&corpus, &text)?;
    if outcome.out_of_vocabulary {
        eprintln!("warning: no query term is in the vocabulary; scores are uniform");
    }
    let ranked = outcome.ranked.truncated(args.top_n);

    let mut out = String::new();
    out.push_str("query_id\trank\tdoc_id\tscore\n");
    for (position, entry) in ranked.entries().iter().enumerate() {
        let score = if args.sigmoid {
            sigmoid(entry.score)
        } else {
            entry.score
        };
        out.push_str(&format!(
            "{label}\t{}\t{}\t{score:.6}\n",
            position + 1,
            corpus.doc_label(entry.doc)
        ));
    }
    match &args.out {
        Some(path) => {
            fs::write(path, out).with_context(|| format!("writing {}", path.display()))?
        }
        None => {
            std::io::stdout().write_all(out.as_bytes())?;
        }
    }
    Ok(())
}

fn run_file_stem(artifact: &ModelArtifact) -> String {
    let model = artifact.provenance.model;
    if model == ModelKind::Vsm {
        model.name().to_string()
    } else {
        format!("{}_k{}", model.name(), artifact.provenance.k)
    }
}

fn write_eval_outputs(
    out_dir: &Path,
    stem: &str,
    evals: &[CollectionEvaluation],
) -> Result<()> {
    for eval in evals {
        let coll = eval.collection.name();
        let mut ap = String::from("query_id\tap\n");
        for &(query_id, value) in &eval.per_query_ap {
            ap.push_str(&format!("{query_id}\t{value:.6}\n"));
        }
        let ap_path = out_dir.join(format!("ap_{stem}_{coll}.tsv"));
        fs::write(&ap_path, ap).with_context(|| format!("writing {}", ap_path.display()))?;

        if let Some(curve) = &eval.mean_curve {
            let mut csv = String::from("recall,precision\n");
            for &(recall, precision) in curve.points() {
                csv.push_str(&format!("{recall:.1},{precision:.6}\n"));
            }
            let pr_path = out_dir.join(format!("pr_{stem}_{coll}.csv"));
            fs::write(&pr_path, csv)
                .with_context(|| format!("writing {}", pr_path.display()))?;
        }
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let corpus = Corpus::load(&args.snapshot)
        .with_context(|| format!("loading snapshot {}", args.snapshot.display()))?;
    let total_judgments: usize = (0..corpus.collections().len())
        .map(|i| corpus.global_qrels(i).len())
        .sum();
    if total_judgments == 0 {
        bail!("the corpus snapshot carries no relevance judgments; nothing to evaluate");
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    let mut runs = Vec::new();
    for path in &args.model_files {
        let artifact = ModelArtifact::load(path)
            .with_context(|| format!("loading artifact {}", path.display()))?;
        let evals = evaluate_artifact(&corpus, &artifact)?;
        let stem = run_file_stem(&artifact);
        write_eval_outputs(&args.out, &stem, &evals)?;

        let collections: Vec<serde_json::Value> = evals
            .iter()
            .map(|eval| {
                serde_json::json!({
                    "collection": eval.collection.name(),
                    "map": eval.map,
                    "queries_evaluated": eval.per_query_ap.len(),
                    "skipped_queries": eval.skipped_queries,
                })
            })
            .collect();
        runs.push(serde_json::json!({
            "model": artifact.provenance.model.name(),
            "k": artifact.provenance.k,
            "weighting": artifact.provenance.weighting.name(),
            "collections": collections,
        }));
        for eval in &evals {
            let map = eval
                .map
                .map_or("n/a".to_string(), |m| format!("{m:.4}"));
            eprintln!(
                "{} {}: map={} over {} queries ({} skipped)",
                stem,
                eval.collection.name(),
                map,
                eval.per_query_ap.len(),
                eval.skipped_queries
            );
        }
    }
    let summary = serde_json::json!({ "runs": runs });
    let summary_path = args.out.join("summary.json");
    fs::write(&summary_path, serde_json::to_string_pretty(&summary)?)
        .with_context(|| format!("writing {}", summary_path.display()))?;
    Ok(())
}

/// Parse "100,200,300" and "100:1200:100" (inclusive range with step),
/// possibly mixed with commas.
fn parse_k_list(spec: &str) -> Result<Vec<usize>> {
    let mut ks = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        if let Some((start, rest)) = part.split_once(':') {
            let (end, step) = rest
                .split_once(':')
                .ok_or_else(|| anyhow!("range must be start:end:step, got {part:?}"))?;
            let start: usize = start.trim().parse().context("range start")?;
            let end: usize = end.trim().parse().context("range end")?;
            let step: usize = step.trim().parse().context("range step")?;
            if step == 0 {
                bail!("range step must be positive");
            }
            let mut k = start;
            while k <= end {
                ks.push(k);
                k += step;
            }
        } else {
            ks.push(part.parse().with_context(|| format!("rank {part:?}"))?);
        }
    }
    if ks.is_empty() {
        bail!("--k-list produced no ranks");
    }
    Ok(ks)
}

fn write_sweep_outputs(
    out_dir: &Path,
    results: &[SweepResult],
    failures: &[SweepFailure],
) -> Result<()> {
    for result in results {
        let mut csv = String::from("k,map\n");
        for &(k, map) in &result.rows {
            csv.push_str(&format!("{k},{map:.6}\n"));
        }
        let path = out_dir.join(format!(
            "sweep_{}_{}.csv",
            result.model.name(),
            result.collection.name()
        ));
        fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    if !failures.is_empty() {
        let payload: Vec<serde_json::Value> = failures
            .iter()
            .map(|f| serde_json::json!({ "k": f.k, "message": f.message }))
            .collect();
        let path = out_dir.join("sweep_failures.json");
        fs::write(&path, serde_json::to_string_pretty(&payload)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let corpus = Corpus::load(&args.snapshot)
        .with_context(|| format!("loading snapshot {}", args.snapshot.display()))?;
    let model: ModelKind = args.model.into();
    let ks = parse_k_list(&args.k_list)?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let opts = SvdOptions {
        seed: args.seed,
        ..SvdOptions::default()
    };
    let (results, failures) = sweep(
        &corpus,
        model,
        &ks,
        args.weighting.into(),
        args.lsa_space.into(),
        &opts,
    )?;
    for failure in &failures {
        eprintln!("sweep k={} failed: {}", failure.k, failure.message);
    }
    write_sweep_outputs(&args.out, &results, &failures)?;
    for result in &results {
        if let Some((best_k, best_map)) = result
            .rows
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
        {
            eprintln!(
                "{} {}: best map {:.4} at k={}",
                result.model.name(),
                result.collection.name(),
                best_map,
                best_k
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::parse_k_list;

    #[test]
    fn k_list_forms() {
        assert_eq!(parse_k_list("100,200,300").unwrap(), vec![100, 200, 300]);
        assert_eq!(
            parse_k_list("100:600:100").unwrap(),
            vec![100, 200, 300, 400, 500, 600]
        );
        assert_eq!(parse_k_list("5, 10:20:5").unwrap(), vec![5, 10, 15, 20]);
        assert!(parse_k_list("").is_err());
        assert!(parse_k_list("10:20:0").is_err());
        assert!(parse_k_list("abc").is_err());
    }
}

use std::path::{Path, PathBuf};
use std::sync::Arc;

use readcompat_core::compat::{compat_matrix, metric_correlation, score_cell, CompatMatrix, Metric, Predictor};
use readcompat_core::corpus::{render_jsonl, CorpusFormat, JSONL_FILE, MANIFEST_FILE};
use readcompat_core::embeddings::{load_embeddings, train_cooc, CoocMatrix, GloveConfig};
use readcompat_core::features::{FeatureConfig, FeatureKind};
use readcompat_core::formulas::{formula_distribution_from_scores, formula_profile_from_scores, score_documents};
use readcompat_core::models::{evaluate, load_model, GbdtParams, SoftmaxParams};
use readcompat_core::pipeline::{extract, TrainedPipeline};
use readcompat_core::synth::{generate, SynthConfig};
use readcompat_core::{
    load_corpus, Corpus, EasyWords, Error, FeaturePipeline, FormulaId, Learner, ModelSpec, Resources, Result,
    TextAnalyzer,
};
use serde_json::json;

use crate::heatmap::render_matrix;
use crate::output::Outputs;
use crate::{Cli, Command, GlobalArgs, PipelineArgs};

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    eprintln!("seed: {}", g.seed);
    let written = match &cli.command {
        Command::Formulas { corpus, formulas } => cmd_formulas(g, corpus, formulas)?,
        Command::Features { corpus, features } => cmd_features(g, corpus, features)?,
        Command::Train {
            corpus,
            pipeline,
            cv_folds,
        } => cmd_train(g, corpus, pipeline, *cv_folds)?,
        Command::Eval { model, corpus } => cmd_eval(g, model, corpus)?,
        Command::Crossrun {
            corpora,
            pipeline,
            exclude_diagonal,
            permutations,
        } => cmd_crossrun(g, corpora, pipeline, *exclude_diagonal, *permutations)?,
        Command::Correlate {
            reports,
            exclude_diagonal,
            permutations,
        } => cmd_correlate(g, reports, *exclude_diagonal, *permutations)?,
        Command::Synth {
            name,
            levels,
            per_level,
            counts,
            shuffle_labels,
        } => {
            let cfg = SynthConfig {
                name: name.clone(),
                levels: *levels,
                per_level: *per_level,
                counts: counts.clone(),
                seed: g.seed,
                shuffle_labels: *shuffle_labels,
            };
            cmd_synth(g, &cfg)?
        }
        Command::Heatmap { report, metric } => cmd_heatmap(g, report, metric.as_deref())?,
        Command::Embed {
            corpora,
            dim,
            window,
            epochs,
            learning_rate,
        } => {
            let cfg = GloveConfig {
                dim: *dim,
                window: *window,
                epochs: *epochs,
                learning_rate: *learning_rate,
                seed: g.seed,
                ..GloveConfig::default()
            };
            cmd_embed(g, corpora, &cfg)?
        }
    };
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn format_of(g: &GlobalArgs, path: &Path) -> Result<CorpusFormat> {
    match g.format.as_str() {
        "auto" => Ok(CorpusFormat::detect(path)),
        other => other.parse(),
    }
}

fn load(g: &GlobalArgs, path: &Path) -> Result<Corpus> {
    load_corpus(path, format_of(g, path)?)
}

fn load_all(g: &GlobalArgs, paths: &[PathBuf]) -> Result<Vec<Corpus>> {
    paths.iter().map(|p| load(g, p)).collect()
}

fn analyzer(g: &GlobalArgs) -> Result<TextAnalyzer> {
    TextAnalyzer::from_files(g.lexicon.as_deref(), g.abbreviations.as_deref())
}

fn easy_words(g: &GlobalArgs) -> Result<EasyWords> {
    match &g.easy_words {
        Some(p) => EasyWords::from_file(p),
        None => Ok(EasyWords::embedded()),
    }
}

fn resources(g: &GlobalArgs, kind: FeatureKind) -> Result<Arc<Resources>> {
    if g.long_sentence_threshold == 0 {
        return Err(Error::validation("--long-sentence-threshold must be >= 1"));
    }
    let embeddings = match (&g.embeddings, kind.needs_embeddings()) {
        (Some(p), true) => Some(Arc::new(load_embeddings(p)?)),
        (None, true) => {
            return Err(Error::validation(format!(
                "--features {kind} needs word embeddings: pass --embeddings <glove.txt> (see `readcompat embed`)"
            )))
        }
        (_, false) => None,
    };
    Ok(Arc::new(Resources {
        analyzer: analyzer(g)?,
        easy_words: easy_words(g)?,
        embeddings,
        features: FeatureConfig {
            long_sentence_threshold: g.long_sentence_threshold,
        },
    }))
}

fn resource_sources(g: &GlobalArgs) -> serde_json::Value {
    let src = |p: &Option<PathBuf>| match p {
        Some(p) => json!(p.display().to_string()),
        None => json!("embedded"),
    };
    json!({
        "easy_words": src(&g.easy_words),
        "lexicon": src(&g.lexicon),
        "abbreviations": src(&g.abbreviations),
        "embeddings": g.embeddings.as_ref().map(|p| p.display().to_string()),
    })
}

fn learner(args: &PipelineArgs) -> Result<Learner> {
    let softmax_flags = [
        ("--learning-rate", args.learning_rate.is_some()),
        ("--epochs", args.epochs.is_some()),
        ("--l2", args.l2.is_some()),
        ("--batch-size", args.batch_size.is_some()),
    ];
    let gbdt_flags = [
        ("--trees", args.trees.is_some()),
        ("--depth", args.depth.is_some()),
        ("--shrinkage", args.shrinkage.is_some()),
        ("--max-bins", args.max_bins.is_some()),
        ("--lambda", args.lambda.is_some()),
    ];
    let reject = |flags: &[(&str, bool)], model: &str| match flags.iter().find(|(_, set)| *set) {
        Some((flag, _)) => Err(Error::validation(format!("{flag} does not apply to --model {model}"))),
        None => Ok(()),
    };
    match args.model.parse::<Learner>()? {
        Learner::Softmax(d) => {
            reject(&gbdt_flags, "softmax")?;
            Ok(Learner::Softmax(SoftmaxParams {
                learning_rate: args.learning_rate.unwrap_or(d.learning_rate),
                epochs: args.epochs.unwrap_or(d.epochs),
                l2: args.l2.unwrap_or(d.l2),
                batch_size: args.batch_size.unwrap_or(d.batch_size),
            }))
        }
        Learner::Gbdt(d) => {
            reject(&softmax_flags, "gbdt")?;
            Ok(Learner::Gbdt(GbdtParams {
                trees: args.trees.unwrap_or(d.trees),
                depth: args.depth.unwrap_or(d.depth),
                shrinkage: args.shrinkage.unwrap_or(d.shrinkage),
                max_bins: args.max_bins.unwrap_or(d.max_bins),
                lambda: args.lambda.unwrap_or(d.lambda),
                ..d
            }))
        }
    }
}

fn pipeline(g: &GlobalArgs, args: &PipelineArgs) -> Result<FeaturePipeline> {
    let kind: FeatureKind = args.features.parse()?;
    let spec = ModelSpec::new(learner(args)?, kind, g.seed);
    spec.validate()?;
    FeaturePipeline::new(spec, resources(g, kind)?)
}

fn check_bins(g: &GlobalArgs) -> Result<()> {
    if g.bins < 2 {
        return Err(Error::validation(format!("--bins must be >= 2, got {}", g.bins)));
    }
    Ok(())
}

fn to_json(v: &impl serde::Serialize) -> Result<String> {
    serde_json::to_string_pretty(v)
        .map(|s| s + "\n")
        .map_err(|e| Error::invariant(e.to_string()))
}

fn cmd_formulas(g: &GlobalArgs, path: &Path, formulas: &[String]) -> Result<Vec<PathBuf>> {
    let selected: Vec<FormulaId> = if formulas.is_empty() {
        FormulaId::ALL.to_vec()
    } else {
        formulas.iter().map(|f| f.parse()).collect::<Result<_>>()?
    };
    let mut names = vec!["formula_profile.csv".to_string()];
    names.extend(
        selected
            .iter()
            .map(|f| format!("formula_distribution_{}.csv", f.as_str())),
    );
    let corpus = load(g, path)?;
    let mut out = Outputs::prepare(&g.out, g.force, &names)?;
    let scores = score_documents(&corpus, &analyzer(g)?, &easy_words(g)?);
    let profile = formula_profile_from_scores(&corpus, &scores)?;
    if !profile.skipped.is_empty() {
        eprintln!("skipped {} unscoreable documents", profile.skipped.len());
    }
    out.write(&names[0], &profile.to_csv())?;
    for (f, name) in selected.iter().zip(&names[1..]) {
        out.write(name, &formula_distribution_from_scores(&corpus, &scores, *f)?.to_csv())?;
    }
    Ok(out.commit())
}

fn cmd_features(g: &GlobalArgs, path: &Path, features: &str) -> Result<Vec<PathBuf>> {
    let kind: FeatureKind = features.parse()?;
    let res = resources(g, kind)?;
    let corpus = load(g, path)?;
    let mut out = Outputs::prepare(&g.out, g.force, &["features.csv".into()])?;
    let ex = extract(&corpus, kind, &res, None)?;
    if let Some(oov) = ex.mean_oov {
        eprintln!("mean out-of-vocabulary rate: {oov:.4}");
    }
    out.write("features.csv", &ex.matrix.to_csv(corpus.scheme().levels()))?;
    Ok(out.commit())
}

fn cmd_train(g: &GlobalArgs, path: &Path, args: &PipelineArgs, cv_folds: Option<usize>) -> Result<Vec<PathBuf>> {
    let p = pipeline(g, args)?;
    let corpus = load(g, path)?;
    let mut names = vec!["model.txt".to_string()];
    if cv_folds.is_some() {
        names.push("cv_report.json".into());
    }
    let mut out = Outputs::prepare(&g.out, g.force, &names)?;
    if let Some(k) = cv_folds {
        let cv = p.cross_validate(&corpus, k, g.seed)?;
        eprintln!(
            "{k}-fold cross-validation: accuracy {:.4}, precision {:.4}, recall {:.4}, F1 {:.4}",
            cv.accuracy, cv.precision, cv.recall, cv.f1
        );
        out.write(
            "cv_report.json",
            &to_json(&json!({ "corpus": corpus.id(), "folds": k, "seed": g.seed, "result": cv }))?,
        )?;
    }
    let trained = p.fit(&corpus)?;
    out.write("model.txt", &trained.model.to_text())?;
    Ok(out.commit())
}

fn cmd_eval(g: &GlobalArgs, model_path: &Path, path: &Path) -> Result<Vec<PathBuf>> {
    check_bins(g)?;
    let model = load_model(model_path)?;
    let res = resources(g, model.spec.feature_kind)?;
    let corpus = load(g, path)?;
    let names = ["predictions.csv".to_string(), "eval_report.json".to_string()];
    let mut out = Outputs::prepare(&g.out, g.force, &names)?;
    let trained = TrainedPipeline { model, resources: res };
    let pred = trained.predict_corpus(&corpus)?;
    let scheme = trained.scheme();
    let mut csv = String::from("id,true_level,predicted_level\n");
    for (d, &p) in corpus.documents().iter().zip(&pred) {
        csv.push_str(&format!(
            "{},{},{}\n",
            csv_field(&d.id),
            csv_field(corpus.scheme().level_name(d.level)?),
            csv_field(scheme.level_name(p)?)
        ));
    }
    let cell = score_cell(scheme.name(), scheme, &corpus, &pred, g.bins)?;
    // Classification metrics only make sense when both share a label space.
    let classification = if scheme.levels() == corpus.scheme().levels() {
        Some(evaluate(&pred, &corpus.labels(), scheme.len())?)
    } else {
        None
    };
    out.write("predictions.csv", &csv)?;
    out.write(
        "eval_report.json",
        &to_json(&json!({ "target": corpus.id(), "compatibility": cell, "classification": classification }))?,
    )?;
    Ok(out.commit())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn crossrun_outputs() -> Vec<String> {
    let mut names: Vec<String> = Metric::ALL.iter().map(|m| format!("compat_{}.csv", m.slug())).collect();
    names.push("metric_correlation.csv".into());
    names.extend(Metric::ALL.iter().map(|m| format!("heatmap_{}.svg", m.slug())));
    names.push("compat_report.json".into());
    names.push("run.json".into());
    names
}

fn cmd_crossrun(
    g: &GlobalArgs,
    paths: &[PathBuf],
    args: &PipelineArgs,
    exclude_diagonal: bool,
    permutations: usize,
) -> Result<Vec<PathBuf>> {
    check_bins(g)?;
    let p = pipeline(g, args)?;
    let corpora = load_all(g, paths)?;
    let mut out = Outputs::prepare(&g.out, g.force, &crossrun_outputs())?;
    let matrix = compat_matrix(&corpora, &p, g.bins)?;
    let table = metric_correlation(&[&matrix], !exclude_diagonal, permutations, g.seed)?;
    for m in Metric::ALL {
        out.write(&format!("compat_{}.csv", m.slug()), &matrix.to_csv(m))?;
    }
    out.write("metric_correlation.csv", &table.to_csv())?;
    for m in Metric::ALL {
        out.write(&format!("heatmap_{}.svg", m.slug()), &render_matrix(&matrix, m))?;
    }
    out.write(
        "compat_report.json",
        &to_json(&json!({ "matrix": matrix.to_report(), "correlation": table }))?,
    )?;
    let run = json!({
        "tool": "readcompat",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": readcompat_core::VERSION,
        "command": "crossrun",
        "inputs": paths.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "corpus_ids": matrix.corpora,
        "format": g.format,
        "features": p.kind(),
        "model": p.spec,
        "bins": g.bins,
        "seed": g.seed,
        "long_sentence_threshold": g.long_sentence_threshold,
        "include_diagonal": !exclude_diagonal,
        "permutations": permutations,
        "resources": resource_sources(g),
    });
    out.write("run.json", &to_json(&run)?)?;
    Ok(out.commit())
}

fn read_report(path: &Path) -> Result<CompatMatrix> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let v: serde_json::Value =
        serde_json::from_str(&src).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    // Accept either a full crossrun report or a bare matrix report.
    let m = if v.get("matrix").is_some() { &v["matrix"] } else { &v };
    CompatMatrix::from_report(m).map_err(|e| e.context(path.display()))
}

fn cmd_correlate(
    g: &GlobalArgs,
    reports: &[PathBuf],
    exclude_diagonal: bool,
    permutations: usize,
) -> Result<Vec<PathBuf>> {
    let matrices = reports.iter().map(|p| read_report(p)).collect::<Result<Vec<_>>>()?;
    let mut out = Outputs::prepare(&g.out, g.force, &["metric_correlation.csv".into()])?;
    let refs: Vec<&CompatMatrix> = matrices.iter().collect();
    let table = metric_correlation(&refs, !exclude_diagonal, permutations, g.seed)?;
    out.write("metric_correlation.csv", &table.to_csv())?;
    Ok(out.commit())
}

fn cmd_synth(g: &GlobalArgs, cfg: &SynthConfig) -> Result<Vec<PathBuf>> {
    if cfg.name.is_empty() || cfg.name.contains(['/', '\\']) || cfg.name == "." || cfg.name == ".." {
        return Err(Error::validation(format!("invalid corpus name {:?}", cfg.name)));
    }
    let names = [
        format!("{}/{MANIFEST_FILE}", cfg.name),
        format!("{}/{JSONL_FILE}", cfg.name),
    ];
    let corpus = generate(cfg)?;
    let mut out = Outputs::prepare(&g.out, g.force, &names)?;
    let (manifest, body) = render_jsonl(&corpus)?;
    out.write(&names[0], &manifest)?;
    out.write(&names[1], &body)?;
    Ok(out.commit())
}

fn cmd_heatmap(g: &GlobalArgs, report: &Path, metric: Option<&str>) -> Result<Vec<PathBuf>> {
    let metrics: Vec<Metric> = match metric {
        None => Metric::ALL.to_vec(),
        Some(m) => vec![Metric::ALL
            .into_iter()
            .find(|x| x.slug().eq_ignore_ascii_case(m))
            .ok_or_else(|| Error::validation(format!("unknown metric {m:?} (expected rjsd, rrnss or ndcg)")))?],
    };
    let matrix = read_report(report)?;
    let names: Vec<String> = metrics.iter().map(|m| format!("heatmap_{}.svg", m.slug())).collect();
    let mut out = Outputs::prepare(&g.out, g.force, &names)?;
    for (m, name) in metrics.iter().zip(&names) {
        out.write(name, &render_matrix(&matrix, *m))?;
    }
    Ok(out.commit())
}

fn cmd_embed(g: &GlobalArgs, paths: &[PathBuf], cfg: &GloveConfig) -> Result<Vec<PathBuf>> {
    let corpora = load_all(g, paths)?;
    let names = ["embeddings.txt".to_string(), "embed_report.json".to_string()];
    let mut out = Outputs::prepare(&g.out, g.force, &names)?;
    let cooc = CoocMatrix::build_all(&corpora, &analyzer(g)?, cfg.window);
    let (table, report) = train_cooc(&cooc, cfg)?;
    out.write("embeddings.txt", &table.to_glove_string())?;
    out.write(
        "embed_report.json",
        &to_json(&json!({
            "corpora": corpora.iter().map(Corpus::id).collect::<Vec<_>>(),
            "config": cfg,
            "vocabulary": table.len(),
            "cooccurrences": cooc.nnz(),
            "objective": report.objective,
        }))?,
    )?;
    Ok(out.commit())
}

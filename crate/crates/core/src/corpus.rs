//! Corpus data model: an ordered difficulty scheme plus labeled documents.
//!
//! Two on-disk layouts are supported. Both carry a `scheme.json` manifest
//! that fixes the level order (index 0 = easiest):
//!
//! * `jsonl`: `corpus.jsonl`, one `{"id", "text", "level"}` record per line.
//! * leveled directories: `root/<level-name>/<file>.txt`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "scheme.json";
pub const JSONL_FILE: &str = "corpus.jsonl";

/// An ordered system of difficulty levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawScheme", into = "RawScheme")]
pub struct LabelScheme {
    name: String,
    levels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawScheme {
    name: String,
    levels: Vec<String>,
}

impl TryFrom<RawScheme> for LabelScheme {
    type Error = Error;

    fn try_from(raw: RawScheme) -> Result<Self> {
        LabelScheme::new(raw.name, raw.levels)
    }
}

impl From<LabelScheme> for RawScheme {
    fn from(s: LabelScheme) -> Self {
        RawScheme {
            name: s.name,
            levels: s.levels,
        }
    }
}

impl LabelScheme {
    pub fn new(name: impl Into<String>, levels: Vec<String>) -> Result<Self> {
        let name = name.into();
        if levels.len() < 2 {
            return Err(Error::validation(format!(
                "scheme {name:?} needs at least 2 levels, got {}",
                levels.len()
            )));
        }
        let mut seen = HashSet::new();
        for level in &levels {
            if level.trim().is_empty() {
                return Err(Error::validation(format!("scheme {name:?} has an empty level name")));
            }
            if !seen.insert(level.as_str()) {
                return Err(Error::validation(format!("scheme {name:?} repeats level {level:?}")));
            }
        }
        Ok(LabelScheme { name, levels })
    }

    /// Scheme with levels named `L0`, `L1`, ...
    pub fn numbered(name: impl Into<String>, n_levels: usize) -> Result<Self> {
        Self::new(name, (0..n_levels).map(|i| format!("L{i}")).collect())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    /// Number of levels (always at least 2).
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, level: &str) -> Option<usize> {
        self.levels.iter().position(|l| l == level)
    }

    pub fn level_name(&self, index: usize) -> Result<&str> {
        self.levels
            .get(index)
            .map(String::as_str)
            .ok_or_else(|| self.out_of_range(index))
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.levels.len() {
            Ok(())
        } else {
            Err(self.out_of_range(index))
        }
    }

    /// Distance between two levels under equal level spacing: `|a - b|`.
    pub fn distance(&self, a: usize, b: usize) -> Result<usize> {
        self.check_index(a)?;
        self.check_index(b)?;
        Ok(a.abs_diff(b))
    }

    fn out_of_range(&self, index: usize) -> Error {
        Error::validation(format!(
            "level index {index} out of range for scheme {:?} with {} levels",
            self.name,
            self.levels.len()
        ))
    }
}

/// Free-function form of [`LabelScheme::distance`].
pub fn label_distance(scheme: &LabelScheme, a: usize, b: usize) -> Result<usize> {
    scheme.distance(a, b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub text: String,
    /// Index into the owning corpus' scheme.
    pub level: usize,
}

/// A validated, immutable collection of labeled documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    id: String,
    scheme: LabelScheme,
    documents: Vec<Document>,
}

impl Corpus {
    pub fn new(id: impl Into<String>, scheme: LabelScheme, documents: Vec<Document>) -> Result<Self> {
        let id = id.into();
        if documents.is_empty() {
            return Err(Error::validation(format!("corpus {id:?} is empty")));
        }
        let mut ids = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !ids.insert(doc.id.as_str()) {
                return Err(Error::validation(format!(
                    "corpus {id:?}: duplicate document id {:?}",
                    doc.id
                )));
            }
            if doc.text.trim().is_empty() {
                return Err(Error::validation(format!(
                    "corpus {id:?}: document {:?} has empty text",
                    doc.id
                )));
            }
            scheme
                .check_index(doc.level)
                .map_err(|e| e.context(format!("corpus {id:?}, document {:?}", doc.id)))?;
        }
        Ok(Corpus { id, scheme, documents })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn scheme(&self) -> &LabelScheme {
        &self.scheme
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.documents.iter().map(|d| d.level).collect()
    }

    /// Number of documents at each level, in scheme order.
    pub fn level_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.scheme.len()];
        for doc in &self.documents {
            counts[doc.level] += 1;
        }
        counts
    }

    /// Same corpus under a different id.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Corpus restricted to the documents at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Corpus> {
        let docs = indices.iter().map(|&i| self.documents[i].clone()).collect();
        Corpus::new(self.id.clone(), self.scheme.clone(), docs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
    LeveledDirs,
}

impl std::str::FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jsonl" => Ok(CorpusFormat::Jsonl),
            "leveled-dirs" | "dirs" => Ok(CorpusFormat::LeveledDirs),
            other => Err(Error::validation(format!("unknown corpus format {other:?}"))),
        }
    }
}

impl CorpusFormat {
    /// Guess the layout: a jsonl file, or a directory with `corpus.jsonl`,
    /// is jsonl; any other directory is leveled-dirs.
    pub fn detect(path: &Path) -> CorpusFormat {
        if path.is_file() || path.join(JSONL_FILE).is_file() {
            CorpusFormat::Jsonl
        } else {
            CorpusFormat::LeveledDirs
        }
    }
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    text: String,
    level: String,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    id: &'a str,
    text: &'a str,
    level: &'a str,
}

pub fn read_manifest(path: &Path) -> Result<LabelScheme> {
    let raw = fs::read_to_string(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::validation(format!("missing manifest {}", path.display()))
        } else {
            Error::io(path, e)
        }
    })?;
    serde_json::from_str::<LabelScheme>(&raw)
        .map_err(|e| Error::validation(format!("{}: invalid manifest: {e}", path.display())))
}

/// Load and validate a corpus. Document order is file order for jsonl and
/// lexicographic path order for leveled directories.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus> {
    if !path.exists() {
        return Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
        ));
    }
    match format {
        CorpusFormat::Jsonl => load_jsonl(path),
        CorpusFormat::LeveledDirs => load_leveled_dirs(path),
    }
}

fn corpus_id_for(path: &Path) -> String {
    let name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned());
    if path.is_dir() {
        return name(path).unwrap_or_else(|| "corpus".into());
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    if stem == "corpus" {
        if let Some(parent) = path.parent().and_then(name) {
            return parent;
        }
    }
    stem
}

fn load_jsonl(path: &Path) -> Result<Corpus> {
    let (file_path, dir) = if path.is_dir() {
        (path.join(JSONL_FILE), path.to_path_buf())
    } else {
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        (path.to_path_buf(), dir)
    };
    let scheme = read_manifest(&dir.join(MANIFEST_FILE))?;
    let file = fs::File::open(&file_path).map_err(|e| Error::io(&file_path, e))?;
    let mut documents = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(&file_path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let lineno = lineno + 1;
        let rec: RawRecord = serde_json::from_str(&line)
            .map_err(|e| Error::validation(format!("{}:{lineno}: malformed record: {e}", file_path.display())))?;
        let level = scheme.index_of(&rec.level).ok_or_else(|| {
            Error::validation(format!(
                "{}:{lineno}: record {:?} has unknown level {:?}",
                file_path.display(),
                rec.id,
                rec.level
            ))
        })?;
        documents.push(Document {
            id: rec.id,
            text: rec.text,
            level,
        });
    }
    Corpus::new(corpus_id_for(path), scheme, documents)
}

fn load_leveled_dirs(root: &Path) -> Result<Corpus> {
    let scheme = read_manifest(&root.join(MANIFEST_FILE))?;
    let mut files: BTreeMap<PathBuf, usize> = BTreeMap::new();
    let entries = fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let sub = entry.path();
        if !sub.is_dir() {
            continue;
        }
        let level_name = entry.file_name().to_string_lossy().into_owned();
        let level = scheme.index_of(&level_name).ok_or_else(|| {
            Error::validation(format!(
                "{}: directory {level_name:?} is not a level in the manifest",
                root.display()
            ))
        })?;
        for file in fs::read_dir(&sub).map_err(|e| Error::io(&sub, e))? {
            let file = file.map_err(|e| Error::io(&sub, e))?.path();
            if file.extension().is_some_and(|x| x == "txt") {
                files.insert(file, level);
            }
        }
    }
    let mut documents = Vec::with_capacity(files.len());
    for (file, level) in files {
        let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        let rel = file.strip_prefix(root).unwrap_or(&file);
        let id = rel.with_extension("").to_string_lossy().replace('\\', "/");
        documents.push(Document { id, text, level });
    }
    Corpus::new(corpus_id_for(root), scheme, documents)
}

/// The manifest and jsonl contents that [`write_jsonl`] writes.
pub fn render_jsonl(corpus: &Corpus) -> Result<(String, String)> {
    let manifest = serde_json::to_string_pretty(corpus.scheme()).map_err(|e| Error::invariant(e.to_string()))?;
    let mut out = Vec::new();
    for doc in corpus.documents() {
        let rec = RecordOut {
            id: &doc.id,
            text: &doc.text,
            level: corpus.scheme().level_name(doc.level)?,
        };
        serde_json::to_writer(&mut out, &rec).map_err(|e| Error::invariant(e.to_string()))?;
        out.push(b'\n');
    }
    let body = String::from_utf8(out).map_err(|e| Error::invariant(e.to_string()))?;
    Ok((manifest + "\n", body))
}

/// Write `corpus.jsonl` and `scheme.json` into `dir` (created if needed).
pub fn write_jsonl(corpus: &Corpus, dir: &Path) -> Result<()> {
    let (manifest, body) = render_jsonl(corpus)?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    let path = dir.join(JSONL_FILE);
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// One cross-validation fold, as document ids in corpus order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

/// Index-based variant of [`stratified_folds`]: returns, for each fold, the
/// sorted document indices in its test split.
pub fn stratified_fold_indices(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::validation(format!("fold count must be >= 2, got {k}")));
    }
    let mut by_level: Vec<Vec<usize>> = vec![Vec::new(); corpus.scheme().len()];
    for (i, doc) in corpus.documents().iter().enumerate() {
        by_level[doc.level].push(i);
    }
    for (level, members) in by_level.iter().enumerate() {
        if members.len() < k {
            return Err(Error::validation(format!(
                "level {:?} has {} documents, fewer than {k} folds",
                corpus.scheme().level_name(level)?,
                members.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    // The fold that receives the next document rotates across levels so
    // that the per-fold totals stay balanced as well.
    let mut next = 0;
    for members in &mut by_level {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Stratified k-fold split. Every level must have at least `k` documents.
pub fn stratified_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<Fold>> {
    let tests = stratified_fold_indices(corpus, k, seed)?;
    let docs = corpus.documents();
    let folds = tests
        .iter()
        .map(|test| {
            let in_test: HashSet<usize> = test.iter().copied().collect();
            Fold {
                train: (0..docs.len())
                    .filter(|i| !in_test.contains(i))
                    .map(|i| docs[i].id.clone())
                    .collect(),
                test: test.iter().map(|&i| docs[i].id.clone()).collect(),
            }
        })
        .collect();
    Ok(folds)
}

/// Map from document id to index, for callers that work with [`Fold`] ids.
pub fn id_index(corpus: &Corpus) -> HashMap<&str, usize> {
    corpus
        .documents()
        .iter()
        .enumerate()
        .map(|(i, d)| (d.id.as_str(), i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scheme(levels: &[&str]) -> LabelScheme {
        LabelScheme::new("s", levels.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn corpus_with(per_level: &[usize]) -> Corpus {
        let sch = LabelScheme::numbered("s", per_level.len()).unwrap();
        let mut docs = Vec::new();
        for (level, &n) in per_level.iter().enumerate() {
            for i in 0..n {
                docs.push(Document {
                    id: format!("d{level}-{i}"),
                    text: "Some text.".into(),
                    level,
                });
            }
        }
        Corpus::new("c", sch, docs).unwrap()
    }

    #[test]
    fn scheme_rejects_single_level_and_duplicates() {
        assert!(LabelScheme::new("x", vec!["a".into()]).is_err());
        assert!(LabelScheme::new("x", vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn distance_examples() {
        let s = LabelScheme::numbered("s", 8).unwrap();
        assert_eq!(s.distance(2, 5).unwrap(), 3);
        assert_eq!(s.distance(4, 4).unwrap(), 0);
        assert_eq!(s.distance(0, 7).unwrap(), 7);
        assert!(s.distance(0, 8).is_err());
    }

    #[test]
    fn distance_is_a_metric_for_small_schemes() {
        for n in 2..=12 {
            let s = LabelScheme::numbered("s", n).unwrap();
            for a in 0..n {
                for b in 0..n {
                    let d = s.distance(a, b).unwrap();
                    assert_eq!(d == 0, a == b);
                    assert_eq!(d, s.distance(b, a).unwrap());
                    for c in 0..n {
                        assert!(d <= s.distance(a, c).unwrap() + s.distance(c, b).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn corpus_validation() {
        let s = scheme(&["easy", "hard"]);
        let doc = |id: &str, level| Document {
            id: id.into(),
            text: "x".into(),
            level,
        };
        assert!(Corpus::new("c", s.clone(), vec![]).is_err());
        assert!(Corpus::new("c", s.clone(), vec![doc("a", 0), doc("a", 1)]).is_err());
        assert!(Corpus::new("c", s.clone(), vec![doc("a", 2)]).is_err());
        let blank = Document {
            id: "b".into(),
            text: "  \n".into(),
            level: 0,
        };
        assert!(Corpus::new("c", s, vec![blank]).is_err());
    }

    #[test]
    fn folds_are_stratified_partitions() {
        let c = corpus_with(&[10, 10, 10]);
        let folds = stratified_fold_indices(&c, 5, 3).unwrap();
        assert_eq!(folds.len(), 5);
        for f in &folds {
            let mut per_level = [0; 3];
            for &i in f {
                per_level[c.documents()[i].level] += 1;
            }
            assert_eq!(per_level, [2, 2, 2]);
        }
        let mut all: Vec<usize> = folds.concat();
        all.sort_unstable();
        assert_eq!(all, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn folds_uneven_counts_differ_by_at_most_one() {
        let c = corpus_with(&[7, 11, 5]);
        let folds = stratified_fold_indices(&c, 3, 9).unwrap();
        for level in 0..3 {
            let counts: Vec<usize> = folds
                .iter()
                .map(|f| f.iter().filter(|&&i| c.documents()[i].level == level).count())
                .collect();
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "{counts:?}");
        }
    }

    #[test]
    fn folds_are_deterministic_and_seed_sensitive() {
        let c = corpus_with(&[10, 10]);
        let a = stratified_folds(&c, 5, 42).unwrap();
        assert_eq!(a, stratified_folds(&c, 5, 42).unwrap());
        assert_ne!(a, stratified_folds(&c, 5, 43).unwrap());
        for f in &a {
            assert_eq!(f.train.len() + f.test.len(), 20);
        }
    }

    #[test]
    fn folds_reject_thin_levels() {
        let c = corpus_with(&[10, 3]);
        let err = stratified_folds(&c, 5, 0).unwrap_err().to_string();
        assert!(err.contains("L1"), "{err}");
        assert!(stratified_folds(&corpus_with(&[4, 4]), 1, 0).is_err());
    }
}

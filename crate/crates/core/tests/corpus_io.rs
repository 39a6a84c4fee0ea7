use std::fs;
use std::path::Path;

use readcompat_core::corpus::{write_jsonl, Corpus, CorpusFormat, Document, LabelScheme};
use readcompat_core::{load_corpus, Error};

fn scheme() -> LabelScheme {
    LabelScheme::new("grades", vec!["easy".into(), "mid".into(), "hard".into()]).unwrap()
}

fn doc(id: &str, text: &str, level: usize) -> Document {
    Document {
        id: id.into(),
        text: text.into(),
        level,
    }
}

fn write_manifest(dir: &Path) {
    fs::create_dir_all(dir).unwrap();
    fs::write(
        dir.join("scheme.json"),
        r#"{"name":"grades","levels":["easy","mid","hard"]}"#,
    )
    .unwrap();
}

#[test]
fn jsonl_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = Corpus::new(
        "c",
        scheme(),
        vec![
            doc("a", "The cat sat.", 0),
            doc("b", "Quoted \"text\",\nnewline.", 2),
            doc("c", "Mid.", 1),
        ],
    )
    .unwrap();
    let out = dir.path().join("c");
    write_jsonl(&corpus, &out).unwrap();
    for path in [out.clone(), out.join("corpus.jsonl")] {
        assert_eq!(CorpusFormat::detect(&path), CorpusFormat::Jsonl);
        assert_eq!(load_corpus(&path, CorpusFormat::Jsonl).unwrap(), corpus);
    }
}

#[test]
fn leveled_dirs_load_in_path_order() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("books");
    write_manifest(&root);
    for (level, name, text) in [("hard", "b", "Two."), ("easy", "z", "One."), ("easy", "a", "Zero.")] {
        fs::create_dir_all(root.join(level)).unwrap();
        fs::write(root.join(level).join(format!("{name}.txt")), text).unwrap();
    }
    fs::write(root.join("easy/notes.md"), "ignored").unwrap();
    assert_eq!(CorpusFormat::detect(&root), CorpusFormat::LeveledDirs);
    let c = load_corpus(&root, CorpusFormat::LeveledDirs).unwrap();
    assert_eq!(c.id(), "books");
    let ids: Vec<&str> = c.documents().iter().map(|d| d.id.as_str()).collect();
    assert_eq!(ids, ["easy/a", "easy/z", "hard/b"]);
    assert_eq!(c.labels(), [0, 0, 2]);
    assert_eq!(c.level_counts(), [2, 0, 1]);
}

#[test]
fn unknown_level_directory_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("r");
    write_manifest(&root);
    fs::create_dir_all(root.join("expert")).unwrap();
    let err = load_corpus(&root, CorpusFormat::LeveledDirs).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
    assert!(err.to_string().contains("expert"));
}

#[test]
fn jsonl_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().join("j");
    write_manifest(&root);
    let path = root.join("corpus.jsonl");

    fs::write(
        &path,
        "{\"id\":\"a\",\"text\":\"x\",\"level\":\"easy\"}\n{\"id\":\"b\",\"text\":\"y\",\"level\":\"pro\"}\n",
    )
    .unwrap();
    let err = load_corpus(&root, CorpusFormat::Jsonl).unwrap_err().to_string();
    assert!(err.contains(":2:") && err.contains("pro"), "{err}");

    fs::write(&path, "{\"id\":\"a\",\"text\":\"x\",\"level\":\"easy\"}\nnot json\n").unwrap();
    let err = load_corpus(&root, CorpusFormat::Jsonl).unwrap_err().to_string();
    assert!(err.contains(":2:"), "{err}");

    fs::write(
        &path,
        "{\"id\":\"a\",\"text\":\"x\",\"level\":\"easy\"}\n{\"id\":\"a\",\"text\":\"y\",\"level\":\"mid\"}\n",
    )
    .unwrap();
    assert!(load_corpus(&root, CorpusFormat::Jsonl).is_err(), "duplicate ids");
}

#[test]
fn missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let err = load_corpus(&dir.path().join("absent"), CorpusFormat::Jsonl).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");

    let bare = dir.path().join("bare");
    fs::create_dir_all(&bare).unwrap();
    fs::write(bare.join("corpus.jsonl"), "").unwrap();
    let err = load_corpus(&bare, CorpusFormat::Jsonl).unwrap_err();
    assert!(
        matches!(err, Error::Validation(_)) && err.to_string().contains("manifest"),
        "{err}"
    );
}

#[test]
fn manifest_needs_two_distinct_levels() {
    assert!(LabelScheme::new("s", vec!["only".into()]).is_err());
    assert!(LabelScheme::new("s", vec!["a".into(), "a".into()]).is_err());
    let bad: Result<LabelScheme, _> = serde_json::from_str(r#"{"name":"s","levels":["x"]}"#);
    assert!(bad.is_err());
}

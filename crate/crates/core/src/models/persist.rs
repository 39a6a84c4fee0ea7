//! Line-oriented text serialization for [`Model`].
//!
//! ```text
//! readcompat-model 1
//! spec {"learner":{...},"seed":42,"feature_kind":"L"}
//! scheme {"name":...,"levels":[...]}
//! features ["ASPW",...]
//! mean <floats>
//! std <floats>
//! softmax <classes> <features>
//! weights <floats>
//! ```
//!
//! A gbdt body replaces the last two lines with `gbdt <classes> <features>
//! <rounds>`, `base <floats>`, then per tree a `tree <round> <class> <nodes>`
//! line followed by one `S feature threshold left right` or `L value` line
//! per node. Floats use Rust's shortest round-trip formatting.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::gbdt::{Node, Tree};
use super::{GbdtModel, Model, ModelSpec, Params, SoftmaxModel};
use crate::corpus::LabelScheme;
use crate::error::{Error, Result};
use crate::features::ColumnStats;

pub const MODEL_FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "readcompat-model";

fn join(values: &[f64]) -> String {
    let mut s = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{v}").unwrap();
    }
    s
}

impl Model {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{MAGIC} {MODEL_FORMAT_VERSION}").unwrap();
        writeln!(out, "spec {}", to_json(&self.spec)).unwrap();
        writeln!(out, "scheme {}", to_json(&self.scheme)).unwrap();
        let names: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        writeln!(out, "features {}", to_json(&names)).unwrap();
        writeln!(out, "mean {}", join(&self.standardizer.mean)).unwrap();
        writeln!(out, "std {}", join(&self.standardizer.std)).unwrap();
        if let Some(f) = &self.fusion_stats {
            writeln!(out, "fusion-mean {}", join(&f.mean)).unwrap();
            writeln!(out, "fusion-std {}", join(&f.std)).unwrap();
        }
        match &self.params {
            Params::Softmax(m) => {
                writeln!(out, "softmax {} {}", m.n_classes, m.n_features).unwrap();
                writeln!(out, "weights {}", join(&m.weights)).unwrap();
            }
            Params::Gbdt(m) => {
                writeln!(out, "gbdt {} {} {}", m.base.len(), m.n_features, m.trees.len()).unwrap();
                writeln!(out, "base {}", join(&m.base)).unwrap();
                for (r, round) in m.trees.iter().enumerate() {
                    for (c, tree) in round.iter().enumerate() {
                        writeln!(out, "tree {r} {c} {}", tree.nodes.len()).unwrap();
                        for node in &tree.nodes {
                            match node {
                                Node::Split {
                                    feature,
                                    threshold,
                                    left,
                                    right,
                                } => writeln!(out, "S {feature} {threshold} {left} {right}").unwrap(),
                                Node::Leaf(v) => writeln!(out, "L {v}").unwrap(),
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn from_text(src: &str) -> Result<Model> {
        let mut r = Reader {
            lines: src.lines().enumerate(),
        };
        let (n, head) = r.next()?;
        let version = head
            .strip_prefix(MAGIC)
            .map(str::trim)
            .ok_or_else(|| bad(n, "not a model file"))?;
        if version != MODEL_FORMAT_VERSION.to_string() {
            return Err(bad(n, &format!("unsupported model format version {version:?}")));
        }
        let spec: ModelSpec = r.json("spec")?;
        let scheme: LabelScheme = r.json("scheme")?;
        let names: Vec<String> = r.json("features")?;
        let d = names.len();
        let mean = r.floats("mean", Some(d))?;
        let std = r.floats("std", Some(d))?;
        let mut fusion_stats = None;
        let (mut n, mut line) = r.next()?;
        if line.starts_with("fusion-mean ") {
            let mean = Reader::parse_floats(n, line, "fusion-mean", None)?;
            let std = r.floats("fusion-std", Some(mean.len()))?;
            fusion_stats = Some(ColumnStats { mean, std });
            (n, line) = r.next()?;
        }
        let mut it = line.split_whitespace();
        let params = match it.next() {
            Some("softmax") => {
                let k = parse_usize(n, it.next())?;
                check_dims(n, k, parse_usize(n, it.next())?, &scheme, d)?;
                let weights = r.floats("weights", Some(k * (d + 1)))?;
                Params::Softmax(SoftmaxModel {
                    n_classes: k,
                    n_features: d,
                    weights,
                })
            }
            Some("gbdt") => {
                let k = parse_usize(n, it.next())?;
                check_dims(n, k, parse_usize(n, it.next())?, &scheme, d)?;
                let rounds = parse_usize(n, it.next())?;
                let base = r.floats("base", Some(k))?;
                let mut trees = Vec::with_capacity(rounds);
                for _ in 0..rounds {
                    let mut round = Vec::with_capacity(k);
                    for _ in 0..k {
                        round.push(r.tree(d)?);
                    }
                    trees.push(round);
                }
                Params::Gbdt(GbdtModel {
                    n_features: d,
                    base,
                    trees,
                })
            }
            other => return Err(bad(n, &format!("expected softmax or gbdt, got {other:?}"))),
        };
        if let Some((n, extra)) = r.lines.find(|(_, l)| !l.trim().is_empty()) {
            return Err(bad(n, &format!("trailing content {extra:?}")));
        }
        spec.validate()?;
        Ok(Model {
            spec,
            scheme,
            feature_names: Arc::from(names),
            standardizer: ColumnStats { mean, std },
            fusion_stats,
            params,
        })
    }
}

pub fn load_model(path: &Path) -> Result<Model> {
    let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Model::from_text(&src).map_err(|e| e.context(path.display()))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("model metadata serializes")
}

fn bad(line: usize, msg: &str) -> Error {
    Error::validation(format!("line {}: {msg}", line + 1))
}

fn parse_usize(line: usize, tok: Option<&str>) -> Result<usize> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(line, "expected a non-negative integer"))
}

fn parse_f64(line: usize, tok: Option<&str>) -> Result<f64> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| bad(line, "expected a number"))
}

fn check_dims(line: usize, k: usize, d: usize, scheme: &LabelScheme, names: usize) -> Result<()> {
    if k != scheme.len() || d != names {
        return Err(bad(
            line,
            &format!(
                "parameter shape {k}x{d} does not match {} levels and {names} features",
                scheme.len()
            ),
        ));
    }
    Ok(())
}

fn strip_key<'a>(n: usize, line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .filter(|r| r.is_empty() || r.starts_with(' '))
        .map(str::trim)
        .ok_or_else(|| bad(n, &format!("expected {key:?} line")))
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Reader<'a> {
    fn next(&mut self) -> Result<(usize, &'a str)> {
        self.lines
            .next()
            .ok_or_else(|| Error::validation("model file ends unexpectedly"))
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str)> {
        let (n, line) = self.next()?;
        Ok((n, strip_key(n, line, key)?))
    }

    fn json<T: serde::de::DeserializeOwned>(&mut self, key: &str) -> Result<T> {
        let (n, rest) = self.field(key)?;
        serde_json::from_str(rest).map_err(|e| bad(n, &format!("{key}: {e}")))
    }

    fn floats(&mut self, key: &str, expect: Option<usize>) -> Result<Vec<f64>> {
        let (n, line) = self.next()?;
        Self::parse_floats(n, line, key, expect)
    }

    fn parse_floats(n: usize, line: &str, key: &str, expect: Option<usize>) -> Result<Vec<f64>> {
        let rest = strip_key(n, line, key)?;
        let values = rest
            .split_whitespace()
            .map(|t| parse_f64(n, Some(t)))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(e) = expect {
            if values.len() != e {
                return Err(bad(n, &format!("{key}: expected {e} values, got {}", values.len())));
            }
        }
        Ok(values)
    }

    fn tree(&mut self, d: usize) -> Result<Tree> {
        let (n, header) = self.field("tree")?;
        let count = parse_usize(n, header.split_whitespace().nth(2))?;
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, line) = self.next()?;
            let mut it = line.split_whitespace();
            let node = match it.next() {
                Some("L") => Node::Leaf(parse_f64(n, it.next())?),
                Some("S") => {
                    let feature = parse_usize(n, it.next())?;
                    let threshold = parse_f64(n, it.next())?;
                    let left = parse_usize(n, it.next())?;
                    let right = parse_usize(n, it.next())?;
                    if feature >= d || left >= count || right >= count || left <= nodes.len() || right <= nodes.len() {
                        return Err(bad(n, "split refers to an invalid feature or node"));
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    }
                }
                _ => return Err(bad(n, "expected a tree node")),
            };
            nodes.push(node);
        }
        if nodes.is_empty() {
            return Err(bad(n, "tree has no nodes"));
        }
        Ok(Tree { nodes })
    }
}

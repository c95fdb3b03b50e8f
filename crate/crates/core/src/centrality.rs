//! Per-node centrality vectors and their two-column text form.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralityKind {
    Degree,
    Closeness,
    HarmonicCloseness,
    Betweenness,
    PageRank,
}

impl CentralityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Closeness => "closeness",
            CentralityKind::HarmonicCloseness => "harmonic-closeness",
            CentralityKind::Betweenness => "betweenness",
            CentralityKind::PageRank => "pagerank",
        }
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CentralityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "degree" => CentralityKind::Degree,
            "closeness" => CentralityKind::Closeness,
            "harmonic-closeness" => CentralityKind::HarmonicCloseness,
            "betweenness" => CentralityKind::Betweenness,
            "pagerank" => CentralityKind::PageRank,
            other => {
                return Err(Error::Malformed {
                    line: 1,
                    reason: format!("unknown centrality kind `{other}`"),
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub kind: CentralityKind,
    pub normalized: bool,
}

impl CentralityVector {
    pub fn new(values: Vec<f64>, kind: CentralityKind) -> Self {
        CentralityVector {
            values,
            kind,
            normalized: false,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Divides every entry by the total.
    pub fn normalize(&self) -> Result<CentralityVector> {
        if let Some((index, &value)) = self
            .values
            .iter()
            .enumerate()
            .find(|(_, v)| !(**v >= 0.0))
        {
            return Err(Error::NegativeEntry { index, value });
        }
        let total = self.total();
        if total == 0.0 {
            return Err(Error::ZeroTotal);
        }
        Ok(CentralityVector {
            values: self.values.iter().map(|v| v / total).collect(),
            kind: self.kind,
            normalized: true,
        })
    }
}

/// A centrality vector with its node labels and free-form header notes.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralityTable {
    pub notes: Vec<(String, String)>,
    pub labels: Vec<String>,
    pub vector: CentralityVector,
}

impl CentralityTable {
    pub fn new(labels: Vec<String>, vector: CentralityVector) -> Self {
        CentralityTable {
            notes: Vec::new(),
            labels,
            vector,
        }
    }

    pub fn note(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.notes.push((key.into(), value.to_string()));
        self
    }

    pub fn get_note(&self, key: &str) -> Option<&str> {
        self.notes
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// `# key=value` lines, then `node,<kind>[normalized|raw]`, then one
    /// `label,value` row per node. Values use the shortest exact decimal form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}={v}");
        }
        let flag = if self.vector.normalized { "normalized" } else { "raw" };
        let _ = writeln!(out, "node,{}[{}]", self.vector.kind, flag);
        for (label, v) in self.labels.iter().zip(&self.vector.values) {
            let _ = writeln!(out, "{label},{v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<CentralityTable> {
        let mut notes = Vec::new();
        let mut lines = text.lines().enumerate();
        let (kind, normalized) = loop {
            let Some((idx, line)) = lines.next() else {
                return Err(Error::Malformed {
                    line: 0,
                    reason: "missing table header".into(),
                });
            };
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest.trim().split_once('=').unwrap_or((rest.trim(), ""));
                notes.push((k.to_owned(), v.to_owned()));
                continue;
            }
            let bad = || Error::Malformed {
                line: idx + 1,
                reason: format!("bad table header `{line}`"),
            };
            let spec = line.strip_prefix("node,").ok_or_else(bad)?;
            let (kind, flag) = spec
                .strip_suffix(']')
                .and_then(|s| s.split_once('['))
                .ok_or_else(bad)?;
            let normalized = match flag {
                "normalized" => true,
                "raw" => false,
                _ => return Err(bad()),
            };
            break (kind.parse::<CentralityKind>()?, normalized);
        };
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let parsed = line
                .rsplit_once(',')
                .and_then(|(l, v)| v.parse::<f64>().ok().map(|v| (l, v)));
            let (label, v) = parsed.ok_or_else(|| Error::Malformed {
                line: idx + 1,
                reason: format!("expected `label,value`, got `{line}`"),
            })?;
            labels.push(label.to_owned());
            values.push(v);
        }
        Ok(CentralityTable {
            notes,
            labels,
            vector: CentralityVector {
                values,
                kind,
                normalized,
            },
        })
    }
}

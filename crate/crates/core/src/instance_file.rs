//! JSON instance files.
//!
//! ```json
//! {
//!   "name": "two buyers",
//!   "kind": "matroid",
//!   "matroid": {"type": "uniform", "rank": 1},
//!   "buyers": [
//!     {"support": [{"prob": 0.5, "value": 1.0}, {"prob": 0.5, "value": 3.0}]},
//!     {"support": [{"prob": 1.0, "value": 2.0}]}
//!   ]
//! }
//! ```
//!
//! `value` is a number for `single_item` and `matroid`, a per-item array for
//! `matching`, and either a per-item array (additive) or
//! `{"clauses": [[...], ...]}` for `xos`. `items` is required for `matching`
//! and `xos`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distributions::DiscreteDistribution;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::matroids::{Matroid, MatroidKind, PartitionBlock};
use crate::valuations::{BuyerValuationDistribution, UnitDemandDistribution, XosValuation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: KindTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub items: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matroid: Option<MatroidSpec>,
    pub buyers: Vec<BuyerSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    SingleItem,
    Matroid,
    Matching,
    Xos,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidSpec {
    Uniform { rank: usize },
    Partition { blocks: Vec<BlockSpec> },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockSpec {
    pub elements: Vec<usize>,
    pub capacity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuyerSpec {
    pub support: Vec<AtomSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub prob: f64,
    pub value: ValueSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    Scalar(f64),
    PerItem(Vec<f64>),
    Clauses { clauses: Vec<Vec<f64>> },
}

impl ValueSpec {
    fn describe(&self) -> &'static str {
        match self {
            ValueSpec::Scalar(_) => "a number",
            ValueSpec::PerItem(_) => "a per-item array",
            ValueSpec::Clauses { .. } => "a clause list",
        }
    }
}

/// Reads and validates an instance file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<(InstanceFile, Instance)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_instance(&text, &path.display().to_string())
}

/// Parses and validates instance JSON; `source` labels error messages.
pub fn parse_instance(text: &str, source: &str) -> Result<(InstanceFile, Instance)> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: InstanceFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Parse {
            context: if path == "." {
                source.to_string()
            } else {
                format!("{source}, field {path}")
            },
            message: inner.to_string(),
        }
    })?;
    let instance = file.to_instance()?;
    Ok((file, instance))
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<Instance> {
        if self.buyers.is_empty() {
            return Err(Error::validation("instance has no buyers"));
        }
        let wrong_value = |i: usize, k: usize, v: &ValueSpec, want: &str| {
            Error::validation(format!(
                "buyer {i}: support entry {k} has {}, expected {want}",
                v.describe()
            ))
        };
        let scalar_buyers = || {
            self.buyers
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    let pairs = b
                        .support
                        .iter()
                        .enumerate()
                        .map(|(k, a)| match a.value {
                            ValueSpec::Scalar(v) => Ok((v, a.prob)),
                            ref other => Err(wrong_value(i, k, other, "a number")),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    DiscreteDistribution::named(pairs, &format!("buyer {i}"))
                })
                .collect::<Result<Vec<_>>>()
        };
        let item_count = || {
            self.items
                .filter(|&m| m > 0)
                .ok_or_else(|| Error::validation(format!("{} instance needs items >= 1", self.kind_str())))
        };
        let check_len = |i: usize, k: usize, len: usize, m: usize| {
            if len == m {
                Ok(())
            } else {
                Err(Error::validation(format!(
                    "buyer {i}: support entry {k} has {len} item values, expected {m}"
                )))
            }
        };

        if self.matroid.is_some() && self.kind != KindTag::Matroid {
            return Err(Error::validation("matroid field is only allowed for matroid instances"));
        }
        match self.kind {
            KindTag::SingleItem => {
                if self.items.is_some_and(|m| m != 1) {
                    return Err(Error::validation("single_item instance has exactly one item"));
                }
                Ok(Instance::SingleItem {
                    buyers: scalar_buyers()?,
                })
            }
            KindTag::Matroid => {
                let spec = self
                    .matroid
                    .as_ref()
                    .ok_or_else(|| Error::validation("matroid instance needs a matroid field"))?;
                let buyers = scalar_buyers()?;
                let n = buyers.len();
                let kind = match spec {
                    MatroidSpec::Uniform { rank } => MatroidKind::Uniform { rank: *rank },
                    MatroidSpec::Partition { blocks } => MatroidKind::Partition {
                        blocks: blocks
                            .iter()
                            .map(|b| PartitionBlock {
                                elements: b.elements.clone(),
                                capacity: b.capacity,
                            })
                            .collect(),
                    },
                    MatroidSpec::Graphic { vertices, edges } => MatroidKind::Graphic {
                        vertices: *vertices,
                        edges: edges.clone(),
                    },
                };
                let matroid = Matroid::new(n, kind)?;
                Ok(Instance::Matroid { matroid, buyers })
            }
            KindTag::Matching => {
                let m = item_count()?;
                let buyers = self
                    .buyers
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let support = b
                            .support
                            .iter()
                            .enumerate()
                            .map(|(k, a)| match &a.value {
                                ValueSpec::PerItem(w) => {
                                    check_len(i, k, w.len(), m)?;
                                    Ok((w.clone(), a.prob))
                                }
                                other => Err(wrong_value(i, k, other, "a per-item array")),
                            })
                            .collect::<Result<Vec<_>>>()?;
                        UnitDemandDistribution::named(support, &format!("buyer {i}"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Instance::Matching { items: m, buyers })
            }
            KindTag::Xos => {
                let m = item_count()?;
                let buyers = self
                    .buyers
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let support = b
                            .support
                            .iter()
                            .enumerate()
                            .map(|(k, a)| {
                                let rows = match &a.value {
                                    ValueSpec::PerItem(w) => vec![w.clone()],
                                    ValueSpec::Clauses { clauses } => clauses.clone(),
                                    other => {
                                        return Err(wrong_value(i, k, other, "an array or clauses"))
                                    }
                                };
                                for r in &rows {
                                    check_len(i, k, r.len(), m)?;
                                }
                                let v = XosValuation::from_rows(rows).map_err(|e| {
                                    Error::validation(format!("buyer {i}: support entry {k}: {e}"))
                                })?;
                                Ok((v, a.prob))
                            })
                            .collect::<Result<Vec<_>>>()?;
                        BuyerValuationDistribution::named(support, &format!("buyer {i}"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Instance::Xos { items: m, buyers })
            }
        }
    }

    fn kind_str(&self) -> &'static str {
        match self.kind {
            KindTag::SingleItem => "single_item",
            KindTag::Matroid => "matroid",
            KindTag::Matching => "matching",
            KindTag::Xos => "xos",
        }
    }

    /// The file form of `instance`.
    pub fn from_instance(instance: &Instance, name: Option<String>) -> InstanceFile {
        let scalar = |buyers: &[DiscreteDistribution]| {
            buyers
                .iter()
                .map(|d| BuyerSpec {
                    support: d
                        .atoms()
                        .iter()
                        .map(|a| AtomSpec {
                            prob: a.prob,
                            value: ValueSpec::Scalar(a.value),
                        })
                        .collect(),
                })
                .collect()
        };
        match instance {
            Instance::SingleItem { buyers } => InstanceFile {
                name,
                kind: KindTag::SingleItem,
                items: None,
                matroid: None,
                buyers: scalar(buyers),
            },
            Instance::Matroid { matroid, buyers } => InstanceFile {
                name,
                kind: KindTag::Matroid,
                items: None,
                matroid: Some(match matroid.kind() {
                    MatroidKind::Uniform { rank } => MatroidSpec::Uniform { rank: *rank },
                    MatroidKind::Partition { blocks } => MatroidSpec::Partition {
                        blocks: blocks
                            .iter()
                            .map(|b| BlockSpec {
                                elements: b.elements.clone(),
                                capacity: b.capacity,
                            })
                            .collect(),
                    },
                    MatroidKind::Graphic { vertices, edges } => MatroidSpec::Graphic {
                        vertices: *vertices,
                        edges: edges.clone(),
                    },
                }),
                buyers: scalar(buyers),
            },
            Instance::Matching { items, buyers } => InstanceFile {
                name,
                kind: KindTag::Matching,
                items: Some(*items),
                matroid: None,
                buyers: buyers
                    .iter()
                    .map(|d| BuyerSpec {
                        support: d
                            .support()
                            .iter()
                            .map(|(w, p)| AtomSpec {
                                prob: *p,
                                value: ValueSpec::PerItem(w.clone()),
                            })
                            .collect(),
                    })
                    .collect(),
            },
            Instance::Xos { items, buyers } => InstanceFile {
                name,
                kind: KindTag::Xos,
                items: Some(*items),
                matroid: None,
                buyers: buyers
                    .iter()
                    .map(|d| BuyerSpec {
                        support: d
                            .support()
                            .iter()
                            .map(|(v, p)| AtomSpec {
                                prob: *p,
                                value: ValueSpec::Clauses {
                                    clauses: v.clauses().iter().map(|c| c.per_item().to_vec()).collect(),
                                },
                            })
                            .collect(),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// Writes `instance` as pretty JSON.
pub fn save_instance(path: impl AsRef<Path>, instance: &Instance, name: Option<String>) -> Result<()> {
    let mut text = InstanceFile::from_instance(instance, name).to_json();
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Instance> {
        parse_instance(text, "test").map(|(_, i)| i)
    }

    #[test]
    fn minimal_single_item() {
        let i = parse(r#"{"kind":"single_item","buyers":[{"support":[{"prob":1,"value":2.5}]}]}"#)
            .unwrap();
        assert_eq!(i.num_buyers(), 1);
    }

    #[test]
    fn short_probabilities_name_the_buyer() {
        let err = parse(
            r#"{"kind":"single_item","buyers":[
                {"support":[{"prob":1,"value":1}]},
                {"support":[{"prob":0.5,"value":1},{"prob":0.4,"value":2}]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("buyer 1"), "{err}");
    }

    #[test]
    fn ragged_matching_rejected() {
        let err = parse(
            r#"{"kind":"matching","items":2,"buyers":[
                {"support":[{"prob":0.5,"value":[1,2]},{"prob":0.5,"value":[3]}]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse("{\"kind\":\"single_item\",\n\"buyers\":[{\"support\":[{\"prob\":\"x\",\"value\":1}]}]}")
            .unwrap_err();
        let msg = err.to_string();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(msg.contains("buyers[0].support[0].prob"), "{msg}");
        assert!(msg.contains("line 2"), "{msg}");
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!(matches!(
            parse(r#"{"kind":"auction","buyers":[]}"#),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn matroid_and_xos_forms() {
        let m = parse(
            r#"{"kind":"matroid","matroid":{"type":"graphic","vertices":3,"edges":[[0,1],[1,2],[0,2]]},
                "buyers":[{"support":[{"prob":1,"value":1}]},{"support":[{"prob":1,"value":2}]},
                          {"support":[{"prob":1,"value":3}]}]}"#,
        )
        .unwrap();
        assert_eq!(m.num_items(), 3);
        let x = parse(
            r#"{"kind":"xos","items":2,"buyers":[{"support":[
                {"prob":0.5,"value":[1,2]},
                {"prob":0.5,"value":{"clauses":[[3,0],[0,4]]}}]}]}"#,
        )
        .unwrap();
        assert_eq!(x.num_buyers(), 1);
    }

    #[test]
    fn matroid_size_must_match_buyers() {
        let err = parse(
            r#"{"kind":"matroid","matroid":{"type":"graphic","vertices":2,"edges":[[0,1]]},
                "buyers":[{"support":[{"prob":1,"value":1}]},{"support":[{"prob":1,"value":2}]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn file_round_trip() {
        let text = r#"{"name":"p","kind":"matroid","matroid":{"type":"partition","blocks":[
            {"elements":[0,1],"capacity":1},{"elements":[2],"capacity":1}]},
            "buyers":[{"support":[{"prob":0.3,"value":0.1},{"prob":0.7,"value":2}]},
                      {"support":[{"prob":1,"value":2}]},{"support":[{"prob":1,"value":5}]}]}"#;
        let (f, i) = parse_instance(text, "t").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.json");
        save_instance(&path, &i, f.name.clone()).unwrap();
        let (g, j) = load_instance(&path).unwrap();
        assert_eq!(i, j);
        assert_eq!(g.name.as_deref(), Some("p"));
    }
}

//! JSON instance files.
//!
//! A Ramsey instance:
//!
//! ```json
//! {
//!   "family": {"kind": "K", "index_offset": 0},
//!   "alphabet": ["0", "1"],
//!   "admissible": {"kind": "maximal"},
//!   "symbol": {"uniform": true, "targets": [
//!     {"graph": {"family": "K", "index": 3}, "coloring": {"constant": "0"}},
//!     {"graph": {"family": "K", "index": 3}, "coloring": {"constant": "1"}}
//!   ]},
//!   "field": {"p": 2, "k": 1},
//!   "horizon": 8
//! }
//! ```
//!
//! Any per-index value may instead be written `{"per_index": {"3": ..., "4": ...}}`.
//! Graphs are `{"vertices": n, "edges": [[u, v], ...]}` or `{"family": "K" | "P", "index": n}`
//! for `K_n` / `P_n`. Unknown fields are rejected everywhere.
//!
//! An indicator file has `host`, `field` and `targets`, with target colourings
//! given as field elements (integer codes or coefficient arrays).

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer};
use serde_json::Value;
use thiserror::Error;

use crate::engine::{Admissible, Label, LabeledTarget, PerIndex, RamseyBase, RamseySymbol};
use crate::family::{check_hereditary_prefix, GraphFamily};
use crate::field::{FieldElement, FieldSpec, FieldSpecJson};
use crate::graph::{complete_graph, path_graph, Graph, GraphJson};
use crate::indicator::ColoredTarget;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{path}: {message}")]
pub struct SpecError {
    /// Location of the offending field, e.g. `symbol.targets[1].coloring`.
    pub path: String,
    pub message: String,
}

impl SpecError {
    fn new(path: impl Into<String>, message: impl ToString) -> Self {
        Self { path: path.into(), message: message.to_string() }
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SpecError::new(if path.is_empty() { ".".into() } else { path }, e.inner())
    })
}

/// A value for every index, or `{"per_index": {...}}`.
#[derive(Debug)]
enum PerIndexJson<T> {
    Constant(T),
    Indexed(BTreeMap<usize, T>),
}

fn from_value<T: DeserializeOwned, E: serde::de::Error>(v: Value) -> Result<T, E> {
    serde_json::from_value(v).map_err(E::custom)
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for PerIndexJson<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        if let Value::Object(map) = &v {
            if let Some(inner) = map.get("per_index") {
                if map.len() != 1 {
                    return Err(D::Error::custom("an object with per_index may not have other fields"));
                }
                let raw: BTreeMap<String, Value> = from_value(inner.clone())?;
                let mut out = BTreeMap::new();
                for (k, v) in raw {
                    let i = usize::from_str(&k).map_err(|_| D::Error::custom(format!("per_index key {k:?} is not an index")))?;
                    let t = from_value(v).map_err(|e: D::Error| D::Error::custom(format!("per_index[{k}]: {e}")))?;
                    out.insert(i, t);
                }
                return Ok(PerIndexJson::Indexed(out));
            }
        }
        from_value(v).map(PerIndexJson::Constant)
    }
}

impl<T> PerIndexJson<T> {
    fn convert<U, E>(self, f: impl Fn(T) -> Result<U, E>) -> Result<PerIndex<U>, E> {
        Ok(match self {
            PerIndexJson::Constant(t) => PerIndex::Constant(f(t)?),
            PerIndexJson::Indexed(m) => {
                PerIndex::Indexed(m.into_iter().map(|(i, t)| Ok((i, f(t)?))).collect::<Result<_, E>>()?)
            }
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum FamilyJson {
    #[serde(rename = "K")]
    Complete {
        #[serde(default)]
        index_offset: usize,
    },
    #[serde(rename = "P")]
    Path {
        #[serde(default)]
        index_offset: usize,
    },
    #[serde(rename = "explicit")]
    Explicit { graphs: Vec<GraphRef> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NamedGraph {
    family: String,
    index: usize,
}

/// A literal graph or `{"family": "K" | "P", "index": n}`.
#[derive(Debug)]
struct GraphRef(Graph);

impl<'de> Deserialize<'de> for GraphRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        let is_named = matches!(&v, Value::Object(m) if m.contains_key("family"));
        if is_named {
            let n: NamedGraph = from_value(v)?;
            let g = match n.family.as_str() {
                "K" => complete_graph(n.index),
                "P" => path_graph(n.index),
                other => return Err(D::Error::custom(format!("unknown graph family {other:?} (expected K or P)"))),
            };
            g.map(GraphRef).map_err(D::Error::custom)
        } else {
            let j: GraphJson = from_value(v)?;
            Graph::try_from(j).map(GraphRef).map_err(D::Error::custom)
        }
    }
}

/// A list, or `{"constant": x}` for the same value on every edge.
#[derive(Debug)]
enum ListOrConstant<T> {
    List(Vec<T>),
    Constant(T),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstantJson<T> {
    constant: T,
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for ListOrConstant<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        if v.is_array() {
            from_value(v).map(ListOrConstant::List)
        } else {
            from_value::<ConstantJson<T>, D::Error>(v).map(|c| ListOrConstant::Constant(c.constant))
        }
    }
}

impl<T: Clone> ListOrConstant<T> {
    fn expand(self, edges: usize) -> Vec<T> {
        match self {
            ListOrConstant::List(v) => v,
            ListOrConstant::Constant(c) => vec![c; edges],
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetJson {
    graph: GraphRef,
    coloring: ListOrConstant<Label>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum AdmissibleJson {
    Maximal,
    Explicit {
        colorings: PerIndexJson<Vec<Vec<Label>>>,
    },
    Generated {
        #[serde(default)]
        forced: Option<PerIndexJson<BTreeMap<String, Label>>>,
        #[serde(default)]
        free: Option<PerIndexJson<Vec<Label>>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolJson {
    uniform: bool,
    #[serde(default)]
    targets: Option<Vec<TargetJson>>,
    #[serde(default)]
    per_index: Option<BTreeMap<String, Vec<TargetJson>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    family: FamilyJson,
    alphabet: PerIndexJson<Vec<Label>>,
    admissible: AdmissibleJson,
    symbol: SymbolJson,
    #[serde(default)]
    field: Option<FieldSpecJson>,
    #[serde(default)]
    horizon: Option<usize>,
}

/// A parsed Ramsey instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub base: RamseyBase,
    pub symbol: RamseySymbol,
    /// Field for the algebraic backend; the smallest sufficient one when absent.
    pub field: Option<FieldSpec>,
    pub horizon: Option<usize>,
}

fn targets(list: Vec<TargetJson>) -> Vec<LabeledTarget> {
    list.into_iter()
        .map(|t| {
            let m = t.graph.0.edge_count();
            LabeledTarget::new(t.graph.0, t.coloring.expand(m))
        })
        .collect()
}

pub fn parse_instance(text: &str) -> Result<Instance, SpecError> {
    let j: InstanceJson = parse(text)?;
    let family = match j.family {
        FamilyJson::Complete { index_offset } => GraphFamily::complete(index_offset),
        FamilyJson::Path { index_offset } => GraphFamily::path(index_offset),
        FamilyJson::Explicit { graphs } => {
            let fam = GraphFamily::explicit(graphs.into_iter().map(|g| g.0).collect());
            if let Some(last) = fam.last_index() {
                check_hereditary_prefix(&fam, 0..=last).map_err(|e| SpecError::new("family.graphs", e))?;
            }
            fam
        }
    };
    let alphabet = j.alphabet.convert(Ok::<_, SpecError>)?;
    let admissible = match j.admissible {
        AdmissibleJson::Maximal => Admissible::Maximal,
        AdmissibleJson::Explicit { colorings } => Admissible::Explicit(colorings.convert(Ok::<_, SpecError>)?),
        AdmissibleJson::Generated { forced, free } => {
            let forced = forced.unwrap_or(PerIndexJson::Constant(BTreeMap::new())).convert(|m| {
                m.into_iter()
                    .map(|(k, l)| {
                        usize::from_str(&k)
                            .map(|e| (e, l))
                            .map_err(|_| SpecError::new("admissible.forced", format!("{k:?} is not an edge id")))
                    })
                    .collect::<Result<BTreeMap<_, _>, _>>()
            })?;
            let free = free.map(|f| f.convert(Ok::<_, SpecError>)).transpose()?;
            Admissible::Generated { forced, free }
        }
    };
    let symbol = match (j.symbol.uniform, j.symbol.targets, j.symbol.per_index) {
        (true, Some(list), None) => RamseySymbol::uniform(targets(list)),
        (false, None, Some(per)) => {
            let mut m = BTreeMap::new();
            for (k, list) in per {
                let i = usize::from_str(&k)
                    .map_err(|_| SpecError::new("symbol.per_index", format!("{k:?} is not an index")))?;
                m.insert(i, targets(list));
            }
            RamseySymbol { targets: PerIndex::Indexed(m) }
        }
        (true, _, _) => return Err(SpecError::new("symbol", "a uniform symbol takes `targets` and no `per_index`")),
        (false, _, _) => return Err(SpecError::new("symbol", "a non-uniform symbol takes `per_index` and no `targets`")),
    };
    let field = j.field.map(FieldSpec::try_from).transpose().map_err(|e| SpecError::new("field", e))?;
    Ok(Instance { base: RamseyBase { family, alphabet, admissible }, symbol, field, horizon: j.horizon })
}

/// Certifies family heredity on the range a run will search.
pub fn check_instance_heredity(instance: &Instance, horizon: usize) -> Result<(), SpecError> {
    let fam = &instance.base.family;
    let last = fam.last_index().map_or(horizon, |l| l.min(horizon));
    if last < fam.first_index() {
        return Ok(());
    }
    check_hereditary_prefix(fam, fam.first_index()..=last).map_err(|e| SpecError::new("family", e))
}

/// An element as an integer code or as a coefficient array.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Code(u64),
    Coefficients(Vec<u32>),
}

impl ElementJson {
    pub fn resolve(&self, field: &FieldSpec) -> Result<FieldElement, String> {
        match self {
            ElementJson::Code(c) => field.element(*c).map_err(|e| e.to_string()),
            ElementJson::Coefficients(cs) => field.from_coefficients(cs).map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndicatorTargetJson {
    graph: GraphRef,
    coloring: ListOrConstant<ElementJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndicatorJson {
    host: GraphRef,
    field: FieldSpecJson,
    targets: Vec<IndicatorTargetJson>,
}

#[derive(Clone, Debug)]
pub struct IndicatorSpec {
    pub host: Graph,
    pub field: FieldSpec,
    pub targets: Vec<ColoredTarget>,
}

pub fn parse_indicator_spec(text: &str) -> Result<IndicatorSpec, SpecError> {
    let j: IndicatorJson = parse(text)?;
    let field = FieldSpec::try_from(j.field).map_err(|e| SpecError::new("field", e))?;
    let mut out = Vec::new();
    for (n, t) in j.targets.into_iter().enumerate() {
        let m = t.graph.0.edge_count();
        let coloring = t
            .coloring
            .expand(m)
            .iter()
            .map(|e| e.resolve(&field))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| SpecError::new(format!("targets[{n}].coloring"), e))?;
        out.push(ColoredTarget::new(t.graph.0, coloring));
    }
    Ok(IndicatorSpec { host: j.host.0, field, targets: out })
}

/// Parses a colouring given as comma-separated codes or as a JSON array of elements.
pub fn parse_coloring(text: &str, field: &FieldSpec) -> Result<Vec<FieldElement>, SpecError> {
    let trimmed = text.trim();
    let items: Vec<ElementJson> = if trimmed.starts_with('[') {
        parse(trimmed)?
    } else {
        trimmed
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<u64>().map(ElementJson::Code))
            .collect::<Result<_, _>>()
            .map_err(|e| SpecError::new("coloring", e))?
    };
    items
        .iter()
        .enumerate()
        .map(|(n, e)| e.resolve(field).map_err(|m| SpecError::new(format!("coloring[{n}]"), m)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const R33: &str = r#"{
        "family": {"kind": "K"},
        "alphabet": ["0", "1"],
        "admissible": {"kind": "maximal"},
        "symbol": {"uniform": true, "targets": [
            {"graph": {"family": "K", "index": 3}, "coloring": {"constant": "0"}},
            {"graph": {"vertices": 3, "edges": [[0,1],[0,2],[1,2]]}, "coloring": ["1","1","1"]}
        ]},
        "horizon": 8
    }"#;

    #[test]
    fn parses_classical_instance() {
        let inst = parse_instance(R33).unwrap();
        let (base, symbol) = crate::engine::classical_instance(&[3, 3]).unwrap();
        assert_eq!(inst.symbol, symbol);
        assert_eq!(inst.base.alphabet, base.alphabet);
        assert_eq!(inst.horizon, Some(8));
    }

    #[test]
    fn unknown_fields_are_reported_with_a_path() {
        let bad = R33.replace("\"index\": 3}", "\"index\": 3, \"colour\": 1}");
        let err = parse_instance(&bad).unwrap_err();
        assert!(err.path.starts_with("symbol.targets"), "{err}");
        let err = parse_instance(&R33.replace("\"horizon\"", "\"horizn\"")).unwrap_err();
        assert!(err.message.contains("horizn"), "{err}");
    }

    #[test]
    fn per_index_values() {
        let text = r#"{
            "family": {"kind": "P", "index_offset": 0},
            "alphabet": {"per_index": {"1": ["a"], "2": ["a", "b"]}},
            "admissible": {"kind": "generated", "forced": {"per_index": {"2": {"0": "b"}}}},
            "symbol": {"uniform": false, "per_index": {"1": [], "2": [{"graph": {"family": "P", "index": 1}, "coloring": ["b"]}]}}
        }"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.base.alphabet.at(2).unwrap().len(), 2);
        assert!(inst.base.alphabet.at(3).is_none());
    }

    #[test]
    fn non_hereditary_explicit_family_names_the_pair() {
        let text = r#"{
            "family": {"kind": "explicit", "graphs": [{"family": "K", "index": 3}, {"family": "K", "index": 2}]},
            "alphabet": ["0"], "admissible": {"kind": "maximal"},
            "symbol": {"uniform": true, "targets": []}
        }"#;
        let err = parse_instance(text).unwrap_err();
        assert_eq!(err.path, "family.graphs");
        assert!(err.message.contains("member 0") && err.message.contains("member 1"), "{err}");
    }

    #[test]
    fn indicator_spec_and_colorings() {
        let text = r#"{"host": {"family": "K", "index": 4}, "field": {"p": 2, "k": 2},
            "targets": [{"graph": {"family": "K", "index": 3}, "coloring": {"constant": [0, 1]}}]}"#;
        let spec = parse_indicator_spec(text).unwrap();
        assert_eq!(spec.targets[0].coloring[0].code(), 2);
        let f = &spec.field;
        assert_eq!(parse_coloring("1,1,0,0,1,3", f).unwrap().len(), 6);
        assert_eq!(parse_coloring("[[1,1], 0]", f).unwrap()[0].code(), 3);
        assert!(parse_coloring("1,4", f).is_err());
    }
}

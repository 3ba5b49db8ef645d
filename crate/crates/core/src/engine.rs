//! Ramsey bases, symbols and the horizon-bounded search for generalized
//! Ramsey numbers.
//!
//! Colourings are handled in label space: every alphabet `A_i` is a list of
//! opaque labels and a colouring is a sequence of label indices, edge id order.
//! The direct backend searches that space for colourings avoiding every
//! coloured target; the algebraic backend injects the alphabet into a finite
//! field and searches for points where the indicator polynomial is nonzero.
//! Both scan in the same lexicographic order, so their witnesses coincide.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use serde::Serialize;
use thiserror::Error;

use crate::family::{check_hereditary_prefix, FamilyError, GraphFamily};
use crate::field::{inject_alphabet, prime_power, AlphabetInjection, FieldError, FieldSpec, FieldSpecJson};
use crate::graph::{embeds, enumerate_embeddings, find_colored_occurrence, Graph};
use crate::indicator::{
    build_indicator, enumerate_nonvanishing, evaluate, ColoredTarget, Coloring, ColoringSource, IndicatorError,
    DEFAULT_MAX_POINTS,
};
use crate::search::{lex_search, product_size};

pub type Label = String;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Indicator(#[from] IndicatorError),
    #[error("index {index}: no {what} given")]
    MissingIndex { index: usize, what: &'static str },
    #[error("index {index}: label {label:?} repeated in the alphabet")]
    DuplicateLabel { index: usize, label: Label },
    #[error("index {index}: {context} uses label {label:?}, which is not in the alphabet")]
    UnknownLabel { index: usize, context: String, label: Label },
    #[error("index {index}: {context} has {got} colours for {expected} edges")]
    ColoringLength { index: usize, context: String, expected: usize, got: usize },
    #[error("index {index}: forced edge {edge} does not exist (host has {edges} edges)")]
    ForcedEdgeOutOfRange { index: usize, edge: usize, edges: usize },
    #[error("index {index}: injection covers {got} labels, alphabet has {expected}")]
    InjectionSize { index: usize, expected: usize, got: usize },
    #[error("index {index}: {needed} colourings exceed the capacity bound {bound}")]
    CapacityExceeded { index: usize, needed: u128, bound: u128 },
    #[error("index {index}: backends disagree (direct: {direct}, algebraic: {algebraic}) at colouring {coloring:?}")]
    BackendDisagreement { index: usize, direct: bool, algebraic: bool, coloring: Vec<Label> },
    #[error("horizon {horizon} lies before the first family index {first}")]
    HorizonBeforeStart { horizon: usize, first: usize },
    #[error("the symbol is not uniform on the checked range")]
    NotUniform,
}

/// A value given either once for every index or separately per index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerIndex<T> {
    Constant(T),
    Indexed(BTreeMap<usize, T>),
}

impl<T> PerIndex<T> {
    pub fn at(&self, index: usize) -> Option<&T> {
        match self {
            PerIndex::Constant(v) => Some(v),
            PerIndex::Indexed(m) => m.get(&index),
        }
    }

    pub fn indexed(items: impl IntoIterator<Item = (usize, T)>) -> Self {
        PerIndex::Indexed(items.into_iter().collect())
    }
}

/// A target graph with a prescribed colouring, in labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledTarget {
    pub graph: Graph,
    pub coloring: Vec<Label>,
}

impl LabeledTarget {
    pub fn new(graph: Graph, coloring: Vec<Label>) -> Self {
        Self { graph, coloring }
    }

    pub fn monochromatic(graph: Graph, label: impl Into<Label>) -> Self {
        let label = label.into();
        let coloring = vec![label; graph.edge_count()];
        Self { graph, coloring }
    }
}

/// The admissible colourings `S_i` of each `G_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Admissible {
    /// All of `Hom(G_i, A_i)`.
    Maximal,
    /// Enumerated colourings, scanned in the given order.
    Explicit(PerIndex<Vec<Vec<Label>>>),
    /// Forced edges keep their label; every other edge ranges over `free`
    /// (the whole alphabet when absent). An index missing from `forced`
    /// forces nothing.
    Generated { forced: PerIndex<BTreeMap<usize, Label>>, free: Option<PerIndex<Vec<Label>>> },
}

#[derive(Clone, Debug)]
pub struct RamseyBase {
    pub family: GraphFamily,
    pub alphabet: PerIndex<Vec<Label>>,
    pub admissible: Admissible,
}

impl RamseyBase {
    pub fn maximal(family: GraphFamily, alphabet: Vec<Label>) -> Self {
        Self { family, alphabet: PerIndex::Constant(alphabet), admissible: Admissible::Maximal }
    }
}

/// Coloured targets per index. A target whose colouring uses a label outside
/// `A_i` cannot occur at index `i` and is inactive there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamseySymbol {
    pub targets: PerIndex<Vec<LabeledTarget>>,
}

impl RamseySymbol {
    pub fn uniform(targets: Vec<LabeledTarget>) -> Self {
        Self { targets: PerIndex::Constant(targets) }
    }
}

/// Labels `"0"`, `"1"`, ... `"m-1"`.
pub fn numeric_labels(m: usize) -> Vec<Label> {
    (0..m).map(|c| c.to_string()).collect()
}

/// `R(z_1, ..., z_m)`: complete family `G_i = K_i`, maximal base over
/// `{"0", ..., "m-1"}`, target `K_{z_c}` monochromatic in colour `c`.
pub fn classical_instance(z: &[usize]) -> Result<(RamseyBase, RamseySymbol), EngineError> {
    let labels = numeric_labels(z.len());
    let targets = z
        .iter()
        .zip(&labels)
        .map(|(&n, l)| {
            let g = crate::graph::complete_graph(n).map_err(IndicatorError::from)?;
            Ok(LabeledTarget::monochromatic(g, l.clone()))
        })
        .collect::<Result<Vec<_>, EngineError>>()?;
    Ok((RamseyBase::maximal(GraphFamily::complete(0), labels), RamseySymbol::uniform(targets)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Direct,
    Algebraic,
    /// Run both and treat any disagreement as a hard error.
    Both,
}

/// How alphabets are injected into fields for the algebraic backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjectionPolicy {
    /// Smallest field with at least `|A_i|` elements, labels in code order.
    Canonical,
    /// A fixed field, labels in code order.
    CanonicalIn(FieldSpec),
    Explicit(PerIndex<AlphabetInjection>),
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Largest admissible set an arrows call may scan.
    pub max_points: u128,
    pub workers: usize,
    /// Witnesses reported per false index.
    pub witness_limit: usize,
    pub backend: Backend,
    pub injection: InjectionPolicy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            max_points: DEFAULT_MAX_POINTS,
            workers: 1,
            witness_limit: 1,
            backend: Backend::Both,
            injection: InjectionPolicy::Canonical,
        }
    }
}

enum LevelSource {
    Product(Vec<Vec<usize>>),
    Explicit(Vec<Vec<usize>>),
}

/// One index of an instance, resolved to label indices.
struct Level {
    index: usize,
    host: Graph,
    alphabet: Vec<Label>,
    targets: Vec<(Graph, Vec<usize>)>,
    inactive: usize,
    source: LevelSource,
}

impl Level {
    fn points(&self) -> u128 {
        match &self.source {
            LevelSource::Product(c) => product_size(c),
            LevelSource::Explicit(l) => l.len() as u128,
        }
    }

    fn labels(&self, coloring: &[usize]) -> Vec<Label> {
        coloring.iter().map(|&l| self.alphabet[l].clone()).collect()
    }
}

fn alphabet_at(base: &RamseyBase, i: usize) -> Result<&Vec<Label>, EngineError> {
    base.alphabet.at(i).ok_or(EngineError::MissingIndex { index: i, what: "alphabet" })
}

fn targets_at(symbol: &RamseySymbol, i: usize) -> Result<&Vec<LabeledTarget>, EngineError> {
    symbol.targets.at(i).ok_or(EngineError::MissingIndex { index: i, what: "symbol targets" })
}

fn resolve_level(base: &RamseyBase, symbol: &RamseySymbol, i: usize) -> Result<Level, EngineError> {
    let host = base.family.member(i)?;
    let alphabet = alphabet_at(base, i)?.clone();
    let mut pos: HashMap<&str, usize> = HashMap::with_capacity(alphabet.len());
    for (r, l) in alphabet.iter().enumerate() {
        if pos.insert(l.as_str(), r).is_some() {
            return Err(EngineError::DuplicateLabel { index: i, label: l.clone() });
        }
    }
    let lookup = |context: &dyn Fn() -> String, l: &Label| {
        pos.get(l.as_str())
            .copied()
            .ok_or_else(|| EngineError::UnknownLabel { index: i, context: context(), label: l.clone() })
    };
    let check_len = |context: String, expected: usize, got: usize| {
        if expected == got {
            Ok(())
        } else {
            Err(EngineError::ColoringLength { index: i, context, expected, got })
        }
    };

    let mut targets = Vec::new();
    let mut inactive = 0;
    for (j, t) in targets_at(symbol, i)?.iter().enumerate() {
        check_len(format!("target {j}"), t.graph.edge_count(), t.coloring.len())?;
        match t.coloring.iter().map(|l| pos.get(l.as_str()).copied()).collect::<Option<Vec<_>>>() {
            Some(c) => targets.push((t.graph.clone(), c)),
            None => inactive += 1,
        }
    }

    let m = host.edge_count();
    let source = match &base.admissible {
        Admissible::Maximal => LevelSource::Product(vec![(0..alphabet.len()).collect(); m]),
        Admissible::Explicit(per) => {
            let list = per.at(i).ok_or(EngineError::MissingIndex { index: i, what: "admissible colourings" })?;
            let mut out = Vec::with_capacity(list.len());
            for (n, c) in list.iter().enumerate() {
                check_len(format!("admissible colouring {n}"), m, c.len())?;
                out.push(c.iter().map(|l| lookup(&|| format!("admissible colouring {n}"), l)).collect::<Result<_, _>>()?);
            }
            LevelSource::Explicit(out)
        }
        Admissible::Generated { forced, free } => {
            let free: Vec<usize> = match free.as_ref().map(|f| f.at(i)) {
                Some(Some(values)) => values.iter().map(|l| lookup(&|| "free value set".into(), l)).collect::<Result<_, _>>()?,
                Some(None) => return Err(EngineError::MissingIndex { index: i, what: "free value set" }),
                None => (0..alphabet.len()).collect(),
            };
            let mut choices = vec![free; m];
            if let Some(f) = forced.at(i) {
                for (&e, l) in f {
                    if e >= m {
                        return Err(EngineError::ForcedEdgeOutOfRange { index: i, edge: e, edges: m });
                    }
                    choices[e] = vec![lookup(&|| format!("forced edge {e}"), l)?];
                }
            }
            LevelSource::Product(choices)
        }
    };
    Ok(Level { index: i, host, alphabet, targets, inactive, source })
}

/// Result of one arrows computation.
#[derive(Clone, Debug)]
pub struct ArrowsOutcome {
    pub index: usize,
    pub arrows: bool,
    /// Admissible colourings with no coloured target, lexicographically least first.
    pub witnesses: Vec<Vec<Label>>,
    pub points: u128,
    pub source: &'static str,
    /// Targets dropped at this index because their colours are not in `A_i`.
    pub inactive_targets: usize,
    pub injection: Option<AlphabetInjection>,
}

fn direct_scan(level: &Level, limit: usize, workers: usize) -> Vec<Vec<usize>> {
    match &level.source {
        LevelSource::Product(choices) => {
            let mut buckets: Vec<Vec<Vec<(usize, usize)>>> = vec![Vec::new(); level.host.edge_count()];
            for (g, col) in &level.targets {
                for emb in enumerate_embeddings(g, &level.host) {
                    let occ: Vec<(usize, usize)> = emb.edge_map.iter().copied().zip(col.iter().copied()).collect();
                    match occ.iter().map(|&(e, _)| e).max() {
                        Some(last) => buckets[last].push(occ),
                        // An edgeless target that embeds occurs in every colouring.
                        None => return Vec::new(),
                    }
                }
            }
            let viable = |e: usize, prefix: &[usize]| {
                !buckets[e].iter().any(|occ| occ.iter().all(|&(he, l)| prefix[he] == l))
            };
            lex_search(choices, &viable, limit, workers)
        }
        LevelSource::Explicit(list) => list
            .iter()
            .filter(|c| {
                !level.targets.iter().any(|(g, col)| find_colored_occurrence(g, col, &level.host, c).is_some())
            })
            .take(limit)
            .cloned()
            .collect(),
    }
}

fn injection_for(level: &Level, policy: &InjectionPolicy) -> Result<AlphabetInjection, EngineError> {
    let inj = match policy {
        InjectionPolicy::Canonical => {
            inject_alphabet(&level.alphabet, &FieldSpec::smallest_with_order_at_least(level.alphabet.len())?)?
        }
        InjectionPolicy::CanonicalIn(f) => inject_alphabet(&level.alphabet, f)?,
        InjectionPolicy::Explicit(per) => per
            .at(level.index)
            .ok_or(EngineError::MissingIndex { index: level.index, what: "alphabet injection" })?
            .clone(),
    };
    if inj.len() != level.alphabet.len() {
        return Err(EngineError::InjectionSize { index: level.index, expected: level.alphabet.len(), got: inj.len() });
    }
    Ok(inj)
}

fn algebraic_scan(
    level: &Level,
    inj: &AlphabetInjection,
    limit: usize,
    workers: usize,
) -> Result<Vec<Vec<usize>>, EngineError> {
    let field = inj.field();
    let targets: Vec<ColoredTarget> = level
        .targets
        .iter()
        .map(|(g, col)| ColoredTarget::new(g.clone(), col.iter().map(|&l| inj.image(l)).collect()))
        .collect();
    let expr = build_indicator(&level.host, &targets, field)?;
    let to_field = |c: &Vec<usize>| c.iter().map(|&l| inj.image(l)).collect::<Vec<_>>();
    let source = match &level.source {
        LevelSource::Product(choices) => ColoringSource::Product(choices.iter().map(to_field).collect()),
        LevelSource::Explicit(list) => ColoringSource::Explicit(list.iter().map(|c| Coloring(to_field(c))).collect()),
    };
    let found = enumerate_nonvanishing(&expr, &source, limit, workers)?;
    Ok(found
        .into_iter()
        .map(|c| c.0.iter().map(|&a| inj.preimage(a).expect("scan stays inside the image")).collect())
        .collect())
}

/// Cross-checks a direct witness against the indicator.
fn indicator_value_is_nonzero(level: &Level, inj: &AlphabetInjection, coloring: &[usize]) -> Result<bool, EngineError> {
    let targets: Vec<ColoredTarget> = level
        .targets
        .iter()
        .map(|(g, col)| ColoredTarget::new(g.clone(), col.iter().map(|&l| inj.image(l)).collect()))
        .collect();
    let expr = build_indicator(&level.host, &targets, inj.field())?;
    let rho = Coloring(coloring.iter().map(|&l| inj.image(l)).collect());
    Ok(!evaluate(&expr, &rho)?.is_zero())
}

fn arrows_level(level: &Level, backend: Backend, config: &EngineConfig) -> Result<ArrowsOutcome, EngineError> {
    let points = level.points();
    if points > config.max_points {
        return Err(EngineError::CapacityExceeded { index: level.index, needed: points, bound: config.max_points });
    }
    let limit = config.witness_limit.max(1);
    let workers = config.workers.max(1);
    let (witnesses, source, injection) = match backend {
        Backend::Direct => (direct_scan(level, limit, workers), "direct", None),
        Backend::Algebraic => {
            let inj = injection_for(level, &config.injection)?;
            (algebraic_scan(level, &inj, limit, workers)?, "algebraic", Some(inj))
        }
        Backend::Both => {
            let inj = injection_for(level, &config.injection)?;
            let direct = direct_scan(level, limit, workers);
            let algebraic = algebraic_scan(level, &inj, limit, workers)?;
            if direct != algebraic {
                let (coloring, d, a) = match (direct.first(), algebraic.first()) {
                    (Some(c), None) => (c.clone(), false, true),
                    (None, Some(c)) => (c.clone(), true, false),
                    (Some(c), Some(_)) => (c.clone(), false, false),
                    (None, None) => unreachable!("equal when both empty"),
                };
                return Err(EngineError::BackendDisagreement {
                    index: level.index,
                    direct: d,
                    algebraic: a,
                    coloring: level.labels(&coloring),
                });
            }
            if let Some(w) = direct.first() {
                if !indicator_value_is_nonzero(level, &inj, w)? {
                    return Err(EngineError::BackendDisagreement {
                        index: level.index,
                        direct: false,
                        algebraic: true,
                        coloring: level.labels(w),
                    });
                }
            }
            (direct, "direct+algebraic", Some(inj))
        }
    };
    Ok(ArrowsOutcome {
        index: level.index,
        arrows: witnesses.is_empty(),
        witnesses: witnesses.iter().map(|w| level.labels(w)).collect(),
        points,
        source,
        inactive_targets: level.inactive,
        injection,
    })
}

/// `G_i -> (X, C)_i`: every admissible colouring of `G_i` contains some
/// coloured target. When false, up to `config.witness_limit` counterexample
/// colourings are returned in lexicographic order.
pub fn arrows(
    base: &RamseyBase,
    symbol: &RamseySymbol,
    i: usize,
    backend: Backend,
    config: &EngineConfig,
) -> Result<ArrowsOutcome, EngineError> {
    arrows_level(&resolve_level(base, symbol, i)?, backend, config)
}

/// Definitional flags, evaluated on a finite index range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub locally_finite: bool,
    pub finite_type: bool,
    pub maximal: bool,
    pub uniform: bool,
    pub exact: bool,
    pub galois_type: bool,
    pub family_hereditary: bool,
    pub symbol_hereditary: bool,
    /// Least index of the resolution `G_{>=k}`, uniform symbols only.
    pub resolution_index: Option<usize>,
    /// `|A|` when all alphabets coincide.
    pub alphabet_size: Option<usize>,
}

impl Classification {
    /// Maximal base of finite type, uniform symbol, hereditary family: arrows
    /// at one index then holds at every later one, so a candidate is exact.
    pub fn monotone(&self) -> bool {
        self.maximal && self.finite_type && self.uniform && self.family_hereditary
    }
}

fn all_equal<T: PartialEq>(items: &[&T]) -> bool {
    items.windows(2).all(|w| w[0] == w[1])
}

pub fn classify(
    base: &RamseyBase,
    symbol: &RamseySymbol,
    range: RangeInclusive<usize>,
) -> Result<Classification, EngineError> {
    let alphabets = range.clone().map(|i| alphabet_at(base, i)).collect::<Result<Vec<_>, _>>()?;
    let targets = range.clone().map(|i| targets_at(symbol, i)).collect::<Result<Vec<_>, _>>()?;
    let finite_type = all_equal(&alphabets);
    let nested = alphabets.windows(2).all(|w| w[0].iter().all(|l| w[1].contains(l)));
    let uniform = nested && all_equal(&targets);
    let alphabet_size = if finite_type { alphabets.first().map(|a| a.len()) } else { None };
    let galois_type = finite_type && uniform && alphabet_size.and_then(|n| prime_power(n as u64)).is_some();
    let family_hereditary = check_hereditary_prefix(&base.family, range.clone()).is_ok();
    let symbol_hereditary = uniform
        || targets.windows(2).all(|w| {
            let a = Graph::disjoint_union(w[0].iter().map(|t| &t.graph));
            let b = Graph::disjoint_union(w[1].iter().map(|t| &t.graph));
            embeds(&a, &b)
        });
    let resolution_index = match (uniform, targets.first()) {
        (true, Some(ts)) => {
            let graphs: Vec<Graph> = ts.iter().map(|t| t.graph.clone()).collect();
            resolve(&base.family, &graphs, *range.end())?
        }
        _ => None,
    };
    Ok(Classification {
        locally_finite: true,
        finite_type,
        maximal: base.admissible == Admissible::Maximal,
        uniform,
        exact: uniform && resolution_index == Some(*range.start()),
        galois_type,
        family_hereditary,
        symbol_hereditary,
        resolution_index,
        alphabet_size,
    })
}

/// Least `k <= horizon` such that some single target embeds in every `G_t`,
/// `k <= t <= horizon`; `None` if there is no such `k`.
pub fn resolve(family: &GraphFamily, targets: &[Graph], horizon: usize) -> Result<Option<usize>, FamilyError> {
    let first = family.first_index();
    let last = family.last_index().map_or(horizon, |l| l.min(horizon));
    if targets.is_empty() || last < first {
        return Ok(None);
    }
    let members = family.members(first..=last)?;
    let mut best: Option<usize> = None;
    for x in targets {
        let mut k = None;
        for (offset, g) in members.iter().enumerate().rev() {
            if !embeds(x, g) {
                break;
            }
            k = Some(first + offset);
        }
        if let Some(k) = k {
            best = Some(best.map_or(k, |b| b.min(k)));
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub index: usize,
    pub arrows: bool,
    pub source: &'static str,
    pub points: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub index: usize,
    pub coloring: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ImageRecord {
    pub label: Label,
    /// Coefficient vector of the image, lowest degree first.
    pub element: Vec<u32>,
}

/// The alphabet injection used on a run of consecutive indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InjectionRecord {
    pub indices: [usize; 2],
    pub field: FieldSpecJson,
    pub labels: usize,
    pub rule: &'static str,
    /// Listed only when the injection is not the code-order default.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub images: Option<Vec<ImageRecord>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convention {
    pub family: String,
    pub index_offset: usize,
    pub index_rule: String,
    pub injections: Vec<InjectionRecord>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Soundness {
    Exact,
    HorizonConditional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Found,
    NotFoundWithinHorizon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub classification: Classification,
    pub first_index: usize,
    pub horizon: usize,
    pub arrows_trace: Vec<TraceEntry>,
    /// Least searched `n` with arrows true at every searched `t >= n`.
    pub candidate_value: Option<usize>,
    pub status: SearchStatus,
    /// Least searched index where arrows holds.
    pub i_k: Option<usize>,
    /// One past the largest searched index where arrows fails (the first
    /// index when it never fails); absent when it fails at the horizon.
    pub i_m_plus_1: Option<usize>,
    pub soundness: Soundness,
    pub witnesses: Vec<Witness>,
    pub convention: Convention,
}

impl SearchReport {
    pub fn trace_values(&self) -> Vec<(usize, bool)> {
        self.arrows_trace.iter().map(|e| (e.index, e.arrows)).collect()
    }
}

struct InjectionLog {
    records: Vec<InjectionRecord>,
    last: Option<(Vec<Label>, AlphabetInjection)>,
}

impl InjectionLog {
    fn push(&mut self, index: usize, alphabet: &[Label], inj: &AlphabetInjection) {
        if let (Some((labels, prev)), Some(rec)) = (&self.last, self.records.last_mut()) {
            if labels.as_slice() == alphabet && prev == inj && rec.indices[1] + 1 == index {
                rec.indices[1] = index;
                return;
            }
        }
        let field = inj.field();
        let canonical = inj.images().iter().enumerate().all(|(r, a)| a.code() as usize == r);
        self.records.push(InjectionRecord {
            indices: [index, index],
            field: FieldSpecJson::from(field),
            labels: alphabet.len(),
            rule: if canonical { "r-th label -> r-th field element (code order)" } else { "explicit" },
            images: (!canonical).then(|| {
                alphabet
                    .iter()
                    .zip(inj.images())
                    .map(|(l, &a)| ImageRecord { label: l.clone(), element: field.coefficients(a) })
                    .collect()
            }),
        });
        self.last = Some((alphabet.to_vec(), inj.clone()));
    }
}

/// Computes arrows on every index from the family's first index up to
/// `horizon` and reports the least index from which it holds throughout.
///
/// Indices whose admissible set exceeds `config.max_points` are refused,
/// except in the monotone configuration after arrows has already held, where
/// they are recorded as implied.
pub fn ramsey_number(
    base: &RamseyBase,
    symbol: &RamseySymbol,
    horizon: usize,
    config: &EngineConfig,
) -> Result<SearchReport, EngineError> {
    let first = base.family.first_index();
    let mut notes = Vec::new();
    let horizon = match base.family.last_index() {
        Some(last) if last < horizon => {
            notes.push(format!("horizon clipped to the last family index {last}"));
            last
        }
        _ => horizon,
    };
    if horizon < first {
        return Err(EngineError::HorizonBeforeStart { horizon, first });
    }
    let classification = classify(base, symbol, first..=horizon)?;
    let monotone = classification.monotone();

    let mut trace = Vec::new();
    let mut witnesses = Vec::new();
    let mut log = InjectionLog { records: Vec::new(), last: None };
    let mut inactive_at = Vec::new();
    for i in first..=horizon {
        let level = resolve_level(base, symbol, i)?;
        let points = level.points();
        if points > config.max_points && monotone && trace.iter().any(|e: &TraceEntry| e.arrows) {
            trace.push(TraceEntry { index: i, arrows: true, source: "implied_monotone", points });
            continue;
        }
        let out = arrows_level(&level, config.backend, config)?;
        if let Some(inj) = &out.injection {
            log.push(i, &level.alphabet, inj);
        }
        if out.inactive_targets > 0 {
            inactive_at.push(i);
        }
        witnesses.extend(out.witnesses.into_iter().map(|coloring| Witness { index: i, coloring }));
        trace.push(TraceEntry { index: i, arrows: out.arrows, source: out.source, points });
    }

    let candidate_value = trace.iter().rev().take_while(|e| e.arrows).last().map(|e| e.index);
    let i_k = trace.iter().find(|e| e.arrows).map(|e| e.index);
    let i_m_plus_1 = match trace.iter().rev().find(|e| !e.arrows) {
        Some(e) if e.index < horizon => Some(e.index + 1),
        Some(_) => None,
        None => Some(first),
    };
    let soundness = if monotone && candidate_value.is_some() && i_k == i_m_plus_1 {
        Soundness::Exact
    } else {
        Soundness::HorizonConditional
    };
    if !inactive_at.is_empty() {
        notes.push(format!("targets with colours outside A_i are inactive at indices {inactive_at:?}"));
    }
    if soundness == Soundness::HorizonConditional {
        notes.push("results hold on the searched range only; nothing is claimed beyond the horizon".into());
    }
    if trace.iter().any(|e| e.source == "implied_monotone") {
        notes.push("implied_monotone entries exceed the capacity bound and follow from an earlier true index".into());
    }
    Ok(SearchReport {
        classification,
        first_index: first,
        horizon,
        arrows_trace: trace,
        candidate_value,
        status: if candidate_value.is_some() { SearchStatus::Found } else { SearchStatus::NotFoundWithinHorizon },
        i_k,
        i_m_plus_1,
        soundness,
        witnesses,
        convention: Convention {
            family: base.family.tag(),
            index_offset: base.family.index_offset(),
            index_rule: base.family.index_rule(),
            injections: log.records,
            notes,
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolutionCheck {
    pub resolution_index: Option<usize>,
    pub full_candidate: Option<usize>,
    pub resolved_candidate: Option<usize>,
    pub agrees: bool,
}

/// Computes the number on the base and on its resolution and compares the
/// candidates and the arrows traces on the common range. Without a
/// resolution inside the horizon the check is vacuous.
pub fn resolution_invariance_check(
    base: &RamseyBase,
    symbol: &RamseySymbol,
    horizon: usize,
    config: &EngineConfig,
) -> Result<ResolutionCheck, EngineError> {
    let first = base.family.first_index();
    let class = classify(base, symbol, first..=horizon.max(first))?;
    if !class.uniform {
        return Err(EngineError::NotUniform);
    }
    let Some(k) = class.resolution_index else {
        return Ok(ResolutionCheck { resolution_index: None, full_candidate: None, resolved_candidate: None, agrees: true });
    };
    let full = ramsey_number(base, symbol, horizon, config)?;
    let resolved_base = RamseyBase { family: base.family.truncated(k), ..base.clone() };
    let resolved = ramsey_number(&resolved_base, symbol, horizon, config)?;
    let common: Vec<(usize, bool)> = full.trace_values().into_iter().filter(|&(i, _)| i >= k).collect();
    Ok(ResolutionCheck {
        resolution_index: Some(k),
        full_candidate: full.candidate_value,
        resolved_candidate: resolved.candidate_value,
        agrees: full.candidate_value == resolved.candidate_value && common == resolved.trace_values(),
    })
}

/// Relabels an instance through per-index injections `A_i -> GF(q_i)`.
///
/// The image alphabet at `i` is all of `GF(q_i)`, named by
/// [`FieldSpec::format`]; admissible colourings are the images of the
/// original ones, so a maximal base stays maximal only where the injection is
/// onto. Targets inactive at `i` are dropped there.
pub fn embed_alphabet(
    base: &RamseyBase,
    symbol: &RamseySymbol,
    injections: &PerIndex<AlphabetInjection>,
    range: RangeInclusive<usize>,
) -> Result<(RamseyBase, RamseySymbol), EngineError> {
    let mut alphabets = BTreeMap::new();
    let mut targets = BTreeMap::new();
    let mut images = BTreeMap::new();
    let mut explicit = BTreeMap::new();
    let mut forced_out = BTreeMap::new();
    let mut free_out = BTreeMap::new();
    let mut onto = true;
    for i in range {
        let inj = injections.at(i).ok_or(EngineError::MissingIndex { index: i, what: "alphabet injection" })?;
        let alphabet = alphabet_at(base, i)?;
        if inj.len() != alphabet.len() {
            return Err(EngineError::InjectionSize { index: i, expected: alphabet.len(), got: inj.len() });
        }
        let field = inj.field();
        let name: HashMap<&str, Label> = alphabet
            .iter()
            .enumerate()
            .map(|(r, l)| (l.as_str(), field.format(inj.image(r))))
            .collect();
        let rename = |context: &str, l: &Label| {
            name.get(l.as_str()).cloned().ok_or_else(|| EngineError::UnknownLabel {
                index: i,
                context: context.into(),
                label: l.clone(),
            })
        };
        onto &= inj.len() == field.order() as usize;
        alphabets.insert(i, field.all_elements().into_iter().map(|a| field.format(a)).collect::<Vec<_>>());
        let image_labels: Vec<Label> = alphabet.iter().map(|l| name[l.as_str()].clone()).collect();
        let ts: Vec<LabeledTarget> = targets_at(symbol, i)?
            .iter()
            .filter_map(|t| {
                let c: Option<Vec<Label>> = t.coloring.iter().map(|l| name.get(l.as_str()).cloned()).collect();
                c.map(|c| LabeledTarget::new(t.graph.clone(), c))
            })
            .collect();
        targets.insert(i, ts);
        match &base.admissible {
            Admissible::Maximal => {}
            Admissible::Explicit(per) => {
                let list = per.at(i).ok_or(EngineError::MissingIndex { index: i, what: "admissible colourings" })?;
                let mapped = list
                    .iter()
                    .map(|c| c.iter().map(|l| rename("admissible colouring", l)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                explicit.insert(i, mapped);
            }
            Admissible::Generated { forced, free } => {
                if let Some(f) = forced.at(i) {
                    let mapped = f
                        .iter()
                        .map(|(&e, l)| Ok((e, rename("forced edge", l)?)))
                        .collect::<Result<BTreeMap<_, _>, EngineError>>()?;
                    forced_out.insert(i, mapped);
                }
                let values = match free.as_ref().map(|f| f.at(i)) {
                    Some(Some(v)) => v.iter().map(|l| rename("free value set", l)).collect::<Result<Vec<_>, _>>()?,
                    Some(None) => return Err(EngineError::MissingIndex { index: i, what: "free value set" }),
                    None => image_labels.clone(),
                };
                free_out.insert(i, values);
            }
        }
        images.insert(i, image_labels);
    }
    let admissible = match &base.admissible {
        Admissible::Maximal if onto => Admissible::Maximal,
        Admissible::Maximal => {
            Admissible::Generated { forced: PerIndex::Indexed(BTreeMap::new()), free: Some(PerIndex::Indexed(images)) }
        }
        Admissible::Explicit(_) => Admissible::Explicit(PerIndex::Indexed(explicit)),
        Admissible::Generated { .. } => {
            Admissible::Generated { forced: PerIndex::Indexed(forced_out), free: Some(PerIndex::Indexed(free_out)) }
        }
    };
    Ok((
        RamseyBase { family: base.family.clone(), alphabet: PerIndex::Indexed(alphabets), admissible },
        RamseySymbol { targets: PerIndex::Indexed(targets) },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph};

    fn k(n: usize) -> Graph {
        complete_graph(n).unwrap()
    }

    #[test]
    fn k4_is_not_arrowing_and_reports_the_worked_coloring() {
        let (base, symbol) = classical_instance(&[3, 3]).unwrap();
        let config = EngineConfig { witness_limit: usize::MAX, ..Default::default() };
        let out = arrows(&base, &symbol, 4, Backend::Both, &config).unwrap();
        assert!(!out.arrows);
        let rho: Vec<Label> = ["1", "1", "0", "0", "1", "0"].iter().map(|s| s.to_string()).collect();
        assert!(out.witnesses.contains(&rho));
        assert_eq!(out.witnesses.len(), 18);
    }

    #[test]
    fn classical_r33() {
        let (base, symbol) = classical_instance(&[3, 3]).unwrap();
        let report = ramsey_number(&base, &symbol, 8, &EngineConfig::default()).unwrap();
        assert_eq!(report.candidate_value, Some(6));
        assert_eq!(report.soundness, Soundness::Exact);
        assert_eq!(report.i_k, Some(6));
        assert_eq!(report.i_m_plus_1, Some(6));
        assert_eq!(report.arrows_trace.last().unwrap().source, "implied_monotone");
        assert_eq!(report.classification.resolution_index, Some(3));
        assert!(report.classification.galois_type);
        assert!(!report.classification.exact);
    }

    #[test]
    fn two_colour_edge_targets() {
        let (base, symbol) = classical_instance(&[2, 2]).unwrap();
        let report = ramsey_number(&base, &symbol, 4, &EngineConfig::default()).unwrap();
        assert_eq!(report.candidate_value, Some(2));
    }

    #[test]
    fn unreachable_targets() {
        let base = RamseyBase::maximal(
            GraphFamily::explicit((1..=5).map(k).collect()),
            numeric_labels(2),
        );
        let symbol = RamseySymbol::uniform(vec![LabeledTarget::monochromatic(k(7), "0")]);
        let report = ramsey_number(&base, &symbol, 10, &EngineConfig::default()).unwrap();
        assert_eq!(report.horizon, 4);
        assert_eq!(report.candidate_value, None);
        assert_eq!(report.status, SearchStatus::NotFoundWithinHorizon);
        assert_eq!(report.soundness, Soundness::HorizonConditional);
    }

    #[test]
    fn capacity_refusal_outside_monotone_case() {
        let (base, symbol) = classical_instance(&[3, 3]).unwrap();
        let config = EngineConfig { max_points: 1 << 10, ..Default::default() };
        let err = ramsey_number(&base, &symbol, 8, &config).unwrap_err();
        assert!(matches!(err, EngineError::CapacityExceeded { index: 6, .. }));
    }

    #[test]
    fn classify_examples() {
        let fam = GraphFamily::complete(0);
        let growing = RamseyBase {
            family: fam.clone(),
            alphabet: PerIndex::indexed((1..=5).map(|i| (i, numeric_labels(i * (i - 1) / 2)))),
            admissible: Admissible::Maximal,
        };
        let symbol = RamseySymbol::uniform(vec![]);
        let c = classify(&growing, &symbol, 1..=5).unwrap();
        assert!(c.locally_finite && !c.finite_type);
        let six = RamseyBase::maximal(fam, numeric_labels(6));
        let c = classify(&six, &symbol, 1..=4).unwrap();
        assert!(c.finite_type && !c.galois_type);
    }

    #[test]
    fn resolve_examples() {
        let fam = GraphFamily::complete(0);
        assert_eq!(resolve(&fam, &[k(6), k(40)], 10).unwrap(), Some(6));
        assert_eq!(resolve(&fam, &[k(1)], 10).unwrap(), Some(1));
        assert_eq!(resolve(&GraphFamily::path(0), &[path_graph(3).unwrap()], 10).unwrap(), Some(3));
        assert_eq!(resolve(&fam, &[k(12)], 10).unwrap(), None);
    }

    #[test]
    fn resolution_invariance_on_r33() {
        let (base, symbol) = classical_instance(&[3, 3]).unwrap();
        let check = resolution_invariance_check(&base, &symbol, 7, &EngineConfig::default()).unwrap();
        assert_eq!(check.resolution_index, Some(3));
        assert!(check.agrees);
    }

    #[test]
    fn embedding_into_larger_field_keeps_value() {
        let labels: Vec<Label> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let base = RamseyBase::maximal(GraphFamily::complete(0), labels.clone());
        let symbol = RamseySymbol::uniform(
            labels.iter().map(|l| LabeledTarget::monochromatic(k(2), l.clone())).collect(),
        );
        let f = FieldSpec::new(2, 2).unwrap();
        let e = |c: u64| f.element(c).unwrap();
        let config = EngineConfig::default();
        let plain = ramsey_number(&base, &symbol, 4, &config).unwrap();
        for images in [vec![e(0), e(1), e(2)], vec![e(3), e(1), e(0)]] {
            let inj = AlphabetInjection::new(f.clone(), images).unwrap();
            let (b2, s2) = embed_alphabet(&base, &symbol, &PerIndex::Constant(inj), 1..=4).unwrap();
            let c2 = classify(&b2, &s2, 1..=4).unwrap();
            assert!(c2.galois_type);
            let image = ramsey_number(&b2, &s2, 4, &config).unwrap();
            assert_eq!(image.candidate_value, plain.candidate_value);
            assert_eq!(image.trace_values(), plain.trace_values());
        }
    }

    #[test]
    fn explicit_and_generated_admissible_sets() {
        let base = RamseyBase {
            family: GraphFamily::complete(0),
            alphabet: PerIndex::Constant(numeric_labels(2)),
            admissible: Admissible::Generated {
                forced: PerIndex::indexed([(3, BTreeMap::from([(0, "1".to_string())]))]),
                free: None,
            },
        };
        let symbol = RamseySymbol::uniform(vec![LabeledTarget::monochromatic(k(2), "1")]);
        let out = arrows(&base, &symbol, 3, Backend::Both, &EngineConfig::default()).unwrap();
        assert!(out.arrows);
        let out = arrows(&base, &symbol, 2, Backend::Both, &EngineConfig::default()).unwrap();
        assert_eq!(out.witnesses, vec![vec!["0".to_string()]]);

        let explicit = RamseyBase {
            admissible: Admissible::Explicit(PerIndex::indexed([(3, vec![numeric_labels(3)])])),
            family: GraphFamily::complete(0),
            alphabet: PerIndex::Constant(numeric_labels(3)),
        };
        let symbol = RamseySymbol::uniform(vec![LabeledTarget::new(path_graph(1).unwrap(), vec!["2".into()])]);
        assert!(arrows(&explicit, &symbol, 3, Backend::Both, &EngineConfig::default()).unwrap().arrows);
        assert!(matches!(
            arrows(&explicit, &symbol, 2, Backend::Both, &EngineConfig::default()),
            Err(EngineError::MissingIndex { .. })
        ));
    }

    #[test]
    fn inactive_targets_are_dropped() {
        let base = RamseyBase::maximal(GraphFamily::complete(0), numeric_labels(2));
        let symbol = RamseySymbol::uniform(vec![LabeledTarget::monochromatic(k(2), "7")]);
        let out = arrows(&base, &symbol, 2, Backend::Both, &EngineConfig::default()).unwrap();
        assert!(!out.arrows);
        assert_eq!(out.inactive_targets, 1);
    }

    #[test]
    fn unknown_labels_are_rejected() {
        let base = RamseyBase {
            family: GraphFamily::complete(0),
            alphabet: PerIndex::Constant(numeric_labels(2)),
            admissible: Admissible::Explicit(PerIndex::Constant(vec![vec!["5".into()]])),
        };
        let symbol = RamseySymbol::uniform(vec![]);
        assert!(matches!(
            arrows(&base, &symbol, 2, Backend::Direct, &EngineConfig::default()),
            Err(EngineError::UnknownLabel { .. })
        ));
    }
}

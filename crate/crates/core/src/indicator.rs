//! Subgraph-colouring indicator polynomials over GF(q).
//!
//! For a host `G` and coloured targets `(X_j, ψ_j)` the indicator is
//!
//! ```text
//! p(x) = Π_j Π_{π ∈ G/X_j} ( 1 - Π_{e ∈ X_j} (1 - (x_{π(e)} - ψ_j(e))^(q-1)) )
//! ```
//!
//! and vanishes at a colouring exactly when some coloured target occurs in it.
//! Expressions are kept unexpanded, one term per `(j, π)`, and evaluated
//! lazily. [`expand_reduced`] produces the canonical representative modulo
//! the field ideal `⟨x_e^q - x_e⟩` when the caller wants the polynomial itself.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldSpec};
use crate::graph::{enumerate_embeddings, EmbeddingMap, Graph, GraphError};
use crate::search::{lex_search, product_size};

/// Default bound on `q^|E|` for [`expand_reduced`].
pub const DEFAULT_TERM_CAPACITY: u128 = 1 << 20;
/// Default bound on the number of points an exhaustive scan may visit.
pub const DEFAULT_MAX_POINTS: u128 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndicatorError {
    #[error("target {target}: coloring has {got} values for {expected} edges")]
    TargetColoringLength { target: usize, expected: usize, got: usize },
    #[error("coloring has {got} values for {expected} host edges")]
    ColoringLength { expected: usize, got: usize },
    #[error("value with code {code} is not an element of GF({order})")]
    OutsideField { code: u32, order: u32 },
    #[error("capacity exceeded: {needed} required, bound {bound}")]
    CapacityExceeded { needed: u128, bound: u128 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

/// A target graph `X_j` with a prescribed colouring `ψ_j` of its edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredTarget {
    pub graph: Graph,
    pub coloring: Vec<FieldElement>,
}

impl ColoredTarget {
    pub fn new(graph: Graph, coloring: Vec<FieldElement>) -> Self {
        Self { graph, coloring }
    }

    /// `(X, a_X)`: every edge coloured `a`.
    pub fn monochromatic(graph: Graph, a: FieldElement) -> Self {
        let coloring = vec![a; graph.edge_count()];
        Self { graph, coloring }
    }
}

/// A colouring of a host's edges, indexed by edge id.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring(pub Vec<FieldElement>);

impl Coloring {
    pub fn values(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn codes(&self) -> Vec<u32> {
        self.0.iter().map(|a| a.code()).collect()
    }
}

/// One `(j, π)` factor: `1 - Π (1 - (x_e - c_e)^(q-1))` over its host edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndicatorTerm {
    pub target: usize,
    pub vertex_map: Vec<usize>,
    /// `(host edge, required value)`, in target edge order.
    pub edges: Vec<(usize, FieldElement)>,
}

#[derive(Clone, Debug)]
pub struct IndicatorExpr {
    host: Graph,
    field: FieldSpec,
    target_count: usize,
    terms: Vec<IndicatorTerm>,
}

impl IndicatorExpr {
    pub fn host(&self) -> &Graph {
        &self.host
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn terms(&self) -> &[IndicatorTerm] {
        &self.terms
    }

    pub fn target_count(&self) -> usize {
        self.target_count
    }

    /// Empty product: the constant 1.
    pub fn is_constant_one(&self) -> bool {
        self.terms.is_empty()
    }

    fn term_value(&self, term: &IndicatorTerm, x: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        let q1 = (f.order() - 1) as u64;
        let inner = term.edges.iter().fold(f.one(), |acc, &(e, c)| {
            let d = f.pow(f.sub(x[e], c), q1);
            f.mul(acc, f.sub(f.one(), d))
        });
        f.sub(f.one(), inner)
    }

    fn check_point(&self, x: &[FieldElement]) -> Result<(), IndicatorError> {
        if x.len() != self.host.edge_count() {
            return Err(IndicatorError::ColoringLength { expected: self.host.edge_count(), got: x.len() });
        }
        check_elements(&self.field, x)
    }
}

fn check_elements(field: &FieldSpec, xs: &[FieldElement]) -> Result<(), IndicatorError> {
    match xs.iter().find(|a| a.code() >= field.order()) {
        Some(a) => Err(IndicatorError::OutsideField { code: a.code(), order: field.order() }),
        None => Ok(()),
    }
}

/// Builds the unexpanded indicator: one term per element of `G/X_j` per target,
/// automorphic repeats included.
pub fn build_indicator(host: &Graph, targets: &[ColoredTarget], field: &FieldSpec) -> Result<IndicatorExpr, IndicatorError> {
    let mut cache: Vec<(&Graph, Vec<EmbeddingMap>)> = Vec::new();
    let mut terms = Vec::new();
    for (j, t) in targets.iter().enumerate() {
        if t.coloring.len() != t.graph.edge_count() {
            return Err(IndicatorError::TargetColoringLength {
                target: j,
                expected: t.graph.edge_count(),
                got: t.coloring.len(),
            });
        }
        check_elements(field, &t.coloring)?;
        let pos = match cache.iter().position(|(g, _)| *g == &t.graph) {
            Some(pos) => pos,
            None => {
                cache.push((&t.graph, enumerate_embeddings(&t.graph, host)));
                cache.len() - 1
            }
        };
        for emb in &cache[pos].1 {
            terms.push(IndicatorTerm {
                target: j,
                vertex_map: emb.vertex_map.clone(),
                edges: emb.edge_map.iter().zip(&t.coloring).map(|(&he, &c)| (he, c)).collect(),
            });
        }
    }
    Ok(IndicatorExpr { host: host.clone(), field: field.clone(), target_count: targets.len(), terms })
}

/// Value of the indicator at `rho`; zero iff some coloured target occurs in `rho`.
pub fn evaluate(expr: &IndicatorExpr, rho: &Coloring) -> Result<FieldElement, IndicatorError> {
    expr.check_point(&rho.0)?;
    let f = &expr.field;
    let mut acc = f.one();
    for term in &expr.terms {
        acc = f.mul(acc, expr.term_value(term, &rho.0));
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// The colourings a scan ranges over. Scans visit points in the source's own
/// order: lexicographic by per-edge choice order for products (edge 0 most
/// significant), list order for explicit sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringSource {
    /// All of `GF(q)^E`, elements in code order.
    All,
    Product(Vec<Vec<FieldElement>>),
    Explicit(Vec<Coloring>),
}

impl ColoringSource {
    pub fn point_count(&self, expr: &IndicatorExpr) -> u128 {
        match self {
            ColoringSource::All => {
                (expr.field.order() as u128).saturating_pow(expr.host.edge_count() as u32)
            }
            ColoringSource::Product(c) => product_size(c),
            ColoringSource::Explicit(list) => list.len() as u128,
        }
    }
}

/// First point of `source` where the indicator is nonzero, or `None` if it
/// vanishes on all of `source`.
pub fn find_nonvanishing(
    expr: &IndicatorExpr,
    source: &ColoringSource,
    workers: usize,
) -> Result<Option<Coloring>, IndicatorError> {
    Ok(enumerate_nonvanishing(expr, source, 1, workers)?.into_iter().next())
}

/// Up to `limit` nonvanishing points of `source`, in scan order.
pub fn enumerate_nonvanishing(
    expr: &IndicatorExpr,
    source: &ColoringSource,
    limit: usize,
    workers: usize,
) -> Result<Vec<Coloring>, IndicatorError> {
    let choices = match source {
        ColoringSource::All => vec![expr.field.all_elements(); expr.host.edge_count()],
        ColoringSource::Product(c) => {
            if c.len() != expr.host.edge_count() {
                return Err(IndicatorError::ColoringLength { expected: expr.host.edge_count(), got: c.len() });
            }
            for col in c {
                check_elements(&expr.field, col)?;
            }
            c.clone()
        }
        ColoringSource::Explicit(list) => {
            let mut out = Vec::new();
            for rho in list {
                if out.len() >= limit {
                    break;
                }
                if !evaluate(expr, rho)?.is_zero() {
                    out.push(rho.clone());
                }
            }
            return Ok(out);
        }
    };

    // A term with no edges is the constant 0.
    if expr.terms.iter().any(|t| t.edges.is_empty()) {
        return Ok(Vec::new());
    }
    let mut buckets: Vec<Vec<&IndicatorTerm>> = vec![Vec::new(); expr.host.edge_count()];
    for t in &expr.terms {
        let last = t.edges.iter().map(|&(e, _)| e).max().expect("nonempty");
        buckets[last].push(t);
    }
    let viable = |e: usize, prefix: &[FieldElement]| buckets[e].iter().all(|t| !expr.term_value(t, prefix).is_zero());
    let found = lex_search(&choices, &viable, limit, workers);
    Ok(found.into_iter().map(Coloring).collect())
}

/// Canonical representative modulo `⟨x_e^q - x_e⟩`: every exponent below `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedPoly {
    field: FieldSpec,
    variables: usize,
    terms: BTreeMap<Vec<u32>, FieldElement>,
}

/// `x^e` with `e >= q` equals `x^(e - (q-1))` as a function.
fn reduce_exponent(e: u32, q: u32) -> u32 {
    if e < q {
        e
    } else {
        (e - 1) % (q - 1) + 1
    }
}

impl ReducedPoly {
    pub fn zero(field: &FieldSpec, variables: usize) -> Self {
        Self { field: field.clone(), variables, terms: BTreeMap::new() }
    }

    pub fn constant(field: &FieldSpec, variables: usize, c: FieldElement) -> Self {
        let mut p = Self::zero(field, variables);
        if !c.is_zero() {
            p.terms.insert(vec![0; variables], c);
        }
        p
    }

    pub fn one(field: &FieldSpec, variables: usize) -> Self {
        Self::constant(field, variables, field.one())
    }

    pub fn variable(field: &FieldSpec, variables: usize, index: usize) -> Self {
        let mut exps = vec![0; variables];
        exps[index] = 1;
        let mut p = Self::zero(field, variables);
        p.terms.insert(exps, field.one());
        p
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, exps: Vec<u32>, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = self.field.add(*o.get(), c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.accumulate(e.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.accumulate(e.clone(), self.field.neg(c));
        }
        out
    }

    /// Product, reduced so every exponent stays below `q`.
    pub fn mul(&self, other: &Self) -> Self {
        let q = self.field.order();
        let mut out = Self::zero(&self.field, self.variables);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let exps = ea.iter().zip(eb).map(|(&a, &b)| reduce_exponent(a + b, q)).collect();
                out.accumulate(exps, self.field.mul(ca, cb));
            }
        }
        out
    }

    pub fn pow(&self, n: u64) -> Self {
        (0..n).fold(Self::one(&self.field, self.variables), |acc, _| acc.mul(self))
    }

    pub fn evaluate(&self, point: &[FieldElement]) -> FieldElement {
        let f = &self.field;
        self.terms.iter().fold(f.zero(), |acc, (exps, &c)| {
            let mono = exps.iter().zip(point).fold(c, |m, (&e, &x)| f.mul(m, f.pow(x, e as u64)));
            f.add(acc, mono)
        })
    }

    /// Wire form: terms sorted by exponent vector.
    pub fn to_json(&self) -> Vec<ReducedTermJson> {
        self.terms
            .iter()
            .map(|(exps, &c)| ReducedTermJson { exps: exps.clone(), coef: self.field.coefficients(c) })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedTermJson {
    pub exps: Vec<u32>,
    /// Coefficient vector of the field element, lowest degree first.
    pub coef: Vec<u32>,
}

/// Coefficients (low to high) of `(x - c)^(q-1)` as a univariate polynomial.
fn shifted_power(field: &FieldSpec, c: FieldElement) -> Vec<FieldElement> {
    let q1 = (field.order() - 1) as usize;
    let mut poly = vec![field.one()];
    for _ in 0..q1 {
        // multiply by (x - c)
        let mut next = vec![field.zero(); poly.len() + 1];
        for (i, &a) in poly.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], a);
            next[i] = field.sub(next[i], field.mul(a, c));
        }
        poly = next;
    }
    poly
}

/// Expands the expression into its reduced form by multiplying one term at a
/// time into a dense accumulator over all `q^|E|` monomials with exponents
/// below `q`.
pub fn expand_reduced(expr: &IndicatorExpr, term_capacity: u128) -> Result<ReducedPoly, IndicatorError> {
    let f = &expr.field;
    let q = f.order();
    let n = expr.host.edge_count();
    let size = (q as u128).saturating_pow(n as u32);
    if size > term_capacity {
        return Err(IndicatorError::CapacityExceeded { needed: size, bound: term_capacity });
    }
    let size = size as usize;
    let strides: Vec<usize> = (0..n).map(|e| (q as usize).pow(e as u32)).collect();
    let mut acc = vec![f.zero(); size];
    acc[0] = f.one();
    let mut shifted_cache: BTreeMap<FieldElement, Vec<FieldElement>> = BTreeMap::new();

    for term in &expr.terms {
        // 1 - Π_e (1 - (x_e - c)^(q-1)) as sparse (var exponents, coefficient) pairs.
        let mut product: Vec<(Vec<(usize, u32)>, FieldElement)> = vec![(Vec::new(), f.one())];
        for &(e, c) in &term.edges {
            let sp = shifted_cache.entry(c).or_insert_with(|| shifted_power(f, c));
            let uni: Vec<(u32, FieldElement)> = sp
                .iter()
                .enumerate()
                .map(|(i, &a)| (i as u32, if i == 0 { f.sub(f.one(), a) } else { f.neg(a) }))
                .filter(|(_, a)| !a.is_zero())
                .collect();
            let mut next = Vec::with_capacity(product.len() * uni.len());
            for (mono, coef) in &product {
                for &(i, a) in &uni {
                    let mut m = mono.clone();
                    if i > 0 {
                        m.push((e, i));
                    }
                    next.push((m, f.mul(*coef, a)));
                }
            }
            product = next;
        }
        let mut factor: Vec<(Vec<(usize, u32)>, FieldElement)> =
            product.into_iter().map(|(m, c)| (m, f.neg(c))).collect();
        factor.push((Vec::new(), f.one()));

        let mut next = vec![f.zero(); size];
        for (idx, &a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (mono, c) in &factor {
                if c.is_zero() {
                    continue;
                }
                let mut target = idx;
                for &(v, m) in mono {
                    let cur = ((idx / strides[v]) % q as usize) as u32;
                    let new = reduce_exponent(cur + m, q);
                    target = target + new as usize * strides[v] - cur as usize * strides[v];
                }
                next[target] = f.add(next[target], f.mul(a, *c));
            }
        }
        acc = next;
    }

    let mut out = ReducedPoly::zero(f, n);
    for (idx, &c) in acc.iter().enumerate() {
        if !c.is_zero() {
            let exps = (0..n).map(|v| ((idx / strides[v]) % q as usize) as u32).collect();
            out.terms.insert(exps, c);
        }
    }
    Ok(out)
}

/// Outcome of an ideal-membership test, with the routes that were run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Reduced representative is the zero polynomial.
    pub by_reduction: Option<bool>,
    /// No nonvanishing point in `GF(q)^E`.
    pub by_evaluation: Option<bool>,
}

impl Membership {
    pub fn route(&self) -> &'static str {
        match (self.by_reduction, self.by_evaluation) {
            (Some(_), Some(_)) => "reduction+evaluation",
            (Some(_), None) => "reduction",
            _ => "evaluation",
        }
    }
}

/// Whether the indicator lies in `⟨x_e^q - x_e⟩`. Runs the reduction route when
/// `q^|E| <= term_capacity` and the exhaustive-evaluation route when
/// `q^|E| <= max_points`; when both run they must agree.
pub fn ideal_membership(
    expr: &IndicatorExpr,
    term_capacity: u128,
    max_points: u128,
    workers: usize,
) -> Result<Membership, IndicatorError> {
    let points = ColoringSource::All.point_count(expr);
    let by_reduction = if points <= term_capacity { Some(expand_reduced(expr, term_capacity)?.is_zero()) } else { None };
    let by_evaluation = if points <= max_points {
        Some(find_nonvanishing(expr, &ColoringSource::All, workers)?.is_none())
    } else {
        None
    };
    match (by_reduction, by_evaluation) {
        (None, None) => Err(IndicatorError::CapacityExceeded { needed: points, bound: term_capacity.max(max_points) }),
        (Some(a), Some(b)) if a != b => Err(IndicatorError::Inconsistent(format!(
            "reduction says {a}, exhaustive evaluation says {b}"
        ))),
        (a, b) => Ok(Membership { member: a.or(b).unwrap(), by_reduction, by_evaluation }),
    }
}

/// Splits the indicator of `G_n` along an embedding `π: G_k -> G_n` into the
/// indicator of `π(G_k)` (in the pulled-back edge variables) and the product
/// of all remaining terms.
pub fn partial_factor(
    g_n: &Graph,
    g_k: &Graph,
    pi: &EmbeddingMap,
    targets: &[ColoredTarget],
    field: &FieldSpec,
) -> Result<(IndicatorExpr, IndicatorExpr), IndicatorError> {
    let checked = EmbeddingMap::from_vertex_map(g_k, g_n, pi.vertex_map.clone())?;
    if checked.edge_map != pi.edge_map {
        return Err(GraphError::NotAnEmbedding("edge map inconsistent with vertex map".into()).into());
    }
    let full = build_indicator(g_n, targets, field)?;
    let inner = build_indicator(g_k, targets, field)?;
    let factor_terms: Vec<IndicatorTerm> = inner
        .terms
        .iter()
        .map(|t| IndicatorTerm {
            target: t.target,
            vertex_map: t.vertex_map.iter().map(|&v| pi.vertex_map[v]).collect(),
            edges: t.edges.iter().map(|&(e, c)| (pi.edge_map[e], c)).collect(),
        })
        .collect();
    let keys: HashSet<(usize, &[usize])> = factor_terms.iter().map(|t| (t.target, t.vertex_map.as_slice())).collect();
    let cofactor_terms: Vec<IndicatorTerm> = full
        .terms
        .iter()
        .filter(|t| !keys.contains(&(t.target, t.vertex_map.as_slice())))
        .cloned()
        .collect();
    if cofactor_terms.len() + factor_terms.len() != full.terms.len() {
        return Err(IndicatorError::Inconsistent("factor terms are not a sub-multiset of the indicator".into()));
    }
    let make = |terms| IndicatorExpr { host: g_n.clone(), field: field.clone(), target_count: targets.len(), terms };
    Ok((make(factor_terms), make(cofactor_terms)))
}

//! Finite simple graphs with stable edge ids, and enumeration of subgraph
//! embeddings (the isomorphism set `G/X`).
//!
//! Embeddings are non-induced: every edge of the target must land on an edge
//! of the host, non-edges of the target are unconstrained. Enumeration is a
//! plain backtracking search over target vertices in index order, so results
//! come out in lexicographic order of the vertex map.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

const NO_EDGE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("edge {{{0}, {1}}} references a vertex >= {2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("{0} must be at least 1")]
    EmptyGenerator(&'static str),
    #[error("vertex map is not an embedding: {0}")]
    NotAnEmbedding(String),
}

/// Finite undirected simple graph. Edge ids are dense and follow the order in
/// which edges were supplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<u32>,
    degrees: Vec<usize>,
}

impl Graph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        let mut adjacency = vec![NO_EDGE; vertex_count * vertex_count];
        let mut degrees = vec![0; vertex_count];
        let mut normalized = Vec::new();
        for (u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::VertexOutOfRange(u, v, vertex_count));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if adjacency[a * vertex_count + b] != NO_EDGE {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            let id = normalized.len() as u32;
            adjacency[a * vertex_count + b] = id;
            adjacency[b * vertex_count + a] = id;
            degrees[a] += 1;
            degrees[b] += 1;
            normalized.push((a, b));
        }
        Ok(Self { vertex_count, edges: normalized, adjacency, degrees })
    }

    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Self::new(n, []).expect("edgeless graph is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, indexed by edge id.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.vertex_count || v >= self.vertex_count {
            return None;
        }
        match self.adjacency[u * self.vertex_count + v] {
            NO_EDGE => None,
            id => Some(id as usize),
        }
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.edge_id(u, v).is_some()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    /// Disjoint union, vertices and edges of each part appended in order.
    pub fn disjoint_union<'a>(parts: impl IntoIterator<Item = &'a Graph>) -> Graph {
        let mut offset = 0;
        let mut edges = Vec::new();
        for g in parts {
            edges.extend(g.edges.iter().map(|&(u, v)| (u + offset, v + offset)));
            offset += g.vertex_count;
        }
        Graph::new(offset, edges).expect("disjoint union of valid graphs is valid")
    }
}

/// `K_n` with edges in colex order: `(0,1), (0,2), (1,2), (0,3), ...`.
///
/// Under this order `K_n`'s edge ids are a prefix of `K_{n+1}`'s, and for
/// `n = 4` it reproduces the classical worked-example numbering (vertex 0 on
/// top, 1 left, 2 right, 3 centre).
pub fn complete_graph(n: usize) -> Result<Graph, GraphError> {
    if n == 0 {
        return Err(GraphError::EmptyGenerator("complete graph order"));
    }
    let edges = (1..n).flat_map(|v| (0..v).map(move |u| (u, v)));
    Graph::new(n, edges)
}

/// `P_t`: the path with `t` edges on `t + 1` vertices, edge `i` joining `i` and `i + 1`.
pub fn path_graph(t: usize) -> Result<Graph, GraphError> {
    if t == 0 {
        return Err(GraphError::EmptyGenerator("path length"));
    }
    Graph::new(t + 1, (0..t).map(|i| (i, i + 1)))
}

/// Cycle on `n >= 3` vertices, edge `i` joining `i` and `(i + 1) mod n`.
pub fn cycle_graph(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::EmptyGenerator("cycle length minus two"));
    }
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// One element of `G/X`, stored in the embedding direction `X -> G`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddingMap {
    pub vertex_map: Vec<usize>,
    /// Edge id of `X` to edge id of `G`.
    pub edge_map: Vec<usize>,
}

impl EmbeddingMap {
    /// Validates `vertex_map` as an embedding of `target` into `host` and derives the edge map.
    pub fn from_vertex_map(target: &Graph, host: &Graph, vertex_map: Vec<usize>) -> Result<Self, GraphError> {
        if vertex_map.len() != target.vertex_count() {
            return Err(GraphError::NotAnEmbedding(format!(
                "expected {} images, got {}",
                target.vertex_count(),
                vertex_map.len()
            )));
        }
        let mut seen = vec![false; host.vertex_count()];
        for &v in &vertex_map {
            if v >= host.vertex_count() {
                return Err(GraphError::NotAnEmbedding(format!("image {v} outside host")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(GraphError::NotAnEmbedding(format!("vertex {v} hit twice")));
            }
        }
        let edge_map = target
            .edges()
            .iter()
            .map(|&(u, v)| {
                host.edge_id(vertex_map[u], vertex_map[v]).ok_or_else(|| {
                    GraphError::NotAnEmbedding(format!("target edge {{{u}, {v}}} has no image edge"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { vertex_map, edge_map })
    }

    /// `self ∘ inner`, where `inner: X -> H` and `self: H -> G`.
    pub fn compose(&self, inner: &EmbeddingMap) -> EmbeddingMap {
        EmbeddingMap {
            vertex_map: inner.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            edge_map: inner.edge_map.iter().map(|&e| self.edge_map[e]).collect(),
        }
    }
}

/// Backtracking core. `accept(target_edge, host_edge)` may veto individual
/// edge assignments (used for colour-constrained search); `visit` receives each
/// complete vertex map in lexicographic order.
pub(crate) fn search_embeddings<A, V>(target: &Graph, host: &Graph, accept: A, mut visit: V)
where
    A: Fn(usize, usize) -> bool,
    V: FnMut(&[usize]) -> ControlFlow<()>,
{
    let n = target.vertex_count();
    if n > host.vertex_count() || target.edge_count() > host.edge_count() {
        return;
    }
    // For each target vertex, the (earlier neighbour, edge id) pairs to check.
    let back_edges: Vec<Vec<(usize, usize)>> = (0..n)
        .map(|x| (0..x).filter_map(|y| target.edge_id(y, x).map(|e| (y, e))).collect())
        .collect();
    let mut map = Vec::with_capacity(n);
    let mut used = vec![false; host.vertex_count()];
    let _ = extend(target, host, &back_edges, &accept, &mut visit, &mut map, &mut used);
}

fn extend<A, V>(
    target: &Graph,
    host: &Graph,
    back_edges: &[Vec<(usize, usize)>],
    accept: &A,
    visit: &mut V,
    map: &mut Vec<usize>,
    used: &mut [bool],
) -> ControlFlow<()>
where
    A: Fn(usize, usize) -> bool,
    V: FnMut(&[usize]) -> ControlFlow<()>,
{
    let x = map.len();
    if x == target.vertex_count() {
        return visit(map);
    }
    let need = target.degree(x);
    for g in 0..host.vertex_count() {
        if used[g] || host.degree(g) < need {
            continue;
        }
        let fits = back_edges[x].iter().all(|&(y, te)| match host.edge_id(map[y], g) {
            Some(he) => accept(te, he),
            None => false,
        });
        if !fits {
            continue;
        }
        used[g] = true;
        map.push(g);
        let flow = extend(target, host, back_edges, accept, visit, map, used);
        map.pop();
        used[g] = false;
        flow?;
    }
    ControlFlow::Continue(())
}

fn edge_map_for(target: &Graph, host: &Graph, vertex_map: &[usize]) -> Vec<usize> {
    target
        .edges()
        .iter()
        .map(|&(u, v)| host.edge_id(vertex_map[u], vertex_map[v]).expect("backtracking preserves edges"))
        .collect()
}

/// Every embedding of `target` into `host`, each exactly once, in
/// lexicographic order of the vertex map. `|result| = |host/target|`.
pub fn enumerate_embeddings(target: &Graph, host: &Graph) -> Vec<EmbeddingMap> {
    let mut out = Vec::new();
    search_embeddings(target, host, |_, _| true, |vm| {
        out.push(EmbeddingMap { vertex_map: vm.to_vec(), edge_map: edge_map_for(target, host, vm) });
        ControlFlow::Continue(())
    });
    out
}

pub fn count_embeddings(target: &Graph, host: &Graph) -> usize {
    let mut count = 0;
    search_embeddings(target, host, |_, _| true, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

pub fn first_embedding(target: &Graph, host: &Graph) -> Option<EmbeddingMap> {
    let mut found = None;
    search_embeddings(target, host, |_, _| true, |vm| {
        found = Some(EmbeddingMap { vertex_map: vm.to_vec(), edge_map: edge_map_for(target, host, vm) });
        ControlFlow::Break(())
    });
    found
}

/// `host/target` is nonempty.
pub fn embeds(target: &Graph, host: &Graph) -> bool {
    first_embedding(target, host).is_some()
}

/// First embedding `π` (lexicographic) with `host_colors[π(e)] == target_colors[e]`
/// for every target edge `e`, i.e. a place where the coloured target occurs.
pub fn find_colored_occurrence<T: PartialEq>(
    target: &Graph,
    target_colors: &[T],
    host: &Graph,
    host_colors: &[T],
) -> Option<EmbeddingMap> {
    debug_assert_eq!(target_colors.len(), target.edge_count());
    debug_assert_eq!(host_colors.len(), host.edge_count());
    let mut found = None;
    search_embeddings(
        target,
        host,
        |te, he| host_colors[he] == target_colors[te],
        |vm| {
            found = Some(EmbeddingMap { vertex_map: vm.to_vec(), edge_map: edge_map_for(target, host, vm) });
            ControlFlow::Break(())
        },
    );
    found
}

/// Wire form: `{"vertices": n, "edges": [[u, v], ...]}`, edge ids in listed order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphJson {
    fn from(g: &Graph) -> Self {
        GraphJson { vertices: g.vertex_count(), edges: g.edges().iter().map(|&(u, v)| [u, v]).collect() }
    }
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        Graph::new(j.vertices, j.edges.into_iter().map(|[u, v]| (u, v)))
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = GraphJson::deserialize(d)?;
        Graph::try_from(j).map_err(serde::de::Error::custom)
    }
}

//! Simple undirected graphs, edge-list ingestion and core decomposition.
//!
//! Nodes are dense ids `0..n`. Adjacency lists are kept sorted, which gives a
//! canonical ordering of undirected edges by `(min endpoint, max endpoint)`.
//! Edge `k` in that order owns directed indices `2k` (min -> max) and
//! `2k + 1` (max -> min), so reversing a directed edge is `e ^ 1`.

use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a simple graph, silently dropping self-loops and repeated edges.
    /// Panics if an endpoint is `>= n`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges_counted(n, edges).0
    }

    /// Like [`Graph::from_edges`], also returning `(self_loops, duplicates)` dropped.
    pub fn from_edges_counted(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> (Self, usize, usize) {
        let mut adj = vec![Vec::new(); n];
        let mut loops = 0;
        let mut total = 0;
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for n = {n}");
            if u == v {
                loops += 1;
                continue;
            }
            total += 1;
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut m2 = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m2 += list.len();
        }
        let m = m2 / 2;
        (Graph { adj, m }, loops, total - m)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Undirected edges `(u, v)` with `u < v` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn check_node(&self, c: usize) -> Result<()> {
        if c < self.n() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node: c, n: self.n() })
        }
    }

    /// Deletes every edge incident to `c`. The node keeps its id and becomes isolated.
    pub fn detach(&mut self, c: usize) {
        let nbrs = std::mem::take(&mut self.adj[c]);
        for &i in &nbrs {
            if let Ok(pos) = self.adj[i].binary_search(&c) {
                self.adj[i].remove(pos);
            }
        }
        self.m -= nbrs.len();
    }

    /// Checks the simplicity and symmetry invariants. Used by tests.
    pub fn is_consistent(&self) -> bool {
        let mut total = 0;
        for (u, list) in self.adj.iter().enumerate() {
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &v in list {
                if v == u || v >= self.n() || !self.has_edge(v, u) {
                    return false;
                }
            }
            total += list.len();
        }
        total == 2 * self.m
    }
}

/// Result of reading an edge list: the compacted graph plus the id mapping.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    /// `original_ids[i]` is the input label of compact node `i`.
    pub original_ids: Vec<u64>,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Parses a whitespace separated edge list. Lines starting with `#` and blank
/// lines are skipped. Labels are compacted to `0..n` in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut raw = Vec::new();
    let mut intern = |label: u64, ids: &mut HashMap<u64, usize>| {
        *ids.entry(label).or_insert_with(|| {
            original_ids.push(label);
            original_ids.len() - 1
        })
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse {
            line: lineno + 1,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next = || -> Result<u64> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: "expected two node ids".into(),
            })?;
            tok.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let (a, b) = (next()?, next()?);
        let u = intern(a, &mut ids);
        let v = intern(b, &mut ids);
        raw.push((u, v));
    }
    if original_ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let (graph, self_loops_dropped, duplicates_dropped) =
        Graph::from_edges_counted(original_ids.len(), raw);
    Ok(LoadedGraph {
        graph,
        original_ids,
        self_loops_dropped,
        duplicates_dropped,
    })
}

pub fn load_edge_list_str(text: &str) -> Result<LoadedGraph> {
    load_edge_list(text.as_bytes())
}

/// Writes the graph as an edge list, one `u v` pair per line.
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(g.m() * 12);
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// An induced subgraph together with its mapping back to the parent ids.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    /// `parent_ids[i]` is the id in the parent graph of subgraph node `i`.
    pub parent_ids: Vec<usize>,
}

/// Connected component labels; components are numbered in order of their
/// smallest node id.
pub fn connected_components(g: &Graph) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut label = vec![usize::MAX; n];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for s in 0..n {
        if label[s] != usize::MAX {
            continue;
        }
        label[s] = count;
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if label[v] == usize::MAX {
                    label[v] = count;
                    queue.push_back(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Subgraph induced by `keep` (sorted ascending), relabelled to `0..keep.len()`.
pub fn induced_subgraph(g: &Graph, keep: &[usize]) -> Subgraph {
    let mut new_id = vec![usize::MAX; g.n()];
    for (i, &u) in keep.iter().enumerate() {
        new_id[u] = i;
    }
    let edges = keep.iter().flat_map(|&u| {
        let new_id = &new_id;
        g.neighbors(u)
            .iter()
            .filter(move |&&v| v > u && new_id[v] != usize::MAX)
            .map(move |&v| (new_id[u], new_id[v]))
    });
    Subgraph {
        graph: Graph::from_edges(keep.len(), edges),
        parent_ids: keep.to_vec(),
    }
}

/// Largest connected component. Ties go to the component holding the smallest id.
pub fn largest_connected_component(g: &Graph) -> Result<Subgraph> {
    if g.n() == 0 {
        return Err(Error::EmptyGraph);
    }
    let (label, count) = connected_components(g);
    let mut sizes = vec![0usize; count];
    for &l in &label {
        sizes[l] += 1;
    }
    // first maximum wins, and labels follow smallest-id order
    let best = (0..count).fold(0, |b, l| if sizes[l] > sizes[b] { l } else { b });
    let keep: Vec<usize> = (0..g.n()).filter(|&u| label[u] == best).collect();
    Ok(induced_subgraph(g, &keep))
}

/// Copy of `g` with node `c` detached. Ids are unchanged, so the mapping is
/// the identity and `c` remains as an isolated node. The remainder is not
/// reduced to its largest component.
pub fn remove_node(g: &Graph, c: usize) -> Result<Graph> {
    g.check_node(c)?;
    let mut h = g.clone();
    h.detach(c);
    Ok(h)
}

/// Directed edges in canonical order. `edge(k)` is the `(source, target)` pair
/// of index `k`; `index_of` inverts it.
#[derive(Debug, Clone)]
pub struct DirectedEdgeIndex {
    edges: Vec<(usize, usize)>,
    /// `out_index[u][p]` is the index of `u -> adj[u][p]`.
    out_index: Vec<Vec<usize>>,
}

impl DirectedEdgeIndex {
    pub fn new(g: &Graph) -> Self {
        let mut edges = Vec::with_capacity(2 * g.m());
        let mut out_index: Vec<Vec<usize>> = (0..g.n()).map(|u| vec![0; g.degree(u)]).collect();
        for (u, v) in g.edges() {
            let k = edges.len();
            edges.push((u, v));
            edges.push((v, u));
            let pu = g.neighbors(u).binary_search(&v).unwrap();
            let pv = g.neighbors(v).binary_search(&u).unwrap();
            out_index[u][pu] = k;
            out_index[v][pv] = k + 1;
        }
        DirectedEdgeIndex { edges, out_index }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, g: &Graph, u: usize, v: usize) -> Option<usize> {
        let pos = g.neighbors(u).binary_search(&v).ok()?;
        Some(self.out_index[u][pos])
    }

    /// Indices of the out-edges of `u`, aligned with `g.neighbors(u)`.
    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out_index[u]
    }

    #[inline]
    pub fn reverse(k: usize) -> usize {
        k ^ 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreLabels {
    pub core_index: Vec<usize>,
    pub in_two_core: Vec<bool>,
}

impl CoreLabels {
    pub fn two_core_is_empty(&self) -> bool {
        !self.in_two_core.iter().any(|&b| b)
    }

    pub fn one_shell(&self) -> Vec<usize> {
        (0..self.core_index.len())
            .filter(|&i| !self.in_two_core[i] && self.core_index[i] > 0)
            .collect()
    }
}

/// Coreness of every node by bucketed minimum-degree peeling, O(n + m).
pub fn k_core_decomposition(g: &Graph) -> CoreLabels {
    let n = g.n();
    let mut deg = g.degrees();
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[deg[v]];
        vert[pos[v]] = v;
        bin[deg[v]] += 1;
    }
    for d in (1..=max_deg + 1).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;
    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    pos[u] = pw;
                    vert[pu] = w;
                    pos[w] = pu;
                    vert[pw] = u;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    let in_two_core = deg.iter().map(|&k| k >= 2).collect();
    CoreLabels {
        core_index: deg,
        in_two_core,
    }
}

/// The 2-core as an induced subgraph.
pub fn two_core(g: &Graph) -> Subgraph {
    let labels = k_core_decomposition(g);
    let keep: Vec<usize> = (0..g.n()).filter(|&i| labels.in_two_core[i]).collect();
    induced_subgraph(g, &keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)])
    }

    #[test]
    fn load_triangle() {
        let g = load_edge_list_str("0 1\n1 2\n2 0\n").unwrap().graph;
        assert_eq!((g.n(), g.m()), (3, 3));
        assert!(g.is_consistent());
    }

    #[test]
    fn load_drops_loops_and_duplicates() {
        let loaded = load_edge_list_str("0 0\n0 1\n1 0\n").unwrap();
        assert_eq!((loaded.graph.n(), loaded.graph.m()), (2, 1));
        assert_eq!(loaded.self_loops_dropped, 1);
        assert_eq!(loaded.duplicates_dropped, 1);
    }

    #[test]
    fn load_rejects_garbage() {
        assert!(matches!(
            load_edge_list_str("a b\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load_edge_list_str("0 1\n7\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert_eq!(load_edge_list_str("# nothing\n\n").unwrap_err(), Error::EmptyGraph);
    }

    #[test]
    fn load_compacts_labels() {
        let loaded = load_edge_list_str("# comment\n10 20\n\n20 30\n").unwrap();
        assert_eq!(loaded.original_ids, vec![10, 20, 30]);
        assert!(loaded.graph.has_edge(0, 1) && loaded.graph.has_edge(1, 2));
    }

    #[test]
    fn lcc_picks_triangle_over_edge() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 0), (3, 4)]);
        let lcc = largest_connected_component(&g).unwrap();
        assert_eq!(lcc.graph, triangle());
        assert_eq!(lcc.parent_ids, vec![0, 1, 2]);
    }

    #[test]
    fn lcc_of_connected_graph_is_identity() {
        let g = triangle();
        assert_eq!(largest_connected_component(&g).unwrap().graph, g);
    }

    #[test]
    fn lcc_tie_goes_to_smallest_id() {
        let g = Graph::from_edges(6, [(3, 4), (4, 5), (5, 3), (0, 1), (1, 2), (2, 0)]);
        assert_eq!(largest_connected_component(&g).unwrap().parent_ids, vec![0, 1, 2]);
        let g = Graph::from_edges(6, [(0, 4), (4, 5), (5, 0), (1, 2), (2, 3), (3, 1)]);
        assert_eq!(largest_connected_component(&g).unwrap().parent_ids, vec![0, 4, 5]);
        assert_eq!(largest_connected_component(&Graph::empty(0)).unwrap_err(), Error::EmptyGraph);
    }

    #[test]
    fn remove_node_examples() {
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        for c in 0..4 {
            let h = remove_node(&k4, c).unwrap();
            assert_eq!(h.m(), 3);
            assert_eq!(h.degree(c), 0);
            assert!(h.is_consistent());
        }
        assert_eq!(remove_node(&triangle(), 0).unwrap().m(), 1);
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        assert_eq!(remove_node(&star, 0).unwrap().m(), 0);
        assert!(matches!(remove_node(&star, 4), Err(Error::NodeOutOfRange { .. })));
    }

    #[test]
    fn core_examples() {
        let p3 = Graph::from_edges(3, [(0, 1), (1, 2)]);
        let c = k_core_decomposition(&p3);
        assert_eq!(c.core_index, vec![1, 1, 1]);
        assert!(c.two_core_is_empty());

        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(k_core_decomposition(&k4).core_index, vec![3; 4]);

        let tp = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 3)]);
        let c = k_core_decomposition(&tp);
        assert_eq!(c.core_index, vec![2, 2, 2, 1]);
        assert_eq!(c.in_two_core, vec![true, true, true, false]);
        assert_eq!(c.one_shell(), vec![3]);
    }

    #[test]
    fn directed_index_layout() {
        let g = triangle();
        let idx = DirectedEdgeIndex::new(&g);
        assert_eq!(
            idx.edges(),
            &[(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)]
        );
        for k in 0..idx.len() {
            let (u, v) = idx.edge(k);
            assert_eq!(idx.index_of(&g, u, v), Some(k));
            assert_eq!(idx.edge(DirectedEdgeIndex::reverse(k)), (v, u));
        }
        assert_eq!(idx.index_of(&g, 0, 0), None);
    }
}

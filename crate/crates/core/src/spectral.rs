//! Non-backtracking operators and the leading NB-eigenpair.
//!
//! The NB-matrix `B` acts on vectors indexed by directed edges:
//! `(B x)[k -> l] = sum over in-edges i -> k of x[i -> k]  -  x[l -> k]`.
//! Its Perron pair is found through the `2n x 2n` auxiliary matrix
//! `B_aux = [[0, D - I], [-I, A]]`, whose left Perron vector is `(f, -lambda f)`.
//! The NB-centralities `v_bar[i] = sum_j v[j -> i]` of the right Perron vector
//! `v` normalized by `v^T P v = 1` are recovered as `v_bar = mu f` with
//! `mu^2 = lambda (lambda^2 - 1) / (1 - f^T D f)`.

use serde::Serialize;

use crate::error::Result;
use crate::graph::{connected_components, k_core_decomposition, remove_node, DirectedEdgeIndex, Graph};

/// Shift added to `B_aux^T` during power iteration. Any positive shift makes the
/// Perron root strictly dominant in modulus, even on bipartite or periodic graphs
/// where `-lambda` or other roots of modulus `lambda` are present.
const POWER_SHIFT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-10,
            max_iter: 100_000,
        }
    }
}

/// Matrix-free NB-matrix and edge-reversal operator `P`.
#[derive(Debug, Clone)]
pub struct NbOperator<'a> {
    graph: &'a Graph,
    index: DirectedEdgeIndex,
}

impl<'a> NbOperator<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        NbOperator {
            graph,
            index: DirectedEdgeIndex::new(graph),
        }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn index(&self) -> &DirectedEdgeIndex {
        &self.index
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    fn in_sums(&self, x: &[f64]) -> Vec<f64> {
        (0..self.graph.n())
            .map(|u| self.index.out_edges(u).iter().map(|&e| x[e ^ 1]).sum())
            .collect()
    }

    fn out_sums(&self, x: &[f64]) -> Vec<f64> {
        (0..self.graph.n())
            .map(|u| self.index.out_edges(u).iter().map(|&e| x[e]).sum())
            .collect()
    }

    /// `y = B x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let s = self.in_sums(x);
        (0..self.dim())
            .map(|e| s[self.index.edge(e).0] - x[e ^ 1])
            .collect()
    }

    /// `y = B^T x`: `(B^T x)[i -> j] = sum over out-edges j -> l of x[j -> l]  -  x[j -> i]`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        let s = self.out_sums(x);
        (0..self.dim())
            .map(|e| s[self.index.edge(e).1] - x[e ^ 1])
            .collect()
    }

    /// `y = P x`, swapping each directed edge with its reverse.
    pub fn apply_reversal(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim()).map(|e| x[e ^ 1]).collect()
    }

    /// Per-node in-edge sums `x^i = sum_j x[j -> i]`.
    pub fn node_aggregate(&self, x: &[f64]) -> Vec<f64> {
        self.in_sums(x)
    }
}

/// Matrix-free `B_aux = [[0, D - I], [-I, A]]` on vectors of length `2n`.
#[derive(Debug, Clone, Copy)]
pub struct AuxOperator<'a> {
    graph: &'a Graph,
}

impl<'a> AuxOperator<'a> {
    pub fn new(graph: &'a Graph) -> Self {
        AuxOperator { graph }
    }

    pub fn dim(&self) -> usize {
        2 * self.graph.n()
    }

    fn adj_mul(&self, x: &[f64], out: &mut [f64]) {
        for (u, o) in out.iter_mut().enumerate() {
            *o += self.graph.neighbors(u).iter().map(|&v| x[v]).sum::<f64>();
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.graph.n();
        assert_eq!(x.len(), 2 * n);
        let (top, bot) = x.split_at(n);
        let mut y = vec![0.0; 2 * n];
        for u in 0..n {
            y[u] = (self.graph.degree(u) as f64 - 1.0) * bot[u];
            y[n + u] = -top[u];
        }
        self.adj_mul(bot, &mut y[n..]);
        y
    }

    /// `y = B_aux^T x = [[0, -I], [D - I, A]] x`.
    pub fn apply_transpose(&self, x: &[f64]) -> Vec<f64> {
        let n = self.graph.n();
        assert_eq!(x.len(), 2 * n);
        let mut y = vec![0.0; 2 * n];
        self.apply_transpose_into(x, &mut y);
        y
    }

    fn apply_transpose_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.graph.n();
        let (top, bot) = x.split_at(n);
        for u in 0..n {
            y[u] = -bot[u];
            y[n + u] = (self.graph.degree(u) as f64 - 1.0) * top[u];
        }
        self.adj_mul(bot, &mut y[n..]);
    }
}

/// Leading NB-eigenvalue with properly normalized NB-centralities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub lambda1: f64,
    /// First half of the unit left Perron vector of `B_aux`, sign fixed to be non-negative.
    pub f: Vec<f64>,
    /// NB-centralities of the right Perron vector normalized by `v^T P v = 1`.
    pub v_bar: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// `lambda1 <= 1`: the 2-core is empty (`lambda1 = 0`) or a union of cycles
    /// (`lambda1 = 1`, a non-simple root). The `mu` scaling does not apply there.
    pub degenerate: bool,
}

impl SpectralResult {
    /// Scale factor `mu` with `v_bar = mu f`. `None` when degenerate.
    pub fn mu(&self, g: &Graph) -> Option<f64> {
        if self.degenerate {
            return None;
        }
        Some(mu_factor(g, self.lambda1, &self.f))
    }

    /// Right Perron vector over directed edges, rebuilt from `v_bar`:
    /// `v[i -> j] = (lambda v_bar[i] - v_bar[j]) / (lambda^2 - 1)`. Requires `lambda1 > 1`.
    pub fn edge_vector(&self, g: &Graph) -> Option<Vec<f64>> {
        if self.degenerate {
            return None;
        }
        let lam = self.lambda1;
        let idx = DirectedEdgeIndex::new(g);
        Some(
            idx.edges()
                .iter()
                .map(|&(i, j)| (lam * self.v_bar[i] - self.v_bar[j]) / (lam * lam - 1.0))
                .collect(),
        )
    }
}

/// `mu = sqrt(lambda (lambda^2 - 1) / (1 - f^T D f))`.
pub fn mu_factor(g: &Graph, lambda: f64, f: &[f64]) -> f64 {
    let fdf: f64 = f
        .iter()
        .enumerate()
        .map(|(i, &x)| g.degree(i) as f64 * x * x)
        .sum();
    (lambda * (lambda * lambda - 1.0) / (1.0 - fdf)).sqrt()
}

enum CoreShape {
    Empty,
    Cycles,
    General,
}

fn classify_two_core(g: &Graph, in_core: &[bool]) -> CoreShape {
    let mut any = false;
    for u in 0..g.n() {
        if !in_core[u] {
            continue;
        }
        any = true;
        let core_deg = g.neighbors(u).iter().filter(|&&v| in_core[v]).count();
        if core_deg > 2 {
            return CoreShape::General;
        }
    }
    if any {
        CoreShape::Cycles
    } else {
        CoreShape::Empty
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Leading eigenpair of the NB-matrix of `g`.
///
/// An empty 2-core gives `lambda1 = 0` with zero vectors. A 2-core made of
/// disjoint cycles gives `lambda1 = 1`; there the edge vector is taken constant
/// on both orientations of every cycle edge, which satisfies `v^T P v = 1`.
/// Otherwise shifted power iteration runs on `B_aux^T`.
pub fn leading_eigenpair(g: &Graph, opts: EigenOptions) -> SpectralResult {
    let n = g.n();
    let cores = k_core_decomposition(g);
    match classify_two_core(g, &cores.in_two_core) {
        CoreShape::Empty => SpectralResult {
            lambda1: 0.0,
            f: vec![0.0; n],
            v_bar: vec![0.0; n],
            converged: true,
            iterations: 0,
            degenerate: true,
        },
        CoreShape::Cycles => cycle_eigenpair(g, &cores.in_two_core),
        CoreShape::General => power_iteration(g, opts),
    }
}

fn cycle_eigenpair(g: &Graph, in_core: &[bool]) -> SpectralResult {
    let n = g.n();
    let (label, count) = connected_components(g);
    let mut cyclic = vec![false; count];
    let mut core_edges = 0usize;
    for u in 0..n {
        if in_core[u] {
            cyclic[label[u]] = true;
            core_edges += g.neighbors(u).iter().filter(|&&v| in_core[v]).count();
        }
    }
    core_edges /= 2;
    let value = 2.0 / (2.0 * core_edges as f64).sqrt();
    let v_bar: Vec<f64> = (0..n)
        .map(|u| if cyclic[label[u]] { value } else { 0.0 })
        .collect();
    let scale = norm(&v_bar) * std::f64::consts::SQRT_2;
    let f = v_bar.iter().map(|x| x / scale).collect();
    SpectralResult {
        lambda1: 1.0,
        f,
        v_bar,
        converged: true,
        iterations: 0,
        degenerate: true,
    }
}

fn power_iteration(g: &Graph, opts: EigenOptions) -> SpectralResult {
    let n = g.n();
    let aux = AuxOperator::new(g);
    let mut x = vec![1.0 / ((2 * n) as f64).sqrt(); 2 * n];
    let mut y = vec![0.0; 2 * n];
    let mut lambda = f64::NAN;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        aux.apply_transpose_into(&x, &mut y);
        for (yi, xi) in y.iter_mut().zip(&x) {
            *yi += POWER_SHIFT * xi;
        }
        let nrm = norm(&y);
        let mut step = 0.0;
        for (yi, xi) in y.iter_mut().zip(x.iter()) {
            *yi /= nrm;
            step += (*yi - xi) * (*yi - xi);
        }
        std::mem::swap(&mut x, &mut y);
        let next = nrm - POWER_SHIFT;
        let delta = (next - lambda).abs();
        lambda = next;
        if delta < opts.tol && step.sqrt() < opts.tol {
            converged = true;
            break;
        }
    }
    let sign = if x[..n].iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let f: Vec<f64> = x[..n].iter().map(|v| sign * v).collect();
    let mu = mu_factor(g, lambda, &f);
    let v_bar = f.iter().map(|v| mu * v).collect();
    SpectralResult {
        lambda1: lambda,
        f,
        v_bar,
        converged,
        iterations,
        degenerate: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NbCentrality {
    pub scores: Vec<f64>,
    pub lambda1: f64,
    pub degenerate: bool,
    pub converged: bool,
}

/// NB-centrality of every node, `v_bar` of [`leading_eigenpair`].
pub fn nb_centrality(g: &Graph, opts: EigenOptions) -> NbCentrality {
    let s = leading_eigenpair(g, opts);
    NbCentrality {
        scores: s.v_bar,
        lambda1: s.lambda1,
        degenerate: s.degenerate,
        converged: s.converged,
    }
}

/// `lambda1(g) - lambda1(g - c)`.
pub fn eigen_drop_exact(g: &Graph, c: usize, opts: EigenOptions) -> Result<f64> {
    let h = remove_node(g, c)?;
    Ok(leading_eigenpair(g, opts).lambda1 - leading_eigenpair(&h, opts).lambda1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k4() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn dense_b(g: &Graph) -> Vec<Vec<f64>> {
        let op = NbOperator::new(g);
        (0..op.dim())
            .map(|j| {
                let mut e = vec![0.0; op.dim()];
                e[j] = 1.0;
                op.apply(&e)
            })
            .collect()
    }

    #[test]
    fn triangle_has_six_continuations() {
        let cols = dense_b(&cycle(3));
        let ones: f64 = cols.iter().flatten().sum();
        assert_eq!(ones, 6.0);
    }

    #[test]
    fn k4_columns_have_two_ones() {
        let cols = dense_b(&k4());
        for col in &cols {
            assert_eq!(col.iter().sum::<f64>(), 2.0);
        }
        assert_eq!(cols.iter().flatten().sum::<f64>(), 24.0);
    }

    #[test]
    fn star_b_squared_vanishes() {
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        let op = NbOperator::new(&star);
        for j in 0..op.dim() {
            let mut e = vec![0.0; op.dim()];
            e[j] = 1.0;
            assert!(op.apply(&op.apply(&e)).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn reversal_is_involution() {
        let g = k4();
        let op = NbOperator::new(&g);
        let x: Vec<f64> = (0..op.dim()).map(|i| i as f64 * 0.37 - 1.0).collect();
        assert_eq!(op.apply_reversal(&op.apply_reversal(&x)), x);
    }

    #[test]
    fn tree_has_zero_lambda() {
        let tree = Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (1, 4), (4, 5)]);
        let s = leading_eigenpair(&tree, EigenOptions::default());
        assert_eq!(s.lambda1, 0.0);
        assert!(s.converged && s.degenerate);
        assert!(s.v_bar.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn k4_eigenpair() {
        let s = leading_eigenpair(&k4(), EigenOptions::default());
        assert!(s.converged && !s.degenerate);
        assert_relative_eq!(s.lambda1, 2.0, epsilon = 1e-9);
        for &v in &s.v_bar {
            assert_relative_eq!(v, 3.0 / 12f64.sqrt(), epsilon = 1e-8);
        }
        let v = s.edge_vector(&k4()).unwrap();
        for &x in &v {
            assert_relative_eq!(x, 1.0 / 12f64.sqrt(), epsilon = 1e-8);
        }
    }

    #[test]
    fn cycles_have_unit_lambda() {
        let s = leading_eigenpair(&cycle(5), EigenOptions::default());
        assert_eq!(s.lambda1, 1.0);
        assert!(s.degenerate);
        let s = leading_eigenpair(&cycle(3), EigenOptions::default());
        for &v in &s.v_bar {
            assert_relative_eq!(v, 2.0 / 6f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn bipartite_graph_converges() {
        // K_{3,3} has -lambda1 in its NB-spectrum; lambda1 = d - 1 = 2
        let g = Graph::from_edges(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b))));
        let s = leading_eigenpair(&g, EigenOptions::default());
        assert!(s.converged);
        assert_relative_eq!(s.lambda1, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn regular_graph_has_equal_centralities() {
        // Petersen graph, 3-regular
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = Graph::from_edges(10, outer.chain(spokes).chain(inner));
        let c = nb_centrality(&g, EigenOptions::default());
        assert_relative_eq!(c.lambda1, 2.0, epsilon = 1e-9);
        for &v in &c.scores {
            assert_relative_eq!(v, c.scores[0], epsilon = 1e-9);
        }
    }

    #[test]
    fn pendant_centrality_follows_its_hub() {
        // pendant 3 hangs off node 0 of a K4-minus-edge core
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 4), (2, 4), (0, 3)]);
        let s = leading_eigenpair(&g, EigenOptions::default());
        assert!(!s.degenerate);
        assert_relative_eq!(s.v_bar[3], s.v_bar[0] / s.lambda1, epsilon = 1e-9);
    }

    #[test]
    fn eigen_drop_examples() {
        let opts = EigenOptions::default();
        for c in 0..4 {
            assert_relative_eq!(eigen_drop_exact(&k4(), c, opts).unwrap(), 1.0, epsilon = 1e-9);
        }
        let tp = Graph::from_edges(4, [(0, 1), (1, 2), (2, 0), (0, 3)]);
        assert_eq!(eigen_drop_exact(&tp, 3, opts).unwrap(), 0.0);
        assert_eq!(eigen_drop_exact(&cycle(5), 2, opts).unwrap(), 1.0);
        assert!(eigen_drop_exact(&cycle(5), 5, opts).is_err());
    }
}

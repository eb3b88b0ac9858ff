//! Dense brute-force checks of the node-removal perturbation identities.
//!
//! Everything here materializes `2m x 2m` matrices, so every entry point
//! enforces a size cap on `2m`. Meant as ground truth for tests on small graphs.
//!
//! Matrix convention: `B[k -> l, i -> j] = 1` iff `j = k` and `l != i`
//! (rows are destinations, columns are starting edges). For a target node `c`
//! the directed edges are split into those not touching `c` and those that do;
//! with that split `B = [[B', D], [E, F]]` and `X = D F E`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::centrality::{neighbor_quadratic_form, x_degree_exact, x_nb_exact};
use crate::error::{Error, Result};
use crate::graph::{k_core_decomposition, DirectedEdgeIndex, Graph};
use crate::spectral::{leading_eigenpair, mu_factor, EigenOptions};

pub const DEFAULT_CAP: usize = 400;

/// Eigenvalues closer than this are treated as one (possibly multiple) eigenvalue.
const CLUSTER_TOL: f64 = 1e-6;
/// Largest admissible condition number of the eigenvector basis.
const MAX_CONDITION: f64 = 1e10;
/// A `t` this close to an eigenvalue of `B'` is not evaluated.
const T_COLLISION: f64 = 1e-6;
const NONZERO_TOL: f64 = 1e-8;
const REAL_TOL: f64 = 1e-8;
const SCHUR_RETRIES: usize = 8;

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { size, cap })
    } else {
        Ok(())
    }
}

fn nb_matrix(g: &Graph, idx: &DirectedEdgeIndex) -> DMatrix<f64> {
    let dim = idx.len();
    let mut b = DMatrix::zeros(dim, dim);
    for (col, &(i, j)) in idx.edges().iter().enumerate() {
        for (&l, &row) in g.neighbors(j).iter().zip(idx.out_edges(j)) {
            if l != i {
                b[(row, col)] = 1.0;
            }
        }
    }
    b
}

/// Dense NB-matrix in canonical directed-edge order.
pub fn dense_nb_matrix(g: &Graph, cap: usize) -> Result<DMatrix<f64>> {
    check_cap(2 * g.m(), cap)?;
    Ok(nb_matrix(g, &DirectedEdgeIndex::new(g)))
}

/// Dense edge-reversal permutation `P`.
pub fn dense_reversal(g: &Graph, cap: usize) -> Result<DMatrix<f64>> {
    check_cap(2 * g.m(), cap)?;
    let dim = 2 * g.m();
    Ok(DMatrix::from_fn(dim, dim, |r, c| if r == (c ^ 1) { 1.0 } else { 0.0 }))
}

/// Dense `B_aux = [[0, D - I], [-I, A]]`.
pub fn dense_aux(g: &Graph, cap: usize) -> Result<DMatrix<f64>> {
    let n = g.n();
    check_cap(2 * n, cap)?;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for u in 0..n {
        m[(u, n + u)] = g.degree(u) as f64 - 1.0;
        m[(n + u, u)] = -1.0;
        for &v in g.neighbors(u) {
            m[(n + u, n + v)] = 1.0;
        }
    }
    Ok(m)
}

/// Block decomposition of `B` around a target node.
#[derive(Debug, Clone)]
pub struct DenseBlocks {
    pub target: usize,
    /// Degree of the target.
    pub degree: usize,
    /// Canonical indices of edges not touching the target, in canonical order.
    pub outside: Vec<usize>,
    /// Canonical indices of edges touching the target.
    pub incident: Vec<usize>,
    pub b: DMatrix<f64>,
    pub b_prime: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub x: DMatrix<f64>,
    /// Reversal on the full edge set.
    pub p: DMatrix<f64>,
    /// Reversal restricted to edges not touching the target.
    pub p_prime: DMatrix<f64>,
    index: DirectedEdgeIndex,
}

impl DenseBlocks {
    pub fn new(g: &Graph, c: usize, cap: usize) -> Result<Self> {
        g.check_node(c)?;
        check_cap(2 * g.m(), cap)?;
        let index = DirectedEdgeIndex::new(g);
        let b = nb_matrix(g, &index);
        let (incident, outside): (Vec<usize>, Vec<usize>) = (0..index.len()).partition(|&k| {
            let (u, v) = index.edge(k);
            u == c || v == c
        });
        let block = |rows: &[usize], cols: &[usize]| b.select_rows(rows).select_columns(cols);
        let b_prime = block(&outside, &outside);
        let d = block(&outside, &incident);
        let e = block(&incident, &outside);
        let f = block(&incident, &incident);
        let x = &d * &f * &e;
        let p = dense_reversal(g, cap)?;
        let p_prime = p.select_rows(&outside).select_columns(&outside);
        Ok(DenseBlocks {
            target: c,
            degree: g.degree(c),
            outside,
            incident,
            b,
            b_prime,
            d,
            e,
            f,
            x,
            p,
            p_prime,
            index,
        })
    }

    /// `(source, target)` of the edge at position `k` of the outside block.
    pub fn outside_edge(&self, k: usize) -> (usize, usize) {
        self.index.edge(self.outside[k])
    }

    /// `X[k -> l, i -> j] = a_ck a_cj (1 - [k = j])`, built from adjacency alone.
    pub fn x_formula(&self, g: &Graph) -> DMatrix<f64> {
        let c = self.target;
        let dim = self.outside.len();
        DMatrix::from_fn(dim, dim, |r, s| {
            let (k, _) = self.outside_edge(r);
            let (_, j) = self.outside_edge(s);
            if k != j && g.has_edge(c, k) && g.has_edge(c, j) {
                1.0
            } else {
                0.0
            }
        })
    }

    /// `[[B', D], [E, F]]` as one matrix, outside edges first.
    pub fn reassembled(&self) -> DMatrix<f64> {
        let (o, i) = (self.outside.len(), self.incident.len());
        let mut m = DMatrix::zeros(o + i, o + i);
        m.view_mut((0, 0), (o, o)).copy_from(&self.b_prime);
        m.view_mut((0, o), (o, i)).copy_from(&self.d);
        m.view_mut((o, 0), (i, o)).copy_from(&self.e);
        m.view_mut((o, o), (i, i)).copy_from(&self.f);
        m
    }

    /// `B` with rows and columns permuted to the outside-then-incident order.
    pub fn permuted_b(&self) -> DMatrix<f64> {
        let order: Vec<usize> = self.outside.iter().chain(&self.incident).copied().collect();
        self.b.select_rows(&order).select_columns(&order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockIdentities {
    pub de_zero: bool,
    pub f_squared_zero: bool,
    /// `(F - I)(F + I) = -I`.
    pub f_shift_identity: bool,
    pub x_matches_formula: bool,
    pub pb_symmetric: bool,
    pub reassembles: bool,
    pub x_zero: bool,
}

impl BlockIdentities {
    pub fn all_hold(&self) -> bool {
        self.de_zero
            && self.f_squared_zero
            && self.f_shift_identity
            && self.x_matches_formula
            && self.pb_symmetric
            && self.reassembles
    }
}

fn is_zero(m: &DMatrix<f64>) -> bool {
    m.iter().all(|&v| v == 0.0)
}

/// Exact structural identities of the block decomposition around `c`.
pub fn block_identities(g: &Graph, c: usize, cap: usize) -> Result<BlockIdentities> {
    let blk = DenseBlocks::new(g, c, cap)?;
    let k = blk.f.nrows();
    let id = DMatrix::<f64>::identity(k, k);
    let shifted = (&blk.f - &id) * (&blk.f + &id);
    let pb = &blk.p * &blk.b;
    Ok(BlockIdentities {
        de_zero: is_zero(&(&blk.d * &blk.e)),
        f_squared_zero: is_zero(&(&blk.f * &blk.f)),
        f_shift_identity: shifted == -id,
        x_matches_formula: blk.x == blk.x_formula(g),
        pb_symmetric: pb == pb.transpose(),
        reassembles: blk.reassembled() == blk.permuted_b(),
        x_zero: is_zero(&blk.x),
    })
}

/// `(log |det m|, sign det m)` by LU with partial pivoting. A singular matrix gives `(-inf, 0)`.
pub fn log_det(m: &DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 0 {
        return (0.0, 1.0);
    }
    let (p, _, u) = m.clone().lu().unpack();
    let mut log = 0.0;
    let mut sign: f64 = p.determinant();
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if d == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        log += d.abs().ln();
        sign *= d.signum();
    }
    (log, sign)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharRatioReport {
    pub max_rel_error: f64,
    pub evaluated: Vec<f64>,
    /// Samples equal to 0 or too close to an eigenvalue of `B'`.
    pub skipped: Vec<f64>,
}

/// Compares `det(B - tI) / det(B' - tI)` with `t^{2d} det(I + (B' - tI)^{-1} X / t^2)`
/// at each sample, in log-magnitude form.
pub fn char_poly_ratio_check(g: &Graph, c: usize, ts: &[f64], cap: usize) -> Result<CharRatioReport> {
    let blk = DenseBlocks::new(g, c, cap)?;
    let spectrum = eigenvalues(&blk.b_prime);
    let dim = blk.b_prime.nrows();
    let mut report = CharRatioReport {
        max_rel_error: 0.0,
        evaluated: Vec::new(),
        skipped: Vec::new(),
    };
    for &t in ts {
        if t == 0.0 || spectrum.iter().any(|z| (z - t).norm() < T_COLLISION) {
            report.skipped.push(t);
            continue;
        }
        let shift = |m: &DMatrix<f64>| m - DMatrix::<f64>::identity(m.nrows(), m.nrows()) * t;
        let (lb, sb) = log_det(&shift(&blk.b));
        let bp = shift(&blk.b_prime);
        let (lp, sp) = log_det(&bp);
        let solved = bp
            .clone()
            .lu()
            .solve(&blk.x)
            .ok_or_else(|| Error::Conditioning(format!("B' - {t} I is singular")))?;
        let inner = DMatrix::<f64>::identity(dim, dim) + solved / (t * t);
        let (li, si) = log_det(&inner);
        let lhs = (lb - lp, sb * sp);
        let rhs = (2.0 * blk.degree as f64 * t.abs().ln() + li, si);
        let err = if lhs.1 == 0.0 && rhs.1 == 0.0 {
            0.0
        } else {
            (lhs.1 * rhs.1 * (lhs.0 - rhs.0).exp() - 1.0).abs()
        };
        report.max_rel_error = report.max_rel_error.max(err);
        report.evaluated.push(t);
    }
    Ok(report)
}

/// All eigenvalues of a real square matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let n = m.nrows();
    let budget = 200 * n.max(10);
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, budget) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    // The shifted QR iteration can cycle on highly structured 0/1 matrices.
    // A random orthogonal similarity breaks the symmetry without moving the spectrum.
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    for _ in 0..SCHUR_RETRIES {
        let q = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5).qr().q();
        let rotated = q.transpose() * m * &q;
        if let Some(s) = Schur::try_new(rotated, f64::EPSILON, budget) {
            return s.complex_eigenvalues().iter().copied().collect();
        }
    }
    panic!("Schur decomposition of a {n}x{n} matrix did not converge");
}

/// Largest real eigenvalue, i.e. the Perron root of a non-negative matrix; 0 for an empty matrix.
pub fn perron_root(m: &DMatrix<f64>) -> f64 {
    eigenvalues(m)
        .into_iter()
        .filter(|z| z.im.abs() < REAL_TOL)
        .map(|z| z.re)
        .fold(0.0, f64::max)
}

fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Right singular vector of the smallest singular value, and that singular value.
fn real_null_vector(m: &DMatrix<f64>) -> (DVector<f64>, f64) {
    let svd = m.clone().svd(false, true);
    let last = svd.singular_values.len() - 1;
    let vt = svd.v_t.expect("requested");
    (vt.row(last).transpose(), svd.singular_values[last])
}

/// Eigen-decomposition `M = R diag(values) L` with `L = R^{-1}`.
#[derive(Debug, Clone)]
pub struct DenseEigen {
    /// Eigenvalue of each column of `r`.
    pub values: Vec<Complex64>,
    pub r: DMatrix<Complex64>,
    pub l: DMatrix<Complex64>,
    /// Column groups sharing one eigenvalue.
    pub clusters: Vec<Vec<usize>>,
    /// Index into `clusters` of the largest real eigenvalue.
    pub perron: usize,
    pub condition: f64,
    /// `max |M R - R diag(values)|`.
    pub residual: f64,
}

impl DenseEigen {
    /// Fails with a conditioning error if some eigenvalue is defective or the
    /// basis is too ill-conditioned to invert.
    pub fn new(m: &DMatrix<f64>) -> Result<Self> {
        let dim = m.nrows();
        if dim == 0 {
            return Err(Error::Conditioning("empty matrix".into()));
        }
        let mut raw = eigenvalues(m);
        for z in &mut raw {
            if z.im.abs() < 1e-9 {
                z.im = 0.0;
                let r = z.re.round();
                if (z.re - r).abs() < 1e-9 {
                    z.re = r;
                }
            }
        }
        let groups = cluster(&raw);
        let mc = to_complex(m);
        let scale = m.norm().max(1.0);
        let mut columns = Vec::with_capacity(dim);
        let mut values = Vec::with_capacity(dim);
        let mut clusters = Vec::with_capacity(groups.len());
        for group in groups {
            let k = group.len();
            let center = group.iter().map(|&i| raw[i]).sum::<Complex64>() / k as f64;
            let shifted = &mc - DMatrix::<Complex64>::identity(dim, dim) * center;
            let svd = shifted.svd(false, true);
            let vt = svd.v_t.expect("requested");
            let sv = &svd.singular_values;
            if sv[dim - k] > CLUSTER_TOL * scale {
                return Err(Error::Conditioning(format!(
                    "eigenvalue {center} has fewer than {k} independent eigenvectors"
                )));
            }
            let start = columns.len();
            for row in dim - k..dim {
                columns.push(vt.row(row).adjoint());
                values.push(center);
            }
            clusters.push((start..start + k).collect::<Vec<_>>());
        }
        let r = DMatrix::from_columns(&columns);
        let sv = r.clone().svd(false, false).singular_values;
        let condition = sv.max() / sv.min();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Conditioning(format!(
                "eigenvector basis has condition number {condition:e}"
            )));
        }
        let l = r
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Conditioning("eigenvector basis is singular".into()))?;
        let perron = (0..clusters.len())
            .filter(|&i| values[clusters[i][0]].im.abs() < REAL_TOL)
            .max_by(|&a, &b| {
                values[clusters[a][0]]
                    .re
                    .total_cmp(&values[clusters[b][0]].re)
            })
            .ok_or_else(|| Error::Conditioning("no real eigenvalue".into()))?;
        let lam = DMatrix::from_diagonal(&DVector::from_vec(values.clone()));
        let residual = (&mc * &r - &r * lam).camax();
        Ok(DenseEigen {
            values,
            r,
            l,
            clusters,
            perron,
            condition,
            residual,
        })
    }

    pub fn perron_value(&self) -> f64 {
        self.values[self.clusters[self.perron][0]].re
    }

    /// Replaces one Perron column by `v` (a vector in the Perron eigenspace)
    /// and re-inverts. Returns the column index now holding `v`.
    fn pin_perron(&mut self, coeffs: &DVector<Complex64>, v: DVector<Complex64>) -> Result<usize> {
        let col = *self.clusters[self.perron]
            .iter()
            .max_by(|&&a, &&b| coeffs[a].norm().total_cmp(&coeffs[b].norm()))
            .unwrap();
        self.r.set_column(col, &v);
        self.l = self
            .r
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Conditioning("eigenvector basis is singular".into()))?;
        Ok(col)
    }
}

/// Single-linkage clustering of eigenvalues within `CLUSTER_TOL`.
fn cluster(values: &[Complex64]) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() < CLUSTER_TOL {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut label, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

/// Terms of the exact eigen-drop expansion in the eigenbasis of `B'`.
#[derive(Debug, Clone)]
pub struct EigenDropExpansion {
    pub lambda1: f64,
    pub lambda1_prime: f64,
    /// `lambda1 - lambda1'` from the two dense spectra.
    pub true_drop: f64,
    /// `(1 / lambda1^2) sum_i (w_i / w_1) alpha_i`.
    pub sum: Complex64,
    /// `alpha_1 / lambda1^2`.
    pub dominant_term: f64,
    /// `w_i / w_1` per basis vector, Perron vector first.
    pub weights: Vec<Complex64>,
    /// `alpha_i = u_1^T X v_i`, Perron vector first.
    pub alphas: Vec<Complex64>,
    pub perron_multiplicity: usize,
    /// `q = sum_i (w_i / w_1) alpha_i`.
    pub q: Complex64,
    /// `e_1^T L P R w` with `w_1 = 1`.
    pub correction: Complex64,
    /// `min singular value of B' - lambda1 I + X / lambda1^2`.
    pub w_residual: f64,
}

/// Exact eigen-drop through the full eigenbasis of `B'`.
///
/// `w` spans the kernel of `B' - lambda1 I + X / lambda1^2`. When the Perron
/// root of `B'` is not simple, `v_1` is taken as the projection of `w` onto
/// the Perron eigenspace, which keeps `u_1^T v_i = 0` for every other basis vector.
pub fn eigen_drop_expansion(g: &Graph, c: usize, cap: usize) -> Result<EigenDropExpansion> {
    let blk = DenseBlocks::new(g, c, cap)?;
    let lambda1 = perron_root(&blk.b);
    if lambda1 <= 0.0 {
        return Err(Error::DegenerateSpectrum { lambda1 });
    }
    let mut eig = DenseEigen::new(&blk.b_prime)?;
    let dim = blk.b_prime.nrows();
    let m = &blk.b_prime - DMatrix::<f64>::identity(dim, dim) * lambda1 + &blk.x / (lambda1 * lambda1);
    let (w, w_residual) = real_null_vector(&m);
    let w = w.map(|x| Complex64::new(x, 0.0));

    let coeffs = &eig.l * &w;
    let mut v1 = DVector::<Complex64>::zeros(dim);
    for &i in &eig.clusters[eig.perron] {
        v1 += eig.r.column(i) * coeffs[i];
    }
    if v1.norm() < 1e-12 * w.norm() {
        return Err(Error::Conditioning("w has no component along the Perron eigenspace".into()));
    }
    let first = eig.pin_perron(&coeffs, v1)?;
    let coeffs = &eig.l * &w;
    let w1 = coeffs[first];

    let xc = to_complex(&blk.x);
    let u1 = eig.l.row(first).into_owned();
    let alphas_row = &u1 * &xc * &eig.r;
    let order: Vec<usize> = std::iter::once(first).chain((0..dim).filter(|&i| i != first)).collect();
    let weights: Vec<Complex64> = order.iter().map(|&i| coeffs[i] / w1).collect();
    let alphas: Vec<Complex64> = order.iter().map(|&i| alphas_row[i]).collect();
    let q: Complex64 = weights.iter().zip(&alphas).map(|(w, a)| w * a).sum();
    let lam2 = lambda1 * lambda1;

    let pw = to_complex(&blk.p_prime) * (&w / w1);
    let correction = (&u1 * pw)[0];

    let lambda1_prime = eig.perron_value();
    Ok(EigenDropExpansion {
        lambda1,
        lambda1_prime,
        true_drop: lambda1 - lambda1_prime,
        sum: q / lam2,
        dominant_term: alphas[0].re / lam2,
        weights,
        alphas,
        perron_multiplicity: eig.clusters[eig.perron].len(),
        q,
        correction,
        w_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBoundReport {
    pub q: f64,
    /// `1^T P X 1`, which equals the X-degree of the target.
    pub x_degree_bound: f64,
    /// True Frobenius norm of `P X`.
    pub frobenius: f64,
    pub correction: f64,
    /// `q <= x_degree_bound * correction` within `1e-8`.
    pub holds: bool,
}

pub fn qbound_check(g: &Graph, c: usize, cap: usize) -> Result<QBoundReport> {
    let blk = DenseBlocks::new(g, c, cap)?;
    let px = &blk.p_prime * &blk.x;
    let bound = px.sum();
    debug_assert_eq!(bound, x_degree_exact(g, c) as f64);
    let frobenius = px.norm();
    if bound == 0.0 {
        return Ok(QBoundReport {
            q: 0.0,
            x_degree_bound: 0.0,
            frobenius,
            correction: 1.0,
            holds: true,
        });
    }
    let expansion = eigen_drop_expansion(g, c, cap)?;
    let (q, correction) = (expansion.q.re, expansion.correction.re);
    Ok(QBoundReport {
        q,
        x_degree_bound: bound,
        frobenius,
        correction,
        holds: q <= bound * correction + 1e-8,
    })
}

/// Removes, until none is left, every index whose row or column is zero in
/// the remaining submatrix. Each such index only contributes a zero eigenvalue,
/// so the non-zero spectrum is unchanged.
pub fn peel_zero_lines(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut active: Vec<usize> = (0..m.nrows()).collect();
    loop {
        let keep: Vec<usize> = active
            .iter()
            .copied()
            .filter(|&i| {
                active.iter().any(|&j| m[(i, j)] != 0.0) && active.iter().any(|&j| m[(j, i)] != 0.0)
            })
            .collect();
        if keep.len() == active.len() {
            break;
        }
        active = keep;
    }
    m.select_rows(&active).select_columns(&active)
}

/// Non-zero eigenvalues (modulus above `1e-8`) after peeling.
pub fn nonzero_spectrum(m: &DMatrix<f64>) -> Vec<Complex64> {
    eigenvalues(&peel_zero_lines(m))
        .into_iter()
        .filter(|z| z.norm() > NONZERO_TOL)
        .collect()
}

/// Hausdorff distance between two finite point sets in the complex plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_way(a, b).max(one_way(b, a))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShellSpectrumReport {
    pub count_before: usize,
    pub count_after: usize,
    pub hausdorff: f64,
    pub holds: bool,
}

/// Non-zero NB-spectra before and after removing a 1-shell node agree.
pub fn one_shell_spectrum_check(g: &Graph, c: usize, cap: usize) -> Result<ShellSpectrumReport> {
    g.check_node(c)?;
    if k_core_decomposition(g).core_index[c] != 1 {
        return Err(Error::Precondition(format!("node {c} is not in the 1-shell")));
    }
    let blk = DenseBlocks::new(g, c, cap)?;
    let before = nonzero_spectrum(&blk.b);
    let after = nonzero_spectrum(&blk.b_prime);
    let dist = if before.len() == after.len() {
        hausdorff(&before, &after)
    } else {
        f64::INFINITY
    };
    Ok(ShellSpectrumReport {
        count_before: before.len(),
        count_after: after.len(),
        hausdorff: dist,
        holds: dist <= 1e-8,
    })
}

/// The three expressions of the X-NB centrality of `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XnbFormsReport {
    pub lambda1_prime: f64,
    /// `u_1^T X v_1` with independent dense left and right vectors, `u_1^T v_1 = 1`.
    pub left_right: f64,
    /// `v_1^T P X v_1` with `v_1^T P v_1 = 1`.
    pub reversal: f64,
    /// Neighbor form with dense NB-centralities of `g - c`.
    pub node_form_dense: f64,
    /// Neighbor form from the sparse solver.
    pub node_form_sparse: f64,
}

impl XnbFormsReport {
    pub fn max_rel_error(&self) -> f64 {
        let vals = [self.left_right, self.reversal, self.node_form_dense, self.node_form_sparse];
        let scale = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        (hi - lo) / scale
    }
}

fn perron_sign(v: &mut DVector<f64>) {
    if v.sum() < 0.0 {
        v.neg_mut();
    }
}

/// Requires `lambda1(g - c) > 1`.
pub fn xnb_forms_check(g: &Graph, c: usize, opts: EigenOptions, cap: usize) -> Result<XnbFormsReport> {
    let blk = DenseBlocks::new(g, c, cap)?;
    let lam = perron_root(&blk.b_prime);
    if lam <= 1.0 + 1e-9 {
        return Err(Error::DegenerateSpectrum { lambda1: lam });
    }
    let dim = blk.b_prime.nrows();
    let shift = DMatrix::<f64>::identity(dim, dim) * lam;
    let (mut v1, _) = real_null_vector(&(&blk.b_prime - &shift));
    perron_sign(&mut v1);
    v1 /= v1.dot(&(&blk.p_prime * &v1)).sqrt();
    let (mut u1, _) = real_null_vector(&(blk.b_prime.transpose() - &shift));
    u1 /= u1.dot(&v1);

    let mut v_bar = vec![0.0; g.n()];
    for (k, &x) in v1.iter().enumerate() {
        v_bar[blk.outside_edge(k).1] += x;
    }
    Ok(XnbFormsReport {
        lambda1_prime: lam,
        left_right: u1.dot(&(&blk.x * &v1)),
        reversal: v1.dot(&(&blk.p_prime * &blk.x * &v1)),
        node_form_dense: neighbor_quadratic_form(g, c, |i| v_bar[i]),
        node_form_sparse: x_nb_exact(g, c, opts)?.value,
    })
}

/// Normalization identities of the leading eigenpair, checked densely.
#[derive(Debug, Clone, PartialEq)]
pub struct NormIdentityReport {
    pub lambda1: f64,
    /// `||v_bar||` with `v_bar` the in-sums of the dense Perron vector, `v^T P v = 1`.
    pub norm_v_bar: f64,
    /// `mu ||f||` with `f` from the dense unit left Perron vector of `B_aux`.
    pub mu_norm_f: f64,
    /// `max |second half + lambda1 * first half|` of that left vector.
    pub aux_structure_error: f64,
    /// `||B^T P v - lambda1 P v||`.
    pub left_residual: f64,
    /// `max |v_bar_dense - v_bar_sparse|`.
    pub sparse_max_diff: f64,
}

/// Requires `lambda1(g) > 1`.
pub fn norm_identity_check(g: &Graph, opts: EigenOptions, cap: usize) -> Result<NormIdentityReport> {
    let b = dense_nb_matrix(g, cap)?;
    let p = dense_reversal(g, cap)?;
    let lam = perron_root(&b);
    if lam <= 1.0 + 1e-9 {
        return Err(Error::DegenerateSpectrum { lambda1: lam });
    }
    let dim = b.nrows();
    let (mut v, _) = real_null_vector(&(&b - DMatrix::<f64>::identity(dim, dim) * lam));
    perron_sign(&mut v);
    v /= v.dot(&(&p * &v)).sqrt();
    let idx = DirectedEdgeIndex::new(g);
    let mut v_bar = vec![0.0; g.n()];
    for (k, &x) in v.iter().enumerate() {
        v_bar[idx.edge(k).1] += x;
    }

    let aux = dense_aux(g, cap)?;
    let n = g.n();
    let (mut y, _) = real_null_vector(&(aux.transpose() - DMatrix::<f64>::identity(2 * n, 2 * n) * lam));
    if y.rows(0, n).sum() < 0.0 {
        y.neg_mut();
    }
    y /= y.norm();
    let f: Vec<f64> = y.rows(0, n).iter().copied().collect();
    let aux_structure_error = (0..n)
        .map(|i| (y[n + i] + lam * y[i]).abs())
        .fold(0.0, f64::max);
    let mu = mu_factor(g, lam, &f);
    let norm_f = f.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pv = &p * &v;
    let left_residual = (b.transpose() * &pv - &pv * lam).norm();
    let sparse = leading_eigenpair(g, opts);
    let sparse_max_diff = v_bar
        .iter()
        .zip(&sparse.v_bar)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(NormIdentityReport {
        lambda1: lam,
        norm_v_bar: v_bar.iter().map(|x| x * x).sum::<f64>().sqrt(),
        mu_norm_f: mu * norm_f,
        aux_structure_error,
        left_residual,
        sparse_max_diff,
    })
}

//! Node statistics that rank nodes by their effect on the leading NB-eigenvalue.
//!
//! All X-centralities share one quadratic form over the neighbors of a target
//! node `c`: given per-node values `z^i`,
//! `Q_c(z) = (sum_{i ~ c} z^i)^2 - sum_{i ~ c} (z^i)^2`.
//! X-degree plugs in `z^i = d_i - 1`; X-NB plugs in the NB-centralities of
//! the graph after `c` is removed (exact) or before (approximate).

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{k_core_decomposition, remove_node, DirectedEdgeIndex, Graph};
use crate::spectral::{leading_eigenpair, EigenOptions, SpectralResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CentralityKind {
    Degree,
    Core,
    Ci,
    Nb,
    Xdeg,
    XnbExact,
    XnbApprox,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 7] = [
        CentralityKind::Degree,
        CentralityKind::Core,
        CentralityKind::Ci,
        CentralityKind::Nb,
        CentralityKind::Xdeg,
        CentralityKind::XnbExact,
        CentralityKind::XnbApprox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Core => "core",
            CentralityKind::Ci => "ci",
            CentralityKind::Nb => "nb",
            CentralityKind::Xdeg => "xdeg",
            CentralityKind::XnbExact => "xnb_exact",
            CentralityKind::XnbApprox => "xnb_approx",
        }
    }
}

impl fmt::Display for CentralityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CentralityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CentralityKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown centrality {s:?}")))
    }
}

/// Scores for one statistic over all nodes, with the spectrum they came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityVector {
    pub kind: CentralityKind,
    pub scores: Vec<f64>,
    /// Leading eigenvalue used, for spectral kinds.
    pub lambda1: Option<f64>,
    /// Any score was produced under a degenerate (`lambda1 <= 1`) spectrum.
    pub degenerate: bool,
    pub converged: bool,
}

/// A value of X-NB centrality together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XnbScore {
    pub value: f64,
    /// The spectrum used had `lambda1 <= 1`.
    pub degenerate: bool,
    pub converged: bool,
}

/// `(sum_{i ~ c} z[i])^2 - sum_{i ~ c} z[i]^2`.
pub fn neighbor_quadratic_form(g: &Graph, c: usize, z: impl Fn(usize) -> f64) -> f64 {
    let (s, q) = g.neighbors(c).iter().fold((0.0, 0.0), |(s, q), &i| {
        let x = z(i);
        (s + x, q + x * x)
    });
    s * s - q
}

pub(crate) fn x_degree_exact(g: &Graph, c: usize) -> u64 {
    let (s, q) = g.neighbors(c).iter().fold((0u64, 0u64), |(s, q), &i| {
        let x = g.degree(i) as u64 - 1;
        (s + x, q + x * x)
    });
    s * s - q
}

/// X-degree `(sum_i a_ci (d_i - 1))^2 - sum_i a_ci (d_i - 1)^2` with degrees
/// taken in `g` itself.
pub fn x_degree(g: &Graph, c: usize) -> Result<f64> {
    g.check_node(c)?;
    Ok(x_degree_exact(g, c) as f64)
}

pub fn x_degree_all(g: &Graph) -> Vec<f64> {
    (0..g.n()).map(|c| x_degree_exact(g, c) as f64).collect()
}

/// Collective Influence `(d_c - 1) sum_j a_cj (d_j - 1)`.
pub fn collective_influence(g: &Graph, c: usize) -> Result<f64> {
    g.check_node(c)?;
    Ok(ci_value(g, c))
}

fn ci_value(g: &Graph, c: usize) -> f64 {
    let d = g.degree(c);
    if d == 0 {
        return 0.0;
    }
    let s: usize = g.neighbors(c).iter().map(|&j| g.degree(j) - 1).sum();
    ((d - 1) * s) as f64
}

pub fn collective_influence_all(g: &Graph) -> Vec<f64> {
    (0..g.n()).map(|c| ci_value(g, c)).collect()
}

/// X-NB centrality of `c` from the NB-centralities of `g - c`.
///
/// A remainder with empty 2-core yields 0 and the degeneracy flag. A remainder
/// whose 2-core is a union of cycles (`lambda1' = 1`) is evaluated with the
/// orientation-symmetric Perron vector and also flagged.
pub fn x_nb_exact(g: &Graph, c: usize, opts: EigenOptions) -> Result<XnbScore> {
    let h = remove_node(g, c)?;
    let s = leading_eigenpair(&h, opts);
    Ok(XnbScore {
        value: if s.lambda1 == 0.0 {
            0.0
        } else {
            neighbor_quadratic_form(g, c, |i| s.v_bar[i])
        },
        degenerate: s.degenerate,
        converged: s.converged,
    })
}

/// [`x_nb_exact`] for every node; one eigen-solve per node, run in parallel.
pub fn x_nb_exact_all(g: &Graph, opts: EigenOptions) -> Vec<XnbScore> {
    (0..g.n())
        .into_par_iter()
        .map(|c| x_nb_exact(g, c, opts).expect("node in range"))
        .collect()
}

/// X-NB centrality evaluated with the NB-centralities of `g` itself.
pub fn x_nb_approx(g: &Graph, c: usize, spectral: &SpectralResult) -> Result<XnbScore> {
    g.check_node(c)?;
    check_spectral(g, spectral)?;
    Ok(XnbScore {
        value: approx_value(g, c, spectral),
        degenerate: spectral.degenerate,
        converged: spectral.converged,
    })
}

fn check_spectral(g: &Graph, spectral: &SpectralResult) -> Result<()> {
    if spectral.v_bar.len() != g.n() {
        return Err(Error::Dimension {
            expected: g.n(),
            got: spectral.v_bar.len(),
        });
    }
    Ok(())
}

fn approx_value(g: &Graph, c: usize, spectral: &SpectralResult) -> f64 {
    if spectral.lambda1 == 0.0 {
        0.0
    } else {
        neighbor_quadratic_form(g, c, |i| spectral.v_bar[i])
    }
}

pub fn x_nb_approx_all(g: &Graph, spectral: &SpectralResult) -> Result<Vec<f64>> {
    check_spectral(g, spectral)?;
    Ok((0..g.n()).map(|c| approx_value(g, c, spectral)).collect())
}

/// First-order prediction of the post-removal eigenvalue, `lambda1 - alpha / lambda1^2`.
pub fn predicted_lambda(lambda1: f64, alpha: f64) -> Result<f64> {
    if !(lambda1 > 0.0) {
        return Err(Error::Domain(format!(
            "predicted eigenvalue needs lambda1 > 0, got {lambda1}"
        )));
    }
    Ok(lambda1 - alpha / (lambda1 * lambda1))
}

/// A value per directed edge of a graph, with per-node in-sums `z^i = sum_j z[j -> i]`.
#[derive(Debug, Clone)]
pub struct EdgeStatVector {
    pub z: Vec<f64>,
    pub z_node: Vec<f64>,
    index: DirectedEdgeIndex,
}

impl EdgeStatVector {
    pub fn new(g: &Graph, z: Vec<f64>) -> Result<Self> {
        let index = DirectedEdgeIndex::new(g);
        if z.len() != index.len() {
            return Err(Error::Dimension {
                expected: index.len(),
                got: z.len(),
            });
        }
        let z_node = (0..g.n())
            .map(|u| index.out_edges(u).iter().map(|&e| z[e ^ 1]).sum())
            .collect();
        Ok(EdgeStatVector { z, z_node, index })
    }

    fn len(&self) -> usize {
        self.z.len()
    }

    /// `z^i` with the edge `c -> i` left out.
    fn excluding(&self, g: &Graph, c: usize, i: usize) -> f64 {
        let e = self.index.index_of(g, c, i).expect("i is a neighbor of c");
        self.z_node[i] - self.z[e]
    }
}

fn check_stat(g: &Graph, c: usize, z: &EdgeStatVector) -> Result<()> {
    g.check_node(c)?;
    if z.len() != 2 * g.m() {
        return Err(Error::Dimension {
            expected: 2 * g.m(),
            got: z.len(),
        });
    }
    Ok(())
}

/// `z^T P X z` for target `c`, using only entries on edges not incident to `c`.
pub fn x_centrality_generic(g: &Graph, c: usize, z: &EdgeStatVector) -> Result<f64> {
    check_stat(g, c, z)?;
    Ok(neighbor_quadratic_form(g, c, |i| z.excluding(g, c, i)))
}

/// Returns `(z^T P X z, Var_c(z^i))`. They satisfy
/// `form = (d - 1) (sum z^i)^2 / d - d Var`.
pub fn variance_relation_check(g: &Graph, c: usize, z: &EdgeStatVector) -> Result<(f64, f64)> {
    check_stat(g, c, z)?;
    let d = g.degree(c);
    if d == 0 {
        return Err(Error::Domain(format!("node {c} has no neighbors")));
    }
    let vals: Vec<f64> = g.neighbors(c).iter().map(|&i| z.excluding(g, c, i)).collect();
    let s: f64 = vals.iter().sum();
    let q: f64 = vals.iter().map(|x| x * x).sum();
    let df = d as f64;
    let var = q / df - (s / df) * (s / df);
    Ok((s * s - q, var))
}

/// Computes one statistic for all nodes of `g`.
pub fn compute_centrality(g: &Graph, kind: CentralityKind, opts: EigenOptions) -> CentralityVector {
    let plain = |scores: Vec<f64>| CentralityVector {
        kind,
        scores,
        lambda1: None,
        degenerate: false,
        converged: true,
    };
    match kind {
        CentralityKind::Degree => plain(g.degrees().into_iter().map(|d| d as f64).collect()),
        CentralityKind::Core => plain(
            k_core_decomposition(g)
                .core_index
                .into_iter()
                .map(|k| k as f64)
                .collect(),
        ),
        CentralityKind::Ci => plain(collective_influence_all(g)),
        CentralityKind::Xdeg => plain(x_degree_all(g)),
        CentralityKind::Nb => {
            let s = leading_eigenpair(g, opts);
            CentralityVector {
                kind,
                lambda1: Some(s.lambda1),
                degenerate: s.degenerate,
                converged: s.converged,
                scores: s.v_bar,
            }
        }
        CentralityKind::XnbApprox => {
            let s = leading_eigenpair(g, opts);
            CentralityVector {
                kind,
                scores: x_nb_approx_all(g, &s).expect("spectrum computed on g"),
                lambda1: Some(s.lambda1),
                degenerate: s.degenerate,
                converged: s.converged,
            }
        }
        CentralityKind::XnbExact => {
            let all = x_nb_exact_all(g, opts);
            CentralityVector {
                kind,
                scores: all.iter().map(|s| s.value).collect(),
                lambda1: Some(leading_eigenpair(g, opts).lambda1),
                degenerate: all.iter().any(|s| s.degenerate),
                converged: all.iter().all(|s| s.converged),
            }
        }
    }
}

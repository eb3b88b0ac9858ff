//! Greedy targeted immunization: repeatedly remove the node with the largest
//! statistic and record how the leading NB-eigenvalue falls.
//!
//! Removed nodes are detached in place, so ids stay stable across rounds.
//! Ties go to the smallest id. Nodes whose score is 0 remain eligible.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use web_time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{collective_influence_all, x_degree_all, x_degree_exact, x_nb_approx_all, x_nb_exact};
use crate::error::{Error, Result};
use crate::graph::{k_core_decomposition, Graph};
use crate::ipq::IndexedPriorityQueue;
use crate::spectral::{leading_eigenpair, EigenOptions};

/// Relative gap under which two floating-point scores count as tied.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "degree")]
    Degree,
    #[serde(rename = "core")]
    Core,
    #[serde(rename = "ci")]
    Ci,
    #[serde(rename = "nb")]
    Nb,
    /// X-NB from the current graph's eigenvector (one eigen-solve per round).
    #[serde(rename = "xnb")]
    XnbApprox,
    /// X-NB with a temporary removal of every candidate (one eigen-solve per node per round).
    #[serde(rename = "xnb-naive")]
    XnbNaive,
    #[serde(rename = "xdeg")]
    Xdeg,
}

impl Strategy {
    pub const ALL: [Strategy; 7] = [
        Strategy::Degree,
        Strategy::Core,
        Strategy::Ci,
        Strategy::Nb,
        Strategy::XnbApprox,
        Strategy::XnbNaive,
        Strategy::Xdeg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Degree => "degree",
            Strategy::Core => "core",
            Strategy::Ci => "ci",
            Strategy::Nb => "nb",
            Strategy::XnbApprox => "xnb",
            Strategy::XnbNaive => "xnb-naive",
            Strategy::Xdeg => "xdeg",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown strategy {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Map,
    Ipq,
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(Backend::Map),
            "ipq" => Ok(Backend::Ipq),
            _ => Err(Error::Domain(format!("unknown backend {s:?}"))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Map => "map",
            Backend::Ipq => "ipq",
        })
    }
}

/// Which eigenvalues a run records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenTrace {
    /// Before the run and after every removal.
    Full,
    /// Before and after the run only.
    FinalOnly,
    /// None; used for timing.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImmunizeOptions {
    pub eigen: EigenOptions,
    pub trace: EigenTrace,
}

impl Default for ImmunizeOptions {
    fn default() -> Self {
        ImmunizeOptions {
            eigen: EigenOptions::default(),
            trace: EigenTrace::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImmunizationReport {
    pub strategy: Strategy,
    pub backend: Option<Backend>,
    pub requested: usize,
    pub removed: Vec<usize>,
    /// Statistic of each removed node at the time it was picked.
    pub scores: Vec<f64>,
    pub zero_score_removals: usize,
    pub lambda_before: Option<f64>,
    /// Eigenvalue after each removal (empty unless the trace is `Full`).
    pub lambda_after_each: Vec<f64>,
    pub lambda_after: Option<f64>,
    /// Seconds spent choosing and removing nodes, eigenvalue bookkeeping excluded.
    pub wall_time: f64,
    /// Round at which the approximate X-NB run switched to X-degree ranking.
    pub fallback_round: Option<usize>,
    /// `requested` exceeded the number of nodes.
    pub truncated: bool,
}

impl ImmunizationReport {
    /// `100 (lambda_before - lambda_after) / lambda_before`; 0 when `lambda_before = 0`.
    pub fn percentage_drop(&self) -> Option<f64> {
        let (before, after) = (self.lambda_before?, self.lambda_after?);
        Some(percentage_drop(before, after))
    }
}

pub fn percentage_drop(before: f64, after: f64) -> f64 {
    if before > 0.0 {
        100.0 * (before - after) / before
    } else {
        0.0
    }
}

/// `floor(percent * n / 100)`, at least 1.
pub fn percent_to_count(percent: f64, n: usize) -> usize {
    ((percent * n as f64 / 100.0).floor() as usize).max(1)
}

/// Smallest id among available nodes whose score is within `TIE_TOL` of the maximum.
fn select_max(scores: &[f64], removed: &[bool]) -> Option<(usize, f64)> {
    let best = scores
        .iter()
        .zip(removed)
        .filter(|(_, &r)| !r)
        .map(|(&s, _)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return None;
    }
    let floor = best - TIE_TOL * best.abs().max(1.0);
    (0..scores.len())
        .find(|&i| !removed[i] && scores[i] >= floor)
        .map(|i| (i, scores[i]))
}

struct Recorder {
    opts: ImmunizeOptions,
    report: ImmunizationReport,
}

impl Recorder {
    fn new(g: &Graph, strategy: Strategy, backend: Option<Backend>, p: usize, opts: ImmunizeOptions) -> Self {
        let lambda_before = match opts.trace {
            EigenTrace::Skip => None,
            _ => Some(leading_eigenpair(g, opts.eigen).lambda1),
        };
        Recorder {
            opts,
            report: ImmunizationReport {
                strategy,
                backend,
                requested: p,
                removed: Vec::new(),
                scores: Vec::new(),
                zero_score_removals: 0,
                lambda_before,
                lambda_after_each: Vec::new(),
                lambda_after: None,
                wall_time: 0.0,
                fallback_round: None,
                truncated: p > g.n(),
            },
        }
    }

    fn removed(&mut self, h: &Graph, node: usize, score: f64) {
        self.report.removed.push(node);
        self.report.scores.push(score);
        if score == 0.0 {
            self.report.zero_score_removals += 1;
        }
        if self.opts.trace == EigenTrace::Full {
            self.report
                .lambda_after_each
                .push(leading_eigenpair(h, self.opts.eigen).lambda1);
        }
    }

    fn finish(mut self, h: &Graph) -> ImmunizationReport {
        self.report.lambda_after = match self.opts.trace {
            EigenTrace::Skip => None,
            EigenTrace::Full => Some(
                self.report
                    .lambda_after_each
                    .last()
                    .copied()
                    .or(self.report.lambda_before)
                    .unwrap(),
            ),
            EigenTrace::FinalOnly => Some(leading_eigenpair(h, self.opts.eigen).lambda1),
        };
        self.report
    }
}

/// Shared loop: recompute `statistic` on the current graph, remove the argmax.
/// `statistic` returns the scores and whether it fell back to X-degree.
fn greedy<F>(g: &Graph, p: usize, strategy: Strategy, opts: ImmunizeOptions, mut statistic: F) -> ImmunizationReport
where
    F: FnMut(&Graph, &[bool]) -> (Vec<f64>, bool),
{
    let mut rec = Recorder::new(g, strategy, None, p, opts);
    let mut h = g.clone();
    let mut removed = vec![false; g.n()];
    for round in 0..p.min(g.n()) {
        let start = Instant::now();
        let (scores, fell_back) = statistic(&h, &removed);
        if fell_back && rec.report.fallback_round.is_none() {
            rec.report.fallback_round = Some(round);
        }
        let Some((node, score)) = select_max(&scores, &removed) else {
            break;
        };
        h.detach(node);
        removed[node] = true;
        rec.report.wall_time += start.elapsed().as_secs_f64();
        rec.removed(&h, node, score);
    }
    rec.finish(&h)
}

/// Naive X-NB: every round, every candidate is removed temporarily and its
/// exact X-NB centrality computed. Meant for small graphs.
pub fn immunize_naive_xnb(g: &Graph, p: usize, opts: ImmunizeOptions) -> ImmunizationReport {
    greedy(g, p, Strategy::XnbNaive, opts, |h, removed| {
        let scores = (0..h.n())
            .into_par_iter()
            .map(|c| {
                if removed[c] {
                    0.0
                } else {
                    x_nb_exact(h, c, opts.eigen).expect("node in range").value
                }
            })
            .collect();
        (scores, false)
    })
}

/// Approximate X-NB: one eigen-solve per round on the current graph. Once the
/// spectrum is degenerate (`lambda1 <= 1`) the remaining rounds rank by X-degree.
pub fn immunize_approx_xnb(g: &Graph, p: usize, opts: ImmunizeOptions) -> ImmunizationReport {
    let mut fallback = false;
    greedy(g, p, Strategy::XnbApprox, opts, |h, _| {
        if !fallback {
            let s = leading_eigenpair(h, opts.eigen);
            if !s.degenerate {
                return (x_nb_approx_all(h, &s).expect("spectrum of h"), false);
            }
            fallback = true;
        }
        (x_degree_all(h), true)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineKind {
    Degree,
    Core,
    Ci,
    Nb,
}

/// Baseline strategies; the statistic is recomputed on the current graph each round.
pub fn immunize_baseline(g: &Graph, p: usize, kind: BaselineKind, opts: ImmunizeOptions) -> ImmunizationReport {
    let strategy = match kind {
        BaselineKind::Degree => Strategy::Degree,
        BaselineKind::Core => Strategy::Core,
        BaselineKind::Ci => Strategy::Ci,
        BaselineKind::Nb => Strategy::Nb,
    };
    greedy(g, p, strategy, opts, |h, _| {
        let scores = match kind {
            BaselineKind::Degree => h.degrees().into_iter().map(|d| d as f64).collect(),
            BaselineKind::Core => k_core_decomposition(h)
                .core_index
                .into_iter()
                .map(|k| k as f64)
                .collect(),
            BaselineKind::Ci => collective_influence_all(h),
            BaselineKind::Nb => leading_eigenpair(h, opts.eigen).v_bar,
        };
        (scores, false)
    })
}

enum Store {
    Map(HashMap<usize, u64>),
    Ipq(IndexedPriorityQueue<u64>),
}

/// Incremental X-degree immunization.
///
/// After `node` is removed only the degrees of its neighbors change, so the
/// X-degrees that change are those of its neighbors and of their neighbors.
/// Only those are recomputed.
pub struct XDegreeImmunizer {
    graph: Graph,
    store: Store,
    stamp: Vec<usize>,
    round: usize,
}

impl XDegreeImmunizer {
    pub fn new(g: &Graph, backend: Backend) -> Self {
        let scores = (0..g.n()).map(|c| (c, x_degree_exact(g, c)));
        let store = match backend {
            Backend::Map => Store::Map(scores.collect()),
            Backend::Ipq => Store::Ipq(IndexedPriorityQueue::from_pairs(g.n(), scores)),
        };
        XDegreeImmunizer {
            graph: g.clone(),
            store,
            stamp: vec![usize::MAX; g.n()],
            round: 0,
        }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// The stored X-degree of a node that has not been removed.
    pub fn maintained(&self, id: usize) -> Option<u64> {
        match &self.store {
            Store::Map(m) => m.get(&id).copied(),
            Store::Ipq(q) => q.get(id),
        }
    }

    fn take_max(&mut self) -> Option<(usize, u64)> {
        match &mut self.store {
            Store::Map(m) => {
                let best = m
                    .iter()
                    .map(|(&id, &s)| (id, s))
                    .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))?;
                m.remove(&best.0);
                Some(best)
            }
            Store::Ipq(q) => q.pop(),
        }
    }

    fn set(&mut self, id: usize, s: u64) {
        match &mut self.store {
            Store::Map(m) => {
                if let Some(v) = m.get_mut(&id) {
                    *v = s;
                }
            }
            Store::Ipq(q) => {
                if q.contains(id) {
                    q.update(id, s).expect("queued id");
                }
            }
        }
    }

    /// Removes the node of largest X-degree and refreshes the affected scores.
    pub fn step(&mut self) -> Option<(usize, u64)> {
        let (node, score) = self.take_max()?;
        let nbrs = self.graph.neighbors(node).to_vec();
        self.graph.detach(node);
        self.round += 1;
        for &i in &nbrs {
            let touched = std::iter::once(i).chain(self.graph.neighbors(i).iter().copied());
            for j in touched.collect::<Vec<_>>() {
                if self.stamp[j] != self.round {
                    self.stamp[j] = self.round;
                    let s = x_degree_exact(&self.graph, j);
                    self.set(j, s);
                }
            }
        }
        Some((node, score))
    }
}

pub fn immunize_xdeg(g: &Graph, p: usize, backend: Backend, opts: ImmunizeOptions) -> ImmunizationReport {
    let mut rec = Recorder::new(g, Strategy::Xdeg, Some(backend), p, opts);
    let start = Instant::now();
    let mut run = XDegreeImmunizer::new(g, backend);
    let mut elapsed = start.elapsed().as_secs_f64();
    for _ in 0..p.min(g.n()) {
        let start = Instant::now();
        let Some((node, score)) = run.step() else {
            break;
        };
        elapsed += start.elapsed().as_secs_f64();
        rec.removed(run.graph(), node, score as f64);
    }
    rec.report.wall_time = elapsed;
    rec.finish(run.graph())
}

/// Runs `strategy`. `backend` only matters for X-degree.
pub fn immunize(g: &Graph, p: usize, strategy: Strategy, backend: Backend, opts: ImmunizeOptions) -> ImmunizationReport {
    match strategy {
        Strategy::Degree => immunize_baseline(g, p, BaselineKind::Degree, opts),
        Strategy::Core => immunize_baseline(g, p, BaselineKind::Core, opts),
        Strategy::Ci => immunize_baseline(g, p, BaselineKind::Ci, opts),
        Strategy::Nb => immunize_baseline(g, p, BaselineKind::Nb, opts),
        Strategy::XnbApprox => immunize_approx_xnb(g, p, opts),
        Strategy::XnbNaive => immunize_naive_xnb(g, p, opts),
        Strategy::Xdeg => immunize_xdeg(g, p, backend, opts),
    }
}

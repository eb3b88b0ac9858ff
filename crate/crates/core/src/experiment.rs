//! Experiment harnesses: eigen-drop prediction tables, strategy comparison and
//! runtime scaling of X-degree immunization.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::centrality::{collective_influence_all, neighbor_quadratic_form, x_degree_all};
use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorConfig};
use crate::graph::{remove_node, Graph};
use crate::immunization::{immunize_xdeg, Backend, EigenTrace, ImmunizeOptions};
use crate::spectral::{leading_eigenpair, EigenOptions};

/// Draws `draws` nodes with probability `d_i / 2m` each (uniform edge, then
/// uniform endpoint), with replacement. Returns the distinct nodes, ascending.
pub fn sample_degree_proportional<R: Rng>(g: &Graph, draws: usize, rng: &mut R) -> Result<Vec<usize>> {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut nodes: Vec<usize> = (0..draws)
        .map(|_| {
            let (u, v) = edges[rng.random_range(0..edges.len())];
            if rng.random::<bool>() {
                u
            } else {
                v
            }
        })
        .collect();
    nodes.sort_unstable();
    nodes.dedup();
    Ok(nodes)
}

/// Number of draws for a sampling fraction in `(0, 1]`: `ceil(fraction * n)`.
pub fn draws_for_fraction(fraction: f64, n: usize) -> Result<usize> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!("sample fraction {fraction} outside (0, 1]")));
    }
    Ok(((fraction * n as f64).ceil() as usize).max(1))
}

/// Prediction quality for one removed node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictRow {
    pub node: usize,
    pub degree: usize,
    pub lambda1: f64,
    /// Leading eigenvalue after removal.
    pub lambda_after: f64,
    pub drop: f64,
    /// Predicted eigenvalue from the exact X-NB centrality.
    pub lambda_hat: f64,
    /// Predicted eigenvalue from the approximate X-NB centrality.
    pub lambda_tilde: f64,
    pub alpha: f64,
    pub alpha_tilde: f64,
    pub x_degree: f64,
    pub ci: f64,
}

impl PredictRow {
    pub fn predicted_drop_hat(&self) -> f64 {
        self.lambda1 - self.lambda_hat
    }

    pub fn predicted_drop_tilde(&self) -> f64 {
        self.lambda1 - self.lambda_tilde
    }

    /// `|lambda_hat - lambda_after| / lambda_after`.
    pub fn rel_error_hat(&self) -> f64 {
        (self.lambda_hat - self.lambda_after).abs() / self.lambda_after
    }
}

/// Pearson correlation of each statistic with the true eigen-drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlations {
    pub x_nb_exact: f64,
    pub x_nb_approx: f64,
    pub x_degree: f64,
    pub degree: f64,
    pub ci: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictTable {
    pub lambda1: f64,
    pub rows: Vec<PredictRow>,
    pub correlations: Correlations,
}

/// Computes true and predicted eigen-drops for `nodes`. Fails when the
/// spectrum of `g` is degenerate (`lambda1 <= 1`).
pub fn predict(g: &Graph, nodes: &[usize], opts: EigenOptions) -> Result<PredictTable> {
    for &c in nodes {
        g.check_node(c)?;
    }
    let spec = leading_eigenpair(g, opts);
    if spec.degenerate {
        return Err(Error::DegenerateSpectrum { lambda1: spec.lambda1 });
    }
    let lam = spec.lambda1;
    let lam2 = lam * lam;
    let xdeg = x_degree_all(g);
    let ci = collective_influence_all(g);
    let rows: Vec<PredictRow> = nodes
        .par_iter()
        .map(|&c| {
            let h = remove_node(g, c).expect("checked above");
            let after = leading_eigenpair(&h, opts);
            let alpha = if after.lambda1 == 0.0 {
                0.0
            } else {
                neighbor_quadratic_form(g, c, |i| after.v_bar[i])
            };
            let alpha_tilde = neighbor_quadratic_form(g, c, |i| spec.v_bar[i]);
            PredictRow {
                node: c,
                degree: g.degree(c),
                lambda1: lam,
                lambda_after: after.lambda1,
                drop: lam - after.lambda1,
                lambda_hat: lam - alpha / lam2,
                lambda_tilde: lam - alpha_tilde / lam2,
                alpha,
                alpha_tilde,
                x_degree: xdeg[c],
                ci: ci[c],
            }
        })
        .collect();
    let drops: Vec<f64> = rows.iter().map(|r| r.drop).collect();
    let corr = |f: fn(&PredictRow) -> f64| pearson(&rows.iter().map(f).collect::<Vec<_>>(), &drops);
    let correlations = Correlations {
        x_nb_exact: corr(|r| r.alpha),
        x_nb_approx: corr(|r| r.alpha_tilde),
        x_degree: corr(|r| r.x_degree),
        degree: corr(|r| r.degree as f64),
        ci: corr(|r| r.ci),
    };
    Ok(PredictTable {
        lambda1: lam,
        rows,
        correlations,
    })
}

/// Sample Pearson correlation; NaN when either input has zero variance or
/// fewer than two points.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return f64::NAN;
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

/// One row of the runtime scaling table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub backend: Backend,
    pub repetitions: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// Times X-degree immunization on configuration-model graphs. Repetition `r`
/// of size `n` uses seed `seed + r`; both backends run on the same graphs.
/// Rows are ordered by `(n, backend)`.
pub fn scaling_experiment(
    gamma: f64,
    ns: &[usize],
    p: usize,
    seed: u64,
    repetitions: usize,
    backends: &[Backend],
) -> Result<Vec<ScalingRow>> {
    let opts = ImmunizeOptions {
        eigen: EigenOptions::default(),
        trace: EigenTrace::Skip,
    };
    let mut sizes = ns.to_vec();
    sizes.sort_unstable();
    let mut order = backends.to_vec();
    order.sort_by_key(|b| b.to_string());
    order.dedup();
    let mut rows = Vec::new();
    for &n in &sizes {
        let graphs = (0..repetitions)
            .map(|r| {
                let cfg = GeneratorConfig::ConfigPowerlaw { n, gamma, d_min: 1 };
                generate(&cfg, seed.wrapping_add(r as u64)).map(|s| s.graph)
            })
            .collect::<Result<Vec<_>>>()?;
        for &backend in &order {
            let times: Vec<f64> = graphs
                .iter()
                .map(|g| immunize_xdeg(g, p, backend, opts).wall_time)
                .collect();
            let (mean, std) = mean_std(&times);
            rows.push(ScalingRow {
                n,
                backend,
                repetitions,
                mean_seconds: mean,
                std_seconds: std,
            });
        }
    }
    Ok(rows)
}

/// Mean and sample standard deviation (0 for fewer than two values).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::rng_from_seed;
    use approx::assert_relative_eq;

    #[test]
    fn k4_prediction_row() {
        let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let t = predict(&g, &[0], EigenOptions::default()).unwrap();
        let r = &t.rows[0];
        assert_relative_eq!(r.drop, 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.predicted_drop_hat(), 1.0, epsilon = 1e-9);
        assert_relative_eq!(r.predicted_drop_tilde(), 1.125, epsilon = 1e-8);
    }

    #[test]
    fn degenerate_graph_is_rejected() {
        let c5 = Graph::from_edges(5, (0..5).map(|i| (i, (i + 1) % 5)));
        assert!(matches!(
            predict(&c5, &[0], EigenOptions::default()),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn pearson_examples() {
        assert!(pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_nan());
        assert_relative_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.5]), 0.9979487157886733, epsilon = 1e-12);
        assert_relative_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), -1.0);
    }

    #[test]
    fn sampling_hits_only_non_isolated_nodes() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (3, 4)]);
        let mut rng = rng_from_seed(9);
        let s = sample_degree_proportional(&g, 200, &mut rng).unwrap();
        assert_eq!(s, vec![0, 1, 2, 3, 4]);
        assert!(draws_for_fraction(0.0, 10).is_err());
        assert_eq!(draws_for_fraction(0.25, 10).unwrap(), 3);
    }

    #[test]
    fn sampling_frequency_follows_degree() {
        // star: the hub carries half of all endpoint mass
        let g = Graph::from_edges(9, (1..9).map(|i| (0, i)));
        let mut rng = rng_from_seed(4);
        let edges: Vec<_> = g.edges().collect();
        let hits = (0..20000)
            .filter(|_| {
                let (u, v) = edges[rng.random_range(0..edges.len())];
                (if rng.random::<bool>() { u } else { v }) == 0
            })
            .count();
        assert!((hits as f64 / 20000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn scaling_rows_are_ordered() {
        let rows = scaling_experiment(2.5, &[400, 200], 0, 1, 2, &[Backend::Map, Backend::Ipq]).unwrap();
        let keys: Vec<_> = rows.iter().map(|r| (r.n, r.backend)).collect();
        assert_eq!(
            keys,
            vec![(200, Backend::Ipq), (200, Backend::Map), (400, Backend::Ipq), (400, Backend::Map)]
        );
    }

    #[test]
    fn median_examples() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(median(&[]).is_nan());
    }
}

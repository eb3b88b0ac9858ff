//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every operation takes an edge list as text and returns JSON. The plain
//! Rust functions carry the logic so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use nbimmune::experiment::{draws_for_fraction, predict, sample_degree_proportional, Correlations};
use nbimmune::generate::{generate, rng_from_seed, GeneratorConfig};
use nbimmune::graph::{k_core_decomposition, load_edge_list_str, to_edge_list, LoadedGraph};
use nbimmune::immunization::{immunize, Backend, EigenTrace, ImmunizeOptions, Strategy};
use nbimmune::spectral::{leading_eigenpair, EigenOptions};

/// Largest graph the page will run the per-node strategies on.
const MAX_NODES: usize = 5000;

fn load(edges: &str) -> Result<LoadedGraph, String> {
    let loaded = load_edge_list_str(edges).map_err(|e| e.to_string())?;
    if loaded.graph.n() > MAX_NODES {
        return Err(format!("{} nodes; the demo accepts at most {MAX_NODES}", loaded.graph.n()));
    }
    Ok(loaded)
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

/// Random connected test graph as an edge list. `kind` is `er`, `ba`, `sbm` or `powerlaw`.
pub fn generate_edges(kind: &str, n: usize, seed: u64) -> Result<String, String> {
    let cfg = match kind {
        "er" => GeneratorConfig::Er {
            n,
            p: 4.0 / n.max(2) as f64,
        },
        "ba" => GeneratorConfig::Ba { n, attach: 2 },
        "sbm" => GeneratorConfig::Sbm {
            n,
            within: 4.0,
            between: 1.0,
        },
        "powerlaw" => GeneratorConfig::ConfigPowerlaw {
            n,
            gamma: 2.5,
            d_min: 2,
        },
        _ => return Err(format!("unknown generator {kind:?}")),
    };
    let sub = generate(&cfg, seed).map_err(|e| e.to_string())?;
    Ok(to_edge_list(&sub.graph))
}

#[derive(Serialize)]
struct SpectralView {
    n: usize,
    m: usize,
    lambda1: f64,
    degenerate: bool,
    ids: Vec<u64>,
    edges: Vec<(usize, usize)>,
    degree: Vec<usize>,
    core: Vec<usize>,
    centrality: Vec<f64>,
}

/// Leading NB-eigenvalue and per-node NB-centrality, with compact edges for drawing.
pub fn spectral(edges: &str) -> Result<String, String> {
    let loaded = load(edges)?;
    let g = &loaded.graph;
    let s = leading_eigenpair(g, EigenOptions::default());
    json(&SpectralView {
        n: g.n(),
        m: g.m(),
        lambda1: s.lambda1,
        degenerate: s.degenerate,
        ids: loaded.original_ids.clone(),
        edges: g.edges().collect(),
        degree: g.degrees(),
        core: k_core_decomposition(g).core_index,
        centrality: s.v_bar,
    })
}

#[derive(Serialize)]
struct PredictPoint {
    node: u64,
    degree: usize,
    true_drop: f64,
    predicted_exact: f64,
    predicted_approx: f64,
}

#[derive(Serialize)]
struct PredictView {
    lambda1: f64,
    points: Vec<PredictPoint>,
    correlations: Correlations,
}

/// True vs first-order predicted eigen-drops on degree-sampled nodes.
pub fn prediction_scatter(edges: &str, fraction: f64, seed: u64) -> Result<String, String> {
    let loaded = load(edges)?;
    let g = &loaded.graph;
    let draws = draws_for_fraction(fraction, g.n()).map_err(|e| e.to_string())?;
    let nodes = sample_degree_proportional(g, draws, &mut rng_from_seed(seed)).map_err(|e| e.to_string())?;
    let table = predict(g, &nodes, EigenOptions::default()).map_err(|e| e.to_string())?;
    json(&PredictView {
        lambda1: table.lambda1,
        points: table
            .rows
            .iter()
            .map(|r| PredictPoint {
                node: loaded.original_ids[r.node],
                degree: r.degree,
                true_drop: r.drop,
                predicted_exact: r.predicted_drop_hat(),
                predicted_approx: r.predicted_drop_tilde(),
            })
            .collect(),
        correlations: table.correlations,
    })
}

#[derive(Serialize)]
struct Trace {
    strategy: Strategy,
    lambda_before: Option<f64>,
    lambda_after_each: Vec<f64>,
    removed: Vec<u64>,
}

/// Eigenvalue after each removal for every strategy in the comma separated list.
pub fn immunization_traces(edges: &str, p: usize, strategies: &str) -> Result<String, String> {
    let loaded = load(edges)?;
    let g = &loaded.graph;
    let opts = ImmunizeOptions {
        eigen: EigenOptions::default(),
        trace: EigenTrace::Full,
    };
    let mut traces = Vec::new();
    for name in strategies.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let strategy: Strategy = name.parse().map_err(|e: nbimmune::Error| e.to_string())?;
        let r = immunize(g, p, strategy, Backend::Ipq, opts);
        traces.push(Trace {
            strategy,
            lambda_before: r.lambda_before,
            lambda_after_each: r.lambda_after_each,
            removed: r.removed.iter().map(|&i| loaded.original_ids[i]).collect(),
        });
    }
    json(&traces)
}

#[wasm_bindgen(js_name = generateEdges)]
pub fn generate_edges_js(kind: &str, n: usize, seed: u32) -> Result<String, JsError> {
    generate_edges(kind, n, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = spectral)]
pub fn spectral_js(edges: &str) -> Result<String, JsError> {
    spectral(edges).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = predictionScatter)]
pub fn prediction_scatter_js(edges: &str, fraction: f64, seed: u32) -> Result<String, JsError> {
    prediction_scatter(edges, fraction, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = immunizationTraces)]
pub fn immunization_traces_js(edges: &str, p: usize, strategies: &str) -> Result<String, JsError> {
    immunization_traces(edges, p, strategies).map_err(|e| JsError::new(&e))
}

use anyhow::anyhow;
use serde::Serialize;

use nbimmune::error::Error;
use nbimmune::experiment::{
    draws_for_fraction, predict as predict_table, sample_degree_proportional, scaling_experiment, Correlations,
};
use nbimmune::generate::{generate as generate_graph, rng_from_seed, GeneratorConfig};
use nbimmune::graph::{k_core_decomposition, to_edge_list};
use nbimmune::immunization::{immunize as run_immunize, percent_to_count, Backend, EigenTrace, ImmunizeOptions, Strategy};
use nbimmune::spectral::{leading_eigenpair, EigenOptions};

use crate::{
    read_graph, runtime, usage, write_output, CmdResult, Common, Format, GenerateArgs, GeneratorArg, ImmunizeArgs,
    PredictArgs, ScalingArgs, SpectralArgs, TraceArg,
};

fn eigen_options(c: &Common) -> CmdResult<EigenOptions> {
    if !(c.tol > 0.0) || c.max_iter == 0 {
        return Err(usage(anyhow!("--tol must be positive and --max-iter at least 1")));
    }
    Ok(EigenOptions {
        tol: c.tol,
        max_iter: c.max_iter,
    })
}

fn to_csv<T: Serialize>(rows: &[T]) -> CmdResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(runtime)?;
    }
    w.into_inner().map_err(|e| runtime(anyhow!("{e}")))
}

fn to_json<T: Serialize>(value: &T) -> CmdResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(runtime)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn emit<T: Serialize, R: Serialize>(common: &Common, whole: &T, rows: &[R]) -> CmdResult<()> {
    let bytes = match common.format {
        Format::Json => to_json(whole)?,
        Format::Csv => to_csv(rows)?,
    };
    write_output(common.output.as_ref(), &bytes)
}

#[derive(Serialize)]
struct NodeScore {
    node: u64,
    degree: usize,
    core: usize,
    nb_centrality: f64,
}

#[derive(Serialize)]
struct SpectralOut {
    n: usize,
    m: usize,
    lambda1: f64,
    converged: bool,
    iterations: usize,
    degenerate: bool,
    self_loops_dropped: usize,
    duplicates_dropped: usize,
    nodes: Vec<NodeScore>,
}

pub fn spectral(a: SpectralArgs) -> CmdResult<()> {
    let loaded = read_graph(&a.input)?;
    let g = &loaded.graph;
    let s = leading_eigenpair(g, eigen_options(&a.common)?);
    let cores = k_core_decomposition(g);
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&x, &y| s.v_bar[y].total_cmp(&s.v_bar[x]).then(x.cmp(&y)));
    if let Some(k) = a.top {
        order.truncate(k);
    }
    let nodes = order
        .into_iter()
        .map(|i| NodeScore {
            node: loaded.original_ids[i],
            degree: g.degree(i),
            core: cores.core_index[i],
            nb_centrality: s.v_bar[i],
        })
        .collect();
    eprintln!(
        "lambda1 = {} ({}after {} iterations{})",
        s.lambda1,
        if s.converged { "converged " } else { "NOT converged " },
        s.iterations,
        if s.degenerate { "; degenerate spectrum, lambda1 <= 1" } else { "" }
    );
    let out = SpectralOut {
        n: g.n(),
        m: g.m(),
        lambda1: s.lambda1,
        converged: s.converged,
        iterations: s.iterations,
        degenerate: s.degenerate,
        self_loops_dropped: loaded.self_loops_dropped,
        duplicates_dropped: loaded.duplicates_dropped,
        nodes,
    };
    emit(&a.common, &out, &out.nodes)
}

#[derive(Serialize)]
struct PredictOutRow {
    node: u64,
    degree: usize,
    lambda1: f64,
    lambda_after: f64,
    drop: f64,
    lambda_hat: f64,
    lambda_tilde: f64,
    alpha: f64,
    alpha_tilde: f64,
    x_degree: f64,
    ci: f64,
}

#[derive(Serialize)]
struct PredictOut {
    lambda1: f64,
    draws: usize,
    seed: u64,
    correlations: Correlations,
    rows: Vec<PredictOutRow>,
}

pub fn predict(a: PredictArgs) -> CmdResult<()> {
    let loaded = read_graph(&a.input)?;
    let g = &loaded.graph;
    let opts = eigen_options(&a.common)?;
    let draws = draws_for_fraction(a.sample_fraction, g.n()).map_err(usage)?;
    let mut rng = rng_from_seed(a.common.seed);
    let nodes = sample_degree_proportional(g, draws, &mut rng).map_err(runtime)?;
    let table = predict_table(g, &nodes, opts).map_err(|e| match e {
        Error::DegenerateSpectrum { lambda1 } => runtime(anyhow!(
            "leading eigenvalue {lambda1} <= 1: the 2-core is empty or a union of cycles, so no \
             eigen-drop prediction is possible; check the graph's 2-core"
        )),
        e => runtime(e),
    })?;
    let c = table.correlations;
    eprintln!(
        "{} nodes sampled; Pearson r with true drop: xnb exact {:.4}, xnb approx {:.4}, xdeg {:.4}, degree {:.4}, ci {:.4}",
        table.rows.len(),
        c.x_nb_exact,
        c.x_nb_approx,
        c.x_degree,
        c.degree,
        c.ci
    );
    let rows = table
        .rows
        .into_iter()
        .map(|r| PredictOutRow {
            node: loaded.original_ids[r.node],
            degree: r.degree,
            lambda1: r.lambda1,
            lambda_after: r.lambda_after,
            drop: r.drop,
            lambda_hat: r.lambda_hat,
            lambda_tilde: r.lambda_tilde,
            alpha: r.alpha,
            alpha_tilde: r.alpha_tilde,
            x_degree: r.x_degree,
            ci: r.ci,
        })
        .collect();
    let out = PredictOut {
        lambda1: table.lambda1,
        draws,
        seed: a.common.seed,
        correlations: c,
        rows,
    };
    emit(&a.common, &out, &out.rows)
}

#[derive(Serialize)]
struct ImmunizeOut {
    strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none")]
    backend: Option<Backend>,
    requested: usize,
    truncated: bool,
    removed: Vec<u64>,
    scores: Vec<f64>,
    zero_score_removals: usize,
    lambda_before: Option<f64>,
    lambda_after_each: Vec<f64>,
    lambda_after: Option<f64>,
    percentage_drop: Option<f64>,
    fallback_round: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time: Option<f64>,
}

#[derive(Serialize)]
struct RemovalRow {
    step: usize,
    node: u64,
    score: f64,
    lambda_after: Option<f64>,
}

pub fn immunize(a: ImmunizeArgs) -> CmdResult<()> {
    let strategy: Strategy = a.strategy.parse().map_err(usage)?;
    let backend: Backend = a.backend.parse().map_err(usage)?;
    let opts = ImmunizeOptions {
        eigen: eigen_options(&a.common)?,
        trace: match a.trace {
            TraceArg::Full => EigenTrace::Full,
            TraceArg::Final => EigenTrace::FinalOnly,
            TraceArg::None => EigenTrace::Skip,
        },
    };
    let loaded = read_graph(&a.input)?;
    let g = &loaded.graph;
    let p = match (a.p, a.percent) {
        (Some(p), _) => p,
        (None, Some(pc)) if pc > 0.0 && pc <= 100.0 => percent_to_count(pc, g.n()),
        (None, Some(pc)) => return Err(usage(anyhow!("--percent {pc} outside (0, 100]"))),
        (None, None) => unreachable!("clap requires one of --p / --percent"),
    };
    let r = run_immunize(g, p, strategy, backend, opts);
    if r.truncated {
        eprintln!("warning: p = {p} exceeds the {} available nodes; removed all of them", g.n());
    }
    if r.zero_score_removals > 0 {
        eprintln!("note: {} of {} removed nodes had score 0", r.zero_score_removals, r.removed.len());
    }
    if let Some(round) = r.fallback_round {
        eprintln!("note: spectrum became degenerate at round {round}; ranked by X-degree from there");
    }
    let pct = r.percentage_drop();
    match (r.lambda_before, r.lambda_after, pct) {
        (Some(b), Some(af), Some(d)) => eprintln!(
            "{strategy}: removed {} nodes, lambda1 {b:.6} -> {af:.6} ({d:.3}% drop)",
            r.removed.len()
        ),
        _ => eprintln!("{strategy}: removed {} nodes", r.removed.len()),
    }
    let rows: Vec<RemovalRow> = r
        .removed
        .iter()
        .enumerate()
        .map(|(k, &node)| RemovalRow {
            step: k + 1,
            node: loaded.original_ids[node],
            score: r.scores[k],
            lambda_after: r.lambda_after_each.get(k).copied(),
        })
        .collect();
    let out = ImmunizeOut {
        strategy,
        backend: r.backend,
        requested: r.requested,
        truncated: r.truncated,
        removed: r.removed.iter().map(|&i| loaded.original_ids[i]).collect(),
        scores: r.scores.clone(),
        zero_score_removals: r.zero_score_removals,
        lambda_before: r.lambda_before,
        lambda_after_each: r.lambda_after_each.clone(),
        lambda_after: r.lambda_after,
        percentage_drop: pct,
        fallback_round: r.fallback_round,
        wall_time: a.timings.then_some(r.wall_time),
    };
    emit(&a.common, &out, &rows)
}

pub fn scaling(a: ScalingArgs) -> CmdResult<()> {
    let backends = match a.backend.as_str() {
        "both" => vec![Backend::Map, Backend::Ipq],
        s => vec![s.parse::<Backend>().map_err(usage)?],
    };
    if a.n.is_empty() || a.repetitions == 0 {
        return Err(usage(anyhow!("need at least one --n and one repetition")));
    }
    let rows = scaling_experiment(a.gamma, &a.n, a.p, a.common.seed, a.repetitions, &backends).map_err(runtime)?;
    emit(&a.common, &rows, &rows)
}

pub fn generate(a: GenerateArgs) -> CmdResult<()> {
    let cfg = match a.generator {
        GeneratorArg::Er => GeneratorConfig::Er { n: a.n, p: a.edge_prob },
        GeneratorArg::Ba => GeneratorConfig::Ba { n: a.n, attach: a.attach },
        GeneratorArg::Sbm => GeneratorConfig::Sbm {
            n: a.n,
            within: a.within,
            between: a.between,
        },
        GeneratorArg::ConfigPowerlaw => GeneratorConfig::ConfigPowerlaw {
            n: a.n,
            gamma: a.gamma,
            d_min: a.d_min,
        },
    };
    let sub = generate_graph(&cfg, a.seed).map_err(usage)?;
    eprintln!("generated n = {}, m = {}", sub.graph.n(), sub.graph.m());
    write_output(a.output.as_ref(), to_edge_list(&sub.graph).as_bytes())
}

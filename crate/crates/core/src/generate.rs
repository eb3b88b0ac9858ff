//! Seeded random graph generators. Every generator returns the largest
//! connected component of the simplified graph.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{largest_connected_component, Graph, Subgraph};

/// Attempts at drawing a degree sequence with even sum before giving up.
const PARITY_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorConfig {
    /// `G(n, p)`.
    Er { n: usize, p: f64 },
    /// Preferential attachment, each new node bringing `attach` edges.
    Ba { n: usize, attach: usize },
    /// Two equal blocks with the given expected within- and between-block degrees.
    Sbm { n: usize, within: f64, between: f64 },
    /// Configuration model over degrees drawn from `p_d ~ d^-gamma`, `d_min <= d <= n - 1`.
    ConfigPowerlaw { n: usize, gamma: f64, d_min: usize },
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generates a graph and reduces it to its largest component.
pub fn generate(cfg: &GeneratorConfig, seed: u64) -> Result<Subgraph> {
    let mut rng = rng_from_seed(seed);
    let g = match *cfg {
        GeneratorConfig::Er { n, p } => erdos_renyi(n, p, &mut rng)?,
        GeneratorConfig::Ba { n, attach } => barabasi_albert(n, attach, &mut rng)?,
        GeneratorConfig::Sbm { n, within, between } => two_block_sbm(n, within, between, &mut rng)?,
        GeneratorConfig::ConfigPowerlaw { n, gamma, d_min } => {
            config_powerlaw(n, gamma, d_min, &mut rng)?
        }
    };
    largest_connected_component(&g)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Generation(format!("edge probability {p} outside [0, 1]")))
    }
}

/// `G(n, p)` by geometric skipping over the `n (n - 1) / 2` candidate pairs.
pub fn erdos_renyi<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::Generation("n must be positive".into()));
    }
    let mut edges = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            edges.extend((0..v).map(|w| (v, w)));
        }
    } else if p > 0.0 {
        let lp = (1.0 - p).ln();
        let (mut v, mut w): (usize, i64) = (1, -1);
        while v < n {
            let r: f64 = rng.random();
            w += 1 + ((1.0 - r).ln() / lp).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((v, w as usize));
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Preferential attachment: start from `attach` isolated nodes; every new node
/// links to `attach` distinct targets drawn from the list of all edge endpoints
/// seen so far (the initial nodes count once each).
pub fn barabasi_albert<R: Rng>(n: usize, attach: usize, rng: &mut R) -> Result<Graph> {
    if attach < 1 || attach >= n {
        return Err(Error::Generation(format!(
            "attachment {attach} must satisfy 1 <= attach < n = {n}"
        )));
    }
    let mut edges = Vec::with_capacity((n - attach) * attach);
    let mut targets: Vec<usize> = (0..attach).collect();
    let mut repeated: Vec<usize> = Vec::with_capacity(2 * n * attach);
    for source in attach..n {
        edges.extend(targets.iter().map(|&t| (source, t)));
        repeated.extend_from_slice(&targets);
        repeated.extend(std::iter::repeat_n(source, attach));
        targets.clear();
        while targets.len() < attach {
            let t = repeated[rng.random_range(0..repeated.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Two blocks of sizes `floor(n/2)` and `ceil(n/2)`.
pub fn two_block_sbm<R: Rng>(n: usize, within: f64, between: f64, rng: &mut R) -> Result<Graph> {
    if n < 4 {
        return Err(Error::Generation("two-block model needs n >= 4".into()));
    }
    let half = n / 2;
    let p_in = within / (half as f64 - 1.0);
    let p_out = between / half as f64;
    check_probability(p_in)?;
    check_probability(p_out)?;
    let block = |u: usize| usize::from(u >= half);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block(u) == block(v) { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Ok(Graph::from_edges(n, edges))
}

/// Draws `n` degrees from the discrete power law on `d_min..=n-1`.
pub fn powerlaw_degrees<R: Rng>(n: usize, gamma: f64, d_min: usize, rng: &mut R) -> Result<Vec<usize>> {
    if d_min < 1 || d_min >= n || !(gamma > 0.0) {
        return Err(Error::Generation(format!(
            "need 1 <= d_min < n and gamma > 0 (n = {n}, d_min = {d_min}, gamma = {gamma})"
        )));
    }
    let support: Vec<usize> = (d_min..n).collect();
    let dist = WeightedIndex::new(support.iter().map(|&d| (d as f64).powf(-gamma)))
        .map_err(|e| Error::Generation(e.to_string()))?;
    Ok((0..n).map(|_| support[dist.sample(rng)]).collect())
}

/// Configuration model: a degree sequence with even sum is drawn (retrying a
/// bounded number of times), stubs are matched uniformly, then loops and
/// multi-edges are dropped.
pub fn config_powerlaw<R: Rng>(n: usize, gamma: f64, d_min: usize, rng: &mut R) -> Result<Graph> {
    for _ in 0..PARITY_RETRIES {
        let degrees = powerlaw_degrees(n, gamma, d_min, rng)?;
        if degrees.iter().sum::<usize>() % 2 == 0 {
            return Ok(configuration_model(&degrees, rng));
        }
    }
    Err(Error::Generation(format!(
        "no even-sum degree sequence after {PARITY_RETRIES} draws"
    )))
}

/// Uniform stub matching for a sequence with even sum.
pub fn configuration_model<R: Rng>(degrees: &[usize], rng: &mut R) -> Graph {
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(u, &d)| std::iter::repeat_n(u, d))
        .collect();
    stubs.shuffle(rng);
    Graph::from_edges(degrees.len(), stubs.chunks_exact(2).map(|p| (p[0], p[1])))
}

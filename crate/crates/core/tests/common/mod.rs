//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;

use cfdp::graphs::Admg;
use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Edge with arrowhead flags at each end. `u -> v` is `(u, v, false, true)`,
/// `u <-> v` is `(u, v, true, true)`.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub head_u: bool,
    pub head_v: bool,
}

#[derive(Debug, Clone)]
pub struct SmallGraph {
    pub n: usize,
    pub directed: Vec<(usize, usize)>,
    pub bidirected: Vec<(usize, usize)>,
}

impl SmallGraph {
    pub fn edges(&self) -> Vec<Edge> {
        let mut e: Vec<Edge> = self.directed.iter().map(|&(u, v)| Edge { u, v, head_u: false, head_v: true }).collect();
        e.extend(self.bidirected.iter().map(|&(u, v)| Edge { u, v, head_u: true, head_v: true }));
        e
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.n).map(|i| format!("v{i}")).collect()
    }

    pub fn to_admg(&self) -> Admg {
        let names = self.names();
        let d: Vec<(String, String)> = self.directed.iter().map(|&(u, v)| (names[u].clone(), names[v].clone())).collect();
        let b: Vec<(String, String)> = self.bidirected.iter().map(|&(u, v)| (names[u].clone(), names[v].clone())).collect();
        Admg::new(&names, &d, &b).expect("valid test graph")
    }

    pub fn is_acyclic(&self) -> bool {
        // repeatedly strip nodes without incoming directed edges
        let mut alive = vec![true; self.n];
        for _ in 0..self.n {
            let Some(v) = (0..self.n).find(|&v| alive[v] && !self.directed.iter().any(|&(a, b)| b == v && alive[a])) else {
                return false;
            };
            alive[v] = false;
        }
        true
    }
}

/// `anc[v]` is the bitmask of ancestors of `v`, including `v`.
fn ancestor_masks(g: &SmallGraph) -> Vec<u32> {
    let mut anc: Vec<u32> = (0..g.n).map(|v| 1 << v).collect();
    loop {
        let mut changed = false;
        for &(u, v) in &g.directed {
            let merged = anc[v] | anc[u];
            if merged != anc[v] {
                anc[v] = merged;
                changed = true;
            }
        }
        if !changed {
            return anc;
        }
    }
}

/// All simple paths between every ordered pair, reduced to their
/// (collider mask, non-collider mask) signatures over interior nodes.
pub struct PathOracle {
    n: usize,
    anc: Vec<u32>,
    signatures: Vec<Vec<(u32, u32)>>,
}

impl PathOracle {
    pub fn new(g: &SmallGraph) -> Self {
        let edges = g.edges();
        let mut adj: Vec<Vec<(usize, bool, bool)>> = vec![Vec::new(); g.n];
        for e in &edges {
            adj[e.u].push((e.v, e.head_u, e.head_v));
            adj[e.v].push((e.u, e.head_v, e.head_u));
        }
        let mut sets: Vec<HashSet<(u32, u32)>> = vec![HashSet::new(); g.n * g.n];
        for src in 0..g.n {
            // (node, visited, collider mask, non-collider mask, arrowhead at node on arrival)
            let mut stack = vec![(src, 1u32 << src, 0u32, 0u32, false)];
            while let Some((c, visited, col, nc, head_in)) = stack.pop() {
                for &(w, head_at_c, head_at_w) in &adj[c] {
                    if visited & (1 << w) != 0 {
                        continue;
                    }
                    let (col2, nc2) = if c == src {
                        (col, nc)
                    } else if head_in && head_at_c {
                        (col | 1 << c, nc)
                    } else {
                        (col, nc | 1 << c)
                    };
                    sets[src * g.n + w].insert((col2, nc2));
                    stack.push((w, visited | 1 << w, col2, nc2, head_at_w));
                }
            }
        }
        Self { n: g.n, anc: ancestor_masks(g), signatures: sets.into_iter().map(|s| s.into_iter().collect()).collect() }
    }

    /// Is some path between `src` and `dst` open given the bitmask `z`?
    pub fn connected(&self, src: usize, dst: usize, z: u32) -> bool {
        let mut anc_z = 0;
        for v in 0..self.n {
            if z & (1 << v) != 0 {
                anc_z |= self.anc[v];
            }
        }
        self.signatures[src * self.n + dst].iter().any(|&(col, nc)| nc & z == 0 && col & !anc_z == 0)
    }
}

/// Compare the library against the path oracle on every unordered pair and
/// conditioning set (symmetry is checked separately). Returns the number of
/// queries checked or a description of the first disagreement.
pub fn check_all_queries(g: &SmallGraph) -> Result<usize, String> {
    let admg = g.to_admg();
    let oracle = PathOracle::new(g);
    let mut count = 0;
    for src in 0..g.n {
        for dst in src + 1..g.n {
            let others: Vec<usize> = (0..g.n).filter(|&v| v != src && v != dst).collect();
            for bits in 0u32..(1 << others.len()) {
                let z: Vec<usize> = others.iter().enumerate().filter(|(k, _)| bits & (1 << k) != 0).map(|(_, &v)| v).collect();
                let zmask = z.iter().fold(0u32, |m, &v| m | 1 << v);
                let expected = !oracle.connected(src, dst, zmask);
                let got = admg.d_separated_idx(src, dst, &z);
                if expected != got {
                    return Err(format!(
                        "graph {g:?}: d_separated({src}, {dst} | {z:?}) = {got}, path enumeration says {expected}"
                    ));
                }
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Every graph on `n` nodes whose directed edges respect the order
/// `0 < 1 < ... < n-1`. Per unordered pair the states are: none, `->`, `<->`,
/// and (with `bows`) both. Up to relabeling this covers every ADMG on `n`
/// nodes.
pub fn for_each_ordered_graph(n: usize, bows: bool, with_bidirected: bool, mut f: impl FnMut(&SmallGraph)) {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let states: u64 = match (with_bidirected, bows) {
        (false, _) => 2,
        (true, false) => 3,
        (true, true) => 4,
    };
    let total = states.pow(pairs.len() as u32);
    let mut g = SmallGraph { n, directed: Vec::new(), bidirected: Vec::new() };
    for code in 0..total {
        g.directed.clear();
        g.bidirected.clear();
        let mut c = code;
        for &(u, v) in &pairs {
            let s = c % states;
            c /= states;
            if s == 1 || s == 3 {
                g.directed.push((u, v));
            }
            if s == 2 || s == 3 {
                g.bidirected.push((u, v));
            }
        }
        f(&g);
    }
}

/// Random ADMG: random node order, each pair independently gets `->` along
/// the order with probability `p_dir` and `<->` with probability `p_bi`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p_dir: f64, p_bi: f64) -> SmallGraph {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let mut g = SmallGraph { n, directed: Vec::new(), bidirected: Vec::new() };
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p_dir) {
                g.directed.push((order[i], order[j]));
            }
            if rng.random_bool(p_bi) {
                g.bidirected.push((order[i], order[j]));
            }
        }
    }
    g
}

/// Conditional cdf of `X_{1-a}` given `X_a` within `x ± window`, estimated by
/// drawing `n` pairs from the bivariate Gaussian through a Cholesky factor
/// of its covariance and keeping the pairs that land in the window.
#[allow(clippy::too_many_arguments)]
pub fn rejection_posterior_sample(
    mu: [f64; 2],
    sigma: [f64; 2],
    rho: f64,
    a: usize,
    x: f64,
    window: f64,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let cov = Matrix2::new(
        sigma[0] * sigma[0],
        rho * sigma[0] * sigma[1],
        rho * sigma[0] * sigma[1],
        sigma[1] * sigma[1],
    );
    let l = cov.cholesky().expect("positive definite").l();
    let mean = Vector2::new(mu[0], mu[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = Vec::new();
    for _ in 0..n {
        let z = Vector2::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal));
        let xy = mean + l * z;
        if (xy[a] - x).abs() <= window {
            kept.push(xy[1 - a]);
        }
    }
    kept
}

/// `sup_y |F_n(y) - cdf(y)|` for an empirical sample.
pub fn ks_against(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in s.iter().enumerate() {
        let f = cdf(v);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Standard normal cdf from the complementary error function, independent
/// of the library's implementation.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc_approx(-z / std::f64::consts::SQRT_2)
}

/// erfc via the continued fraction / series in Numerical Recipes' `erfcc`
/// (fractional error < 1.2e-7).
fn erfc_approx(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let r = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807 + t * (-1.13520398 + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277)))))))))
            .exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

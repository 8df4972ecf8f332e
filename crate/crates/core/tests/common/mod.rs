//! Random instance generators and brute-force reference implementations
//! shared by the integration tests. The references deliberately avoid the
//! library's own helpers: they work from adjacency matrices and explicit
//! pair enumeration.

#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use pvoc::{build_graph, Cover, Graph, Partition, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi graph on `0..n` with edge probability `p`. Isolated vertices
/// never enter the graph, so the vertex count can be below `n`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Option<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    build_graph(edges).ok()
}

pub fn random_partition(rng: &mut impl Rng, n: usize, k: usize) -> Partition {
    let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_assignment(&raw).unwrap()
}

/// A graph drawn from `seed` with at least one edge, `n` in `lo..=hi`.
pub fn seeded_graph(seed: u64, lo: usize, hi: usize) -> Graph {
    let mut r = rng(seed);
    loop {
        let n = r.random_range(lo..=hi);
        let p = r.random_range(0.05..0.3);
        if let Some(g) = random_graph(&mut r, n, p) {
            return g;
        }
    }
}

pub fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.num_vertices();
    let mut m = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        m[u][v] = true;
        m[v][u] = true;
    }
    m
}

/// Permanence of `v` straight from the definition, using only an adjacency
/// matrix and a community lookup.
pub fn brute_permanence(adj: &[Vec<bool>], community: &dyn Fn(usize) -> usize, v: usize) -> Option<f64> {
    let n = adj.len();
    let neighbors: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
    if neighbors.is_empty() {
        return None;
    }
    let own = community(v);
    let internal: Vec<usize> = neighbors.iter().copied().filter(|&u| community(u) == own).collect();
    let mut external: HashMap<usize, usize> = HashMap::new();
    for &u in &neighbors {
        if community(u) != own {
            *external.entry(community(u)).or_default() += 1;
        }
    }
    let i = internal.len();
    let c_in = if i < 2 {
        0.0
    } else {
        let mut linked = 0usize;
        for a in 0..i {
            for b in a + 1..i {
                if adj[internal[a]][internal[b]] {
                    linked += 1;
                }
            }
        }
        linked as f64 / (i * (i - 1) / 2) as f64
    };
    Some(match external.values().max() {
        None => c_in,
        Some(&e_max) => i as f64 / (e_max * neighbors.len()) as f64 - (1.0 - c_in),
    })
}

/// Every cover of `0..n` with at most `max_k` distinct non-empty communities
/// that covers all vertices.
pub fn all_complete_covers(n: usize, max_k: usize) -> Vec<Vec<Vec<VertexId>>> {
    let subsets: Vec<u32> = (1..(1u32 << n)).collect();
    let full = (1u32 << n) - 1;
    let mut out = Vec::new();
    fn extend(subsets: &[u32], start: usize, chosen: &mut Vec<u32>, max_k: usize, full: u32, out: &mut Vec<Vec<u32>>) {
        if !chosen.is_empty() && chosen.iter().fold(0, |acc, s| acc | s) == full {
            out.push(chosen.clone());
        }
        if chosen.len() == max_k {
            return;
        }
        for i in start..subsets.len() {
            chosen.push(subsets[i]);
            extend(subsets, i + 1, chosen, max_k, full, out);
            chosen.pop();
        }
    }
    let mut masks = Vec::new();
    extend(&subsets, 0, &mut Vec::new(), max_k, full, &mut masks);
    for cover in masks {
        out.push(
            cover
                .iter()
                .map(|&mask| (0..n).filter(|&v| mask & (1 << v) != 0).collect())
                .collect(),
        );
    }
    out
}

pub fn cover(n: usize, communities: &[Vec<VertexId>]) -> Cover {
    Cover::new(n, communities.to_vec()).unwrap()
}

fn shared(communities: &[Vec<VertexId>], u: VertexId, v: VertexId) -> usize {
    communities.iter().filter(|c| c.contains(&u) && c.contains(&v)).count()
}

/// Omega index by explicit pair enumeration over `0..n`, returned as the
/// exact fraction `(num, den)`; `None` when expected agreement is 1.
pub fn brute_omega(n: usize, a: &[Vec<VertexId>], b: &[Vec<VertexId>]) -> Option<(i128, i128)> {
    let mut counts_a: HashMap<usize, i128> = HashMap::new();
    let mut counts_b: HashMap<usize, i128> = HashMap::new();
    let mut agree = 0i128;
    let mut pairs = 0i128;
    for u in 0..n {
        for v in u + 1..n {
            let (x, y) = (shared(a, u, v), shared(b, u, v));
            *counts_a.entry(x).or_default() += 1;
            *counts_b.entry(y).or_default() += 1;
            agree += i128::from(x == y);
            pairs += 1;
        }
    }
    let expected: i128 = counts_a
        .iter()
        .map(|(j, &ta)| ta * counts_b.get(j).copied().unwrap_or(0))
        .sum();
    let total = pairs * pairs;
    if expected == total {
        return None;
    }
    Some((agree * pairs - expected, total - expected))
}

pub fn omega_value(n: usize, a: &[Vec<VertexId>], b: &[Vec<VertexId>]) -> f64 {
    match brute_omega(n, a, b) {
        None => 1.0,
        Some((num, den)) => num as f64 / den as f64,
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Ratio(i128, i128);

impl Ratio {
    fn new(n: i128, d: i128) -> Ratio {
        let g = gcd(n, d).max(1);
        Ratio(n / g, d / g)
    }
    fn add(self, o: Ratio) -> Ratio {
        Ratio::new(self.0 * o.1 + o.0 * self.1, self.1 * o.1)
    }
    fn max(self, o: Ratio) -> Ratio {
        if self.0 * o.1 >= o.0 * self.1 {
            self
        } else {
            o
        }
    }
}

/// Average best-match F1 as an exact fraction, converted once at the end.
pub fn brute_avg_f1(a: &[Vec<VertexId>], b: &[Vec<VertexId>]) -> f64 {
    let side = |from: &[Vec<VertexId>], to: &[Vec<VertexId>]| {
        let total = from.iter().fold(Ratio(0, 1), |acc, x| {
            let best = to.iter().fold(Ratio(0, 1), |m, y| {
                let common = x.iter().filter(|v| y.contains(v)).count() as i128;
                m.max(Ratio::new(2 * common, (x.len() + y.len()) as i128))
            });
            acc.add(best)
        });
        Ratio::new(total.0, total.1 * from.len() as i128)
    };
    let r = side(a, b).add(side(b, a));
    r.0 as f64 / (2 * r.1) as f64
}

pub fn fixture_dir(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub struct Lfr {
    pub graph: Graph,
    pub truth: Cover,
}

pub fn load_lfr(name: &str) -> Lfr {
    let dir = fixture_dir(name);
    let graph = pvoc::io::read_edge_list_file(dir.join("network.dat")).unwrap();
    let truth = pvoc::io::read_lfr_communities_file(dir.join("community.dat"), graph.labels()).unwrap();
    Lfr { graph, truth }
}

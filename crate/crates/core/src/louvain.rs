//! Disjoint community detection: Louvain modularity optimization and import
//! of partitions computed elsewhere.

use std::io::BufRead;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Labels, Partition};
use crate::io::{open_file, parse_lfr};

/// Newman-Girvan modularity `sum_c [e_c / m - (d_c / 2m)^2]`, where `e_c` is
/// the number of edges inside `c` and `d_c` the total degree of `c`.
/// Zero for an edgeless graph.
pub fn modularity(g: &Graph, p: &Partition) -> f64 {
    let m = g.num_edges() as f64;
    if m == 0.0 {
        return 0.0;
    }
    let k = p.num_communities();
    let mut inside = vec![0usize; k];
    let mut degree = vec![0usize; k];
    for v in g.vertices() {
        degree[p.community(v)] += g.degree(v);
    }
    for (u, v) in g.edges() {
        if p.community(u) == p.community(v) {
            inside[p.community(u)] += 1;
        }
    }
    inside
        .iter()
        .zip(&degree)
        .map(|(&e, &d)| {
            let share = d as f64 / (2.0 * m);
            e as f64 / m - share * share
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LouvainConfig {
    /// Maximum number of aggregation levels.
    pub max_passes: usize,
    /// A level whose modularity improvement does not exceed this ends the run.
    pub min_modularity_gain: f64,
    /// 0 visits vertices in ascending order; any other value shuffles the
    /// visiting order with a generator seeded from it.
    pub seed: u64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            max_passes: 100,
            min_modularity_gain: 1e-7,
            seed: 0,
        }
    }
}

impl LouvainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_passes == 0 {
            return Err(Error::InvalidConfig("max_passes must be at least 1".into()));
        }
        if self.min_modularity_gain.is_nan() || self.min_modularity_gain < 0.0 {
            return Err(Error::InvalidConfig("min_modularity_gain must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct LouvainOutcome {
    pub partition: Partition,
    /// Modularity accumulated from the individual move gains.
    pub modularity: f64,
    /// Number of aggregation levels that were optimized.
    pub levels: usize,
}

/// Moves smaller than this (in edge-weight units) are treated as no gain.
const GAIN_EPSILON: f64 = 1e-10;

/// Weighted graph of one aggregation level. Node `i` carries `loops[i]`, the
/// weight of edges folded inside it.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    degree: Vec<f64>,
}

impl Level {
    fn from_graph(g: &Graph) -> Level {
        let adj: Vec<Vec<(usize, f64)>> = g
            .vertices()
            .map(|v| g.neighbors(v).iter().map(|&u| (u, 1.0)).collect())
            .collect();
        let degree = g.vertices().map(|v| g.degree(v) as f64).collect();
        Level {
            adj,
            loops: vec![0.0; g.num_vertices()],
            degree,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Collapses each community (ids `0..k`) into one node.
    fn aggregate(&self, community: &[usize], k: usize) -> Level {
        let mut loops = vec![0.0; k];
        let mut weights: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for i in 0..self.len() {
            let ci = community[i];
            loops[ci] += self.loops[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    // Seen from both endpoints.
                    loops[ci] += w / 2.0;
                } else {
                    *weights[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adj: Vec<Vec<(usize, f64)>> = weights.into_iter().map(|m| m.into_iter().collect()).collect();
        let degree = adj
            .iter()
            .zip(&loops)
            .map(|(row, &l)| 2.0 * l + row.iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        Level { adj, loops, degree }
    }
}

/// Local-moving state over one level.
struct Mover<'a> {
    level: &'a Level,
    two_m: f64,
    community: Vec<usize>,
    total: Vec<f64>,
    link: Vec<f64>,
    touched: Vec<usize>,
}

impl<'a> Mover<'a> {
    fn new(level: &'a Level, two_m: f64, community: Vec<usize>) -> Mover<'a> {
        let n = level.len();
        let mut total = vec![0.0; n];
        for (i, &c) in community.iter().enumerate() {
            total[c] += level.degree[i];
        }
        Mover {
            level,
            two_m,
            community,
            total,
            link: vec![0.0; n],
            touched: Vec::new(),
        }
    }

    /// Tries to move node `i`; returns the modularity change.
    fn visit(&mut self, i: usize) -> f64 {
        let k_i = self.level.degree[i];
        let own = self.community[i];
        for &(j, w) in &self.level.adj[i] {
            let c = self.community[j];
            if self.link[c] == 0.0 {
                self.touched.push(c);
            }
            self.link[c] += w;
        }
        self.total[own] -= k_i;
        let gain = |c: usize, link: &[f64], total: &[f64]| link[c] - total[c] * k_i / self.two_m;
        let stay = gain(own, &self.link, &self.total);

        self.touched.sort_unstable();
        let mut best: Option<(usize, f64)> = None;
        for &c in &self.touched {
            if c == own {
                continue;
            }
            let g = gain(c, &self.link, &self.total);
            // Ascending order keeps the lowest id among equal gains.
            if best.is_none_or(|(_, bg)| g > bg) {
                best = Some((c, g));
            }
        }
        for &c in &self.touched {
            self.link[c] = 0.0;
        }
        self.touched.clear();

        let (target, delta) = match best {
            Some((c, g)) if g - stay > GAIN_EPSILON => (c, g - stay),
            _ => (own, 0.0),
        };
        self.total[target] += k_i;
        self.community[i] = target;
        2.0 * delta / self.two_m
    }

    /// Sweeps until no node moves. Returns the total modularity change.
    fn run(&mut self, order: &[usize]) -> f64 {
        let mut improvement = 0.0;
        loop {
            let mut moved = false;
            for &i in order {
                let before = self.community[i];
                improvement += self.visit(i);
                moved |= self.community[i] != before;
            }
            if !moved {
                return improvement;
            }
        }
    }
}

/// Renumbers community ids to `0..k` by first appearance.
fn compact(community: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; community.len()];
    let mut next = 0;
    for c in community.iter_mut() {
        if map[*c] == usize::MAX {
            map[*c] = next;
            next += 1;
        }
        *c = map[*c];
    }
    next
}

fn singleton_modularity(level: &Level, two_m: f64) -> f64 {
    (0..level.len())
        .map(|i| {
            let share = level.degree[i] / two_m;
            2.0 * level.loops[i] / two_m - share * share
        })
        .sum()
}

pub fn louvain(g: &Graph, cfg: &LouvainConfig) -> Result<Partition> {
    louvain_with_stats(g, cfg).map(|o| o.partition)
}

/// Runs Louvain and reports the incrementally tracked modularity.
///
/// Levels are optimized by local moving and then aggregated until a level
/// improves modularity by no more than `min_modularity_gain` or `max_passes`
/// levels have run. The coarsest partition is then projected back onto the
/// input graph and refined by one more round of single-vertex local moves, so
/// the result is a local optimum under single-vertex moves.
pub fn louvain_with_stats(g: &Graph, cfg: &LouvainConfig) -> Result<LouvainOutcome> {
    cfg.validate()?;
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let base = Level::from_graph(g);
    let two_m = 2.0 * g.num_edges() as f64;
    if two_m == 0.0 {
        return Ok(LouvainOutcome {
            partition: Partition::singletons(n)?,
            modularity: 0.0,
            levels: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut visiting_order = |len: usize| {
        let mut order: Vec<usize> = (0..len).collect();
        if cfg.seed != 0 {
            order.shuffle(&mut rng);
        }
        order
    };

    let mut q = singleton_modularity(&base, two_m);
    // membership[v] = node of the current level that holds vertex v.
    let mut membership: Vec<usize> = (0..n).collect();
    let mut levels = 0;
    let mut owned: Option<Level> = None;
    while levels < cfg.max_passes {
        let level = owned.as_ref().unwrap_or(&base);
        let order = visiting_order(level.len());
        let mut mover = Mover::new(level, two_m, (0..level.len()).collect());
        let improvement = mover.run(&order);
        q += improvement;
        levels += 1;
        let mut community = mover.community;
        let k = compact(&mut community);
        for node in membership.iter_mut() {
            *node = community[*node];
        }
        if improvement <= cfg.min_modularity_gain || k == level.len() {
            break;
        }
        owned = Some(level.aggregate(&community, k));
    }

    let order = visiting_order(n);
    let mut mover = Mover::new(&base, two_m, membership);
    q += mover.run(&order);
    let partition = Partition::from_assignment(&mover.community)?;
    Ok(LouvainOutcome {
        partition,
        modularity: q,
        levels,
    })
}

/// Reads a disjoint partition in the LFR community layout (one community id
/// per node).
pub fn import_partition<R: BufRead>(reader: R, labels: &Labels) -> Result<Partition> {
    let parsed = parse_lfr(reader, labels, true)?;
    let raw: Vec<usize> = parsed.memberships.iter().map(|m| m[0]).collect();
    Partition::from_assignment(&raw)
}

pub fn import_partition_file(path: impl AsRef<Path>, labels: &Labels) -> Result<Partition> {
    import_partition(open_file(path)?, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::io::read_edge_list;

    fn bridged_triangles() -> Graph {
        build_graph([(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)]).unwrap()
    }

    /// Every partition of `0..n` as a restricted-growth string.
    fn all_partitions(n: usize) -> Vec<Vec<usize>> {
        fn grow(prefix: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            let next = prefix.iter().max().map_or(0, |m| m + 1);
            for c in 0..=next {
                prefix.push(c);
                grow(prefix, n, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        grow(&mut Vec::new(), n, &mut out);
        out
    }

    #[test]
    fn modularity_examples() {
        let g = bridged_triangles();
        let p = Partition::from_assignment(&[0, 0, 0, 1, 1, 1]).unwrap();
        let expected = 2.0 * (3.0 / 7.0 - 0.25);
        assert!((modularity(&g, &p) - expected).abs() < 1e-12);
        assert!((modularity(&g, &p) - 0.357143).abs() < 1e-6);

        let one = Partition::from_assignment(&[0; 6]).unwrap();
        assert_eq!(modularity(&g, &one), 0.0);

        let tri = build_graph([(1, 2), (2, 3), (1, 3)]).unwrap();
        let single = Partition::singletons(3).unwrap();
        assert!((modularity(&tri, &single) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn two_triangles_are_the_optimum() {
        let g = bridged_triangles();
        let (best, best_q) = all_partitions(6)
            .into_iter()
            .map(|raw| {
                let p = Partition::from_assignment(&raw).unwrap();
                let q = modularity(&g, &p);
                (p, q)
            })
            .fold(
                (None, f64::MIN),
                |(bp, bq), (p, q)| if q > bq { (Some(p), q) } else { (bp, bq) },
            );
        let found = louvain_with_stats(&g, &LouvainConfig::default()).unwrap();
        assert_eq!(Some(found.partition.clone()), best);
        assert!((found.modularity - best_q).abs() < 1e-9);
        assert_eq!(found.partition.assignment(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn clique_stays_whole() {
        let mut edges = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        let g = build_graph(edges).unwrap();
        let p = louvain(&g, &LouvainConfig::default()).unwrap();
        assert_eq!(p.num_communities(), 1);
    }

    #[test]
    fn disconnected_triangles() {
        let g = build_graph([(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6)]).unwrap();
        let out = louvain_with_stats(&g, &LouvainConfig::default()).unwrap();
        assert_eq!(out.partition.num_communities(), 2);
        assert!((modularity(&g, &out.partition) - 0.5).abs() < 1e-12);
        assert!((out.modularity - 0.5).abs() < 1e-9);
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let g = build_graph([(1, 2)]).unwrap().induced_subgraph(&[0]).unwrap();
        let p = louvain(&g, &LouvainConfig::default()).unwrap();
        assert_eq!(p.num_communities(), 1);
    }

    #[test]
    fn config_validation() {
        let cfg = LouvainConfig {
            max_passes: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = LouvainConfig {
            min_modularity_gain: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let g = bridged_triangles();
        let cfg = LouvainConfig {
            seed: 42,
            ..Default::default()
        };
        assert_eq!(louvain(&g, &cfg).unwrap(), louvain(&g, &cfg).unwrap());
    }

    #[test]
    fn import_examples() {
        let g = read_edge_list("1 2\n2 3\n".as_bytes()).unwrap();
        let p = import_partition("1\t1\n2\t1\n3\t2\n".as_bytes(), g.labels()).unwrap();
        assert_eq!(p.communities(), &[vec![0, 1], vec![2]]);

        match import_partition("1\t1 2\n2\t1\n3\t1\n".as_bytes(), g.labels()) {
            Err(Error::NotDisjoint { line: 1, label }) => assert_eq!(label, "1"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            import_partition("1\t1\n2\t1\n".as_bytes(), g.labels()),
            Err(Error::IncompleteCover { .. })
        ));
        let p = import_partition("1\tx\n2\tx\n3\tx\n".as_bytes(), g.labels()).unwrap();
        assert_eq!(p.num_communities(), 1);
    }
}

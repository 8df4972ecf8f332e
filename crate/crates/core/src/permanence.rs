//! Vertex permanence.
//!
//! For a vertex `v` with `I` neighbors in its own community, degree `D`,
//! at most `E_max` neighbors in any single other community and internal
//! clustering coefficient `c_in`:
//!
//! ```text
//! perm(v) = I / (E_max * D) - (1 - c_in)      if v has an external neighbor
//! perm(v) = c_in                              otherwise
//! ```
//!
//! `c_in` is the fraction of connected pairs among the internal neighbors and
//! is 0 when there are fewer than two of them. The value lies in `[-1, 1]`;
//! `-1` is reached exactly when `I = 0`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{CommunityId, Graph, Partition, VertexId};

/// Read access to a disjoint community assignment.
///
/// Implemented by [`Partition`] and by [`TrialMove`], which overlays a single
/// hypothetical move on a partition without copying it.
pub trait Assignment: Sync {
    fn community(&self, v: VertexId) -> CommunityId;
}

impl Assignment for Partition {
    #[inline]
    fn community(&self, v: VertexId) -> CommunityId {
        Partition::community(self, v)
    }
}

/// `base` with `vertex` moved to `target`.
#[derive(Debug, Clone, Copy)]
pub struct TrialMove<'a> {
    pub base: &'a Partition,
    pub vertex: VertexId,
    pub target: CommunityId,
}

impl Assignment for TrialMove<'_> {
    #[inline]
    fn community(&self, v: VertexId) -> CommunityId {
        if v == self.vertex {
            self.target
        } else {
            self.base.community(v)
        }
    }
}

/// Per-vertex permanence ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PermanenceView {
    pub internal: usize,
    pub degree: usize,
    /// `None` when the vertex has no external neighbor.
    pub e_max: Option<usize>,
    pub c_in: f64,
    pub perm: f64,
}

/// Neighbors of `v` that share its community, in ascending order.
fn internal_neighbors<A: Assignment>(g: &Graph, a: &A, v: VertexId) -> Vec<VertexId> {
    let own = a.community(v);
    g.neighbors(v)
        .iter()
        .copied()
        .filter(|&u| a.community(u) == own)
        .collect()
}

/// Size of the intersection of two sorted slices.
fn sorted_intersection(xs: &[VertexId], ys: &[VertexId]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < xs.len() && j < ys.len() {
        match xs[i].cmp(&ys[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

fn clustering_of(g: &Graph, internal: &[VertexId]) -> f64 {
    let k = internal.len();
    if k < 2 {
        return 0.0;
    }
    // Each connected pair is seen from both ends.
    let twice_links: usize = internal
        .iter()
        .map(|&x| sorted_intersection(g.neighbors(x), internal))
        .sum();
    let pairs = k * (k - 1) / 2;
    (twice_links / 2) as f64 / pairs as f64
}

/// Fraction of connected pairs among the same-community neighbors of `v`.
pub fn internal_clustering<A: Assignment>(g: &Graph, a: &A, v: VertexId) -> f64 {
    clustering_of(g, &internal_neighbors(g, a, v))
}

/// Edge counts from `v` into each foreign community.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExternalPull {
    pub e_max: Option<usize>,
    pub per_community: BTreeMap<CommunityId, usize>,
}

pub fn external_pull<A: Assignment>(g: &Graph, a: &A, v: VertexId) -> ExternalPull {
    let own = a.community(v);
    let mut per_community = BTreeMap::new();
    for &u in g.neighbors(v) {
        let c = a.community(u);
        if c != own {
            *per_community.entry(c).or_insert(0) += 1;
        }
    }
    ExternalPull {
        e_max: per_community.values().copied().max(),
        per_community,
    }
}

/// Largest number of neighbors of `v` in one foreign community.
fn max_external<A: Assignment>(g: &Graph, a: &A, v: VertexId, own: CommunityId) -> Option<usize> {
    let mut external: Vec<CommunityId> = g
        .neighbors(v)
        .iter()
        .map(|&u| a.community(u))
        .filter(|&c| c != own)
        .collect();
    external.sort_unstable();
    external.chunk_by(|x, y| x == y).map(<[CommunityId]>::len).max()
}

pub fn permanence_view<A: Assignment>(g: &Graph, a: &A, v: VertexId) -> Result<PermanenceView> {
    let degree = g.degree(v);
    if degree == 0 {
        return Err(Error::IsolatedVertex(g.label(v).to_owned()));
    }
    let own = a.community(v);
    let internal = internal_neighbors(g, a, v);
    let c_in = clustering_of(g, &internal);
    let e_max = max_external(g, a, v, own);
    let perm = match e_max {
        None => c_in,
        Some(e) => internal.len() as f64 / (e * degree) as f64 - (1.0 - c_in),
    };
    Ok(PermanenceView {
        internal: internal.len(),
        degree,
        e_max,
        c_in,
        perm,
    })
}

pub fn permanence<A: Assignment>(g: &Graph, a: &A, v: VertexId) -> Result<f64> {
    permanence_view(g, a, v).map(|view| view.perm)
}

/// `perm(v)` plus the permanence of every neighbor of `v`, summed in
/// adjacency order.
pub fn neighborhood_permanence_sum<A: Assignment>(g: &Graph, a: &A, v: VertexId) -> Result<f64> {
    let mut sum = permanence(g, a, v)?;
    for &u in g.neighbors(v) {
        sum += permanence(g, a, u)?;
    }
    Ok(sum)
}

/// Permanence ingredients for every vertex; `None` for isolated vertices.
pub fn permanence_table(g: &Graph, p: &Partition, exec: Execution) -> Vec<Option<PermanenceView>> {
    let vertices: Vec<VertexId> = g.vertices().collect();
    exec.map(&vertices, |&v| permanence_view(g, p, v).ok())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{butterfly, butterfly_partition, labelled_partition};
    use crate::graph::build_graph;

    /// Balanced gadget: `v` in a 4-clique community plus two neighbors in
    /// each of three other communities.
    fn gadget() -> (Graph, Partition) {
        let g = build_graph([
            ("v", "a"),
            ("v", "b"),
            ("v", "c"),
            ("a", "b"),
            ("b", "c"),
            ("a", "c"),
            ("v", "x1"),
            ("v", "x2"),
            ("v", "y1"),
            ("v", "y2"),
            ("v", "z1"),
            ("v", "z2"),
        ])
        .unwrap();
        let p = labelled_partition(
            &g,
            &[&["v", "a", "b", "c"], &["x1", "x2"], &["y1", "y2"], &["z1", "z2"]],
        );
        (g, p)
    }

    #[test]
    fn clustering_cases() {
        let (g, p) = gadget();
        assert_eq!(internal_clustering(&g, &p, 0), 1.0);

        // Internal neighbors {a, b, c} with only a-b linked.
        let g = build_graph([("v", "a"), ("v", "b"), ("v", "c"), ("a", "b")]).unwrap();
        let p = Partition::from_assignment(&[0, 0, 0, 0]).unwrap();
        assert_eq!(internal_clustering(&g, &p, 0), 1.0 / 3.0);

        let g = build_graph([("v", "a"), ("v", "b")]).unwrap();
        let p = Partition::from_assignment(&[0, 0, 1]).unwrap();
        assert_eq!(internal_clustering(&g, &p, 0), 0.0);
    }

    #[test]
    fn pull_cases() {
        let (g, p) = gadget();
        let pull = external_pull(&g, &p, 0);
        assert_eq!(pull.e_max, Some(2));
        assert_eq!(pull.per_community.values().sum::<usize>(), 6);

        let edges: Vec<(String, String)> = (0..2)
            .map(|i| ("v".to_string(), format!("b{i}")))
            .chain((0..4).map(|i| ("v".to_string(), format!("c{i}"))))
            .collect();
        let g = build_graph(edges).unwrap();
        let p = Partition::from_assignment(&[0, 1, 1, 2, 2, 2, 2]).unwrap();
        assert_eq!(external_pull(&g, &p, 0).e_max, Some(4));

        let g = build_graph([(1, 2), (2, 3), (1, 3)]).unwrap();
        let p = Partition::from_assignment(&[0, 0, 0]).unwrap();
        let pull = external_pull(&g, &p, 0);
        assert_eq!(pull, ExternalPull::default());
    }

    #[test]
    fn gadget_is_one_sixth() {
        let (g, p) = gadget();
        let view = permanence_view(&g, &p, 0).unwrap();
        assert_eq!((view.internal, view.degree, view.e_max), (3, 9, Some(2)));
        assert!((view.perm - 1.0 / 6.0).abs() <= 1e-15);
    }

    #[test]
    fn clique_and_lonely_vertices() {
        let k4 = build_graph([(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap();
        let p = Partition::from_assignment(&[0; 4]).unwrap();
        assert_eq!(permanence(&k4, &p, 0).unwrap(), 1.0);

        // I = 0: the vertex sits alone in its community.
        let g = build_graph([(1, 2), (2, 3)]).unwrap();
        let p = Partition::from_assignment(&[0, 1, 1]).unwrap();
        assert_eq!(permanence(&g, &p, 0).unwrap(), -1.0);
    }

    #[test]
    fn isolated_vertex_is_an_error() {
        let g = build_graph([(1, 2), (2, 3)])
            .unwrap()
            .induced_subgraph(&[0, 2])
            .unwrap();
        let p = Partition::from_assignment(&[0, 0]).unwrap();
        assert!(matches!(permanence(&g, &p, 0), Err(Error::IsolatedVertex(_))));
    }

    #[test]
    fn butterfly_neighborhood_sum() {
        let g = butterfly();
        let p = butterfly_partition(&g);
        let id = |l: &str| g.vertex(l).unwrap();
        assert_eq!(permanence(&g, &p, id("v")).unwrap(), 0.25);
        assert_eq!(permanence(&g, &p, id("a")).unwrap(), 1.0);
        assert_eq!(permanence(&g, &p, id("c")).unwrap(), -0.5);
        assert_eq!(neighborhood_permanence_sum(&g, &p, id("v")).unwrap(), 1.25);
    }

    #[test]
    fn small_sums() {
        let tri = build_graph([(1, 2), (2, 3), (1, 3)]).unwrap();
        let p = Partition::from_assignment(&[0; 3]).unwrap();
        assert_eq!(neighborhood_permanence_sum(&tri, &p, 1).unwrap(), 3.0);

        let edge = build_graph([("x", "y")]).unwrap();
        let p = Partition::from_assignment(&[0; 2]).unwrap();
        assert_eq!(neighborhood_permanence_sum(&edge, &p, 0).unwrap(), 0.0);
    }

    #[test]
    fn trial_move_overlay() {
        let g = butterfly();
        let p = butterfly_partition(&g);
        let v = g.vertex("v").unwrap();
        let target = p.community(g.vertex("c").unwrap());
        let moved = TrialMove {
            base: &p,
            vertex: v,
            target,
        };
        assert_eq!(permanence(&g, &moved, g.vertex("a").unwrap()).unwrap(), -0.5);
        assert_eq!(permanence(&g, &moved, g.vertex("d").unwrap()).unwrap(), 1.0);
        assert_eq!(neighborhood_permanence_sum(&g, &moved, v).unwrap(), 1.25);
    }

    #[test]
    fn table_modes_agree() {
        let (g, p) = gadget();
        let seq = permanence_table(&g, &p, Execution::Sequential);
        let par = permanence_table(&g, &p, Execution::Parallel);
        assert_eq!(seq, par);
        for view in seq.iter().flatten() {
            assert!((-1.0..=1.0).contains(&view.perm));
        }
    }
}

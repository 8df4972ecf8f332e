//! Graph representation and the community containers shared by the rest of
//! the crate.
//!
//! Vertices are addressed by contiguous internal ids `0..n`. External labels
//! (whatever tokens the input files used) are kept in a [`Labels`] table and
//! assigned ids in first-appearance order.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type CommunityId = usize;

/// Bidirectional map between external labels and internal vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Labels {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
}

impl Labels {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `label`, assigning the next free id if unseen.
    pub fn intern(&mut self, label: &str) -> VertexId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.names.len();
        self.names.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }
}

/// Orders labels numerically when both are integers, lexicographically
/// otherwise. Integer labels sort before non-integer ones.
pub fn compare_labels(a: &str, b: &str) -> Ordering {
    match (a.parse::<i128>(), b.parse::<i128>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        (Ok(_), Err(_)) => Ordering::Less,
        (Err(_), Ok(_)) => Ordering::Greater,
        (Err(_), Err(_)) => a.cmp(b),
    }
}

/// Immutable undirected simple graph in compressed adjacency form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Labels,
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
}

/// Builds a graph from labelled edges.
///
/// Self-loops are dropped and duplicate edges (in either direction) collapse
/// to one. Vertex ids follow the first appearance of each label.
pub fn build_graph<I, L>(edges: I) -> Result<Graph>
where
    I: IntoIterator<Item = (L, L)>,
    L: ToString,
{
    let mut labels = Labels::new();
    let mut pairs = Vec::new();
    for (a, b) in edges {
        let u = labels.intern(&a.to_string());
        let v = labels.intern(&b.to_string());
        pairs.push((u, v));
    }
    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Ok(Graph::from_pairs(labels, pairs))
}

impl Graph {
    /// Builds a graph over an existing label table from id pairs. Vertices
    /// without edges are kept as isolated vertices.
    pub(crate) fn from_pairs(labels: Labels, pairs: Vec<(VertexId, VertexId)>) -> Graph {
        let n = labels.len();
        let mut arcs: Vec<(VertexId, VertexId)> = Vec::with_capacity(pairs.len() * 2);
        for (u, v) in pairs {
            if u != v {
                arcs.push((u, v));
                arcs.push((v, u));
            }
        }
        arcs.sort_unstable();
        arcs.dedup();
        let mut offsets = vec![0; n + 1];
        for &(u, _) in &arcs {
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = arcs.into_iter().map(|(_, v)| v).collect();
        Graph {
            labels,
            offsets,
            neighbors,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor ids of `v`.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.num_vertices()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        self.labels.name(v)
    }

    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.labels.get(label)
    }

    /// Subgraph induced by `vertices`.
    ///
    /// The new graph numbers the selected vertices in ascending order of their
    /// ids in `self`, so new id `i` is the `i`-th smallest selected id. Labels
    /// carry over unchanged.
    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Result<Graph> {
        let mut keep: Vec<VertexId> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::EmptyGraph);
        }
        if let Some(&v) = keep.iter().find(|&&v| v >= self.num_vertices()) {
            return Err(Error::VertexOutOfRange(v));
        }
        let mut new_id = vec![usize::MAX; self.num_vertices()];
        let mut labels = Labels::new();
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i;
            labels.intern(self.label(v));
        }
        let mut pairs = Vec::new();
        for &u in &keep {
            for &w in self.neighbors(u) {
                if u < w && new_id[w] != usize::MAX {
                    pairs.push((new_id[u], new_id[w]));
                }
            }
        }
        Ok(Graph::from_pairs(labels, pairs))
    }
}

/// Disjoint community assignment: every vertex in exactly one community.
///
/// Community ids are contiguous `0..k` and numbered by first appearance in
/// vertex order, so no community is ever empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    assignment: Vec<CommunityId>,
    members: Vec<Vec<VertexId>>,
}

impl Partition {
    /// Builds a partition from one (arbitrary) label per vertex.
    pub fn from_assignment(raw: &[usize]) -> Result<Partition> {
        if raw.is_empty() {
            return Err(Error::EmptyPartition);
        }
        let mut relabel: HashMap<usize, CommunityId> = HashMap::new();
        let mut members: Vec<Vec<VertexId>> = Vec::new();
        let assignment = raw
            .iter()
            .enumerate()
            .map(|(v, &c)| {
                let id = *relabel.entry(c).or_insert_with(|| {
                    members.push(Vec::new());
                    members.len() - 1
                });
                members[id].push(v);
                id
            })
            .collect();
        Ok(Partition { assignment, members })
    }

    /// Builds a partition of `0..n` from explicit communities.
    pub fn from_communities(n: usize, communities: &[Vec<VertexId>]) -> Result<Partition> {
        let mut raw = vec![usize::MAX; n];
        for (c, members) in communities.iter().enumerate() {
            for &v in members {
                if v >= n {
                    return Err(Error::VertexOutOfRange(v));
                }
                if raw[v] != usize::MAX && raw[v] != c {
                    return Err(Error::NotDisjoint {
                        line: c + 1,
                        label: v.to_string(),
                    });
                }
                raw[v] = c;
            }
        }
        if let Some(v) = raw.iter().position(|&c| c == usize::MAX) {
            return Err(Error::IncompleteCover { label: v.to_string() });
        }
        Partition::from_assignment(&raw)
    }

    /// Each vertex in its own community.
    pub fn singletons(n: usize) -> Result<Partition> {
        Partition::from_assignment(&(0..n).collect::<Vec<_>>())
    }

    #[inline]
    pub fn community(&self, v: VertexId) -> CommunityId {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[CommunityId] {
        &self.assignment
    }

    pub fn members(&self, c: CommunityId) -> &[VertexId] {
        &self.members[c]
    }

    pub fn communities(&self) -> &[Vec<VertexId>] {
        &self.members
    }

    pub fn num_vertices(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_communities(&self) -> usize {
        self.members.len()
    }
}

/// Overlapping community structure over the vertex universe `0..n`.
///
/// Covers built from a partition, from an LFR community file, or by vertex
/// replication give every vertex at least one membership. Covers read from
/// SNAP-style files may leave vertices uncovered; see [`Cover::uncovered`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    memberships: Vec<Vec<CommunityId>>,
    members: Vec<Vec<VertexId>>,
}

impl Cover {
    /// Builds a cover of `0..n`. Members are deduplicated and sorted; empty
    /// communities are dropped and the remaining ones renumbered in order.
    pub fn new(n: usize, communities: Vec<Vec<VertexId>>) -> Result<Cover> {
        let mut members = Vec::with_capacity(communities.len());
        let mut memberships = vec![Vec::new(); n];
        for mut community in communities {
            community.sort_unstable();
            community.dedup();
            if community.is_empty() {
                continue;
            }
            if let Some(&v) = community.iter().find(|&&v| v >= n) {
                return Err(Error::VertexOutOfRange(v));
            }
            let c = members.len();
            for &v in &community {
                memberships[v].push(c);
            }
            members.push(community);
        }
        Ok(Cover { memberships, members })
    }

    /// Lifts a partition to a cover of singleton memberships.
    pub fn from_partition(p: &Partition) -> Cover {
        Cover {
            memberships: p.assignment().iter().map(|&c| vec![c]).collect(),
            members: p.communities().to_vec(),
        }
    }

    /// Collapses a cover whose vertices all have exactly one membership.
    pub fn to_partition(&self) -> Option<Partition> {
        let raw: Option<Vec<usize>> = self.memberships.iter().map(|m| (m.len() == 1).then(|| m[0])).collect();
        Partition::from_assignment(&raw?).ok()
    }

    pub fn num_vertices(&self) -> usize {
        self.memberships.len()
    }

    pub fn num_communities(&self) -> usize {
        self.members.len()
    }

    pub fn memberships(&self, v: VertexId) -> &[CommunityId] {
        &self.memberships[v]
    }

    pub fn members(&self, c: CommunityId) -> &[VertexId] {
        &self.members[c]
    }

    pub fn communities(&self) -> &[Vec<VertexId>] {
        &self.members
    }

    pub fn is_covered(&self, v: VertexId) -> bool {
        !self.memberships[v].is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.memberships.iter().all(|m| !m.is_empty())
    }

    /// Vertices with no membership, ascending.
    pub fn uncovered(&self) -> Vec<VertexId> {
        (0..self.num_vertices()).filter(|&v| !self.is_covered(v)).collect()
    }

    /// Keeps only the vertices with `keep[v]`, dropping emptied communities.
    pub fn restrict(&self, keep: &[bool]) -> Cover {
        let communities = self
            .members
            .iter()
            .map(|c| c.iter().copied().filter(|&v| keep[v]).collect())
            .collect();
        Cover::new(self.num_vertices(), communities).expect("restriction stays in range")
    }

    /// Re-indexes the cover onto `vertices` (sorted ascending): new vertex
    /// `i` is `vertices[i]`. Members outside the set are dropped.
    pub fn reindex(&self, vertices: &[VertexId]) -> Cover {
        let mut new_id = vec![usize::MAX; self.num_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            new_id[v] = i;
        }
        let communities = self
            .members
            .iter()
            .map(|c| {
                c.iter()
                    .filter(|&&v| new_id[v] != usize::MAX)
                    .map(|&v| new_id[v])
                    .collect()
            })
            .collect();
        Cover::new(vertices.len(), communities).expect("reindex stays in range")
    }

    /// Communities as a sorted list of sorted member lists, for
    /// label-independent comparison.
    pub fn canonical(&self) -> Vec<Vec<VertexId>> {
        let mut sets = self.members.clone();
        sets.sort();
        sets
    }

    /// True when both covers hold the same set of communities.
    pub fn same_communities(&self, other: &Cover) -> bool {
        self.num_vertices() == other.num_vertices() && self.canonical() == other.canonical()
    }

    pub fn stats(&self) -> GroundTruthStats {
        let n_communities = self.num_communities();
        let total: usize = self.members.iter().map(Vec::len).sum();
        let covered = self.memberships.iter().filter(|m| !m.is_empty()).count();
        GroundTruthStats {
            n_communities,
            avg_size: if n_communities == 0 {
                0.0
            } else {
                total as f64 / n_communities as f64
            },
            avg_memberships: if covered == 0 {
                0.0
            } else {
                total as f64 / covered as f64
            },
        }
    }
}

/// Summary of a community structure: count, mean size and mean memberships
/// per covered vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruthStats {
    pub n_communities: usize,
    pub avg_size: f64,
    pub avg_memberships: f64,
}

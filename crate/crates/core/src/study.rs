//! Experimental procedures on graphs with ground-truth covers: the
//! overlap-stripping comparison, random subnetwork sampling and the
//! external-degree profile per membership count.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Cover, Graph, Partition, VertexId};
use crate::metrics::nmi_disjoint;

fn check_sizes(g: &Graph, truth: &Cover) -> Result<()> {
    if truth.num_vertices() != g.num_vertices() {
        return Err(Error::DomainMismatch(format!(
            "ground truth covers {} vertices, graph has {}",
            truth.num_vertices(),
            g.num_vertices()
        )));
    }
    let uncovered = truth.uncovered().len();
    if uncovered > 0 {
        log::info!("{uncovered} vertices without a ground-truth community are excluded");
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StripStudyResult {
    /// Vertices with two or more ground-truth memberships.
    pub removed_count: usize,
    /// Vertices left after removing overlapping and uncovered ones.
    pub kept_count: usize,
    pub nmi: f64,
    pub n_truth_comms: usize,
    pub n_detected_comms: usize,
}

impl StripStudyResult {
    pub fn tsv_header() -> &'static str {
        "removed\tkept\tremoved_fraction\tnmi\ttruth_communities\tdetected_communities"
    }

    pub fn to_tsv_row(&self) -> String {
        let total = (self.removed_count + self.kept_count) as f64;
        format!(
            "{}\t{}\t{:.6}\t{:.6}\t{}\t{}",
            self.removed_count,
            self.kept_count,
            self.removed_count as f64 / total,
            self.nmi,
            self.n_truth_comms,
            self.n_detected_comms
        )
    }
}

/// Removes every vertex with several ground-truth memberships from both the
/// ground truth and the detected partition, then compares what is left by
/// NMI. Communities emptied by the removal are dropped.
pub fn strip_overlap_study(g: &Graph, truth: &Cover, p: &Partition) -> Result<StripStudyResult> {
    check_sizes(g, truth)?;
    if p.num_vertices() != g.num_vertices() {
        return Err(Error::DomainMismatch("partition and graph sizes differ".into()));
    }
    let removed_count = g.vertices().filter(|&v| truth.memberships(v).len() >= 2).count();
    let kept: Vec<VertexId> = g.vertices().filter(|&v| truth.memberships(v).len() == 1).collect();
    if kept.is_empty() {
        return Err(Error::DegenerateStudy(
            "no vertex has exactly one ground-truth community".into(),
        ));
    }
    let truth_labels: Vec<usize> = kept.iter().map(|&v| truth.memberships(v)[0]).collect();
    let detected_labels: Vec<usize> = kept.iter().map(|&v| p.community(v)).collect();
    let restricted_truth = Partition::from_assignment(&truth_labels)?;
    let restricted_detected = Partition::from_assignment(&detected_labels)?;
    Ok(StripStudyResult {
        removed_count,
        kept_count: kept.len(),
        nmi: nmi_disjoint(&restricted_truth, &restricted_detected)?,
        n_truth_comms: restricted_truth.num_communities(),
        n_detected_comms: restricted_detected.num_communities(),
    })
}

/// A sampled subnetwork with its ground truth, both re-indexed so that new
/// vertex `i` is `vertices[i]` of the parent graph.
#[derive(Debug, Clone)]
pub struct Subnetwork {
    pub graph: Graph,
    pub truth: Cover,
    /// The sampled overlapping vertex, in parent ids.
    pub seed_vertex: VertexId,
    /// Parent ids of the subnetwork's vertices, ascending.
    pub vertices: Vec<VertexId>,
}

/// Vertices with at least two ground-truth memberships, ascending.
pub fn overlapping_vertices(truth: &Cover) -> Vec<VertexId> {
    (0..truth.num_vertices())
        .filter(|&v| truth.memberships(v).len() >= 2)
        .collect()
}

/// Picks an overlapping vertex `u` uniformly at random and returns the
/// subgraph induced by every vertex that shares a ground-truth community
/// with `u`, together with the ground truth restricted to it.
///
/// The choice uses ChaCha8 seeded from `seed`, so a seed always selects the
/// same subnetwork.
pub fn sample_subnetwork(g: &Graph, truth: &Cover, seed: u64) -> Result<Subnetwork> {
    check_sizes(g, truth)?;
    let candidates = overlapping_vertices(truth);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let &u = candidates.choose(&mut rng).ok_or(Error::NoOverlapVertex)?;
    let mut vertices: Vec<VertexId> = truth
        .memberships(u)
        .iter()
        .flat_map(|&c| truth.members(c).iter().copied())
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    let graph = g.induced_subgraph(&vertices)?;
    let truth = truth.reindex(&vertices);
    Ok(Subnetwork {
        graph,
        truth,
        seed_vertex: u,
        vertices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub memberships: usize,
    pub vertices: usize,
    pub mean_external_degree: f64,
    pub std_external_degree: f64,
}

/// Mean and (population) standard deviation of the external degree with
/// respect to `p`, grouped by the number of ground-truth memberships.
/// Vertices without ground truth are skipped.
pub fn external_degree_membership_profile(g: &Graph, truth: &Cover, p: &Partition) -> Result<Vec<ProfileRow>> {
    check_sizes(g, truth)?;
    if p.num_vertices() != g.num_vertices() {
        return Err(Error::DomainMismatch("partition and graph sizes differ".into()));
    }
    let mut groups: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for v in g.vertices() {
        let k = truth.memberships(v).len();
        if k == 0 {
            continue;
        }
        let own = p.community(v);
        let external = g.neighbors(v).iter().filter(|&&u| p.community(u) != own).count();
        groups.entry(k).or_default().push(external as f64);
    }
    Ok(groups
        .into_iter()
        .map(|(k, xs)| {
            let n = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / n;
            let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
            ProfileRow {
                memberships: k,
                vertices: xs.len(),
                mean_external_degree: mean,
                std_external_degree: var.sqrt(),
            }
        })
        .collect())
}

pub fn profile_table(rows: &[ProfileRow]) -> String {
    let mut out = String::from("memberships\tvertices\tmean_external_degree\tstd_external_degree\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{:.6}\t{:.6}",
            r.memberships, r.vertices, r.mean_external_degree, r.std_external_degree
        );
    }
    out
}

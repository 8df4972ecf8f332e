//! Permanence-based vertex replication.
//!
//! Turns a disjoint partition into a cover. For every boundary vertex `v`
//! (one with a neighbor outside its community) and every distinct community
//! `C` among its external neighbors, `v` is hypothetically moved into `C`
//! and the permanence of `v` and its neighbors is summed before and after.
//! When the two sums differ by at most `theta`, `v` is added to `C` while
//! keeping its original membership.
//!
//! All trials are evaluated against the input partition; accepted replicas
//! are only collected into the output. Each decision therefore depends on
//! `(graph, partition, v, C, theta)` alone, which makes the result independent
//! of the order in which vertices are processed and lets boundary vertices be
//! handled in parallel.

use std::io::Write;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{CommunityId, Cover, Graph, Labels, Partition, VertexId};
use crate::louvain::{louvain, LouvainConfig};
use crate::permanence::{neighborhood_permanence_sum, permanence_table, TrialMove};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationConfig {
    pub theta: f64,
}

impl Default for ReplicationConfig {
    fn default() -> Self {
        ReplicationConfig { theta: 0.05 }
    }
}

impl ReplicationConfig {
    pub fn new(theta: f64) -> Result<Self> {
        let cfg = ReplicationConfig { theta };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta >= 0.0 && self.theta.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "theta must be a finite non-negative number, got {}",
                self.theta
            )))
        }
    }
}

/// Outcome of one trial move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReplicationDecision {
    pub vertex: VertexId,
    pub source: CommunityId,
    pub target: CommunityId,
    pub sum_before: f64,
    pub sum_after: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone)]
pub struct Replication {
    pub cover: Cover,
    /// Every trial, ordered by vertex id then target community.
    pub decisions: Vec<ReplicationDecision>,
}

/// Vertices with at least one neighbor outside their own community,
/// ascending.
pub fn boundary_vertices(g: &Graph, p: &Partition) -> Vec<VertexId> {
    g.vertices()
        .filter(|&v| {
            let own = p.community(v);
            g.neighbors(v).iter().any(|&u| p.community(u) != own)
        })
        .collect()
}

/// Distinct communities of the external neighbors of `v`, ascending.
fn external_communities(g: &Graph, p: &Partition, v: VertexId) -> Vec<CommunityId> {
    let own = p.community(v);
    let mut targets: Vec<CommunityId> = g
        .neighbors(v)
        .iter()
        .map(|&u| p.community(u))
        .filter(|&c| c != own)
        .collect();
    targets.sort_unstable();
    targets.dedup();
    targets
}

/// Neighborhood permanence sum of `v` with `v` moved into `target`.
pub fn trial_move_sum(g: &Graph, p: &Partition, v: VertexId, target: CommunityId) -> Result<f64> {
    let valid = target != p.community(v) && g.neighbors(v).iter().any(|&u| p.community(u) == target);
    if !valid {
        return Err(Error::InvalidTarget {
            vertex: g.label(v).to_owned(),
            target,
        });
    }
    let moved = TrialMove {
        base: p,
        vertex: v,
        target,
    };
    neighborhood_permanence_sum(g, &moved, v)
}

/// All trials for one boundary vertex whose current neighborhood sum is
/// `sum_before`.
fn trials_for(g: &Graph, p: &Partition, theta: f64, v: VertexId, sum_before: f64) -> Result<Vec<ReplicationDecision>> {
    let source = p.community(v);
    external_communities(g, p, v)
        .into_iter()
        .map(|target| {
            let sum_after = trial_move_sum(g, p, v, target)?;
            Ok(ReplicationDecision {
                vertex: v,
                source,
                target,
                sum_before,
                sum_after,
                accepted: (sum_after - sum_before).abs() <= theta,
            })
        })
        .collect()
}

/// Vertices per parallel batch when streaming decisions.
const BATCH: usize = 4096;

/// Runs replication and hands every decision to `sink` in (vertex, target)
/// order without keeping the log in memory.
pub fn vertex_replication_streaming<F>(
    g: &Graph,
    p: &Partition,
    cfg: &ReplicationConfig,
    exec: Execution,
    mut sink: F,
) -> Result<Cover>
where
    F: FnMut(&ReplicationDecision) -> Result<()>,
{
    cfg.validate()?;
    if p.num_vertices() != g.num_vertices() {
        return Err(Error::DomainMismatch(format!(
            "partition covers {} vertices, graph has {}",
            p.num_vertices(),
            g.num_vertices()
        )));
    }
    let mut communities = p.communities().to_vec();
    let perms: Vec<f64> = permanence_table(g, p, exec)
        .iter()
        .map(|view| view.map_or(f64::NAN, |view| view.perm))
        .collect();
    let boundary = boundary_vertices(g, p);
    for batch in boundary.chunks(BATCH) {
        // Same terms in the same order as `neighborhood_permanence_sum`.
        let results = exec.map(batch, |&v| {
            let sum_before = g.neighbors(v).iter().fold(perms[v], |acc, &u| acc + perms[u]);
            trials_for(g, p, cfg.theta, v, sum_before)
        });
        for trials in results {
            for d in trials? {
                if d.accepted {
                    communities[d.target].push(d.vertex);
                }
                sink(&d)?;
            }
        }
    }
    Cover::new(g.num_vertices(), communities)
}

pub fn vertex_replication_with(
    g: &Graph,
    p: &Partition,
    cfg: &ReplicationConfig,
    exec: Execution,
) -> Result<Replication> {
    let mut decisions = Vec::new();
    let cover = vertex_replication_streaming(g, p, cfg, exec, |d| {
        decisions.push(*d);
        Ok(())
    })?;
    Ok(Replication { cover, decisions })
}

pub fn vertex_replication(g: &Graph, p: &Partition, cfg: &ReplicationConfig) -> Result<Replication> {
    vertex_replication_with(g, p, cfg, Execution::default())
}

/// Sequential replication visiting vertices in the given order. Vertices
/// that are not on the boundary produce no trials. Decisions are returned in
/// visiting order.
pub fn vertex_replication_in_order(
    g: &Graph,
    p: &Partition,
    cfg: &ReplicationConfig,
    order: &[VertexId],
) -> Result<Replication> {
    cfg.validate()?;
    let mut communities = p.communities().to_vec();
    let mut decisions = Vec::new();
    for &v in order {
        for d in trials_for(g, p, cfg.theta, v, neighborhood_permanence_sum(g, p, v)?)? {
            if d.accepted {
                communities[d.target].push(d.vertex);
            }
            decisions.push(d);
        }
    }
    let cover = Cover::new(g.num_vertices(), communities)?;
    Ok(Replication { cover, decisions })
}

/// Source of the disjoint partition that replication post-processes.
pub trait DisjointDetector {
    fn partition(&self, g: &Graph) -> Result<Partition>;
}

impl DisjointDetector for LouvainConfig {
    fn partition(&self, g: &Graph) -> Result<Partition> {
        louvain(g, self)
    }
}

/// A partition computed elsewhere (for example imported from a file).
impl DisjointDetector for Partition {
    fn partition(&self, g: &Graph) -> Result<Partition> {
        if self.num_vertices() != g.num_vertices() {
            return Err(Error::DomainMismatch(format!(
                "partition covers {} vertices, graph has {}",
                self.num_vertices(),
                g.num_vertices()
            )));
        }
        Ok(self.clone())
    }
}

/// Detects a disjoint partition and replicates boundary vertices.
pub fn detect<D: DisjointDetector + ?Sized>(g: &Graph, detector: &D, cfg: &ReplicationConfig) -> Result<Cover> {
    let p = detector.partition(g)?;
    vertex_replication(g, &p, cfg).map(|r| r.cover)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros removed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// One decision as a log line (without newline):
/// `vertex  source  target  sum_before  sum_after  accepted`.
pub fn decision_line(d: &ReplicationDecision, labels: &Labels) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}",
        labels.name(d.vertex),
        d.source,
        d.target,
        format_significant(d.sum_before, 12),
        format_significant(d.sum_after, 12),
        d.accepted
    )
}

pub fn write_decisions<W: Write>(decisions: &[ReplicationDecision], labels: &Labels, mut w: W) -> Result<()> {
    for d in decisions {
        writeln!(w, "{}", decision_line(d, labels)).map_err(Error::Write)?;
    }
    w.flush().map_err(Error::Write)
}

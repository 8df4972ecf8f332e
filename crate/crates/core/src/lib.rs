//! Overlapping community detection by permanence-based vertex replication.
//!
//! A disjoint partition (from the built-in Louvain optimizer or imported from
//! another tool) is post-processed: every vertex with a neighbor outside its
//! community is tentatively moved into each neighboring community, and it is
//! replicated there when the permanence of its closed neighborhood changes by
//! at most a threshold `theta`. The crate also provides the cover-comparison
//! metrics (overlapping NMI, Omega index, average F1, NMI) and the study
//! procedures used to evaluate detected covers against ground truth.

pub mod error;
pub mod exec;
pub mod graph;
pub mod io;
pub mod louvain;
pub mod metrics;
pub mod permanence;
pub mod replication;
pub mod study;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{build_graph, CommunityId, Cover, Graph, GroundTruthStats, Labels, Partition, VertexId};
pub use louvain::{louvain, modularity, LouvainConfig};
pub use metrics::{avg_f1, nmi_disjoint, omega_index, onmi, MetricReport, MetricSet};
pub use permanence::{permanence, PermanenceView};
pub use replication::{detect, vertex_replication, DisjointDetector, ReplicationConfig, ReplicationDecision};

//! Readers and writers for edge lists and community files.
//!
//! Supported layouts:
//!
//! * edge list: one `u v` pair per line, whitespace separated, `#` comments.
//!   A third column (edge weight) is ignored.
//! * LFR community file: `node<TAB>cid [cid ...]`, one line per node.
//! * SNAP community file: one community per line, tab separated node ids.
//! * cover output: the SNAP layout in canonical order (see [`write_cover`]).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{build_graph, compare_labels, CommunityId, Cover, Graph, Labels, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FileFormat {
    EdgeList,
    LfrCommunity,
    SnapCommunity,
    CoverOut,
}

impl FromStr for FileFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edges" | "edge_list" | "edge_list_tsv" => Ok(FileFormat::EdgeList),
            "lfr" | "lfr_community" => Ok(FileFormat::LfrCommunity),
            "snap" | "snap_community" => Ok(FileFormat::SnapCommunity),
            "cover" | "cover_out" => Ok(FileFormat::CoverOut),
            other => Err(Error::InvalidConfig(format!("unknown file format `{other}`"))),
        }
    }
}

/// Iterates over non-blank, non-comment lines as `(line_number, text)`.
/// Fails on invalid UTF-8 with the offending line number.
fn content_lines<R: BufRead>(mut reader: R) -> impl Iterator<Item = Result<(usize, String)>> {
    let mut line_no = 0;
    let mut buf = Vec::new();
    std::iter::from_fn(move || loop {
        buf.clear();
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => return None,
            Ok(_) => {}
            Err(e) => return Some(Err(Error::Read(e))),
        }
        line_no += 1;
        let text = match std::str::from_utf8(&buf) {
            Ok(t) => t.trim(),
            Err(_) => {
                return Some(Err(Error::Parse {
                    line: line_no,
                    message: "invalid UTF-8".into(),
                }))
            }
        };
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        return Some(Ok((line_no, text.to_owned())));
    })
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut warned = false;
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut tokens = text.split_whitespace();
        let (Some(u), Some(v)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line,
                message: format!("expected two vertex ids, found `{text}`"),
            });
        };
        if tokens.next().is_some() && !warned {
            log::warn!("line {line}: extra columns (edge weights) are ignored");
            warned = true;
        }
        edges.push((u.to_owned(), v.to_owned()));
    }
    build_graph(edges)
}

pub fn read_edge_list_file(path: impl AsRef<Path>) -> Result<Graph> {
    read_edge_list(open_file(path)?)
}

/// Per-vertex community tokens from an LFR-style file, with community ids
/// numbered in first-appearance order.
pub(crate) struct LfrAssignment {
    pub memberships: Vec<Vec<CommunityId>>,
    pub num_communities: usize,
}

pub(crate) fn parse_lfr<R: BufRead>(reader: R, labels: &Labels, require_disjoint: bool) -> Result<LfrAssignment> {
    let mut community_ids: HashMap<String, CommunityId> = HashMap::new();
    let mut memberships: Vec<Vec<CommunityId>> = vec![Vec::new(); labels.len()];
    for item in content_lines(reader) {
        let (line, text) = item?;
        let mut tokens = text.split_whitespace();
        let node = tokens.next().expect("content lines are non-empty");
        let v = labels.get(node).ok_or_else(|| Error::UnknownVertex {
            line,
            label: node.to_owned(),
        })?;
        let before = memberships[v].len();
        for token in tokens {
            let next = community_ids.len();
            let c = *community_ids.entry(token.to_owned()).or_insert(next);
            if !memberships[v].contains(&c) {
                memberships[v].push(c);
            }
        }
        if memberships[v].len() == before && before == 0 {
            return Err(Error::Parse {
                line,
                message: format!("vertex `{node}` lists no community"),
            });
        }
        if require_disjoint && memberships[v].len() > 1 {
            return Err(Error::NotDisjoint {
                line,
                label: node.to_owned(),
            });
        }
    }
    if let Some(v) = memberships.iter().position(Vec::is_empty) {
        return Err(Error::IncompleteCover {
            label: labels.name(v).to_owned(),
        });
    }
    Ok(LfrAssignment {
        memberships,
        num_communities: community_ids.len(),
    })
}

/// Reads an LFR `community.dat` file. Every vertex of `labels` must appear.
pub fn read_lfr_communities<R: BufRead>(reader: R, labels: &Labels) -> Result<Cover> {
    let parsed = parse_lfr(reader, labels, false)?;
    let mut communities = vec![Vec::new(); parsed.num_communities];
    for (v, cs) in parsed.memberships.iter().enumerate() {
        for &c in cs {
            communities[c].push(v);
        }
    }
    Cover::new(labels.len(), communities)
}

pub fn read_lfr_communities_file(path: impl AsRef<Path>, labels: &Labels) -> Result<Cover> {
    read_lfr_communities(open_file(path)?, labels)
}

/// Reads a SNAP community file. Vertices in no community are allowed and
/// show up in [`Cover::uncovered`].
pub fn read_snap_communities<R: BufRead>(reader: R, labels: &Labels) -> Result<Cover> {
    let mut communities = Vec::new();
    for item in content_lines(reader) {
        let (line, text) = item?;
        let community = text
            .split_whitespace()
            .map(|token| {
                labels.get(token).ok_or_else(|| Error::UnknownVertex {
                    line,
                    label: token.to_owned(),
                })
            })
            .collect::<Result<Vec<VertexId>>>()?;
        communities.push(community);
    }
    Cover::new(labels.len(), communities)
}

pub fn read_snap_communities_file(path: impl AsRef<Path>, labels: &Labels) -> Result<Cover> {
    read_snap_communities(open_file(path)?, labels)
}

/// Reads a community file in either layout.
pub fn read_cover<R: BufRead>(reader: R, format: FileFormat, labels: &Labels) -> Result<Cover> {
    match format {
        FileFormat::LfrCommunity => read_lfr_communities(reader, labels),
        FileFormat::SnapCommunity | FileFormat::CoverOut => read_snap_communities(reader, labels),
        FileFormat::EdgeList => Err(Error::InvalidConfig("an edge list is not a community file".into())),
    }
}

pub fn read_cover_file(path: impl AsRef<Path>, format: FileFormat, labels: &Labels) -> Result<Cover> {
    read_cover(open_file(path)?, format, labels)
}

/// Adds every vertex token of a community file to `labels`. Used when no
/// graph is available to define the vertex universe.
pub fn collect_community_labels<R: BufRead>(reader: R, format: FileFormat, labels: &mut Labels) -> Result<()> {
    for item in content_lines(reader) {
        let (_, text) = item?;
        let mut tokens = text.split_whitespace();
        match format {
            FileFormat::LfrCommunity => {
                labels.intern(tokens.next().expect("content lines are non-empty"));
            }
            _ => tokens.for_each(|t| {
                labels.intern(t);
            }),
        }
    }
    Ok(())
}

/// Communities in output order: members sorted by label, communities sorted
/// by their member lists (so by smallest member first).
pub fn canonical_communities<'a>(cover: &Cover, labels: &'a Labels) -> Vec<Vec<&'a str>> {
    let mut out: Vec<Vec<&str>> = cover
        .communities()
        .iter()
        .map(|c| {
            let mut names: Vec<&str> = c.iter().map(|&v| labels.name(v)).collect();
            names.sort_by(|a, b| compare_labels(a, b));
            names
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| compare_labels(x, y))
            .find(|o| o.is_ne())
            .unwrap_or_else(|| a.len().cmp(&b.len()))
    });
    out
}

/// Writes a cover one community per line, tab separated, using external
/// labels in canonical order.
pub fn write_cover<W: Write>(cover: &Cover, labels: &Labels, mut writer: W) -> Result<()> {
    for community in canonical_communities(cover, labels) {
        writeln!(writer, "{}", community.join("\t")).map_err(Error::Write)?;
    }
    writer.flush().map_err(Error::Write)
}

pub fn write_cover_file(cover: &Cover, labels: &Labels, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path).map_err(Error::Write)?;
    write_cover(cover, labels, BufWriter::new(file))
}

pub fn open_file(path: impl AsRef<Path>) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(Error::Read)
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use pvoc::io::{self, FileFormat};
use pvoc::metrics::{self, format_score, MethodScores};
use pvoc::permanence::permanence_table;
use pvoc::replication::{decision_line, format_significant, vertex_replication_streaming};
use pvoc::study::{self, Subnetwork};
use pvoc::{Cover, Execution, Graph, Labels, LouvainConfig, Partition, ReplicationConfig};

use crate::manifest::{beside, RunManifest};
use crate::{BenchArgs, DetectArgs, DisjointSource, EvalArgs, PermArgs, StudyArgs};

fn load_graph(path: &Path) -> Result<Graph> {
    io::read_edge_list_file(path).with_context(|| format!("reading graph {}", path.display()))
}

fn load_cover(path: &Path, format: FileFormat, labels: &Labels) -> Result<Cover> {
    io::read_cover_file(path, format, labels).with_context(|| format!("reading communities {}", path.display()))
}

fn load_partition(g: &Graph, source: &DisjointSource, seed: u64) -> Result<Partition> {
    match source {
        DisjointSource::Louvain => {
            let cfg = LouvainConfig {
                seed,
                ..Default::default()
            };
            Ok(pvoc::louvain(g, &cfg)?)
        }
        DisjointSource::File(path) => pvoc::louvain::import_partition_file(path, g.labels())
            .with_context(|| format!("reading partition {}", path.display())),
    }
}

/// Writes `text` to `path`, or to standard output.
fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

pub fn detect(args: &DetectArgs, manifest_path: Option<&Path>, argv: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("detect", argv);
    let cfg = ReplicationConfig::new(args.theta)?;
    let g = load_graph(&args.graph)?;
    let p = load_partition(&g, &args.disjoint, args.seed)?;

    let mut log = match &args.decisions {
        Some(path) => Some(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => None,
    };
    let mut accepted = 0usize;
    let cover = vertex_replication_streaming(&g, &p, &cfg, Execution::Parallel, |d| {
        accepted += usize::from(d.accepted);
        if let Some(w) = log.as_mut() {
            writeln!(w, "{}", decision_line(d, g.labels())).map_err(pvoc::Error::Write)?;
        }
        Ok(())
    })?;
    if let Some(mut w) = log {
        w.flush()?;
    }
    io::write_cover_file(&cover, g.labels(), &args.out)?;
    log::info!("{} communities, {} replicas placed", cover.num_communities(), accepted);

    manifest.set_path("graph", &args.graph);
    manifest.set("disjoint", &args.disjoint);
    manifest.set("theta", args.theta);
    manifest.set("seed", args.seed);
    manifest.set_path("out", &args.out);
    if let Some(d) = &args.decisions {
        manifest.set_path("decisions", d);
    }
    manifest.finish(Some(manifest_path.map_or_else(|| beside(&args.out), Path::to_path_buf)))
}

pub fn eval(args: &EvalArgs, manifest_path: Option<&Path>, argv: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("eval", argv);
    let labels = match &args.graph {
        Some(path) => load_graph(path)?.labels().clone(),
        None => {
            let mut labels = Labels::new();
            for (path, format) in [(&args.truth, args.truth_format), (&args.detected, args.detected_format)] {
                let reader = io::open_file(path).with_context(|| format!("reading {}", path.display()))?;
                io::collect_community_labels(reader, format, &mut labels)?;
            }
            labels
        }
    };
    let truth = load_cover(&args.truth, args.truth_format, &labels)?;
    let detected = load_cover(&args.detected, args.detected_format, &labels)?;

    let without_nmi = pvoc::MetricSet {
        nmi: false,
        ..args.metrics
    };
    let mut report = metrics::evaluate(&detected, &truth, &without_nmi)?;
    let nmi = if args.metrics.nmi {
        Some(metrics::nmi_of_covers(&detected, &truth))
    } else {
        None
    };
    if let Some(Ok(x)) = nmi {
        report.nmi = Some(x);
    }
    print!("{}", report.to_key_value());
    if let Some(out) = &args.out {
        let text = format!("{}\n{}\n", pvoc::MetricReport::tsv_header(), report.to_tsv_row());
        fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
        manifest.set_path("out", out);
    }
    manifest.set_path("detected", &args.detected);
    manifest.set_path("truth", &args.truth);
    manifest.set("truth_format", format!("{:?}", args.truth_format));
    manifest.finish(
        manifest_path
            .map(Path::to_path_buf)
            .or_else(|| args.out.as_deref().map(beside)),
    )?;
    if let Some(Err(e)) = nmi {
        return Err(e.into());
    }
    Ok(())
}

struct SampleOutcome {
    index: u64,
    seed: u64,
    seed_vertex: String,
    vertices: usize,
    edges: usize,
    scores: Vec<(String, MethodScores)>,
}

fn score(detected: &Cover, truth: &Cover) -> pvoc::Result<MethodScores> {
    Ok(MethodScores {
        onmi: metrics::onmi(detected, truth)?,
        omega: metrics::omega_index(detected, truth)?,
        f1: metrics::avg_f1(detected, truth)?,
    })
}

fn run_sample(
    g: &Graph,
    truth: &Cover,
    compare: &[(String, Cover)],
    cfg: &ReplicationConfig,
    index: u64,
    seed: u64,
) -> pvoc::Result<SampleOutcome> {
    let Subnetwork {
        graph: sub,
        truth: sub_truth,
        seed_vertex,
        vertices,
    } = study::sample_subnetwork(g, truth, seed)?;
    let p = pvoc::louvain(&sub, &LouvainConfig::default())?;
    // Samples already run in parallel.
    let replicated = pvoc::replication::vertex_replication_with(&sub, &p, cfg, Execution::Sequential)?;
    let mut scores = vec![
        ("pvoc".to_owned(), score(&replicated.cover, &sub_truth)?),
        ("louvain".to_owned(), score(&Cover::from_partition(&p), &sub_truth)?),
    ];
    for (name, cover) in compare {
        scores.push((name.clone(), score(&cover.reindex(&vertices), &sub_truth)?));
    }
    Ok(SampleOutcome {
        index,
        seed,
        seed_vertex: g.label(seed_vertex).to_owned(),
        vertices: sub.num_vertices(),
        edges: sub.num_edges(),
        scores,
    })
}

pub fn bench(args: &BenchArgs, manifest_path: Option<&Path>, argv: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("bench", argv);
    let cfg = ReplicationConfig::new(args.theta)?;
    let g = load_graph(&args.graph)?;
    let truth = load_cover(&args.truth, args.truth_format, g.labels())?;
    let compare: Vec<(String, Cover)> = args
        .compare
        .iter()
        .map(|path| {
            Ok((
                path.display().to_string(),
                load_cover(path, FileFormat::SnapCommunity, g.labels())?,
            ))
        })
        .collect::<Result<_>>()?;
    if study::overlapping_vertices(&truth).is_empty() {
        return Err(pvoc::Error::NoOverlapVertex.into());
    }

    let indices: Vec<u64> = (0..args.samples).collect();
    let outcomes = Execution::Parallel
        .map(&indices, |&i| {
            run_sample(&g, &truth, &compare, &cfg, i, args.seed.wrapping_add(i))
        })
        .into_iter()
        .collect::<pvoc::Result<Vec<_>>>()?;

    let mut text = String::from("sample\tseed\tseed_vertex\tvertices\tedges\tmethod\tonmi\tomega\tavg_f1\n");
    let mut sums: BTreeMap<String, (usize, [f64; 3])> = BTreeMap::new();
    let mut method_order: Vec<String> = Vec::new();
    for o in &outcomes {
        for (method, s) in &o.scores {
            let _ = writeln!(
                text,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                o.index,
                o.seed,
                o.seed_vertex,
                o.vertices,
                o.edges,
                method,
                format_score(s.onmi),
                format_score(s.omega),
                format_score(s.f1)
            );
            let entry = sums.entry(method.clone()).or_insert_with(|| {
                method_order.push(method.clone());
                (0, [0.0; 3])
            });
            entry.0 += 1;
            entry.1[0] += s.onmi;
            entry.1[1] += s.omega;
            entry.1[2] += s.f1;
        }
    }

    let means: BTreeMap<String, MethodScores> = sums
        .iter()
        .map(|(name, (count, total))| {
            let n = *count as f64;
            (
                name.clone(),
                MethodScores {
                    onmi: total[0] / n,
                    omega: total[1] / n,
                    f1: total[2] / n,
                },
            )
        })
        .collect();
    text.push_str("\nmethod\tsamples\tonmi\tomega\tavg_f1\tcomposite\n");
    if !means.is_empty() {
        let composite = metrics::composite_scores(&means)?;
        for name in &method_order {
            let m = &means[name];
            let _ = writeln!(
                text,
                "{}\t{}\t{}\t{}\t{}\t{}",
                name,
                sums[name].0,
                format_score(m.onmi),
                format_score(m.omega),
                format_score(m.f1),
                format_score(composite[name])
            );
        }
    }
    emit(&text, args.out.as_deref())?;

    manifest.set_path("graph", &args.graph);
    manifest.set_path("truth", &args.truth);
    manifest.set("samples", args.samples);
    manifest.set("seed", args.seed);
    manifest.set("theta", args.theta);
    for path in &args.compare {
        manifest.set_path("compare", path);
    }
    if let Some(out) = &args.out {
        manifest.set_path("out", out);
    }
    manifest.finish(
        manifest_path
            .map(Path::to_path_buf)
            .or_else(|| args.out.as_deref().map(beside)),
    )
}

pub fn study(args: &StudyArgs, manifest_path: Option<&Path>, argv: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("study", argv);
    let g = load_graph(&args.graph)?;
    let truth = load_cover(&args.truth, args.truth_format, g.labels())?;
    let p = load_partition(&g, &args.disjoint, args.seed)?;
    let text = if args.strip {
        let r = study::strip_overlap_study(&g, &truth, &p)?;
        format!("{}\n{}\n", study::StripStudyResult::tsv_header(), r.to_tsv_row())
    } else {
        study::profile_table(&study::external_degree_membership_profile(&g, &truth, &p)?)
    };
    emit(&text, args.out.as_deref())?;

    manifest.set_path("graph", &args.graph);
    manifest.set_path("truth", &args.truth);
    manifest.set("disjoint", &args.disjoint);
    manifest.set("mode", if args.strip { "strip" } else { "profile" });
    if let Some(out) = &args.out {
        manifest.set_path("out", out);
    }
    manifest.finish(
        manifest_path
            .map(Path::to_path_buf)
            .or_else(|| args.out.as_deref().map(beside)),
    )
}

pub fn perm(args: &PermArgs, manifest_path: Option<&Path>, argv: &[String]) -> Result<()> {
    let mut manifest = RunManifest::new("perm", argv);
    let g = load_graph(&args.graph)?;
    let p = load_partition(&g, &args.disjoint, args.seed)?;
    let mut text = String::from("vertex\tI\tD\tEmax\tc_in\tperm\n");
    for (v, view) in permanence_table(&g, &p, Execution::Parallel).iter().enumerate() {
        let label = g.label(v);
        let _ = match view {
            Some(view) => writeln!(
                text,
                "{label}\t{}\t{}\t{}\t{}\t{}",
                view.internal,
                view.degree,
                view.e_max.map_or_else(|| "NA".to_owned(), |e| e.to_string()),
                format_significant(view.c_in, 12),
                format_significant(view.perm, 12)
            ),
            None => writeln!(text, "{label}\t0\t0\tNA\tNA\tNA"),
        };
    }
    emit(&text, args.out.as_deref())?;

    manifest.set_path("graph", &args.graph);
    manifest.set("disjoint", &args.disjoint);
    if let Some(out) = &args.out {
        manifest.set_path("out", out);
    }
    manifest.finish(
        manifest_path
            .map(Path::to_path_buf)
            .or_else(|| args.out.as_deref().map(beside)),
    )
}

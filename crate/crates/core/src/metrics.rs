//! Agreement scores between community structures.
//!
//! Covers passed to the overlapping metrics must share a vertex universe.
//! When one side leaves vertices uncovered (typical for SNAP ground truth)
//! ONMI and Omega, whose values depend on the vertex count, are computed on
//! the vertices covered on both sides. Average F1 compares the communities
//! as given.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Cover, Partition, VertexId};

fn check_universe(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DomainMismatch(format!(
            "{a} vertices on one side, {b} on the other"
        )))
    }
}

/// Restricts both covers to the vertices covered by both.
fn common_support(c1: &Cover, c2: &Cover) -> Result<(Cover, Cover, usize)> {
    check_universe(c1.num_vertices(), c2.num_vertices())?;
    let keep: Vec<bool> = (0..c1.num_vertices())
        .map(|v| c1.is_covered(v) && c2.is_covered(v))
        .collect();
    let kept = keep.iter().filter(|&&k| k).count();
    if kept < c1.num_vertices() && (!c1.is_complete() || !c2.is_complete()) {
        log::info!(
            "comparing covers on the {kept} of {} vertices covered by both",
            c1.num_vertices()
        );
    }
    if c1.is_complete() && c2.is_complete() {
        return Ok((c1.clone(), c2.clone(), kept));
    }
    Ok((c1.restrict(&keep), c2.restrict(&keep), kept))
}

fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, n: f64) -> f64 {
    counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// NMI between two disjoint partitions, `2 I(X;Y) / (H(X) + H(Y))`.
/// Two single-community partitions score 1.
pub fn nmi_disjoint(p1: &Partition, p2: &Partition) -> Result<f64> {
    check_universe(p1.num_vertices(), p2.num_vertices())?;
    let n = p1.num_vertices() as f64;
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for v in 0..p1.num_vertices() {
        *joint.entry((p1.community(v), p2.community(v))).or_insert(0) += 1;
    }
    let h1 = entropy_of_counts(p1.communities().iter().map(Vec::len), n);
    let h2 = entropy_of_counts(p2.communities().iter().map(Vec::len), n);
    if h1 + h2 == 0.0 {
        return Ok(1.0);
    }
    let mut mutual = 0.0;
    for (&(a, b), &count) in &joint {
        let pab = count as f64 / n;
        let pa = p1.members(a).len() as f64 / n;
        let pb = p2.members(b).len() as f64 / n;
        mutual += pab * (pab / (pa * pb)).log2();
    }
    Ok((2.0 * mutual / (h1 + h2)).clamp(0.0, 1.0))
}

/// `-w log2(w / n)`, zero for `w = 0`.
fn h(w: f64, n: f64) -> f64 {
    if w > 0.0 {
        -w * (w / n).log2()
    } else {
        0.0
    }
}

/// Conditional entropy contributions of every community of `x` given the
/// whole of `y`, summed. `overlap(i, j)` is `|x_i ∩ y_j|`.
fn lack_of_information(
    x: &[Vec<VertexId>],
    y: &[Vec<VertexId>],
    overlap: &dyn Fn(usize, usize) -> usize,
    n: f64,
) -> (f64, f64) {
    let mut total_entropy = 0.0;
    let mut total_conditional = 0.0;
    for (i, xi) in x.iter().enumerate() {
        let size_x = xi.len() as f64;
        let entropy = h(size_x, n) + h(n - size_x, n);
        let mut best = f64::INFINITY;
        for (j, yj) in y.iter().enumerate() {
            let size_y = yj.len() as f64;
            let d = overlap(i, j) as f64;
            let c = size_x - d;
            let b = size_y - d;
            let a = n - size_x - size_y + d;
            if h(a, n) + h(d, n) >= h(b, n) + h(c, n) {
                let conditional = h(a, n) + h(b, n) + h(c, n) + h(d, n) - h(b + d, n) - h(a + c, n);
                best = best.min(conditional);
            }
        }
        total_entropy += entropy;
        total_conditional += if best.is_finite() { best } else { entropy };
    }
    (total_entropy, total_conditional)
}

/// Overlapping NMI with max normalization:
///
/// ```text
/// I(X:Y) = (H(X) - H(X|Y) + H(Y) - H(Y|X)) / 2
/// NMI    = I(X:Y) / max(H(X), H(Y))
/// ```
///
/// `H(X)` sums the binary entropies of the membership vectors of the
/// communities in `X`. `H(X_i|Y)` is the smallest `H(X_i|Y_j)` among the
/// communities `Y_j` that carry information about `X_i` (those with
/// `h(a) + h(d) >= h(b) + h(c)` over the 2x2 membership counts), falling back
/// to `H(X_i)` when none does.
pub fn onmi(c1: &Cover, c2: &Cover) -> Result<f64> {
    let (x, y, kept) = common_support(c1, c2)?;
    if kept == 0 {
        return Err(Error::DomainMismatch("no vertex is covered by both covers".into()));
    }
    let n = kept as f64;
    let mut overlaps: HashMap<(usize, usize), usize> = HashMap::new();
    for v in 0..x.num_vertices() {
        for &i in x.memberships(v) {
            for &j in y.memberships(v) {
                *overlaps.entry((i, j)).or_insert(0) += 1;
            }
        }
    }
    let forward = |i: usize, j: usize| overlaps.get(&(i, j)).copied().unwrap_or(0);
    let backward = |j: usize, i: usize| overlaps.get(&(i, j)).copied().unwrap_or(0);
    let (hx, hx_given_y) = lack_of_information(x.communities(), y.communities(), &forward, n);
    let (hy, hy_given_x) = lack_of_information(y.communities(), x.communities(), &backward, n);
    let denominator = hx.max(hy);
    if denominator == 0.0 {
        return Ok(1.0);
    }
    let mutual = 0.5 * (hx - hx_given_y + hy - hy_given_x);
    Ok((mutual / denominator).clamp(0.0, 1.0))
}

/// Number of shared communities for every vertex pair that shares at least
/// one.
fn co_membership(c: &Cover) -> HashMap<(VertexId, VertexId), u32> {
    let mut counts = HashMap::new();
    for members in c.communities() {
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                *counts.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// Omega index: chance-corrected agreement on how many communities each
/// vertex pair shares.
///
/// With `N = n(n-1)/2` pairs and `t_j(C)` the pairs sharing exactly `j`
/// communities in `C`, observed agreement is `A = sum_j |t_j(c1) ∩ t_j(c2)| / N`,
/// expected agreement `E = sum_j |t_j(c1)| |t_j(c2)| / N^2`, and the index is
/// `(A - E) / (1 - E)`; 1 when `E = 1`. Computed in exact integer arithmetic up
/// to the final division.
pub fn omega_index(c1: &Cover, c2: &Cover) -> Result<f64> {
    let (x, y, kept) = common_support(c1, c2)?;
    if kept < 2 {
        return Err(Error::DomainMismatch(
            "omega index needs at least two common vertices".into(),
        ));
    }
    let pairs = (kept * (kept - 1) / 2) as u128;
    let cx = co_membership(&x);
    let cy = co_membership(&y);

    let mut agree = 0u128;
    let mut shared_keys = 0u128;
    for (key, &count) in &cx {
        if let Some(&other) = cy.get(key) {
            shared_keys += 1;
            if other == count {
                agree += 1;
            }
        }
    }
    let union = cx.len() as u128 + cy.len() as u128 - shared_keys;
    agree += pairs - union;

    let histogram = |counts: &HashMap<(VertexId, VertexId), u32>| {
        let mut hist: BTreeMap<u32, u128> = BTreeMap::new();
        for &c in counts.values() {
            *hist.entry(c).or_insert(0) += 1;
        }
        hist.insert(0, pairs - counts.len() as u128);
        hist
    };
    let hx = histogram(&cx);
    let hy = histogram(&cy);
    let expected: u128 = hx.iter().map(|(j, &tx)| tx * hy.get(j).copied().unwrap_or(0)).sum();
    let total = pairs * pairs;
    if expected == total {
        return Ok(1.0);
    }
    let numerator = (agree * pairs) as i128 - expected as i128;
    let denominator = (total - expected) as f64;
    Ok(numerator as f64 / denominator)
}

/// Best F1 of every community of `from` against any community of `to`.
fn best_matches(from: &Cover, to: &Cover) -> Vec<f64> {
    from.communities()
        .iter()
        .map(|a| {
            let mut overlap: HashMap<usize, usize> = HashMap::new();
            for &v in a {
                for &j in to.memberships(v) {
                    *overlap.entry(j).or_insert(0) += 1;
                }
            }
            overlap
                .into_iter()
                .map(|(j, common)| 2.0 * common as f64 / (a.len() + to.members(j).len()) as f64)
                .fold(0.0, f64::max)
        })
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Average F1: the mean of (a) the average best-match F1 of truth communities
/// against detected ones and (b) the reverse.
pub fn avg_f1(detected: &Cover, truth: &Cover) -> Result<f64> {
    check_universe(detected.num_vertices(), truth.num_vertices())?;
    if detected.num_communities() == 0 || truth.num_communities() == 0 {
        return Err(Error::EmptyCover);
    }
    let truth_side = mean(&best_matches(truth, detected));
    let detected_side = mean(&best_matches(detected, truth));
    Ok(0.5 * (truth_side + detected_side))
}

/// `|a ∩ b| / |a ∪ b|` over vertex sets; 1 when both are empty.
pub fn jaccard(a: &[VertexId], b: &[VertexId]) -> f64 {
    let a: std::collections::BTreeSet<_> = a.iter().collect();
    let b: std::collections::BTreeSet<_> = b.iter().collect();
    let union = a.union(&b).count();
    if union == 0 {
        return 1.0;
    }
    a.intersection(&b).count() as f64 / union as f64
}

/// The three headline scores of one method.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MethodScores {
    pub onmi: f64,
    pub omega: f64,
    pub f1: f64,
}

/// Sum of column-normalized scores per method.
///
/// Each metric is divided by its best value over all methods, so the best
/// method in a column scores 1 there and a method best in all three scores 3.
/// Negative omega values are clipped to 0; a column that is zero for every
/// method contributes 0.
pub fn composite_scores(per_method: &BTreeMap<String, MethodScores>) -> Result<BTreeMap<String, f64>> {
    if per_method.is_empty() {
        return Err(Error::InvalidConfig("composite scores need at least one method".into()));
    }
    let rows: Vec<(&String, [f64; 3])> = per_method
        .iter()
        .map(|(name, s)| (name, [s.onmi, s.omega.max(0.0), s.f1]))
        .collect();
    if let Some((name, _)) = rows.iter().find(|(_, r)| r.iter().any(|&x| x.is_nan() || x < 0.0)) {
        return Err(Error::InvalidConfig(format!(
            "method `{name}` has a negative or undefined score"
        )));
    }
    let mut best = [0.0f64; 3];
    for (_, row) in &rows {
        for (b, &x) in best.iter_mut().zip(row) {
            *b = b.max(x);
        }
    }
    Ok(rows
        .into_iter()
        .map(|(name, row)| {
            let score = row
                .iter()
                .zip(&best)
                .map(|(&x, &b)| if b > 0.0 { x / b } else { 0.0 })
                .sum();
            (name.clone(), score)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeExtremes {
    pub max_size: usize,
    pub min_size: usize,
    pub largest: Vec<VertexId>,
    pub smallest: Vec<VertexId>,
}

/// Largest and smallest communities. Among equal sizes the community with
/// the smallest member wins.
pub fn community_size_extremes(c: &Cover) -> Result<SizeExtremes> {
    let canonical = c.canonical();
    let largest = canonical
        .iter()
        .rev()
        .max_by_key(|m| m.len())
        .ok_or(Error::EmptyCover)?;
    let smallest = canonical.iter().min_by_key(|m| m.len()).ok_or(Error::EmptyCover)?;
    Ok(SizeExtremes {
        max_size: largest.len(),
        min_size: smallest.len(),
        largest: largest.clone(),
        smallest: smallest.clone(),
    })
}

/// Which scores to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetricSet {
    pub onmi: bool,
    pub omega: bool,
    pub f1: bool,
    pub nmi: bool,
}

impl Default for MetricSet {
    fn default() -> Self {
        MetricSet {
            onmi: true,
            omega: true,
            f1: true,
            nmi: false,
        }
    }
}

impl std::str::FromStr for MetricSet {
    type Err = Error;

    /// Comma separated list of `onmi`, `omega`, `f1`, `nmi`.
    fn from_str(s: &str) -> Result<Self> {
        let mut set = MetricSet {
            onmi: false,
            omega: false,
            f1: false,
            nmi: false,
        };
        for name in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match name {
                "onmi" => set.onmi = true,
                "omega" => set.omega = true,
                "f1" | "avg_f1" => set.f1 = true,
                "nmi" => set.nmi = true,
                other => return Err(Error::InvalidConfig(format!("unknown metric `{other}`"))),
            }
        }
        Ok(set)
    }
}

/// Scores of one detected cover against ground truth. Absent entries were
/// not requested.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MetricReport {
    pub onmi: Option<f64>,
    pub omega: Option<f64>,
    pub avg_f1: Option<f64>,
    pub nmi: Option<f64>,
}

impl MetricReport {
    pub const COLUMNS: [&'static str; 4] = ["onmi", "omega", "avg_f1", "nmi"];

    fn values(&self) -> [Option<f64>; 4] {
        [self.onmi, self.omega, self.avg_f1, self.nmi]
    }

    /// `key = value` lines for the requested scores.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (key, value) in Self::COLUMNS.iter().zip(self.values()) {
            if let Some(x) = value {
                let _ = writeln!(out, "{key} = {}", format_score(x));
            }
        }
        out
    }

    pub fn tsv_header() -> String {
        Self::COLUMNS.join("\t")
    }

    /// Tab separated values in [`MetricReport::COLUMNS`] order, `NA` for
    /// missing scores.
    pub fn to_tsv_row(&self) -> String {
        self.values()
            .iter()
            .map(|v| v.map_or_else(|| "NA".to_owned(), format_score))
            .collect::<Vec<_>>()
            .join("\t")
    }
}

pub fn format_score(x: f64) -> String {
    format!("{x:.6}")
}

/// Computes the requested scores. NMI requires both covers to be disjoint
/// and fails with [`Error::OverlappingCover`] otherwise.
pub fn evaluate(detected: &Cover, truth: &Cover, metrics: &MetricSet) -> Result<MetricReport> {
    let mut report = MetricReport::default();
    if metrics.onmi {
        report.onmi = Some(onmi(detected, truth)?);
    }
    if metrics.omega {
        report.omega = Some(omega_index(detected, truth)?);
    }
    if metrics.f1 {
        report.avg_f1 = Some(avg_f1(detected, truth)?);
    }
    if metrics.nmi {
        report.nmi = Some(nmi_of_covers(detected, truth)?);
    }
    Ok(report)
}

/// NMI between two covers that are both disjoint on their common support.
pub fn nmi_of_covers(c1: &Cover, c2: &Cover) -> Result<f64> {
    let (x, y, _) = common_support(c1, c2)?;
    let support: Vec<VertexId> = (0..x.num_vertices()).filter(|&v| x.is_covered(v)).collect();
    let collapse = |c: &Cover, which| c.reindex(&support).to_partition().ok_or(Error::OverlappingCover(which));
    let px = collapse(&x, "detected")?;
    let py = collapse(&y, "truth")?;
    nmi_disjoint(&px, &py)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cover(n: usize, comms: &[&[usize]]) -> Cover {
        Cover::new(n, comms.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    fn part(raw: &[usize]) -> Partition {
        Partition::from_assignment(raw).unwrap()
    }

    #[test]
    fn nmi_examples() {
        let p = part(&[0, 0, 1, 1, 2]);
        assert!((nmi_disjoint(&p, &part(&[5, 5, 7, 7, 9])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(nmi_disjoint(&p, &part(&[0; 5])).unwrap(), 0.0);
        assert_eq!(nmi_disjoint(&part(&[0, 0, 1, 1]), &part(&[0, 1, 0, 1])).unwrap(), 0.0);
        assert_eq!(nmi_disjoint(&part(&[0; 3]), &part(&[1; 3])).unwrap(), 1.0);
        assert!(matches!(
            nmi_disjoint(&p, &part(&[0; 4])),
            Err(Error::DomainMismatch(_))
        ));
    }

    #[test]
    fn onmi_identity_and_degenerate() {
        let c = cover(6, &[&[0, 1, 2, 3], &[3, 4, 5]]);
        assert!((onmi(&c, &c).unwrap() - 1.0).abs() < 1e-12);
        let all = cover(4, &[&[0, 1, 2, 3]]);
        let singles = cover(4, &[&[0], &[1], &[2], &[3]]);
        assert_eq!(onmi(&all, &singles).unwrap(), 0.0);
        assert_eq!(onmi(&all, &all).unwrap(), 1.0);
    }

    #[test]
    fn omega_examples() {
        let a = cover(4, &[&[0, 1], &[2, 3]]);
        let b = cover(4, &[&[0, 2], &[1, 3]]);
        assert_eq!(omega_index(&a, &b).unwrap(), -0.5);
        assert_eq!(omega_index(&a, &a).unwrap(), 1.0);
        let singles = cover(4, &[&[0], &[1], &[2], &[3]]);
        let also = cover(4, &[&[0], &[1], &[2], &[3], &[0]]);
        assert_eq!(omega_index(&also, &singles).unwrap(), 1.0);
        assert!(omega_index(&cover(1, &[&[0]]), &cover(1, &[&[0]])).is_err());
    }

    #[test]
    fn f1_examples() {
        let truth = cover(3, &[&[0, 1, 2]]);
        let detected = cover(3, &[&[0, 1]]);
        assert_eq!(avg_f1(&detected, &truth).unwrap(), 0.8);
        assert_eq!(avg_f1(&truth, &truth).unwrap(), 1.0);
        let x = cover(4, &[&[0, 1]]);
        let y = cover(4, &[&[2, 3]]);
        assert_eq!(avg_f1(&x, &y).unwrap(), 0.0);
        assert!(matches!(avg_f1(&cover(3, &[]), &truth), Err(Error::EmptyCover)));
    }

    #[test]
    fn jaccard_examples() {
        assert_eq!(jaccard(&[1, 2, 3], &[2, 3, 4]), 0.5);
        assert_eq!(jaccard(&[1, 2], &[2, 1]), 1.0);
        assert_eq!(jaccard(&[1], &[2]), 0.0);
        assert_eq!(jaccard(&[], &[]), 1.0);
    }

    #[test]
    fn composite_examples() {
        let mut m = BTreeMap::new();
        m.insert(
            "A".to_string(),
            MethodScores {
                onmi: 0.8,
                omega: 0.5,
                f1: 0.6,
            },
        );
        assert_eq!(composite_scores(&m).unwrap()["A"], 3.0);
        m.insert(
            "B".to_string(),
            MethodScores {
                onmi: 0.4,
                omega: 0.5,
                f1: 0.3,
            },
        );
        let s = composite_scores(&m).unwrap();
        assert_eq!(s["A"], 3.0);
        assert_eq!(s["B"], 2.0);

        let mut z = BTreeMap::new();
        z.insert(
            "A".to_string(),
            MethodScores {
                onmi: 0.5,
                omega: -0.2,
                f1: 0.5,
            },
        );
        z.insert(
            "B".to_string(),
            MethodScores {
                onmi: 0.25,
                omega: -0.1,
                f1: 0.5,
            },
        );
        let s = composite_scores(&z).unwrap();
        assert_eq!(s["A"], 2.0);
        assert_eq!(s["B"], 1.5);
        assert!(composite_scores(&BTreeMap::new()).is_err());
    }

    #[test]
    fn size_extremes() {
        let e = community_size_extremes(&cover(4, &[&[0, 1, 2], &[3]])).unwrap();
        assert_eq!((e.max_size, e.min_size), (3, 1));
        let e = community_size_extremes(&cover(2, &[&[0, 1]])).unwrap();
        assert_eq!(e.max_size, e.min_size);
        let e = community_size_extremes(&cover(4, &[&[2, 3], &[0, 1]])).unwrap();
        assert_eq!(e.largest, vec![0, 1]);
        assert_eq!(e.smallest, vec![0, 1]);
        assert!(community_size_extremes(&cover(2, &[])).is_err());
    }

    #[test]
    fn partial_covers_use_common_support() {
        let truth = cover(5, &[&[0, 1], &[2, 3]]);
        let detected = cover(5, &[&[0, 1], &[2, 3, 4]]);
        assert_eq!(omega_index(&detected, &truth).unwrap(), 1.0);
        // F1 sees the extra member: best matches 1 and 0.8 on both sides.
        assert_eq!(avg_f1(&detected, &truth).unwrap(), 0.9);
        assert!((onmi(&detected, &truth).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn report_formats() {
        let c = cover(4, &[&[0, 1], &[2, 3]]);
        let all = MetricSet {
            nmi: true,
            ..Default::default()
        };
        let r = evaluate(&c, &c, &all).unwrap();
        assert_eq!(r.to_tsv_row(), "1.000000\t1.000000\t1.000000\t1.000000");
        assert!(r.to_key_value().contains("omega = 1.000000"));
        let overlapping = cover(4, &[&[0, 1, 2], &[2, 3]]);
        assert!(matches!(
            evaluate(&overlapping, &c, &all),
            Err(Error::OverlappingCover("detected"))
        ));
        let set: MetricSet = "onmi,nmi".parse().unwrap();
        assert!(set.onmi && set.nmi && !set.f1 && !set.omega);
        assert!("bogus".parse::<MetricSet>().is_err());
    }
}
